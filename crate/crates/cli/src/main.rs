mod config;
mod error;
mod files;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stlkit::ops::{batch_robustness, evaluate, Method};
use stlkit::syntax::{parse, print_formula, tree_string, Logic};
use stlkit::synthesis::{build_control, build_trajectory, check_result, solve, CostWeights, Problem};
use stlkit::{horizon, negate, pnf, Formula, Trace, WeightTable};
use stlkit_milp::{export_lp, BnbOptions};

use config::SystemConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "stlkit", version, about = "Parse, monitor, and synthesize from STL, MTL, and weighted STL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the syntax tree of a formula.
    Parse {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Horizon, negation normal form, or negation of a formula.
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        what: AnalyzeWhat,
    },
    /// Robustness of traces read from CSV.
    Robustness {
        #[command(flatten)]
        spec: SpecArgs,
        /// Trace CSV with a leading `time` column.
        #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
        trace: Option<PathBuf>,
        /// Directory of trace CSVs, evaluated in file name order.
        #[arg(long)]
        batch: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Classic)]
        method: MethodArg,
        /// JSON object mapping each signal to `[lower, upper]`; required by AGM.
        #[arg(long)]
        bounds: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        time: usize,
    },
    /// Solve a synthesis problem described by a JSON configuration.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Where to write the synthesized trace.
        #[arg(long)]
        out: PathBuf,
        /// Also write the MILP in LP format, before solving.
        #[arg(long)]
        export_lp: Option<PathBuf>,
        /// Relative optimality gap at which to stop.
        #[arg(long)]
        gap: Option<f64>,
        /// Branch-and-bound node limit.
        #[arg(long)]
        nodes: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpecSource {
    /// Formula text.
    #[arg(long)]
    spec: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, value_enum)]
    logic: LogicArg,
    #[command(flatten)]
    source: SpecSource,
    /// JSON object mapping weight names to arrays (weighted STL).
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AnalyzeWhat {
    #[arg(long)]
    horizon: bool,
    #[arg(long)]
    pnf: bool,
    #[arg(long)]
    negate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogicArg {
    Stl,
    Mtl,
    Wstl,
}

impl From<LogicArg> for Logic {
    fn from(l: LogicArg) -> Self {
        match l {
            LogicArg::Stl => Logic::Stl,
            LogicArg::Mtl => Logic::Mtl,
            LogicArg::Wstl => Logic::Wstl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Classic,
    Agm,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Syntax(rendered) => eprintln!("{rendered}"),
                e => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Parse { spec } => {
            let (f, _) = spec.load()?;
            print!("{}", tree_string(&f));
        }
        Command::Analyze { spec, what } => {
            let (f, _) = spec.load()?;
            if what.horizon {
                println!("{}", horizon(&f));
            } else if what.pnf {
                println!("{}", print_formula(&pnf(&f)?));
            } else {
                println!("{}", print_formula(&negate(&f)?));
            }
        }
        Command::Robustness { spec, trace, batch, method, bounds, time } => {
            let (f, weights) = spec.load()?;
            let bounds = bounds.map(|p| files::read_json(&p).and_then(|m| files::bounds_from_map(&m))).transpose()?;
            let method = match (method, Logic::from(spec.logic)) {
                (MethodArg::Agm, Logic::Wstl) => {
                    return Err(CliError::Semantic("AGM robustness is not defined for weighted STL".into()))
                }
                (MethodArg::Agm, _) => Method::Agm(
                    bounds
                        .as_ref()
                        .ok_or_else(|| CliError::Semantic("missing bounds: AGM robustness needs --bounds".into()))?,
                ),
                (MethodArg::Classic, Logic::Wstl) => match &weights {
                    Some(w) => Method::Weighted(w),
                    None => return Err(CliError::Semantic("weighted STL robustness needs --weights".into())),
                },
                (MethodArg::Classic, _) => Method::Classic,
            };
            let values = match (trace, batch) {
                (Some(path), _) => vec![evaluate(&f, &files::read_trace(&path)?, time, method)?],
                (None, Some(dir)) => {
                    let traces = read_batch(&dir)?;
                    if time == 0 {
                        batch_robustness(&f, &traces, method)?
                    } else {
                        traces.iter().map(|t| evaluate(&f, t, time, method)).collect::<Result<_, _>>()?
                    }
                }
                (None, None) => unreachable!("clap requires one of --trace and --batch"),
            };
            for v in values {
                println!("{v}");
            }
        }
        Command::Synth { config, out, export_lp: lp, gap, nodes } => synth(&config, &out, lp.as_deref(), gap, nodes)?,
    }
    Ok(())
}

impl SpecArgs {
    fn load(&self) -> Result<(Formula, Option<WeightTable>), CliError> {
        let text = match (&self.source.spec, &self.source.file) {
            (Some(s), _) => s.clone(),
            (None, Some(p)) => files::read_text(p)?.trim().to_string(),
            (None, None) => unreachable!("clap requires one of --spec and --file"),
        };
        let weights =
            self.weights.as_ref().map(|p| files::read_json(p).and_then(files::weights_from_map)).transpose()?;
        let f = parse(&text, self.logic.into(), weights.as_ref()).map_err(|e| CliError::syntax(&e, &text))?;
        Ok((f, weights))
    }
}

fn read_batch(dir: &Path) -> Result<Vec<Trace>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| files::read_trace(p)).collect()
}

fn synth(path: &Path, out: &Path, lp: Option<&Path>, gap: Option<f64>, nodes: Option<usize>) -> Result<(), CliError> {
    let cfg: SystemConfig = files::read_json(path)?;
    let logic = match cfg.logic.as_str() {
        "stl" => Logic::Stl,
        "mtl" => Logic::Mtl,
        "wstl" => Logic::Wstl,
        other => return Err(CliError::Semantic(format!("unknown logic `{other}`"))),
    };
    let weights = cfg.weights.clone().map(files::weights_from_map).transpose()?;
    let f = parse(&cfg.formula, logic, weights.as_ref()).map_err(|e| CliError::syntax(&e, &cfg.formula))?;

    let (problem, sys): (Problem, _) = match &cfg.system {
        Some(section) => {
            let sys = section.to_system(cfg.horizon)?;
            let (n, m) = (sys.num_states(), sys.num_inputs());
            let costs = cfg.costs.as_ref().map_or_else(|| CostWeights::robustness_only(n, m), |c| c.to_costs(n, m));
            (build_control(&f, &sys, &costs, logic, weights.as_ref())?, Some(sys))
        }
        None => {
            let bounds = files::bounds_from_map(&cfg.signals)?;
            (build_trajectory(&f, &bounds, &cfg.initial, logic, weights.as_ref(), Some(cfg.horizon))?, None)
        }
    };
    if let Some(lp) = lp {
        fs::write(lp, export_lp(&problem.spec.model)?).map_err(|e| CliError::io(lp, e))?;
    }

    let mut options = BnbOptions::default();
    if let Some(g) = gap {
        options.gap = g;
    }
    if let Some(n) = nodes {
        options.node_limit = n;
    }
    let res = solve(&problem, sys.as_ref(), &options)?;
    println!("status: {}", res.status.as_str());
    if !res.status.has_solution() {
        return Err(CliError::NoSolution(res.status));
    }
    let show = |v: Option<f64>| v.map_or("none".to_string(), |v| v.to_string());
    println!("rho_milp: {}", show(res.rho_milp));
    println!("rho_monitor: {}", show(res.rho_monitor));
    println!("objective: {}", show(res.objective));
    println!("nodes: {}", res.nodes);
    let report = check_result(&res, &f, sys.as_ref(), weights.as_ref())?;
    if report.passed() {
        println!("check: passed");
    } else {
        println!("check: failed ({})", report.flags.join("; "));
    }
    files::write_trace(out, &[&res.states, &res.inputs])
}
