//! Trajectory optimization and open-loop control synthesis for LTI systems.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use stlkit_milp::{solve_milp, BnbOptions, ConstrSense, LinExpr, ModelError, SolveStatus, VarId};
use thiserror::Error;

use crate::encode::{encode_stl, encode_wstl, extract_trace, pin_initial, EncodeError, EncodedSpec};
use crate::ops::{evaluate_bool, horizon, robustness, wstl_robustness, OpsError};
use crate::syntax::{Formula, Logic};
use crate::trace::{Trace, VarBounds};
use crate::weights::WeightTable;

/// Tolerance for the residual and soundness checks.
pub const CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("formula signal `{0}` is not a state of the system")]
    UnknownSignal(String),
    #[error("initial value {value} of `{name}` lies outside its bounds")]
    InitialOutOfBounds { name: String, value: f64 },
    #[error("invalid cost weights: {0}")]
    InvalidCost(String),
    #[error("{0} synthesis is not supported")]
    UnsupportedLogic(Logic),
    #[error("weighted STL needs a weight table")]
    MissingWeights,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

/// Per-step bound on the input vector norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    pub norm: Norm,
    pub limit: f64,
}

/// `s(k+1) = A s(k) + B u(k) + D`, `y(k) = C s(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    pub state_names: Vec<String>,
    pub input_names: Vec<String>,
    pub state_bounds: Vec<(f64, f64)>,
    pub input_bounds: Vec<(f64, f64)>,
    pub x0: Vec<f64>,
    pub horizon: usize,
    pub saturation: Option<Saturation>,
}

impl LtiSystem {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let (n, m) = (self.num_states(), self.num_inputs());
        let dim = |ok: bool, what: &str| if ok { Ok(()) } else { Err(SynthError::DimensionMismatch(what.into())) };
        dim(self.a.len() == n && self.a.iter().all(|r| r.len() == n), "A must be n×n")?;
        dim(self.b.len() == n && self.b.iter().all(|r| r.len() == m), "B must be n×m")?;
        dim(self.c.iter().all(|r| r.len() == n), "C must have n columns")?;
        dim(self.d.len() == n, "D must have n entries")?;
        dim(self.state_bounds.len() == n, "state bounds must have n entries")?;
        dim(self.input_bounds.len() == m, "input bounds must have m entries")?;
        dim(self.x0.len() == n, "x0 must have n entries")?;
        dim(self.horizon >= 1, "horizon must be at least 1")?;
        for (i, name) in self.state_names.iter().enumerate() {
            let (lo, hi) = self.state_bounds[i];
            if !(lo <= self.x0[i] && self.x0[i] <= hi) {
                return Err(SynthError::InitialOutOfBounds { name: name.clone(), value: self.x0[i] });
            }
        }
        Ok(())
    }

    /// `max_k |s(k+1) − A s(k) − B u(k) − D|` over the first `horizon` steps.
    pub fn dynamics_residual(&self, states: &Trace, inputs: &Trace) -> f64 {
        let s = columns(states, &self.state_names);
        let u = columns(inputs, &self.input_names);
        let mut worst: f64 = 0.0;
        for k in 0..self.horizon.min(states.len().saturating_sub(1)) {
            for i in 0..self.num_states() {
                let mut pred = self.d[i];
                for j in 0..self.num_states() {
                    pred += self.a[i][j] * s[j][k];
                }
                for j in 0..self.num_inputs() {
                    pred += self.b[i][j] * u[j][k];
                }
                worst = worst.max((s[i][k + 1] - pred).abs());
            }
        }
        worst
    }

    /// Output trace `y(k) = C s(k)` with signals `y1 … yp`.
    pub fn outputs(&self, states: &Trace) -> Trace {
        let s = columns(states, &self.state_names);
        let cols = self
            .c
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let y = (0..states.len()).map(|k| row.iter().zip(&s).map(|(c, col)| c * col[k]).sum()).collect();
                (format!("y{}", r + 1), y)
            })
            .collect();
        Trace::new(cols).expect("output names are unique")
    }
}

fn columns<'a>(trace: &'a Trace, names: &[String]) -> Vec<&'a [f64]> {
    names.iter().map(|n| trace.get(n).unwrap_or(&[])).collect()
}

/// `λ·ρ − Σ α_i Σ_k |s_i(k)| − Σ β_j Σ_k |u_j(k)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostWeights {
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl CostWeights {
    /// Robustness only.
    pub fn robustness_only(n: usize, m: usize) -> Self {
        CostWeights { lambda: 1.0, alpha: vec![0.0; n], beta: vec![0.0; m] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub status: SolveStatus,
    /// Empty when the solver returned no solution.
    pub states: Trace,
    pub inputs: Trace,
    pub outputs: Trace,
    /// Robustness reported by the optimization: the shift in robust STL, the root variable in
    /// wSTL, and 0 in feasibility mode.
    pub rho_milp: Option<f64>,
    /// Robustness of the returned trace computed by the monitor.
    pub rho_monitor: Option<f64>,
    pub objective: Option<f64>,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub elapsed: Duration,
}

impl SynthesisResult {
    /// `Σ_j Σ_k |u_j(k)|`.
    pub fn control_effort(&self) -> f64 {
        self.inputs.iter().flat_map(|(_, v)| v.iter()).map(|x| x.abs()).sum()
    }
}

/// Built problem before solving, for export or further constraints.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: EncodedSpec,
    pub logic: Logic,
    pub input_vars: BTreeMap<(String, usize), VarId>,
    formula: Formula,
    weights: Option<WeightTable>,
}

fn encode(
    f: &Formula,
    logic: Logic,
    weights: Option<&WeightTable>,
    bounds: &VarBounds,
    robust: bool,
    horizon_override: Option<usize>,
) -> Result<EncodedSpec, SynthError> {
    Ok(match logic {
        Logic::Stl => {
            let mut spec = encode_stl(f, bounds, robust, true, horizon_override)?;
            // Synthesis demands the formula itself, not a weakened shift of it.
            if let Some(rho) = spec.rho {
                let upper = spec.model.var(rho).upper;
                spec.model.set_bounds(rho, 0.0, upper)?;
            }
            spec
        }
        Logic::Wstl => {
            let w = weights.ok_or(SynthError::MissingWeights)?;
            encode_wstl(f, w, bounds, true, horizon_override)?
        }
        Logic::Mtl => return Err(SynthError::UnsupportedLogic(logic)),
    })
}

/// Trajectory optimization without dynamics: maximize robustness subject to the bounds.
/// `horizon` extends the signals past the formula horizon.
pub fn build_trajectory(
    f: &Formula,
    bounds: &VarBounds,
    initial: &BTreeMap<String, f64>,
    logic: Logic,
    weights: Option<&WeightTable>,
    horizon: Option<usize>,
) -> Result<Problem, SynthError> {
    let mut spec = encode(f, logic, weights, bounds, true, horizon)?;
    for (name, value) in initial {
        if let Some((lo, hi)) = bounds.get(name) {
            if !(lo <= *value && *value <= hi) {
                return Err(SynthError::InitialOutOfBounds { name: name.clone(), value: *value });
            }
        }
        pin_initial(&mut spec, name, *value)?;
    }
    Ok(Problem { spec, logic, input_vars: BTreeMap::new(), formula: f.clone(), weights: weights.cloned() })
}

pub fn synth_trajectory(
    f: &Formula,
    bounds: &VarBounds,
    initial: &BTreeMap<String, f64>,
    logic: Logic,
    weights: Option<&WeightTable>,
    options: &BnbOptions,
) -> Result<SynthesisResult, SynthError> {
    solve(&build_trajectory(f, bounds, initial, logic, weights, None)?, None, options)
}

/// Builds the control synthesis problem over `sys.horizon` steps.
pub fn build_control(
    f: &Formula,
    sys: &LtiSystem,
    costs: &CostWeights,
    logic: Logic,
    weights: Option<&WeightTable>,
) -> Result<Problem, SynthError> {
    sys.validate()?;
    let (n, m) = (sys.num_states(), sys.num_inputs());
    if costs.alpha.len() != n || costs.beta.len() != m {
        return Err(SynthError::DimensionMismatch("cost vectors must match the state and input counts".into()));
    }
    let all = std::iter::once(costs.lambda).chain(costs.alpha.iter().copied()).chain(costs.beta.iter().copied());
    if all.into_iter().any(|w| !(w >= 0.0) || !w.is_finite()) {
        return Err(SynthError::InvalidCost("weights must be finite and nonnegative".into()));
    }
    for s in f.signals() {
        if !sys.state_names.contains(&s) {
            return Err(SynthError::UnknownSignal(s));
        }
    }
    let mut bounds = VarBounds::new();
    for (name, (lo, hi)) in sys.state_names.iter().zip(&sys.state_bounds) {
        bounds.insert(name.clone(), *lo, *hi).map_err(|e| SynthError::DimensionMismatch(e.to_string()))?;
    }
    let needed = horizon(f);
    if needed > sys.horizon {
        return Err(EncodeError::HorizonOverrideTooSmall { requested: sys.horizon, needed }.into());
    }

    // With λ = 0 robustness plays no role, so plain satisfaction is encoded.
    let robust = costs.lambda > 0.0;
    let mut spec = encode(f, logic, weights, &bounds, robust, Some(sys.horizon))?;
    for (name, (lo, hi)) in sys.state_names.iter().zip(&sys.state_bounds) {
        spec.ensure_signal(name, *lo, *hi)?;
    }
    let steps = sys.horizon;
    let mut input_vars = BTreeMap::new();
    for (j, name) in sys.input_names.iter().enumerate() {
        let (mut lo, mut hi) = sys.input_bounds[j];
        if let Some(Saturation { norm: Norm::Linf, limit }) = sys.saturation {
            lo = lo.max(-limit);
            hi = hi.min(limit);
        }
        for k in 0..=steps {
            let v = spec.model.add_continuous(format!("{name}_{k}"), lo, hi)?;
            input_vars.insert((name.clone(), k), v);
        }
    }
    let s = |spec: &EncodedSpec, i: usize, k: usize| spec.signal_var(&sys.state_names[i], k).unwrap();

    for k in 0..steps {
        for i in 0..n {
            // s_i(k+1) − Σ A_ij s_j(k) − Σ B_ij u_j(k) = D_i
            let mut terms = vec![(1.0, s(&spec, i, k + 1))];
            for j in 0..n {
                terms.push((-sys.a[i][j], s(&spec, j, k)));
            }
            for j in 0..m {
                terms.push((-sys.b[i][j], input_vars[&(sys.input_names[j].clone(), k)]));
            }
            spec.model.add_constr(terms, ConstrSense::Eq, sys.d[i], format!("dyn_{}_{k}", sys.state_names[i]))?;
        }
    }
    for (i, name) in sys.state_names.iter().enumerate() {
        pin_initial(&mut spec, name, sys.x0[i])?;
    }

    let mut abs_cache: BTreeMap<VarId, VarId> = BTreeMap::new();
    let mut abs_of = |spec: &mut EncodedSpec, v: VarId| -> Result<VarId, SynthError> {
        if let Some(a) = abs_cache.get(&v) {
            return Ok(*a);
        }
        let var = spec.model.var(v).clone();
        let aux = spec.model.add_continuous(format!("abs_{}", var.name), 0.0, var.lower.abs().max(var.upper.abs()))?;
        spec.model.add_abs_link(v, aux)?;
        abs_cache.insert(v, aux);
        Ok(aux)
    };

    if let Some(Saturation { norm: Norm::L1, limit }) = sys.saturation {
        for k in 0..=steps {
            let mut terms = Vec::new();
            for name in &sys.input_names {
                terms.push((1.0, abs_of(&mut spec, input_vars[&(name.clone(), k)])?));
            }
            spec.model.add_constr(terms, ConstrSense::Le, limit, format!("sat_{k}"))?;
        }
    }

    let mut objective = LinExpr::new();
    if costs.lambda > 0.0 {
        let rob = match logic {
            Logic::Wstl => spec.root.var,
            _ => spec.rho.expect("robust encoding has a shift variable"),
        };
        objective.add_term(costs.lambda, rob);
    }
    for (i, &alpha) in costs.alpha.iter().enumerate() {
        if alpha > 0.0 {
            for k in 0..=steps {
                let v = s(&spec, i, k);
                let aux = abs_of(&mut spec, v)?;
                objective.add_term(-alpha, aux);
            }
        }
    }
    for (j, &beta) in costs.beta.iter().enumerate() {
        if beta > 0.0 {
            for k in 0..=steps {
                let aux = abs_of(&mut spec, input_vars[&(sys.input_names[j].clone(), k)])?;
                objective.add_term(-beta, aux);
            }
        }
    }
    spec.model.set_objective(stlkit_milp::ObjSense::Maximize, objective)?;
    Ok(Problem { spec, logic, input_vars, formula: f.clone(), weights: weights.cloned() })
}

pub fn synth_control(
    f: &Formula,
    sys: &LtiSystem,
    costs: &CostWeights,
    logic: Logic,
    weights: Option<&WeightTable>,
    options: &BnbOptions,
) -> Result<SynthesisResult, SynthError> {
    let problem = build_control(f, sys, costs, logic, weights)?;
    solve(&problem, Some(sys), options)
}

/// Solves a built problem and extracts the traces.
pub fn solve(problem: &Problem, sys: Option<&LtiSystem>, options: &BnbOptions) -> Result<SynthesisResult, SynthError> {
    let start = Instant::now();
    let sol = solve_milp(&problem.spec.model, options);
    let elapsed = start.elapsed();
    let mut res = SynthesisResult {
        status: sol.status,
        states: Trace::default(),
        inputs: Trace::default(),
        outputs: Trace::default(),
        rho_milp: None,
        rho_monitor: None,
        objective: None,
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        elapsed,
    };
    if !sol.status.has_solution() {
        return Ok(res);
    }
    let spec = &problem.spec;
    res.objective = Some(sol.objective);
    res.rho_milp = Some(match (problem.logic, spec.rho) {
        (Logic::Wstl, _) => sol.values[spec.root.var.0],
        (_, Some(rho)) => sol.values[rho.0],
        _ => 0.0,
    });
    res.states = extract_trace(spec, &sol)?;
    if let Some(sys) = sys {
        let mut inputs = Trace::default();
        for name in &sys.input_names {
            let col = (0..=spec.horizon).map(|k| sol.values[problem.input_vars[&(name.clone(), k)].0]).collect();
            inputs.push(name.clone(), col).expect("input names are unique");
        }
        res.inputs = inputs;
        res.outputs = sys.outputs(&res.states);
    }
    res.rho_monitor = Some(monitor(&problem.formula, problem.logic, problem.weights.as_ref(), &res.states)?);
    Ok(res)
}

fn monitor(f: &Formula, logic: Logic, weights: Option<&WeightTable>, trace: &Trace) -> Result<f64, SynthError> {
    Ok(match (logic, weights) {
        (Logic::Wstl, Some(w)) => wstl_robustness(f, w, trace, 0)?,
        _ => robustness(f, trace, 0)?,
    })
}

/// Independent re-check of a synthesis result.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub dynamics_residual: Option<f64>,
    pub initial_residual: Option<f64>,
    pub monitor_robustness: f64,
    pub satisfied: bool,
    /// One message per violated check.
    pub flags: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Recomputes dynamics residuals, monitor robustness, and Boolean satisfaction.
pub fn check_result(
    res: &SynthesisResult,
    f: &Formula,
    sys: Option<&LtiSystem>,
    weights: Option<&WeightTable>,
) -> Result<CheckReport, SynthError> {
    let logic = if weights.is_some() { Logic::Wstl } else { Logic::Stl };
    let monitor_robustness = monitor(f, logic, weights, &res.states)?;
    let satisfied = evaluate_bool(f, &res.states, 0)?;
    let mut flags = Vec::new();
    let (mut dynamics_residual, mut initial_residual) = (None, None);
    if let Some(sys) = sys {
        let r = sys.dynamics_residual(&res.states, &res.inputs);
        if r > CHECK_TOL {
            flags.push(format!("dynamics residual {r:e} exceeds {CHECK_TOL:e}"));
        }
        dynamics_residual = Some(r);
        let init = sys
            .state_names
            .iter()
            .zip(&sys.x0)
            .map(|(n, x)| res.states.get(n).map_or(f64::INFINITY, |c| (c[0] - x).abs()))
            .fold(0.0, f64::max);
        if init > CHECK_TOL {
            flags.push(format!("initial state residual {init:e} exceeds {CHECK_TOL:e}"));
        }
        initial_residual = Some(init);
    }
    if let Some(rho) = res.rho_milp {
        if rho >= 0.0 && monitor_robustness < rho - CHECK_TOL {
            flags.push(format!("monitor robustness {monitor_robustness} is below the optimized value {rho}"));
        }
    }
    if !satisfied {
        flags.push("trace does not satisfy the formula".into());
    }
    Ok(CheckReport { dynamics_residual, initial_residual, monitor_robustness, satisfied, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_stl;

    fn double_integrator(horizon: usize) -> LtiSystem {
        LtiSystem {
            a: vec![vec![1.0, 1.0], vec![0.0, 1.0]],
            b: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            c: vec![vec![1.0, 0.0]],
            d: vec![0.0, 0.0],
            state_names: vec!["s1".into(), "s2".into()],
            input_names: vec!["u1".into(), "u2".into()],
            state_bounds: vec![(-9.0, 9.0); 2],
            input_bounds: vec![(-5.0, 5.0); 2],
            x0: vec![0.0, 0.0],
            horizon,
            saturation: None,
        }
    }

    #[test]
    fn unreachable_bound_is_infeasible() {
        let f = parse_stl("G[0,3] s>2").unwrap();
        let b = VarBounds::new().with("s", 0.0, 1.0).unwrap();
        let r = synth_trajectory(&f, &b, &BTreeMap::new(), Logic::Stl, None, &BnbOptions::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.states.is_empty());
    }

    #[test]
    fn short_control_problem() {
        let sys = double_integrator(3);
        let f = parse_stl("F[2,3] s1>=2").unwrap();
        let r = synth_control(&f, &sys, &CostWeights::robustness_only(2, 2), Logic::Stl, None, &BnbOptions::default())
            .unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let report = check_result(&r, &f, Some(&sys), None).unwrap();
        assert!(report.passed(), "{:?}", report.flags);
        assert_eq!(r.outputs.get("y1"), r.states.get("s1"));
    }

    #[test]
    fn corrupted_trace_is_flagged() {
        let sys = double_integrator(5);
        let f = parse_stl("F[2,3] s1>=2").unwrap();
        let mut r =
            synth_control(&f, &sys, &CostWeights::robustness_only(2, 2), Logic::Stl, None, &BnbOptions::default())
                .unwrap();
        let mut s1 = r.states.get("s1").unwrap().to_vec();
        s1[4] += 1.0;
        let s2 = r.states.get("s2").unwrap().to_vec();
        r.states = Trace::new(vec![("s1".into(), s1), ("s2".into(), s2)]).unwrap();
        let report = check_result(&r, &f, Some(&sys), None).unwrap();
        assert!(report.dynamics_residual.unwrap() > 0.5);
        assert!(!report.passed());
    }

    #[test]
    fn l1_saturation_holds() {
        let mut sys = double_integrator(4);
        sys.saturation = Some(Saturation { norm: Norm::L1, limit: 1.0 });
        let f = parse_stl("F[3,4] s1>=1").unwrap();
        let r = synth_control(&f, &sys, &CostWeights::robustness_only(2, 2), Logic::Stl, None, &BnbOptions::default())
            .unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        for k in 0..=4 {
            let l1 = r.inputs.get("u1").unwrap()[k].abs() + r.inputs.get("u2").unwrap()[k].abs();
            assert!(l1 <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn validation() {
        let mut sys = double_integrator(3);
        sys.d = vec![0.0];
        assert!(matches!(sys.validate(), Err(SynthError::DimensionMismatch(_))));
        let sys = double_integrator(3);
        let f = parse_stl("x>0").unwrap();
        assert_eq!(
            build_control(&f, &sys, &CostWeights::robustness_only(2, 2), Logic::Stl, None).unwrap_err(),
            SynthError::UnknownSignal("x".into())
        );
    }
}
