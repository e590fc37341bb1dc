//! Translation of formulas into mixed-integer linear programs.

mod boolean;
mod weighted;

use std::collections::{BTreeMap, BTreeSet};

use stlkit_milp::{ConstrId, ConstrSense, Model, ModelError, Solution, SolveStatus, VarId};
use thiserror::Error;

use crate::ops::OpsError;
use crate::syntax::{Formula, FormulaKind, Logic};
use crate::trace::{Trace, VarBounds};

pub use boolean::{encode_mtl, encode_stl, DELTA};
pub use weighted::encode_wstl;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no bounds given for signal `{0}`")]
    MissingBound(String),
    #[error("bounds of signal `{0}` must be finite")]
    UnboundedSignal(String),
    #[error("horizon override {requested} is below the formula horizon {needed}")]
    HorizonOverrideTooSmall { requested: usize, needed: usize },
    #[error("unknown weight `{0}`")]
    UnknownWeight(String),
    #[error("weight `{name}` has {got} entries, expected {expected}")]
    WeightArityMismatch { name: String, expected: usize, got: usize },
    #[error("{0}")]
    UnsupportedNode(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("solution has no values (status {})", .0.as_str())]
    NotOptimal(SolveStatus),
}

/// A satisfaction indicator: `var`, or `1 − var` when `negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub var: VarId,
    pub negated: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Self {
        Lit { var, negated: false }
    }

    /// Value of the literal under a solution vector.
    pub fn value(&self, values: &[f64]) -> f64 {
        let v = values[self.var.0];
        if self.negated {
            1.0 - v
        } else {
            v
        }
    }

    /// Appends `coef · lit` to `terms`, returning the constant it contributes.
    pub(crate) fn push_terms(&self, coef: f64, terms: &mut Vec<(f64, VarId)>) -> f64 {
        if self.negated {
            terms.push((-coef, self.var));
            coef
        } else {
            terms.push((coef, self.var));
            0.0
        }
    }
}

/// A formula encoded into a model that stays open for further variables and constraints.
#[derive(Debug, Clone)]
pub struct EncodedSpec {
    pub model: Model,
    pub logic: Logic,
    /// The positive normal form that was encoded.
    pub formula: Formula,
    /// Signal variable per (signal, step) for steps `0..=horizon`.
    pub signal_vars: BTreeMap<(String, usize), VarId>,
    /// MTL proposition binaries per (atom, step).
    pub atom_vars: BTreeMap<(String, usize), VarId>,
    /// Per (pre-order node index, step): the satisfaction literal (STL/MTL) or robustness
    /// variable (wSTL).
    pub node_vars: BTreeMap<(usize, usize), Lit>,
    /// Root handle at step 0.
    pub root: Lit,
    /// Global robustness shift in robust STL mode.
    pub rho: Option<VarId>,
    pub horizon: usize,
    /// Big-M used by each predicate node, by pre-order index.
    pub big_m: BTreeMap<usize, f64>,
    /// Root enforcement constraint, when satisfaction was requested.
    pub satisfaction: Option<ConstrId>,
}

impl EncodedSpec {
    pub fn signal_var(&self, signal: &str, step: usize) -> Option<VarId> {
        self.signal_vars.get(&(signal.to_string(), step)).copied()
    }

    /// Names of the signals with variables, sorted.
    pub fn signals(&self) -> Vec<String> {
        let mut names: Vec<String> = self.signal_vars.keys().map(|(s, _)| s.clone()).collect();
        names.dedup();
        names
    }

    /// Creates variables `signal_0 … signal_horizon` unless they already exist.
    pub fn ensure_signal(&mut self, signal: &str, lower: f64, upper: f64) -> Result<(), EncodeError> {
        if self.signal_var(signal, 0).is_some() {
            return Ok(());
        }
        let vars = add_signal_vars(&mut self.model, signal, lower, upper, self.horizon)?;
        for (k, v) in vars.into_iter().enumerate() {
            self.signal_vars.insert((signal.to_string(), k), v);
        }
        Ok(())
    }

    /// Robustness-level value of the root in a solution: `rho` in robust STL, the root
    /// variable in wSTL, otherwise the root literal.
    pub fn root_value(&self, solution: &Solution) -> f64 {
        match (self.logic, self.rho) {
            (Logic::Wstl, _) => solution.values[self.root.var.0],
            (_, Some(rho)) => solution.values[rho.0],
            _ => self.root.value(&solution.values),
        }
    }
}

pub(crate) fn add_signal_vars(
    model: &mut Model,
    signal: &str,
    lower: f64,
    upper: f64,
    horizon: usize,
) -> Result<Vec<VarId>, EncodeError> {
    (0..=horizon)
        .map(|k| model.add_continuous(format!("{signal}_{k}"), lower, upper).map_err(EncodeError::from))
        .collect()
}

/// Signal variables for every signal of `f`, with finite bounds taken from `bounds`.
pub(crate) fn signal_vars_for(
    model: &mut Model,
    f: &Formula,
    bounds: &VarBounds,
    horizon: usize,
) -> Result<BTreeMap<(String, usize), VarId>, EncodeError> {
    let mut out = BTreeMap::new();
    for s in f.signals() {
        let (lo, hi) = signal_bounds(bounds, &s)?;
        for (k, v) in add_signal_vars(model, &s, lo, hi, horizon)?.into_iter().enumerate() {
            out.insert((s.clone(), k), v);
        }
    }
    Ok(out)
}

pub(crate) fn signal_bounds(bounds: &VarBounds, s: &str) -> Result<(f64, f64), EncodeError> {
    let (lo, hi) = bounds.get(s).ok_or_else(|| EncodeError::MissingBound(s.to_string()))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(EncodeError::UnboundedSignal(s.to_string()));
    }
    Ok((lo, hi))
}

pub(crate) fn resolve_horizon(f: &Formula, horizon_override: Option<usize>) -> Result<usize, EncodeError> {
    let needed = crate::ops::horizon(f);
    match horizon_override {
        Some(requested) if requested < needed => Err(EncodeError::HorizonOverrideTooSmall { requested, needed }),
        Some(requested) => Ok(requested),
        None => Ok(needed),
    }
}

/// Pre-order arena: node references with the indices of their children.
pub(crate) struct Arena<'a> {
    pub nodes: Vec<&'a Formula>,
    pub children: Vec<Vec<usize>>,
}

impl<'a> Arena<'a> {
    pub fn new(root: &'a Formula) -> Self {
        let mut arena = Arena { nodes: Vec::new(), children: Vec::new() };
        arena.visit(root);
        arena
    }

    fn visit(&mut self, f: &'a Formula) -> usize {
        let id = self.nodes.len();
        self.nodes.push(f);
        self.children.push(Vec::new());
        let kids: Vec<usize> = f.children().into_iter().map(|c| self.visit(c)).collect();
        self.children[id] = kids;
        id
    }
}

pub(crate) fn reject_not(f: &Formula) -> Result<(), EncodeError> {
    if f.nodes().iter().any(|n| matches!(n.kind, FormulaKind::Not(_))) {
        return Err(EncodeError::UnsupportedNode("negation must be eliminated before encoding".into()));
    }
    Ok(())
}

/// Adds `signal_0 = value`.
pub fn pin_initial(spec: &mut EncodedSpec, signal: &str, value: f64) -> Result<ConstrId, EncodeError> {
    let v = spec.signal_var(signal, 0).ok_or_else(|| EncodeError::UnknownSignal(signal.to_string()))?;
    Ok(spec.model.add_constr([(1.0, v)], ConstrSense::Eq, value, "")?)
}

/// Signal values of a solution over steps `0..=horizon`, signals sorted by name. MTL
/// propositions follow as 0/1 columns, 0 at steps the formula never reads.
pub fn extract_trace(spec: &EncodedSpec, solution: &Solution) -> Result<Trace, EncodeError> {
    if !solution.status.has_solution() || solution.values.is_empty() {
        return Err(EncodeError::NotOptimal(solution.status));
    }
    let mut trace = Trace::default();
    for s in spec.signals() {
        let col = (0..=spec.horizon).map(|k| solution.values[spec.signal_vars[&(s.clone(), k)].0]).collect();
        trace.push(s, col).expect("signal names are unique");
    }
    let atoms: BTreeSet<&String> = spec.atom_vars.keys().map(|(name, _)| name).collect();
    for a in atoms {
        let col = (0..=spec.horizon)
            .map(|k| spec.atom_vars.get(&(a.clone(), k)).map_or(0.0, |v| solution.values[v.0].round()))
            .collect();
        trace.push(a.clone(), col).expect("proposition names are unique");
    }
    Ok(trace)
}
