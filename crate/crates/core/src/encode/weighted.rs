//! Weighted STL: one continuous robustness variable per (node, step), with exact weighted
//! minima and maxima through selector binaries.

use std::collections::BTreeMap;

use stlkit_milp::{ConstrSense, LinExpr, Model, ObjSense, VarId};

use super::{reject_not, resolve_horizon, signal_vars_for, Arena, EncodeError, EncodedSpec, Lit};
use crate::ops::pnf;
use crate::syntax::{Cmp, Formula, FormulaKind, Logic, Predicate};
use crate::trace::VarBounds;
use crate::weights::WeightTable;

/// Robustness variable with the interval it is known to lie in.
#[derive(Debug, Clone, Copy)]
struct Rob {
    var: VarId,
    lo: f64,
    hi: f64,
}

/// Encodes a weighted STL formula and maximizes the root robustness.
///
/// Unweighted operators aggregate with unit weights; Until uses the unweighted semantics.
pub fn encode_wstl(
    f: &Formula,
    weights: &WeightTable,
    bounds: &VarBounds,
    satisfaction: bool,
    horizon_override: Option<usize>,
) -> Result<EncodedSpec, EncodeError> {
    if !f.atoms().is_empty() {
        return Err(EncodeError::UnsupportedNode("atomic propositions are not wSTL predicates".into()));
    }
    let formula = pnf(f)?;
    reject_not(&formula)?;
    let horizon = resolve_horizon(&formula, horizon_override)?;
    let mut model = Model::new();
    let signal_vars = signal_vars_for(&mut model, &formula, bounds, horizon)?;
    let arena = Arena::new(&formula);
    let mut enc = Encoder { model, arena: &arena, signal_vars: &signal_vars, weights, bounds, memo: BTreeMap::new() };
    let root = enc.rob(0, 0)?;
    let Encoder { mut model, memo, .. } = enc;

    let satisfaction_constr =
        if satisfaction { Some(model.add_constr([(1.0, root.var)], ConstrSense::Ge, 0.0, "root")?) } else { None };
    model.set_objective(ObjSense::Maximize, LinExpr::var(root.var))?;

    Ok(EncodedSpec {
        model,
        logic: Logic::Wstl,
        formula: formula.clone(),
        signal_vars,
        atom_vars: BTreeMap::new(),
        node_vars: memo.into_iter().map(|(k, r)| (k, Lit::pos(r.var))).collect(),
        root: Lit::pos(root.var),
        rho: None,
        horizon,
        big_m: BTreeMap::new(),
        satisfaction: satisfaction_constr,
    })
}

struct Encoder<'a> {
    model: Model,
    arena: &'a Arena<'a>,
    signal_vars: &'a BTreeMap<(String, usize), VarId>,
    weights: &'a WeightTable,
    bounds: &'a VarBounds,
    memo: BTreeMap<(usize, usize), Rob>,
}

impl Encoder<'_> {
    fn weight_vector(&self, name: Option<&str>, len: usize) -> Result<Vec<f64>, EncodeError> {
        let Some(name) = name else { return Ok(vec![1.0; len]) };
        let w = self.weights.get(name).ok_or_else(|| EncodeError::UnknownWeight(name.to_string()))?;
        if w.len() != len {
            return Err(EncodeError::WeightArityMismatch { name: name.to_string(), expected: len, got: w.len() });
        }
        Ok(w.to_vec())
    }

    fn rob(&mut self, id: usize, t: usize) -> Result<Rob, EncodeError> {
        if let Some(r) = self.memo.get(&(id, t)) {
            return Ok(*r);
        }
        let node = self.arena.nodes[id];
        let kids = self.arena.children[id].clone();
        let name = format!("r_{id}_{t}");
        let rob = match &node.kind {
            FormulaKind::Pred(Predicate::Linear { signal, cmp, threshold }) => {
                let s = self.signal_vars[&(signal.clone(), t)];
                let (lo, hi) = super::signal_bounds(self.bounds, signal)?;
                let (sign, lo, hi) = match cmp {
                    Cmp::Ge => (1.0, lo - threshold, hi - threshold),
                    Cmp::Le => (-1.0, threshold - hi, threshold - lo),
                };
                let r = self.model.add_continuous(name, lo, hi)?;
                // r = ±(s − c)
                self.model.add_constr([(1.0, r), (-sign, s)], ConstrSense::Eq, -sign * threshold, "")?;
                Rob { var: r, lo, hi }
            }
            FormulaKind::Pred(Predicate::Atom { .. }) | FormulaKind::Not(_) => {
                unreachable!("rejected before encoding")
            }
            FormulaKind::Const(_) => {
                return Err(EncodeError::UnsupportedNode("Boolean constants have no finite wSTL robustness".into()))
            }
            FormulaKind::And { weight, .. } | FormulaKind::Or { weight, .. } => {
                let w = self.weight_vector(weight.as_deref(), kids.len())?;
                let items = kids
                    .iter()
                    .zip(&w)
                    .map(|(&c, &w)| self.rob(c, t).map(|r| (w, r)))
                    .collect::<Result<Vec<_>, _>>()?;
                self.aggregate(name, &items, matches!(node.kind, FormulaKind::And { .. }))?
            }
            FormulaKind::Always { interval, weight, .. } | FormulaKind::Eventually { interval, weight, .. } => {
                let w = self.weight_vector(weight.as_deref(), interval.width())?;
                let start = t + interval.start as usize;
                let items = w
                    .iter()
                    .enumerate()
                    .map(|(k, &w)| self.rob(kids[0], start + k).map(|r| (w, r)))
                    .collect::<Result<Vec<_>, _>>()?;
                self.aggregate(name, &items, matches!(node.kind, FormulaKind::Always { .. }))?
            }
            FormulaKind::Until { interval, .. } => {
                let (l, r) = (kids[0], kids[1]);
                let mut inner = Vec::new();
                for tau in t + interval.start as usize..=t + interval.end as usize {
                    let mut items = vec![(1.0, self.rob(r, tau)?)];
                    for s in t..=tau {
                        items.push((1.0, self.rob(l, s)?));
                    }
                    inner.push((1.0, self.aggregate(format!("m_{id}_{t}_{tau}"), &items, true)?));
                }
                self.aggregate(name, &inner, false)?
            }
        };
        self.memo.insert((id, t), rob);
        Ok(rob)
    }

    /// Exact `min_i w_i r_i` (`conj`) or `max_i w_i r_i` into a fresh variable.
    fn aggregate(&mut self, name: String, items: &[(f64, Rob)], conj: bool) -> Result<Rob, EncodeError> {
        let scaled: Vec<(f64, f64)> = items.iter().map(|(w, r)| (w * r.lo, w * r.hi)).collect();
        let pick = |a: f64, b: f64| if conj { a.min(b) } else { a.max(b) };
        let init = if conj { f64::INFINITY } else { f64::NEG_INFINITY };
        let lo = scaled.iter().fold(init, |acc, s| pick(acc, s.0));
        let hi = scaled.iter().fold(init, |acc, s| pick(acc, s.1));
        let r = self.model.add_continuous(name.clone(), lo, hi)?;
        if let [(w, child)] = items {
            self.model.add_constr([(1.0, r), (-w, child.var)], ConstrSense::Eq, 0.0, "")?;
            return Ok(Rob { var: r, lo, hi });
        }
        let mut selectors = Vec::with_capacity(items.len());
        for (i, ((w, child), (slo, shi))) in items.iter().zip(&scaled).enumerate() {
            let sigma = self.model.add_binary(format!("{name}_sel{i}"))?;
            selectors.push((1.0, sigma));
            if conj {
                // r ≤ w·r_i and r ≥ w·r_i − M(1 − σ).
                let m = shi - lo;
                self.model.add_constr([(1.0, r), (-w, child.var)], ConstrSense::Le, 0.0, "")?;
                self.model.add_constr([(1.0, r), (-w, child.var), (-m, sigma)], ConstrSense::Ge, -m, "")?;
            } else {
                // r ≥ w·r_i and r ≤ w·r_i + M(1 − σ).
                let m = hi - slo;
                self.model.add_constr([(1.0, r), (-w, child.var)], ConstrSense::Ge, 0.0, "")?;
                self.model.add_constr([(1.0, r), (-w, child.var), (m, sigma)], ConstrSense::Le, m, "")?;
            }
        }
        self.model.add_constr(selectors, ConstrSense::Eq, 1.0, "")?;
        Ok(Rob { var: r, lo, hi })
    }
}
