//! Big-M satisfaction encoding for STL (optionally with a global robustness shift) and MTL.

use std::collections::BTreeMap;

use stlkit_milp::{ConstrSense, LinExpr, Model, ObjSense, VarId};

use super::{reject_not, resolve_horizon, signal_bounds, signal_vars_for, Arena, EncodeError, EncodedSpec, Lit};
use crate::ops::pnf;
use crate::syntax::{Cmp, Formula, FormulaKind, Logic, Predicate};
use crate::trace::VarBounds;

/// Separation between the satisfied and violated sides of a predicate encoding.
pub const DELTA: f64 = 1e-4;

/// Encodes an STL formula with one binary per (node, step).
///
/// In robust mode every predicate is tightened by a global shift `rho` that the objective
/// maximizes; otherwise the objective is the constant 0. Weight tags, if any, are ignored.
pub fn encode_stl(
    f: &Formula,
    bounds: &VarBounds,
    robust: bool,
    satisfaction: bool,
    horizon_override: Option<usize>,
) -> Result<EncodedSpec, EncodeError> {
    if !f.atoms().is_empty() {
        return Err(EncodeError::UnsupportedNode("atomic propositions are not STL predicates".into()));
    }
    encode(f, Logic::Stl, bounds, robust, satisfaction, horizon_override)
}

/// Encodes an MTL formula; each (proposition, step) gets one shared binary that callers may
/// constrain further.
pub fn encode_mtl(
    f: &Formula,
    satisfaction: bool,
    horizon_override: Option<usize>,
) -> Result<EncodedSpec, EncodeError> {
    if !f.signals().is_empty() {
        return Err(EncodeError::UnsupportedNode("linear predicates are not MTL propositions".into()));
    }
    encode(f, Logic::Mtl, &VarBounds::new(), false, satisfaction, horizon_override)
}

fn encode(
    f: &Formula,
    logic: Logic,
    bounds: &VarBounds,
    robust: bool,
    satisfaction: bool,
    horizon_override: Option<usize>,
) -> Result<EncodedSpec, EncodeError> {
    let formula = pnf(f)?;
    reject_not(&formula)?;
    let horizon = resolve_horizon(&formula, horizon_override)?;
    let mut model = Model::new();
    let signal_vars = signal_vars_for(&mut model, &formula, bounds, horizon)?;
    let arena = Arena::new(&formula);

    let mut base_m = BTreeMap::new();
    for (id, node) in arena.nodes.iter().enumerate() {
        if let FormulaKind::Pred(Predicate::Linear { signal, threshold, .. }) = &node.kind {
            let (lo, hi) = signal_bounds(bounds, signal)?;
            base_m.insert(id, (hi - threshold).abs().max((lo - threshold).abs()) + 1.0);
        }
    }
    let rho_max = base_m.values().copied().fold(0.0, f64::max);
    let rho = if robust { Some(model.add_continuous("rho", -rho_max, rho_max)?) } else { None };
    // The shift can move a predicate by up to rho_max, so robust mode widens each M by that much.
    let big_m = base_m.into_iter().map(|(id, m)| (id, if robust { m + rho_max } else { m })).collect();

    let mut enc = Encoder {
        model,
        arena: &arena,
        signal_vars: &signal_vars,
        atom_vars: BTreeMap::new(),
        memo: BTreeMap::new(),
        rho,
        big_m: &big_m,
    };
    let root = enc.lit(0, 0)?;
    let Encoder { mut model, atom_vars, memo, .. } = enc;

    let satisfaction_constr = if satisfaction {
        let mut terms = Vec::new();
        let k = root.push_terms(1.0, &mut terms);
        Some(model.add_constr(terms, ConstrSense::Eq, 1.0 - k, "root")?)
    } else {
        None
    };
    let objective = match rho {
        Some(r) => LinExpr::var(r),
        None => LinExpr::new(),
    };
    model.set_objective(ObjSense::Maximize, objective)?;

    Ok(EncodedSpec {
        model,
        logic,
        formula: formula.clone(),
        signal_vars,
        atom_vars,
        node_vars: memo,
        root,
        rho,
        horizon,
        big_m,
        satisfaction: satisfaction_constr,
    })
}

struct Encoder<'a> {
    model: Model,
    arena: &'a Arena<'a>,
    signal_vars: &'a BTreeMap<(String, usize), VarId>,
    atom_vars: BTreeMap<(String, usize), VarId>,
    memo: BTreeMap<(usize, usize), Lit>,
    rho: Option<VarId>,
    big_m: &'a BTreeMap<usize, f64>,
}

impl Encoder<'_> {
    fn lit(&mut self, id: usize, t: usize) -> Result<Lit, EncodeError> {
        if let Some(l) = self.memo.get(&(id, t)) {
            return Ok(*l);
        }
        let node = self.arena.nodes[id];
        let kids = self.arena.children[id].clone();
        let lit = match &node.kind {
            FormulaKind::Pred(Predicate::Linear { signal, cmp, threshold }) => {
                self.predicate(id, t, signal, *cmp, *threshold)?
            }
            FormulaKind::Pred(Predicate::Atom { name, negated }) => {
                let key = (name.clone(), t);
                let var = match self.atom_vars.get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = self.model.add_binary(format!("{name}_{t}"))?;
                        self.atom_vars.insert(key, v);
                        v
                    }
                };
                Lit { var, negated: *negated }
            }
            FormulaKind::Const(b) => {
                let v = if *b { 1.0 } else { 0.0 };
                let var = self.model.add_var(format!("z_{id}_{t}"), stlkit_milp::VarKind::Binary, v, v)?;
                Lit::pos(var)
            }
            FormulaKind::Not(_) => unreachable!("negations are removed before encoding"),
            FormulaKind::And { .. } | FormulaKind::Or { .. } => {
                let lits = kids.iter().map(|&c| self.lit(c, t)).collect::<Result<Vec<_>, _>>()?;
                let conj = matches!(node.kind, FormulaKind::And { .. });
                self.gate(format!("z_{id}_{t}"), &lits, conj)?
            }
            FormulaKind::Always { interval, .. } | FormulaKind::Eventually { interval, .. } => {
                let c = kids[0];
                let lits = (t + interval.start as usize..=t + interval.end as usize)
                    .map(|tau| self.lit(c, tau))
                    .collect::<Result<Vec<_>, _>>()?;
                let conj = matches!(node.kind, FormulaKind::Always { .. });
                self.gate(format!("z_{id}_{t}"), &lits, conj)?
            }
            FormulaKind::Until { interval, .. } => {
                let (l, r) = (kids[0], kids[1]);
                let mut ds = Vec::new();
                for tau in t + interval.start as usize..=t + interval.end as usize {
                    let mut lits = vec![self.lit(r, tau)?];
                    for s in t..=tau {
                        lits.push(self.lit(l, s)?);
                    }
                    ds.push(self.gate(format!("d_{id}_{t}_{tau}"), &lits, true)?);
                }
                self.gate(format!("z_{id}_{t}"), &ds, false)?
            }
        };
        self.memo.insert((id, t), lit);
        Ok(lit)
    }

    /// `s(t) − c ≥ ρ − M(1 − z)` and `s(t) − c ≤ ρ − δ + M z` for GE; LE uses `c − s(t)`.
    fn predicate(&mut self, id: usize, t: usize, signal: &str, cmp: Cmp, c: f64) -> Result<Lit, EncodeError> {
        let s = self.signal_vars[&(signal.to_string(), t)];
        let m = self.big_m[&id];
        let z = self.model.add_binary(format!("z_{id}_{t}"))?;
        let sign = match cmp {
            Cmp::Ge => 1.0,
            Cmp::Le => -1.0,
        };
        let mut terms = vec![(sign, s), (-m, z)];
        if let Some(rho) = self.rho {
            terms.push((-1.0, rho));
        }
        let name = self.model.var(z).name.clone();
        self.model.add_constr(terms.clone(), ConstrSense::Ge, sign * c - m, format!("{name}_hi"))?;
        self.model.add_constr(terms, ConstrSense::Le, sign * c - DELTA, format!("{name}_lo"))?;
        Ok(Lit::pos(z))
    }

    /// Conjunction (`conj`) or disjunction of `lits` into a fresh binary.
    fn gate(&mut self, name: String, lits: &[Lit], conj: bool) -> Result<Lit, EncodeError> {
        let z = self.model.add_binary(name)?;
        let n = lits.len() as f64;
        for l in lits {
            // And: z − l ≤ 0; Or: z − l ≥ 0.
            let mut terms = vec![(1.0, z)];
            let k = l.push_terms(-1.0, &mut terms);
            let sense = if conj { ConstrSense::Le } else { ConstrSense::Ge };
            self.model.add_constr(terms, sense, -k, "")?;
        }
        // And: z − Σl ≥ −(n − 1); Or: z − Σl ≤ 0.
        let mut terms = vec![(1.0, z)];
        let mut k = 0.0;
        for l in lits {
            k += l.push_terms(-1.0, &mut terms);
        }
        if conj {
            self.model.add_constr(terms, ConstrSense::Ge, -(n - 1.0) - k, "")?;
        } else {
            self.model.add_constr(terms, ConstrSense::Le, -k, "")?;
        }
        Ok(Lit::pos(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::extract_trace;
    use crate::ops::{evaluate_bool, robustness};
    use crate::syntax::{parse_mtl, parse_stl};
    use stlkit_milp::{solve_milp, BnbOptions, SolveStatus};

    fn bounds(lo: f64, hi: f64) -> VarBounds {
        VarBounds::new().with("s", lo, hi).unwrap()
    }

    #[test]
    fn single_predicate_shape() {
        let f = parse_stl("s>2").unwrap();
        let spec = encode_stl(&f, &bounds(0.0, 10.0), false, true, None).unwrap();
        assert_eq!(spec.model.num_vars(), 2);
        assert_eq!(spec.model.num_binaries(), 1);
        assert_eq!(spec.model.num_constrs(), 3);
        assert_eq!(spec.big_m[&0], 9.0);
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.value(spec.signal_var("s", 0).unwrap()) >= 2.0);
    }

    #[test]
    fn robust_always() {
        let f = parse_stl("G[0,3] s>2").unwrap();
        let spec = encode_stl(&f, &bounds(0.0, 10.0), true, true, None).unwrap();
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 8.0).abs() < 1e-6);
        let tr = extract_trace(&spec, &sol).unwrap();
        assert!(tr.get("s").unwrap().iter().all(|v| (v - 10.0).abs() < 1e-6));
    }

    #[test]
    fn robust_big_m_covers_the_widest_signal() {
        // With M = max(|ub − c|, |lb − c|) + 1 alone, the s1 predicate could not stay false
        // while rho reaches 10, capping the optimum at 2.
        let b = VarBounds::new().with("s1", 0.0, 1.0).unwrap().with("s2", 0.0, 10.0).unwrap();
        let f = parse_stl("s1>=0.5 || s2>=0").unwrap();
        let spec = encode_stl(&f, &b, true, true, None).unwrap();
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        assert!((sol.objective - 10.0).abs() < 1e-6, "{}", sol.objective);
    }

    #[test]
    fn until_encoding_matches_monitor() {
        let f = parse_stl("(s>1) U[1,2] (s>5)").unwrap();
        let spec = encode_stl(&f, &bounds(0.0, 10.0), true, true, None).unwrap();
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        let tr = extract_trace(&spec, &sol).unwrap();
        assert!(robustness(&f, &tr, 0).unwrap() >= sol.objective - 1e-6);
        assert!(evaluate_bool(&f, &tr, 0).unwrap());
    }

    #[test]
    fn infeasible_bound() {
        let f = parse_stl("G[0,3] s>2").unwrap();
        let spec = encode_stl(&f, &bounds(0.0, 1.0), false, true, None).unwrap();
        assert_eq!(solve_milp(&spec.model, &BnbOptions::default()).status, SolveStatus::Infeasible);
    }

    #[test]
    fn missing_bound_and_negation() {
        let f = parse_stl("x>2").unwrap();
        assert_eq!(
            encode_stl(&f, &bounds(0.0, 1.0), false, true, None).unwrap_err(),
            EncodeError::MissingBound("x".into())
        );
        let u = parse_stl("!(s>0 U[0,1] s>1)").unwrap();
        assert!(matches!(
            encode_stl(&u, &bounds(0.0, 1.0), false, true, None),
            Err(EncodeError::Ops(crate::ops::OpsError::UnsupportedNegation))
        ));
    }

    #[test]
    fn mtl_single_atom() {
        let spec = encode_mtl(&parse_mtl("RegionA").unwrap(), true, None).unwrap();
        assert_eq!(spec.model.num_binaries(), 1);
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        assert_eq!(sol.values[spec.atom_vars[&("RegionA".into(), 0)].0], 1.0);
    }

    #[test]
    fn mtl_contradiction() {
        let spec = encode_mtl(&parse_mtl("F[0,2] p && G[0,2] !p").unwrap(), true, None).unwrap();
        assert_eq!(spec.atom_vars.len(), 3);
        assert_eq!(solve_milp(&spec.model, &BnbOptions::default()).status, SolveStatus::Infeasible);
    }

    #[test]
    fn mtl_eventually() {
        let spec = encode_mtl(&parse_mtl("F[0,4] RegionA").unwrap(), true, None).unwrap();
        let sol = solve_milp(&spec.model, &BnbOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal);
        let any = (0..=4).any(|k| sol.values[spec.atom_vars[&("RegionA".into(), k)].0] == 1.0);
        assert!(any);
    }

    #[test]
    fn logic_mismatch() {
        assert!(encode_mtl(&parse_stl("s>0").unwrap(), true, None).is_err());
        assert!(encode_stl(&parse_mtl("p").unwrap(), &VarBounds::new(), false, true, None).is_err());
    }
}
