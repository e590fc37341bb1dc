use super::{horizon, OpsError};
use crate::syntax::{Cmp, Formula, FormulaKind, Interval, Predicate};
use crate::trace::{Trace, VarBounds};
use crate::weights::WeightTable;

/// Quantitative semantics selector.
#[derive(Debug, Clone, Copy)]
pub enum Method<'a> {
    /// Min/max robustness.
    Classic,
    /// Arithmetic-geometric mean robustness normalized by signal bounds.
    Agm(&'a VarBounds),
    /// Weighted min/max robustness; unweighted operators use unit weights.
    Weighted(&'a WeightTable),
}

/// Boolean satisfaction at step `t`. Atoms read a 0/1 signal of the same name.
pub fn evaluate_bool(f: &Formula, trace: &Trace, t: usize) -> Result<bool, OpsError> {
    check_length(f, trace, t)?;
    eval_bool(f, trace, t)
}

pub fn robustness(f: &Formula, trace: &Trace, t: usize) -> Result<f64, OpsError> {
    evaluate(f, trace, t, Method::Classic)
}

pub fn agm_robustness(f: &Formula, trace: &Trace, t: usize, bounds: &VarBounds) -> Result<f64, OpsError> {
    evaluate(f, trace, t, Method::Agm(bounds))
}

pub fn wstl_robustness(f: &Formula, weights: &WeightTable, trace: &Trace, t: usize) -> Result<f64, OpsError> {
    evaluate(f, trace, t, Method::Weighted(weights))
}

/// Robustness of `f` at step `t` under `method`.
pub fn evaluate(f: &Formula, trace: &Trace, t: usize, method: Method<'_>) -> Result<f64, OpsError> {
    check_length(f, trace, t)?;
    Evaluator { trace, method }.eval(f, t)
}

fn check_length(f: &Formula, trace: &Trace, t: usize) -> Result<(), OpsError> {
    let needed = t + horizon(f) + 1;
    if trace.len() < needed {
        return Err(OpsError::TraceTooShort { needed, got: trace.len() });
    }
    Ok(())
}

fn sample(trace: &Trace, signal: &str, t: usize) -> Result<f64, OpsError> {
    trace.get(signal).map(|v| v[t]).ok_or_else(|| OpsError::MissingSignal(signal.to_string()))
}

fn window(interval: &Interval, t: usize) -> std::ops::RangeInclusive<usize> {
    t + interval.start as usize..=t + interval.end as usize
}

fn pred_holds(p: &Predicate, trace: &Trace, t: usize) -> Result<bool, OpsError> {
    Ok(match p {
        Predicate::Linear { signal, cmp: Cmp::Ge, threshold } => sample(trace, signal, t)? >= *threshold,
        Predicate::Linear { signal, cmp: Cmp::Le, threshold } => sample(trace, signal, t)? <= *threshold,
        Predicate::Atom { name, negated } => (sample(trace, name, t)? > 0.5) != *negated,
    })
}

fn eval_bool(f: &Formula, trace: &Trace, t: usize) -> Result<bool, OpsError> {
    Ok(match &f.kind {
        FormulaKind::Pred(p) => pred_holds(p, trace, t)?,
        FormulaKind::Const(b) => *b,
        FormulaKind::Not(c) => !eval_bool(c, trace, t)?,
        FormulaKind::And { children, .. } => {
            for c in children {
                if !eval_bool(c, trace, t)? {
                    return Ok(false);
                }
            }
            true
        }
        FormulaKind::Or { children, .. } => {
            for c in children {
                if eval_bool(c, trace, t)? {
                    return Ok(true);
                }
            }
            false
        }
        FormulaKind::Always { interval, child, .. } => {
            for tau in window(interval, t) {
                if !eval_bool(child, trace, tau)? {
                    return Ok(false);
                }
            }
            true
        }
        FormulaKind::Eventually { interval, child, .. } => {
            for tau in window(interval, t) {
                if eval_bool(child, trace, tau)? {
                    return Ok(true);
                }
            }
            false
        }
        FormulaKind::Until { interval, left, right } => {
            for tau in window(interval, t) {
                if eval_bool(right, trace, tau)? {
                    let mut ok = true;
                    for s in t..=tau {
                        if !eval_bool(left, trace, s)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        return Ok(true);
                    }
                }
            }
            false
        }
    })
}

struct Evaluator<'a> {
    trace: &'a Trace,
    method: Method<'a>,
}

impl Evaluator<'_> {
    fn weights(&self, name: Option<&str>, len: usize) -> Result<Option<&[f64]>, OpsError> {
        let (Method::Weighted(table), Some(name)) = (self.method, name) else {
            return Ok(None);
        };
        let w = table.get(name).ok_or_else(|| OpsError::UnknownWeight(name.to_string()))?;
        if w.len() != len {
            return Err(OpsError::WeightArityMismatch { name: name.to_string(), expected: len, got: w.len() });
        }
        Ok(Some(w))
    }

    fn predicate(&self, p: &Predicate, t: usize) -> Result<f64, OpsError> {
        match p {
            Predicate::Linear { signal, cmp, threshold } => {
                let v = sample(self.trace, signal, t)?;
                let rho = match cmp {
                    Cmp::Ge => v - threshold,
                    Cmp::Le => threshold - v,
                };
                match self.method {
                    Method::Agm(bounds) => {
                        let (lo, hi) = bounds.get(signal).ok_or_else(|| OpsError::MissingBound(signal.clone()))?;
                        let r = (hi - threshold).abs().max((lo - threshold).abs());
                        Ok(if r > 0.0 { rho / r } else { 0.0 })
                    }
                    _ => Ok(rho),
                }
            }
            Predicate::Atom { .. } => Ok(if pred_holds(p, self.trace, t)? { 1.0 } else { -1.0 }),
        }
    }

    fn constant(&self, b: bool) -> f64 {
        let mag = if matches!(self.method, Method::Agm(_)) { 1.0 } else { f64::INFINITY };
        if b {
            mag
        } else {
            -mag
        }
    }

    fn conj(&self, vals: &[f64], w: Option<&[f64]>) -> f64 {
        match (self.method, w) {
            (_, Some(w)) => vals.iter().zip(w).map(|(r, w)| w * r).fold(f64::INFINITY, f64::min),
            (Method::Agm(_), None) => agm_and(vals),
            _ => vals.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn disj(&self, vals: &[f64], w: Option<&[f64]>) -> f64 {
        match (self.method, w) {
            (_, Some(w)) => vals.iter().zip(w).map(|(r, w)| w * r).fold(f64::NEG_INFINITY, f64::max),
            (Method::Agm(_), None) => agm_or(vals),
            _ => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn eval(&self, f: &Formula, t: usize) -> Result<f64, OpsError> {
        match &f.kind {
            FormulaKind::Pred(p) => self.predicate(p, t),
            FormulaKind::Const(b) => Ok(self.constant(*b)),
            FormulaKind::Not(c) => Ok(-self.eval(c, t)?),
            FormulaKind::And { children, weight } | FormulaKind::Or { children, weight } => {
                let w = self.weights(weight.as_deref(), children.len())?;
                let vals = children.iter().map(|c| self.eval(c, t)).collect::<Result<Vec<_>, _>>()?;
                Ok(if matches!(f.kind, FormulaKind::And { .. }) { self.conj(&vals, w) } else { self.disj(&vals, w) })
            }
            FormulaKind::Always { interval, child, weight } | FormulaKind::Eventually { interval, child, weight } => {
                let w = self.weights(weight.as_deref(), interval.width())?;
                let vals = window(interval, t).map(|tau| self.eval(child, tau)).collect::<Result<Vec<_>, _>>()?;
                Ok(if matches!(f.kind, FormulaKind::Always { .. }) { self.conj(&vals, w) } else { self.disj(&vals, w) })
            }
            FormulaKind::Until { interval, left, right } => {
                if matches!(self.method, Method::Agm(_)) {
                    return Err(OpsError::UnsupportedOperator("Until"));
                }
                let end = t + interval.end as usize;
                let lefts = (t..=end).map(|s| self.eval(left, s)).collect::<Result<Vec<_>, _>>()?;
                let mut best = f64::NEG_INFINITY;
                let mut prefix = f64::INFINITY;
                for (k, l) in lefts.iter().enumerate() {
                    prefix = prefix.min(*l);
                    let tau = t + k;
                    if tau >= t + interval.start as usize {
                        best = best.max(self.eval(right, tau)?.min(prefix));
                    }
                }
                Ok(best)
            }
        }
    }
}

/// Conjunction: geometric mean of shifted values when all are satisfied, else mean of violations.
pub fn agm_and(vals: &[f64]) -> f64 {
    let n = vals.len() as f64;
    if vals.iter().all(|v| *v > 0.0) {
        vals.iter().map(|v| 1.0 + v).product::<f64>().powf(1.0 / n) - 1.0
    } else {
        vals.iter().filter(|v| **v <= 0.0).sum::<f64>() / n
    }
}

pub fn agm_or(vals: &[f64]) -> f64 {
    let n = vals.len() as f64;
    if vals.iter().all(|v| *v < 0.0) {
        1.0 - vals.iter().map(|v| 1.0 - v).product::<f64>().powf(1.0 / n)
    } else {
        vals.iter().filter(|v| **v >= 0.0).sum::<f64>() / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_mtl, parse_stl, parse_wstl};

    fn one(name: &str, v: &[f64]) -> Trace {
        Trace::from_columns(&[(name, v)])
    }

    #[test]
    fn boolean_examples() {
        let s5 = one("s", &[5.0; 4]);
        assert!(evaluate_bool(&parse_stl("G[0,3] s>2").unwrap(), &s5, 0).unwrap());
        let s = one("s", &[0.0, 1.0, 0.0, 0.0]);
        assert!(!evaluate_bool(&parse_stl("F[0,3] s>2").unwrap(), &s, 0).unwrap());
        let ab = Trace::from_columns(&[("a", &[1.0, 1.0, 1.0, 0.0]), ("b", &[0.0, 0.0, 1.0, 0.0])]);
        assert!(evaluate_bool(&parse_stl("(a>0) U[1,3] (b>0)").unwrap(), &ab, 0).unwrap());
    }

    #[test]
    fn short_trace() {
        let s = one("s", &[0.0; 3]);
        assert_eq!(
            robustness(&parse_stl("G[0,3] s>2").unwrap(), &s, 0),
            Err(OpsError::TraceTooShort { needed: 4, got: 3 })
        );
        assert_eq!(robustness(&parse_stl("x>0").unwrap(), &s, 0), Err(OpsError::MissingSignal("x".into())));
    }

    #[test]
    fn classic_examples() {
        assert_eq!(robustness(&parse_stl("G[0,3] s>2").unwrap(), &one("s", &[5.0; 4]), 0).unwrap(), 3.0);
        let s = one("s", &[0.0, 1.0, 5.0, 0.0]);
        assert_eq!(robustness(&parse_stl("F[0,3] s>2").unwrap(), &s, 0).unwrap(), 3.0);
    }

    #[test]
    fn until_robustness() {
        let ab = Trace::from_columns(&[("a", &[3.0, 2.0, 1.0, -1.0]), ("b", &[5.0, -1.0, 4.0, 9.0])]);
        // tau=1: min(-1, 3, 2) = -1; tau=2: min(4, 1) = 1; tau=3: min(9, -1) = -1.
        let f = parse_stl("(a>0) U[1,3] (b>0)").unwrap();
        assert_eq!(robustness(&f, &ab, 0).unwrap(), 1.0);
    }

    #[test]
    fn mtl_is_plus_minus_one() {
        let p = one("p", &[0.0, 0.0, 1.0]);
        assert_eq!(robustness(&parse_mtl("F[0,2] p").unwrap(), &p, 0).unwrap(), 1.0);
        assert_eq!(robustness(&parse_mtl("G[0,2] p").unwrap(), &p, 0).unwrap(), -1.0);
    }

    #[test]
    fn agm_aggregations() {
        assert!((agm_and(&[0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert!((agm_and(&[0.5, -0.2, -0.4]) + 0.2).abs() < 1e-15);
        assert!((agm_or(&[-0.5, -0.5]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn agm_normalizes_by_bounds() {
        let b = VarBounds::new().with("s", 0.0, 10.0).unwrap();
        let f = parse_stl("s>2").unwrap();
        assert_eq!(agm_robustness(&f, &one("s", &[6.0]), 0, &b).unwrap(), 0.5);
        assert_eq!(
            agm_robustness(&f, &one("s", &[6.0]), 0, &VarBounds::new()),
            Err(OpsError::MissingBound("s".into()))
        );
        let u = parse_stl("s>0 U[0,1] s>1").unwrap();
        assert_eq!(agm_robustness(&u, &one("s", &[1.0, 2.0]), 0, &b), Err(OpsError::UnsupportedOperator("Until")));
    }

    #[test]
    fn weighted_conjunction() {
        let w = WeightTable::new().with("p", vec![0.2, 0.8]).unwrap();
        let f = parse_wstl("&&^p(a>0, b>0)", &w).unwrap();
        let t = Trace::from_columns(&[("a", &[2.0]), ("b", &[4.0])]);
        assert!((wstl_robustness(&f, &w, &t, 0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn weight_swap_flips_disjunct() {
        let f = parse_wstl("||^p(a>0, b>0)", &WeightTable::new().with("p", vec![1.0, 1.0]).unwrap()).unwrap();
        let t = Trace::from_columns(&[("a", &[2.0]), ("b", &[3.0])]);
        // (0.9, 0.1): max(1.8, 0.3) picks a; (0.1, 0.9): max(0.2, 2.7) picks b.
        let w1 = WeightTable::new().with("p", vec![0.9, 0.1]).unwrap();
        let w2 = WeightTable::new().with("p", vec![0.1, 0.9]).unwrap();
        assert!((wstl_robustness(&f, &w1, &t, 0).unwrap() - 1.8).abs() < 1e-12);
        assert!((wstl_robustness(&f, &w2, &t, 0).unwrap() - 2.7).abs() < 1e-12);
    }

    #[test]
    fn temporal_weights_index_by_offset() {
        let w = WeightTable::new().with("w", vec![1.0, 0.1]).unwrap();
        let f = parse_wstl("G^w[1,2] s>0", &w).unwrap();
        let t = one("s", &[100.0, 1.0, 5.0]);
        // min(1·1, 0.1·5) = 0.5.
        assert!((wstl_robustness(&f, &w, &t, 0).unwrap() - 0.5).abs() < 1e-15);
    }
}
