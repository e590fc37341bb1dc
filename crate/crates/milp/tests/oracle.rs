//! Solver checks against independent oracles: vertex enumeration for small LPs and
//! exhaustive binary enumeration for small MILPs.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stlkit_milp::*;

/// Hyperplanes `a·x = b` taken from constraints and bounds.
fn hyperplanes(m: &Model) -> Vec<(Vec<f64>, f64)> {
    let n = m.num_vars();
    let mut planes = Vec::new();
    for c in m.constrs() {
        let mut a = vec![0.0; n];
        for &(coef, v) in &c.terms {
            a[v.0] += coef;
        }
        planes.push((a, c.rhs));
    }
    for (j, v) in m.vars().iter().enumerate() {
        for b in [v.lower, v.upper] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, b));
        }
    }
    planes
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn feasible(m: &Model, x: &[f64]) -> bool {
    m.max_constraint_violation(x) <= 1e-7 && m.max_bound_violation(x) <= 1e-7
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Best vertex of a bounded LP, or `None` when infeasible.
fn vertex_oracle(m: &Model) -> Option<f64> {
    let n = m.num_vars();
    let planes = hyperplanes(m);
    let mut best: Option<f64> = None;
    let sense = m.objective().unwrap().sense;
    for subset in combinations(planes.len(), n) {
        let a = subset.iter().map(|&i| planes[i].0.clone()).collect();
        let b = subset.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(m, &x) {
                let v = m.objective_value(&x);
                best = Some(match (best, sense) {
                    (None, _) => v,
                    (Some(p), ObjSense::Maximize) => p.max(v),
                    (Some(p), ObjSense::Minimize) => p.min(v),
                });
            }
        }
    }
    best
}

fn random_lp(rng: &mut StdRng, n: usize, rows: usize) -> Model {
    let mut m = Model::new();
    let vars: Vec<VarId> = (0..n)
        .map(|j| {
            let lo = rng.random_range(-5..=0) as f64;
            let hi = lo + rng.random_range(1..=8) as f64;
            m.add_continuous(format!("x{j}"), lo, hi).unwrap()
        })
        .collect();
    for _ in 0..rows {
        let terms: Vec<(f64, VarId)> = vars.iter().map(|&v| (rng.random_range(-4..=4) as f64, v)).collect();
        let sense = match rng.random_range(0..5) {
            0 => ConstrSense::Eq,
            1 | 2 => ConstrSense::Ge,
            _ => ConstrSense::Le,
        };
        m.add_constr(terms, sense, rng.random_range(-6..=6) as f64, "").unwrap();
    }
    let mut obj = LinExpr::new();
    for &v in &vars {
        obj.add_term(rng.random_range(-3.0..3.0), v);
    }
    let sense = if rng.random_bool(0.5) { ObjSense::Maximize } else { ObjSense::Minimize };
    m.set_objective(sense, obj).unwrap();
    m
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut feasible_count = 0;
    for _ in 0..300 {
        let n = rng.random_range(1..=3);
        let rows = rng.random_range(0..=4);
        let m = random_lp(&mut rng, n, rows);
        let lp = solve_lp(&m);
        match vertex_oracle(&m) {
            None => assert_eq!(lp.status, LpStatus::Infeasible, "{}", export_lp(&m).unwrap()),
            Some(best) => {
                feasible_count += 1;
                assert_eq!(lp.status, LpStatus::Optimal, "{}", export_lp(&m).unwrap());
                assert!((lp.objective - best).abs() < 1e-6, "lp {} vs oracle {best}", lp.objective);
                assert!(m.max_constraint_violation(&lp.values) <= 1e-7);
                assert!(m.max_bound_violation(&lp.values) <= 1e-9);
            }
        }
    }
    assert!(feasible_count > 50);
}

fn random_milp(rng: &mut StdRng) -> Model {
    let mut m = Model::new();
    let nb = rng.random_range(1..=8);
    let nc = rng.random_range(0..=6);
    let mut vars = Vec::new();
    for j in 0..nb {
        vars.push(m.add_binary(format!("z{j}")).unwrap());
    }
    for j in 0..nc {
        let lo = rng.random_range(-4..=0) as f64;
        vars.push(m.add_continuous(format!("x{j}"), lo, lo + rng.random_range(1..=6) as f64).unwrap());
    }
    for _ in 0..rng.random_range(1..=12) {
        let mut terms: Vec<(f64, VarId)> = Vec::new();
        for &v in &vars {
            if rng.random_bool(0.6) {
                terms.push((rng.random_range(-5..=5) as f64, v));
            }
        }
        let sense = match rng.random_range(0..6) {
            0 => ConstrSense::Eq,
            1 | 2 => ConstrSense::Ge,
            _ => ConstrSense::Le,
        };
        m.add_constr(terms, sense, rng.random_range(-4..=6) as f64, "").unwrap();
    }
    let mut obj = LinExpr::new();
    for &v in &vars {
        obj.add_term(rng.random_range(-3.0..3.0), v);
    }
    m.set_objective(ObjSense::Maximize, obj).unwrap();
    m
}

fn enumeration_oracle(m: &Model) -> Option<f64> {
    let bins: Vec<VarId> = m.binaries().collect();
    let lower: Vec<f64> = m.vars().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = m.vars().iter().map(|v| v.upper).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let (mut lo, mut hi) = (lower.clone(), upper.clone());
        for (k, b) in bins.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            lo[b.0] = v;
            hi[b.0] = v;
        }
        let r = solve_lp_with_bounds(m, &lo, &hi);
        if r.status == LpStatus::Optimal {
            best = Some(best.map_or(r.objective, |b: f64| b.max(r.objective)));
        }
    }
    best
}

#[test]
fn milp_matches_binary_enumeration() {
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..200 {
        let m = random_milp(&mut rng);
        let s = solve_milp(&m, &BnbOptions::default());
        match enumeration_oracle(&m) {
            None => assert_eq!(s.status, SolveStatus::Infeasible),
            Some(best) => {
                assert_eq!(s.status, SolveStatus::Optimal);
                assert!((s.objective - best).abs() <= 1e-6, "bnb {} vs oracle {best}", s.objective);
                assert!(s.bound >= s.objective - 1e-9);
                assert!(m.max_constraint_violation(&s.values) <= 1e-6);
                for b in m.binaries() {
                    let v = s.values[b.0];
                    assert!(v == 0.0 || v == 1.0);
                }
                // Relaxation dominance.
                assert!(solve_lp(&m).objective >= s.objective - 1e-9);
            }
        }
    }
}

#[test]
fn solve_is_deterministic() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..20 {
        let m = random_milp(&mut rng);
        let a = solve_milp(&m, &BnbOptions::default());
        let b = solve_milp(&m, &BnbOptions::default());
        assert_eq!(a.status, b.status);
        assert_eq!(a.nodes, b.nodes);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-9);
        }
        assert_eq!(export_lp(&m).unwrap(), export_lp(&m.clone()).unwrap());
    }
}

fn abs_model(lo: f64, hi: f64) -> (Model, VarId, VarId) {
    let mut m = Model::new();
    let s = m.add_continuous("s", lo, hi).unwrap();
    let a = m.add_continuous("a", 0.0, f64::INFINITY).unwrap();
    m.add_abs_link(s, a).unwrap();
    (m, s, a)
}

#[test]
fn abs_link_fixed_sources() {
    for (fixed, expect) in [(5.0, 5.0), (-3.0, 3.0)] {
        for sense in [ObjSense::Maximize, ObjSense::Minimize] {
            let (mut m, _, a) = abs_model(fixed, fixed);
            m.set_objective(sense, LinExpr::var(a)).unwrap();
            let s = solve_milp(&m, &BnbOptions::default());
            assert_eq!(s.status, SolveStatus::Optimal);
            assert!((s.values[a.0] - expect).abs() < 1e-9);
        }
    }
}

#[test]
fn abs_link_is_exact_under_maximization() {
    // Maximizing aux must not let it float above |source|.
    let (mut m, s, a) = abs_model(-2.0, 2.0);
    m.set_objective(ObjSense::Maximize, LinExpr::var(a).term(-0.1, s)).unwrap();
    let sol = solve_milp(&m, &BnbOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.values[a.0] - sol.values[s.0].abs()).abs() < 1e-9);
    assert!((sol.objective - 2.2).abs() < 1e-9);
}

#[test]
fn abs_link_minimum_matches_enumeration() {
    let (mut m, s, a) = abs_model(-2.0, 2.0);
    m.set_objective(ObjSense::Minimize, LinExpr::var(a)).unwrap();
    let sol = solve_milp(&m, &BnbOptions::default());
    // Grid enumeration of |s| over [-2, 2].
    let grid_min = (0..=400).map(|k| (-2.0 + k as f64 * 0.01_f64).abs()).fold(f64::INFINITY, f64::min);
    assert!((sol.objective - grid_min).abs() < 1e-9);
    assert!(sol.values[s.0].abs() < 1e-9);
}
