//! Dense bounded-variable primal simplex.
//!
//! Every row `a·x (≤|≥|=) b` gets a slack `s = b − a·x` whose bounds encode the sense, so the
//! working system is `A x + s = b` with `l ≤ (x, s) ≤ u`. Nonbasic variables rest at a finite
//! bound (free ones at zero); rows whose slack cannot absorb the initial residual get an
//! artificial variable and phase 1 minimizes their sum. Entering variables are chosen by the
//! largest reduced cost; after a run of degenerate pivots the rule switches to Bland's
//! smallest-index rule for the rest of the solve.

use crate::model::{ConstrSense, Model, ObjSense};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;
const DEGENERATE_RUN: usize = 50;
const REFRESH_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Primal values of the model's variables (empty unless optimal).
    pub values: Vec<f64>,
    /// Objective in the model's own sense, constant included.
    pub objective: f64,
    pub iterations: usize,
}

/// Solves the LP relaxation of `model` (binaries relaxed to their bounds).
pub fn solve_lp(model: &Model) -> LpResult {
    let lower: Vec<f64> = model.vars().iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = model.vars().iter().map(|v| v.upper).collect();
    solve_lp_with_bounds(model, &lower, &upper)
}

/// Solves the relaxation of `model` with variable bounds replaced by `lower`/`upper`.
pub fn solve_lp_with_bounds(model: &Model, lower: &[f64], upper: &[f64]) -> LpResult {
    Relaxation::new(model).solve(lower, upper)
}

/// Constraint data of a model laid out for repeated solves under different bounds.
#[derive(Debug, Clone)]
pub(crate) struct Relaxation {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    senses: Vec<ConstrSense>,
    /// Minimization costs (negated for maximization models).
    cost: Vec<f64>,
    obj_sign: f64,
    obj_constant: f64,
}

impl Relaxation {
    pub(crate) fn new(model: &Model) -> Self {
        let n = model.num_vars();
        let mut cost = vec![0.0; n];
        let (obj_sign, obj_constant) = match model.objective() {
            Some(obj) => {
                let sign = match obj.sense {
                    ObjSense::Minimize => 1.0,
                    ObjSense::Maximize => -1.0,
                };
                for &(c, v) in &obj.expr.terms {
                    cost[v.0] += sign * c;
                }
                (sign, obj.expr.constant)
            }
            None => (1.0, 0.0),
        };
        let rows = model
            .constrs()
            .iter()
            .map(|c| c.terms.iter().filter(|t| t.0 != 0.0).map(|&(a, v)| (v.0, a)).collect())
            .collect();
        Self {
            n,
            rows,
            rhs: model.constrs().iter().map(|c| c.rhs).collect(),
            senses: model.constrs().iter().map(|c| c.sense).collect(),
            cost,
            obj_sign,
            obj_constant,
        }
    }

    pub(crate) fn solve(&self, lower: &[f64], upper: &[f64]) -> LpResult {
        for j in 0..self.n {
            if lower[j] > upper[j] {
                return LpResult::infeasible(0);
            }
        }
        let mut tab = Tableau::build(self, lower, upper);
        let mut iterations = 0;
        if tab.num_art > 0 {
            tab.set_phase1_costs();
            match tab.run(&mut iterations) {
                Outcome::Optimal => {}
                Outcome::Unbounded => return LpResult::infeasible(iterations),
                Outcome::IterationLimit => return LpResult::limit(iterations),
            }
            tab.refresh_basic_values();
            let infeasibility: f64 = (tab.first_art..tab.ncols).map(|j| tab.x[j].abs()).sum();
            if infeasibility > PHASE1_TOL {
                return LpResult::infeasible(iterations);
            }
            tab.retire_artificials();
        }
        tab.set_phase2_costs(&self.cost);
        match tab.run(&mut iterations) {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return LpResult {
                    status: LpStatus::Unbounded,
                    values: Vec::new(),
                    objective: -self.obj_sign * f64::INFINITY,
                    iterations,
                }
            }
            Outcome::IterationLimit => return LpResult::limit(iterations),
        }
        tab.refresh_basic_values();
        let values: Vec<f64> = (0..self.n).map(|j| tab.x[j].clamp(lower[j], upper[j])).collect();
        let min_obj: f64 = values.iter().zip(&self.cost).map(|(x, c)| x * c).sum();
        LpResult {
            status: LpStatus::Optimal,
            objective: self.obj_sign * min_obj + self.obj_constant,
            values,
            iterations,
        }
    }
}

impl LpResult {
    fn infeasible(iterations: usize) -> Self {
        Self { status: LpStatus::Infeasible, values: Vec::new(), objective: f64::NAN, iterations }
    }

    fn limit(iterations: usize) -> Self {
        Self { status: LpStatus::IterationLimit, values: Vec::new(), objective: f64::NAN, iterations }
    }
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    m: usize,
    ncols: usize,
    first_art: usize,
    num_art: usize,
    /// Row-major `m × ncols` matrix `B⁻¹ [A | I | art]`.
    t: Vec<f64>,
    /// `B⁻¹ b`.
    beta: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    bland: bool,
    degenerate_run: usize,
    max_iterations: usize,
}

impl Tableau {
    fn build(lp: &Relaxation, lower: &[f64], upper: &[f64]) -> Self {
        let n = lp.n;
        let m = lp.rows.len();
        let mut lo: Vec<f64> = lower.to_vec();
        let mut hi: Vec<f64> = upper.to_vec();
        let mut x: Vec<f64> = (0..n)
            .map(|j| {
                if lo[j].is_finite() {
                    lo[j]
                } else if hi[j].is_finite() {
                    hi[j]
                } else {
                    0.0
                }
            })
            .collect();
        for sense in &lp.senses {
            let (l, u) = match sense {
                ConstrSense::Le => (0.0, f64::INFINITY),
                ConstrSense::Ge => (f64::NEG_INFINITY, 0.0),
                ConstrSense::Eq => (0.0, 0.0),
            };
            lo.push(l);
            hi.push(u);
        }

        // Residuals decide which rows need an artificial.
        let mut art_rows = Vec::new();
        let mut slack_vals = vec![0.0; m];
        let mut art_vals = Vec::new();
        let mut art_signs = Vec::new();
        for i in 0..m {
            let r = lp.rhs[i] - lp.rows[i].iter().map(|&(j, a)| a * x[j]).sum::<f64>();
            let (l, u) = (lo[n + i], hi[n + i]);
            let clamped = r.clamp(l, u);
            slack_vals[i] = clamped;
            if clamped != r {
                art_rows.push(i);
                let diff = r - clamped;
                art_signs.push(diff.signum());
                art_vals.push(diff.abs());
            }
        }
        x.extend_from_slice(&slack_vals);
        let num_art = art_rows.len();
        let first_art = n + m;
        let ncols = first_art + num_art;
        for &v in &art_vals {
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(v);
        }

        let mut t = vec![0.0; m * ncols];
        let mut beta = lp.rhs.clone();
        let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in row {
                t[i * ncols + j] += a;
            }
            t[i * ncols + n + i] = 1.0;
        }
        for (k, (&i, &sign)) in art_rows.iter().zip(&art_signs).enumerate() {
            let col = first_art + k;
            t[i * ncols + col] = sign;
            basis[i] = col;
            // Scale the row so the artificial has a unit coefficient.
            if sign < 0.0 {
                for v in &mut t[i * ncols..(i + 1) * ncols] {
                    *v = -*v;
                }
                beta[i] = -beta[i];
            }
        }
        let mut is_basic = vec![false; ncols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Self {
            m,
            ncols,
            first_art,
            num_art,
            t,
            beta,
            lower: lo,
            upper: hi,
            x,
            cost: vec![0.0; ncols],
            reduced: vec![0.0; ncols],
            basis,
            is_basic,
            bland: false,
            degenerate_run: 0,
            max_iterations: 20_000 + 50 * (m + ncols),
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.ncols..(i + 1) * self.ncols]
    }

    fn set_phase1_costs(&mut self) {
        let mut cost = vec![0.0; self.ncols];
        for c in cost.iter_mut().skip(self.first_art) {
            *c = 1.0;
        }
        self.set_costs(cost);
    }

    fn set_phase2_costs(&mut self, structural: &[f64]) {
        let mut cost = vec![0.0; self.ncols];
        cost[..structural.len()].copy_from_slice(structural);
        self.set_costs(cost);
        self.bland = false;
        self.degenerate_run = 0;
    }

    fn set_costs(&mut self, cost: Vec<f64>) {
        let mut reduced = cost.clone();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (d, &a) in reduced.iter_mut().zip(self.row(i)) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            reduced[b] = 0.0;
        }
        self.cost = cost;
        self.reduced = reduced;
    }

    /// Recomputes basic values as `B⁻¹b − Σ_N (B⁻¹a_j) x_j`.
    fn refresh_basic_values(&mut self) {
        for i in 0..self.m {
            let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
            let mut v = self.beta[i];
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 && !self.is_basic[j] {
                    v -= a * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    /// Fixes every artificial at zero and pivots basic ones out where possible.
    fn retire_artificials(&mut self) {
        for j in self.first_art..self.ncols {
            self.lower[j] = 0.0;
            self.upper[j] = 0.0;
            if !self.is_basic[j] {
                self.x[j] = 0.0;
            }
        }
        for r in 0..self.m {
            let b = self.basis[r];
            if b < self.first_art {
                continue;
            }
            let row = self.row(r);
            let mut best: Option<(usize, f64)> = None;
            for (j, &a) in row.iter().enumerate().take(self.first_art) {
                if !self.is_basic[j] && a.abs() > 1e-7 && best.is_none_or(|(_, bv)| a.abs() > bv) {
                    best = Some((j, a.abs()));
                }
            }
            if let Some((q, _)) = best {
                self.pivot(r, q);
                self.x[b] = 0.0;
            }
        }
        self.refresh_basic_values();
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        self.beta[r] /= piv;
        let (before, rest) = self.t.split_at_mut(r * nc);
        let (prow, after) = rest.split_at_mut(nc);
        let beta_r = self.beta[r];
        for (i, row) in before.chunks_exact_mut(nc).chain(after.chunks_exact_mut(nc)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = row[q];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[q] = 0.0;
                self.beta[i] -= f * beta_r;
            }
        }
        let dq = self.reduced[q];
        if dq != 0.0 {
            for (d, &p) in self.reduced.iter_mut().zip(prow.iter()) {
                *d -= dq * p;
            }
        }
        self.reduced[q] = 0.0;
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
    }

    fn entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            if self.is_basic[j] || self.upper[j] <= self.lower[j] {
                continue;
            }
            let d = self.reduced[j];
            let xj = self.x[j];
            let can_up = xj < self.upper[j];
            let can_down = xj > self.lower[j];
            let dir = if d < -OPT_TOL && can_up {
                1.0
            } else if d > OPT_TOL && can_down {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, bd)| d.abs() > bd) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn run(&mut self, iterations: &mut usize) -> Outcome {
        let mut since_refresh = 0;
        loop {
            if *iterations >= self.max_iterations {
                return Outcome::IterationLimit;
            }
            let Some((q, dir)) = self.entering() else {
                return Outcome::Optimal;
            };
            *iterations += 1;

            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let alpha = dir * self.t[i * self.ncols + q];
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL && self.lower[b].is_finite() {
                    ((self.x[b] - self.lower[b]) / alpha).max(0.0)
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]) / -alpha).max(0.0)
                } else {
                    continue;
                };
                // Ties with a bound flip keep the flip; ties between rows use the
                // larger pivot, or the smaller basic index under Bland's rule.
                let better = match leave {
                    _ if limit < theta - 1e-12 => true,
                    Some((r, a)) if limit <= theta + 1e-12 => {
                        if self.bland {
                            b < self.basis[r]
                        } else {
                            alpha.abs() > a
                        }
                    }
                    _ => false,
                };
                if better {
                    theta = limit;
                    leave = Some((i, alpha.abs()));
                }
            }
            if theta.is_infinite() {
                return Outcome::Unbounded;
            }

            if theta <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            let step = dir * theta;
            if step != 0.0 {
                for i in 0..self.m {
                    let a = self.t[i * self.ncols + q];
                    if a != 0.0 {
                        let b = self.basis[i];
                        self.x[b] -= step * a;
                    }
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some((r, _)) => {
                    let b = self.basis[r];
                    let alpha = dir * self.t[r * self.ncols + q];
                    self.x[b] = if alpha > 0.0 { self.lower[b] } else { self.upper[b] };
                    self.x[q] += step;
                    self.pivot(r, q);
                    if b >= self.first_art && self.cost[b] == 1.0 {
                        // A departed artificial never re-enters.
                        self.upper[b] = 0.0;
                        self.x[b] = 0.0;
                    }
                }
            }
            since_refresh += 1;
            if since_refresh >= REFRESH_EVERY {
                self.refresh_basic_values();
                since_refresh = 0;
            }
        }
    }
}
