//! Best-first branch-and-bound over binary variables.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::model::{Model, ObjSense, VarKind};
use crate::simplex::{LpResult, LpStatus, Relaxation};

/// Gap below which a finished search is reported as [`SolveStatus::Optimal`].
const OPTIMALITY_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BnbOptions {
    pub integrality_tol: f64,
    /// Relative gap `(bound − incumbent) / max(1, |incumbent|)` at which the search stops.
    pub gap: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self { integrality_tol: 1e-6, gap: 1e-6, node_limit: 100_000, time_limit: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped at the requested gap, which is looser than the optimality tolerance.
    GapLimit,
    NodeLimit,
    TimeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::GapLimit => "gap_limit",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::TimeLimit => "time_limit",
        }
    }

    /// Whether a solution vector accompanies the status.
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapLimit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// Incumbent values by variable id; empty when no incumbent was found.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven bound in the model's sense.
    pub bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
}

impl Solution {
    pub fn value(&self, v: crate::VarId) -> f64 {
        self.values[v.0]
    }
}

struct Node {
    /// LP bound in maximization form.
    bound: f64,
    seq: u64,
    fixings: Vec<(usize, f64)>,
    values: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap on bound; earlier nodes first among equal bounds.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    relax: Relaxation,
    base_lower: Vec<f64>,
    base_upper: Vec<f64>,
    binaries: Vec<usize>,
    sign: f64,
    options: &'a BnbOptions,
    nodes: usize,
    lp_iterations: usize,
    incumbent: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    fn solve_with(&mut self, fixings: &[(usize, f64)]) -> LpResult {
        let mut lower = self.base_lower.clone();
        let mut upper = self.base_upper.clone();
        for &(j, v) in fixings {
            lower[j] = v;
            upper[j] = v;
        }
        let r = self.relax.solve(&lower, &upper);
        self.nodes += 1;
        self.lp_iterations += r.iterations;
        r
    }

    fn most_fractional(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.binaries {
            let frac = (values[j] - values[j].round()).abs();
            if frac > self.options.integrality_tol && best.is_none_or(|(_, bf)| frac > bf + 1e-12) {
                best = Some((j, frac));
            }
        }
        best.map(|(j, _)| j)
    }

    fn tolerance(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => self.options.gap * obj.abs().max(1.0),
            None => 0.0,
        }
    }

    fn prunable(&self, bound: f64) -> bool {
        match &self.incumbent {
            Some((obj, _)) => bound <= obj + self.tolerance(),
            None => false,
        }
    }

    /// Rounds the binaries of an integral LP point, re-solves the continuous part with them
    /// fixed, and keeps the result if it improves the incumbent.
    fn offer(&mut self, lp: &LpResult, fixings: &[(usize, f64)]) {
        let mut all: Vec<(usize, f64)> = fixings.to_vec();
        for &j in &self.binaries {
            if !fixings.iter().any(|&(f, _)| f == j) {
                all.push((j, lp.values[j].round().clamp(0.0, 1.0)));
            }
        }
        let polished = if all.len() == fixings.len() { None } else { Some(self.solve_with(&all)) };
        let (obj, values) = match polished {
            Some(p) if p.status == LpStatus::Optimal => (self.sign * p.objective, p.values),
            _ => {
                let mut values = lp.values.clone();
                for &(j, v) in &all {
                    values[j] = v;
                }
                (self.sign * lp.objective, values)
            }
        };
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj > *best) {
            self.incumbent = Some((obj, values));
        }
    }
}

/// Solves `model` by best-first branch-and-bound on its binary variables.
pub fn solve_milp(model: &Model, options: &BnbOptions) -> Solution {
    let start = Instant::now();
    let sign = match model.objective().map(|o| o.sense) {
        Some(ObjSense::Minimize) => -1.0,
        _ => 1.0,
    };
    let mut search = Search {
        relax: Relaxation::new(model),
        base_lower: model.vars().iter().map(|v| v.lower).collect(),
        base_upper: model.vars().iter().map(|v| v.upper).collect(),
        binaries: model.vars().iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(j, _)| j).collect(),
        sign,
        options,
        nodes: 0,
        lp_iterations: 0,
        incumbent: None,
    };

    let finish = |search: Search<'_>, status: SolveStatus, open_bound: Option<f64>| {
        let (objective, values) = match &search.incumbent {
            Some((obj, vals)) => (sign * obj, vals.clone()),
            None => (f64::NAN, Vec::new()),
        };
        let inc = search.incumbent.as_ref().map(|(o, _)| *o);
        let bound = match (open_bound, inc) {
            (Some(b), Some(i)) => b.max(i),
            (Some(b), None) => b,
            (None, Some(i)) => i,
            (None, None) => f64::NAN,
        };
        let gap = match inc {
            Some(i) => ((bound - i) / i.abs().max(1.0)).max(0.0),
            None => f64::INFINITY,
        };
        let status =
            if status == SolveStatus::Optimal && gap > OPTIMALITY_GAP { SolveStatus::GapLimit } else { status };
        let status = if search.incumbent.is_none() && status.has_solution() { SolveStatus::Infeasible } else { status };
        Solution {
            status,
            values,
            objective,
            bound: sign * bound,
            gap,
            nodes: search.nodes,
            lp_iterations: search.lp_iterations,
        }
    };

    let root = search.solve_with(&[]);
    match root.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return finish(search, SolveStatus::Infeasible, None),
        LpStatus::Unbounded => {
            let mut s = finish(search, SolveStatus::Unbounded, None);
            s.bound = sign * f64::INFINITY;
            return s;
        }
        LpStatus::IterationLimit => return finish(search, SolveStatus::NodeLimit, None),
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    if search.most_fractional(&root.values).is_none() {
        search.offer(&root, &[]);
    } else {
        heap.push(Node { bound: sign * root.objective, seq, fixings: Vec::new(), values: root.values });
        seq += 1;
    }

    while let Some(node) = heap.pop() {
        if search.prunable(node.bound) {
            // Every remaining node is bounded by this one.
            return finish(search, SolveStatus::Optimal, Some(node.bound));
        }
        if search.nodes >= options.node_limit {
            return finish(search, SolveStatus::NodeLimit, Some(node.bound));
        }
        if options.time_limit.is_some_and(|limit| start.elapsed() >= limit) {
            return finish(search, SolveStatus::TimeLimit, Some(node.bound));
        }
        let Some(var) = search.most_fractional(&node.values) else {
            continue;
        };
        for value in [0.0, 1.0] {
            let mut fixings = node.fixings.clone();
            fixings.push((var, value));
            let lp = search.solve_with(&fixings);
            match lp.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible | LpStatus::Unbounded => continue,
                LpStatus::IterationLimit => continue,
            }
            let bound = sign * lp.objective;
            if search.prunable(bound) {
                continue;
            }
            if search.most_fractional(&lp.values).is_none() {
                search.offer(&lp, &fixings);
            } else {
                heap.push(Node { bound, seq, fixings, values: lp.values });
                seq += 1;
            }
        }
    }
    finish(search, SolveStatus::Optimal, None)
}
