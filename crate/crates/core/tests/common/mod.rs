//! Random formula and trace generators shared by the integration tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use stlkit::syntax::{Formula, Interval};
use stlkit::{horizon, Trace, VarBounds, WeightTable};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub signals: Vec<String>,
    pub max_depth: usize,
    pub max_end: u32,
    pub until: bool,
    pub not: bool,
    /// Tag every And/Or/G/F with a fresh weight name.
    pub weighted: bool,
    /// Candidate thresholds per signal; when absent thresholds are drawn from [-5, 5].
    pub thresholds: Option<Vec<Vec<f64>>>,
}

impl GenConfig {
    pub fn new(signals: &[&str], max_depth: usize) -> Self {
        GenConfig {
            signals: signals.iter().map(|s| s.to_string()).collect(),
            max_depth,
            max_end: 3,
            until: true,
            not: true,
            weighted: false,
            thresholds: None,
        }
    }
}

pub struct Gen<'a> {
    pub rng: &'a mut StdRng,
    pub cfg: GenConfig,
    counter: usize,
}

impl<'a> Gen<'a> {
    pub fn new(rng: &'a mut StdRng, cfg: GenConfig) -> Self {
        Gen { rng, cfg, counter: 0 }
    }

    fn tag(&mut self) -> Option<String> {
        if self.cfg.weighted {
            self.counter += 1;
            Some(format!("w{}", self.counter))
        } else {
            None
        }
    }

    pub fn predicate(&mut self) -> Formula {
        let i = self.rng.random_range(0..self.cfg.signals.len());
        let s = self.cfg.signals[i].clone();
        let c = match &self.cfg.thresholds {
            Some(t) => t[i][self.rng.random_range(0..t[i].len())],
            None => (self.rng.random_range(-5.0..5.0_f64) * 8.0).round() / 8.0 + 1.0 / 64.0,
        };
        if self.rng.random_bool(0.5) {
            Formula::ge(s, c)
        } else {
            Formula::le(s, c)
        }
    }

    fn interval(&mut self) -> Interval {
        let a = self.rng.random_range(0..=self.cfg.max_end);
        let b = self.rng.random_range(a..=self.cfg.max_end);
        Interval::new(a, b)
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        if depth <= 1 || self.rng.random_bool(0.2) {
            return self.predicate();
        }
        let choices = 4 + usize::from(self.cfg.not) + usize::from(self.cfg.until);
        let mut pick = self.rng.random_range(0..choices);
        if !self.cfg.not && pick >= 4 {
            pick += 1;
        }
        match pick {
            0 | 1 => {
                let n = self.rng.random_range(2..=3);
                let children = (0..n).map(|_| self.formula(depth - 1)).collect();
                let w = self.tag();
                if pick == 0 {
                    Formula::and_weighted(children, w)
                } else {
                    Formula::or_weighted(children, w)
                }
            }
            2 | 3 => {
                let iv = self.interval();
                let child = self.formula(depth - 1);
                let always = pick == 2;
                match (self.tag(), always) {
                    (Some(w), true) => Formula::always_weighted(iv, child, w),
                    (Some(w), false) => Formula::eventually_weighted(iv, child, w),
                    (None, true) => Formula::always(iv, child),
                    (None, false) => Formula::eventually(iv, child),
                }
            }
            4 => Formula::not(self.formula(depth - 1)),
            _ => {
                let iv = self.interval();
                Formula::until(iv, self.formula(depth - 1), self.formula(depth - 1))
            }
        }
    }

    /// A formula with `horizon ≤ max_horizon` and at most `max_nodes` nodes.
    pub fn bounded(&mut self, max_horizon: usize, max_nodes: usize) -> Formula {
        loop {
            self.counter = 0;
            let f = self.formula(self.cfg.max_depth);
            if horizon(&f) <= max_horizon && f.node_count() <= max_nodes {
                return f;
            }
        }
    }

    /// Unweighted operators above, weighted operators at the leaves of that upper layer, and
    /// unweighted formulas below: every predicate sits under exactly one weighted operator.
    pub fn one_weighted_layer(&mut self, upper_depth: usize, lower_depth: usize) -> Formula {
        let saved = self.cfg.weighted;
        self.cfg.weighted = false;
        let f = self.upper(upper_depth, lower_depth);
        self.cfg.weighted = saved;
        f
    }

    fn upper(&mut self, depth: usize, lower_depth: usize) -> Formula {
        if depth <= 1 || self.rng.random_bool(0.3) {
            self.counter += 1;
            let name = format!("w{}", self.counter);
            return match self.rng.random_range(0..4) {
                0 => Formula::and_weighted(vec![self.formula(lower_depth), self.formula(lower_depth)], Some(name)),
                1 => Formula::or_weighted(vec![self.formula(lower_depth), self.formula(lower_depth)], Some(name)),
                2 => {
                    let iv = self.interval();
                    Formula::always_weighted(iv, self.formula(lower_depth), name)
                }
                _ => {
                    let iv = self.interval();
                    Formula::eventually_weighted(iv, self.formula(lower_depth), name)
                }
            };
        }
        match self.rng.random_range(0..4) {
            0 => Formula::and(vec![self.upper(depth - 1, lower_depth), self.upper(depth - 1, lower_depth)]),
            1 => Formula::or(vec![self.upper(depth - 1, lower_depth), self.upper(depth - 1, lower_depth)]),
            2 => {
                let iv = self.interval();
                Formula::always(iv, self.upper(depth - 1, lower_depth))
            }
            _ => {
                let iv = self.interval();
                Formula::eventually(iv, self.upper(depth - 1, lower_depth))
            }
        }
    }
}

/// Length each weight tag of `f` requires.
pub fn weight_arities(f: &Formula) -> Vec<(String, usize)> {
    use stlkit::syntax::FormulaKind;
    f.nodes()
        .into_iter()
        .filter_map(|n| {
            let w = n.weight()?.to_string();
            let len = match &n.kind {
                FormulaKind::And { children, .. } | FormulaKind::Or { children, .. } => children.len(),
                FormulaKind::Always { interval, .. } | FormulaKind::Eventually { interval, .. } => interval.width(),
                _ => unreachable!(),
            };
            Some((w, len))
        })
        .collect()
}

pub fn random_weights(rng: &mut StdRng, f: &Formula) -> WeightTable {
    let mut t = WeightTable::new();
    for (name, len) in weight_arities(f) {
        t.insert(name, (0..len).map(|_| rng.random_range(0.1..2.0)).collect()).unwrap();
    }
    t
}

pub fn unit_weights(f: &Formula) -> WeightTable {
    let mut t = WeightTable::new();
    for (name, len) in weight_arities(f) {
        t.insert(name, vec![1.0; len]).unwrap();
    }
    t
}

pub fn random_trace(rng: &mut StdRng, signals: &[String], len: usize, lo: f64, hi: f64) -> Trace {
    Trace::new(signals.iter().map(|s| (s.clone(), (0..len).map(|_| rng.random_range(lo..hi)).collect())).collect())
        .unwrap()
}

pub fn bounds(signals: &[String], lo: f64, hi: f64) -> VarBounds {
    VarBounds::uniform(signals, lo, hi).unwrap()
}
