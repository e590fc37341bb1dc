use std::collections::BTreeSet;
use std::fmt;

/// Byte range of a node in its source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Stl,
    Mtl,
    Wstl,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Stl => "stl",
            Logic::Mtl => "mtl",
            Logic::Wstl => "wstl",
        })
    }
}

/// Comparison sense of a linear predicate. Strict comparisons collapse onto these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Ge,
    Le,
}

impl Cmp {
    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Ge => Cmp::Le,
            Cmp::Le => Cmp::Ge,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `signal >= threshold` or `signal <= threshold`.
    Linear { signal: String, cmp: Cmp, threshold: f64 },
    /// Atomic proposition; `negated` only appears after negation has been pushed to the leaves.
    Atom { name: String, negated: bool },
}

/// Closed integer step interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: u32,
    pub end: u32,
}

impl Interval {
    pub fn new(start: u32, end: u32) -> Self {
        assert!(start <= end, "interval [{start}, {end}] is reversed");
        Self { start, end }
    }

    /// Number of steps covered, `end − start + 1`.
    pub fn width(&self) -> usize {
        (self.end - self.start) as usize + 1
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormulaKind {
    Pred(Predicate),
    Const(bool),
    Not(Box<Formula>),
    And { children: Vec<Formula>, weight: Option<String> },
    Or { children: Vec<Formula>, weight: Option<String> },
    Always { interval: Interval, child: Box<Formula>, weight: Option<String> },
    Eventually { interval: Interval, child: Box<Formula>, weight: Option<String> },
    Until { interval: Interval, left: Box<Formula>, right: Box<Formula> },
}

/// Formula AST node. Equality is structural and ignores source spans.
#[derive(Debug, Clone)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<FormulaKind> for Formula {
    fn from(kind: FormulaKind) -> Self {
        Formula { kind, span: Span::default() }
    }
}

impl Formula {
    pub fn with_span(kind: FormulaKind, span: Span) -> Self {
        Formula { kind, span }
    }

    pub fn ge(signal: impl Into<String>, threshold: f64) -> Self {
        FormulaKind::Pred(Predicate::Linear { signal: signal.into(), cmp: Cmp::Ge, threshold }).into()
    }

    pub fn le(signal: impl Into<String>, threshold: f64) -> Self {
        FormulaKind::Pred(Predicate::Linear { signal: signal.into(), cmp: Cmp::Le, threshold }).into()
    }

    pub fn atom(name: impl Into<String>) -> Self {
        FormulaKind::Pred(Predicate::Atom { name: name.into(), negated: false }).into()
    }

    pub fn constant(value: bool) -> Self {
        FormulaKind::Const(value).into()
    }

    pub fn not(child: Formula) -> Self {
        FormulaKind::Not(Box::new(child)).into()
    }

    /// Unweighted conjunction; nested unweighted conjunctions are flattened.
    pub fn and(children: Vec<Formula>) -> Self {
        Self::and_weighted(children, None)
    }

    pub fn or(children: Vec<Formula>) -> Self {
        Self::or_weighted(children, None)
    }

    pub fn and_weighted(children: Vec<Formula>, weight: Option<String>) -> Self {
        let children = if weight.is_none() { flatten(children, true) } else { children };
        assert!(children.len() >= 2, "conjunction needs at least two operands");
        FormulaKind::And { children, weight }.into()
    }

    pub fn or_weighted(children: Vec<Formula>, weight: Option<String>) -> Self {
        let children = if weight.is_none() { flatten(children, false) } else { children };
        assert!(children.len() >= 2, "disjunction needs at least two operands");
        FormulaKind::Or { children, weight }.into()
    }

    pub fn always(interval: Interval, child: Formula) -> Self {
        FormulaKind::Always { interval, child: Box::new(child), weight: None }.into()
    }

    pub fn eventually(interval: Interval, child: Formula) -> Self {
        FormulaKind::Eventually { interval, child: Box::new(child), weight: None }.into()
    }

    pub fn always_weighted(interval: Interval, child: Formula, weight: impl Into<String>) -> Self {
        FormulaKind::Always { interval, child: Box::new(child), weight: Some(weight.into()) }.into()
    }

    pub fn eventually_weighted(interval: Interval, child: Formula, weight: impl Into<String>) -> Self {
        FormulaKind::Eventually { interval, child: Box::new(child), weight: Some(weight.into()) }.into()
    }

    pub fn until(interval: Interval, left: Formula, right: Formula) -> Self {
        FormulaKind::Until { interval, left: Box::new(left), right: Box::new(right) }.into()
    }

    pub fn children(&self) -> Vec<&Formula> {
        match &self.kind {
            FormulaKind::Pred(_) | FormulaKind::Const(_) => Vec::new(),
            FormulaKind::Not(c) => vec![c],
            FormulaKind::And { children, .. } | FormulaKind::Or { children, .. } => children.iter().collect(),
            FormulaKind::Always { child, .. } | FormulaKind::Eventually { child, .. } => vec![child],
            FormulaKind::Until { left, right, .. } => vec![left, right],
        }
    }

    pub fn weight(&self) -> Option<&str> {
        match &self.kind {
            FormulaKind::And { weight, .. }
            | FormulaKind::Or { weight, .. }
            | FormulaKind::Always { weight, .. }
            | FormulaKind::Eventually { weight, .. } => weight.as_deref(),
            _ => None,
        }
    }

    /// Nodes in pre-order.
    pub fn nodes(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Names of all signals referenced by linear predicates.
    pub fn signals(&self) -> BTreeSet<String> {
        self.nodes()
            .into_iter()
            .filter_map(|n| match &n.kind {
                FormulaKind::Pred(Predicate::Linear { signal, .. }) => Some(signal.clone()),
                _ => None,
            })
            .collect()
    }

    /// Names of all atomic propositions.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.nodes()
            .into_iter()
            .filter_map(|n| match &n.kind {
                FormulaKind::Pred(Predicate::Atom { name, .. }) => Some(name.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn has_until(&self) -> bool {
        self.nodes().iter().any(|n| matches!(n.kind, FormulaKind::Until { .. }))
    }

    pub fn has_not(&self) -> bool {
        self.nodes().iter().any(|n| matches!(n.kind, FormulaKind::Not(_)))
    }
}

fn flatten(children: Vec<Formula>, conj: bool) -> Vec<Formula> {
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        match c.kind {
            FormulaKind::And { children: inner, weight: None } if conj => out.extend(inner),
            FormulaKind::Or { children: inner, weight: None } if !conj => out.extend(inner),
            kind => out.push(Formula { kind, span: c.span }),
        }
    }
    out
}

pub(crate) fn flatten_children(children: Vec<Formula>, conj: bool) -> Vec<Formula> {
    flatten(children, conj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunctions_flatten() {
        let f =
            Formula::and(vec![Formula::and(vec![Formula::ge("a", 0.0), Formula::ge("b", 0.0)]), Formula::ge("c", 0.0)]);
        assert_eq!(f.children().len(), 3);
    }

    #[test]
    fn weighted_conjunctions_stay_nested() {
        let inner = Formula::and_weighted(vec![Formula::ge("a", 0.0), Formula::ge("b", 0.0)], Some("p".into()));
        let f = Formula::and(vec![inner, Formula::ge("c", 0.0)]);
        assert_eq!(f.children().len(), 2);
    }

    #[test]
    fn equality_ignores_spans() {
        let a = Formula::with_span(FormulaKind::Const(true), Span::new(0, 4));
        assert_eq!(a, Formula::constant(true));
    }
}
