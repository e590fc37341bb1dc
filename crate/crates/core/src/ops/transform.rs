use super::OpsError;
use crate::syntax::{Formula, FormulaKind, Predicate};

/// Number of future steps the truth value at `t` can depend on.
pub fn horizon(f: &Formula) -> usize {
    match &f.kind {
        FormulaKind::Pred(_) | FormulaKind::Const(_) => 0,
        FormulaKind::Not(c) => horizon(c),
        FormulaKind::And { children, .. } | FormulaKind::Or { children, .. } => {
            children.iter().map(horizon).max().unwrap_or(0)
        }
        FormulaKind::Always { interval, child, .. } | FormulaKind::Eventually { interval, child, .. } => {
            interval.end as usize + horizon(child)
        }
        FormulaKind::Until { interval, left, right } => interval.end as usize + horizon(left).max(horizon(right)),
    }
}

/// Positive normal form: negations are pushed into the predicates.
pub fn pnf(f: &Formula) -> Result<Formula, OpsError> {
    push(f, false)
}

/// The positive normal form of `!f`.
pub fn negate(f: &Formula) -> Result<Formula, OpsError> {
    push(f, true)
}

fn push(f: &Formula, neg: bool) -> Result<Formula, OpsError> {
    let kind = match &f.kind {
        FormulaKind::Pred(Predicate::Linear { signal, cmp, threshold }) => FormulaKind::Pred(Predicate::Linear {
            signal: signal.clone(),
            cmp: if neg { cmp.flip() } else { *cmp },
            threshold: *threshold,
        }),
        FormulaKind::Pred(Predicate::Atom { name, negated }) => {
            FormulaKind::Pred(Predicate::Atom { name: name.clone(), negated: *negated != neg })
        }
        FormulaKind::Const(b) => FormulaKind::Const(*b != neg),
        FormulaKind::Not(c) => return push(c, !neg),
        FormulaKind::And { children, weight } | FormulaKind::Or { children, weight } => {
            let conj = matches!(f.kind, FormulaKind::And { .. }) != neg;
            let children = children.iter().map(|c| push(c, neg)).collect::<Result<Vec<_>, _>>()?;
            let g = if conj {
                Formula::and_weighted(children, weight.clone())
            } else {
                Formula::or_weighted(children, weight.clone())
            };
            g.kind
        }
        FormulaKind::Always { interval, child, weight } | FormulaKind::Eventually { interval, child, weight } => {
            let always = matches!(f.kind, FormulaKind::Always { .. }) != neg;
            let child = Box::new(push(child, neg)?);
            let (interval, weight) = (*interval, weight.clone());
            if always {
                FormulaKind::Always { interval, child, weight }
            } else {
                FormulaKind::Eventually { interval, child, weight }
            }
        }
        FormulaKind::Until { interval, left, right } => {
            if neg {
                return Err(OpsError::UnsupportedNegation);
            }
            FormulaKind::Until {
                interval: *interval,
                left: Box::new(push(left, false)?),
                right: Box::new(push(right, false)?),
            }
        }
    };
    Ok(Formula::with_span(kind, f.span))
}
