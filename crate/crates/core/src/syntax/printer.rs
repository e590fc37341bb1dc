use std::fmt::Write;

use super::ast::{Formula, FormulaKind, Predicate};

/// Canonical text form. Every operand is parenthesized, so the output re-parses to an equal tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    match &f.kind {
        FormulaKind::Pred(p) => write_predicate(p, out),
        FormulaKind::Const(b) => out.push_str(if *b { "true" } else { "false" }),
        FormulaKind::Not(c) => {
            out.push_str("!(");
            write_formula(c, out);
            out.push(')');
        }
        FormulaKind::And { children, weight } => write_nary(children, weight.as_deref(), "&&", out),
        FormulaKind::Or { children, weight } => write_nary(children, weight.as_deref(), "||", out),
        FormulaKind::Always { interval, child, weight } | FormulaKind::Eventually { interval, child, weight } => {
            out.push(if matches!(f.kind, FormulaKind::Always { .. }) { 'G' } else { 'F' });
            if let Some(w) = weight {
                let _ = write!(out, "^{w}");
            }
            let _ = write!(out, "{interval} (");
            write_formula(child, out);
            out.push(')');
        }
        FormulaKind::Until { interval, left, right } => {
            out.push('(');
            write_formula(left, out);
            let _ = write!(out, ") U{interval} (");
            write_formula(right, out);
            out.push(')');
        }
    }
}

fn write_predicate(p: &Predicate, out: &mut String) {
    match p {
        Predicate::Linear { signal, cmp, threshold } => {
            let _ = write!(out, "{signal} {} {threshold}", cmp.symbol());
        }
        Predicate::Atom { name, negated } => {
            if *negated {
                out.push('!');
            }
            out.push_str(name);
        }
    }
}

fn write_nary(children: &[Formula], weight: Option<&str>, op: &str, out: &mut String) {
    match weight {
        Some(w) => {
            let _ = write!(out, "{op}^{w}(");
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(c, out);
            }
            out.push(')');
        }
        None => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    let _ = write!(out, " {op} ");
                }
                out.push('(');
                write_formula(c, out);
                out.push(')');
            }
        }
    }
}

/// Indented tree dump, one node per line, one space of indentation per level.
pub fn tree_string(f: &Formula) -> String {
    let mut out = String::new();
    write_tree(f, 0, &mut out);
    out
}

fn write_tree(f: &Formula, depth: usize, out: &mut String) {
    out.push_str(&" ".repeat(depth));
    let tag = |w: &Option<String>| w.as_ref().map(|w| format!("^{w}")).unwrap_or_default();
    match &f.kind {
        FormulaKind::Pred(p @ Predicate::Linear { .. }) => {
            out.push_str("Pred ");
            write_predicate(p, out);
        }
        FormulaKind::Pred(Predicate::Atom { name, negated }) => {
            let _ = write!(out, "Atom {}{name}", if *negated { "!" } else { "" });
        }
        FormulaKind::Const(b) => {
            let _ = write!(out, "Const {b}");
        }
        FormulaKind::Not(_) => out.push_str("Not"),
        FormulaKind::And { weight, .. } => {
            let _ = write!(out, "And{}", tag(weight));
        }
        FormulaKind::Or { weight, .. } => {
            let _ = write!(out, "Or{}", tag(weight));
        }
        FormulaKind::Always { interval, weight, .. } => {
            let _ = write!(out, "Always{}{interval}", tag(weight));
        }
        FormulaKind::Eventually { interval, weight, .. } => {
            let _ = write!(out, "Eventually{}{interval}", tag(weight));
        }
        FormulaKind::Until { interval, .. } => {
            let _ = write!(out, "Until{interval}");
        }
    }
    out.push('\n');
    for c in f.children() {
        write_tree(c, depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_mtl, parse_stl, Interval};

    #[test]
    fn canonical_conjunction() {
        let f = parse_stl("(F[0,4] s>2) && (G[2,4] s<=4)").unwrap();
        assert_eq!(print_formula(&f), "(F[0,4] (s >= 2)) && (G[2,4] (s <= 4))");
    }

    #[test]
    fn atoms_and_weights() {
        assert_eq!(print_formula(&Formula::atom("RegionA")), "RegionA");
        let f = Formula::and_weighted(
            vec![Formula::always_weighted(Interval::new(0, 1), Formula::ge("s", 1.5), "w"), Formula::le("s", -2.0)],
            Some("p".into()),
        );
        assert_eq!(print_formula(&f), "&&^p(G^w[0,1] (s >= 1.5), s <= -2)");
    }

    #[test]
    fn until_and_not() {
        let f = parse_stl("!(a>0) U[1,3] b<0.25").unwrap();
        let text = print_formula(&f);
        assert_eq!(text, "(!(a >= 0)) U[1,3] (b <= 0.25)");
        assert_eq!(parse_stl(&text).unwrap(), f);
    }

    #[test]
    fn tree_dump() {
        let f = parse_stl("(F[0,4] s>2) && (G[2,4] s<=4)").unwrap();
        assert_eq!(tree_string(&f), "And\n Eventually[0,4]\n  Pred s >= 2\n Always[2,4]\n  Pred s <= 4\n");
        assert_eq!(tree_string(&parse_mtl("RegionA").unwrap()), "Atom RegionA\n");
    }
}
