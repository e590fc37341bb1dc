//! LP text format writer.
//!
//! Layout, one item per line:
//!
//! ```text
//! Maximize
//!  obj: x + 2 y
//! Subject To
//!  c0: x + y <= 3
//! Bounds
//!  0 <= x <= 10
//!  y free
//! Binaries
//!  z
//! End
//! ```
//!
//! Terms are emitted in variable-id order; numbers carry at most 12 significant digits.

use std::fmt::Write;

use crate::error::ModelError;
use crate::model::{LinConstraint, Model, ObjSense, VarId, VarKind};

/// Formats `v` with at most 12 significant digits, using the shortest decimal that
/// reproduces the rounded value.
pub fn format_number(v: f64) -> String {
    if v == f64::INFINITY {
        return "inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn write_terms(out: &mut String, model: &Model, terms: &[(f64, VarId)]) {
    let mut first = true;
    for &(c, v) in terms {
        if c == 0.0 {
            continue;
        }
        let name = &model.var(v).name;
        let mag = c.abs();
        let sign = if c < 0.0 { "-" } else { "+" };
        if first {
            if c < 0.0 {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == 1.0 {
            out.push_str(name);
        } else {
            let _ = write!(out, "{} {name}", format_number(mag));
        }
        first = false;
    }
    if first {
        match model.vars().first() {
            Some(v) => {
                let _ = write!(out, "0 {}", v.name);
            }
            None => out.push('0'),
        }
    }
}

fn write_constraint(out: &mut String, model: &Model, c: &LinConstraint) {
    let _ = write!(out, " {}: ", c.name);
    write_terms(out, model, &c.terms);
    let _ = writeln!(out, " {} {}", c.sense.symbol(), format_number(c.rhs));
}

/// Serializes `model` to LP text. Identical models produce byte-identical output.
pub fn export_lp(model: &Model) -> Result<String, ModelError> {
    let obj = model.objective().ok_or(ModelError::NoObjective)?;
    let mut out = String::new();
    out.push_str(match obj.sense {
        ObjSense::Maximize => "Maximize\n",
        ObjSense::Minimize => "Minimize\n",
    });
    out.push_str(" obj: ");
    if obj.expr.terms.iter().all(|&(c, _)| c == 0.0) {
        out.push_str(&format_number(obj.expr.constant));
    } else {
        write_terms(&mut out, model, &obj.expr.terms);
        let k = obj.expr.constant;
        if k != 0.0 {
            let sign = if k < 0.0 { '-' } else { '+' };
            let _ = write!(out, " {sign} {}", format_number(k.abs()));
        }
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for c in model.constrs() {
        write_constraint(&mut out, model, c);
    }

    out.push_str("Bounds\n");
    for v in model.vars() {
        let default = match v.kind {
            VarKind::Binary => v.lower == 0.0 && v.upper == 1.0,
            VarKind::Continuous => v.lower == 0.0 && v.upper == f64::INFINITY,
        };
        if default {
            continue;
        }
        let (lo, hi) = (v.lower, v.upper);
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(out, " {} free", v.name);
        } else if hi == f64::INFINITY {
            let _ = writeln!(out, " {} >= {}", v.name, format_number(lo));
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", format_number(lo), v.name, format_number(hi));
        }
    }

    let binaries: Vec<&str> =
        model.vars().iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstrSense, LinExpr};

    #[test]
    fn one_var_model_layout() {
        let mut m = Model::new();
        let x = m.add_continuous("x", 0.0, 10.0).unwrap();
        m.add_constr([(1.0, x)], ConstrSense::Le, 3.0, "").unwrap();
        m.set_objective(ObjSense::Maximize, LinExpr::var(x)).unwrap();
        let text = export_lp(&m).unwrap();
        assert_eq!(text, "Maximize\n obj: x\nSubject To\n c0: x <= 3\nBounds\n 0 <= x <= 10\nEnd\n");
    }

    #[test]
    fn binaries_section_and_free_vars() {
        let mut m = Model::new();
        let s = m.add_continuous("s1_0", -9.0, 9.0).unwrap();
        let f = m.add_continuous("f", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let z = m.add_binary("z").unwrap();
        m.add_constr([(2.5, s), (-1.0, f), (-3.0, z)], ConstrSense::Ge, -1.5, "link").unwrap();
        m.set_objective(ObjSense::Minimize, LinExpr::var(f).term(-1.0, z)).unwrap();
        let text = export_lp(&m).unwrap();
        assert!(text.contains(" obj: f - z\n"));
        assert!(text.contains(" link: 2.5 s1_0 - f - 3 z >= -1.5\n"));
        assert!(text.contains(" -9 <= s1_0 <= 9\n"));
        assert!(text.contains(" f free\n"));
        assert!(text.ends_with("Binaries\n z\nEnd\n"));
    }

    #[test]
    fn no_objective_is_an_error() {
        let m = Model::new();
        assert_eq!(export_lp(&m), Err(ModelError::NoObjective));
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0), "-2");
        assert_eq!(format_number(1e-4), "0.0001");
        assert_eq!(format_number(123456789.12345679), "123456789.123");
    }
}
