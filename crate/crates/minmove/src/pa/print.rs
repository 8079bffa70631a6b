//! Textual form of formulas in the same grammar the parser accepts.

use super::{LinearAtom, PaFormula};
use std::fmt;
use std::fmt::Write as _;

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in self.coeffs() {
            if first {
                if c == 1 {
                    write!(f, "{v}")?;
                } else if c == -1 {
                    write!(f, "-{v}")?;
                } else {
                    write!(f, "{c}*{v}")?;
                }
                first = false;
            } else if c >= 0 {
                if c == 1 {
                    write!(f, " + {v}")?;
                } else {
                    write!(f, " + {c}*{v}")?;
                }
            } else if c == -1 {
                write!(f, " - {v}")?;
            } else {
                write!(f, " - {}*{v}", -c)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.bound())
    }
}

// Precedence levels mirroring the grammar: formula (quantifier) < or < and < unit.
fn needs_parens_in_conj(f: &PaFormula) -> bool {
    matches!(
        f,
        PaFormula::Or(_) | PaFormula::And(_) | PaFormula::Exists(..) | PaFormula::Forall(..)
    )
}

fn needs_parens_in_disj(f: &PaFormula) -> bool {
    matches!(f, PaFormula::Or(_) | PaFormula::Exists(..) | PaFormula::Forall(..))
}

fn write_formula(f: &PaFormula, out: &mut String) {
    match f {
        PaFormula::Atom(a) => {
            let _ = write!(out, "{a}");
        }
        PaFormula::And(parts) => {
            if parts.is_empty() {
                // Empty conjunction: identically true.
                out.push_str("0 <= 0");
                return;
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                if needs_parens_in_conj(p) {
                    out.push('(');
                    write_formula(p, out);
                    out.push(')');
                } else {
                    write_formula(p, out);
                }
            }
        }
        PaFormula::Or(parts) => {
            if parts.is_empty() {
                // Empty disjunction: identically false.
                out.push_str("0 <= -1");
                return;
            }
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" or ");
                }
                if needs_parens_in_disj(p) {
                    out.push('(');
                    write_formula(p, out);
                    out.push(')');
                } else {
                    write_formula(p, out);
                }
            }
        }
        PaFormula::Not(g) => {
            out.push_str("not ");
            if matches!(**g, PaFormula::Atom(_) | PaFormula::Not(_)) {
                write_formula(g, out);
            } else {
                out.push('(');
                write_formula(g, out);
                out.push(')');
            }
        }
        PaFormula::Exists(vars, body) | PaFormula::Forall(vars, body) => {
            out.push_str(if matches!(f, PaFormula::Exists(..)) { "exists" } else { "forall" });
            for v in vars {
                out.push(' ');
                out.push_str(v);
            }
            out.push_str(" : ");
            write_formula(body, out);
        }
    }
}

/// Renders a formula; `parse_formula(print_formula(f))` reproduces `f`
/// structurally for any normalized formula with non-empty connectives.
pub fn print_formula(f: &PaFormula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

impl fmt::Display for PaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}
