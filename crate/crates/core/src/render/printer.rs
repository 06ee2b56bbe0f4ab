use crate::ir::{FOp, Formula, Tick};
use crate::model::Value;

use super::catalog::{entry, entry_for, OpId};

/// Output notation for formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Style {
    Unicode,
    Ascii,
    Latex,
}

impl Style {
    pub fn plain(ascii: bool) -> Style {
        if ascii {
            Style::Ascii
        } else {
            Style::Unicode
        }
    }

    /// The rendering of a catalog operator in this style.
    pub fn op(self, id: OpId) -> &'static str {
        let e = entry(id);
        match self {
            Style::Unicode => e.symbol,
            Style::Ascii => e.ascii,
            Style::Latex => e.latex,
        }
    }

    /// The don't-care table cell.
    pub fn dont_care(self) -> &'static str {
        match self {
            Style::Unicode => "—",
            Style::Ascii => "-",
            Style::Latex => "\\fdontcare",
        }
    }
}

/// Escape an identifier for LaTeX math.
pub fn latex_name(name: &str) -> String {
    name.replace('_', "\\_")
}

pub fn value(v: &Value, style: Style) -> String {
    match (v, style) {
        (Value::Absent, _) => style.op(OpId::Absent).to_string(),
        (Value::Int(n), _) => n.to_string(),
        (other, Style::Latex) => format!("\\fconst{{{}}}", latex_name(&other.to_string())),
        (other, _) => other.to_string(),
    }
}

/// A name accessed at a tick, e.g. `x(t+1)` or `\fnext{x}`.
pub fn access(name: &str, at: Tick, style: Style) -> String {
    let id = match at {
        Tick::Zero => OpId::Zero,
        Tick::Now => OpId::Now,
        Tick::Next => OpId::Next,
    };
    match style {
        Style::Latex => format!("{}{{{}}}", style.op(id), latex_name(name)),
        _ => format!("{name}{}", style.op(id)),
    }
}

/// Binding strength: → 1, ∨ 2, ∧ 3, comparisons 4, + - 5, ¬ 6, atoms 7.
fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Binary(FOp::Implies, ..) => 1,
        Formula::Or(items) if items.len() > 1 => 2,
        Formula::And(items) if items.len() > 1 => 3,
        Formula::Binary(FOp::Eq | FOp::Ne | FOp::Lt | FOp::Le, ..) => 4,
        Formula::Binary(FOp::Add | FOp::Sub, ..) => 5,
        Formula::Not(_) => 6,
        _ => 7,
    }
}

/// Render a formula; every symbol is taken from the operator catalog.
pub fn formula(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    write(&mut out, f, style, 0);
    out
}

fn write(out: &mut String, f: &Formula, style: Style, min: u8) {
    let prec = precedence(f);
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    let sp = |id: OpId| format!(" {} ", style.op(id));
    match f {
        Formula::Const(v) => out.push_str(&value(v, style)),
        Formula::Stream { name, at, .. } | Formula::Var { name, at, .. } => {
            out.push_str(&access(name, *at, style))
        }
        Formula::State { at } => out.push_str(&access(crate::model::STATE_VAR, *at, style)),
        Formula::Not(inner) => {
            out.push_str(style.op(OpId::Not));
            if style == Style::Latex {
                out.push(' ');
            }
            write(out, inner, style, 6);
        }
        Formula::Binary(op, l, r) => {
            let id = entry_for(f).expect("operator node").id;
            let (lmin, rmin) = match op {
                FOp::Implies => (2, 1),
                FOp::Add | FOp::Sub => (5, 6),
                _ => (5, 5),
            };
            write(out, l, style, lmin);
            out.push_str(&sp(id));
            write(out, r, style, rmin);
        }
        Formula::And(items) | Formula::Or(items) => {
            let id = entry_for(f).expect("operator node").id;
            if items.is_empty() {
                let unit = Value::Bool(matches!(f, Formula::And(_)));
                out.push_str(&value(&unit, style));
            }
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(&sp(id));
                }
                write(out, item, style, if items.len() > 1 { 4 } else { min });
            }
        }
        Formula::Clamp { inner, lo, hi } => match style {
            Style::Latex => {
                out.push_str(&format!("{}{{{lo}}}{{{hi}}}{{", style.op(OpId::Sat)));
                write(out, inner, style, 0);
                out.push('}');
            }
            _ => {
                out.push_str(&format!("{}[{lo},{hi}](", style.op(OpId::Sat)));
                write(out, inner, style, 0);
                out.push(')');
            }
        },
        Formula::Apply { component, .. } => {
            // Actual names are resolved by the caller through `application`.
            out.push_str(component);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Render a wiring application `C(ins; outs)` given the actual stream names.
pub fn application(component: &str, ins: &[String], outs: &[String], style: Style) -> String {
    match style {
        Style::Latex => {
            let names = |xs: &[String]| {
                xs.iter()
                    .map(|x| format!("\\fname{{{}}}", latex_name(x)))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            format!(
                "{}{{{}}}{{{}}}{{{}}}",
                style.op(OpId::Apply),
                latex_name(component),
                names(ins),
                names(outs)
            )
        }
        _ => format!("{component}({}; {})", ins.join(", "), outs.join(", ")),
    }
}

/// Render a formula whose applications refer to the columns named in `columns`.
pub fn formula_with_columns(f: &Formula, columns: &[&str], style: Style) -> String {
    match f {
        Formula::Apply {
            component, ins, outs, ..
        } => {
            let names = |xs: &[usize]| xs.iter().map(|c| columns[*c].to_string()).collect::<Vec<_>>();
            application(component, &names(ins), &names(outs), style)
        }
        Formula::And(items) if items.iter().any(|i| matches!(i, Formula::Apply { .. })) => items
            .iter()
            .map(|i| formula_with_columns(i, columns, style))
            .collect::<Vec<_>>()
            .join(&format!(" {} ", style.op(OpId::And))),
        other => formula(other, style),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(at: Tick) -> Formula {
        Formula::Stream {
            name: "x".into(),
            col: 0,
            at,
        }
    }

    #[test]
    fn styles() {
        let f = Formula::implies(
            Formula::and(vec![
                Formula::eq(x(Tick::Now), Formula::Const(Value::Bool(true))),
                Formula::bin(FOp::Ne, x(Tick::Now), Formula::absent()),
            ]),
            Formula::eq(x(Tick::Next), Formula::absent()),
        );
        assert_eq!(
            formula(&f, Style::Unicode),
            "x(t) = true ∧ x(t) ≠ ε → x(t+1) = ε"
        );
        assert_eq!(
            formula(&f, Style::Ascii),
            "x(t) = true /\\ x(t) /= eps -> x(t+1) = eps"
        );
        assert_eq!(
            formula(&f, Style::Latex),
            "\\fnow{x} \\feq \\fconst{true} \\fand \\fnow{x} \\fneq \\feps \\fimp \\fnext{x} \\feq \\feps"
        );
    }

    #[test]
    fn parenthesization() {
        let any = Formula::or(vec![
            Formula::and(vec![Formula::eq(x(Tick::Now), Formula::absent()), Formula::truth()]),
            Formula::eq(x(Tick::Now), Formula::Const(Value::Int(1))),
        ]);
        let f = Formula::implies(Formula::not(any), Formula::truth());
        assert_eq!(
            formula(&f, Style::Unicode),
            "¬((x(t) = ε ∧ true) ∨ x(t) = 1) → true"
        );
        let sub = Formula::bin(
            FOp::Sub,
            x(Tick::Now),
            Formula::bin(FOp::Sub, x(Tick::Now), Formula::Const(Value::Int(1))),
        );
        assert_eq!(formula(&sub, Style::Unicode), "x(t) - (x(t) - 1)");
    }
}
