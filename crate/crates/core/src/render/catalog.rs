//! The operator catalog: every connective and accessor of the formula IR with
//! its unicode, ASCII and LaTeX renderings.

use std::fmt::Write;

use crate::ir::{FOp, Formula, Tick};
use crate::model::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Stream,
    Temporal,
    Logical,
    Arithmetic,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Stream => "stream",
            Category::Temporal => "temporal",
            Category::Logical => "logical",
            Category::Arithmetic => "arithmetic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpId {
    And,
    Or,
    Not,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Add,
    Sub,
    Sat,
    Absent,
    Now,
    Next,
    Zero,
    Apply,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorEntry {
    pub id: OpId,
    pub name: &'static str,
    /// Unicode plain-text form.
    pub symbol: &'static str,
    pub ascii: &'static str,
    /// LaTeX macro defined by the shipped preamble.
    pub latex: &'static str,
    pub arity: u8,
    pub category: Category,
}

macro_rules! entry {
    ($id:ident, $name:literal, $sym:literal, $ascii:literal, $latex:literal, $arity:literal, $cat:ident) => {
        OperatorEntry {
            id: OpId::$id,
            name: $name,
            symbol: $sym,
            ascii: $ascii,
            latex: $latex,
            arity: $arity,
            category: Category::$cat,
        }
    };
}

pub const CATALOG: &[OperatorEntry] = &[
    entry!(And, "and", "∧", "/\\", "\\fand", 2, Logical),
    entry!(Or, "or", "∨", "\\/", "\\flor", 2, Logical),
    entry!(Not, "not", "¬", "~", "\\fnot", 1, Logical),
    entry!(Implies, "implies", "→", "->", "\\fimp", 2, Logical),
    entry!(Eq, "equal", "=", "=", "\\feq", 2, Logical),
    entry!(Ne, "not-equal", "≠", "/=", "\\fneq", 2, Logical),
    entry!(Lt, "less", "<", "<", "\\flt", 2, Logical),
    entry!(Le, "less-or-equal", "≤", "<=", "\\fle", 2, Logical),
    entry!(Add, "plus", "+", "+", "\\fplus", 2, Arithmetic),
    entry!(Sub, "minus", "-", "-", "\\fminus", 2, Arithmetic),
    entry!(Sat, "saturate", "sat", "sat", "\\fsat", 1, Arithmetic),
    entry!(Absent, "empty-slot", "ε", "eps", "\\feps", 0, Stream),
    entry!(Now, "at-t", "(t)", "(t)", "\\fnow", 1, Stream),
    entry!(Next, "at-t+1", "(t+1)", "(t+1)", "\\fnext", 1, Temporal),
    entry!(Zero, "at-0", "(0)", "(0)", "\\fzero", 1, Stream),
    entry!(Apply, "apply", "C(i; o)", "C(i; o)", "\\fapp", 3, Stream),
];

pub fn entry(id: OpId) -> &'static OperatorEntry {
    CATALOG.iter().find(|e| e.id == id).expect("catalog covers every operator")
}

/// The catalog entry of a formula node; `None` only for non-empty literals.
pub fn entry_for(f: &Formula) -> Option<&'static OperatorEntry> {
    let tick = |at: &Tick| match at {
        Tick::Zero => OpId::Zero,
        Tick::Now => OpId::Now,
        Tick::Next => OpId::Next,
    };
    let id = match f {
        Formula::Const(Value::Absent) => OpId::Absent,
        Formula::Const(_) => return None,
        Formula::Stream { at, .. } | Formula::State { at } | Formula::Var { at, .. } => tick(at),
        Formula::Not(_) => OpId::Not,
        Formula::Binary(op, _, _) => match op {
            FOp::Add => OpId::Add,
            FOp::Sub => OpId::Sub,
            FOp::Eq => OpId::Eq,
            FOp::Ne => OpId::Ne,
            FOp::Lt => OpId::Lt,
            FOp::Le => OpId::Le,
            FOp::Implies => OpId::Implies,
        },
        Formula::And(_) => OpId::And,
        Formula::Or(_) => OpId::Or,
        Formula::Clamp { .. } => OpId::Sat,
        Formula::Apply { .. } => OpId::Apply,
    };
    Some(entry(id))
}

/// Plain-text operator forms, for the source checker.
pub fn plain_glyphs() -> Vec<&'static str> {
    let mut glyphs: Vec<&'static str> = CATALOG
        .iter()
        .filter(|e| !matches!(e.id, OpId::Now | OpId::Next | OpId::Zero | OpId::Apply | OpId::Sat))
        .flat_map(|e| [e.symbol, e.ascii])
        .collect();
    glyphs.sort_unstable();
    glyphs.dedup();
    glyphs.sort_by_key(|g| std::cmp::Reverse(g.len()));
    glyphs
}

/// One line per entry: name, unicode, ASCII, LaTeX, arity, category.
pub fn listing() -> String {
    let mut out = String::new();
    for e in CATALOG {
        let _ = writeln!(
            out,
            "{:<14} {:<8} {:<8} {:<9} {} {}",
            e.name,
            e.symbol,
            e.ascii,
            e.latex,
            e.arity,
            e.category.name()
        );
    }
    out
}

/// The operator reference shipped as `docs/operators.md`.
pub fn operators_markdown() -> String {
    let mut out = String::from(
        "# Operators\n\nGenerated from the operator catalog (`focusgen operators`). Do not edit by hand.\n\n\
         | name | unicode | ascii | latex | arity | category |\n\
         |------|---------|-------|-------|-------|----------|\n",
    );
    for e in CATALOG {
        let _ = writeln!(
            out,
            "| {} | `{}` | `{}` | `{}` | {} | {} |",
            e.name,
            e.symbol,
            e.ascii,
            e.latex,
            e.arity,
            e.category.name()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn symbols_and_ids_unique() {
        let ids: BTreeSet<OpId> = CATALOG.iter().map(|e| e.id).collect();
        let symbols: BTreeSet<&str> = CATALOG.iter().map(|e| e.symbol).collect();
        let macros: BTreeSet<&str> = CATALOG.iter().map(|e| e.latex).collect();
        assert_eq!(ids.len(), CATALOG.len());
        assert_eq!(symbols.len(), CATALOG.len());
        assert_eq!(macros.len(), CATALOG.len());
    }

    #[test]
    fn listing_has_one_line_per_entry() {
        assert_eq!(listing().lines().count(), CATALOG.len());
    }
}
