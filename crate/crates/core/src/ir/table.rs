use std::sync::Arc;

use crate::model::{Causality, Component, EnumType};

use super::formula::{FOp, Formula, Tick};
use super::frame::Decl;
use super::lower::{assigned, expr, output, output_tick, state_lit, state_type, var};

/// A table cell. Pattern cells compare against the input at `t`, output cells
/// give the emitted value, update cells the next variable value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableCell {
    /// No constraint (patterns) or no change (updates).
    DontCare,
    Absent,
    Present,
    Is(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    /// Source state; `None` for the closing stutter row.
    pub source: Option<usize>,
    pub patterns: Vec<TableCell>,
    pub guard: Option<Formula>,
    /// Target state; `None` keeps the current one.
    pub target: Option<usize>,
    pub outputs: Vec<TableCell>,
    pub updates: Vec<TableCell>,
}

/// Tabular rendering of an automaton's behaviour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedTable {
    pub name: String,
    pub causality: Causality,
    pub state_type: Arc<EnumType>,
    pub inputs: Vec<Decl>,
    pub outputs: Vec<Decl>,
    pub vars: Vec<Decl>,
    pub rows: Vec<TableRow>,
}

/// Build the table of an automaton component.
pub fn build_timed_table(c: &Component) -> TimedTable {
    let a = c.automaton().expect("automaton component");
    let mut rows: Vec<TableRow> = a
        .transitions
        .iter()
        .map(|t| TableRow {
            source: Some(t.source),
            patterns: (0..c.inputs.len())
                .map(|i| match t.patterns.iter().find(|(p, _)| *p == i).map(|(_, p)| p) {
                    None => TableCell::DontCare,
                    Some(crate::model::Pattern::Absent) => TableCell::Absent,
                    Some(crate::model::Pattern::Present) => TableCell::Present,
                    Some(crate::model::Pattern::Value(v)) => TableCell::Is(Formula::Const(v.clone())),
                })
                .collect(),
            guard: t.guard.as_ref().map(|g| expr(c, g)),
            target: Some(t.target),
            outputs: (0..c.outputs.len())
                .map(|q| match t.emissions.iter().find(|(p, _)| *p == q) {
                    Some((_, e)) => TableCell::Is(assigned(c, e, &c.outputs[q].ty.dtype)),
                    None => TableCell::Absent,
                })
                .collect(),
            updates: a
                .variables
                .iter()
                .enumerate()
                .map(|(v, d)| match t.updates.iter().find(|(u, _)| *u == v) {
                    Some((_, e)) => TableCell::Is(assigned(c, e, &d.ty.dtype)),
                    None => TableCell::DontCare,
                })
                .collect(),
        })
        .collect();
    rows.push(TableRow {
        source: None,
        patterns: vec![TableCell::DontCare; c.inputs.len()],
        guard: None,
        target: None,
        outputs: vec![TableCell::Absent; c.outputs.len()],
        updates: vec![TableCell::DontCare; a.variables.len()],
    });
    TimedTable {
        name: c.name.clone(),
        causality: c.causality,
        state_type: state_type(c, a),
        inputs: c.inputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect(),
        outputs: c.outputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect(),
        vars: a.variables.iter().map(|v| Decl::new(&v.name, &v.ty)).collect(),
        rows,
    }
}

impl TimedTable {
    /// Compile the rows back to guarantee formulas.
    pub fn to_formulas(&self, c: &Component) -> Vec<Formula> {
        let at = output_tick(c);
        let st = &self.state_type;
        let enabling: Vec<Formula> = self
            .rows
            .iter()
            .filter_map(|row| {
                let source = row.source?;
                let mut items = vec![Formula::eq(Formula::State { at: Tick::Now }, state_lit(st, source))];
                for (i, cell) in row.patterns.iter().enumerate() {
                    let x = super::lower::input(c, i, Tick::Now);
                    match cell {
                        TableCell::DontCare => {}
                        TableCell::Absent => items.push(Formula::eq(x, Formula::absent())),
                        TableCell::Present => items.push(Formula::bin(FOp::Ne, x, Formula::absent())),
                        TableCell::Is(v) => items.push(Formula::eq(x, v.clone())),
                    }
                }
                items.extend(row.guard.clone());
                Some(Formula::and(items))
            })
            .collect();
        let mut out = Vec::new();
        for row in &self.rows {
            let mut then: Vec<Formula> = row
                .outputs
                .iter()
                .enumerate()
                .map(|(q, cell)| {
                    let rhs = match cell {
                        TableCell::Is(f) => f.clone(),
                        _ => Formula::absent(),
                    };
                    Formula::eq(output(c, q, at), rhs)
                })
                .collect();
            then.extend(row.updates.iter().enumerate().map(|(v, cell)| {
                let rhs = match cell {
                    TableCell::Is(f) => f.clone(),
                    _ => var(c, v, Tick::Now),
                };
                Formula::eq(var(c, v, Tick::Next), rhs)
            }));
            then.push(Formula::eq(
                Formula::State { at: Tick::Next },
                match row.target {
                    Some(s) => state_lit(st, s),
                    None => Formula::State { at: Tick::Now },
                },
            ));
            let then = Formula::and(then);
            out.push(match row.source {
                Some(_) => Formula::implies(enabling[out.len()].clone(), then),
                None if enabling.is_empty() => then,
                None => Formula::implies(Formula::not(Formula::or(enabling.clone())), then),
            });
        }
        out
    }
}
