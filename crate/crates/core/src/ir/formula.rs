use std::collections::BTreeMap;

use crate::model::{BinOp, EnumLit, EnumType, Value};
use crate::semantics::Trace;

use std::sync::Arc;

/// Time index of a stream or local access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tick {
    Zero,
    Now,
    Next,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    Implies,
}

impl FOp {
    pub fn from_binop(op: BinOp) -> Option<FOp> {
        Some(match op {
            BinOp::Add => FOp::Add,
            BinOp::Sub => FOp::Sub,
            BinOp::Eq => FOp::Eq,
            BinOp::Ne => FOp::Ne,
            BinOp::Lt => FOp::Lt,
            BinOp::Le => FOp::Le,
            BinOp::And | BinOp::Or => return None,
        })
    }

    fn binop(self) -> Option<BinOp> {
        Some(match self {
            FOp::Add => BinOp::Add,
            FOp::Sub => BinOp::Sub,
            FOp::Eq => BinOp::Eq,
            FOp::Ne => BinOp::Ne,
            FOp::Lt => BinOp::Lt,
            FOp::Le => BinOp::Le,
            FOp::Implies => return None,
        })
    }
}

/// Specification formula over the streams and locals of one frame.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(Value),
    /// Stream access; `col` indexes the frame's inputs, outputs and stream locals in that order.
    Stream { name: String, col: usize, at: Tick },
    /// The control-state local.
    State { at: Tick },
    Var { name: String, var: usize, at: Tick },
    Not(Box<Formula>),
    Binary(FOp, Box<Formula>, Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// Saturation of an integer expression into `lo..=hi`.
    Clamp { inner: Box<Formula>, lo: i64, hi: i64 },
    /// Behaviour of sub-instance `sub`, applied to the named actual streams.
    Apply {
        component: String,
        sub: usize,
        ins: Vec<usize>,
        outs: Vec<usize>,
    },
}

impl Formula {
    pub fn bin(op: FOp, l: Formula, r: Formula) -> Formula {
        Formula::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn eq(l: Formula, r: Formula) -> Formula {
        Formula::bin(FOp::Eq, l, r)
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::bin(FOp::Implies, l, r)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn truth() -> Formula {
        Formula::Const(Value::Bool(true))
    }

    pub fn absent() -> Formula {
        Formula::Const(Value::Absent)
    }

    /// Conjunction, flattening nested conjunctions; a single conjunct stays as is.
    pub fn and(items: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for f in items {
            match f {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one conjunct")
        } else {
            Formula::And(flat)
        }
    }

    pub fn or(items: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for f in items {
            match f {
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().expect("one disjunct")
        } else {
            Formula::Or(flat)
        }
    }

    /// The conjuncts of a conjunction, or the formula itself.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(items) => items.iter().collect(),
            other => vec![other],
        }
    }

    /// `(antecedent, consequent)` of an implication.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Binary(FOp::Implies, a, c) => Some((a, c)),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Const(_)
            | Formula::Stream { .. }
            | Formula::State { .. }
            | Formula::Var { .. }
            | Formula::Apply { .. } => Vec::new(),
            Formula::Not(f) | Formula::Clamp { inner: f, .. } => vec![f],
            Formula::Binary(_, l, r) => vec![l, r],
            Formula::And(items) | Formula::Or(items) => items.iter().collect(),
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Formula> {
        match self {
            Formula::Const(_)
            | Formula::Stream { .. }
            | Formula::State { .. }
            | Formula::Var { .. }
            | Formula::Apply { .. } => Vec::new(),
            Formula::Not(f) | Formula::Clamp { inner: f, .. } => vec![f],
            Formula::Binary(_, l, r) => vec![l, r],
            Formula::And(items) | Formula::Or(items) => items.iter_mut().collect(),
        }
    }

    /// Visit every node, pre-order.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&mut Formula)) {
        f(self);
        for c in self.children_mut() {
            c.visit_mut(f);
        }
    }

    /// Evaluate at slot `t`. `None` means the value depends on a slot beyond the trace.
    pub fn eval(&self, env: &Env<'_>, t: usize) -> Option<Value> {
        Some(match self {
            Formula::Const(v) => v.clone(),
            Formula::Stream { col, at, .. } => env.stream(*col, at_slot(*at, t))?,
            Formula::State { at } => env.state(at_slot(*at, t))?,
            Formula::Var { var, at, .. } => env.var(*var, at_slot(*at, t))?,
            Formula::Not(f) => crate::model::not(&f.eval(env, t)?),
            Formula::Clamp { inner, lo, hi } => match inner.eval(env, t)? {
                Value::Int(n) => Value::Int(n.clamp(*lo, *hi)),
                other => other,
            },
            Formula::Binary(FOp::Implies, a, c) => match a.eval(env, t)? {
                v if !v.is_true() => Value::Bool(true),
                _ => Value::Bool(c.eval(env, t)?.is_true()),
            },
            Formula::Binary(op, l, r) => {
                let (l, r) = (l.eval(env, t)?, r.eval(env, t)?);
                op.binop().expect("non-implication").apply(&l, &r)
            }
            Formula::And(items) => {
                // Conjuncts beyond the trace are skipped.
                let mut all = true;
                for f in items {
                    if let Some(v) = f.eval(env, t) {
                        all &= v.is_true();
                    }
                }
                Value::Bool(all)
            }
            Formula::Or(items) => {
                let mut unknown = false;
                for f in items {
                    match f.eval(env, t) {
                        Some(v) if v.is_true() => return Some(Value::Bool(true)),
                        Some(_) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    return None;
                }
                Value::Bool(false)
            }
            Formula::Apply { sub, ins, outs, .. } => {
                let part = env.trace.parts.get(*sub)?;
                let row = part.slots.get(t)?;
                let actual = ins.iter().chain(outs);
                Value::Bool(
                    actual
                        .zip(row)
                        .all(|(col, v)| env.stream(*col, t).as_ref() == Some(v)),
                )
            }
        })
    }

    /// Successor-free check: whether any access refers to `Next`.
    pub fn mentions_next(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(
                f,
                Formula::Stream { at: Tick::Next, .. }
                    | Formula::State { at: Tick::Next }
                    | Formula::Var { at: Tick::Next, .. }
            ) {
                found = true;
            }
        });
        found
    }
}

fn at_slot(at: Tick, t: usize) -> usize {
    match at {
        Tick::Zero => 0,
        Tick::Now => t,
        Tick::Next => t + 1,
    }
}

/// A single cell of a trace, as addressed by a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Stream { col: usize, slot: usize },
    State { slot: usize },
    Var { var: usize, slot: usize },
}

/// Read access to a trace of one atomic instance (or a composite's streams),
/// with optional cell overrides used by the completeness check.
#[derive(Debug, Clone)]
pub struct Env<'a> {
    pub trace: &'a Trace,
    /// Type of the control-state local, when the frame has one.
    pub state_type: Option<Arc<EnumType>>,
    pub overrides: BTreeMap<Cell, Value>,
}

impl<'a> Env<'a> {
    pub fn new(trace: &'a Trace, state_type: Option<Arc<EnumType>>) -> Self {
        Self {
            trace,
            state_type,
            overrides: BTreeMap::new(),
        }
    }

    fn stream(&self, col: usize, slot: usize) -> Option<Value> {
        if let Some(v) = self.overrides.get(&Cell::Stream { col, slot }) {
            return Some(v.clone());
        }
        self.trace.slots.get(slot).map(|row| row[col].clone())
    }

    fn state(&self, slot: usize) -> Option<Value> {
        if let Some(v) = self.overrides.get(&Cell::State { slot }) {
            return Some(v.clone());
        }
        let index = self.trace.snapshots.get(slot)?.first()?.state?;
        let ty = self.state_type.clone()?;
        Some(Value::Enum(EnumLit::new(ty, index)))
    }

    fn var(&self, var: usize, slot: usize) -> Option<Value> {
        if let Some(v) = self.overrides.get(&Cell::Var { var, slot }) {
            return Some(v.clone());
        }
        self.trace.snapshots.get(slot)?.first()?.vars.get(var).cloned()
    }
}

/// Cells read by `f` when evaluated at slot `t`.
pub fn cells_read(f: &Formula, t: usize) -> Vec<Cell> {
    let mut cells = Vec::new();
    f.visit(&mut |node| {
        let cell = match node {
            Formula::Stream { col, at, .. } => Some(Cell::Stream {
                col: *col,
                slot: at_slot(*at, t),
            }),
            Formula::State { at } => Some(Cell::State { slot: at_slot(*at, t) }),
            Formula::Var { var, at, .. } => Some(Cell::Var {
                var: *var,
                slot: at_slot(*at, t),
            }),
            _ => None,
        };
        cells.extend(cell);
    });
    cells.sort();
    cells.dedup();
    cells
}
