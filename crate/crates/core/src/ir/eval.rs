use std::collections::BTreeSet;
use std::fmt;

use crate::model::{Causality, Value};
use crate::semantics::Trace;

use super::formula::{cells_read, Cell, Env, Formula};
use super::frame::{FrameKind, SpecFrame};

/// Cap on the assignments enumerated for one group of coupled cells.
const GROUP_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FramePart {
    Init,
    Gar,
}

impl fmt::Display for FramePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FramePart::Init => "init",
            FramePart::Gar => "gar",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    /// `index` is 0-based within the part.
    Violated { part: FramePart, index: usize, slot: usize },
}

/// A trace on which the frame fails to determine the observed behaviour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incomplete {
    /// Slot whose successors are undetermined; `None` for the initial valuation.
    pub slot: Option<usize>,
    /// Cells of the offending group, rendered as `name(slot)`.
    pub cells: Vec<String>,
    /// Number of admissible assignments found (0, or 2 meaning "more than one").
    pub solutions: usize,
}

impl fmt::Display for Incomplete {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = match self.slot {
            Some(t) => format!("slot {t}"),
            None => "the initial slot".to_string(),
        };
        let what = if self.solutions == 0 {
            "no admissible value"
        } else {
            "more than one admissible value"
        };
        write!(f, "{} {what} at {at}", self.cells.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Violated { part: FramePart, index: usize, slot: usize },
    Incomplete(Incomplete),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Violated { part, index, slot } => {
                write!(f, "{part} formula ({}) violated at slot {slot}", index + 1)
            }
            Failure::Incomplete(i) => write!(f, "specification leaves {i}"),
        }
    }
}

fn env_for<'a>(frame: &SpecFrame, trace: &'a Trace) -> Env<'a> {
    Env::new(trace, frame.state_type())
}

fn holds(v: Option<Value>) -> bool {
    v.is_none_or(|v| v.is_true())
}

/// Evaluate `init` at slot 0 and every `gar` formula at every slot of the trace.
pub fn eval_frame(frame: &SpecFrame, trace: &Trace) -> Verdict {
    let env = env_for(frame, trace);
    for (index, f) in frame.init.iter().enumerate() {
        if !holds(f.eval(&env, 0)) {
            return Verdict::Violated {
                part: FramePart::Init,
                index,
                slot: 0,
            };
        }
    }
    for slot in 0..trace.horizon {
        for (index, f) in frame.gar.iter().enumerate() {
            if !holds(f.eval(&env, slot)) {
                return Verdict::Violated {
                    part: FramePart::Gar,
                    index,
                    slot,
                };
            }
        }
    }
    Verdict::Satisfied
}

/// Soundness followed by completeness.
pub fn check_trace(frame: &SpecFrame, trace: &Trace) -> Result<(), Failure> {
    match eval_frame(frame, trace) {
        Verdict::Violated { part, index, slot } => Err(Failure::Violated { part, index, slot }),
        Verdict::Satisfied => check_completeness(frame, trace).map_err(Failure::Incomplete),
    }
}

/// Name of a cell, e.g. `y(2)` or `st(0)`.
pub fn cell_name(frame: &SpecFrame, cell: Cell) -> String {
    match cell {
        Cell::Stream { col, slot } => format!("{}({slot})", frame.stream_names()[col]),
        Cell::State { slot } => format!(
            "{}({slot})",
            frame.state.as_ref().map_or("st", |d| d.name.as_str())
        ),
        Cell::Var { var, slot } => format!("{}({slot})", frame.vars[var].name),
    }
}

fn domain(frame: &SpecFrame, cell: Cell) -> Vec<Value> {
    let with_absent = |d: &crate::model::DataType| {
        std::iter::once(Value::Absent).chain(d.carrier()).collect::<Vec<_>>()
    };
    match cell {
        Cell::Stream { col, .. } => {
            let decl = frame
                .inputs
                .iter()
                .chain(&frame.outputs)
                .chain(&frame.stream_locals)
                .nth(col)
                .expect("stream column");
            with_absent(&decl.dtype)
        }
        Cell::State { .. } => frame.state.as_ref().map_or_else(Vec::new, |d| d.dtype.carrier()),
        Cell::Var { var, .. } => with_absent(&frame.vars[var].dtype),
    }
}

/// Check that on every slot the frame admits exactly one valuation of the
/// cells the component controls, given the observed past and inputs.
pub fn check_completeness(frame: &SpecFrame, trace: &Trace) -> Result<(), Incomplete> {
    if frame.kind == FrameKind::Composite {
        return Ok(());
    }
    let horizon = trace.horizon;
    let n_in = frame.inputs.len();
    let strong = frame.causality == Causality::Strong;
    let mut env = env_for(frame, trace);

    // Initial valuation.
    let mut cells: Vec<Cell> = Vec::new();
    if frame.state.is_some() {
        cells.push(Cell::State { slot: 0 });
    }
    cells.extend((0..frame.vars.len()).map(|var| Cell::Var { var, slot: 0 }));
    if strong && horizon > 0 {
        cells.extend((0..frame.outputs.len()).map(|q| Cell::Stream { col: n_in + q, slot: 0 }));
    }
    let constraints: Vec<&Formula> = frame.init.iter().flat_map(|f| f.conjuncts()).collect();
    unique(frame, &mut env, &cells, &constraints, 0, None)?;

    for t in 0..horizon {
        let mut cells: Vec<Cell> = Vec::new();
        if strong {
            if t + 1 < horizon {
                cells.extend((0..frame.outputs.len()).map(|q| Cell::Stream { col: n_in + q, slot: t + 1 }));
            }
        } else {
            cells.extend((0..frame.outputs.len()).map(|q| Cell::Stream { col: n_in + q, slot: t }));
        }
        if frame.state.is_some() {
            cells.push(Cell::State { slot: t + 1 });
        }
        cells.extend((0..frame.vars.len()).map(|var| Cell::Var { var, slot: t + 1 }));
        let controlled: BTreeSet<Cell> = cells.iter().copied().collect();

        let mut constraints: Vec<&Formula> = Vec::new();
        for f in &frame.gar {
            match f.as_implication() {
                Some((a, c)) if cells_read(a, t).iter().all(|x| !controlled.contains(x)) => {
                    if a.eval(&env, t).is_some_and(|v| v.is_true()) {
                        constraints.extend(c.conjuncts());
                    }
                }
                _ => constraints.push(f),
            }
        }
        unique(frame, &mut env, &cells, &constraints, t, Some(t))?;
    }
    Ok(())
}

/// Partition `cells` by the constraints coupling them and require exactly one
/// satisfying assignment per group.
fn unique(
    frame: &SpecFrame,
    env: &mut Env<'_>,
    cells: &[Cell],
    constraints: &[&Formula],
    t: usize,
    slot: Option<usize>,
) -> Result<(), Incomplete> {
    let index = |c: &Cell| cells.iter().position(|x| x == c);
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut touched = vec![false; cells.len()];
    let mut relevant: Vec<(&Formula, Vec<usize>)> = Vec::new();
    for f in constraints {
        let mine: Vec<usize> = cells_read(f, t).iter().filter_map(index).collect();
        if mine.is_empty() {
            continue;
        }
        for w in mine.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
        for i in &mine {
            touched[*i] = true;
        }
        relevant.push((f, mine));
    }
    let fail = |members: &[usize], solutions: usize| Incomplete {
        slot,
        cells: members.iter().map(|i| cell_name(frame, cells[*i])).collect(),
        solutions,
    };

    for i in 0..cells.len() {
        if !touched[i] && domain(frame, cells[i]).len() > 1 {
            return Err(fail(&[i], 2));
        }
    }
    let roots: BTreeSet<usize> = (0..cells.len())
        .filter(|i| touched[*i])
        .map(|i| find(&mut parent, i))
        .collect();
    for root in roots {
        let members: Vec<usize> = (0..cells.len()).filter(|i| touched[*i] && find(&mut parent, *i) == root).collect();
        let group: Vec<&Formula> = relevant
            .iter()
            .filter(|(_, m)| members.contains(&m[0]))
            .map(|(f, _)| *f)
            .collect();
        let domains: Vec<Vec<Value>> = members.iter().map(|i| domain(frame, cells[*i])).collect();
        let total = domains
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
            .filter(|n| *n <= GROUP_CAP);
        let Some(total) = total else {
            return Err(fail(&members, 2));
        };
        let mut solutions = 0;
        let mut digits = vec![0usize; members.len()];
        for _ in 0..total {
            for (k, i) in members.iter().enumerate() {
                env.overrides.insert(cells[*i], domains[k][digits[k]].clone());
            }
            if group.iter().all(|f| holds(f.eval(env, t))) {
                solutions += 1;
                if solutions > 1 {
                    break;
                }
            }
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < domains[k].len() {
                    break;
                }
                digits[k] = 0;
            }
        }
        env.overrides.clear();
        if solutions != 1 {
            return Err(fail(&members, solutions));
        }
    }
    Ok(())
}
