//! Deliberate corruptions of lowered frames, used to confirm the oracle rejects them.

use std::fmt;
use std::str::FromStr;

use crate::model::{EnumLit, Value};

use super::formula::{FOp, Formula, Tick};
use super::frame::{FrameKind, SpecFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Emit outputs one slot early or late.
    SwapEmissionTime,
    /// Remove the stutter formula.
    DropStutter,
    /// Send the first transition to another state.
    WrongNextState,
    /// Start in another state.
    WrongInitState,
    /// Keep a variable instead of updating it.
    StaleUpdate,
    /// Drop the first input pattern of a transition.
    DropPattern,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::SwapEmissionTime,
        Mutation::DropStutter,
        Mutation::WrongNextState,
        Mutation::WrongInitState,
        Mutation::StaleUpdate,
        Mutation::DropPattern,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::SwapEmissionTime => "swap-emission-time",
            Mutation::DropStutter => "drop-stutter",
            Mutation::WrongNextState => "wrong-next-state",
            Mutation::WrongInitState => "wrong-init-state",
            Mutation::StaleUpdate => "stale-update",
            Mutation::DropPattern => "drop-pattern",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

/// Apply a mutation; `None` if it does not apply to this frame.
pub fn mutate(frame: &SpecFrame, mutation: Mutation) -> Option<SpecFrame> {
    let FrameKind::Automaton { transitions } = frame.kind else {
        return match mutation {
            Mutation::SwapEmissionTime if frame.kind == FrameKind::Function => swap_times(frame),
            _ => None,
        };
    };
    let mut out = frame.clone();
    match mutation {
        Mutation::SwapEmissionTime => return swap_times(frame),
        Mutation::DropStutter => {
            if transitions == 0 {
                return None;
            }
            out.gar.pop();
        }
        Mutation::WrongNextState => {
            let f = out.gar.get_mut(..transitions)?.first_mut()?;
            if !shift_state_literal(f, |n| matches!(n, Formula::State { at: Tick::Next })) {
                return None;
            }
        }
        Mutation::WrongInitState => {
            if !shift_state_literal(out.init.first_mut()?, |n| matches!(n, Formula::State { at: Tick::Zero })) {
                return None;
            }
        }
        Mutation::StaleUpdate => {
            let mut done = false;
            for f in out.gar.iter_mut().take(transitions) {
                f.visit_mut(&mut |n| {
                    if done {
                        return;
                    }
                    if let Formula::Binary(FOp::Eq, l, r) = n {
                        if let Formula::Var { at: Tick::Next, name, var } = l.as_ref() {
                            let stale = Formula::Var {
                                name: name.clone(),
                                var: *var,
                                at: Tick::Now,
                            };
                            if **r != stale {
                                **r = stale;
                                done = true;
                            }
                        }
                    }
                });
                if done {
                    break;
                }
            }
            if !done {
                return None;
            }
        }
        Mutation::DropPattern => {
            let mut done = false;
            for f in out.gar.iter_mut().take(transitions) {
                if let Formula::Binary(FOp::Implies, a, _) = f {
                    if let Formula::And(items) = a.as_mut() {
                        if let Some(pos) = items.iter().position(|i| matches!(i, Formula::Binary(_, l, _) if matches!(**l, Formula::Stream { .. }))) {
                            items.remove(pos);
                            let rest = std::mem::take(items);
                            **a = Formula::and(rest);
                            done = true;
                            break;
                        }
                    }
                }
            }
            if !done {
                return None;
            }
        }
    }
    Some(out)
}

fn swap_times(frame: &SpecFrame) -> Option<SpecFrame> {
    if frame.outputs.is_empty() {
        return None;
    }
    let n_in = frame.inputs.len();
    let mut out = frame.clone();
    let mut changed = false;
    for f in out.gar.iter_mut() {
        f.visit_mut(&mut |n| {
            if let Formula::Stream { col, at, .. } = n {
                if *col >= n_in {
                    *at = match at {
                        Tick::Now => Tick::Next,
                        Tick::Next => Tick::Now,
                        Tick::Zero => Tick::Zero,
                    };
                    changed = true;
                }
            }
        });
    }
    changed.then_some(out)
}

/// Replace the state literal compared with a matching state access by its successor literal.
fn shift_state_literal(f: &mut Formula, is_access: impl Fn(&Formula) -> bool) -> bool {
    let mut done = false;
    f.visit_mut(&mut |n| {
        if done {
            return;
        }
        if let Formula::Binary(FOp::Eq, l, r) = n {
            if is_access(l) {
                if let Formula::Const(Value::Enum(lit)) = r.as_mut() {
                    if lit.ty.literals.len() > 1 {
                        *lit = EnumLit::new(lit.ty.clone(), (lit.index + 1) % lit.ty.literals.len());
                        done = true;
                    }
                }
            }
        }
    });
    done
}
