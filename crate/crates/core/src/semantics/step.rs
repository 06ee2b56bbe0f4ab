use crate::model::{Body, Component, Value};

/// Control state and variable valuation of one atomic instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    /// Current control state; `None` for function components.
    pub state: Option<usize>,
    pub vars: Vec<Value>,
}

impl Snapshot {
    pub fn initial(component: &Component) -> Snapshot {
        match &component.body {
            Body::Automaton(a) => Snapshot {
                state: Some(a.initial),
                vars: a.variables.iter().map(|v| v.init.clone()).collect(),
            },
            _ => Snapshot {
                state: None,
                vars: Vec::new(),
            },
        }
    }
}

/// Result of one reaction of an atomic component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub outputs: Vec<Value>,
    pub next: Snapshot,
    /// Index of the fired transition; `None` when the automaton stutters.
    pub fired: Option<usize>,
}

/// One synchronous step: consume `inputs`, produce the outputs of this slot
/// and the successor snapshot. The first enabled transition in declaration
/// order fires; with none enabled the automaton stutters and emits nothing.
pub fn step(component: &Component, snapshot: &Snapshot, inputs: &[Value]) -> Reaction {
    debug_assert_eq!(inputs.len(), component.inputs.len());
    match &component.body {
        Body::Automaton(a) => {
            let state = snapshot.state.expect("automaton snapshot has a state");
            let vars = &snapshot.vars;
            let fired = a
                .transitions
                .iter()
                .position(|t| t.source == state && t.enabled(vars, inputs));
            let mut outputs = vec![Value::Absent; component.outputs.len()];
            let mut next = snapshot.clone();
            if let Some(i) = fired {
                let t = &a.transitions[i];
                for (port, e) in &t.emissions {
                    outputs[*port] = component.outputs[*port].ty.dtype.saturate(e.eval(vars, inputs));
                }
                for (var, e) in &t.updates {
                    next.vars[*var] = a.variables[*var].ty.dtype.saturate(e.eval(vars, inputs));
                }
                next.state = Some(t.target);
            }
            Reaction { outputs, next, fired }
        }
        Body::Function(f) => Reaction {
            outputs: f
                .emissions
                .iter()
                .zip(&component.outputs)
                .map(|(e, p)| p.ty.dtype.saturate(e.eval(&[], inputs)))
                .collect(),
            next: snapshot.clone(),
            fired: None,
        },
        Body::Composite(_) => panic!("step is defined for atomic components only"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_dsl;

    const COUNTER: &str = "model M {
        type Small = Int[0..2]
        component C (weak) {
            in x: Bool
            out y: Small
            automaton {
                state S
                initial S
                var n: Small = 0
                when S -> S [x = true] emit y = n + 1 set n = n + 1
            }
        }
        root C
    }";

    #[test]
    fn saturates_and_stutters() {
        let (m, _) = load_dsl(COUNTER).unwrap();
        let c = m.root_component();
        let mut s = Snapshot::initial(c);
        let mut ys = Vec::new();
        for x in [true, true, true, false] {
            let r = step(c, &s, &[Value::Bool(x)]);
            ys.push(r.outputs[0].clone());
            s = r.next;
        }
        assert_eq!(ys, [Value::Int(1), Value::Int(2), Value::Int(2), Value::Absent]);
        assert_eq!(s.vars, [Value::Int(2)]);
    }
}
