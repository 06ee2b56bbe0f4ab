use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Causality, Component, Endpoint, Model, Value};

use super::step::{step, Snapshot};
use super::trace::{InstanceInfo, Stream, StreamKind, Trace};

/// Where a value observed inside a flattened network comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    RootIn(usize),
    Out { inst: usize, port: usize },
}

/// An atomic instance of the flattened network.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Dotted instance path; the component name for an atomic root.
    pub path: String,
    pub component: usize,
    pub inputs: Vec<Signal>,
}

/// The composition hierarchy over the flattened instances.
#[derive(Debug, Clone)]
pub enum Node {
    Atomic {
        inst: usize,
    },
    Composite {
        component: usize,
        path: String,
        inputs: Vec<Signal>,
        outputs: Vec<Signal>,
        children: Vec<Node>,
    },
}

impl Node {
    fn outputs(&self, model: &Model, instances: &[Instance]) -> Vec<Signal> {
        match self {
            Node::Atomic { inst } => {
                let c = &model.components[instances[*inst].component];
                (0..c.outputs.len()).map(|port| Signal::Out { inst: *inst, port }).collect()
            }
            Node::Composite { outputs, .. } => outputs.clone(),
        }
    }

    fn atomic_instances(&self, acc: &mut Vec<usize>) {
        match self {
            Node::Atomic { inst } => acc.push(*inst),
            Node::Composite { children, .. } => children.iter().for_each(|c| c.atomic_instances(acc)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instantaneous feedback through weakly causal instances: {}", .instances.join(" -> "))]
pub struct CausalityCycle {
    /// Instance paths along the cycle, producer before consumer; the first is repeated last.
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Cycle(#[from] CausalityCycle),
    #[error("slot {slot}: expected {expected} input values, found {found}")]
    Arity { slot: usize, expected: usize, found: usize },
    #[error("slot {slot}: value `{value}` is not admitted by input `{port}`")]
    IllTyped { slot: usize, port: String, value: String },
}

/// A component flattened to atomic instances with a static evaluation order.
#[derive(Debug, Clone)]
pub struct Network<'m> {
    pub model: &'m Model,
    pub root: usize,
    pub instances: Vec<Instance>,
    pub tree: Node,
    /// Instance evaluation order within a slot.
    pub order: Vec<usize>,
}

impl<'m> Network<'m> {
    pub fn build(model: &'m Model, root: usize) -> Result<Network<'m>, CausalityCycle> {
        let mut instances = Vec::new();
        let mut tree = alloc(model, root, String::new(), &mut instances);
        let root_inputs = (0..model.components[root].inputs.len()).map(Signal::RootIn).collect();
        wire(model, &mut tree, root_inputs, &mut instances);
        let order = schedule(model, &instances)?;
        Ok(Network {
            model,
            root,
            instances,
            tree,
            order,
        })
    }

    fn component_of(&self, inst: usize) -> &'m Component {
        &self.model.components[self.instances[inst].component]
    }

    /// Simulate over `inputs.len()` slots. `inputs[t][i]` is the value on root input `i`.
    pub fn run(&self, inputs: &[Vec<Value>]) -> Result<Trace, RunError> {
        let root = &self.model.components[self.root];
        for (slot, row) in inputs.iter().enumerate() {
            if row.len() != root.inputs.len() {
                return Err(RunError::Arity {
                    slot,
                    expected: root.inputs.len(),
                    found: row.len(),
                });
            }
            for (v, p) in row.iter().zip(&root.inputs) {
                if !p.ty.dtype.admits(v) {
                    return Err(RunError::IllTyped {
                        slot,
                        port: p.name.clone(),
                        value: v.to_string(),
                    });
                }
            }
        }

        let n = self.instances.len();
        let mut snaps: Vec<Snapshot> = (0..n).map(|i| Snapshot::initial(self.component_of(i))).collect();
        let mut pending: Vec<Vec<Value>> = (0..n)
            .map(|i| self.component_of(i).outputs.iter().map(|p| p.init.clone()).collect())
            .collect();
        let mut rec = Recording {
            ins: Vec::with_capacity(inputs.len()),
            outs: Vec::with_capacity(inputs.len()),
            snaps: vec![snaps.clone()],
        };
        for row in inputs {
            let mut outs: Vec<Option<Vec<Value>>> = vec![None; n];
            let mut ins: Vec<Vec<Value>> = vec![Vec::new(); n];
            for i in 0..n {
                if self.component_of(i).causality == Causality::Strong {
                    outs[i] = Some(pending[i].clone());
                }
            }
            for &i in &self.order {
                let c = self.component_of(i);
                let read: Vec<Value> = self.instances[i]
                    .inputs
                    .iter()
                    .map(|s| signal_value(*s, row, &outs))
                    .collect();
                let r = step(c, &snaps[i], &read);
                snaps[i] = r.next;
                ins[i] = read;
                match c.causality {
                    Causality::Weak => outs[i] = Some(r.outputs),
                    Causality::Strong => pending[i] = r.outputs,
                }
            }
            rec.ins.push(ins);
            rec.outs.push(outs.into_iter().map(|o| o.expect("every instance evaluated")).collect());
            rec.snaps.push(snaps.clone());
        }
        Ok(self.trace_of(&self.tree, inputs, &rec))
    }

    fn trace_of(&self, node: &Node, root_inputs: &[Vec<Value>], rec: &Recording) -> Trace {
        let horizon = root_inputs.len();
        let mut insts = Vec::new();
        node.atomic_instances(&mut insts);
        let instances = insts
            .iter()
            .map(|&i| {
                let c = self.component_of(i);
                InstanceInfo {
                    path: self.instances[i].path.clone(),
                    component: c.name.clone(),
                    states: c.automaton().map_or_else(Vec::new, |a| a.states.clone()),
                    vars: c.variables().iter().map(|v| v.name.clone()).collect(),
                }
            })
            .collect();
        let snapshots = rec
            .snaps
            .iter()
            .map(|row| insts.iter().map(|&i| row[i].clone()).collect())
            .collect();
        let value = |s: Signal, t: usize| match s {
            Signal::RootIn(i) => root_inputs[t][i].clone(),
            Signal::Out { inst, port } => rec.outs[t][inst][port].clone(),
        };
        match node {
            Node::Atomic { inst } => {
                let c = self.component_of(*inst);
                let streams = ports_as_streams(c);
                let slots = (0..horizon)
                    .map(|t| rec.ins[t][*inst].iter().chain(&rec.outs[t][*inst]).cloned().collect())
                    .collect();
                Trace {
                    model: self.model.name.clone(),
                    component: c.name.clone(),
                    horizon,
                    streams,
                    slots,
                    instances,
                    snapshots,
                    parts: Vec::new(),
                }
            }
            Node::Composite {
                component,
                inputs,
                outputs,
                children,
                ..
            } => {
                let c = &self.model.components[*component];
                let comp = c.composite().expect("composite node");
                let mut streams = ports_as_streams(c);
                let mut signals: Vec<Signal> = inputs.iter().chain(outputs).copied().collect();
                for ch in comp.local_channels() {
                    let channel = &comp.channels[ch];
                    let Endpoint::SubOut { sub, port } = channel.source else {
                        unreachable!("local channels leave a sub output")
                    };
                    streams.push(Stream {
                        name: channel.name.clone(),
                        kind: StreamKind::Local,
                        dtype: channel.ty.dtype.clone(),
                    });
                    signals.push(children[sub].outputs(self.model, &self.instances)[port]);
                }
                let slots = (0..horizon)
                    .map(|t| signals.iter().map(|s| value(*s, t)).collect())
                    .collect();
                Trace {
                    model: self.model.name.clone(),
                    component: c.name.clone(),
                    horizon,
                    streams,
                    slots,
                    instances,
                    snapshots,
                    parts: children
                        .iter()
                        .map(|child| self.trace_of(child, root_inputs, rec))
                        .collect(),
                }
            }
        }
    }
}

struct Recording {
    ins: Vec<Vec<Vec<Value>>>,
    outs: Vec<Vec<Vec<Value>>>,
    snaps: Vec<Vec<Snapshot>>,
}

fn ports_as_streams(c: &Component) -> Vec<Stream> {
    let mk = |kind: StreamKind| {
        move |p: &crate::model::Port| Stream {
            name: p.name.clone(),
            kind,
            dtype: p.ty.dtype.clone(),
        }
    };
    c.inputs
        .iter()
        .map(mk(StreamKind::Input))
        .chain(c.outputs.iter().map(mk(StreamKind::Output)))
        .collect()
}

fn signal_value(s: Signal, row: &[Value], outs: &[Option<Vec<Value>>]) -> Value {
    match s {
        Signal::RootIn(i) => row[i].clone(),
        Signal::Out { inst, port } => outs[inst]
            .as_ref()
            .expect("producer evaluated before consumer")[port]
            .clone(),
    }
}

fn alloc(model: &Model, component: usize, path: String, instances: &mut Vec<Instance>) -> Node {
    let c = &model.components[component];
    let Some(comp) = c.composite() else {
        instances.push(Instance {
            path: if path.is_empty() { c.name.clone() } else { path },
            component,
            inputs: Vec::new(),
        });
        return Node::Atomic {
            inst: instances.len() - 1,
        };
    };
    let children: Vec<Node> = comp
        .subs
        .iter()
        .map(|s| {
            let child = if path.is_empty() {
                s.name.clone()
            } else {
                format!("{path}.{}", s.name)
            };
            alloc(model, s.component, child, instances)
        })
        .collect();
    let outputs = (0..c.outputs.len())
        .map(|q| match comp.feeding(Endpoint::ParentOut(q)).map(|ch| ch.source) {
            Some(Endpoint::SubOut { sub, port }) => children[sub].outputs(model, instances)[port],
            other => unreachable!("parent output fed by {other:?}"),
        })
        .collect();
    Node::Composite {
        component,
        path,
        inputs: Vec::new(),
        outputs,
        children,
    }
}

fn wire(model: &Model, node: &mut Node, inputs: Vec<Signal>, instances: &mut Vec<Instance>) {
    match node {
        Node::Atomic { inst } => instances[*inst].inputs = inputs,
        Node::Composite {
            component,
            inputs: slot,
            children,
            ..
        } => {
            let comp = model.components[*component].composite().expect("composite node");
            let child_inputs: Vec<Vec<Signal>> = comp
                .subs
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    (0..model.components[s.component].inputs.len())
                        .map(|p| match comp.feeding(Endpoint::SubIn { sub: k, port: p }).map(|ch| ch.source) {
                            Some(Endpoint::ParentIn(i)) => inputs[i],
                            Some(Endpoint::SubOut { sub, port }) => {
                                children[sub].outputs(model, instances)[port]
                            }
                            other => unreachable!("sub input fed by {other:?}"),
                        })
                        .collect()
                })
                .collect();
            *slot = inputs;
            for (child, ins) in children.iter_mut().zip(child_inputs) {
                wire(model, child, ins, instances);
            }
        }
    }
}

/// Kahn's algorithm over the instantaneous dependencies, smallest index first.
fn schedule(model: &Model, instances: &[Instance]) -> Result<Vec<usize>, CausalityCycle> {
    let n = instances.len();
    // preds[c] = weakly causal producers feeding c within the same slot
    let preds: Vec<BTreeSet<usize>> = instances
        .iter()
        .map(|inst| {
            inst.inputs
                .iter()
                .filter_map(|s| match s {
                    Signal::Out { inst: p, .. }
                        if model.components[instances[*p].component].causality == Causality::Weak =>
                    {
                        Some(*p)
                    }
                    _ => None,
                })
                .collect()
        })
        .collect();
    let mut indegree: Vec<usize> = preds.iter().map(BTreeSet::len).collect();
    let mut ready: BTreeSet<usize> = (0..n).filter(|i| indegree[*i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for c in 0..n {
            if preds[c].contains(&i) {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every unscheduled instance has an unscheduled producer; walk back until a repeat.
    let done: BTreeSet<usize> = order.iter().copied().collect();
    let mut walk = vec![(0..n).find(|i| !done.contains(i)).expect("unscheduled instance")];
    loop {
        let cur = *walk.last().expect("non-empty walk");
        let prev = *preds[cur]
            .iter()
            .find(|p| !done.contains(p))
            .expect("unscheduled producer");
        if let Some(pos) = walk.iter().position(|w| *w == prev) {
            let mut cycle: Vec<String> = walk[pos..]
                .iter()
                .rev()
                .map(|i| instances[*i].path.clone())
                .collect();
            cycle.push(cycle[0].clone());
            return Err(CausalityCycle { instances: cycle });
        }
        walk.push(prev);
    }
}

/// Simulate `component` of `model` on the given input slots.
pub fn simulate(model: &Model, component: usize, inputs: &[Vec<Value>]) -> Result<Trace, RunError> {
    Network::build(model, component)?.run(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_dsl;

    const PIPE: &str = "model P {
        component Inc (weak) { in x: Int[0..3] out y: Int[0..3] function { y = x + 1 } }
        component Delay (strong) { in x: Int[0..3] out y: Int[0..3] = 0 function { y = x } }
        component Pipe {
            in x: Int[0..3]
            out y: Int[0..3]
            sub d: Delay
            sub i: Inc
            channel c0: Int[0..3] x -> i.x
            channel mid: Int[0..3] i.y -> d.x
            channel c1: Int[0..3] d.y -> y
        }
        component Loop {
            in x: Int[0..3]
            out y: Int[0..3]
            sub a: Inc
            sub b: Inc
            channel c0: Int[0..3] b.y -> a.x
            channel c1: Int[0..3] a.y -> b.x
            channel c2: Int[0..3] a.y -> y
        }
        root Pipe
    }";

    fn ints(xs: &[i64]) -> Vec<Vec<Value>> {
        xs.iter().map(|x| vec![Value::Int(*x)]).collect()
    }

    #[test]
    fn weak_before_strong_and_delay() {
        let (m, _) = load_dsl(PIPE).unwrap();
        let tr = simulate(&m, m.root, &ints(&[0, 1, 2])).unwrap();
        let y: Vec<Value> = (0..3).map(|t| tr.value(t, "y").unwrap().clone()).collect();
        assert_eq!(y, [Value::Int(0), Value::Int(1), Value::Int(2)]);
        let mid: Vec<Value> = (0..3).map(|t| tr.value(t, "mid").unwrap().clone()).collect();
        assert_eq!(mid, [Value::Int(1), Value::Int(2), Value::Int(3)]);
        assert_eq!(tr.parts.len(), 2);
        assert_eq!(tr.parts[0].component, "Delay");
    }

    #[test]
    fn weak_loop_is_a_cycle() {
        let (m, _) = load_dsl(PIPE).unwrap();
        let err = Network::build(&m, m.component("Loop").unwrap()).unwrap_err();
        assert_eq!(err.instances.first(), err.instances.last());
        assert_eq!(err.instances.len(), 3);
    }
}
