//! Resolved component-network models.
//!
//! A [`Model`] is produced by [`resolve`] from a [`raw::Model`]. All name
//! references are replaced by indices, every literal is a typed [`Value`],
//! and the structural invariants (unique names, channel endpoints, acyclic
//! composition, no fan-in) hold. Models are immutable after resolution.

pub mod raw;
mod resolve;
mod value;

use std::fmt;

pub use resolve::{resolve, ResolveError};
pub use value::{not, BinOp, DataType, EnumLit, EnumType, Value};

/// Name of the state variable introduced by lowering; reserved in user models.
pub const STATE_VAR: &str = "st";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Causality {
    Weak,
    Strong,
}

impl fmt::Display for Causality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Causality::Weak => "weak",
            Causality::Strong => "strong",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub types: Vec<TypeDef>,
    pub components: Vec<Component>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub dtype: DataType,
}

/// A type as written at a use site: the label keeps named aliases for documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeUse {
    pub label: String,
    pub dtype: DataType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub ty: TypeUse,
    /// Initial value; only observable on outputs of strongly causal components.
    pub init: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub ty: TypeUse,
    pub init: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(Value),
    Var(usize),
    Input(usize),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluate against the current variable and input valuations.
    pub fn eval(&self, vars: &[Value], inputs: &[Value]) -> Value {
        match self {
            Expr::Const(v) => v.clone(),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Input(i) => inputs[*i].clone(),
            Expr::Not(e) => not(&e.eval(vars, inputs)),
            Expr::Binary(op, l, r) => op.apply(&l.eval(vars, inputs), &r.eval(vars, inputs)),
        }
    }

    pub fn reads_inputs(&self) -> bool {
        match self {
            Expr::Input(_) => true,
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Not(e) => e.reads_inputs(),
            Expr::Binary(_, l, r) => l.reads_inputs() || r.reads_inputs(),
        }
    }

    pub fn reads_vars(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Const(_) | Expr::Input(_) => false,
            Expr::Not(e) => e.reads_vars(),
            Expr::Binary(_, l, r) => l.reads_vars() || r.reads_vars(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// The slot carries exactly this (non-absent) value.
    Value(Value),
    /// Some message is present.
    Present,
    /// The slot is empty.
    Absent,
}

impl Pattern {
    pub fn matches(&self, value: &Value) -> bool {
        match self {
            Pattern::Value(v) => v == value,
            Pattern::Present => !value.is_absent(),
            Pattern::Absent => value.is_absent(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    /// `(input index, pattern)` in declaration order.
    pub patterns: Vec<(usize, Pattern)>,
    pub guard: Option<Expr>,
    /// `(output index, expression)` in declaration order.
    pub emissions: Vec<(usize, Expr)>,
    /// `(variable index, expression)` in declaration order.
    pub updates: Vec<(usize, Expr)>,
}

impl Transition {
    /// Whether the transition is enabled from its source state.
    pub fn enabled(&self, vars: &[Value], inputs: &[Value]) -> bool {
        self.patterns.iter().all(|(i, p)| p.matches(&inputs[*i]))
            && self
                .guard
                .as_ref()
                .is_none_or(|g| g.eval(vars, inputs).is_true())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub states: Vec<String>,
    pub initial: usize,
    pub variables: Vec<Variable>,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionBehavior {
    /// One expression per output port, in output order.
    pub emissions: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubInstance {
    pub name: String,
    pub component: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    ParentIn(usize),
    ParentOut(usize),
    SubIn { sub: usize, port: usize },
    SubOut { sub: usize, port: usize },
}

impl Endpoint {
    pub fn is_producer(&self) -> bool {
        matches!(self, Endpoint::ParentIn(_) | Endpoint::SubOut { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub name: String,
    pub ty: TypeUse,
    pub source: Endpoint,
    pub sink: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite {
    pub subs: Vec<SubInstance>,
    pub channels: Vec<Channel>,
}

impl Composite {
    /// Name of the stream leaving `source` inside `parent`. A sub output that
    /// feeds a parent output carries that port's name; otherwise the first
    /// channel leaving it names the stream.
    pub fn source_name(&self, parent: &Component, source: Endpoint) -> Option<String> {
        if let Endpoint::ParentIn(p) = source {
            return Some(parent.inputs[p].name.clone());
        }
        let leaving = || self.channels.iter().filter(move |ch| ch.source == source);
        leaving()
            .find_map(|ch| match ch.sink {
                Endpoint::ParentOut(q) => Some(parent.outputs[q].name.clone()),
                _ => None,
            })
            .or_else(|| leaving().next().map(|ch| ch.name.clone()))
    }

    /// Channels that introduce an internal stream, in declaration order.
    pub fn local_channels(&self) -> Vec<usize> {
        (0..self.channels.len())
            .filter(|&i| {
                let ch = &self.channels[i];
                matches!(ch.source, Endpoint::SubOut { .. })
                    && !self.channels.iter().any(|o| {
                        o.source == ch.source && matches!(o.sink, Endpoint::ParentOut(_))
                    })
                    && self.channels[..i].iter().all(|o| o.source != ch.source)
            })
            .collect()
    }

    /// The channel feeding a consumer endpoint.
    pub fn feeding(&self, sink: Endpoint) -> Option<&Channel> {
        self.channels.iter().find(|ch| ch.sink == sink)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Automaton(Automaton),
    Function(FunctionBehavior),
    Composite(Composite),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub causality: Causality,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    pub body: Body,
}

impl Component {
    pub fn is_atomic(&self) -> bool {
        !matches!(self.body, Body::Composite(_))
    }

    pub fn automaton(&self) -> Option<&Automaton> {
        match &self.body {
            Body::Automaton(a) => Some(a),
            _ => None,
        }
    }

    pub fn composite(&self) -> Option<&Composite> {
        match &self.body {
            Body::Composite(c) => Some(c),
            _ => None,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        self.automaton().map_or(&[], |a| &a.variables)
    }

    pub fn port(&self, direction: Direction, index: usize) -> &Port {
        match direction {
            Direction::In => &self.inputs[index],
            Direction::Out => &self.outputs[index],
        }
    }
}

impl Model {
    pub fn component(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    pub fn root_component(&self) -> &Component {
        &self.components[self.root]
    }

    /// Convert back to the unresolved form. `resolve(&m.to_raw())` yields `m` again.
    pub fn to_raw(&self) -> raw::Model {
        raw::Model {
            name: self.name.clone(),
            types: self
                .types
                .iter()
                .map(|t| raw::TypeDecl {
                    name: t.name.clone(),
                    def: match &t.dtype {
                        DataType::Int { lo, hi } => raw::TypeDef::Int { lo: *lo, hi: *hi },
                        DataType::Enum(e) => raw::TypeDef::Enum(e.literals.clone()),
                        DataType::Bool => unreachable!("Bool is built in"),
                    },
                })
                .collect(),
            components: self.components.iter().map(|c| self.component_to_raw(c)).collect(),
            root: self.components[self.root].name.clone(),
        }
    }

    fn component_to_raw(&self, c: &Component) -> raw::ComponentDecl {
        let port = |p: &Port| raw::PortDecl {
            name: p.name.clone(),
            direction: p.direction,
            ty: type_ref(&p.ty),
            init: (!p.init.is_absent()).then(|| literal(&p.init)),
        };
        let ports = c.inputs.iter().chain(&c.outputs).map(port).collect();
        let body = match &c.body {
            Body::Automaton(a) => raw::BodyDecl::Automaton(raw::AutomatonDecl {
                states: a.states.clone(),
                initial: Some(a.states[a.initial].clone()),
                variables: a
                    .variables
                    .iter()
                    .map(|v| raw::VarDecl {
                        name: v.name.clone(),
                        ty: type_ref(&v.ty),
                        init: literal(&v.init),
                    })
                    .collect(),
                transitions: a
                    .transitions
                    .iter()
                    .map(|t| raw::TransitionDecl {
                        from: a.states[t.source].clone(),
                        to: a.states[t.target].clone(),
                        patterns: t
                            .patterns
                            .iter()
                            .map(|(i, p)| {
                                let decl = match p {
                                    Pattern::Value(v) => raw::PatternDecl::Lit(literal(v)),
                                    Pattern::Present => raw::PatternDecl::Any,
                                    Pattern::Absent => raw::PatternDecl::Lit(raw::Literal::Absent),
                                };
                                (c.inputs[*i].name.clone(), decl)
                            })
                            .collect(),
                        guard: t.guard.as_ref().map(|g| expr_to_raw(g, c)),
                        emit: t
                            .emissions
                            .iter()
                            .map(|(i, e)| (c.outputs[*i].name.clone(), expr_to_raw(e, c)))
                            .collect(),
                        set: t
                            .updates
                            .iter()
                            .map(|(i, e)| (a.variables[*i].name.clone(), expr_to_raw(e, c)))
                            .collect(),
                    })
                    .collect(),
            }),
            Body::Function(f) => raw::BodyDecl::Function(
                f.emissions
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (c.outputs[i].name.clone(), expr_to_raw(e, c)))
                    .collect(),
            ),
            Body::Composite(comp) => raw::BodyDecl::Composite(raw::CompositeDecl {
                subs: comp
                    .subs
                    .iter()
                    .map(|s| (s.name.clone(), self.components[s.component].name.clone()))
                    .collect(),
                channels: comp
                    .channels
                    .iter()
                    .map(|ch| raw::ChannelDecl {
                        name: ch.name.clone(),
                        ty: type_ref(&ch.ty),
                        from: self.endpoint_to_raw(c, comp, ch.source),
                        to: self.endpoint_to_raw(c, comp, ch.sink),
                    })
                    .collect(),
            }),
        };
        raw::ComponentDecl {
            name: c.name.clone(),
            causality: Some(c.causality),
            ports,
            body,
        }
    }

    fn endpoint_to_raw(&self, parent: &Component, comp: &Composite, ep: Endpoint) -> raw::EndpointRef {
        match ep {
            Endpoint::ParentIn(p) => raw::EndpointRef {
                instance: None,
                port: parent.inputs[p].name.clone(),
            },
            Endpoint::ParentOut(p) => raw::EndpointRef {
                instance: None,
                port: parent.outputs[p].name.clone(),
            },
            Endpoint::SubIn { sub, port } | Endpoint::SubOut { sub, port } => {
                let inst = &comp.subs[sub];
                let dir = if matches!(ep, Endpoint::SubIn { .. }) {
                    Direction::In
                } else {
                    Direction::Out
                };
                raw::EndpointRef {
                    instance: Some(inst.name.clone()),
                    port: self.components[inst.component].port(dir, port).name.clone(),
                }
            }
        }
    }
}

fn type_ref(ty: &TypeUse) -> raw::TypeRef {
    match (&ty.dtype, ty.label.as_str()) {
        (DataType::Bool, "Bool") => raw::TypeRef::Bool,
        (DataType::Int { lo, hi }, label) if label.starts_with("Int[") => {
            raw::TypeRef::Int { lo: *lo, hi: *hi }
        }
        (_, label) => raw::TypeRef::Named(label.to_string()),
    }
}

fn literal(v: &Value) -> raw::Literal {
    match v {
        Value::Absent => raw::Literal::Absent,
        Value::Bool(b) => raw::Literal::Bool(*b),
        Value::Int(n) => raw::Literal::Int(*n),
        Value::Enum(lit) => raw::Literal::Name(lit.name().to_string()),
    }
}

fn expr_to_raw(e: &Expr, c: &Component) -> raw::Expr {
    match e {
        Expr::Const(v) => raw::Expr::Lit(literal(v)),
        Expr::Var(i) => raw::Expr::name(c.variables()[*i].name.clone()),
        Expr::Input(i) => raw::Expr::name(c.inputs[*i].name.clone()),
        Expr::Not(inner) => raw::Expr::Not(Box::new(expr_to_raw(inner, c))),
        Expr::Binary(op, l, r) => raw::Expr::binary(*op, expr_to_raw(l, c), expr_to_raw(r, c)),
    }
}
