use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::raw;
use super::{
    Automaton, Body, Causality, Channel, Component, Composite, DataType, Direction, Endpoint,
    EnumLit, EnumType, Expr, FunctionBehavior, Model, Pattern, Port, SubInstance, Transition,
    TypeDef, TypeUse, Value, Variable, STATE_VAR,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("{location}: unknown reference `{name}`")]
    UnknownReference { location: String, name: String },
    #[error("{location}: duplicate name `{name}`")]
    DuplicateName { location: String, name: String },
    #[error("{location}: `{name}` is reserved")]
    ReservedName { location: String, name: String },
    #[error("{location}: component `{name}` is part of a recursive composition")]
    RecursiveComposition { location: String, name: String },
    #[error("{location}: port `{name}` is the sink of more than one channel")]
    FanIn { location: String, name: String },
    #[error("{location}: port `{name}` is not the sink of any channel")]
    UnconnectedPort { location: String, name: String },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

impl ResolveError {
    pub fn location(&self) -> &str {
        match self {
            ResolveError::UnknownReference { location, .. }
            | ResolveError::DuplicateName { location, .. }
            | ResolveError::ReservedName { location, .. }
            | ResolveError::RecursiveComposition { location, .. }
            | ResolveError::FanIn { location, .. }
            | ResolveError::UnconnectedPort { location, .. }
            | ResolveError::Invalid { location, .. } => location,
        }
    }
}

type Result<T> = std::result::Result<T, ResolveError>;

fn invalid(location: &str, message: impl Into<String>) -> ResolveError {
    ResolveError::Invalid {
        location: location.to_string(),
        message: message.into(),
    }
}

fn unknown(location: &str, name: &str) -> ResolveError {
    ResolveError::UnknownReference {
        location: location.to_string(),
        name: name.to_string(),
    }
}

fn check_unique<'a>(location: &str, names: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(ResolveError::DuplicateName {
                location: location.to_string(),
                name: name.to_string(),
            });
        }
    }
    Ok(())
}

/// Resolve every name reference of a raw model and check its structural invariants.
pub fn resolve(model: &raw::Model) -> Result<Model> {
    Resolver::new(model)?.run()
}

struct Resolver<'m> {
    raw: &'m raw::Model,
    types: BTreeMap<&'m str, DataType>,
    literals: BTreeMap<String, EnumLit>,
}

impl<'m> Resolver<'m> {
    fn new(raw: &'m raw::Model) -> Result<Self> {
        let model_loc = format!("model {}", raw.name);
        check_unique(&model_loc, raw.types.iter().map(|t| t.name.as_str()))?;
        let mut types = BTreeMap::new();
        let mut literals = BTreeMap::new();
        for decl in &raw.types {
            let loc = format!("type {}", decl.name);
            if matches!(decl.name.as_str(), "Bool" | "Int") {
                return Err(ResolveError::ReservedName {
                    location: loc,
                    name: decl.name.clone(),
                });
            }
            let dtype = match &decl.def {
                raw::TypeDef::Int { lo, hi } => {
                    if lo > hi {
                        return Err(invalid(&loc, format!("empty range {lo}..{hi}")));
                    }
                    DataType::Int { lo: *lo, hi: *hi }
                }
                raw::TypeDef::Enum(lits) => {
                    if lits.is_empty() {
                        return Err(invalid(&loc, "enumeration without literals"));
                    }
                    let ty = Arc::new(EnumType::new(decl.name.clone(), lits.clone()));
                    for (index, lit) in lits.iter().enumerate() {
                        if literals
                            .insert(lit.clone(), EnumLit::new(ty.clone(), index))
                            .is_some()
                        {
                            return Err(ResolveError::DuplicateName {
                                location: loc,
                                name: lit.clone(),
                            });
                        }
                    }
                    DataType::Enum(ty)
                }
            };
            types.insert(decl.name.as_str(), dtype);
        }
        Ok(Self {
            raw,
            types,
            literals,
        })
    }

    fn run(self) -> Result<Model> {
        let raw = self.raw;
        check_unique(
            &format!("model {}", raw.name),
            raw.components.iter().map(|c| c.name.as_str()),
        )?;
        let index: BTreeMap<&str, usize> = raw
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.name.as_str(), i))
            .collect();
        let root = *index
            .get(raw.root.as_str())
            .ok_or_else(|| unknown(&format!("model {}", raw.name), &raw.root))?;

        self.check_acyclic(&index)?;

        // Interfaces first: composite bodies refer to sub-component ports.
        let mut components = Vec::with_capacity(raw.components.len());
        for decl in &raw.components {
            components.push(self.interface(decl)?);
        }
        let mut bodies = Vec::with_capacity(raw.components.len());
        for (i, decl) in raw.components.iter().enumerate() {
            bodies.push(self.body(decl, &components[i], &components, &index)?);
        }
        for (component, body) in components.iter_mut().zip(bodies) {
            component.body = body;
        }

        Ok(Model {
            name: raw.name.clone(),
            types: raw
                .types
                .iter()
                .map(|t| TypeDef {
                    name: t.name.clone(),
                    dtype: self.types[t.name.as_str()].clone(),
                })
                .collect(),
            components,
            root,
        })
    }

    fn check_acyclic(&self, index: &BTreeMap<&str, usize>) -> Result<()> {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(
            node: usize,
            raw: &raw::Model,
            index: &BTreeMap<&str, usize>,
            marks: &mut [u8],
        ) -> Result<()> {
            marks[node] = 1;
            if let raw::BodyDecl::Composite(c) = &raw.components[node].body {
                for (inst, comp) in &c.subs {
                    let loc = format!("component {}, sub {}", raw.components[node].name, inst);
                    let child = *index.get(comp.as_str()).ok_or_else(|| unknown(&loc, comp))?;
                    match marks[child] {
                        1 => {
                            return Err(ResolveError::RecursiveComposition {
                                location: loc,
                                name: comp.clone(),
                            })
                        }
                        0 => visit(child, raw, index, marks)?,
                        _ => {}
                    }
                }
            }
            marks[node] = 2;
            Ok(())
        }
        let mut marks = vec![0u8; self.raw.components.len()];
        for node in 0..marks.len() {
            if marks[node] == 0 {
                visit(node, self.raw, index, &mut marks)?;
            }
        }
        Ok(())
    }

    fn type_use(&self, loc: &str, ty: &raw::TypeRef) -> Result<TypeUse> {
        Ok(match ty {
            raw::TypeRef::Bool => TypeUse {
                label: "Bool".into(),
                dtype: DataType::Bool,
            },
            raw::TypeRef::Int { lo, hi } => {
                if lo > hi {
                    return Err(invalid(loc, format!("empty range {lo}..{hi}")));
                }
                TypeUse {
                    label: format!("Int[{lo}..{hi}]"),
                    dtype: DataType::Int { lo: *lo, hi: *hi },
                }
            }
            raw::TypeRef::Named(name) => TypeUse {
                label: name.clone(),
                dtype: self
                    .types
                    .get(name.as_str())
                    .cloned()
                    .ok_or_else(|| unknown(loc, name))?,
            },
        })
    }

    /// Convert a literal that must belong to `dtype` (or be absent when allowed).
    fn value(&self, loc: &str, lit: &raw::Literal, dtype: &DataType, allow_absent: bool) -> Result<Value> {
        let value = match lit {
            raw::Literal::Absent if allow_absent => return Ok(Value::Absent),
            raw::Literal::Absent => return Err(invalid(loc, "an initial value may not be ε")),
            raw::Literal::Bool(b) => Value::Bool(*b),
            raw::Literal::Int(n) => Value::Int(*n),
            raw::Literal::Name(name) => Value::Enum(
                self.literals
                    .get(name)
                    .cloned()
                    .ok_or_else(|| unknown(loc, name))?,
            ),
        };
        if !dtype.contains(&value) {
            return Err(invalid(loc, format!("value `{value}` is not a member of {dtype}")));
        }
        Ok(value)
    }

    fn check_identifier(&self, loc: &str, name: &str) -> Result<()> {
        if name == STATE_VAR {
            return Err(ResolveError::ReservedName {
                location: loc.to_string(),
                name: name.to_string(),
            });
        }
        if self.literals.contains_key(name) {
            return Err(ResolveError::DuplicateName {
                location: loc.to_string(),
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn interface(&self, decl: &raw::ComponentDecl) -> Result<Component> {
        let loc = format!("component {}", decl.name);
        check_unique(&loc, decl.ports.iter().map(|p| p.name.as_str()))?;
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for p in &decl.ports {
            let ploc = format!("{loc}, port {}", p.name);
            self.check_identifier(&ploc, &p.name)?;
            let ty = self.type_use(&ploc, &p.ty)?;
            let init = match &p.init {
                Some(lit) => self.value(&ploc, lit, &ty.dtype, true)?,
                None => Value::Absent,
            };
            let port = Port {
                name: p.name.clone(),
                direction: p.direction,
                ty,
                init,
            };
            match p.direction {
                Direction::In => inputs.push(port),
                Direction::Out => outputs.push(port),
            }
        }
        let atomic = !matches!(decl.body, raw::BodyDecl::Composite(_));
        if atomic && outputs.is_empty() {
            return Err(invalid(&loc, "an atomic component needs at least one output port"));
        }
        Ok(Component {
            name: decl.name.clone(),
            causality: decl.causality.unwrap_or(Causality::Strong),
            inputs,
            outputs,
            body: Body::Composite(Composite {
                subs: Vec::new(),
                channels: Vec::new(),
            }),
        })
    }

    fn body(
        &self,
        decl: &raw::ComponentDecl,
        this: &Component,
        all: &[Component],
        index: &BTreeMap<&str, usize>,
    ) -> Result<Body> {
        let loc = format!("component {}", decl.name);
        match &decl.body {
            raw::BodyDecl::Automaton(a) => self.automaton(&loc, a, this).map(Body::Automaton),
            raw::BodyDecl::Function(emissions) => {
                let scope = Scope {
                    component: this,
                    vars: &[],
                };
                let mut slots: Vec<Option<Expr>> = vec![None; this.outputs.len()];
                for (port, expr) in emissions {
                    let eloc = format!("{loc}, function output {port}");
                    let i = this
                        .outputs
                        .iter()
                        .position(|p| &p.name == port)
                        .ok_or_else(|| unknown(&eloc, port))?;
                    if slots[i].is_some() {
                        return Err(ResolveError::DuplicateName {
                            location: eloc,
                            name: port.clone(),
                        });
                    }
                    slots[i] = Some(self.expr(&eloc, expr, &scope)?);
                }
                let emissions = slots
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        e.ok_or_else(|| {
                            invalid(&loc, format!("output `{}` has no defining equation", this.outputs[i].name))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Body::Function(FunctionBehavior { emissions }))
            }
            raw::BodyDecl::Composite(c) => self.composite(&loc, c, this, all, index).map(Body::Composite),
        }
    }

    fn automaton(&self, loc: &str, a: &raw::AutomatonDecl, this: &Component) -> Result<Automaton> {
        if a.states.is_empty() {
            return Err(invalid(loc, "an automaton needs at least one state"));
        }
        check_unique(loc, a.states.iter().map(|s| s.as_str()))?;
        let state = |name: &str, l: &str| {
            a.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| unknown(l, name))
        };
        let initial = match &a.initial {
            Some(name) => state(name, loc)?,
            None => return Err(invalid(loc, "no initial state declared")),
        };

        check_unique(
            loc,
            this.inputs
                .iter()
                .chain(&this.outputs)
                .map(|p| p.name.as_str())
                .chain(a.variables.iter().map(|v| v.name.as_str())),
        )?;
        let mut variables = Vec::new();
        for v in &a.variables {
            let vloc = format!("{loc}, var {}", v.name);
            self.check_identifier(&vloc, &v.name)?;
            let ty = self.type_use(&vloc, &v.ty)?;
            let init = self.value(&vloc, &v.init, &ty.dtype, false)?;
            variables.push(Variable {
                name: v.name.clone(),
                ty,
                init,
            });
        }

        let scope = Scope {
            component: this,
            vars: &variables,
        };
        let mut transitions = Vec::new();
        for (n, t) in a.transitions.iter().enumerate() {
            let tloc = format!("{loc}, transition {}", n + 1);
            let source = state(&t.from, &tloc)?;
            let target = state(&t.to, &tloc)?;
            check_unique(&tloc, t.patterns.iter().map(|(p, _)| p.as_str()))?;
            check_unique(&tloc, t.emit.iter().map(|(p, _)| p.as_str()))?;
            check_unique(&tloc, t.set.iter().map(|(p, _)| p.as_str()))?;
            let mut patterns = Vec::new();
            for (port, pat) in &t.patterns {
                let i = this
                    .inputs
                    .iter()
                    .position(|p| &p.name == port)
                    .ok_or_else(|| unknown(&tloc, port))?;
                let pattern = match pat {
                    raw::PatternDecl::Any => Pattern::Present,
                    raw::PatternDecl::Lit(raw::Literal::Absent) => Pattern::Absent,
                    raw::PatternDecl::Lit(lit) => {
                        Pattern::Value(self.value(&tloc, lit, &this.inputs[i].ty.dtype, false)?)
                    }
                };
                patterns.push((i, pattern));
            }
            let guard = t
                .guard
                .as_ref()
                .map(|g| self.expr(&tloc, g, &scope))
                .transpose()?;
            let mut emissions = Vec::new();
            for (port, e) in &t.emit {
                let i = this
                    .outputs
                    .iter()
                    .position(|p| &p.name == port)
                    .ok_or_else(|| unknown(&tloc, port))?;
                emissions.push((i, self.expr(&tloc, e, &scope)?));
            }
            let mut updates = Vec::new();
            for (var, e) in &t.set {
                let i = variables
                    .iter()
                    .position(|v| &v.name == var)
                    .ok_or_else(|| unknown(&tloc, var))?;
                updates.push((i, self.expr(&tloc, e, &scope)?));
            }
            transitions.push(Transition {
                source,
                target,
                patterns,
                guard,
                emissions,
                updates,
            });
        }
        Ok(Automaton {
            states: a.states.clone(),
            initial,
            variables,
            transitions,
        })
    }

    fn expr(&self, loc: &str, e: &raw::Expr, scope: &Scope<'_>) -> Result<Expr> {
        Ok(match e {
            raw::Expr::Lit(raw::Literal::Absent) => Expr::Const(Value::Absent),
            raw::Expr::Lit(raw::Literal::Bool(b)) => Expr::Const(Value::Bool(*b)),
            raw::Expr::Lit(raw::Literal::Int(n)) => Expr::Const(Value::Int(*n)),
            raw::Expr::Lit(raw::Literal::Name(name)) => {
                if let Some(i) = scope.vars.iter().position(|v| &v.name == name) {
                    Expr::Var(i)
                } else if let Some(i) = scope.component.inputs.iter().position(|p| &p.name == name) {
                    Expr::Input(i)
                } else if let Some(lit) = self.literals.get(name) {
                    Expr::Const(Value::Enum(lit.clone()))
                } else if scope.component.outputs.iter().any(|p| &p.name == name) {
                    return Err(invalid(loc, format!("output port `{name}` cannot be read")));
                } else {
                    return Err(unknown(loc, name));
                }
            }
            raw::Expr::Not(inner) => Expr::Not(Box::new(self.expr(loc, inner, scope)?)),
            raw::Expr::Binary(op, l, r) => Expr::Binary(
                *op,
                Box::new(self.expr(loc, l, scope)?),
                Box::new(self.expr(loc, r, scope)?),
            ),
        })
    }

    fn composite(
        &self,
        loc: &str,
        c: &raw::CompositeDecl,
        this: &Component,
        all: &[Component],
        index: &BTreeMap<&str, usize>,
    ) -> Result<Composite> {
        check_unique(loc, c.subs.iter().map(|(i, _)| i.as_str()))?;
        check_unique(loc, c.channels.iter().map(|ch| ch.name.as_str()))?;
        let subs: Vec<SubInstance> = c
            .subs
            .iter()
            .map(|(inst, comp)| SubInstance {
                name: inst.clone(),
                component: index[comp.as_str()],
            })
            .collect();

        let mut channels = Vec::new();
        for ch in &c.channels {
            let cloc = format!("{loc}, channel {}", ch.name);
            let ty = self.type_use(&cloc, &ch.ty)?;
            let source = endpoint(&cloc, &ch.from, this, &subs, all)?;
            let sink = endpoint(&cloc, &ch.to, this, &subs, all)?;
            if !source.is_producer() {
                return Err(invalid(&cloc, format!("`{}` cannot produce messages", show(&ch.from))));
            }
            if sink.is_producer() {
                return Err(invalid(&cloc, format!("`{}` cannot consume messages", show(&ch.to))));
            }
            if matches!(source, Endpoint::ParentIn(_)) && matches!(sink, Endpoint::ParentOut(_)) {
                return Err(invalid(&cloc, "a channel must touch at least one subcomponent"));
            }
            for (ep, raw_ep) in [(source, &ch.from), (sink, &ch.to)] {
                let port_ty = &endpoint_port(ep, this, &subs, all).ty.dtype;
                if *port_ty != ty.dtype {
                    return Err(invalid(
                        &cloc,
                        format!("channel type {} differs from port `{}` of type {}", ty.dtype, show(raw_ep), port_ty),
                    ));
                }
            }
            let local = matches!(source, Endpoint::SubOut { .. }) && matches!(sink, Endpoint::SubIn { .. });
            if local && this.inputs.iter().chain(&this.outputs).any(|p| p.name == ch.name) {
                return Err(ResolveError::DuplicateName {
                    location: cloc,
                    name: ch.name.clone(),
                });
            }
            channels.push(Channel {
                name: ch.name.clone(),
                ty,
                source,
                sink,
            });
        }

        // Every consumer is fed by exactly one channel.
        let mut fed: BTreeMap<Endpoint, usize> = BTreeMap::new();
        for ch in &channels {
            *fed.entry(ch.sink).or_default() += 1;
        }
        let mut consumers: Vec<(Endpoint, String)> = (0..this.outputs.len())
            .map(|p| (Endpoint::ParentOut(p), this.outputs[p].name.clone()))
            .collect();
        for (s, sub) in subs.iter().enumerate() {
            for (p, port) in all[sub.component].inputs.iter().enumerate() {
                consumers.push((Endpoint::SubIn { sub: s, port: p }, format!("{}.{}", sub.name, port.name)));
            }
        }
        for (ep, name) in consumers {
            match fed.get(&ep).copied().unwrap_or(0) {
                0 => {
                    return Err(ResolveError::UnconnectedPort {
                        location: loc.to_string(),
                        name,
                    })
                }
                1 => {}
                _ => {
                    return Err(ResolveError::FanIn {
                        location: loc.to_string(),
                        name,
                    })
                }
            }
        }
        for (s, sub) in subs.iter().enumerate() {
            for (p, port) in all[sub.component].outputs.iter().enumerate() {
                let source = Endpoint::SubOut { sub: s, port: p };
                if !channels.iter().any(|ch| ch.source == source) {
                    return Err(invalid(loc, format!("output `{}.{}` is not connected", sub.name, port.name)));
                }
            }
        }
        Ok(Composite { subs, channels })
    }
}

struct Scope<'a> {
    component: &'a Component,
    vars: &'a [Variable],
}

fn show(ep: &raw::EndpointRef) -> String {
    match &ep.instance {
        Some(i) => format!("{i}.{}", ep.port),
        None => ep.port.clone(),
    }
}

fn endpoint(
    loc: &str,
    ep: &raw::EndpointRef,
    this: &Component,
    subs: &[SubInstance],
    all: &[Component],
) -> Result<Endpoint> {
    let find = |c: &Component| -> Option<(Direction, usize)> {
        c.inputs
            .iter()
            .position(|p| p.name == ep.port)
            .map(|i| (Direction::In, i))
            .or_else(|| c.outputs.iter().position(|p| p.name == ep.port).map(|i| (Direction::Out, i)))
    };
    match &ep.instance {
        None => match find(this) {
            Some((Direction::In, i)) => Ok(Endpoint::ParentIn(i)),
            Some((Direction::Out, i)) => Ok(Endpoint::ParentOut(i)),
            None => Err(unknown(loc, &ep.port)),
        },
        Some(inst) => {
            let sub = subs
                .iter()
                .position(|s| &s.name == inst)
                .ok_or_else(|| unknown(loc, inst))?;
            match find(&all[subs[sub].component]) {
                Some((Direction::In, port)) => Ok(Endpoint::SubIn { sub, port }),
                Some((Direction::Out, port)) => Ok(Endpoint::SubOut { sub, port }),
                None => Err(unknown(loc, &show(ep))),
            }
        }
    }
}

fn endpoint_port<'a>(ep: Endpoint, this: &'a Component, subs: &[SubInstance], all: &'a [Component]) -> &'a Port {
    match ep {
        Endpoint::ParentIn(p) => &this.inputs[p],
        Endpoint::ParentOut(p) => &this.outputs[p],
        Endpoint::SubIn { sub, port } => &all[subs[sub].component].inputs[port],
        Endpoint::SubOut { sub, port } => &all[subs[sub].component].outputs[port],
    }
}
