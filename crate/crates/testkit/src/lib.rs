//! Seeded generator of random well-formed models within the finiteness caps,
//! for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use focusgen::model::raw::*;
use focusgen::model::{BinOp, Causality, Direction, Value};

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_states: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Largest carrier size of a generated type (ε not counted).
    pub max_carrier: usize,
    pub max_transitions: usize,
    pub max_components: usize,
    /// Probability of wrapping the atomic components in a composite root.
    pub composite: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_states: 4,
            max_inputs: 2,
            max_outputs: 2,
            max_carrier: 3,
            max_transitions: 5,
            max_components: 3,
            composite: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Carrier {
    Bool,
    Int(i64, i64),
    /// Declared integer alias.
    IntAlias(String, i64, i64),
    Enum(String, Vec<String>),
}

impl Carrier {
    fn type_ref(&self) -> TypeRef {
        match self {
            Carrier::Bool => TypeRef::Bool,
            Carrier::Int(lo, hi) => TypeRef::Int { lo: *lo, hi: *hi },
            Carrier::IntAlias(n, ..) | Carrier::Enum(n, _) => TypeRef::Named(n.clone()),
        }
    }

    fn kind(&self) -> Kind {
        match self {
            Carrier::Bool => Kind::Bool,
            Carrier::Int(..) | Carrier::IntAlias(..) => Kind::Int,
            Carrier::Enum(n, _) => Kind::Enum(n.clone()),
        }
    }

    fn literal(&self, rng: &mut impl Rng) -> Literal {
        match self {
            Carrier::Bool => Literal::Bool(rng.gen()),
            Carrier::Int(lo, hi) | Carrier::IntAlias(_, lo, hi) => Literal::Int(rng.gen_range(*lo..=*hi)),
            Carrier::Enum(_, lits) => Literal::Name(lits.choose(rng).expect("non-empty").clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Bool,
    Int,
    Enum(String),
}

struct Scope<'a> {
    /// Readable names with their carriers: inputs then variables.
    readable: Vec<(&'a str, &'a Carrier)>,
    types: &'a [Carrier],
}

struct Gen<'c, R> {
    rng: R,
    cfg: &'c GenConfig,
}

impl<R: Rng> Gen<'_, R> {
    fn types(&mut self) -> Vec<Carrier> {
        let mut out = Vec::new();
        for k in 0..self.rng.gen_range(0..=2) {
            let size = self.rng.gen_range(1..=self.cfg.max_carrier.max(1));
            let lits = (0..size).map(|j| format!("k{k}{}", (b'a' + j as u8) as char)).collect();
            out.push(Carrier::Enum(format!("E{k}"), lits));
        }
        if self.rng.gen_bool(0.5) {
            let lo = self.rng.gen_range(-1..=1);
            let width = self.rng.gen_range(0..self.cfg.max_carrier.max(1) as i64);
            out.push(Carrier::IntAlias("N0".into(), lo, lo + width));
        }
        out
    }

    fn carrier(&mut self, types: &[Carrier]) -> Carrier {
        match self.rng.gen_range(0..4) {
            0 => Carrier::Bool,
            1 => {
                let lo = self.rng.gen_range(-1..=1);
                let width = self.rng.gen_range(0..self.cfg.max_carrier.max(1) as i64);
                Carrier::Int(lo, lo + width)
            }
            _ => types.choose(&mut self.rng).cloned().unwrap_or(Carrier::Bool),
        }
    }

    fn expr(&mut self, kind: &Kind, scope: &Scope<'_>, depth: u32) -> Expr {
        let names: Vec<&str> = scope
            .readable
            .iter()
            .filter(|(_, c)| c.kind() == *kind)
            .map(|(n, _)| *n)
            .collect();
        let leaf = depth == 0 || self.rng.gen_bool(0.4);
        if leaf {
            if !names.is_empty() && self.rng.gen_bool(0.6) {
                return Expr::name(*names.choose(&mut self.rng).expect("non-empty"));
            }
            return Expr::Lit(match kind {
                Kind::Bool => Literal::Bool(self.rng.gen()),
                Kind::Int => Literal::Int(self.rng.gen_range(-1..=2)),
                Kind::Enum(n) => {
                    let Some(Carrier::Enum(_, lits)) = scope.types.iter().find(|t| matches!(t, Carrier::Enum(m, _) if m == n))
                    else {
                        unreachable!("enum kinds come from declared types")
                    };
                    Literal::Name(lits.choose(&mut self.rng).expect("non-empty").clone())
                }
            });
        }
        let d = depth - 1;
        match kind {
            Kind::Int => {
                let op = if self.rng.gen() { BinOp::Add } else { BinOp::Sub };
                Expr::binary(op, self.expr(kind, scope, d), self.expr(kind, scope, d))
            }
            Kind::Enum(_) => self.expr(kind, scope, 0),
            Kind::Bool => match self.rng.gen_range(0..5) {
                0 => Expr::Not(Box::new(self.expr(kind, scope, d))),
                1 => {
                    let op = if self.rng.gen() { BinOp::And } else { BinOp::Or };
                    Expr::binary(op, self.expr(kind, scope, d), self.expr(kind, scope, d))
                }
                2 => {
                    let op = if self.rng.gen() { BinOp::Lt } else { BinOp::Le };
                    Expr::binary(op, self.expr(&Kind::Int, scope, d), self.expr(&Kind::Int, scope, d))
                }
                _ => {
                    let operand = match scope.readable.choose(&mut self.rng) {
                        Some((_, c)) => c.kind(),
                        None => Kind::Bool,
                    };
                    let op = if self.rng.gen() { BinOp::Eq } else { BinOp::Ne };
                    Expr::binary(op, self.expr(&operand, scope, d), self.expr(&operand, scope, d))
                }
            },
        }
    }

    fn component(&mut self, name: String, types: &[Carrier]) -> (ComponentDecl, Vec<Carrier>, Vec<Carrier>) {
        let causality = *[Some(Causality::Weak), Some(Causality::Strong), None]
            .choose(&mut self.rng)
            .expect("non-empty");
        let strong = causality != Some(Causality::Weak);
        let inputs: Vec<Carrier> = (0..self.rng.gen_range(0..=self.cfg.max_inputs))
            .map(|_| self.carrier(types))
            .collect();
        let outputs: Vec<Carrier> = (0..self.rng.gen_range(1..=self.cfg.max_outputs.max(1)))
            .map(|_| self.carrier(types))
            .collect();
        let mut ports = Vec::new();
        for (i, c) in inputs.iter().enumerate() {
            ports.push(PortDecl {
                name: format!("x{i}"),
                direction: Direction::In,
                ty: c.type_ref(),
                init: None,
            });
        }
        for (i, c) in outputs.iter().enumerate() {
            let init = (strong && self.rng.gen_bool(0.7)).then(|| c.literal(&mut self.rng));
            ports.push(PortDecl {
                name: format!("y{i}"),
                direction: Direction::Out,
                ty: c.type_ref(),
                init,
            });
        }
        let in_names: Vec<String> = (0..inputs.len()).map(|i| format!("x{i}")).collect();
        let body = if self.rng.gen_bool(0.25) {
            let scope = Scope {
                readable: in_names.iter().map(String::as_str).zip(&inputs).collect(),
                types,
            };
            BodyDecl::Function(
                outputs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (format!("y{i}"), self.expr(&c.kind(), &scope, 2)))
                    .collect(),
            )
        } else {
            BodyDecl::Automaton(self.automaton(&inputs, &in_names, &outputs, types))
        };
        (
            ComponentDecl {
                name,
                causality,
                ports,
                body,
            },
            inputs,
            outputs,
        )
    }

    fn automaton(&mut self, inputs: &[Carrier], in_names: &[String], outputs: &[Carrier], types: &[Carrier]) -> AutomatonDecl {
        let states: Vec<String> = (0..self.rng.gen_range(1..=self.cfg.max_states.max(1)))
            .map(|i| format!("S{i}"))
            .collect();
        let var_carriers: Vec<Carrier> = (0..self.rng.gen_range(0..=1)).map(|_| self.carrier(types)).collect();
        let variables: Vec<VarDecl> = var_carriers
            .iter()
            .enumerate()
            .map(|(i, c)| VarDecl {
                name: format!("v{i}"),
                ty: c.type_ref(),
                init: c.literal(&mut self.rng),
            })
            .collect();
        let var_names: Vec<String> = (0..variables.len()).map(|i| format!("v{i}")).collect();
        let scope = Scope {
            readable: in_names
                .iter()
                .map(String::as_str)
                .zip(inputs)
                .chain(var_names.iter().map(String::as_str).zip(&var_carriers))
                .collect(),
            types,
        };
        let mut transitions = Vec::new();
        for _ in 0..self.rng.gen_range(1..=self.cfg.max_transitions.max(1)) {
            let from = states.choose(&mut self.rng).expect("non-empty").clone();
            let to = states.choose(&mut self.rng).expect("non-empty").clone();
            let mut patterns = Vec::new();
            for (i, c) in inputs.iter().enumerate() {
                let pat = match self.rng.gen_range(0..6) {
                    0 => continue,
                    1 => PatternDecl::Any,
                    2 => PatternDecl::Lit(Literal::Absent),
                    _ => PatternDecl::Lit(c.literal(&mut self.rng)),
                };
                patterns.push((in_names[i].clone(), pat));
            }
            let guard = self.rng.gen_bool(0.3).then(|| self.expr(&Kind::Bool, &scope, 2));
            let mut emit = Vec::new();
            for (i, c) in outputs.iter().enumerate() {
                if self.rng.gen_bool(0.6) {
                    emit.push((format!("y{i}"), self.expr(&c.kind(), &scope, 2)));
                }
            }
            let mut set = Vec::new();
            for (i, c) in var_carriers.iter().enumerate() {
                if self.rng.gen_bool(0.5) {
                    set.push((format!("v{i}"), self.expr(&c.kind(), &scope, 2)));
                }
            }
            transitions.push(TransitionDecl {
                from,
                to,
                patterns,
                guard,
                emit,
                set,
            });
        }
        AutomatonDecl {
            initial: Some(states.choose(&mut self.rng).expect("non-empty").clone()),
            states,
            variables,
            transitions,
        }
    }

    /// A feed-forward composite over instances of the given atomic components.
    fn composite(&mut self, atoms: &[(ComponentDecl, Vec<Carrier>, Vec<Carrier>)]) -> ComponentDecl {
        let count = self.rng.gen_range(1..=2.min(atoms.len()).max(1));
        let chosen: Vec<usize> = (0..count).map(|_| self.rng.gen_range(0..atoms.len())).collect();
        let mut ports = Vec::new();
        let mut channels = Vec::new();
        let mut produced: Vec<(String, Carrier, bool)> = Vec::new();
        let mut subs = Vec::new();
        for (s, &a) in chosen.iter().enumerate() {
            let (decl, ins, outs) = &atoms[a];
            let inst = format!("s{s}");
            for (i, c) in ins.iter().enumerate() {
                let candidates: Vec<usize> = (0..produced.len()).filter(|k| produced[*k].1 == *c).collect();
                let from = match candidates.choose(&mut self.rng) {
                    Some(&k) if self.rng.gen_bool(0.7) => {
                        produced[k].2 = true;
                        produced[k].0.clone()
                    }
                    _ => {
                        let name = format!("p{}", ports.len());
                        ports.push(PortDecl {
                            name: name.clone(),
                            direction: Direction::In,
                            ty: c.type_ref(),
                            init: None,
                        });
                        name
                    }
                };
                let (instance, port) = match from.split_once('.') {
                    Some((i, p)) => (Some(i.to_string()), p.to_string()),
                    None => (None, from),
                };
                channels.push(ChannelDecl {
                    name: format!("c{}", channels.len()),
                    ty: c.type_ref(),
                    from: EndpointRef { instance, port },
                    to: EndpointRef {
                        instance: Some(inst.clone()),
                        port: format!("x{i}"),
                    },
                });
            }
            for (o, c) in outs.iter().enumerate() {
                produced.push((format!("{inst}.y{o}"), c.clone(), false));
            }
            subs.push((inst, decl.name.clone()));
        }
        for (k, (source, c, used)) in produced.into_iter().enumerate() {
            if used && self.rng.gen_bool(0.5) {
                continue;
            }
            let name = format!("q{k}");
            ports.push(PortDecl {
                name: name.clone(),
                direction: Direction::Out,
                ty: c.type_ref(),
                init: None,
            });
            let (inst, port) = source.split_once('.').expect("sub output");
            channels.push(ChannelDecl {
                name: format!("c{}", channels.len()),
                ty: c.type_ref(),
                from: EndpointRef {
                    instance: Some(inst.to_string()),
                    port: port.to_string(),
                },
                to: EndpointRef {
                    instance: None,
                    port: name,
                },
            });
        }
        ComponentDecl {
            name: "Top".into(),
            causality: Some(Causality::Weak),
            ports,
            body: BodyDecl::Composite(CompositeDecl { subs, channels }),
        }
    }
}

/// A random model that resolves; callers filter on validation as needed.
pub fn random_model(rng: &mut impl Rng, cfg: &GenConfig) -> Model {
    let mut g = Gen { rng, cfg };
    let carriers = g.types();
    let types = carriers
        .iter()
        .filter_map(|c| match c {
            Carrier::Enum(n, lits) => Some(TypeDecl {
                name: n.clone(),
                def: TypeDef::Enum(lits.clone()),
            }),
            Carrier::IntAlias(n, lo, hi) => Some(TypeDecl {
                name: n.clone(),
                def: TypeDef::Int { lo: *lo, hi: *hi },
            }),
            _ => None,
        })
        .collect();
    let n = g.rng.gen_range(1..=cfg.max_components.max(1));
    let atoms: Vec<_> = (0..n).map(|i| g.component(format!("C{i}"), &carriers)).collect();
    let mut components: Vec<ComponentDecl> = atoms.iter().map(|(d, ..)| d.clone()).collect();
    let root = if g.rng.gen_bool(cfg.composite) {
        components.push(g.composite(&atoms));
        "Top".to_string()
    } else {
        components.last().expect("non-empty").name.clone()
    };
    Model {
        name: "Generated".into(),
        types,
        components,
        root,
    }
}

/// `random_model` with a ChaCha stream seeded by `seed`.
pub fn seeded_model(seed: u64, cfg: &GenConfig) -> Model {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), cfg)
}

/// Random input slots (ε included) for `component` over `horizon` slots.
pub fn random_inputs(rng: &mut impl Rng, component: &focusgen::model::Component, horizon: usize) -> Vec<Vec<Value>> {
    (0..horizon)
        .map(|_| {
            component
                .inputs
                .iter()
                .map(|p| {
                    let mut carrier = p.ty.dtype.carrier();
                    carrier.insert(0, Value::Absent);
                    carrier.choose(rng).expect("non-empty").clone()
                })
                .collect()
        })
        .collect()
}
