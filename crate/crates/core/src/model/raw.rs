//! Unresolved models as produced by the frontends.
//!
//! Names are plain strings and nothing has been checked beyond syntax.
//! Every list keeps source order; that order is the tie-break used by
//! emission and simulation once the model is resolved.

use super::value::BinOp;
use super::{Causality, Direction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub types: Vec<TypeDecl>,
    pub components: Vec<ComponentDecl>,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub def: TypeDef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeDef {
    Int { lo: i64, hi: i64 },
    Enum(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Bool,
    Int { lo: i64, hi: i64 },
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Absent,
    Bool(bool),
    Int(i64),
    /// An identifier: an enumeration literal, port or variable, decided at resolve time.
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Literal),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn name(name: impl Into<String>) -> Self {
        Expr::Lit(Literal::Name(name.into()))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecl {
    pub name: String,
    /// `None` when unannotated; resolves to strong causality.
    pub causality: Option<Causality>,
    pub ports: Vec<PortDecl>,
    pub body: BodyDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub direction: Direction,
    pub ty: TypeRef,
    pub init: Option<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: TypeRef,
    pub init: Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyDecl {
    Automaton(AutomatonDecl),
    Function(Vec<(String, Expr)>),
    Composite(CompositeDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AutomatonDecl {
    pub states: Vec<String>,
    pub initial: Option<String>,
    pub variables: Vec<VarDecl>,
    pub transitions: Vec<TransitionDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternDecl {
    /// `*`: a message must be present, any value.
    Any,
    /// A literal; `Literal::Absent` demands the empty slot.
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDecl {
    pub from: String,
    pub to: String,
    pub patterns: Vec<(String, PatternDecl)>,
    pub guard: Option<Expr>,
    pub emit: Vec<(String, Expr)>,
    pub set: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompositeDecl {
    /// `(instance, component)` pairs.
    pub subs: Vec<(String, String)>,
    pub channels: Vec<ChannelDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointRef {
    pub instance: Option<String>,
    pub port: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    pub ty: TypeRef,
    pub from: EndpointRef,
    pub to: EndpointRef,
}
