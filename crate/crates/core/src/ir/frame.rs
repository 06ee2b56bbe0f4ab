use std::sync::Arc;

use crate::model::{Causality, DataType, EnumType, Model, TypeUse};

use super::formula::Formula;

/// A declared stream or local: its name, the type label as written, and the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub label: String,
    pub dtype: DataType,
}

impl Decl {
    pub fn new(name: impl Into<String>, ty: &TypeUse) -> Self {
        Self {
            name: name.into(),
            label: ty.label.clone(),
            dtype: ty.dtype.clone(),
        }
    }
}

/// A datatype declaration emitted ahead of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub dtype: DataType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// `gar[..transitions]` are the transition formulas, the last one the stutter formula.
    Automaton { transitions: usize },
    Function,
    Composite,
}

/// An Assumption/Guarantee specification frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFrame {
    pub name: String,
    pub causality: Causality,
    pub kind: FrameKind,
    pub types: Vec<TypeDecl>,
    pub inputs: Vec<Decl>,
    pub outputs: Vec<Decl>,
    /// Internal streams of a composite.
    pub stream_locals: Vec<Decl>,
    /// The control-state local of an automaton.
    pub state: Option<Decl>,
    pub vars: Vec<Decl>,
    pub init: Vec<Formula>,
    pub asm: Vec<Formula>,
    pub gar: Vec<Formula>,
    /// Explanatory comment lines, ASCII only.
    pub notes: Vec<String>,
}

impl SpecFrame {
    pub fn state_type(&self) -> Option<Arc<EnumType>> {
        match &self.state.as_ref()?.dtype {
            DataType::Enum(e) => Some(e.clone()),
            _ => None,
        }
    }

    /// Names of all streams in column order: inputs, outputs, stream locals.
    pub fn stream_names(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .chain(&self.stream_locals)
            .map(|d| d.name.as_str())
            .collect()
    }

    /// Every name a formula of this frame may mention.
    pub fn declared_names(&self) -> Vec<&str> {
        let mut names = self.stream_names();
        names.extend(self.state.iter().map(|d| d.name.as_str()));
        names.extend(self.vars.iter().map(|d| d.name.as_str()));
        names
    }
}

/// Named model types used by `uses`, in model declaration order.
pub fn used_types<'a>(model: &Model, uses: impl IntoIterator<Item = &'a TypeUse>) -> Vec<TypeDecl> {
    let labels: Vec<&str> = uses.into_iter().map(|u| u.label.as_str()).collect();
    model
        .types
        .iter()
        .filter(|t| labels.contains(&t.name.as_str()))
        .map(|t| TypeDecl {
            name: t.name.clone(),
            dtype: t.dtype.clone(),
        })
        .collect()
}
