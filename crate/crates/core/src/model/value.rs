use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// An enumeration type: a name and its literals in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumType {
    pub name: String,
    pub literals: Vec<String>,
}

impl EnumType {
    pub fn new(name: impl Into<String>, literals: Vec<String>) -> Self {
        Self {
            name: name.into(),
            literals,
        }
    }

    pub fn position(&self, literal: &str) -> Option<usize> {
        self.literals.iter().position(|l| l == literal)
    }
}

/// A finite data type. Only finite carriers are admitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DataType {
    Bool,
    Int { lo: i64, hi: i64 },
    Enum(Arc<EnumType>),
}

impl DataType {
    /// All members in canonical order: `false < true`, `lo..=hi` ascending,
    /// enumeration literals in declaration order.
    pub fn carrier(&self) -> Vec<Value> {
        match self {
            DataType::Bool => vec![Value::Bool(false), Value::Bool(true)],
            DataType::Int { lo, hi } => (*lo..=*hi).map(Value::Int).collect(),
            DataType::Enum(ty) => (0..ty.literals.len())
                .map(|index| Value::Enum(EnumLit::new(ty.clone(), index)))
                .collect(),
        }
    }

    pub fn carrier_len(&self) -> u64 {
        match self {
            DataType::Bool => 2,
            DataType::Int { lo, hi } => (hi - lo + 1).max(0) as u64,
            DataType::Enum(ty) => ty.literals.len() as u64,
        }
    }

    /// Membership of a non-absent value in this type's carrier.
    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (DataType::Bool, Value::Bool(_)) => true,
            (DataType::Int { lo, hi }, Value::Int(n)) => lo <= n && n <= hi,
            (DataType::Enum(ty), Value::Enum(lit)) => {
                lit.ty.name == ty.name && lit.index < ty.literals.len()
            }
            _ => false,
        }
    }

    /// Membership in the carrier extended with the empty slot.
    pub fn admits(&self, value: &Value) -> bool {
        value.is_absent() || self.contains(value)
    }

    /// Clamp an integer value into this type's bounds; other values pass through.
    pub fn saturate(&self, value: Value) -> Value {
        match (self, value) {
            (DataType::Int { lo, hi }, Value::Int(n)) => Value::Int(n.clamp(*lo, *hi)),
            (_, v) => v,
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataType::Bool => f.write_str("Bool"),
            DataType::Int { lo, hi } => write!(f, "Int[{lo}..{hi}]"),
            DataType::Enum(ty) => f.write_str(&ty.name),
        }
    }
}

/// An enumeration literal, identified by its type and declaration index.
#[derive(Debug, Clone)]
pub struct EnumLit {
    pub ty: Arc<EnumType>,
    pub index: usize,
}

impl EnumLit {
    pub fn new(ty: Arc<EnumType>, index: usize) -> Self {
        Self { ty, index }
    }

    pub fn name(&self) -> &str {
        &self.ty.literals[self.index]
    }
}

impl PartialEq for EnumLit {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
            && (Arc::ptr_eq(&self.ty, &other.ty) || self.ty.name == other.ty.name)
    }
}

impl Eq for EnumLit {}

impl Hash for EnumLit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ty.name.hash(state);
        self.index.hash(state);
    }
}

/// A slot value. `Absent` is the empty time slot (ε).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Absent,
    Bool(bool),
    Int(i64),
    Enum(EnumLit),
}

impl Value {
    pub fn is_absent(&self) -> bool {
        matches!(self, Value::Absent)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    /// Render with the ASCII spelling of ε.
    pub fn ascii(&self) -> String {
        match self {
            Value::Absent => "eps".to_string(),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Absent => f.write_str("ε"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Enum(lit) => f.write_str(lit.name()),
        }
    }
}

/// Binary operators shared by model expressions and specification formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    pub fn apply(self, lhs: &Value, rhs: &Value) -> Value {
        match self {
            BinOp::Add | BinOp::Sub => match (lhs, rhs) {
                (Value::Int(a), Value::Int(b)) => Value::Int(if self == BinOp::Add {
                    a.saturating_add(*b)
                } else {
                    a.saturating_sub(*b)
                }),
                _ => Value::Absent,
            },
            BinOp::Eq => Value::Bool(lhs == rhs),
            BinOp::Ne => Value::Bool(lhs != rhs),
            BinOp::Lt | BinOp::Le => match (lhs, rhs) {
                (Value::Int(a), Value::Int(b)) => {
                    Value::Bool(if self == BinOp::Lt { a < b } else { a <= b })
                }
                _ => Value::Bool(false),
            },
            BinOp::And => Value::Bool(lhs.is_true() && rhs.is_true()),
            BinOp::Or => Value::Bool(lhs.is_true() || rhs.is_true()),
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le)
    }
}

/// Boolean negation; anything other than `true` counts as false.
pub fn not(value: &Value) -> Value {
    Value::Bool(!value.is_true())
}
