use std::collections::VecDeque;

use crate::frontend::Diagnostic;
use crate::model::{BinOp, Body, Component, DataType, Expr, Model, Pattern, Value};

use super::network::Network;

/// Upper bound on the valuations visited by the overlap check of one automaton.
pub const DETERMINISM_CHECK_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    /// `(component, deterministic)` for every automaton, in declaration order.
    pub determinism: Vec<(String, bool)>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn is_deterministic(&self, component: &str) -> bool {
        self.determinism
            .iter()
            .find(|(c, _)| c == component)
            .is_none_or(|(_, d)| *d)
    }

    pub fn all_deterministic(&self) -> bool {
        self.determinism.iter().all(|(_, d)| *d)
    }
}

/// Static type of an expression. Integer types carry the value range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    /// The ε literal, compatible with every type.
    Absent,
    Bool,
    Int(i64, i64),
    Enum(String),
}

impl Ty {
    pub fn of(dtype: &DataType) -> Ty {
        match dtype {
            DataType::Bool => Ty::Bool,
            DataType::Int { lo, hi } => Ty::Int(*lo, *hi),
            DataType::Enum(e) => Ty::Enum(e.name.clone()),
        }
    }

    fn of_value(v: &Value) -> Ty {
        match v {
            Value::Absent => Ty::Absent,
            Value::Bool(_) => Ty::Bool,
            Value::Int(n) => Ty::Int(*n, *n),
            Value::Enum(lit) => Ty::Enum(lit.ty.name.clone()),
        }
    }

    fn compatible(&self, other: &Ty) -> bool {
        match (self, other) {
            (Ty::Absent, _) | (_, Ty::Absent) => true,
            (Ty::Bool, Ty::Bool) | (Ty::Int(..), Ty::Int(..)) => true,
            (Ty::Enum(a), Ty::Enum(b)) => a == b,
            _ => false,
        }
    }

    fn describe(&self) -> String {
        match self {
            Ty::Absent => "ε".into(),
            Ty::Bool => "Bool".into(),
            Ty::Int(..) => "Int".into(),
            Ty::Enum(n) => n.clone(),
        }
    }
}

/// Type an expression in the scope of `component`.
pub fn type_of(expr: &Expr, component: &Component) -> Result<Ty, String> {
    Ok(match expr {
        Expr::Const(v) => Ty::of_value(v),
        Expr::Var(i) => Ty::of(&component.variables()[*i].ty.dtype),
        Expr::Input(i) => Ty::of(&component.inputs[*i].ty.dtype),
        Expr::Not(e) => match type_of(e, component)? {
            Ty::Bool => Ty::Bool,
            other => return Err(format!("`!` expects Bool, found {}", other.describe())),
        },
        Expr::Binary(op, l, r) => {
            let (lt, rt) = (type_of(l, component)?, type_of(r, component)?);
            match op {
                BinOp::And | BinOp::Or => match (&lt, &rt) {
                    (Ty::Bool, Ty::Bool) => Ty::Bool,
                    _ => {
                        return Err(format!(
                            "logical operator expects Bool operands, found {} and {}",
                            lt.describe(),
                            rt.describe()
                        ))
                    }
                },
                BinOp::Add | BinOp::Sub => match (lt, rt) {
                    (Ty::Int(a, b), Ty::Int(c, d)) => {
                        if *op == BinOp::Add {
                            Ty::Int(a.saturating_add(c), b.saturating_add(d))
                        } else {
                            Ty::Int(a.saturating_sub(d), b.saturating_sub(c))
                        }
                    }
                    (lt, rt) => {
                        return Err(format!(
                            "arithmetic expects Int operands, found {} and {}",
                            lt.describe(),
                            rt.describe()
                        ))
                    }
                },
                BinOp::Lt | BinOp::Le => match (&lt, &rt) {
                    (Ty::Int(..), Ty::Int(..)) => Ty::Bool,
                    _ => {
                        return Err(format!(
                            "ordering expects Int operands, found {} and {}",
                            lt.describe(),
                            rt.describe()
                        ))
                    }
                },
                BinOp::Eq | BinOp::Ne => {
                    if !lt.compatible(&rt) {
                        return Err(format!(
                            "cannot compare {} with {}",
                            lt.describe(),
                            rt.describe()
                        ));
                    }
                    Ty::Bool
                }
            }
        }
    })
}

/// Whether the static range of `expr` may leave the bounds of an integer target.
pub fn needs_saturation(expr: &Expr, component: &Component, target: &DataType) -> bool {
    match (type_of(expr, component), target) {
        (Ok(Ty::Int(a, b)), DataType::Int { lo, hi }) => a < *lo || b > *hi,
        _ => false,
    }
}

fn check_assign(
    expr: &Expr,
    component: &Component,
    target: &DataType,
    allow_absent: bool,
) -> Result<(), String> {
    let ty = type_of(expr, component)?;
    match ty {
        Ty::Absent if allow_absent => Ok(()),
        Ty::Absent => Err("a variable cannot be set to ε".into()),
        ty if ty.compatible(&Ty::of(target)) => Ok(()),
        ty => Err(format!("expected {target}, found {}", ty.describe())),
    }
}

/// Semantic validation of a resolved model.
pub fn validate(model: &Model) -> ValidationReport {
    let mut diagnostics = Vec::new();
    let mut determinism = Vec::new();
    for c in &model.components {
        let loc = format!("component {}", c.name);
        match &c.body {
            Body::Automaton(a) => {
                for (n, t) in a.transitions.iter().enumerate() {
                    let tloc = format!("{loc}, transition {}", n + 1);
                    let mut errs = Vec::new();
                    if let Some(g) = &t.guard {
                        match type_of(g, c) {
                            Ok(Ty::Bool) => {}
                            Ok(other) => errs.push(format!("guard has type {}", other.describe())),
                            Err(e) => errs.push(e),
                        }
                    }
                    for (port, e) in &t.emissions {
                        if let Err(e) = check_assign(e, c, &c.outputs[*port].ty.dtype, true) {
                            errs.push(format!("emission to `{}`: {e}", c.outputs[*port].name));
                        }
                    }
                    for (var, e) in &t.updates {
                        if let Err(e) = check_assign(e, c, &a.variables[*var].ty.dtype, false) {
                            errs.push(format!("update of `{}`: {e}", a.variables[*var].name));
                        }
                    }
                    diagnostics.extend(
                        errs.into_iter()
                            .map(|m| Diagnostic::error("type-error", m).in_location(tloc.clone())),
                    );
                }
                for s in unreachable_states(c) {
                    diagnostics.push(
                        Diagnostic::warning("unreachable-state", format!("state `{}` is unreachable", a.states[s]))
                            .in_location(format!("{loc}, state {}", a.states[s])),
                    );
                }
                let (deterministic, findings) = overlap_check(c);
                diagnostics.extend(findings.into_iter().map(|d| d.in_location(loc.clone())));
                determinism.push((c.name.clone(), deterministic));
            }
            Body::Function(f) => {
                for (port, e) in f.emissions.iter().enumerate() {
                    if let Err(e) = check_assign(e, c, &c.outputs[port].ty.dtype, true) {
                        diagnostics.push(
                            Diagnostic::error("type-error", format!("equation for `{}`: {e}", c.outputs[port].name))
                                .in_location(loc.clone()),
                        );
                    }
                }
            }
            Body::Composite(_) => {
                let idx = model.component(&c.name).expect("component of its own model");
                if let Err(cycle) = Network::build(model, idx) {
                    diagnostics.push(Diagnostic::error("causality-cycle", cycle.to_string()).in_location(loc));
                }
            }
        }
    }
    ValidationReport {
        diagnostics,
        determinism,
    }
}

fn unreachable_states(c: &Component) -> Vec<usize> {
    let Some(a) = c.automaton() else {
        return Vec::new();
    };
    let mut seen = vec![false; a.states.len()];
    let mut queue = VecDeque::from([a.initial]);
    seen[a.initial] = true;
    while let Some(s) = queue.pop_front() {
        for t in a.transitions.iter().filter(|t| t.source == s) {
            if !seen[t.target] {
                seen[t.target] = true;
                queue.push_back(t.target);
            }
        }
    }
    (0..a.states.len()).filter(|s| !seen[*s]).collect()
}

/// Brute-force pairwise disjointness of enabling conditions over the
/// product of input slots (ε included) and variable carriers.
fn overlap_check(c: &Component) -> (bool, Vec<Diagnostic>) {
    let Some(a) = c.automaton() else {
        return (true, Vec::new());
    };
    let mut domains: Vec<Vec<Value>> = c
        .inputs
        .iter()
        .map(|p| {
            let mut d = vec![Value::Absent];
            d.extend(p.ty.dtype.carrier());
            d
        })
        .collect();
    // A variable only holds ε after an update reading an absent input.
    domains.extend(a.variables.iter().enumerate().map(|(k, v)| {
        let mut d = v.ty.dtype.carrier();
        let fed_by_input = a
            .transitions
            .iter()
            .flat_map(|t| &t.updates)
            .any(|(var, e)| *var == k && e.reads_inputs());
        if fed_by_input {
            d.insert(0, Value::Absent);
        }
        d
    }));
    let total = domains
        .iter()
        .try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
        .unwrap_or(u64::MAX);
    // Only transitions sharing a source state with a cheap syntactic
    // disjointness test failing need the brute force.
    let mut candidates = Vec::new();
    for (i, ti) in a.transitions.iter().enumerate() {
        for (j, tj) in a.transitions.iter().enumerate().skip(i + 1) {
            if ti.source == tj.source && !patterns_disjoint(&ti.patterns, &tj.patterns) {
                candidates.push((i, j));
            }
        }
    }
    if candidates.is_empty() {
        return (true, Vec::new());
    }
    if total > DETERMINISM_CHECK_CAP {
        return (
            false,
            vec![Diagnostic::warning(
                "determinism-unchecked",
                format!("{total} valuations exceed the overlap-check cap of {DETERMINISM_CHECK_CAP}"),
            )],
        );
    }

    let n_in = c.inputs.len();
    let mut overlapping = vec![false; candidates.len()];
    let mut digits = vec![0usize; domains.len()];
    let mut inputs = vec![Value::Absent; n_in];
    let mut vars = vec![Value::Absent; a.variables.len()];
    for _ in 0..total {
        for (k, d) in digits.iter().enumerate() {
            if k < n_in {
                inputs[k] = domains[k][*d].clone();
            } else {
                vars[k - n_in] = domains[k][*d].clone();
            }
        }
        for (slot, (i, j)) in candidates.iter().enumerate() {
            if !overlapping[slot]
                && a.transitions[*i].enabled(&vars, &inputs)
                && a.transitions[*j].enabled(&vars, &inputs)
            {
                overlapping[slot] = true;
            }
        }
        // odometer
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < domains[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
    let findings: Vec<Diagnostic> = candidates
        .iter()
        .zip(&overlapping)
        .filter(|(_, o)| **o)
        .map(|((i, j), _)| {
            Diagnostic::warning(
                "nondeterministic",
                format!(
                    "transitions {} and {} leave state `{}` under overlapping conditions",
                    i + 1,
                    j + 1,
                    a.states[a.transitions[*i].source]
                ),
            )
        })
        .collect();
    (findings.is_empty(), findings)
}

fn patterns_disjoint(a: &[(usize, Pattern)], b: &[(usize, Pattern)]) -> bool {
    a.iter().any(|(pa, x)| {
        b.iter().any(|(pb, y)| {
            pa == pb
                && match (x, y) {
                    (Pattern::Value(u), Pattern::Value(v)) => u != v,
                    (Pattern::Absent, Pattern::Value(_) | Pattern::Present)
                    | (Pattern::Value(_) | Pattern::Present, Pattern::Absent) => true,
                    _ => false,
                }
        })
    })
}
