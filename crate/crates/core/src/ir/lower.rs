use std::sync::Arc;

use crate::model::{
    Automaton, BinOp, Body, Causality, Component, DataType, EnumLit, EnumType, Expr, Model,
    Pattern, Value, STATE_VAR,
};
use crate::semantics::needs_saturation;

use super::composite::lower_composite;
use super::formula::{FOp, Formula, Tick};
use super::frame::{used_types, Decl, FrameKind, SpecFrame, TypeDecl};

pub(crate) const NOTE_SATURATION: &str =
    "integer results are saturated into the target range by sat[lo,hi]";
pub(crate) const NOTE_STUTTER: &str =
    "the last formula covers slots where no transition is enabled: state and variables are kept, nothing is emitted";
pub(crate) const NOTE_TIE_BREAK: &str =
    "some transitions overlap: the simulator fires the first enabled one, while these formulas constrain every enabled one";

/// Lower any component. `deterministic` is the validation verdict for automata.
pub fn lower_component(model: &Model, component: usize, deterministic: bool) -> SpecFrame {
    let c = &model.components[component];
    match &c.body {
        Body::Automaton(_) => lower_atomic(model, c, deterministic),
        Body::Function(_) => lower_function(model, c),
        Body::Composite(_) => lower_composite(model, component).frame,
    }
}

/// The enumeration type of an automaton's control states.
pub fn state_type(c: &Component, a: &Automaton) -> Arc<EnumType> {
    Arc::new(EnumType::new(format!("{}State", c.name), a.states.clone()))
}

pub(crate) fn state_lit(ty: &Arc<EnumType>, index: usize) -> Formula {
    Formula::Const(Value::Enum(EnumLit::new(ty.clone(), index)))
}

pub(crate) fn input(c: &Component, i: usize, at: Tick) -> Formula {
    Formula::Stream {
        name: c.inputs[i].name.clone(),
        col: i,
        at,
    }
}

pub(crate) fn output(c: &Component, q: usize, at: Tick) -> Formula {
    Formula::Stream {
        name: c.outputs[q].name.clone(),
        col: c.inputs.len() + q,
        at,
    }
}

pub(crate) fn var(c: &Component, v: usize, at: Tick) -> Formula {
    Formula::Var {
        name: c.variables()[v].name.clone(),
        var: v,
        at,
    }
}

pub(crate) fn output_tick(c: &Component) -> Tick {
    match c.causality {
        Causality::Weak => Tick::Now,
        Causality::Strong => Tick::Next,
    }
}

/// Translate a model expression, reading everything at slot `t`.
pub fn expr(c: &Component, e: &Expr) -> Formula {
    match e {
        Expr::Const(v) => Formula::Const(v.clone()),
        Expr::Var(v) => var(c, *v, Tick::Now),
        Expr::Input(i) => input(c, *i, Tick::Now),
        Expr::Not(inner) => Formula::not(expr(c, inner)),
        Expr::Binary(BinOp::And, l, r) => Formula::and(vec![expr(c, l), expr(c, r)]),
        Expr::Binary(BinOp::Or, l, r) => Formula::or(vec![expr(c, l), expr(c, r)]),
        Expr::Binary(op, l, r) => Formula::bin(
            FOp::from_binop(*op).expect("arithmetic or comparison"),
            expr(c, l),
            expr(c, r),
        ),
    }
}

/// Translate an expression assigned to a target of type `target`, saturating if needed.
pub fn assigned(c: &Component, e: &Expr, target: &DataType) -> Formula {
    let f = expr(c, e);
    match target {
        DataType::Int { lo, hi } if needs_saturation(e, c, target) => Formula::Clamp {
            inner: Box::new(f),
            lo: *lo,
            hi: *hi,
        },
        _ => f,
    }
}

pub fn pattern(c: &Component, port: usize, p: &Pattern) -> Formula {
    let x = input(c, port, Tick::Now);
    match p {
        Pattern::Value(v) => Formula::eq(x, Formula::Const(v.clone())),
        Pattern::Present => Formula::bin(FOp::Ne, x, Formula::absent()),
        Pattern::Absent => Formula::eq(x, Formula::absent()),
    }
}

fn common_decls(model: &Model, c: &Component) -> (Vec<Decl>, Vec<Decl>, Vec<Decl>, Vec<TypeDecl>) {
    let inputs: Vec<Decl> = c.inputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect();
    let outputs: Vec<Decl> = c.outputs.iter().map(|p| Decl::new(&p.name, &p.ty)).collect();
    let vars: Vec<Decl> = c.variables().iter().map(|v| Decl::new(&v.name, &v.ty)).collect();
    let types = used_types(
        model,
        c.inputs
            .iter()
            .chain(&c.outputs)
            .map(|p| &p.ty)
            .chain(c.variables().iter().map(|v| &v.ty)),
    );
    (inputs, outputs, vars, types)
}

fn strong_output_init(c: &Component) -> Vec<Formula> {
    if c.causality == Causality::Weak {
        return Vec::new();
    }
    (0..c.outputs.len())
        .map(|q| Formula::eq(output(c, q, Tick::Zero), Formula::Const(c.outputs[q].init.clone())))
        .collect()
}

fn has_clamp(fs: &[Formula]) -> bool {
    let mut found = false;
    for f in fs {
        f.visit(&mut |n| found |= matches!(n, Formula::Clamp { .. }));
    }
    found
}

/// The enabling condition of transition `k`.
pub fn enabling(c: &Component, a: &Automaton, st: &Arc<EnumType>, k: usize) -> Formula {
    let t = &a.transitions[k];
    let mut items = vec![Formula::eq(Formula::State { at: Tick::Now }, state_lit(st, t.source))];
    items.extend(t.patterns.iter().map(|(i, p)| pattern(c, *i, p)));
    items.extend(t.guard.iter().map(|g| expr(c, g)));
    Formula::and(items)
}

/// Lower an automaton component: one formula per transition, then the stutter formula.
pub fn lower_atomic(model: &Model, c: &Component, deterministic: bool) -> SpecFrame {
    let a = c.automaton().expect("automaton component");
    let st = state_type(c, a);
    let at = output_tick(c);
    let (inputs, outputs, vars, mut types) = common_decls(model, c);
    types.push(TypeDecl {
        name: st.name.clone(),
        dtype: DataType::Enum(st.clone()),
    });

    let mut init = vec![Formula::eq(Formula::State { at: Tick::Zero }, state_lit(&st, a.initial))];
    init.extend(
        a.variables
            .iter()
            .enumerate()
            .map(|(v, d)| Formula::eq(var(c, v, Tick::Zero), Formula::Const(d.init.clone()))),
    );
    init.extend(strong_output_init(c));

    let mut gar = Vec::new();
    for (k, t) in a.transitions.iter().enumerate() {
        let mut then = Vec::new();
        for q in 0..c.outputs.len() {
            let rhs = match t.emissions.iter().find(|(p, _)| *p == q) {
                Some((_, e)) => assigned(c, e, &c.outputs[q].ty.dtype),
                None => Formula::absent(),
            };
            then.push(Formula::eq(output(c, q, at), rhs));
        }
        for (v, d) in a.variables.iter().enumerate() {
            let rhs = match t.updates.iter().find(|(u, _)| *u == v) {
                Some((_, e)) => assigned(c, e, &d.ty.dtype),
                None => var(c, v, Tick::Now),
            };
            then.push(Formula::eq(var(c, v, Tick::Next), rhs));
        }
        then.push(Formula::eq(Formula::State { at: Tick::Next }, state_lit(&st, t.target)));
        gar.push(Formula::implies(enabling(c, a, &st, k), Formula::and(then)));
    }
    gar.push(stutter(c, a, &st));

    let mut notes = Vec::new();
    if has_clamp(&gar) {
        notes.push(NOTE_SATURATION.to_string());
    }
    notes.push(NOTE_STUTTER.to_string());
    if !deterministic {
        notes.push(NOTE_TIE_BREAK.to_string());
    }
    SpecFrame {
        name: c.name.clone(),
        causality: c.causality,
        kind: FrameKind::Automaton {
            transitions: a.transitions.len(),
        },
        types,
        inputs,
        outputs,
        stream_locals: Vec::new(),
        state: Some(Decl {
            name: STATE_VAR.into(),
            label: st.name.clone(),
            dtype: DataType::Enum(st.clone()),
        }),
        vars,
        init,
        asm: vec![Formula::truth()],
        gar,
        notes,
    }
}

/// `¬(E1 ∨ … ∨ Ek) → st(t+1) = st(t) ∧ v(t+1) = v(t) ∧ y = ε`.
pub fn stutter(c: &Component, a: &Automaton, st: &Arc<EnumType>) -> Formula {
    let at = output_tick(c);
    let mut then: Vec<Formula> = (0..c.outputs.len())
        .map(|q| Formula::eq(output(c, q, at), Formula::absent()))
        .collect();
    then.extend((0..a.variables.len()).map(|v| Formula::eq(var(c, v, Tick::Next), var(c, v, Tick::Now))));
    then.push(Formula::eq(
        Formula::State { at: Tick::Next },
        Formula::State { at: Tick::Now },
    ));
    let then = Formula::and(then);
    if a.transitions.is_empty() {
        return then;
    }
    let any = Formula::or((0..a.transitions.len()).map(|k| enabling(c, a, st, k)).collect());
    Formula::implies(Formula::not(any), then)
}

/// Lower a function component: one equation per output.
pub fn lower_function(model: &Model, c: &Component) -> SpecFrame {
    let Body::Function(f) = &c.body else {
        panic!("function component expected");
    };
    let at = output_tick(c);
    let (inputs, outputs, vars, types) = common_decls(model, c);
    let gar: Vec<Formula> = f
        .emissions
        .iter()
        .enumerate()
        .map(|(q, e)| Formula::eq(output(c, q, at), assigned(c, e, &c.outputs[q].ty.dtype)))
        .collect();
    let notes = if has_clamp(&gar) {
        vec![NOTE_SATURATION.to_string()]
    } else {
        Vec::new()
    };
    SpecFrame {
        name: c.name.clone(),
        causality: c.causality,
        kind: FrameKind::Function,
        types,
        inputs,
        outputs,
        stream_locals: Vec::new(),
        state: None,
        vars,
        init: strong_output_init(c),
        asm: vec![Formula::truth()],
        gar,
        notes,
    }
}
