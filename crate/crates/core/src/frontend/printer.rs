use std::fmt::Write;

use crate::model::raw::*;
use crate::model::{BinOp, Direction};

/// Canonical pretty-printing of a raw model. `parse_dsl(&print_dsl(m)) == Ok(m)`.
pub fn print_dsl(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", model.name);
    for t in &model.types {
        let def = match &t.def {
            TypeDef::Int { lo, hi } => format!("Int[{lo}..{hi}]"),
            TypeDef::Enum(lits) => format!("enum {{ {} }}", lits.join(", ")),
        };
        let _ = writeln!(out, "  type {} = {def}", t.name);
    }
    for c in &model.components {
        out.push('\n');
        component(&mut out, c);
    }
    let _ = writeln!(out, "\n  root {}\n}}", model.root);
    out
}

pub fn print_type_ref(ty: &TypeRef) -> String {
    match ty {
        TypeRef::Bool => "Bool".into(),
        TypeRef::Int { lo, hi } => format!("Int[{lo}..{hi}]"),
        TypeRef::Named(n) => n.clone(),
    }
}

pub fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Absent => "eps".into(),
        Literal::Bool(b) => b.to_string(),
        Literal::Int(n) => n.to_string(),
        Literal::Name(n) => n.clone(),
    }
}

pub fn print_endpoint(ep: &EndpointRef) -> String {
    match &ep.instance {
        Some(i) => format!("{i}.{}", ep.port),
        None => ep.port.clone(),
    }
}

fn component(out: &mut String, c: &ComponentDecl) {
    let _ = write!(out, "  component {}", c.name);
    if let Some(causality) = c.causality {
        let _ = write!(out, " ({causality})");
    }
    out.push_str(" {\n");
    for p in &c.ports {
        let dir = match p.direction {
            Direction::In => "in",
            Direction::Out => "out",
        };
        let _ = write!(out, "    {dir} {}: {}", p.name, print_type_ref(&p.ty));
        if let Some(init) = &p.init {
            let _ = write!(out, " = {}", print_literal(init));
        }
        out.push('\n');
    }
    match &c.body {
        BodyDecl::Automaton(a) => {
            out.push_str("    automaton {\n");
            for s in &a.states {
                let _ = writeln!(out, "      state {s}");
            }
            if let Some(init) = &a.initial {
                let _ = writeln!(out, "      initial {init}");
            }
            for v in &a.variables {
                let _ = writeln!(
                    out,
                    "      var {}: {} = {}",
                    v.name,
                    print_type_ref(&v.ty),
                    print_literal(&v.init)
                );
            }
            for t in &a.transitions {
                let _ = write!(out, "      when {} -> {}", t.from, t.to);
                if !t.patterns.is_empty() {
                    let pats: Vec<String> = t
                        .patterns
                        .iter()
                        .map(|(port, p)| match p {
                            PatternDecl::Any => format!("{port} = *"),
                            PatternDecl::Lit(l) => format!("{port} = {}", print_literal(l)),
                        })
                        .collect();
                    let _ = write!(out, " [{}]", pats.join(", "));
                }
                if let Some(g) = &t.guard {
                    let _ = write!(out, " if {}", print_expr(g));
                }
                if !t.emit.is_empty() {
                    let _ = write!(out, " emit {}", assignments(&t.emit));
                }
                if !t.set.is_empty() {
                    let _ = write!(out, " set {}", assignments(&t.set));
                }
                out.push('\n');
            }
            out.push_str("    }\n");
        }
        BodyDecl::Function(eqs) => {
            out.push_str("    function {\n");
            for (port, e) in eqs {
                let _ = writeln!(out, "      {port} = {}", print_expr(e));
            }
            out.push_str("    }\n");
        }
        BodyDecl::Composite(comp) => {
            for (inst, name) in &comp.subs {
                let _ = writeln!(out, "    sub {inst}: {name}");
            }
            for ch in &comp.channels {
                let _ = writeln!(
                    out,
                    "    channel {}: {} {} -> {}",
                    ch.name,
                    print_type_ref(&ch.ty),
                    print_endpoint(&ch.from),
                    print_endpoint(&ch.to)
                );
            }
        }
    }
    out.push_str("  }\n");
}

fn assignments(items: &[(String, Expr)]) -> String {
    items
        .iter()
        .map(|(n, e)| format!("{n} = {}", print_expr(e)))
        .collect::<Vec<_>>()
        .join(", ")
}

// Precedence levels: || 1, && 2, comparisons 3, + - 4, ! 5, atoms 6.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Lit(_) => 6,
        Expr::Not(_) => 5,
        Expr::Binary(op, _, _) => match op {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le => 3,
            BinOp::Add | BinOp::Sub => 4,
        },
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    let prec = precedence(e);
    if prec < min {
        out.push('(');
    }
    match e {
        Expr::Lit(l) => out.push_str(&print_literal(l)),
        Expr::Not(inner) => {
            out.push('!');
            expr(out, inner, 5);
        }
        Expr::Binary(op, l, r) => {
            let sym = match op {
                BinOp::Or => "||",
                BinOp::And => "&&",
                BinOp::Eq => "==",
                BinOp::Ne => "!=",
                BinOp::Lt => "<",
                BinOp::Le => "<=",
                BinOp::Add => "+",
                BinOp::Sub => "-",
            };
            // Comparisons do not associate; the others associate to the left.
            let left_min = if op.is_comparison() { prec + 1 } else { prec };
            expr(out, l, left_min);
            let _ = write!(out, " {sym} ");
            expr(out, r, prec + 1);
        }
    }
    if prec < min {
        out.push(')');
    }
}
