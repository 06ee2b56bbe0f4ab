//! JSON interchange format.
//!
//! A document is one object with `name`, `types`, `components` and `root`.
//! Types, initial values, guards and expressions are strings in the same
//! surface syntax as the textual language, so both frontends share one
//! expression parser.

use serde_json::{json, Map, Value as Json};

use super::diag::{Diagnostic, SourceSpan};
use super::parser::parse_fragment;
use super::printer::{print_endpoint, print_expr, print_literal, print_type_ref};
use crate::model::raw::*;
use crate::model::{Causality, Direction};

type PResult<T> = Result<T, Diagnostic>;

fn schema(path: &str, message: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::error("schema", format!("{path}: {message}")).at(SourceSpan::new(1, 1, 0))
}

fn field<'a>(obj: &'a Map<String, Json>, path: &str, key: &str) -> PResult<&'a Json> {
    obj.get(key)
        .ok_or_else(|| schema(path, format!("missing required field `{key}`")))
}

fn object<'a>(v: &'a Json, path: &str) -> PResult<&'a Map<String, Json>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Json, path: &str) -> PResult<&'a Vec<Json>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string<'a>(v: &'a Json, path: &str) -> PResult<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn str_field<'a>(obj: &'a Map<String, Json>, path: &str, key: &str) -> PResult<&'a str> {
    string(field(obj, path, key)?, &format!("{path}.{key}"))
}

fn check_keys(obj: &Map<String, Json>, path: &str, allowed: &[&str]) -> PResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(path, format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

/// Parse a fragment of surface syntax found in a string field.
fn fragment<T>(
    path: &str,
    text: &str,
    f: impl FnOnce(&mut super::parser::Parser<'_>) -> PResult<T>,
) -> PResult<T> {
    parse_fragment(text, f).map_err(|d| schema(path, format!("in `{text}`: {}", d.message)))
}

fn identifier(path: &str, text: &str) -> PResult<String> {
    fragment(path, text, |p| p.endpoint()).and_then(|ep| match ep.instance {
        None => Ok(ep.port),
        Some(_) => Err(schema(path, format!("`{text}` is not an identifier"))),
    })
}

fn assignments(v: &Json, path: &str) -> PResult<Vec<(String, Expr)>> {
    object(v, path)?
        .iter()
        .map(|(k, e)| {
            let p = format!("{path}.{k}");
            Ok((identifier(&p, k)?, fragment(&p, string(e, &p)?, |p| p.expr())?))
        })
        .collect()
}

/// Parse an interchange document into a raw model.
pub fn parse_interchange(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let doc: Json = serde_json::from_str(text).map_err(|e| {
        let line = e.line().max(1);
        let column = e.column().max(1);
        vec![Diagnostic::error("syntax", e.to_string()).at(SourceSpan::new(line, column, 0))]
    })?;
    model(&doc).map_err(|d| vec![d])
}

fn model(doc: &Json) -> PResult<Model> {
    let obj = object(doc, "$")?;
    check_keys(obj, "$", &["name", "types", "components", "root"])?;
    let name = identifier("$.name", str_field(obj, "$", "name")?)?;
    let mut types = Vec::new();
    if let Some(ts) = obj.get("types") {
        for (i, t) in array(ts, "$.types")?.iter().enumerate() {
            types.push(type_decl(t, &format!("$.types[{i}]"))?);
        }
    }
    let mut components = Vec::new();
    for (i, c) in array(field(obj, "$", "components")?, "$.components")?.iter().enumerate() {
        components.push(component(c, &format!("$.components[{i}]"))?);
    }
    let root = identifier("$.root", str_field(obj, "$", "root")?)?;
    Ok(Model {
        name,
        types,
        components,
        root,
    })
}

fn type_decl(v: &Json, path: &str) -> PResult<TypeDecl> {
    let obj = object(v, path)?;
    check_keys(obj, path, &["name", "enum", "int"])?;
    let name = identifier(path, str_field(obj, path, "name")?)?;
    let def = match (obj.get("enum"), obj.get("int")) {
        (Some(lits), None) => TypeDef::Enum(
            array(lits, &format!("{path}.enum"))?
                .iter()
                .map(|l| identifier(path, string(l, &format!("{path}.enum"))?))
                .collect::<PResult<_>>()?,
        ),
        (None, Some(range)) => {
            let r = array(range, &format!("{path}.int"))?;
            let bound = |j: usize| {
                r.get(j)
                    .and_then(Json::as_i64)
                    .ok_or_else(|| schema(&format!("{path}.int"), "expected [lo, hi]"))
            };
            if r.len() != 2 {
                return Err(schema(&format!("{path}.int"), "expected [lo, hi]"));
            }
            TypeDef::Int {
                lo: bound(0)?,
                hi: bound(1)?,
            }
        }
        _ => return Err(schema(path, "a type has exactly one of `enum` or `int`")),
    };
    Ok(TypeDecl { name, def })
}

fn component(v: &Json, path: &str) -> PResult<ComponentDecl> {
    let obj = object(v, path)?;
    check_keys(
        obj,
        path,
        &["name", "causality", "ports", "automaton", "function", "subs", "channels"],
    )?;
    let name = identifier(path, str_field(obj, path, "name")?)?;
    let causality = match obj.get("causality") {
        None => None,
        Some(c) => Some(match string(c, &format!("{path}.causality"))? {
            "weak" => Causality::Weak,
            "strong" => Causality::Strong,
            other => return Err(schema(&format!("{path}.causality"), format!("unknown causality `{other}`"))),
        }),
    };
    let mut ports = Vec::new();
    if let Some(ps) = obj.get("ports") {
        for (i, p) in array(ps, &format!("{path}.ports"))?.iter().enumerate() {
            let pp = format!("{path}.ports[{i}]");
            let po = object(p, &pp)?;
            check_keys(po, &pp, &["name", "dir", "type", "init"])?;
            let direction = match str_field(po, &pp, "dir")? {
                "in" => Direction::In,
                "out" => Direction::Out,
                other => return Err(schema(&pp, format!("unknown direction `{other}`"))),
            };
            let init = po
                .get("init")
                .map(|i| fragment(&pp, string(i, &pp)?, |p| p.literal()))
                .transpose()?;
            ports.push(PortDecl {
                name: identifier(&pp, str_field(po, &pp, "name")?)?,
                direction,
                ty: fragment(&pp, str_field(po, &pp, "type")?, |p| p.type_ref())?,
                init,
            });
        }
    }

    let behaviors = ["automaton", "function"]
        .iter()
        .filter(|k| obj.contains_key(**k))
        .count();
    let structural = obj.contains_key("subs") || obj.contains_key("channels");
    if behaviors > 1 || (behaviors == 1 && structural) {
        return Err(schema(path, "a component has either one behavior or a structure"));
    }
    let body = if let Some(a) = obj.get("automaton") {
        BodyDecl::Automaton(automaton(a, &format!("{path}.automaton"))?)
    } else if let Some(f) = obj.get("function") {
        BodyDecl::Function(assignments(f, &format!("{path}.function"))?)
    } else {
        let mut comp = CompositeDecl::default();
        if let Some(subs) = obj.get("subs") {
            for (i, s) in array(subs, &format!("{path}.subs"))?.iter().enumerate() {
                let sp = format!("{path}.subs[{i}]");
                let so = object(s, &sp)?;
                check_keys(so, &sp, &["name", "component"])?;
                comp.subs.push((
                    identifier(&sp, str_field(so, &sp, "name")?)?,
                    identifier(&sp, str_field(so, &sp, "component")?)?,
                ));
            }
        }
        if let Some(chs) = obj.get("channels") {
            for (i, c) in array(chs, &format!("{path}.channels"))?.iter().enumerate() {
                let cp = format!("{path}.channels[{i}]");
                let co = object(c, &cp)?;
                check_keys(co, &cp, &["name", "type", "from", "to"])?;
                comp.channels.push(ChannelDecl {
                    name: identifier(&cp, str_field(co, &cp, "name")?)?,
                    ty: fragment(&cp, str_field(co, &cp, "type")?, |p| p.type_ref())?,
                    from: fragment(&cp, str_field(co, &cp, "from")?, |p| p.endpoint())?,
                    to: fragment(&cp, str_field(co, &cp, "to")?, |p| p.endpoint())?,
                });
            }
        }
        BodyDecl::Composite(comp)
    };
    Ok(ComponentDecl {
        name,
        causality,
        ports,
        body,
    })
}

fn automaton(v: &Json, path: &str) -> PResult<AutomatonDecl> {
    let obj = object(v, path)?;
    check_keys(obj, path, &["states", "initial", "vars", "transitions"])?;
    let states = array(field(obj, path, "states")?, &format!("{path}.states"))?
        .iter()
        .map(|s| identifier(path, string(s, &format!("{path}.states"))?))
        .collect::<PResult<_>>()?;
    let initial = obj
        .get("initial")
        .map(|i| identifier(path, string(i, &format!("{path}.initial"))?))
        .transpose()?;
    let mut variables = Vec::new();
    if let Some(vs) = obj.get("vars") {
        for (i, var) in array(vs, &format!("{path}.vars"))?.iter().enumerate() {
            let vp = format!("{path}.vars[{i}]");
            let vo = object(var, &vp)?;
            check_keys(vo, &vp, &["name", "type", "init"])?;
            variables.push(VarDecl {
                name: identifier(&vp, str_field(vo, &vp, "name")?)?,
                ty: fragment(&vp, str_field(vo, &vp, "type")?, |p| p.type_ref())?,
                init: fragment(&vp, str_field(vo, &vp, "init")?, |p| p.literal())?,
            });
        }
    }
    let mut transitions = Vec::new();
    if let Some(ts) = obj.get("transitions") {
        for (i, t) in array(ts, &format!("{path}.transitions"))?.iter().enumerate() {
            let tp = format!("{path}.transitions[{i}]");
            let to = object(t, &tp)?;
            check_keys(to, &tp, &["from", "to", "patterns", "guard", "emit", "set"])?;
            let mut patterns = Vec::new();
            if let Some(ps) = to.get("patterns") {
                for (port, pat) in object(ps, &format!("{tp}.patterns"))? {
                    let pp = format!("{tp}.patterns.{port}");
                    let text = string(pat, &pp)?;
                    let decl = if text.trim() == "*" {
                        PatternDecl::Any
                    } else {
                        PatternDecl::Lit(fragment(&pp, text, |p| p.literal())?)
                    };
                    patterns.push((identifier(&pp, port)?, decl));
                }
            }
            transitions.push(TransitionDecl {
                from: identifier(&tp, str_field(to, &tp, "from")?)?,
                to: identifier(&tp, str_field(to, &tp, "to")?)?,
                patterns,
                guard: to
                    .get("guard")
                    .map(|g| fragment(&tp, string(g, &tp)?, |p| p.expr()))
                    .transpose()?,
                emit: match to.get("emit") {
                    Some(e) => assignments(e, &format!("{tp}.emit"))?,
                    None => Vec::new(),
                },
                set: match to.get("set") {
                    Some(s) => assignments(s, &format!("{tp}.set"))?,
                    None => Vec::new(),
                },
            });
        }
    }
    Ok(AutomatonDecl {
        states,
        initial,
        variables,
        transitions,
    })
}

fn assignments_json(items: &[(String, Expr)]) -> Json {
    Json::Object(
        items
            .iter()
            .map(|(k, e)| (k.clone(), Json::String(print_expr(e))))
            .collect(),
    )
}

/// Serialize a raw model as an interchange document.
pub fn print_interchange(model: &Model) -> String {
    let types: Vec<Json> = model
        .types
        .iter()
        .map(|t| match &t.def {
            TypeDef::Enum(lits) => json!({ "name": t.name, "enum": lits }),
            TypeDef::Int { lo, hi } => json!({ "name": t.name, "int": [lo, hi] }),
        })
        .collect();
    let components: Vec<Json> = model
        .components
        .iter()
        .map(|c| {
            let mut obj = Map::new();
            obj.insert("name".into(), json!(c.name));
            if let Some(causality) = c.causality {
                obj.insert("causality".into(), json!(causality.to_string()));
            }
            let ports: Vec<Json> = c
                .ports
                .iter()
                .map(|p| {
                    let mut po = Map::new();
                    po.insert("name".into(), json!(p.name));
                    po.insert(
                        "dir".into(),
                        json!(if p.direction == Direction::In { "in" } else { "out" }),
                    );
                    po.insert("type".into(), json!(print_type_ref(&p.ty)));
                    if let Some(init) = &p.init {
                        po.insert("init".into(), json!(print_literal(init)));
                    }
                    Json::Object(po)
                })
                .collect();
            obj.insert("ports".into(), Json::Array(ports));
            match &c.body {
                BodyDecl::Automaton(a) => {
                    let mut ao = Map::new();
                    ao.insert("states".into(), json!(a.states));
                    if let Some(init) = &a.initial {
                        ao.insert("initial".into(), json!(init));
                    }
                    let vars: Vec<Json> = a
                        .variables
                        .iter()
                        .map(|v| json!({ "name": v.name, "type": print_type_ref(&v.ty), "init": print_literal(&v.init) }))
                        .collect();
                    ao.insert("vars".into(), Json::Array(vars));
                    let ts: Vec<Json> = a
                        .transitions
                        .iter()
                        .map(|t| {
                            let mut to = Map::new();
                            to.insert("from".into(), json!(t.from));
                            to.insert("to".into(), json!(t.to));
                            let pats: Map<String, Json> = t
                                .patterns
                                .iter()
                                .map(|(port, p)| {
                                    let text = match p {
                                        PatternDecl::Any => "*".to_string(),
                                        PatternDecl::Lit(l) => print_literal(l),
                                    };
                                    (port.clone(), Json::String(text))
                                })
                                .collect();
                            to.insert("patterns".into(), Json::Object(pats));
                            if let Some(g) = &t.guard {
                                to.insert("guard".into(), json!(print_expr(g)));
                            }
                            to.insert("emit".into(), assignments_json(&t.emit));
                            to.insert("set".into(), assignments_json(&t.set));
                            Json::Object(to)
                        })
                        .collect();
                    ao.insert("transitions".into(), Json::Array(ts));
                    obj.insert("automaton".into(), Json::Object(ao));
                }
                BodyDecl::Function(eqs) => {
                    obj.insert("function".into(), assignments_json(eqs));
                }
                BodyDecl::Composite(comp) => {
                    let subs: Vec<Json> = comp
                        .subs
                        .iter()
                        .map(|(i, c)| json!({ "name": i, "component": c }))
                        .collect();
                    let chans: Vec<Json> = comp
                        .channels
                        .iter()
                        .map(|ch| {
                            json!({
                                "name": ch.name,
                                "type": print_type_ref(&ch.ty),
                                "from": print_endpoint(&ch.from),
                                "to": print_endpoint(&ch.to),
                            })
                        })
                        .collect();
                    obj.insert("subs".into(), Json::Array(subs));
                    obj.insert("channels".into(), Json::Array(chans));
                }
            }
            Json::Object(obj)
        })
        .collect();
    let doc = json!({
        "name": model.name,
        "types": types,
        "components": components,
        "root": model.root,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    text.push('\n');
    text
}
