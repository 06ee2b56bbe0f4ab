use std::fmt::Write;

use thiserror::Error;

use crate::model::{Component, DataType, Value};

use super::step::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Input,
    Output,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    pub name: String,
    pub kind: StreamKind,
    pub dtype: DataType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceInfo {
    pub path: String,
    pub component: String,
    /// Control states; empty for function components.
    pub states: Vec<String>,
    pub vars: Vec<String>,
}

/// A finite prefix of a run: one valuation per slot plus the snapshots of
/// every atomic instance before each slot and after the last one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub model: String,
    pub component: String,
    pub horizon: usize,
    pub streams: Vec<Stream>,
    /// `slots[t][k]` is the value of `streams[k]` at slot `t`.
    pub slots: Vec<Vec<Value>>,
    pub instances: Vec<InstanceInfo>,
    /// `snapshots[t][i]` for `t` in `0..=horizon`.
    pub snapshots: Vec<Vec<Snapshot>>,
    /// Traces of the direct sub-instances of a composite, in declaration order.
    pub parts: Vec<Trace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown name `{name}`")]
    UnknownName { line: usize, name: String },
    #[error("line {line}: `{value}` is not a value of {dtype} (for `{name}`)")]
    BadValue {
        line: usize,
        name: String,
        value: String,
        dtype: String,
    },
}

impl Trace {
    pub fn stream(&self, name: &str) -> Option<usize> {
        self.streams.iter().position(|s| s.name == name)
    }

    pub fn value(&self, t: usize, name: &str) -> Option<&Value> {
        self.slots.get(t)?.get(self.stream(name)?)
    }

    /// The slot values of all streams of the given kind.
    pub fn columns(&self, kind: StreamKind) -> Vec<Vec<Value>> {
        let idx: Vec<usize> = (0..self.streams.len()).filter(|k| self.streams[*k].kind == kind).collect();
        self.slots
            .iter()
            .map(|row| idx.iter().map(|k| row[*k].clone()).collect())
            .collect()
    }

    /// Line-oriented export; `ascii` spells ε as `eps`.
    pub fn export(&self, ascii: bool) -> String {
        let show = |v: &Value| if ascii { v.ascii() } else { v.to_string() };
        let mut out = String::new();
        let _ = writeln!(out, "# model {}", self.model);
        let _ = writeln!(out, "# component {}", self.component);
        let _ = writeln!(out, "# horizon {}", self.horizon);
        for t in 0..=self.horizon {
            let mut fields = vec![if t < self.horizon { t.to_string() } else { "end".into() }];
            if t < self.horizon {
                for (s, v) in self.streams.iter().zip(&self.slots[t]) {
                    fields.push(format!("{}={}", s.name, show(v)));
                }
            }
            for (info, snap) in self.instances.iter().zip(&self.snapshots[t]) {
                if let Some(st) = snap.state {
                    fields.push(format!("state={}:{}", info.path, info.states[st]));
                }
                for (name, v) in info.vars.iter().zip(&snap.vars) {
                    fields.push(format!("{}.{name}={}", info.path, show(v)));
                }
            }
            out.push_str(&fields.join("; "));
            out.push('\n');
        }
        out
    }
}

/// One parsed line of a trace or input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub line: usize,
    /// `None` for the closing `end` line.
    pub slot: Option<usize>,
    pub fields: Vec<(String, String)>,
}

/// Split a trace or input file into slot lines. `#` lines and blank lines are skipped.
pub fn parse_lines(text: &str) -> Result<Vec<TraceLine>, TraceError> {
    let mut lines = Vec::new();
    let mut expected = 0usize;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut parts = raw.split(';').map(str::trim);
        let head = parts.next().unwrap_or_default();
        let slot = if head == "end" {
            None
        } else {
            let t: usize = head.parse().map_err(|_| TraceError::Syntax {
                line,
                message: format!("expected a slot number or `end`, found `{head}`"),
            })?;
            if t != expected {
                return Err(TraceError::Syntax {
                    line,
                    message: format!("expected slot {expected}, found {t}"),
                });
            }
            expected += 1;
            Some(t)
        };
        let mut fields = Vec::new();
        for f in parts.filter(|f| !f.is_empty()) {
            let (k, v) = f.split_once('=').ok_or_else(|| TraceError::Syntax {
                line,
                message: format!("expected `name=value`, found `{f}`"),
            })?;
            fields.push((k.trim().to_string(), v.trim().to_string()));
        }
        lines.push(TraceLine { line, slot, fields });
    }
    Ok(lines)
}

/// Parse a value of `dtype`; `ε` and `eps` denote the empty slot.
pub fn parse_value(text: &str, dtype: &DataType) -> Option<Value> {
    if text == "ε" || text == "eps" {
        return Some(Value::Absent);
    }
    let v = match dtype {
        DataType::Bool => Value::Bool(text.parse().ok()?),
        DataType::Int { .. } => Value::Int(text.parse().ok()?),
        DataType::Enum(e) => Value::Enum(crate::model::EnumLit::new(e.clone(), e.position(text)?)),
    };
    dtype.contains(&v).then_some(v)
}

/// Read the input slots of `component` from trace lines. Omitted inputs are ε;
/// fields naming outputs or instance state are ignored.
pub fn bind_inputs(component: &Component, lines: &[TraceLine]) -> Result<Vec<Vec<Value>>, TraceError> {
    let mut rows = Vec::new();
    for l in lines.iter().filter(|l| l.slot.is_some()) {
        let mut row = vec![Value::Absent; component.inputs.len()];
        for (k, v) in &l.fields {
            if let Some(i) = component.inputs.iter().position(|p| &p.name == k) {
                let dtype = &component.inputs[i].ty.dtype;
                row[i] = parse_value(v, dtype).ok_or_else(|| TraceError::BadValue {
                    line: l.line,
                    name: k.clone(),
                    value: v.clone(),
                    dtype: dtype.to_string(),
                })?;
            } else if !(k == "state" || k.contains('.') || component.outputs.iter().any(|p| &p.name == k))
                && component.composite().is_none_or(|c| c.channels.iter().all(|ch| &ch.name != k))
            {
                return Err(TraceError::UnknownName {
                    line: l.line,
                    name: k.clone(),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rebuild the root-level streams and snapshots of an exported trace of an
/// atomic component. Every stream must be present on every slot line.
pub fn parse_atomic_trace(
    model: &str,
    component: &Component,
    text: &str,
) -> Result<Trace, TraceError> {
    let lines = parse_lines(text)?;
    let inputs = bind_inputs(component, &lines)?;
    let horizon = inputs.len();
    let streams: Vec<Stream> = component
        .inputs
        .iter()
        .map(|p| (p, StreamKind::Input))
        .chain(component.outputs.iter().map(|p| (p, StreamKind::Output)))
        .map(|(p, kind)| Stream {
            name: p.name.clone(),
            kind,
            dtype: p.ty.dtype.clone(),
        })
        .collect();
    let info = InstanceInfo {
        path: component.name.clone(),
        component: component.name.clone(),
        states: component.automaton().map_or_else(Vec::new, |a| a.states.clone()),
        vars: component.variables().iter().map(|v| v.name.clone()).collect(),
    };
    let mut slots = Vec::new();
    let mut snapshots = Vec::new();
    for l in &lines {
        let get = |name: &str| l.fields.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str());
        if l.slot.is_some() {
            let mut row = Vec::new();
            for s in &streams {
                let text = get(&s.name).unwrap_or("ε");
                row.push(parse_value(text, &s.dtype).ok_or_else(|| TraceError::BadValue {
                    line: l.line,
                    name: s.name.clone(),
                    value: text.into(),
                    dtype: s.dtype.to_string(),
                })?);
            }
            slots.push(row);
        }
        let state = match component.automaton() {
            Some(a) => {
                let text = get("state").ok_or_else(|| TraceError::Syntax {
                    line: l.line,
                    message: "missing `state=` field".into(),
                })?;
                let name = text.rsplit_once(':').map_or(text, |(_, s)| s);
                Some(a.states.iter().position(|s| s == name).ok_or_else(|| TraceError::UnknownName {
                    line: l.line,
                    name: name.into(),
                })?)
            }
            None => None,
        };
        let mut vars = Vec::new();
        for v in component.variables() {
            let key = format!("{}.{}", info.path, v.name);
            let text = get(&key).ok_or_else(|| TraceError::Syntax {
                line: l.line,
                message: format!("missing `{key}=` field"),
            })?;
            vars.push(parse_value(text, &v.ty.dtype).ok_or_else(|| TraceError::BadValue {
                line: l.line,
                name: key.clone(),
                value: text.into(),
                dtype: v.ty.dtype.to_string(),
            })?);
        }
        snapshots.push(Snapshot { state, vars });
    }
    if snapshots.len() != horizon + 1 {
        return Err(TraceError::Syntax {
            line: lines.last().map_or(1, |l| l.line),
            message: "a trace ends with one `end` line".into(),
        });
    }
    Ok(Trace {
        model: model.into(),
        component: component.name.clone(),
        horizon,
        streams,
        slots,
        instances: vec![info],
        snapshots: snapshots.into_iter().map(|s| vec![s]).collect(),
        parts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::load_dsl;
    use crate::semantics::simulate;

    const ECHO: &str = "model E {
        type Signal = enum { on, off }
        component Echo (weak) {
            in x: Signal
            out y: Signal
            automaton {
                state Idle
                state Busy
                initial Idle
                var k: Int[0..2] = 0
                when Idle -> Busy [x = on] emit y = x set k = k + 1
                when Busy -> Idle [x = off]
            }
        }
        root Echo
    }";

    #[test]
    fn export_parse_round_trip() {
        let (m, _) = load_dsl(ECHO).unwrap();
        let c = m.root_component();
        let on = parse_value("on", &c.inputs[0].ty.dtype).unwrap();
        let tr = simulate(&m, m.root, &[vec![on.clone()], vec![Value::Absent], vec![on]]).unwrap();
        for ascii in [false, true] {
            let text = tr.export(ascii);
            assert!(text.ends_with("end; state=Echo:Busy; Echo.k=1\n"), "{text}");
            assert_eq!(parse_atomic_trace("E", c, &text).unwrap(), tr);
        }
    }

    #[test]
    fn input_files_default_to_absent() {
        let (m, _) = load_dsl(ECHO).unwrap();
        let lines = parse_lines("0; x=on\n1\n2; x=eps\n").unwrap();
        let rows = bind_inputs(m.root_component(), &lines).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[1][0].is_absent() && rows[2][0].is_absent());
        assert!(bind_inputs(m.root_component(), &parse_lines("0; q=on").unwrap()).is_err());
        assert!(parse_lines("1; x=on").is_err());
    }
}
