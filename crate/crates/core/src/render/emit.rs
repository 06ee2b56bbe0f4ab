use std::collections::BTreeMap;

use crate::ir::{CompositeSpec, Formula, FrameKind, SpecFrame, TableCell, TimedTable, Tick, TypeDecl};
use crate::model::{Causality, DataType, STATE_VAR};

use super::document::{DocKind, Document};
use super::printer::{access, formula, formula_with_columns, latex_name, value, Style};
use super::template::{expand_template, TemplateError, TemplateFormat};

/// Anything with a document rendering.
#[derive(Debug, Clone, Copy)]
pub enum SpecItem<'a> {
    Frame(&'a SpecFrame),
    Table(&'a TimedTable),
    Composite(&'a CompositeSpec),
}

/// Emit a LaTeX document for one IR item.
pub fn emit_latex(item: SpecItem<'_>) -> Result<Document, TemplateError> {
    Ok(Document::new(DocKind::Latex, render_item(item, Style::Latex)?))
}

/// Emit a plain-text document for one IR item.
pub fn emit_plaintext(item: SpecItem<'_>, ascii: bool) -> Result<Document, TemplateError> {
    Ok(Document::new(DocKind::PlainText, render_item(item, Style::plain(ascii))?))
}

pub(crate) fn render_item(item: SpecItem<'_>, style: Style) -> Result<String, TemplateError> {
    match item {
        SpecItem::Frame(f) => render_frame(f, style),
        SpecItem::Table(t) => render_table(t, style),
        SpecItem::Composite(c) => render_frame(&c.frame, style),
    }
}

fn format_of(style: Style) -> TemplateFormat {
    match style {
        Style::Latex => TemplateFormat::Latex,
        _ => TemplateFormat::Text,
    }
}

fn type_label(label: &str, style: Style) -> String {
    match style {
        Style::Latex => match label.strip_prefix("Int") {
            Some(range) if range.starts_with('[') => format!("\\fname{{Int}}{range}"),
            _ => format!("\\fname{{{}}}", latex_name(label)),
        },
        _ => label.to_string(),
    }
}

fn declaration(keyword: &str, name: &str, label: &str, style: Style) -> String {
    match style {
        Style::Latex => {
            let mac = match keyword {
                "in" => "\\finput",
                "out" => "\\foutput",
                _ => "\\flocal",
            };
            format!("{mac}{{\\fname{{{}}}}}{{{}}}", latex_name(name), type_label(label, style))
        }
        _ => format!("  {keyword:<3} {name} : {label}"),
    }
}

fn numbered(index: usize, body: &str, style: Style) -> String {
    match style {
        Style::Latex => format!("\\fformula{{{index}}}{{{body}}}"),
        _ => format!("  ({index}) {body}"),
    }
}

fn equation(body: &str, style: Style) -> String {
    match style {
        Style::Latex => format!("\\fequation{{{body}}}"),
        _ => format!("  {body}"),
    }
}

/// `type` declaration of an enumeration or integer alias.
pub fn render_type(t: &TypeDecl, style: Style) -> Result<String, TemplateError> {
    let definition = match (&t.dtype, style) {
        (DataType::Enum(e), Style::Latex) => e
            .literals
            .iter()
            .map(|l| format!("\\fconst{{{}}}", latex_name(l)))
            .collect::<Vec<_>>()
            .join(", "),
        (DataType::Enum(e), _) => format!("{{{}}}", e.literals.join(", ")),
        (DataType::Int { lo, hi }, Style::Latex) => format!("{lo}, \\dots, {hi}"),
        (dtype, _) => dtype.to_string(),
    };
    let name = match style {
        Style::Latex => latex_name(&t.name),
        _ => t.name.clone(),
    };
    expand_template(
        "datatype-decl",
        format_of(style),
        &BTreeMap::from([("name", name), ("definition", definition)]),
    )
}

pub fn render_frame(frame: &SpecFrame, style: Style) -> Result<String, TemplateError> {
    let id = match frame.kind {
        FrameKind::Automaton { .. } => "component-frame",
        FrameKind::Function => "function-frame",
        FrameKind::Composite => "composite-frame",
    };
    let interface: Vec<String> = frame
        .inputs
        .iter()
        .map(|d| declaration("in", &d.name, &d.label, style))
        .chain(frame.outputs.iter().map(|d| declaration("out", &d.name, &d.label, style)))
        .collect();
    let locals: Vec<String> = frame
        .state
        .iter()
        .chain(&frame.vars)
        .chain(&frame.stream_locals)
        .map(|d| declaration("loc", &d.name, &d.label, style))
        .collect();
    let columns = frame.stream_names();
    let render = |f: &Formula| formula_with_columns(f, &columns, style);
    let init: Vec<String> = frame.init.iter().map(|f| equation(&render(f), style)).collect();
    let list = |fs: &[Formula]| -> String {
        fs.iter()
            .enumerate()
            .map(|(i, f)| numbered(i + 1, &render(f), style))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let name = match style {
        Style::Latex => latex_name(&frame.name),
        _ => frame.name.clone(),
    };
    let init_section = match (init.is_empty(), style) {
        (true, _) => String::new(),
        (false, Style::Latex) => format!("\\begin{{initpart}}\n{}\n\\end{{initpart}}", init.join("\n")),
        (false, _) => format!("init\n{}", init.join("\n")),
    };
    let subst = BTreeMap::from([
        ("name", name),
        ("init-section", init_section),
        ("causality", frame.causality.to_string()),
        ("interface", interface.join("\n")),
        ("locals", locals.join("\n")),
        ("init", init.join("\n")),
        ("asm", list(&frame.asm)),
        ("gar", list(&frame.gar)),
    ]);
    expand_template(id, format_of(style), &subst)
}

fn cell(c: &TableCell, style: Style) -> String {
    match c {
        TableCell::DontCare => style.dont_care().to_string(),
        TableCell::Absent => value(&crate::model::Value::Absent, style),
        TableCell::Present => match style {
            Style::Latex => "\\fpresent".into(),
            _ => "*".into(),
        },
        TableCell::Is(f) => formula(f, style),
    }
}

pub fn render_table(table: &TimedTable, style: Style) -> Result<String, TemplateError> {
    let out_at = match table.causality {
        Causality::Weak => Tick::Now,
        Causality::Strong => Tick::Next,
    };
    let mut header = vec![access(STATE_VAR, Tick::Now, style)];
    header.extend(table.inputs.iter().map(|d| access(&d.name, Tick::Now, style)));
    header.push("guard".into());
    header.extend(table.outputs.iter().map(|d| access(&d.name, out_at, style)));
    header.extend(table.vars.iter().map(|d| access(&d.name, Tick::Next, style)));
    header.push(access(STATE_VAR, Tick::Next, style));

    let state = |i: usize| {
        let lit = &table.state_type.literals[i];
        match style {
            Style::Latex => format!("\\fconst{{{}}}", latex_name(lit)),
            _ => lit.clone(),
        }
    };
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![match r.source {
                Some(s) => state(s),
                None => match style {
                    Style::Latex => "\\fconst{else}".into(),
                    _ => "else".into(),
                },
            }];
            cells.extend(r.patterns.iter().map(|c| cell(c, style)));
            cells.push(match &r.guard {
                Some(g) => formula(g, style),
                None => value(&crate::model::Value::Bool(true), style),
            });
            cells.extend(r.outputs.iter().map(|c| cell(c, style)));
            cells.extend(r.updates.iter().map(|c| cell(c, style)));
            cells.push(match r.target {
                Some(s) => state(s),
                None => access(STATE_VAR, Tick::Now, style),
            });
            cells
        })
        .collect();

    let name = match style {
        Style::Latex => latex_name(&table.name),
        _ => table.name.clone(),
    };
    let subst = match style {
        Style::Latex => {
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .map(|c| format!("${c}$"))
                    .collect::<Vec<_>>()
                    .join(" & ")
                    + " \\\\"
            };
            let mut head = header.clone();
            head[1 + table.inputs.len()] = "\\text{guard}".into();
            BTreeMap::from([
                ("name", name),
                ("columns", "l".repeat(header.len())),
                ("header", line(&head)),
                ("rows", rows.iter().map(|r| line(r)).collect::<Vec<_>>().join("\n")),
            ])
        }
        _ => {
            let widths: Vec<usize> = (0..header.len())
                .map(|k| {
                    std::iter::once(&header[k])
                        .chain(rows.iter().map(|r| &r[k]))
                        .map(|s| s.chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                format!("  {}", padded.join(" | ")).trim_end().to_string()
            };
            let rule = widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
            BTreeMap::from([
                ("name", name),
                ("header", line(&header)),
                ("rule", format!("  {rule}")),
                ("rows", rows.iter().map(|r| line(r)).collect::<Vec<_>>().join("\n")),
            ])
        }
    };
    expand_template("timed-table", format_of(style), &subst)
}
