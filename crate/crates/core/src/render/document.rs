use sha2::{Digest, Sha256};

use crate::ir::{build_timed_table, lower_composite, lower_component, SpecFrame};
use crate::model::{Body, Model};

use super::emit::{render_frame, render_table, render_type};
use super::printer::Style;
use super::template::TemplateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocKind {
    Latex,
    PlainText,
}

impl DocKind {
    pub fn extension(self) -> &'static str {
        match self {
            DocKind::Latex => "spec.tex",
            DocKind::PlainText => "spec.txt",
        }
    }

    fn comment(self) -> &'static str {
        match self {
            DocKind::Latex => "%",
            DocKind::PlainText => "--",
        }
    }
}

/// A rendered document; its checksum covers the body and is recorded in a trailer line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub kind: DocKind,
    pub body: String,
    pub checksum: String,
}

impl Document {
    pub fn new(kind: DocKind, body: String) -> Self {
        let checksum = sha256_hex(body.as_bytes());
        Self { kind, body, checksum }
    }

    /// Body followed by the checksum trailer.
    pub fn text(&self) -> String {
        format!("{}{} checksum sha256:{}\n", self.body, self.kind.comment(), self.checksum)
    }

    /// The checksum recorded in a document's trailer, if any.
    pub fn recorded_checksum(text: &str) -> Option<&str> {
        Self::split_trailer(text).1
    }

    /// Split a stored document into its body and recorded checksum.
    pub fn split_trailer(text: &str) -> (&str, Option<&str>) {
        let trimmed = text.trim_end_matches('\n');
        let start = trimmed.rfind('\n').map_or(0, |i| i + 1);
        match trimmed[start..].split_once("checksum sha256:") {
            Some((_, h)) => (&text[..start], Some(h.trim())),
            None => (text, None),
        }
    }

    /// Whether a stored document's body still hashes to its recorded checksum.
    pub fn is_intact(text: &str) -> bool {
        match Self::split_trailer(text) {
            (body, Some(sum)) => sha256_hex(body.as_bytes()) == sum,
            _ => false,
        }
    }
}

/// SHA-256 of arbitrary bytes, hex encoded.
pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// The complete document of one component: preamble notes, datatype
/// declarations, the frame and, for automata, the timed table.
pub fn component_document(
    model: &Model,
    component: usize,
    deterministic: bool,
    kind: DocKind,
    ascii: bool,
) -> Result<Document, TemplateError> {
    let style = match kind {
        DocKind::Latex => Style::Latex,
        DocKind::PlainText => Style::plain(ascii),
    };
    let c = &model.components[component];
    let frame: SpecFrame = match &c.body {
        Body::Composite(_) => lower_composite(model, component).frame,
        _ => lower_component(model, component, deterministic),
    };
    let mut sections = Vec::new();
    if !frame.notes.is_empty() {
        let comment = kind.comment();
        sections.push(
            frame
                .notes
                .iter()
                .map(|n| format!("{comment} {n}\n"))
                .collect::<String>(),
        );
    }
    if !frame.types.is_empty() {
        sections.push(
            frame
                .types
                .iter()
                .map(|t| render_type(t, style))
                .collect::<Result<String, _>>()?,
        );
    }
    sections.push(render_frame(&frame, style)?);
    if c.automaton().is_some() {
        sections.push(render_table(&build_timed_table(c), style)?);
    }
    Ok(Document::new(kind, sections.join("\n")))
}
