//! Deterministic LaTeX and plain-text emission.

pub mod catalog;
pub mod check;
pub mod document;
pub mod emit;
pub mod printer;
pub mod template;

pub use catalog::{entry, entry_for, listing, operators_markdown, Category, OpId, OperatorEntry, CATALOG};
pub use check::{check_latex_structure, check_spec_source};
pub use document::{component_document, sha256_hex, DocKind, Document};
pub use emit::{emit_latex, emit_plaintext, render_frame, render_table, render_type, SpecItem};
pub use printer::{formula, Style};
pub use template::{expand_template, template_body, template_ids, TemplateError, TemplateFormat, TEMPLATE_DIR_VAR};
