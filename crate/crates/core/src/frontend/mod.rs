//! Textual model language and JSON interchange frontends.

mod diag;
mod interchange;
mod lexer;
mod parser;
mod printer;

pub use diag::{has_errors, Diagnostic, Severity, SourceSpan};
pub use interchange::{parse_interchange, print_interchange};
pub use lexer::KEYWORDS;
pub use parser::{parse_dsl, parse_dsl_with_spans, SpanTable};
pub use printer::{print_dsl, print_expr};

use crate::model::{self, raw};

/// Canonical text of a resolved model.
pub fn print_resolved(model: &model::Model) -> String {
    print_dsl(&model.to_raw())
}

/// Turn a resolve failure into a located diagnostic.
pub fn resolve_diagnostic(err: &model::ResolveError, spans: &SpanTable) -> Diagnostic {
    let code = match err {
        model::ResolveError::UnknownReference { .. } => "unknown-reference",
        model::ResolveError::DuplicateName { .. } => "duplicate-name",
        model::ResolveError::ReservedName { .. } => "reserved-name",
        model::ResolveError::RecursiveComposition { .. } => "recursive-composition",
        model::ResolveError::FanIn { .. } => "fan-in",
        model::ResolveError::UnconnectedPort { .. } => "unconnected-port",
        model::ResolveError::Invalid { .. } => "invalid-model",
    };
    let mut d = Diagnostic::error(code, err.to_string());
    if let Some(span) = lookup_span(spans, err.location()) {
        d = d.at(span);
    }
    d
}

/// Find the span of a location, falling back to enclosing locations.
pub fn lookup_span(spans: &SpanTable, location: &str) -> Option<SourceSpan> {
    let mut loc = location;
    loop {
        if let Some(span) = spans.get(loc) {
            return Some(span.clone());
        }
        loc = &loc[..loc.rfind(", ")?];
    }
}

/// Parse and resolve in one step.
pub fn load_dsl(text: &str) -> Result<(model::Model, SpanTable), Vec<Diagnostic>> {
    let (raw, spans) = parse_dsl_with_spans(text)?;
    let resolved = model::resolve(&raw).map_err(|e| vec![resolve_diagnostic(&e, &spans)])?;
    Ok((resolved, spans))
}

/// Parse either frontend according to a file extension (`afm` or `json`).
pub fn parse_by_extension(ext: &str, text: &str) -> Result<(raw::Model, SpanTable), Vec<Diagnostic>> {
    match ext {
        "json" => parse_interchange(text).map(|m| (m, SpanTable::new())),
        _ => parse_dsl_with_spans(text),
    }
}
