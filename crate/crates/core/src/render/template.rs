use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

/// Environment variable naming a directory that replaces the built-in templates.
pub const TEMPLATE_DIR_VAR: &str = "FOCUSGEN_TEMPLATES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateFormat {
    Text,
    Latex,
}

impl TemplateFormat {
    fn extension(self) -> &'static str {
        match self {
            TemplateFormat::Text => "txt",
            TemplateFormat::Latex => "tex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("no template `{0}`")]
    MissingTemplate(String),
    #[error("placeholder `{0}` is not filled")]
    PlaceholderUnfilled(String),
}

pub struct TemplateSpec {
    pub id: &'static str,
    pub required: &'static [&'static str],
    text: &'static str,
    latex: &'static str,
}

pub const TEMPLATES: &[TemplateSpec] = &[
    TemplateSpec {
        id: "component-frame",
        required: &["name", "causality", "interface", "asm", "gar"],
        text: include_str!("../../templates/component-frame.txt.tmpl"),
        latex: include_str!("../../templates/component-frame.tex.tmpl"),
    },
    TemplateSpec {
        id: "function-frame",
        required: &["name", "causality", "interface", "asm", "gar"],
        text: include_str!("../../templates/function-frame.txt.tmpl"),
        latex: include_str!("../../templates/function-frame.tex.tmpl"),
    },
    TemplateSpec {
        id: "composite-frame",
        required: &["name", "causality", "interface", "asm", "gar"],
        text: include_str!("../../templates/composite-frame.txt.tmpl"),
        latex: include_str!("../../templates/composite-frame.tex.tmpl"),
    },
    TemplateSpec {
        id: "timed-table",
        required: &["name", "header", "rows"],
        text: include_str!("../../templates/timed-table.txt.tmpl"),
        latex: include_str!("../../templates/timed-table.tex.tmpl"),
    },
    TemplateSpec {
        id: "datatype-decl",
        required: &["name", "definition"],
        text: include_str!("../../templates/datatype-decl.txt.tmpl"),
        latex: include_str!("../../templates/datatype-decl.tex.tmpl"),
    },
];

pub fn template_ids() -> impl Iterator<Item = &'static str> {
    TEMPLATES.iter().map(|t| t.id)
}

fn spec(id: &str) -> Result<&'static TemplateSpec, TemplateError> {
    TEMPLATES
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| TemplateError::MissingTemplate(id.to_string()))
}

/// The template body, read from the override directory when one is configured.
pub fn template_body(id: &str, format: TemplateFormat) -> Result<String, TemplateError> {
    let t = spec(id)?;
    if let Some(dir) = std::env::var_os(TEMPLATE_DIR_VAR) {
        let path = PathBuf::from(dir).join(format!("{id}.{}.tmpl", format.extension()));
        return std::fs::read_to_string(&path)
            .map_err(|_| TemplateError::MissingTemplate(path.display().to_string()));
    }
    Ok(match format {
        TemplateFormat::Text => t.text,
        TemplateFormat::Latex => t.latex,
    }
    .to_string())
}

/// Expand `{{name}}` placeholders. Required placeholders must be supplied;
/// others default to empty, and a line holding only an empty placeholder is dropped.
pub fn expand_template(
    id: &str,
    format: TemplateFormat,
    substitution: &BTreeMap<&str, String>,
) -> Result<String, TemplateError> {
    let t = spec(id)?;
    if let Some(missing) = t.required.iter().find(|r| !substitution.contains_key(*r)) {
        return Err(TemplateError::PlaceholderUnfilled(missing.to_string()));
    }
    let body = template_body(id, format)?;
    Ok(expand(&body, substitution))
}

fn placeholder_at(s: &str) -> Option<(&str, usize)> {
    let rest = s.strip_prefix("{{")?;
    let end = rest.find("}}")?;
    let name = &rest[..end];
    let valid = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    valid.then_some((name, end + 4))
}

fn expand(body: &str, substitution: &BTreeMap<&str, String>) -> String {
    let mut out = String::with_capacity(body.len());
    for line in body.split_inclusive('\n') {
        let content = line.trim_end_matches('\n');
        if let Some((name, len)) = placeholder_at(content.trim()) {
            if len == content.trim().len() && substitution.get(name).is_none_or(|v| v.is_empty()) {
                continue;
            }
        }
        let mut i = 0;
        while i < line.len() {
            if let Some((name, len)) = placeholder_at(&line[i..]) {
                if let Some(v) = substitution.get(name) {
                    out.push_str(v);
                }
                i += len;
            } else {
                let c = line[i..].chars().next().expect("in bounds");
                out.push(c);
                i += c.len_utf8();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subst(pairs: &[(&'static str, &str)]) -> BTreeMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn expands_braced_placeholders() {
        let s = subst(&[("name", "Echo")]);
        assert_eq!(expand("\\begin{x}{{{name}}}\n", &s), "\\begin{x}{Echo}\n");
    }

    #[test]
    fn drops_empty_placeholder_lines() {
        let s = subst(&[("a", "A")]);
        assert_eq!(expand("x\n  {{b}}\n{{a}}\n", &s), "x\nA\n");
    }

    #[test]
    fn errors() {
        assert_eq!(
            expand_template("nope", TemplateFormat::Text, &BTreeMap::new()),
            Err(TemplateError::MissingTemplate("nope".into()))
        );
        assert_eq!(
            expand_template("datatype-decl", TemplateFormat::Text, &subst(&[("definition", "{a}")])),
            Err(TemplateError::PlaceholderUnfilled("name".into()))
        );
    }

    #[test]
    fn every_required_placeholder_occurs() {
        for t in TEMPLATES {
            for body in [t.text, t.latex] {
                for r in t.required {
                    assert!(body.contains(&format!("{{{{{r}}}}}")), "{} lacks {r}", t.id);
                }
            }
        }
    }
}
