//! Lint for hand-edited plain-text specifications and a structural scanner for
//! emitted LaTeX.

use std::collections::BTreeSet;

use crate::frontend::{Diagnostic, SourceSpan};

use super::catalog::plain_glyphs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Header,
    Init,
    Asm,
    Gar,
}

struct Frame {
    name: String,
    opened: usize,
    declared: BTreeSet<String>,
    part: Part,
    indices: Vec<(usize, usize)>,
}

struct Checker<'a> {
    text: &'a str,
    glyphs: Vec<&'static str>,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn span(&self, line_start: usize, from: usize, to: usize) -> SourceSpan {
        SourceSpan::from_offsets(self.text, line_start + from, line_start + to)
    }

    fn error(&mut self, code: &'static str, message: String, span: SourceSpan) {
        self.out.push(Diagnostic::error(code, message).at(span));
    }

    fn warning(&mut self, code: &'static str, message: String, span: SourceSpan) {
        self.out.push(Diagnostic::warning(code, message).at(span));
    }

    fn close_part(&mut self, frame: &mut Frame) {
        let indices = std::mem::take(&mut frame.indices);
        for (k, (n, at)) in indices.into_iter().enumerate() {
            if n != k + 1 {
                let span = SourceSpan::from_offsets(self.text, at, at + 1);
                self.warning(
                    "non-contiguous-enumeration",
                    format!("formula ({n}) in `{}` should be ({})", frame.name, k + 1),
                    span,
                );
                break;
            }
        }
    }

    /// Tokenize one formula line: report unknown glyphs and, inside a frame,
    /// undeclared stream names.
    fn formula(&mut self, line: &str, start: usize, offset: usize, declared: Option<&BTreeSet<String>>) {
        #[derive(PartialEq)]
        enum Tok<'s> {
            Ident(&'s str, usize),
            Number,
            Open,
            Close,
            Other,
        }
        let mut toks = Vec::new();
        let bytes = line.as_bytes();
        let mut i = offset;
        while i < line.len() {
            let rest = &line[i..];
            let c = rest.chars().next().expect("in bounds");
            if c.is_whitespace() {
                i += c.len_utf8();
            } else if c.is_ascii_alphabetic() || c == '_' {
                let len = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len());
                toks.push(Tok::Ident(&rest[..len], i));
                i += len;
            } else if c.is_ascii_digit() {
                while i < line.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push(Tok::Number);
            } else if c == '(' {
                toks.push(Tok::Open);
                i += 1;
            } else if c == ')' {
                toks.push(Tok::Close);
                i += 1;
            } else if matches!(c, ',' | ';' | '[' | ']' | '|' | '*' | '—') {
                toks.push(Tok::Other);
                i += c.len_utf8();
            } else if let Some(g) = self.glyphs.iter().find(|g| rest.starts_with(**g)) {
                toks.push(Tok::Other);
                i += g.len();
            } else {
                let span = self.span(start, i, i + c.len_utf8());
                self.error("unknown-operator", format!("unknown operator `{c}`"), span);
                toks.push(Tok::Other);
                i += c.len_utf8();
            }
        }
        let Some(declared) = declared else { return };
        let mut k = 0;
        while k + 1 < toks.len() {
            if let (Tok::Ident(name, at), Tok::Open) = (&toks[k], &toks[k + 1]) {
                let access = matches!(toks.get(k + 2), Some(Tok::Ident("t", _)) | Some(Tok::Number));
                let mut names = Vec::new();
                if access {
                    names.push((*name, *at));
                } else if *name != "sat" {
                    let mut j = k + 2;
                    while j < toks.len() && toks[j] != Tok::Close {
                        if let Tok::Ident(arg, at) = toks[j] {
                            names.push((arg, at));
                        }
                        j += 1;
                    }
                }
                for (n, at) in names {
                    if !declared.contains(n) {
                        let span = self.span(start, at, at + n.len());
                        self.error("undeclared-name", format!("`{n}` is not declared in this frame"), span);
                    }
                }
            }
            k += 1;
        }
    }
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// Syntax check of a plain-text specification. Findings only; never fails.
pub fn check_spec_source(text: &str) -> Vec<Diagnostic> {
    let mut ck = Checker {
        text,
        glyphs: plain_glyphs(),
        out: Vec::new(),
    };
    let mut frame: Option<Frame> = None;
    let mut table: Option<(String, usize)> = None;
    let mut start = 0;
    for raw in text.split_inclusive('\n') {
        let line_start = start;
        start += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim();
        let indent = line.len() - line.trim_start().len();
        let full = |ck: &Checker| ck.span(line_start, indent, line.len());
        if trimmed.is_empty() || trimmed.starts_with("--") {
            continue;
        }
        let w = words(trimmed);

        if let Some((name, _)) = &table {
            if trimmed == "end table" {
                table = None;
            } else if w[0] == "end" || w[0] == "spec" || w[0] == "table" {
                let msg = format!("table `{name}` is not closed before `{}`", w[0]);
                ck.error("unbalanced-frame", msg, full(&ck));
                table = None;
            } else {
                if !trimmed.chars().all(|c| c == '-' || c == '+' || c == ' ') {
                    ck.formula(line, line_start, 0, None);
                }
                continue;
            }
            if trimmed == "end table" {
                continue;
            }
        }

        match w[0] {
            "spec" => {
                if let Some(f) = frame.take() {
                    let msg = format!("frame `{}` is not closed before `spec`", f.name);
                    ck.error("unbalanced-frame", msg, full(&ck));
                }
                let causality_ok = w.len() == 3 && matches!(w[2], "(weak)" | "(strong)");
                if w.len() < 2 || !causality_ok {
                    ck.error(
                        "malformed-header",
                        "expected `spec Name (weak|strong)`".into(),
                        full(&ck),
                    );
                }
                frame = Some(Frame {
                    name: w.get(1).unwrap_or(&"").to_string(),
                    opened: line_start,
                    declared: BTreeSet::from(["t".to_string()]),
                    part: Part::Header,
                    indices: Vec::new(),
                });
            }
            "table" => {
                if let Some(f) = frame.take() {
                    let msg = format!("frame `{}` is not closed before `table`", f.name);
                    ck.error("unbalanced-frame", msg, full(&ck));
                }
                table = Some((w.get(1).unwrap_or(&"").to_string(), line_start));
            }
            "type" if frame.is_none() => {}
            "end" => match frame.take() {
                Some(mut f) => {
                    ck.close_part(&mut f);
                    if w.get(1) != Some(&f.name.as_str()) {
                        let msg = format!("`{trimmed}` closes frame `{}`", f.name);
                        ck.error("unbalanced-frame", msg, full(&ck));
                    }
                }
                None => ck.error("unbalanced-frame", format!("`{trimmed}` without an open frame"), full(&ck)),
            },
            _ => {
                let Some(f) = frame.as_mut() else {
                    ck.error("unexpected-line", format!("unexpected `{trimmed}` outside a frame"), full(&ck));
                    continue;
                };
                let part = match trimmed {
                    "init" => Some(Part::Init),
                    "asm" => Some(Part::Asm),
                    "gar" => Some(Part::Gar),
                    _ => None,
                };
                if let Some(p) = part {
                    let mut f = frame.take().expect("open frame");
                    ck.close_part(&mut f);
                    f.part = p;
                    frame = Some(f);
                    continue;
                }
                match (f.part, w[0]) {
                    (Part::Header, "in" | "out" | "univ" | "loc") => {
                        if w.len() >= 4 && w[2] == ":" {
                            f.declared.insert(w[1].to_string());
                        } else {
                            ck.error(
                                "malformed-declaration",
                                format!("expected `{} name : Type`", w[0]),
                                full(&ck),
                            );
                        }
                    }
                    (Part::Header, _) => {
                        ck.error("unexpected-line", format!("unexpected `{trimmed}` in frame header"), full(&ck));
                    }
                    (Part::Init, _) => {
                        let declared = f.declared.clone();
                        ck.formula(line, line_start, indent, Some(&declared));
                    }
                    (Part::Asm | Part::Gar, _) => {
                        let number = trimmed
                            .strip_prefix('(')
                            .and_then(|r| r.split_once(')'))
                            .and_then(|(n, _)| n.parse::<usize>().ok().map(|n| (n, n.to_string().len() + 2)));
                        match number {
                            Some((n, len)) => {
                                f.indices.push((n, line_start + indent));
                                let declared = f.declared.clone();
                                ck.formula(line, line_start, indent + len, Some(&declared));
                            }
                            None => ck.error(
                                "unnumbered-formula",
                                "formulas in asm and gar are numbered `(n)`".into(),
                                full(&ck),
                            ),
                        }
                    }
                }
            }
        }
    }
    if let Some(f) = frame {
        let span = SourceSpan::from_offsets(text, f.opened, f.opened + 4);
        ck.error("unbalanced-frame", format!("frame `{}` is never closed", f.name), span);
    }
    if let Some((name, at)) = table {
        let span = SourceSpan::from_offsets(text, at, at + 5);
        ck.error("unbalanced-frame", format!("table `{name}` is never closed"), span);
    }
    ck.out
}

/// Balanced `\begin{..}`/`\end{..}` pairs and braces in a LaTeX text.
pub fn check_latex_structure(text: &str) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut braces: Vec<usize> = Vec::new();
    let mut envs: Vec<(String, usize)> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let env_name = |from: usize| -> Option<(String, usize)> {
        let rest = text[from..].strip_prefix('{')?;
        let end = rest.find('}')?;
        Some((rest[..end].to_string(), from + end + 2))
    };
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                let rest = &text[i..];
                if let Some(after) = rest.strip_prefix("\\begin").map(|_| i + 6) {
                    if let Some((name, next)) = env_name(after) {
                        envs.push((name, i));
                        i = next;
                        continue;
                    }
                } else if let Some(after) = rest.strip_prefix("\\end").map(|_| i + 4) {
                    if let Some((name, next)) = env_name(after) {
                        match envs.pop() {
                            Some((open, _)) if open == name => {}
                            Some((open, _)) => out.push(
                                Diagnostic::error("unbalanced-environment", format!("`\\end{{{name}}}` closes `{open}`"))
                                    .at(SourceSpan::from_offsets(text, i, next)),
                            ),
                            None => out.push(
                                Diagnostic::error("unbalanced-environment", format!("`\\end{{{name}}}` without begin"))
                                    .at(SourceSpan::from_offsets(text, i, next)),
                            ),
                        }
                        i = next;
                        continue;
                    }
                }
                i += 2;
            }
            b'%' => {
                i = text[i..].find('\n').map_or(bytes.len(), |n| i + n);
            }
            b'{' => {
                braces.push(i);
                i += 1;
            }
            b'}' => {
                if braces.pop().is_none() {
                    out.push(
                        Diagnostic::error("unbalanced-brace", "unmatched `}`")
                            .at(SourceSpan::from_offsets(text, i, i + 1)),
                    );
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    for at in braces {
        out.push(Diagnostic::error("unbalanced-brace", "unclosed `{`").at(SourceSpan::from_offsets(text, at, at + 1)));
    }
    for (name, at) in envs {
        out.push(
            Diagnostic::error("unbalanced-environment", format!("`{name}` is never closed"))
                .at(SourceSpan::from_offsets(text, at, at + 6)),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::Severity;

    const ECHO: &str = "\
type Signal = {on, off}
spec Echo (weak)
  in  x : Signal
  out y : Signal
  univ t : Nat
  loc st : EchoState
init
  st(0) = Idle
asm
  (1) true
gar
  (1) st(t) = Idle ∧ x(t) = on → y(t) = x(t) ∧ st(t+1) = Busy
  (2) ¬(st(t) = Idle) → y(t) = ε /\\ st(t+1) = st(t)
end Echo
table Echo
  st(t) | x(t) | y(t)
  ------+------+-----
  Idle  | on   | —
end table
";

    fn codes(text: &str) -> Vec<&'static str> {
        check_spec_source(text).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn clean_source() {
        assert!(check_spec_source(ECHO).is_empty(), "{:?}", check_spec_source(ECHO));
    }

    #[test]
    fn gap_in_numbering_warns() {
        let text = ECHO.replace("(2) ¬", "(3) ¬");
        let d = check_spec_source(&text);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "non-contiguous-enumeration");
        assert_eq!(d[0].severity, Severity::Warning);
    }

    #[test]
    fn unknown_glyph() {
        let text = ECHO.replace("→ y(t) = x(t)", "⇒ y(t) = x(t)");
        let d = check_spec_source(&text);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "unknown-operator");
        assert_eq!(d[0].span.as_ref().map(|s| s.line), Some(12));
    }

    #[test]
    fn undeclared_and_unbalanced() {
        assert_eq!(codes(&ECHO.replace("x(t) = on", "z(t) = on")), ["undeclared-name"]);
        assert_eq!(codes(&ECHO.replace("end Echo\n", "")), ["unbalanced-frame"]);
        assert_eq!(codes(&ECHO.replace("end table\n", "")), ["unbalanced-frame"]);
        assert_eq!(codes("end Echo\n"), ["unbalanced-frame"]);
    }

    #[test]
    fn latex_scanner() {
        assert!(check_latex_structure("\\begin{a}{x\\{}\\end{a} % {\n").is_empty());
        assert_eq!(check_latex_structure("\\begin{a}\\end{b}").len(), 1);
        assert_eq!(check_latex_structure("{").len(), 1);
        assert_eq!(check_latex_structure("\\begin{a}").len(), 1);
    }
}
