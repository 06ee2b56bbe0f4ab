use super::diag::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "..", "->", "==", "!=", "<=", "&&", "||", "{", "}", "(", ")", "[", "]", ":", ",", ";", "=",
    "<", "+", "-", ".", "*", "!",
];

pub const KEYWORDS: &[&str] = &[
    "model", "type", "component", "in", "out", "var", "automaton", "state", "initial", "when",
    "emit", "set", "sub", "channel", "function", "root", "enum", "Int", "Bool", "eps", "true",
    "false", "if", "weak", "strong",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            i = text[i..].find('\n').map_or(bytes.len(), |n| i + n);
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                start,
                end: i,
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse::<u64>().map_err(|_| {
                Diagnostic::error("syntax", "integer literal out of range")
                    .at(SourceSpan::from_offsets(text, start, i))
            })?;
            tokens.push(Token {
                tok: Tok::Int(n),
                start,
                end: i,
            });
            continue;
        }
        match SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            Some(sym) => {
                i += sym.len();
                tokens.push(Token {
                    tok: Tok::Sym(sym),
                    start,
                    end: i,
                });
            }
            None => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Diagnostic::error("syntax", format!("unexpected character `{ch}`"))
                    .at(SourceSpan::from_offsets(text, start, start + ch.len_utf8())));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        start: bytes.len(),
        end: bytes.len(),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_symbols_longest_first() {
        let toks: Vec<Tok> = lex("a<=b..c // note\n->").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::Sym("<="),
                Tok::Ident("b".into()),
                Tok::Sym(".."),
                Tok::Ident("c".into()),
                Tok::Sym("->"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn rejects_stray_character() {
        let err = lex("model M { # }").unwrap_err();
        assert_eq!(err.span.unwrap().column, 11);
    }
}
