use std::collections::BTreeMap;

use super::diag::{Diagnostic, SourceSpan};
use super::lexer::{is_keyword, lex, Tok, Token};
use crate::model::raw::*;
use crate::model::{BinOp, Causality, Direction};

/// Source positions of model elements, keyed by the same location strings
/// used in resolve and validation findings.
pub type SpanTable = BTreeMap<String, SourceSpan>;

type PResult<T> = Result<T, Diagnostic>;

pub(crate) struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    pub spans: SpanTable,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str) -> PResult<Self> {
        Ok(Self {
            text,
            toks: lex(text)?,
            pos: 0,
            spans: SpanTable::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span_of(&self, tok: &Token) -> SourceSpan {
        SourceSpan::from_offsets(self.text, tok.start, tok.end)
    }

    fn here(&self) -> SourceSpan {
        self.span_of(&self.toks[self.pos])
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn error(&self, expected: &str) -> Diagnostic {
        Diagnostic::error(
            "syntax",
            format!("expected {expected}, found {}", Self::describe(self.peek())),
        )
        .at(self.here())
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.at_sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<Token> {
        if self.at_sym(sym) {
            Ok(self.bump())
        } else {
            Err(self.error(&format!("`{sym}`")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let t = self.bump();
                Ok((s, self.span_of(&t)))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    /// Parse `{ items }`, reporting an unclosed brace at its opening position.
    fn block(&mut self, mut item: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        let open = self.expect_sym("{")?;
        loop {
            if self.eat_sym("}") {
                return Ok(());
            }
            if *self.peek() == Tok::Eof {
                return Err(Diagnostic::error("unbalanced-brace", "unclosed `{`").at(self.span_of(&open)));
            }
            item(self)?;
        }
    }

    pub fn model(&mut self) -> PResult<Model> {
        self.expect_kw("model")?;
        let (name, span) = self.ident()?;
        self.spans.insert(format!("model {name}"), span.clone());
        let mut types = Vec::new();
        let mut components = Vec::new();
        let mut root: Option<String> = None;
        self.block(|p| {
            if p.eat_kw("type") {
                types.push(p.type_decl()?);
            } else if p.eat_kw("component") {
                components.push(p.component()?);
            } else if p.at_kw("root") {
                let kw = p.here();
                p.bump();
                if root.is_some() {
                    return Err(Diagnostic::error("syntax", "duplicate `root` declaration").at(kw));
                }
                root = Some(p.ident()?.0);
            } else {
                return Err(p.error("`type`, `component` or `root`"));
            }
            Ok(())
        })?;
        if *self.peek() != Tok::Eof {
            return Err(match self.peek() {
                Tok::Sym("}") => Diagnostic::error("unbalanced-brace", "unmatched `}`").at(self.here()),
                _ => self.error("end of input"),
            });
        }
        let root = root.ok_or_else(|| Diagnostic::error("syntax", "missing `root` declaration").at(span))?;
        Ok(Model {
            name,
            types,
            components,
            root,
        })
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(n) => {
                let span = self.here();
                self.bump();
                let v = if neg {
                    0i64.checked_sub_unsigned(n)
                } else {
                    i64::try_from(n).ok()
                };
                v.ok_or_else(|| Diagnostic::error("syntax", "integer literal out of range").at(span))
            }
            _ => Err(self.error("an integer")),
        }
    }

    fn int_range(&mut self) -> PResult<(i64, i64)> {
        self.expect_sym("[")?;
        let lo = self.int()?;
        self.expect_sym("..")?;
        let hi = self.int()?;
        self.expect_sym("]")?;
        Ok((lo, hi))
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        let (name, span) = self.ident()?;
        self.spans.insert(format!("type {name}"), span);
        self.expect_sym("=")?;
        let def = if self.eat_kw("enum") {
            let mut lits = Vec::new();
            self.block(|p| {
                lits.push(p.ident()?.0);
                if !p.at_sym("}") {
                    p.expect_sym(",")?;
                }
                Ok(())
            })?;
            TypeDef::Enum(lits)
        } else if self.eat_kw("Int") {
            let (lo, hi) = self.int_range()?;
            TypeDef::Int { lo, hi }
        } else {
            return Err(self.error("`enum` or `Int`"));
        };
        Ok(TypeDecl { name, def })
    }

    pub(crate) fn type_ref(&mut self) -> PResult<TypeRef> {
        if self.eat_kw("Bool") {
            Ok(TypeRef::Bool)
        } else if self.eat_kw("Int") {
            let (lo, hi) = self.int_range()?;
            Ok(TypeRef::Int { lo, hi })
        } else {
            Ok(TypeRef::Named(self.ident()?.0))
        }
    }

    pub(crate) fn literal(&mut self) -> PResult<Literal> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "eps" => {
                self.bump();
                Ok(Literal::Absent)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Literal::Bool(s == "true"))
            }
            Tok::Int(_) | Tok::Sym("-") => Ok(Literal::Int(self.int()?)),
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(Literal::Name(s))
            }
            _ => Err(self.error("a literal")),
        }
    }

    fn component(&mut self) -> PResult<ComponentDecl> {
        let (name, span) = self.ident()?;
        let loc = format!("component {name}");
        self.spans.insert(loc.clone(), span);
        let causality = if self.eat_sym("(") {
            let c = if self.eat_kw("weak") {
                Causality::Weak
            } else if self.eat_kw("strong") {
                Causality::Strong
            } else {
                return Err(self.error("`weak` or `strong`"));
            };
            self.expect_sym(")")?;
            Some(c)
        } else {
            None
        };

        let mut ports = Vec::new();
        let mut automaton: Option<AutomatonDecl> = None;
        let mut function: Option<Vec<(String, Expr)>> = None;
        let mut composite = CompositeDecl::default();
        let mut behavior_span: Option<SourceSpan> = None;
        self.block(|p| {
            let kw_span = p.here();
            if p.at_kw("in") || p.at_kw("out") {
                let direction = if p.eat_kw("in") {
                    Direction::In
                } else {
                    p.bump();
                    Direction::Out
                };
                let (pname, pspan) = p.ident()?;
                p.spans.insert(format!("{loc}, port {pname}"), pspan);
                p.expect_sym(":")?;
                let ty = p.type_ref()?;
                let init = if p.eat_sym("=") { Some(p.literal()?) } else { None };
                ports.push(PortDecl {
                    name: pname,
                    direction,
                    ty,
                    init,
                });
            } else if p.at_kw("automaton") || p.at_kw("function") {
                if behavior_span.is_some() {
                    return Err(Diagnostic::error("syntax", "a component has at most one behavior").at(kw_span));
                }
                behavior_span = Some(kw_span);
                if p.eat_kw("automaton") {
                    automaton = Some(p.automaton(&loc)?);
                } else {
                    p.bump();
                    function = Some(p.function()?);
                }
            } else if p.eat_kw("sub") {
                let (inst, ispan) = p.ident()?;
                p.spans.insert(format!("{loc}, sub {inst}"), ispan);
                p.expect_sym(":")?;
                let (comp, _) = p.ident()?;
                composite.subs.push((inst, comp));
            } else if p.eat_kw("channel") {
                let (cname, cspan) = p.ident()?;
                p.spans.insert(format!("{loc}, channel {cname}"), cspan);
                p.expect_sym(":")?;
                let ty = p.type_ref()?;
                let from = p.endpoint()?;
                p.expect_sym("->")?;
                let to = p.endpoint()?;
                composite.channels.push(ChannelDecl {
                    name: cname,
                    ty,
                    from,
                    to,
                });
            } else {
                return Err(p.error("a port, behavior, `sub` or `channel`"));
            }
            Ok(())
        })?;

        let structural = !composite.subs.is_empty() || !composite.channels.is_empty();
        let body = match (automaton, function) {
            (Some(_), _) | (_, Some(_)) if structural => {
                return Err(Diagnostic::error(
                    "syntax",
                    "a component with a behavior cannot contain subcomponents or channels",
                )
                .at(behavior_span.unwrap_or_else(|| self.here())))
            }
            (Some(a), None) => BodyDecl::Automaton(a),
            (None, Some(f)) => BodyDecl::Function(f),
            _ => BodyDecl::Composite(composite),
        };
        Ok(ComponentDecl {
            name,
            causality,
            ports,
            body,
        })
    }

    pub(crate) fn endpoint(&mut self) -> PResult<EndpointRef> {
        let (first, _) = self.ident()?;
        if self.eat_sym(".") {
            let (port, _) = self.ident()?;
            Ok(EndpointRef {
                instance: Some(first),
                port,
            })
        } else {
            Ok(EndpointRef {
                instance: None,
                port: first,
            })
        }
    }

    fn automaton(&mut self, loc: &str) -> PResult<AutomatonDecl> {
        let mut a = AutomatonDecl::default();
        let mut initial_span: Option<SourceSpan> = None;
        self.block(|p| {
            if p.eat_kw("state") {
                let (s, span) = p.ident()?;
                p.spans.insert(format!("{loc}, state {s}"), span);
                a.states.push(s);
            } else if p.at_kw("initial") {
                let span = p.here();
                p.bump();
                if initial_span.is_some() {
                    return Err(Diagnostic::error("syntax", "duplicate `initial` declaration").at(span));
                }
                initial_span = Some(span);
                a.initial = Some(p.ident()?.0);
            } else if p.eat_kw("var") {
                let (vname, vspan) = p.ident()?;
                p.spans.insert(format!("{loc}, var {vname}"), vspan);
                p.expect_sym(":")?;
                let ty = p.type_ref()?;
                p.expect_sym("=")?;
                let init = p.literal()?;
                a.variables.push(VarDecl {
                    name: vname,
                    ty,
                    init,
                });
            } else if p.at_kw("when") {
                let span = p.here();
                p.bump();
                p.spans
                    .insert(format!("{loc}, transition {}", a.transitions.len() + 1), span);
                a.transitions.push(p.transition()?);
            } else {
                return Err(p.error("`state`, `initial`, `var` or `when`"));
            }
            Ok(())
        })?;
        Ok(a)
    }

    fn transition(&mut self) -> PResult<TransitionDecl> {
        let (from, _) = self.ident()?;
        self.expect_sym("->")?;
        let (to, _) = self.ident()?;
        let mut patterns = Vec::new();
        if self.eat_sym("[") {
            loop {
                let (port, _) = self.ident()?;
                self.expect_sym("=")?;
                let pat = if self.eat_sym("*") {
                    PatternDecl::Any
                } else {
                    PatternDecl::Lit(self.literal()?)
                };
                patterns.push((port, pat));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("]")?;
        }
        let guard = if self.eat_kw("if") { Some(self.expr()?) } else { None };
        let emit = if self.eat_kw("emit") { self.assignments()? } else { Vec::new() };
        let set = if self.eat_kw("set") { self.assignments()? } else { Vec::new() };
        Ok(TransitionDecl {
            from,
            to,
            patterns,
            guard,
            emit,
            set,
        })
    }

    fn assignments(&mut self) -> PResult<Vec<(String, Expr)>> {
        let mut out = Vec::new();
        loop {
            out.push(self.assignment()?);
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn assignment(&mut self) -> PResult<(String, Expr)> {
        let (name, _) = self.ident()?;
        self.expect_sym("=")?;
        Ok((name, self.expr()?))
    }

    fn function(&mut self) -> PResult<Vec<(String, Expr)>> {
        let mut out = Vec::new();
        self.block(|p| {
            out.push(p.assignment()?);
            if !p.eat_sym(";") {
                p.eat_sym(",");
            }
            Ok(())
        })?;
        Ok(out)
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_sym("||") {
            lhs = Expr::binary(BinOp::Or, lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.cmp_expr()?;
        while self.eat_sym("&&") {
            lhs = Expr::binary(BinOp::And, lhs, self.cmp_expr()?);
        }
        Ok(lhs)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::binary(op, lhs, self.add_expr()?))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = if self.eat_sym("+") {
                BinOp::Add
            } else if self.eat_sym("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.unary_expr()?);
        }
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        if self.eat_sym("!") {
            return Ok(Expr::Not(Box::new(self.unary_expr()?)));
        }
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        match self.peek() {
            Tok::Int(_) | Tok::Sym("-") | Tok::Ident(_) => Ok(Expr::Lit(self.literal()?)),
            _ => Err(self.error("an expression")),
        }
    }

    pub(crate) fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }
}

/// Parse the textual model language. On failure returns at least one error
/// diagnostic; no partial model is produced.
pub fn parse_dsl(text: &str) -> Result<Model, Vec<Diagnostic>> {
    parse_dsl_with_spans(text).map(|(m, _)| m)
}

pub fn parse_dsl_with_spans(text: &str) -> Result<(Model, SpanTable), Vec<Diagnostic>> {
    let mut p = Parser::new(text).map_err(|d| vec![d])?;
    let model = p.model().map_err(|d| vec![d])?;
    Ok((model, p.spans))
}

/// Parse a standalone fragment with one of the parser's entry points.
pub(crate) fn parse_fragment<T>(
    text: &str,
    f: impl FnOnce(&mut Parser<'_>) -> PResult<T>,
) -> PResult<T> {
    let mut p = Parser::new(text)?;
    let v = f(&mut p)?;
    p.finish()?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_model() {
        let m = parse_dsl("model M { component C (weak) { in x: Bool  out y: Bool  function { y = x } } root C }")
            .unwrap();
        assert_eq!(m.components.len(), 1);
        let c = &m.components[0];
        assert_eq!(c.causality, Some(Causality::Weak));
        assert_eq!(c.ports.len(), 2);
        assert_eq!(c.body, BodyDecl::Function(vec![("y".into(), Expr::name("x"))]));
    }

    #[test]
    fn unbalanced_brace_points_at_opener() {
        let text = "model M {\n  component C {\n    out y: Bool\n";
        let diags = parse_dsl(text).unwrap_err();
        assert_eq!(diags.len(), 1);
        let span = diags[0].span.clone().unwrap();
        assert_eq!(diags[0].code, "unbalanced-brace");
        assert_eq!((span.line, span.column), (2, 15));
    }

    #[test]
    fn stray_closing_brace() {
        let diags = parse_dsl("model M { component C { out y: Bool function { y = true } } root C } }").unwrap_err();
        assert_eq!(diags[0].code, "unbalanced-brace");
    }

    #[test]
    fn unannotated_causality_is_none() {
        let m = parse_dsl("model M { component C { out y: Bool function { y = true } } root C }").unwrap();
        assert_eq!(m.components[0].causality, None);
    }

    #[test]
    fn expression_precedence() {
        let e = parse_fragment("a + 1 < b && !c || d == -2", |p| p.expr()).unwrap();
        let expected = Expr::binary(
            BinOp::Or,
            Expr::binary(
                BinOp::And,
                Expr::binary(
                    BinOp::Lt,
                    Expr::binary(BinOp::Add, Expr::name("a"), Expr::Lit(Literal::Int(1))),
                    Expr::name("b"),
                ),
                Expr::Not(Box::new(Expr::name("c"))),
            ),
            Expr::binary(BinOp::Eq, Expr::name("d"), Expr::Lit(Literal::Int(-2))),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn transition_clauses() {
        let text = "model M { type S = enum { on, off }
            component E (weak) { in x: S out y: S
              automaton { state Idle state Busy initial Idle var n: Int[0..3] = 0
                when Idle -> Busy [x = on] if n < 3 emit y = x set n = n + 1
                when Busy -> Idle [x = *] } }
            root E }";
        let (m, spans) = parse_dsl_with_spans(text).unwrap();
        let BodyDecl::Automaton(a) = &m.components[0].body else { panic!() };
        assert_eq!(a.transitions.len(), 2);
        assert_eq!(a.transitions[1].patterns, vec![("x".into(), PatternDecl::Any)]);
        assert_eq!(spans["component E, transition 2"].line, 5);
    }

    #[test]
    fn missing_root_is_an_error() {
        let diags = parse_dsl("model M { }").unwrap_err();
        assert!(diags[0].message.contains("root"));
    }
}
