//! Hand-written recursive-descent parser for the surface language.
//!
//! Grammar sketch:
//!
//! ```text
//! decl  ::= "import" NAME
//!         | "def" NAME ":" term ":=" term
//!         | "axiom" NAME ":" term
//!         | "#check" term | "#normalize" term
//!         | "#assert_defeq" atom atom ":" term
//!         | "#assert_type" appterm ":" term
//! term  ::= "fun" binder+ "=>" term
//!         | "let" NAME ":" term ":=" term "in" term
//!         | groups "->" term | groups "*" sigma ("->" term)?
//!         | sigma ("->" term)?
//! sigma ::= appterm ("*" sigma)?
//! appterm ::= atom+
//! atom  ::= NAME | NUMBER | "(" term ")"
//! ```
//!
//! Application binds tightest and associates left; `*` binds tighter than
//! `->`; both are right-associative. Binder groups `(x y : T)` open a
//! dependent function or pair type.

use crate::diag::{codes, DiagResult, Diagnostic};
use crate::lexer::{Directive, Keyword, TokKind, Token};
use crate::span::Span;

#[derive(Debug, Clone)]
pub struct SurfaceTerm {
    pub node: SurfaceNode,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum SurfaceNode {
    Name(String),
    Num(u64),
    App(Box<SurfaceTerm>, Box<SurfaceTerm>),
    Lam { binders: Vec<Binder>, body: Box<SurfaceTerm> },
    /// Dependent function type from binder groups.
    Pi { binders: Vec<Binder>, codomain: Box<SurfaceTerm> },
    /// Non-dependent `A -> B`.
    Arrow { domain: Box<SurfaceTerm>, codomain: Box<SurfaceTerm> },
    /// Dependent pair type from binder groups.
    SigmaDep { binders: Vec<Binder>, second: Box<SurfaceTerm> },
    /// Non-dependent `A * B`.
    Prod { first: Box<SurfaceTerm>, second: Box<SurfaceTerm> },
    Let {
        name: String,
        ann: Box<SurfaceTerm>,
        value: Box<SurfaceTerm>,
        body: Box<SurfaceTerm>,
    },
}

#[derive(Debug, Clone)]
pub struct Binder {
    pub name: String,
    pub ann: Option<Box<SurfaceTerm>>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum DeclKind {
    Import { module: String },
    Def { name: String, ty: SurfaceTerm, body: SurfaceTerm },
    Axiom { name: String, ty: SurfaceTerm },
    Check(SurfaceTerm),
    Normalize(SurfaceTerm),
    AssertDefeq { lhs: SurfaceTerm, rhs: SurfaceTerm, ty: SurfaceTerm },
    AssertType { term: SurfaceTerm, ty: SurfaceTerm },
}

/// Names with a fixed kernel meaning; not usable as binders or globals.
pub const RESERVED: &[&str] = &[
    "Nat", "Unit", "star", "zero", "succ", "pair", "fst", "snd", "Id", "refl", "J", "natrec",
    "quot", "qmk", "qpath", "qelim",
];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name) || universe_level(name).is_some()
}

/// `Type0`, `Type1`, ... parse as universe references.
pub fn universe_level(name: &str) -> Option<u32> {
    let digits = name.strip_prefix("Type")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    eof_span: Span,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof_span)
    }

    fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(codes::PARSE, message, self.here())
    }

    fn expect(&mut self, kind: &TokKind, what: &str) -> DiagResult<Span> {
        match self.peek() {
            Some(t) if &t.kind == kind => Ok(self.bump().unwrap().span),
            Some(t) => Err(Diagnostic::error(
                codes::PARSE,
                format!("expected {what}, found `{}`", t.lexeme),
                t.span,
            )),
            None => Err(Diagnostic::error(
                codes::PARSE,
                format!("expected {what}, found end of input"),
                self.eof_span,
            )),
        }
    }

    fn expect_ident(&mut self, what: &str) -> DiagResult<(String, Span)> {
        match self.peek() {
            Some(t) if t.kind == TokKind::Ident => {
                let (lexeme, span) = (t.lexeme.clone(), t.span);
                self.bump();
                Ok((lexeme, span))
            }
            Some(t) => Err(Diagnostic::error(
                codes::PARSE,
                format!("expected {what}, found `{}`", t.lexeme),
                t.span,
            )),
            None => Err(Diagnostic::error(
                codes::PARSE,
                format!("expected {what}, found end of input"),
                self.eof_span,
            )),
        }
    }

    fn expect_binding_name(&mut self, what: &str) -> DiagResult<(String, Span)> {
        let (name, span) = self.expect_ident(what)?;
        if is_reserved(&name) {
            return Err(Diagnostic::error(
                codes::PARSE,
                format!("`{name}` is a reserved name and cannot be bound"),
                span,
            ));
        }
        Ok((name, span))
    }

    /// Does the upcoming input look like `( ident+ :` ?
    fn at_binder_group(&self) -> bool {
        if !matches!(self.peek().map(|t| &t.kind), Some(TokKind::LParen)) {
            return false;
        }
        let mut i = 1;
        let mut saw_ident = false;
        while let Some(t) = self.peek_at(i) {
            match t.kind {
                TokKind::Ident => {
                    saw_ident = true;
                    i += 1;
                }
                TokKind::Colon => return saw_ident,
                _ => return false,
            }
        }
        false
    }

    fn parse_binder_group(&mut self) -> DiagResult<Vec<Binder>> {
        self.expect(&TokKind::LParen, "`(`")?;
        let mut names = Vec::new();
        while matches!(self.peek().map(|t| &t.kind), Some(TokKind::Ident)) {
            names.push(self.expect_binding_name("a binder name")?);
        }
        if names.is_empty() {
            return Err(self.error("expected at least one binder name"));
        }
        self.expect(&TokKind::Colon, "`:`")?;
        let ann = self.parse_term()?;
        self.expect(&TokKind::RParen, "`)`")?;
        Ok(names
            .into_iter()
            .map(|(name, span)| Binder { name, ann: Some(Box::new(ann.clone())), span })
            .collect())
    }

    fn parse_term(&mut self) -> DiagResult<SurfaceTerm> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokKind::Keyword(Keyword::Fun)) => self.parse_lambda(),
            Some(TokKind::Keyword(Keyword::Let)) => self.parse_let(),
            _ => self.parse_pi_or_arrow(),
        }
    }

    fn parse_lambda(&mut self) -> DiagResult<SurfaceTerm> {
        let start = self.here();
        self.expect(&TokKind::Keyword(Keyword::Fun), "`fun`")?;
        let mut binders = Vec::new();
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokKind::Ident) => {
                    let (name, span) = self.expect_binding_name("a binder name")?;
                    binders.push(Binder { name, ann: None, span });
                }
                Some(TokKind::LParen) => binders.extend(self.parse_binder_group()?),
                _ => break,
            }
        }
        if binders.is_empty() {
            return Err(self.error("`fun` needs at least one binder"));
        }
        self.expect(&TokKind::FatArrow, "`=>`")?;
        let body = self.parse_term()?;
        let span = start.merge(body.span);
        Ok(SurfaceTerm { node: SurfaceNode::Lam { binders, body: Box::new(body) }, span })
    }

    fn parse_let(&mut self) -> DiagResult<SurfaceTerm> {
        let start = self.here();
        self.expect(&TokKind::Keyword(Keyword::Let), "`let`")?;
        let (name, _) = self.expect_binding_name("a name to bind")?;
        self.expect(&TokKind::Colon, "`:`")?;
        let ann = self.parse_term()?;
        self.expect(&TokKind::ColonEq, "`:=`")?;
        let value = self.parse_term()?;
        self.expect(&TokKind::Keyword(Keyword::In), "`in`")?;
        let body = self.parse_term()?;
        let span = start.merge(body.span);
        Ok(SurfaceTerm {
            node: SurfaceNode::Let {
                name,
                ann: Box::new(ann),
                value: Box::new(value),
                body: Box::new(body),
            },
            span,
        })
    }

    fn parse_pi_or_arrow(&mut self) -> DiagResult<SurfaceTerm> {
        if self.at_binder_group() {
            let start = self.here();
            let mut binders = self.parse_binder_group()?;
            while self.at_binder_group() {
                binders.extend(self.parse_binder_group()?);
            }
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokKind::Arrow) => {
                    self.bump();
                    let codomain = self.parse_pi_or_arrow()?;
                    let span = start.merge(codomain.span);
                    Ok(SurfaceTerm {
                        node: SurfaceNode::Pi { binders, codomain: Box::new(codomain) },
                        span,
                    })
                }
                Some(TokKind::Star) => {
                    self.bump();
                    let second = self.parse_sigma()?;
                    let span = start.merge(second.span);
                    let sig = SurfaceTerm {
                        node: SurfaceNode::SigmaDep { binders, second: Box::new(second) },
                        span,
                    };
                    self.maybe_arrow(sig)
                }
                _ => Err(self.error("expected `->` or `*` after a binder group")),
            }
        } else {
            let lhs = self.parse_sigma()?;
            self.maybe_arrow(lhs)
        }
    }

    fn maybe_arrow(&mut self, lhs: SurfaceTerm) -> DiagResult<SurfaceTerm> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Arrow)) {
            self.bump();
            let codomain = self.parse_pi_or_arrow()?;
            let span = lhs.span.merge(codomain.span);
            Ok(SurfaceTerm {
                node: SurfaceNode::Arrow { domain: Box::new(lhs), codomain: Box::new(codomain) },
                span,
            })
        } else {
            Ok(lhs)
        }
    }

    fn parse_sigma(&mut self) -> DiagResult<SurfaceTerm> {
        let lhs = self.parse_app()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Star)) {
            self.bump();
            let rhs = self.parse_sigma()?;
            let span = lhs.span.merge(rhs.span);
            Ok(SurfaceTerm {
                node: SurfaceNode::Prod { first: Box::new(lhs), second: Box::new(rhs) },
                span,
            })
        } else {
            Ok(lhs)
        }
    }

    fn at_atom(&self) -> bool {
        match self.peek().map(|t| &t.kind) {
            Some(TokKind::Ident) | Some(TokKind::NatLit(_)) => true,
            Some(TokKind::LParen) => !self.at_binder_group(),
            _ => false,
        }
    }

    fn parse_app(&mut self) -> DiagResult<SurfaceTerm> {
        let mut head = self.parse_atom()?;
        while self.at_atom() {
            let arg = self.parse_atom()?;
            let span = head.span.merge(arg.span);
            head = SurfaceTerm {
                node: SurfaceNode::App(Box::new(head), Box::new(arg)),
                span,
            };
        }
        Ok(head)
    }

    fn parse_atom(&mut self) -> DiagResult<SurfaceTerm> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokKind::Ident) => {
                let t = self.bump().unwrap();
                Ok(SurfaceTerm { node: SurfaceNode::Name(t.lexeme.clone()), span: t.span })
            }
            Some(TokKind::NatLit(n)) => {
                let t = self.bump().unwrap();
                Ok(SurfaceTerm { node: SurfaceNode::Num(n), span: t.span })
            }
            Some(TokKind::LParen) => {
                self.bump();
                let inner = self.parse_term()?;
                self.expect(&TokKind::RParen, "`)`")?;
                Ok(inner)
            }
            Some(_) => {
                let t = self.peek().unwrap();
                Err(Diagnostic::error(
                    codes::PARSE,
                    format!("expected a term, found `{}`", t.lexeme),
                    t.span,
                ))
            }
            None => Err(Diagnostic::error(
                codes::PARSE,
                "expected a term, found end of input",
                self.eof_span,
            )),
        }
    }

    fn parse_decl(&mut self) -> DiagResult<Decl> {
        let start = self.here();
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokKind::Keyword(Keyword::Import)) => {
                self.bump();
                let (module, span) = self.expect_ident("a module name")?;
                Ok(Decl { kind: DeclKind::Import { module }, span: start.merge(span) })
            }
            Some(TokKind::Keyword(Keyword::Def)) => {
                self.bump();
                let (name, _) = self.expect_binding_name("a definition name")?;
                self.expect(&TokKind::Colon, "`:`")?;
                let ty = self.parse_term()?;
                self.expect(&TokKind::ColonEq, "`:=`")?;
                let body = self.parse_term()?;
                let span = start.merge(body.span);
                Ok(Decl { kind: DeclKind::Def { name, ty, body }, span })
            }
            Some(TokKind::Keyword(Keyword::Axiom)) => {
                self.bump();
                let (name, _) = self.expect_binding_name("an axiom name")?;
                self.expect(&TokKind::Colon, "`:`")?;
                let ty = self.parse_term()?;
                let span = start.merge(ty.span);
                Ok(Decl { kind: DeclKind::Axiom { name, ty }, span })
            }
            Some(TokKind::Directive(dir)) => {
                self.bump();
                match dir {
                    Directive::Check => {
                        let t = self.parse_term()?;
                        let span = start.merge(t.span);
                        Ok(Decl { kind: DeclKind::Check(t), span })
                    }
                    Directive::Normalize => {
                        let t = self.parse_term()?;
                        let span = start.merge(t.span);
                        Ok(Decl { kind: DeclKind::Normalize(t), span })
                    }
                    Directive::AssertDefeq => {
                        // operands parse at atom level: parenthesize
                        // compound terms
                        let lhs = self.parse_atom()?;
                        let rhs = self.parse_atom()?;
                        self.expect(&TokKind::Colon, "`:`")?;
                        let ty = self.parse_term()?;
                        let span = start.merge(ty.span);
                        Ok(Decl { kind: DeclKind::AssertDefeq { lhs, rhs, ty }, span })
                    }
                    Directive::AssertType => {
                        let term = self.parse_app()?;
                        self.expect(&TokKind::Colon, "`:`")?;
                        let ty = self.parse_term()?;
                        let span = start.merge(ty.span);
                        Ok(Decl { kind: DeclKind::AssertType { term, ty }, span })
                    }
                }
            }
            Some(_) => {
                let t = self.peek().unwrap();
                Err(Diagnostic::error(
                    codes::PARSE,
                    format!(
                        "expected a declaration (`def`, `axiom`, `import`, or a directive), \
                         found `{}`",
                        t.lexeme
                    ),
                    t.span,
                ))
            }
            None => unreachable!("parse_decl called at end of input"),
        }
    }
}

/// Parse a whole file into declarations. Imports may appear only before
/// other declarations.
pub fn parse(tokens: &[Token], eof_span: Span) -> DiagResult<Vec<Decl>> {
    let mut p = Parser { tokens, pos: 0, eof_span };
    let mut decls = Vec::new();
    let mut seen_non_import = false;
    while p.peek().is_some() {
        let decl = p.parse_decl()?;
        match &decl.kind {
            DeclKind::Import { .. } if seen_non_import => {
                return Err(Diagnostic::error(
                    codes::PARSE,
                    "`import` lines must appear before other declarations",
                    decl.span,
                ));
            }
            DeclKind::Import { .. } => {}
            _ => seen_non_import = true,
        }
        decls.push(decl);
    }
    Ok(decls)
}

/// Parse a single expression (for the CLI `normalize`/`typeof` commands).
pub fn parse_expression(tokens: &[Token], eof_span: Span) -> DiagResult<SurfaceTerm> {
    let mut p = Parser { tokens, pos: 0, eof_span };
    let t = p.parse_term()?;
    if let Some(extra) = p.peek() {
        return Err(Diagnostic::error(
            codes::PARSE,
            format!("unexpected `{}` after the expression", extra.lexeme),
            extra.span,
        ));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::lex;
    use crate::span::FileId;

    fn parse_str(src: &str) -> DiagResult<Vec<Decl>> {
        let toks = lex(FileId(0), src)?;
        parse(&toks, Span::synth())
    }

    #[test]
    fn parses_axiom_declaration() {
        let ds =
            parse_str("axiom funext : (A : Type0) -> (B : Type0) -> A -> B").unwrap();
        assert!(matches!(&ds[0].kind, DeclKind::Axiom { name, .. } if name == "funext"));
    }

    #[test]
    fn parses_def_with_numeral_body() {
        let ds = parse_str("def two : Nat := succ (succ zero)").unwrap();
        assert!(matches!(&ds[0].kind, DeclKind::Def { name, .. } if name == "two"));
    }

    #[test]
    fn unclosed_binder_is_a_parse_error() {
        let err = parse_str("def f : (x : A -> B := zero").unwrap_err();
        assert_eq!(err.code, codes::PARSE);
    }

    #[test]
    fn star_binds_tighter_than_arrow() {
        let ds = parse_str("#check Nat * Nat -> Nat").unwrap();
        match &ds[0].kind {
            DeclKind::Check(t) => match &t.node {
                SurfaceNode::Arrow { domain, .. } => {
                    assert!(matches!(domain.node, SurfaceNode::Prod { .. }))
                }
                other => panic!("expected arrow, got {other:?}"),
            },
            _ => unreachable!(),
        }
    }
}
