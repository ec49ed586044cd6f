//! Recursive-descent parsers for network files and queries.
//!
//! Both grammars are LL(1) over the token stream from [`super::lexer`]. The
//! network parser recovers at declaration boundaries (newlines) so a single
//! run reports every malformed declaration.

use crate::diag::{Code, Diagnostic, Span};
use crate::model::{Cmp, Sign};

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};

/// Maximum nesting of parentheses and prefix operators.
const MAX_DEPTH: usize = 256;

/// Marker for "a diagnostic has been recorded"; the caller decides how to
/// resynchronize.
struct Reported;

type PResult<T> = Result<T, Reported>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    depth: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>, diags: Vec<Diagnostic>) -> Self {
        Self {
            tokens,
            pos: 0,
            diags,
            depth: 0,
        }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.at(&TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    /// Span of the most recently consumed token.
    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn error<T>(&mut self, message: String, span: Span) -> PResult<T> {
        self.diags.push(Diagnostic::new(Code::E001, message, span));
        Err(Reported)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek().clone();
        self.error(format!("expected {expected}, found {}", tok.kind), tok.span)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&kind.to_string())
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<Span> {
        self.expect(TokenKind::Keyword(kw))
    }

    fn ident(&mut self) -> PResult<Ident> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            TokenKind::Keyword(k) => {
                let tok = self.peek().clone();
                self.error(
                    format!("expected identifier, found reserved keyword `{}`", k.as_str()),
                    tok.span,
                )
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn int(&mut self) -> PResult<IntLit> {
        match self.peek().kind {
            TokenKind::Int(value) => {
                let span = self.bump().span;
                Ok(IntLit { value, span })
            }
            _ => self.unexpected("integer"),
        }
    }

    fn cmp(&mut self) -> PResult<Cmp> {
        let cmp = match self.peek().kind {
            TokenKind::Ge => Cmp::Ge,
            TokenKind::Le => Cmp::Le,
            TokenKind::Eq => Cmp::Eq,
            TokenKind::Gt => Cmp::Gt,
            TokenKind::Lt => Cmp::Lt,
            _ => return self.unexpected("comparison (`>=`, `<=`, `=`, `>` or `<`)"),
        };
        self.bump();
        Ok(cmp)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let span = self.peek().span;
            return self.error("expression is nested too deeply".into(), span);
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn skip_newlines(&mut self) {
        while self.at(&TokenKind::Newline) {
            self.bump();
        }
    }

    fn end_of_decl(&mut self) -> PResult<()> {
        match self.peek().kind {
            TokenKind::Newline => {
                self.bump();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            _ => self.unexpected("end of line"),
        }
    }

    fn recover_to_newline(&mut self) {
        while !matches!(self.peek().kind, TokenKind::Newline | TokenKind::Eof) {
            self.bump();
        }
    }

    // ---------------------------------------------------------------------
    // Network grammar
    // ---------------------------------------------------------------------

    fn network(&mut self) -> Option<NetworkAst> {
        self.skip_newlines();
        let header = (|| {
            let start = self.expect_kw(Keyword::Network)?;
            let name = self.ident()?;
            let span = start.to(name.span);
            self.end_of_decl()?;
            Ok((name, span))
        })();
        let (name, span) = match header {
            Ok(h) => h,
            Err(Reported) => {
                self.recover_to_newline();
                (
                    Ident {
                        name: String::new(),
                        span: Span::default(),
                    },
                    Span::default(),
                )
            }
        };

        let mut decls = Vec::new();
        loop {
            self.skip_newlines();
            if self.at(&TokenKind::Eof) {
                break;
            }
            match self.decl().and_then(|d| self.end_of_decl().map(|_| d)) {
                Ok(d) => decls.push(d),
                Err(Reported) => self.recover_to_newline(),
            }
        }
        Some(NetworkAst { name, decls, span })
    }

    fn decl(&mut self) -> PResult<Decl> {
        match &self.peek().kind {
            TokenKind::Keyword(Keyword::Gene) => self.gene().map(Decl::Gene),
            TokenKind::Keyword(Keyword::Rule) => self.rule().map(Decl::Rule),
            TokenKind::Keyword(Keyword::Init) => self.init().map(Decl::Init),
            TokenKind::Ident(_) => self.edge().map(Decl::Edge),
            _ => self.unexpected("declaration (`gene`, `rule`, `init` or an edge)"),
        }
    }

    fn gene(&mut self) -> PResult<GeneDecl> {
        let start = self.expect_kw(Keyword::Gene)?;
        let name = self.ident()?;
        self.expect_kw(Keyword::Levels)?;
        let lo = self.int()?;
        self.expect(TokenKind::DotDot)?;
        let hi = self.int()?;
        if lo.value != 0 {
            return self.error("levels must start at 0".into(), lo.span.to(hi.span));
        }
        if hi.value < 1 {
            return self.error(
                format!("upper level bound must be at least 1, found {}", hi.value),
                lo.span.to(hi.span),
            );
        }
        Ok(GeneDecl {
            name,
            max_level: hi,
            span: start.to(hi.span),
        })
    }

    fn edge(&mut self) -> PResult<EdgeDecl> {
        let source = self.ident()?;
        let sign = match self.peek().kind {
            TokenKind::Arrow => Sign::Activator,
            TokenKind::Bar => Sign::Inhibitor,
            _ => return self.unexpected("`->` or `-|`"),
        };
        self.bump();
        let target = self.ident()?;
        self.expect_kw(Keyword::Threshold)?;
        let threshold = self.int()?;
        Ok(EdgeDecl {
            span: source.span.to(threshold.span),
            source,
            sign,
            target,
            threshold,
        })
    }

    fn rule(&mut self) -> PResult<RuleDecl> {
        let start = self.expect_kw(Keyword::Rule)?;
        let gene = self.ident()?;
        self.expect(TokenKind::Colon)?;
        let mut clauses = Vec::new();
        if self.at_kw(Keyword::When) {
            clauses.push(self.clause()?);
            while self.at(&TokenKind::Comma) {
                self.bump();
                clauses.push(self.clause()?);
            }
        }
        if !self.at_kw(Keyword::Default) {
            let expected = if clauses.is_empty() {
                "`when` or `default`"
            } else {
                "`,` or `default`"
            };
            return self.unexpected(expected);
        }
        self.bump();
        let default = self.int()?;
        Ok(RuleDecl {
            span: start.to(default.span),
            gene,
            clauses,
            default,
        })
    }

    fn clause(&mut self) -> PResult<ClauseAst> {
        let start = self.expect_kw(Keyword::When)?;
        let condition = self.cond()?;
        self.expect(TokenKind::Arrow)?;
        let target = self.int()?;
        Ok(ClauseAst {
            condition,
            span: start.to(target.span),
            target,
        })
    }

    fn cond(&mut self) -> PResult<CondAst> {
        let mut lhs = self.conj()?;
        while self.at_kw(Keyword::Or) {
            self.bump();
            let rhs = self.conj()?;
            lhs = CondAst::Or {
                span: lhs.span().to(rhs.span()),
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> PResult<CondAst> {
        let mut lhs = self.cond_atom()?;
        while self.at_kw(Keyword::And) {
            self.bump();
            let rhs = self.cond_atom()?;
            lhs = CondAst::And {
                span: lhs.span().to(rhs.span()),
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn cond_atom(&mut self) -> PResult<CondAst> {
        self.enter()?;
        let res = self.cond_atom_inner();
        self.leave();
        res
    }

    fn cond_atom_inner(&mut self) -> PResult<CondAst> {
        match self.peek().kind {
            TokenKind::Keyword(Keyword::Not) => {
                let start = self.bump().span;
                let inner = self.cond_atom()?;
                Ok(CondAst::Not {
                    span: start.to(inner.span()),
                    inner: Box::new(inner),
                })
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.cond()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(_) => {
                let gene = self.ident()?;
                let cmp = self.cmp()?;
                let value = self.int()?;
                Ok(CondAst::Atom {
                    span: gene.span.to(value.span),
                    gene,
                    cmp,
                    value,
                })
            }
            _ => self.unexpected("condition (gene comparison, `not` or `(`)"),
        }
    }

    fn init(&mut self) -> PResult<InitDecl> {
        let start = self.expect_kw(Keyword::Init)?;
        let mut assignments = vec![self.assignment()?];
        while self.at(&TokenKind::Comma) {
            self.bump();
            assignments.push(self.assignment()?);
        }
        Ok(InitDecl {
            span: start.to(self.prev_span()),
            assignments,
        })
    }

    fn assignment(&mut self) -> PResult<(Ident, IntLit)> {
        let gene = self.ident()?;
        self.expect(TokenKind::Eq)?;
        let value = self.int()?;
        Ok((gene, value))
    }

    // ---------------------------------------------------------------------
    // Query grammar
    // ---------------------------------------------------------------------

    fn query(&mut self) -> PResult<QueryAst> {
        let start = self.peek().span;
        let q = match self.peek().kind {
            TokenKind::Keyword(Keyword::Check) => {
                self.bump();
                let formula = self.formula()?;
                QueryAst::Check {
                    span: start.to(formula.span()),
                    formula,
                }
            }
            TokenKind::Keyword(Keyword::Stable) => {
                self.bump();
                if self.at_kw(Keyword::Where) {
                    self.bump();
                    let filter = self.formula()?;
                    QueryAst::Stable {
                        span: start.to(filter.span()),
                        filter: Some(filter),
                    }
                } else {
                    QueryAst::Stable {
                        filter: None,
                        span: start,
                    }
                }
            }
            TokenKind::Keyword(Keyword::Count) => {
                self.bump();
                let end = self.expect_kw(Keyword::Reachable)?;
                QueryAst::CountReachable {
                    span: start.to(end),
                }
            }
            _ => return self.unexpected("`check`, `stable` or `count`"),
        };
        self.expect(TokenKind::Eof)?;
        Ok(q)
    }

    fn formula(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.fconj()?;
        while self.at_kw(Keyword::Or) {
            self.bump();
            let rhs = self.fconj()?;
            lhs = FormulaAst::Or {
                span: lhs.span().to(rhs.span()),
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn fconj(&mut self) -> PResult<FormulaAst> {
        let mut lhs = self.funit()?;
        while self.at_kw(Keyword::And) {
            self.bump();
            let rhs = self.funit()?;
            lhs = FormulaAst::And {
                span: lhs.span().to(rhs.span()),
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn funit(&mut self) -> PResult<FormulaAst> {
        self.enter()?;
        let res = self.funit_inner();
        self.leave();
        res
    }

    fn funit_inner(&mut self) -> PResult<FormulaAst> {
        let op = match self.peek().kind {
            TokenKind::Keyword(Keyword::Not) => {
                let start = self.bump().span;
                let inner = self.funit()?;
                return Ok(FormulaAst::Not {
                    span: start.to(inner.span()),
                    inner: Box::new(inner),
                });
            }
            TokenKind::Keyword(Keyword::EX) => TemporalOp::EX,
            TokenKind::Keyword(Keyword::EF) => TemporalOp::EF,
            TokenKind::Keyword(Keyword::EG) => TemporalOp::EG,
            TokenKind::Keyword(Keyword::AX) => TemporalOp::AX,
            TokenKind::Keyword(Keyword::AF) => TemporalOp::AF,
            TokenKind::Keyword(Keyword::AG) => TemporalOp::AG,
            _ => return self.fatom(),
        };
        let start = self.bump().span;
        let inner = self.funit()?;
        Ok(FormulaAst::Temporal {
            op,
            span: start.to(inner.span()),
            inner: Box::new(inner),
        })
    }

    fn fatom(&mut self) -> PResult<FormulaAst> {
        match self.peek().kind {
            TokenKind::Keyword(Keyword::Deadlock) => Ok(FormulaAst::Deadlock {
                span: self.bump().span,
            }),
            TokenKind::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(_) => {
                let gene = self.ident()?;
                let cmp = self.cmp()?;
                let value = self.int()?;
                Ok(FormulaAst::Atom {
                    span: gene.span.to(value.span),
                    gene,
                    cmp,
                    value,
                })
            }
            _ => self.unexpected(
                "formula (gene comparison, `deadlock`, `not`, `(` or a temporal operator)",
            ),
        }
    }
}

/// Parses a network file. On failure, every diagnostic is an E001 error.
pub fn parse_network(text: &str) -> Result<NetworkAst, Vec<Diagnostic>> {
    let (tokens, lex_diags) = tokenize(text);
    let mut p = Parser::new(tokens, lex_diags);
    let ast = p.network();
    match ast {
        Some(ast) if p.diags.is_empty() => Ok(ast),
        _ => Err(p.diags),
    }
}

fn query_parser(text: &str) -> Parser {
    let (tokens, lex_diags) = tokenize(text);
    let tokens = tokens
        .into_iter()
        .filter(|t| t.kind != TokenKind::Newline)
        .collect();
    Parser::new(tokens, lex_diags)
}

/// Parses a query (`check <formula>`, `stable [where <formula>]` or
/// `count reachable`).
pub fn parse_query(text: &str) -> Result<QueryAst, Vec<Diagnostic>> {
    let mut p = query_parser(text);
    match p.query() {
        Ok(q) if p.diags.is_empty() => Ok(q),
        _ => Err(p.diags),
    }
}

/// Parses a bare formula, as accepted after `check` or `where`.
pub fn parse_formula(text: &str) -> Result<FormulaAst, Vec<Diagnostic>> {
    let mut p = query_parser(text);
    let res = p.formula().and_then(|f| p.expect(TokenKind::Eof).map(|_| f));
    match res {
        Ok(f) if p.diags.is_empty() => Ok(f),
        _ => Err(p.diags),
    }
}
