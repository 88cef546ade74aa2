use std::collections::BTreeSet;

use super::lexer::{lex, Spanned, Tok};
use super::{Diagnostic, SourceSpan};
use crate::ast::{AttrBinding, Body, Clause, CompareOp, ElementSpec, Expr, Grammar, Guarded};

const KEYWORDS: &[&str] = &["end", "OK", "ANY", "EMPTY", "TEXT", "when", "else"];

type PResult<T> = Result<T, Diagnostic>;

/// Parses grammar source text. On failure every diagnostic collected is
/// returned; parsing resumes after the next `.` following an error.
pub fn parse_grammar(source: &str) -> Result<Grammar, Vec<Diagnostic>> {
    let toks = lex(source).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0 };
    let mut diags = Vec::new();

    let name = match p.header() {
        Ok(n) => n,
        Err(d) => return Err(vec![d]),
    };
    let mut grammar = Grammar::new(name);
    loop {
        match &p.peek().tok {
            Tok::Ident(w) if w == "end" => {
                p.bump();
                break;
            }
            Tok::Eof => {
                diags.push(Diagnostic::error(p.peek().span, "unterminated grammar: expected `end`"));
                break;
            }
            _ => {}
        }
        match p.rule() {
            Ok(clause) => grammar.clauses.push(clause),
            Err(d) => {
                diags.push(d);
                p.recover();
            }
        }
    }
    if diags.is_empty() && !matches!(p.peek().tok, Tok::Eof) {
        diags.push(Diagnostic::error(p.peek().span, format!("unexpected {} after `end`", p.peek().tok.describe())));
    }
    if diags.is_empty() {
        Ok(grammar)
    } else {
        Err(diags)
    }
}

/// Parses a standalone expression, as written inside `{ ... }`.
pub fn parse_expr(source: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(w) if w == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(self.peek().span, format!("expected {wanted}, found {}", self.peek().tok.describe()))
    }

    fn expect(&mut self, tok: &Tok) -> PResult<SourceSpan> {
        if self.at(tok) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match &self.peek().tok {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                let t = self.bump();
                let Tok::Ident(w) = t.tok else { unreachable!() };
                Ok((w, t.span))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn recover(&mut self) {
        while !matches!(self.peek().tok, Tok::Dot | Tok::Eof) {
            self.bump();
        }
        self.eat(&Tok::Dot);
    }

    fn header(&mut self) -> PResult<String> {
        self.expect(&Tok::AtGrammar)?;
        Ok(self.ident()?.0)
    }

    fn rule(&mut self) -> PResult<Clause> {
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            let mut seen = BTreeSet::new();
            if !self.at(&Tok::RParen) {
                loop {
                    let (p, span) = self.ident()?;
                    if !seen.insert(p.clone()) {
                        return Err(Diagnostic::error(span, format!("duplicate parameter name `{p}` in rule {name}")));
                    }
                    params.push(p);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(&Tok::RParen)?;
        }
        self.expect(&Tok::Define)?;
        let body = self.alt()?;
        self.expect(&Tok::Dot)?;
        Ok(Clause { name, params, body })
    }

    fn at_seq_end(&self) -> bool {
        match &self.peek().tok {
            Tok::Dot | Tok::Bar | Tok::RParen | Tok::LtSlash | Tok::Eof => true,
            Tok::Ident(w) => matches!(w.as_str(), "end" | "when" | "else"),
            _ => false,
        }
    }

    /// `seq ('|' seq)*`, right-nested.
    fn alt(&mut self) -> PResult<Vec<Body>> {
        let first = self.seq()?;
        if !self.eat(&Tok::Bar) {
            return Ok(first);
        }
        let rest = self.alt()?;
        Ok(vec![Body::Or(first, rest)])
    }

    fn seq(&mut self) -> PResult<Vec<Body>> {
        let mut items = Vec::new();
        while !self.at_seq_end() {
            items.extend(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> PResult<Vec<Body>> {
        let names = match (&self.peek().tok, self.peek_at(1)) {
            (Tok::Ident(w), Tok::Eq) if !KEYWORDS.contains(&w.as_str()) => {
                let (n, _) = self.ident()?;
                self.bump();
                Some(vec![n])
            }
            (Tok::LBracket, _) => {
                let open = self.bump().span;
                let mut names = Vec::new();
                let mut seen = BTreeSet::new();
                loop {
                    let (n, span) = self.ident()?;
                    if !seen.insert(n.clone()) {
                        return Err(Diagnostic::error(span, format!("duplicate bound name `{n}`")));
                    }
                    names.push(n);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RBracket)?;
                if !self.eat(&Tok::Eq) {
                    return Err(Diagnostic::error(open, "expected `=` after binding list"));
                }
                Some(names)
            }
            _ => None,
        };
        match names {
            Some(names) => {
                let rhs = self.item()?;
                Ok(vec![Body::Bind(names, rhs)])
            }
            None => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Vec<Body>> {
        let items = self.atom()?;
        if self.eat(&Tok::Star) {
            return Ok(vec![Body::Star(items)]);
        }
        Ok(items)
    }

    /// A parenthesized group yields all of its items.
    fn atom(&mut self) -> PResult<Vec<Body>> {
        let span = self.peek().span;
        match self.peek().tok.clone() {
            Tok::Ident(w) => {
                let simple = match w.as_str() {
                    "OK" => Some(Body::Ok),
                    "ANY" => Some(Body::Any),
                    "EMPTY" => Some(Body::Empty),
                    "TEXT" => Some(Body::Text),
                    _ => None,
                };
                if let Some(b) = simple {
                    self.bump();
                    return Ok(vec![b]);
                }
                let (name, _) = self.ident()?;
                let args = if self.eat(&Tok::LParen) { self.expr_list(&Tok::RParen)? } else { Vec::new() };
                Ok(vec![Body::Call(name, args)])
            }
            Tok::LParen => {
                self.bump();
                let items = self.alt()?;
                self.expect(&Tok::RParen)?;
                Ok(items)
            }
            Tok::LBrace => {
                self.bump();
                let es = self.expr_list(&Tok::RBrace)?;
                Ok(vec![Body::Actions(es)])
            }
            Tok::Lt => Ok(vec![Body::Element(self.element()?)]),
            _ => Err(Diagnostic::error(span, format!("expected a rule body item, found {}", self.peek().tok.describe()))),
        }
    }

    fn element(&mut self) -> PResult<ElementSpec> {
        self.expect(&Tok::Lt)?;
        let (tag, tag_span) = self.ident()?;
        let mut attrs = Vec::new();
        let mut seen = BTreeSet::new();
        while let Tok::Ident(w) = &self.peek().tok {
            if w == "when" {
                break;
            }
            let (var, span) = self.ident()?;
            let attr = if self.eat(&Tok::Eq) { self.ident()?.0 } else { var.clone() };
            if !seen.insert(var.clone()) {
                return Err(Diagnostic::error(span, format!("duplicate attribute variable `{var}` in <{tag}>")));
            }
            attrs.push(AttrBinding { var, attr });
        }
        let mut spec = ElementSpec { tag, attrs, guarded: Vec::new(), else_body: Vec::new() };
        if self.eat(&Tok::SlashGt) {
            return Ok(spec);
        }
        if self.at_keyword("when") {
            self.bump();
            let guard = self.expr()?;
            self.expect(&Tok::Gt)?;
            let body = self.alt()?;
            spec.guarded.push(Guarded { guard, body });
            while self.at_keyword("when") {
                self.bump();
                let guard = self.expr()?;
                self.expect(&Tok::Gt)?;
                let body = self.alt()?;
                spec.guarded.push(Guarded { guard, body });
            }
            if self.at_keyword("else") {
                self.bump();
                spec.else_body = self.alt()?;
            }
        } else {
            self.expect(&Tok::Gt)?;
            spec.else_body = self.alt()?;
        }
        let close_span = self.peek().span;
        if !self.eat(&Tok::LtSlash) {
            return Err(Diagnostic::error(
                close_span,
                format!("unbalanced element: expected `</{}>` to close <{}> opened at {}, found {}", spec.tag, spec.tag, tag_span, self.peek().tok.describe()),
            ));
        }
        let (close, span) = self.ident()?;
        if close != spec.tag {
            return Err(Diagnostic::error(
                span,
                format!("unbalanced element: `</{close}>` closes <{}> opened at {}", spec.tag, tag_span),
            ));
        }
        self.expect(&Tok::Gt)?;
        Ok(spec)
    }

    fn expr_list(&mut self, close: &Tok) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let left = self.cons_expr()?;
        let op = match self.peek().tok {
            Tok::Eq => CompareOp::Eq,
            Tok::NotEq => CompareOp::Ne,
            _ => return Ok(left),
        };
        self.bump();
        let right = self.cons_expr()?;
        Ok(Expr::Compare(op, Box::new(left), Box::new(right)))
    }

    fn cons_expr(&mut self) -> PResult<Expr> {
        let head = self.postfix_expr()?;
        if self.eat(&Tok::Colon) {
            let tail = self.cons_expr()?;
            return Ok(Expr::Cons(Box::new(head), Box::new(tail)));
        }
        Ok(head)
    }

    fn postfix_expr(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.at(&Tok::Arrow) {
                self.bump();
                match &self.peek().tok {
                    Tok::Ident(w) if w == "iterate" => {
                        self.bump();
                    }
                    _ => return Err(self.unexpected("`iterate`")),
                }
                self.expect(&Tok::LParen)?;
                let (elem, _) = self.ident()?;
                let (acc, _) = self.ident()?;
                self.expect(&Tok::Eq)?;
                let init = self.expr()?;
                self.expect(&Tok::Bar)?;
                let step = self.expr()?;
                self.expect(&Tok::RParen)?;
                e = Expr::Fold { elem, acc, init: Box::new(init), step: Box::new(step), over: Box::new(e) };
            } else if self.at(&Tok::Dot)
                && matches!(self.peek_at(1), Tok::Ident(w) if w == "add")
                && matches!(self.peek_at(2), Tok::LParen)
            {
                self.bump();
                self.bump();
                self.bump();
                let child = self.expr()?;
                self.expect(&Tok::RParen)?;
                e = Expr::AddChild(Box::new(e), Box::new(child));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Int(i))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(w) => match w.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(Expr::Bool(w == "true"))
                }
                "null" => {
                    self.bump();
                    Ok(Expr::Null)
                }
                "Seq" if matches!(self.peek_at(1), Tok::LBrace) => {
                    self.bump();
                    self.bump();
                    Ok(Expr::List(self.expr_list(&Tok::RBrace)?))
                }
                _ => {
                    let (name, _) = self.ident()?;
                    if self.eat(&Tok::LParen) {
                        Ok(Expr::Construct(name, self.expr_list(&Tok::RParen)?))
                    } else if name.starts_with(|c: char| c.is_uppercase()) {
                        Ok(Expr::Construct(name, Vec::new()))
                    } else {
                        Ok(Expr::Var(name))
                    }
                }
            },
            _ => Err(self.unexpected("an expression")),
        }
    }
}
