//! Recursive-descent parser with one token of lookahead.

use std::rc::Rc;

use crate::syntax::{Name, Type};
use crate::typecheck::TypeParam;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Span, SyntaxError};

pub fn parse(src: &str) -> Result<Program, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut defs = Vec::new();
    while p.peek() != &Tok::Eof {
        defs.push(p.def()?);
    }
    Ok(Program { defs })
}

/// Parses a single expression (used by tests and tools).
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_type(src: &str) -> Result<Type, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const TYPE_PREFIXES: &[&str] = &["O", "Box", "Str", "Ev", "Maybe"];

impl Parser {
    fn new(src: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, SyntaxError> {
        let found = self.peek().describe();
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        Err(SyntaxError {
            span: self.span(),
            msg: format!("expected {}, found {found}", expected.join(" or ")),
            expected,
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), SyntaxError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("`{k}`")])
        }
    }

    fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn ident(&mut self) -> Result<(Name, Span), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "_" => {
                let sp = self.bump().span;
                Ok((Name::from(s.as_str()), sp))
            }
            _ => self.error(&["identifier"]),
        }
    }

    // ---- definitions ----

    fn def(&mut self) -> Result<Def, SyntaxError> {
        self.expect_kw("def")?;
        let (name, span) = self.ident()?;
        let mut params = Vec::new();
        if self.eat_sym("[") {
            loop {
                let (p, _) = self.ident()?;
                let stable = if self.eat_sym(":") {
                    match self.peek().clone() {
                        Tok::Ident(s) if s == "Stable" => {
                            self.bump();
                            true
                        }
                        _ => return self.error(&["`Stable`"]),
                    }
                } else {
                    false
                };
                params.push(TypeParam { name: p, stable });
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym("]")?;
        }
        let mut outer = Vec::new();
        while self.starts_pattern() {
            outer.push(self.pattern()?);
        }
        let inner = if self.eat_sym("$") {
            let mut inner = Vec::new();
            while self.starts_pattern() {
                inner.push(self.pattern()?);
            }
            Some(inner)
        } else {
            None
        };
        self.expect_sym(":")?;
        let ty = self.ty()?;
        self.expect_sym("=")?;
        let body = self.expr()?;
        if !matches!(self.peek(), Tok::Eof | Tok::Kw("def")) {
            return self.error(&["`def`", "end of input", "an operator"]);
        }
        Ok(Def { name, span, params, outer, inner, ty, body })
    }

    // ---- patterns ----

    fn starts_pattern(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) || self.is_sym("(")
    }

    fn pattern(&mut self) -> Result<Pattern, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(if s == "_" { Pattern::Wild } else { Pattern::Var(Name::from(s.as_str())) })
            }
            Tok::Sym("(") => {
                self.bump();
                let first = self.pattern()?;
                let pat = if self.eat_sym(",") {
                    Pattern::Pair(Box::new(first), Box::new(self.pattern()?))
                } else if self.eat_sym("::") {
                    Pattern::Cons(Box::new(first), Box::new(self.pattern()?))
                } else if self.is_sym(")") {
                    first
                } else {
                    return self.error(&["`,`", "`::`", "`)`"]);
                };
                self.expect_sym(")")?;
                Ok(pat)
            }
            _ => self.error(&["pattern"]),
        }
    }

    // ---- types ----

    pub fn ty(&mut self) -> Result<Type, SyntaxError> {
        let a = self.sum_ty()?;
        if self.eat_sym("->") {
            Ok(Type::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn sum_ty(&mut self) -> Result<Type, SyntaxError> {
        let a = self.prod_ty()?;
        if self.eat_sym("+") {
            Ok(Type::sum(a, self.sum_ty()?))
        } else {
            Ok(a)
        }
    }

    fn prod_ty(&mut self) -> Result<Type, SyntaxError> {
        let a = self.prefix_ty()?;
        if self.eat_sym("*") {
            Ok(Type::prod(a, self.prod_ty()?))
        } else {
            Ok(a)
        }
    }

    fn prefix_ty(&mut self) -> Result<Type, SyntaxError> {
        if let Tok::Ident(s) = self.peek().clone() {
            if TYPE_PREFIXES.contains(&s.as_str()) {
                self.bump();
                let a = self.prefix_ty()?;
                return Ok(match s.as_str() {
                    "O" => Type::delay(a),
                    "Box" => Type::boxed(a),
                    "Str" => Type::stream(a),
                    "Ev" => Type::event(a),
                    _ => Type::maybe(a),
                });
            }
        }
        self.atom_ty()
    }

    fn atom_ty(&mut self) -> Result<Type, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(match s.as_str() {
                    "Nat" => Type::Nat,
                    "Unit" => Type::Unit,
                    "Bool" => Type::bool(),
                    _ => Type::Var(Name::from(s.as_str())),
                })
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok(Type::Unit);
                }
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Kw("mu") => {
                self.bump();
                let (a, _) = self.ident()?;
                self.expect_sym(".")?;
                let body = self.ty()?;
                Ok(Type::Mu(a, Rc::new(body)))
            }
            _ => self.error(&["type"]),
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> Result<Expr, SyntaxError> {
        if let Some(e) = self.open_form()? {
            return Ok(e);
        }
        self.cons()
    }

    /// Forms that extend as far to the right as possible.
    fn open_form(&mut self) -> Result<Option<Expr>, SyntaxError> {
        let span = self.span();
        let kind = if self.eat_sym("\\") {
            let mut pats = vec![self.pattern()?];
            while self.starts_pattern() {
                pats.push(self.pattern()?);
            }
            self.expect_sym(".")?;
            ExprKind::Lam(pats, Box::new(self.expr()?))
        } else if self.is_kw("fix") {
            self.bump();
            let (x, _) = self.ident()?;
            self.expect_sym(".")?;
            ExprKind::Fix(x, Box::new(self.expr()?))
        } else if self.is_kw("if") {
            self.bump();
            let c = self.expr()?;
            self.expect_kw("then")?;
            let t = self.expr()?;
            self.expect_kw("else")?;
            let e = self.expr()?;
            ExprKind::If(Box::new(c), Box::new(t), Box::new(e))
        } else if self.is_kw("case") {
            self.bump();
            let scrutinee = self.expr()?;
            self.expect_kw("of")?;
            let first = self.alt()?;
            self.expect_sym("|")?;
            let second = self.alt()?;
            if first.ctor.is_left() == second.ctor.is_left() {
                return Err(SyntaxError {
                    span: second.span,
                    expected: vec![],
                    msg: "case needs one alternative for each summand".into(),
                });
            }
            if first.ctor.unfolds() != second.ctor.unfolds() {
                return Err(SyntaxError {
                    span: second.span,
                    expected: vec![],
                    msg: "cannot mix `val`/`wait` alternatives with plain sum alternatives".into(),
                });
            }
            ExprKind::Case(Box::new(scrutinee), vec![first, second])
        } else {
            return Ok(None);
        };
        Ok(Some(Expr { kind, span }))
    }

    fn alt(&mut self) -> Result<Alt, SyntaxError> {
        let span = self.span();
        let ctor = match self.peek() {
            Tok::Kw("in1") => AltCtor::In1,
            Tok::Kw("in2") => AltCtor::In2,
            Tok::Kw("nothing") => AltCtor::Nothing,
            Tok::Kw("just") => AltCtor::Just,
            Tok::Kw("true") => AltCtor::True,
            Tok::Kw("false") => AltCtor::False,
            Tok::Kw("val") => AltCtor::Val,
            Tok::Kw("wait") => AltCtor::Wait,
            _ => return self.error(&["`in1`", "`in2`", "`nothing`", "`just`", "`true`", "`false`", "`val`", "`wait`"]),
        };
        self.bump();
        let pat = if ctor.takes_pattern() { self.pattern()? } else { Pattern::Wild };
        self.expect_sym("->")?;
        let body = self.expr()?;
        Ok(Alt { ctor, pat, body, span })
    }

    fn cons(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.apops()?;
        if self.is_sym("::") {
            let span = self.bump().span;
            let rhs = self.expr_or_cons()?;
            return Ok(bin(BinOp::Cons, lhs, rhs, span));
        }
        Ok(lhs)
    }

    fn expr_or_cons(&mut self) -> Result<Expr, SyntaxError> {
        match self.open_form()? {
            Some(e) => Ok(e),
            None => self.cons(),
        }
    }

    fn apops(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.cmp()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("<*>") => BinOp::LaterApp,
                Tok::Sym("<*") => BinOp::LaterAppStable,
                Tok::Sym("[*]") => BinOp::BoxAppStable,
                Tok::Sym("[<*>]") => BinOp::BoxApp,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            if let Some(open) = self.open_form()? {
                return Ok(bin(op, lhs, open, span));
            }
            let rhs = self.cmp()?;
            lhs = bin(op, lhs, rhs, span);
        }
    }

    fn cmp(&mut self) -> Result<Expr, SyntaxError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("<") => BinOp::Lt,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        if let Some(open) = self.open_form()? {
            return Ok(bin(op, lhs, open, span));
        }
        let rhs = self.additive()?;
        Ok(bin(op, lhs, rhs, span))
    }

    fn additive(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Monus,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            if let Some(open) = self.open_form()? {
                return Ok(bin(op, lhs, open, span));
            }
            let rhs = self.multiplicative()?;
            lhs = bin(op, lhs, rhs, span);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.application()?;
        while self.is_sym("*") {
            let span = self.bump().span;
            if let Some(open) = self.open_form()? {
                return Ok(bin(BinOp::Mul, lhs, open, span));
            }
            let rhs = self.application()?;
            lhs = bin(BinOp::Mul, lhs, rhs, span);
        }
        Ok(lhs)
    }

    fn starts_unary(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s != "_",
            Tok::Nat(_) => true,
            Tok::Sym("(") => true,
            Tok::Kw(k) => Prefix::from_keyword(k).is_some() || matches!(*k, "true" | "false" | "nothing"),
            _ => false,
        }
    }

    fn application(&mut self) -> Result<Expr, SyntaxError> {
        let mut f = self.unary()?;
        loop {
            if self.starts_unary() {
                let a = self.unary()?;
                let span = f.span;
                f = Expr { kind: ExprKind::App(Box::new(f), Box::new(a)), span };
            } else if let Some(open) = self.open_form()? {
                let span = f.span;
                return Ok(Expr { kind: ExprKind::App(Box::new(f), Box::new(open)), span });
            } else {
                return Ok(f);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if let Tok::Kw(k) = self.peek() {
            if let Some(prefix) = Prefix::from_keyword(k) {
                let span = self.bump().span;
                let arg = match self.open_form()? {
                    Some(open) => open,
                    None => self.unary()?,
                };
                return Ok(Expr { kind: ExprKind::Prefix(prefix, Box::new(arg)), span });
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) if s != "_" => {
                self.bump();
                let name = Name::from(s.as_str());
                if self.is_sym("[") && matches!(self.peek_at(1), Tok::Ident(_) | Tok::Sym("(") | Tok::Kw("mu")) {
                    self.bump();
                    let mut tys = vec![self.ty()?];
                    while self.eat_sym(",") {
                        tys.push(self.ty()?);
                    }
                    self.expect_sym("]")?;
                    ExprKind::TyApp(name, tys)
                } else {
                    ExprKind::Var(name)
                }
            }
            Tok::Nat(n) => {
                self.bump();
                ExprKind::Nat(n)
            }
            Tok::Kw("true") => {
                self.bump();
                ExprKind::True
            }
            Tok::Kw("false") => {
                self.bump();
                ExprKind::False
            }
            Tok::Kw("nothing") => {
                self.bump();
                ExprKind::Nothing
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    ExprKind::Unit
                } else {
                    let e = self.expr()?;
                    let kind = if self.eat_sym(",") {
                        let mut rest = vec![self.expr()?];
                        while self.eat_sym(",") {
                            rest.push(self.expr()?);
                        }
                        let mut tail = rest.pop().unwrap();
                        while let Some(x) = rest.pop() {
                            let sp = x.span;
                            tail = Expr { kind: ExprKind::Pair(Box::new(x), Box::new(tail)), span: sp };
                        }
                        ExprKind::Pair(Box::new(e), Box::new(tail))
                    } else if self.eat_sym(":") {
                        ExprKind::Ann(Box::new(e), self.ty()?)
                    } else {
                        self.expect_sym(")")?;
                        return Ok(Expr { kind: e.kind, span });
                    };
                    self.expect_sym(")")?;
                    kind
                }
            }
            _ => return self.error(&["expression"]),
        };
        Ok(Expr { kind, span })
    }
}

fn bin(op: BinOp, lhs: Expr, rhs: Expr, span: Span) -> Expr {
    Expr { kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span }
}
