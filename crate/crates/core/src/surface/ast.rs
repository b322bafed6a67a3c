//! Surface syntax tree.

use crate::syntax::{Name, Type};
use crate::typecheck::TypeParam;

use super::Span;

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub defs: Vec<Def>,
}

#[derive(Clone, Debug)]
pub struct Def {
    pub name: Name,
    pub span: Span,
    pub params: Vec<TypeParam>,
    /// Parameters to the left of `$` (or all of them without `$`).
    pub outer: Vec<Pattern>,
    /// `Some` when the definition is a fixed point; holds the parameters
    /// to the right of `$`.
    pub inner: Option<Vec<Pattern>>,
    pub ty: Type,
    pub body: Expr,
}

impl Def {
    pub fn is_fixpoint(&self) -> bool {
        self.inner.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Var(Name),
    Wild,
    Pair(Box<Pattern>, Box<Pattern>),
    /// `(x :: xs)`, matching a stream's head and tail.
    Cons(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    pub fn binders(&self, out: &mut Vec<Name>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Wild => {}
            Pattern::Pair(a, b) | Pattern::Cons(a, b) => {
                a.binders(out);
                b.binders(out);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefix {
    Delay,
    Adv,
    Box,
    Unbox,
    Progress,
    Promote,
    Into,
    Out,
    Fst,
    Snd,
    In1,
    In2,
    Val,
    Wait,
    Just,
    Head,
    Tail,
}

impl Prefix {
    pub fn from_keyword(k: &str) -> Option<Prefix> {
        Some(match k {
            "delay" => Prefix::Delay,
            "adv" => Prefix::Adv,
            "box" => Prefix::Box,
            "unbox" => Prefix::Unbox,
            "progress" => Prefix::Progress,
            "promote" => Prefix::Promote,
            "into" => Prefix::Into,
            "out" => Prefix::Out,
            "fst" => Prefix::Fst,
            "snd" => Prefix::Snd,
            "in1" => Prefix::In1,
            "in2" => Prefix::In2,
            "val" => Prefix::Val,
            "wait" => Prefix::Wait,
            "just" => Prefix::Just,
            "head" => Prefix::Head,
            "tail" => Prefix::Tail,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Monus,
    Mul,
    Eq,
    Lt,
    Cons,
    /// `<*>`
    LaterApp,
    /// `<*`
    LaterAppStable,
    /// `[*]`
    BoxAppStable,
    /// `[<*>]`
    BoxApp,
}

/// Constructor heading a case alternative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AltCtor {
    In1,
    In2,
    Nothing,
    Just,
    False,
    True,
    Val,
    Wait,
}

impl AltCtor {
    pub fn is_left(self) -> bool {
        matches!(self, AltCtor::In1 | AltCtor::Nothing | AltCtor::False | AltCtor::Val)
    }

    /// `val`/`wait` alternatives scrutinise `out e`.
    pub fn unfolds(self) -> bool {
        matches!(self, AltCtor::Val | AltCtor::Wait)
    }

    pub fn takes_pattern(self) -> bool {
        !matches!(self, AltCtor::Nothing | AltCtor::False | AltCtor::True)
    }
}

#[derive(Clone, Debug)]
pub struct Alt {
    pub ctor: AltCtor,
    pub pat: Pattern,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Var(Name),
    /// `name[T1, ..., Tn]`
    TyApp(Name, Vec<Type>),
    Unit,
    Nat(num_bigint::BigUint),
    True,
    False,
    Nothing,
    Lam(Vec<Pattern>, Box<Expr>),
    Fix(Name, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Ann(Box<Expr>, Type),
    Prefix(Prefix, Box<Expr>),
    Case(Box<Expr>, Vec<Alt>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}
