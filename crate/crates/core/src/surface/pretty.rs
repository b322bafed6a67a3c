//! Printing terms, types, heaps and stores in the concrete syntax.
//!
//! Location-free terms print to text that parses and lowers back to an
//! α-equivalent term.

use std::fmt::Write;

use crate::machine::{Heap, Store};
use crate::syntax::{PrimOp, Side, Term, Type};

// Term precedence levels, loosest first.
const OPEN: u8 = 0;
const CONS: u8 = 1;
const APOP: u8 = 2;
const CMP: u8 = 3;
const ADD: u8 = 4;
const MUL: u8 = 5;
const APP: u8 = 6;
const UNARY: u8 = 7;
const ATOM: u8 = 8;

pub fn term_to_string(t: &Term) -> String {
    let mut out = String::new();
    term(&mut out, t, OPEN, true);
    out
}

/// Like [`term_to_string`], cut to a length suitable for error messages.
pub fn term_to_string_short(t: &Term) -> String {
    const MAX: usize = 80;
    let s = term_to_string(t);
    if s.chars().count() <= MAX {
        s
    } else {
        let cut: String = s.chars().take(MAX - 1).collect();
        format!("{cut}…")
    }
}

fn is_open(t: &Term) -> bool {
    matches!(t, Term::Lam(..) | Term::Fix(..) | Term::Case(..))
}

fn level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::Fix(..) | Term::Case(..) => OPEN,
        Term::Into(p) if matches!(**p, Term::Pair(..)) => CONS,
        Term::Prim(PrimOp::Eq | PrimOp::Lt, ..) => CMP,
        Term::Add(..) | Term::Prim(PrimOp::Monus, ..) => ADD,
        Term::Prim(PrimOp::Mul, ..) => MUL,
        Term::App(..) => APP,
        Term::Proj(..)
        | Term::Inj(..)
        | Term::Delay(_)
        | Term::Adv(_)
        | Term::Box(_)
        | Term::Unbox(_)
        | Term::Progress(_)
        | Term::Promote(_)
        | Term::Into(_)
        | Term::Out(_) => UNARY,
        Term::Unit | Term::Nat(_) | Term::Var(_) | Term::Loc(_) | Term::Ann(..) => ATOM,
        Term::Pair(..) => ATOM,
    }
}

/// Prints `t` in a position that accepts level `prec`. `rightmost` says
/// whether nothing follows `t` before the enclosing form ends, which is
/// where open forms may appear unparenthesised.
fn term(out: &mut String, t: &Term, prec: u8, rightmost: bool) {
    let lvl = level(t);
    let bare = if is_open(t) { prec == OPEN || rightmost } else { lvl >= prec };
    if !bare {
        out.push('(');
        term(out, t, OPEN, true);
        out.push(')');
        return;
    }
    match t {
        Term::Unit => out.push_str("()"),
        Term::Nat(n) => write!(out, "{n}").unwrap(),
        Term::Var(x) => out.push_str(x),
        Term::Loc(l) => write!(out, "{l}").unwrap(),
        Term::Lam(x, b) => {
            write!(out, "\\{x}. ").unwrap();
            term(out, b, OPEN, true);
        }
        Term::Fix(x, b) => {
            write!(out, "fix {x}. ").unwrap();
            term(out, b, OPEN, true);
        }
        Term::Case(s, x, l, y, r) => {
            out.push_str("case ");
            term(out, s, OPEN, true);
            write!(out, " of in1 {x} -> ").unwrap();
            term(out, l, OPEN, true);
            write!(out, " | in2 {y} -> ").unwrap();
            term(out, r, OPEN, true);
        }
        Term::Into(p) if matches!(**p, Term::Pair(..)) => {
            let Term::Pair(h, tl) = &**p else { unreachable!() };
            term(out, h, APOP, false);
            out.push_str(" :: ");
            term(out, tl, CONS, rightmost);
        }
        Term::Add(a, b) => binary(out, "+", a, b, ADD, MUL, rightmost),
        Term::Prim(op, a, b) => {
            let (l, r) = match op {
                PrimOp::Eq | PrimOp::Lt => (ADD, ADD),
                PrimOp::Monus => (ADD, MUL),
                PrimOp::Mul => (MUL, APP),
            };
            binary(out, op.symbol(), a, b, l, r, rightmost)
        }
        Term::App(f, a) => {
            term(out, f, APP, false);
            out.push(' ');
            term(out, a, ATOM, rightmost);
        }
        Term::Proj(side, p) => match (&**p, side) {
            (Term::Out(s), Side::Left) => prefix(out, "head", s, rightmost),
            (Term::Out(s), Side::Right) => prefix(out, "tail", s, rightmost),
            (_, Side::Left) => prefix(out, "fst", p, rightmost),
            (_, Side::Right) => prefix(out, "snd", p, rightmost),
        },
        Term::Inj(Side::Left, a) => prefix(out, "in1", a, rightmost),
        Term::Inj(Side::Right, a) => prefix(out, "in2", a, rightmost),
        Term::Delay(a) => prefix(out, "delay", a, rightmost),
        Term::Adv(a) => prefix(out, "adv", a, rightmost),
        Term::Box(a) => prefix(out, "box", a, rightmost),
        Term::Unbox(a) => prefix(out, "unbox", a, rightmost),
        Term::Progress(a) => prefix(out, "progress", a, rightmost),
        Term::Promote(a) => prefix(out, "promote", a, rightmost),
        Term::Into(a) => prefix(out, "into", a, rightmost),
        Term::Out(a) => prefix(out, "out", a, rightmost),
        Term::Pair(a, b) => {
            out.push('(');
            term(out, a, OPEN, true);
            out.push_str(", ");
            // A nested pair on the right is written explicitly so that the
            // tuple shorthand never changes the shape.
            term(out, b, OPEN, true);
            out.push(')');
        }
        Term::Ann(a, ty) => {
            out.push('(');
            term(out, a, OPEN, true);
            write!(out, " : {})", type_to_string(ty)).unwrap();
        }
    }
}

fn binary(out: &mut String, op: &str, a: &Term, b: &Term, lp: u8, rp: u8, rightmost: bool) {
    term(out, a, lp, false);
    write!(out, " {op} ").unwrap();
    term(out, b, rp, rightmost);
}

fn prefix(out: &mut String, kw: &str, a: &Term, rightmost: bool) {
    out.push_str(kw);
    out.push(' ');
    term(out, a, ATOM, rightmost);
}

// Type precedence levels.
const T_ARROW: u8 = 0;
const T_SUM: u8 = 1;
const T_PROD: u8 = 2;
const T_PREFIX: u8 = 3;
const T_ATOM: u8 = 4;

pub fn type_to_string(ty: &Type) -> String {
    let mut out = String::new();
    typ(&mut out, ty, T_ARROW);
    out
}

fn type_level(ty: &Type) -> u8 {
    if ty.is_bool() {
        return T_ATOM;
    }
    if ty.as_stream().is_some() || ty.as_event().is_some() {
        return T_PREFIX;
    }
    match ty {
        Type::Var(_) | Type::Unit | Type::Nat => T_ATOM,
        Type::Sum(a, _) if matches!(**a, Type::Unit) => T_PREFIX,
        Type::Arrow(..) => T_ARROW,
        Type::Sum(..) => T_SUM,
        Type::Prod(..) => T_PROD,
        Type::Delay(_) | Type::Box(_) => T_PREFIX,
        // `mu` extends to the right, so it only appears bare at the top.
        Type::Mu(..) => T_ARROW,
    }
}

fn typ(out: &mut String, ty: &Type, prec: u8) {
    if type_level(ty) < prec {
        out.push('(');
        typ(out, ty, T_ARROW);
        out.push(')');
        return;
    }
    if ty.is_bool() {
        out.push_str("Bool");
        return;
    }
    if let Some(a) = ty.as_stream() {
        out.push_str("Str ");
        return typ(out, a, T_ATOM);
    }
    if let Some(a) = ty.as_event() {
        out.push_str("Ev ");
        return typ(out, a, T_ATOM);
    }
    match ty {
        Type::Var(v) => out.push_str(v),
        Type::Unit => out.push_str("Unit"),
        Type::Nat => out.push_str("Nat"),
        Type::Sum(a, b) if matches!(**a, Type::Unit) => {
            out.push_str("Maybe ");
            typ(out, b, T_ATOM);
        }
        Type::Arrow(a, b) => {
            typ(out, a, T_SUM);
            out.push_str(" -> ");
            typ(out, b, T_ARROW);
        }
        Type::Sum(a, b) => {
            typ(out, a, T_PROD);
            out.push_str(" + ");
            typ(out, b, T_SUM);
        }
        Type::Prod(a, b) => {
            typ(out, a, T_PREFIX);
            out.push_str(" * ");
            typ(out, b, T_PROD);
        }
        Type::Delay(a) => {
            out.push_str("O ");
            typ(out, a, T_ATOM);
        }
        Type::Box(a) => {
            out.push_str("Box ");
            typ(out, a, T_ATOM);
        }
        Type::Mu(x, a) => {
            write!(out, "mu {x}. ").unwrap();
            typ(out, a, T_ARROW);
        }
    }
}

pub fn heap_to_string(heap: &Heap) -> String {
    let items: Vec<String> = heap.iter().map(|(l, t)| format!("{l} ↦ {}", term_to_string(t))).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn store_to_string(store: &Store) -> String {
    match store {
        Store::Bottom => "bottom".to_string(),
        Store::One { later } => format!("lock {}", heap_to_string(later)),
        Store::Two { now, later } => format!("lock {} tick {}", heap_to_string(now), heap_to_string(later)),
    }
}

/// A driver state `⟨t, η⟩`.
pub fn state_to_string(t: &Term, heap: &Heap) -> String {
    format!("⟨{}, {}⟩", term_to_string(t), heap_to_string(heap))
}
