//! Core abstract syntax: types, terms, values and substitution.

mod terms;
mod types;

use std::cell::Cell;
use std::rc::Rc;

pub use terms::{alpha_eq_terms, is_value, subst_term, Location, PrimOp, Side, Term};
pub use types::{is_stable, is_stable_with, is_value_type, well_formed_type, Type};

pub type Name = Rc<str>;

thread_local! {
    static FRESH: Cell<u64> = const { Cell::new(0) };
}

/// A name that cannot clash with anything the parser accepts: the `%`
/// separator is not an identifier character.
pub fn fresh_name(base: &str) -> Name {
    let n = FRESH.with(|c| {
        let n = c.get();
        c.set(n + 1);
        n
    });
    let stem = base.split('%').next().unwrap_or(base);
    Name::from(format!("{stem}%{n}"))
}

/// Capture-avoiding `A[B/alpha]`.
pub fn subst_type(a: &Type, alpha: &str, b: &Type) -> Type {
    a.subst(alpha, b)
}
