//! Reading and printing the values that cross the process boundary.
//!
//! Literals are naturals, `()`, `(v, w)`, `in1 v`, `in2 v`, and the
//! aliases `true`, `false`, `nothing`, `just v`.

use crate::surface::{lower::lower_expr, parse_expr};
use crate::syntax::{Side, Term, Type};

/// Parses one value literal.
pub fn parse_value(src: &str) -> Result<Term, String> {
    let e = parse_expr(src).map_err(|e| e.to_string())?;
    let t = lower_expr(&e).map_err(|e| e.to_string())?;
    if is_datum(&t) {
        Ok(t)
    } else {
        Err(format!("`{}` is not a value literal", src.trim()))
    }
}

/// Built only from `()`, naturals, pairs and injections.
pub fn is_datum(t: &Term) -> bool {
    match t {
        Term::Unit | Term::Nat(_) => true,
        Term::Pair(a, b) => is_datum(a) && is_datum(b),
        Term::Inj(_, a) => is_datum(a),
        _ => false,
    }
}

/// Whether the closed value `v` inhabits the value type `ty`.
pub fn has_value_type(v: &Term, ty: &Type) -> bool {
    match (v, ty) {
        (Term::Unit, Type::Unit) | (Term::Nat(_), Type::Nat) => true,
        (Term::Pair(a, b), Type::Prod(s, t)) => has_value_type(a, s) && has_value_type(b, t),
        (Term::Inj(Side::Left, a), Type::Sum(s, _)) => has_value_type(a, s),
        (Term::Inj(Side::Right, a), Type::Sum(_, t)) => has_value_type(a, t),
        _ => false,
    }
}

/// Prints a value, using `true`/`false` and `nothing`/`just` where the
/// type says so.
pub fn value_to_string(v: &Term, ty: &Type) -> String {
    match (v, ty) {
        (Term::Inj(side, _), t) if t.is_bool() => {
            if *side == Side::Right { "true" } else { "false" }.to_string()
        }
        (Term::Inj(Side::Left, a), Type::Sum(u, _)) if matches!(**u, Type::Unit) && **a == Term::Unit => {
            "nothing".to_string()
        }
        (Term::Inj(Side::Right, a), Type::Sum(u, t)) if matches!(**u, Type::Unit) => {
            format!("just {}", nested(a, t))
        }
        (Term::Inj(side, a), Type::Sum(s, t)) => {
            let (kw, inner) = if *side == Side::Left { ("in1", s) } else { ("in2", t) };
            format!("{kw} {}", nested(a, inner))
        }
        (Term::Pair(a, b), Type::Prod(s, t)) => {
            format!("({}, {})", value_to_string(a, s), value_to_string(b, t))
        }
        _ => v.to_string(),
    }
}

fn nested(v: &Term, ty: &Type) -> String {
    let s = value_to_string(v, ty);
    let simple = matches!(v, Term::Unit | Term::Nat(_) | Term::Pair(..)) || (ty.is_bool() && matches!(v, Term::Inj(..)));
    if simple {
        s
    } else {
        format!("({s})")
    }
}
