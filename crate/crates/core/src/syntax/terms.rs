//! Terms, values and capture-avoiding substitution.

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;

use super::{fresh_name, Name, Type};

/// A heap location. `Input` is the reserved location that carries the
/// transducer's input stream; the allocator never hands it out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Heap(usize),
    Input,
}

impl Location {
    pub fn index(self) -> Option<usize> {
        match self {
            Location::Heap(n) => Some(n),
            Location::Input => None,
        }
    }

    pub fn is_reserved(self) -> bool {
        self == Location::Input
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Heap(n) => write!(f, "#{n}"),
            Location::Input => f.write_str("#in"),
        }
    }
}

/// Binary primitives on naturals beyond `+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimOp {
    Eq,
    Lt,
    Mul,
    /// Truncated subtraction.
    Monus,
}

impl PrimOp {
    pub fn symbol(self) -> &'static str {
        match self {
            PrimOp::Eq => "==",
            PrimOp::Lt => "<",
            PrimOp::Mul => "*",
            PrimOp::Monus => "-",
        }
    }

    pub fn returns_bool(self) -> bool {
        matches!(self, PrimOp::Eq | PrimOp::Lt)
    }
}

/// Which component of a pair or which summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Unit,
    Nat(BigUint),
    Var(Name),
    Lam(Name, Rc<Term>),
    App(Rc<Term>, Rc<Term>),
    Add(Rc<Term>, Rc<Term>),
    Prim(PrimOp, Rc<Term>, Rc<Term>),
    Pair(Rc<Term>, Rc<Term>),
    Proj(Side, Rc<Term>),
    Inj(Side, Rc<Term>),
    /// `case t of in1 x -> l | in2 y -> r`
    Case(Rc<Term>, Name, Rc<Term>, Name, Rc<Term>),
    Delay(Rc<Term>),
    Adv(Rc<Term>),
    Box(Rc<Term>),
    Unbox(Rc<Term>),
    Progress(Rc<Term>),
    Promote(Rc<Term>),
    Into(Rc<Term>),
    Out(Rc<Term>),
    Fix(Name, Rc<Term>),
    Loc(Location),
    /// Type ascription. Used by the elaborator so that inlined definitions
    /// can be inferred; evaluation ignores it.
    Ann(Rc<Term>, Type),
}

macro_rules! unary {
    ($($fn:ident => $ctor:ident),*) => {
        $(pub fn $fn(t: Term) -> Term { Term::$ctor(Rc::new(t)) })*
    };
}

impl Term {
    pub fn nat(n: u64) -> Term {
        Term::Nat(BigUint::from(n))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Name::from(name))
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(Name::from(x), Rc::new(body))
    }

    pub fn fix(x: &str, body: Term) -> Term {
        Term::Fix(Name::from(x), Rc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Rc::new(f), Rc::new(a))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Rc::new(a), Rc::new(b))
    }

    pub fn prim(op: PrimOp, a: Term, b: Term) -> Term {
        Term::Prim(op, Rc::new(a), Rc::new(b))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Rc::new(a), Rc::new(b))
    }

    pub fn fst(t: Term) -> Term {
        Term::Proj(Side::Left, Rc::new(t))
    }

    pub fn snd(t: Term) -> Term {
        Term::Proj(Side::Right, Rc::new(t))
    }

    pub fn in1(t: Term) -> Term {
        Term::Inj(Side::Left, Rc::new(t))
    }

    pub fn in2(t: Term) -> Term {
        Term::Inj(Side::Right, Rc::new(t))
    }

    pub fn case(t: Term, x: &str, l: Term, y: &str, r: Term) -> Term {
        Term::Case(Rc::new(t), Name::from(x), Rc::new(l), Name::from(y), Rc::new(r))
    }

    unary!(delay => Delay, adv => Adv, boxed => Box, unbox => Unbox,
           progress => Progress, promote => Promote, into => Into, out => Out);

    pub fn ann(t: Term, ty: Type) -> Term {
        Term::Ann(Rc::new(t), ty)
    }

    /// `into (h, t)`
    pub fn cons(h: Term, t: Term) -> Term {
        Term::into(Term::pair(h, t))
    }

    /// `fst (out s)`
    pub fn head(s: Term) -> Term {
        Term::fst(Term::out(s))
    }

    /// `snd (out s)`
    pub fn tail(s: Term) -> Term {
        Term::snd(Term::out(s))
    }

    pub fn tt() -> Term {
        Term::in2(Term::Unit)
    }

    pub fn ff() -> Term {
        Term::in1(Term::Unit)
    }

    /// `delay (adv t (adv u))`
    pub fn later_app(t: Term, u: Term) -> Term {
        Term::delay(Term::app(Term::adv(t), Term::adv(u)))
    }

    /// `delay (adv t (progress u))`
    pub fn later_app_stable(t: Term, u: Term) -> Term {
        Term::delay(Term::app(Term::adv(t), Term::progress(u)))
    }

    /// `box (unbox t (promote u))`
    pub fn box_app_stable(t: Term, u: Term) -> Term {
        Term::boxed(Term::app(Term::unbox(t), Term::promote(u)))
    }

    /// `box (unbox t (unbox u))`
    pub fn box_app(t: Term, u: Term) -> Term {
        Term::boxed(Term::app(Term::unbox(t), Term::unbox(u)))
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        free_vars_into(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every heap location mentioned anywhere in the term.
    pub fn locations(&self) -> Vec<Location> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let Term::Loc(l) = t {
                out.push(*l);
            }
        });
        out
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Unit | Term::Nat(_) | Term::Var(_) | Term::Loc(_) => {}
            Term::Lam(_, b) | Term::Fix(_, b) => b.visit(f),
            Term::App(a, b) | Term::Add(a, b) | Term::Prim(_, a, b) | Term::Pair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Case(s, _, l, _, r) => {
                s.visit(f);
                l.visit(f);
                r.visit(f);
            }
            Term::Proj(_, a)
            | Term::Inj(_, a)
            | Term::Delay(a)
            | Term::Adv(a)
            | Term::Box(a)
            | Term::Unbox(a)
            | Term::Progress(a)
            | Term::Promote(a)
            | Term::Into(a)
            | Term::Out(a)
            | Term::Ann(a, _) => a.visit(f),
        }
    }

    /// Removes every type ascription.
    pub fn erase_annotations(&self) -> Term {
        self.map_children(&|t| t.erase_annotations(), true)
    }

    /// Applies `f` to the type of every ascription.
    pub fn map_types(&self, f: &dyn Fn(&Type) -> Type) -> Term {
        match self {
            Term::Ann(a, ty) => Term::Ann(Rc::new(a.map_types(f)), f(ty)),
            _ => self.map_children(&|t| t.map_types(f), false),
        }
    }

    /// Rebuilds the node with `f` applied to each child. When `drop_ann`
    /// is set, ascriptions are replaced by their (mapped) body.
    fn map_children(&self, f: &dyn Fn(&Term) -> Term, drop_ann: bool) -> Term {
        let m = |t: &Rc<Term>| Rc::new(f(t));
        match self {
            Term::Unit | Term::Nat(_) | Term::Var(_) | Term::Loc(_) => self.clone(),
            Term::Lam(x, b) => Term::Lam(x.clone(), m(b)),
            Term::Fix(x, b) => Term::Fix(x.clone(), m(b)),
            Term::App(a, b) => Term::App(m(a), m(b)),
            Term::Add(a, b) => Term::Add(m(a), m(b)),
            Term::Prim(op, a, b) => Term::Prim(*op, m(a), m(b)),
            Term::Pair(a, b) => Term::Pair(m(a), m(b)),
            Term::Case(s, x, l, y, r) => Term::Case(m(s), x.clone(), m(l), y.clone(), m(r)),
            Term::Proj(i, a) => Term::Proj(*i, m(a)),
            Term::Inj(i, a) => Term::Inj(*i, m(a)),
            Term::Delay(a) => Term::Delay(m(a)),
            Term::Adv(a) => Term::Adv(m(a)),
            Term::Box(a) => Term::Box(m(a)),
            Term::Unbox(a) => Term::Unbox(m(a)),
            Term::Progress(a) => Term::Progress(m(a)),
            Term::Promote(a) => Term::Promote(m(a)),
            Term::Into(a) => Term::Into(m(a)),
            Term::Out(a) => Term::Out(m(a)),
            Term::Ann(a, ty) => {
                if drop_ann {
                    f(a)
                } else {
                    Term::Ann(m(a), ty.clone())
                }
            }
        }
    }
}

fn free_vars_into(t: &Term, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, b) | Term::Fix(x, b) => {
            bound.push(x.clone());
            free_vars_into(b, bound, out);
            bound.pop();
        }
        Term::Case(s, x, l, y, r) => {
            free_vars_into(s, bound, out);
            bound.push(x.clone());
            free_vars_into(l, bound, out);
            bound.pop();
            bound.push(y.clone());
            free_vars_into(r, bound, out);
            bound.pop();
        }
        Term::Unit | Term::Nat(_) | Term::Loc(_) => {}
        Term::App(a, b) | Term::Add(a, b) | Term::Prim(_, a, b) | Term::Pair(a, b) => {
            free_vars_into(a, bound, out);
            free_vars_into(b, bound, out);
        }
        Term::Proj(_, a)
        | Term::Inj(_, a)
        | Term::Delay(a)
        | Term::Adv(a)
        | Term::Box(a)
        | Term::Unbox(a)
        | Term::Progress(a)
        | Term::Promote(a)
        | Term::Into(a)
        | Term::Out(a)
        | Term::Ann(a, _) => free_vars_into(a, bound, out),
    }
}

/// Values: unit, literals, lambdas, pairs and injections of values, boxes,
/// folds of values, fixpoints and locations.
pub fn is_value(t: &Term) -> bool {
    match t {
        Term::Unit
        | Term::Nat(_)
        | Term::Lam(..)
        | Term::Box(_)
        | Term::Fix(..)
        | Term::Loc(_) => true,
        Term::Pair(a, b) => is_value(a) && is_value(b),
        Term::Inj(_, a) | Term::Into(a) => is_value(a),
        _ => false,
    }
}

/// Capture-avoiding `t[v/x]`.
pub fn subst_term(t: &Term, x: &str, v: &Term) -> Term {
    let fv = v.free_vars();
    let rc = Rc::new(t.clone());
    match subst_rc(&rc, x, v, &fv) {
        Some(t) => (*t).clone(),
        None => t.clone(),
    }
}

/// Substitution on shared subterms. Returns `None` when nothing changed so
/// that untouched subtrees stay shared.
fn subst_rc(t: &Rc<Term>, x: &str, v: &Term, fv: &HashSet<Name>) -> Option<Rc<Term>> {
    let go = |s: &Rc<Term>| subst_rc(s, x, v, fv);
    let keep = |s: &Rc<Term>, new: Option<Rc<Term>>| new.unwrap_or_else(|| s.clone());
    let one = |a: &Rc<Term>, ctor: fn(Rc<Term>) -> Term| go(a).map(|a| Rc::new(ctor(a)));
    let two = |a: &Rc<Term>, b: &Rc<Term>, ctor: &dyn Fn(Rc<Term>, Rc<Term>) -> Term| {
        let (na, nb) = (go(a), go(b));
        if na.is_none() && nb.is_none() {
            None
        } else {
            Some(Rc::new(ctor(keep(a, na), keep(b, nb))))
        }
    };
    match &**t {
        Term::Var(y) => (&**y == x).then(|| Rc::new(v.clone())),
        Term::Unit | Term::Nat(_) | Term::Loc(_) => None,
        Term::Lam(y, b) => {
            let (y, b) = under_binder(y, b, x, v, fv)?;
            Some(Rc::new(Term::Lam(y, b)))
        }
        Term::Fix(y, b) => {
            let (y, b) = under_binder(y, b, x, v, fv)?;
            Some(Rc::new(Term::Fix(y, b)))
        }
        Term::Case(s, y, l, z, r) => {
            let ns = go(s);
            let nl = under_binder(y, l, x, v, fv);
            let nr = under_binder(z, r, x, v, fv);
            if ns.is_none() && nl.is_none() && nr.is_none() {
                return None;
            }
            let (y, l) = nl.unwrap_or_else(|| (y.clone(), l.clone()));
            let (z, r) = nr.unwrap_or_else(|| (z.clone(), r.clone()));
            Some(Rc::new(Term::Case(keep(s, ns), y, l, z, r)))
        }
        Term::App(a, b) => two(a, b, &Term::App),
        Term::Add(a, b) => two(a, b, &Term::Add),
        Term::Pair(a, b) => two(a, b, &Term::Pair),
        Term::Prim(op, a, b) => {
            let op = *op;
            two(a, b, &move |a, b| Term::Prim(op, a, b))
        }
        Term::Proj(i, a) => {
            let i = *i;
            go(a).map(|a| Rc::new(Term::Proj(i, a)))
        }
        Term::Inj(i, a) => {
            let i = *i;
            go(a).map(|a| Rc::new(Term::Inj(i, a)))
        }
        Term::Ann(a, ty) => go(a).map(|a| Rc::new(Term::Ann(a, ty.clone()))),
        Term::Delay(a) => one(a, Term::Delay),
        Term::Adv(a) => one(a, Term::Adv),
        Term::Box(a) => one(a, Term::Box),
        Term::Unbox(a) => one(a, Term::Unbox),
        Term::Progress(a) => one(a, Term::Progress),
        Term::Promote(a) => one(a, Term::Promote),
        Term::Into(a) => one(a, Term::Into),
        Term::Out(a) => one(a, Term::Out),
    }
}

/// Substitutes under a binder `y`, renaming it if it would capture a free
/// variable of the replacement.
fn under_binder(
    y: &Name,
    body: &Rc<Term>,
    x: &str,
    v: &Term,
    fv: &HashSet<Name>,
) -> Option<(Name, Rc<Term>)> {
    if &**y == x {
        return None;
    }
    if fv.contains(y) {
        if !body.free_vars().contains(x) {
            return None;
        }
        let renamed = fresh_name(y);
        let body = subst_term(body, y, &Term::Var(renamed.clone()));
        let body = subst_rc(&Rc::new(body.clone()), x, v, fv).unwrap_or_else(|| Rc::new(body));
        return Some((renamed, body));
    }
    subst_rc(body, x, v, fv).map(|b| (y.clone(), b))
}

/// Equality up to renaming of bound term variables (ascriptions compare
/// their types up to renaming of `mu` binders).
pub fn alpha_eq_terms(a: &Term, b: &Term) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn alpha(a: &Term, b: &Term, env: &mut Vec<(Name, Name)>) -> bool {
    fn bind(env: &mut Vec<(Name, Name)>, x: &Name, y: &Name, f: impl FnOnce(&mut Vec<(Name, Name)>) -> bool) -> bool {
        env.push((x.clone(), y.clone()));
        let r = f(env);
        env.pop();
        r
    }
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            for (l, r) in env.iter().rev() {
                if l == x || r == y {
                    return l == x && r == y;
                }
            }
            x == y
        }
        (Term::Unit, Term::Unit) => true,
        (Term::Nat(m), Term::Nat(n)) => m == n,
        (Term::Loc(l), Term::Loc(m)) => l == m,
        (Term::Lam(x, s), Term::Lam(y, t)) | (Term::Fix(x, s), Term::Fix(y, t)) => {
            bind(env, x, y, |env| alpha(s, t, env))
        }
        (Term::Case(s1, x1, l1, y1, r1), Term::Case(s2, x2, l2, y2, r2)) => {
            alpha(s1, s2, env)
                && bind(env, x1, x2, |env| alpha(l1, l2, env))
                && bind(env, y1, y2, |env| alpha(r1, r2, env))
        }
        (Term::App(a1, b1), Term::App(a2, b2))
        | (Term::Add(a1, b1), Term::Add(a2, b2))
        | (Term::Pair(a1, b1), Term::Pair(a2, b2)) => alpha(a1, a2, env) && alpha(b1, b2, env),
        (Term::Prim(o1, a1, b1), Term::Prim(o2, a2, b2)) => {
            o1 == o2 && alpha(a1, a2, env) && alpha(b1, b2, env)
        }
        (Term::Proj(i, s), Term::Proj(j, t)) | (Term::Inj(i, s), Term::Inj(j, t)) => {
            i == j && alpha(s, t, env)
        }
        (Term::Ann(s, ty1), Term::Ann(t, ty2)) => ty1 == ty2 && alpha(s, t, env),
        (Term::Delay(s), Term::Delay(t))
        | (Term::Adv(s), Term::Adv(t))
        | (Term::Box(s), Term::Box(t))
        | (Term::Unbox(s), Term::Unbox(t))
        | (Term::Progress(s), Term::Progress(t))
        | (Term::Promote(s), Term::Promote(t))
        | (Term::Into(s), Term::Into(t))
        | (Term::Out(s), Term::Out(t)) => alpha(s, t, env),
        _ => false,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty::term_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_examples() {
        let t = Term::lam("y", Term::add(Term::var("x"), Term::var("y")));
        assert_eq!(
            subst_term(&t, "x", &Term::nat(3)),
            Term::lam("y", Term::add(Term::nat(3), Term::var("y")))
        );
        let id = Term::lam("x", Term::var("x"));
        assert_eq!(subst_term(&id, "x", &Term::nat(3)), id);
        assert_eq!(
            subst_term(&Term::adv(Term::var("x")), "x", &Term::Loc(Location::Heap(0))),
            Term::adv(Term::Loc(Location::Heap(0)))
        );
    }

    #[test]
    fn substitution_renames_to_avoid_capture() {
        // (\y. x y)[y/x] must become \y'. y y'
        let t = Term::lam("y", Term::app(Term::var("x"), Term::var("y")));
        let out = subst_term(&t, "x", &Term::var("y"));
        let Term::Lam(binder, body) = &out else { panic!() };
        assert_ne!(&**binder, "y");
        assert_eq!(**body, Term::app(Term::var("y"), Term::Var(binder.clone())));
    }

    #[test]
    fn case_binders_shadow() {
        let t = Term::case(Term::var("x"), "x", Term::var("x"), "z", Term::var("x"));
        let out = subst_term(&t, "x", &Term::Unit);
        assert_eq!(out, Term::case(Term::Unit, "x", Term::var("x"), "z", Term::Unit));
    }

    #[test]
    fn values() {
        assert!(is_value(&Term::cons(Term::nat(0), Term::Loc(Location::Heap(3)))));
        assert!(is_value(&Term::fix("s", Term::var("s"))));
        assert!(!is_value(&Term::add(Term::nat(1), Term::nat(2))));
        assert!(!is_value(&Term::pair(Term::Unit, Term::adv(Term::Unit))));
    }

    #[test]
    fn alpha_equivalence_of_terms() {
        let a = Term::fix("f", Term::lam("n", Term::app(Term::var("f"), Term::var("n"))));
        let b = Term::fix("g", Term::lam("m", Term::app(Term::var("g"), Term::var("m"))));
        let c = Term::fix("g", Term::lam("m", Term::app(Term::var("m"), Term::var("g"))));
        assert!(alpha_eq_terms(&a, &b));
        assert!(!alpha_eq_terms(&a, &c));
        assert!(!alpha_eq_terms(&Term::var("x"), &Term::var("y")));
    }

    #[test]
    fn erasing_annotations() {
        let t = Term::app(Term::ann(Term::lam("x", Term::var("x")), Type::arrow(Type::Nat, Type::Nat)), Term::nat(1));
        assert_eq!(t.erase_annotations(), Term::app(Term::lam("x", Term::var("x")), Term::nat(1)));
    }
}
