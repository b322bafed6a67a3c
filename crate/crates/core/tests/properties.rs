//! Property tests over randomly generated terms, types and heaps.

use proptest::prelude::*;
use ratt::machine::{alloc, eval, EvalErrorKind, Heap, Store};
use ratt::surface::lower::lower_expr;
use ratt::surface::pretty::{term_to_string, type_to_string};
use ratt::surface::{parse_expr, parse_type};
use ratt::syntax::{alpha_eq_terms, is_stable, is_value_type, subst_term, Location, PrimOp, Side, Term, Type};

const NAMES: &[&str] = &["x", "y", "f", "s", "acc", "x'"];

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(NAMES)
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

/// Location-free, annotation-free core terms; not necessarily well typed.
fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Unit),
        (0u64..1000).prop_map(Term::nat),
        name().prop_map(Term::var),
    ];
    leaf.prop_recursive(5, 48, 3, |t| {
        prop_oneof![
            (name(), t.clone()).prop_map(|(x, b)| Term::lam(x, b)),
            (name(), t.clone()).prop_map(|(x, b)| Term::fix(x, b)),
            (t.clone(), t.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (prop::sample::select(&[PrimOp::Eq, PrimOp::Lt, PrimOp::Mul, PrimOp::Monus][..]), t.clone(), t.clone())
                .prop_map(|(op, a, b)| Term::prim(op, a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            (side(), t.clone()).prop_map(|(s, a)| Term::Proj(s, a.into())),
            (side(), t.clone()).prop_map(|(s, a)| Term::Inj(s, a.into())),
            (t.clone(), name(), t.clone(), name(), t.clone())
                .prop_map(|(s, x, l, y, r)| Term::case(s, x, l, y, r)),
            t.clone().prop_map(Term::delay),
            t.clone().prop_map(Term::adv),
            t.clone().prop_map(Term::boxed),
            t.clone().prop_map(Term::unbox),
            t.clone().prop_map(Term::progress),
            t.clone().prop_map(Term::promote),
            t.clone().prop_map(Term::into),
            t.clone().prop_map(Term::out),
            (t.clone(), t.clone()).prop_map(|(h, tl)| Term::cons(h, tl)),
        ]
    })
}

/// Closed, store-free programs over naturals: arithmetic, pairs, sums and
/// functions. Evaluation may still fail (e.g. adding a pair).
fn closed_program() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![Just(Term::Unit), (0u64..50).prop_map(Term::nat)];
    leaf.prop_recursive(5, 40, 3, |t| {
        prop_oneof![
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::prim(PrimOp::Mul, a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::prim(PrimOp::Lt, a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            (side(), t.clone()).prop_map(|(s, a)| Term::Proj(s, a.into())),
            (side(), t.clone()).prop_map(|(s, a)| Term::Inj(s, a.into())),
            (t.clone(), t.clone(), t.clone()).prop_map(|(s, l, r)| {
                Term::case(s, "x", Term::add(Term::var("x"), l), "y", Term::pair(Term::var("y"), r))
            }),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::app(Term::lam("x", Term::add(Term::var("x"), b)), a)),
        ]
    })
}

fn ty() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![Just(Type::Unit), Just(Type::Nat), prop::sample::select(&["a", "b"][..]).prop_map(Type::var)];
    leaf.prop_recursive(4, 24, 2, |t| {
        prop_oneof![
            (t.clone(), t.clone()).prop_map(|(a, b)| Type::prod(a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Type::sum(a, b)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
            t.clone().prop_map(Type::delay),
            t.clone().prop_map(Type::boxed),
            t.clone().prop_map(|a| Type::mu("a", a)),
            t.clone().prop_map(Type::stream),
            t.clone().prop_map(Type::event),
        ]
    })
}

fn reparse(t: &Term) -> Term {
    let text = term_to_string(t);
    let expr = parse_expr(&text).unwrap_or_else(|e| panic!("`{text}` does not parse: {e}"));
    lower_expr(&expr).unwrap_or_else(|e| panic!("`{text}` does not lower: {e}"))
}

fn rename_type_var(ty: &Type, from: &str, to: &str) -> Type {
    match ty {
        Type::Var(v) if &**v == from => Type::var(to),
        Type::Var(_) | Type::Unit | Type::Nat => ty.clone(),
        Type::Prod(a, b) => Type::prod(rename_type_var(a, from, to), rename_type_var(b, from, to)),
        Type::Sum(a, b) => Type::sum(rename_type_var(a, from, to), rename_type_var(b, from, to)),
        Type::Arrow(a, b) => Type::arrow(rename_type_var(a, from, to), rename_type_var(b, from, to)),
        Type::Delay(a) => Type::delay(rename_type_var(a, from, to)),
        Type::Box(a) => Type::boxed(rename_type_var(a, from, to)),
        Type::Mu(x, a) if &**x == from => Type::mu(to, rename_type_var(a, from, to)),
        Type::Mu(x, a) => Type::mu(x, rename_type_var(a, from, to)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn printed_terms_parse_back(t in term()) {
        let back = reparse(&t);
        prop_assert!(alpha_eq_terms(&t, &back), "{} became {}", term_to_string(&t), term_to_string(&back));
    }

    #[test]
    fn printed_types_parse_back(a in ty()) {
        let text = type_to_string(&a);
        let back = parse_type(&text).unwrap_or_else(|e| panic!("`{text}` does not parse: {e}"));
        prop_assert_eq!(back, a);
    }

    #[test]
    fn evaluation_is_deterministic(t in closed_program()) {
        let a = eval(&t, Store::Bottom, 10_000);
        let b = eval(&t, Store::Bottom, 10_000);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a.kind, b.kind),
            _ => prop_assert!(false, "one run failed and the other did not"),
        }
    }

    #[test]
    fn more_fuel_never_changes_a_result(t in closed_program(), fuel in 1u64..200, extra in 0u64..1000) {
        let small = eval(&t, Store::Bottom, fuel);
        let large = eval(&t, Store::Bottom, fuel + extra);
        match small {
            Ok(v) => prop_assert_eq!(large.ok(), Some(v)),
            Err(e) if e.kind == EvalErrorKind::FuelExhausted => {}
            Err(e) => prop_assert_eq!(large.err().map(|e| e.kind), Some(e.kind)),
        }
    }

    #[test]
    fn renaming_a_mu_binder_preserves_the_type(a in ty()) {
        let t = Type::mu("a", a.clone());
        let fresh = rename_type_var(&a, "a", "z");
        prop_assert_eq!(&t, &Type::mu("z", fresh));
        prop_assert_eq!(&t, &t.clone());
    }

    #[test]
    fn substituting_a_closed_value_removes_the_variable(t in term(), x in name(), n in 0u64..100) {
        let v = Term::nat(n);
        let once = subst_term(&t, x, &v);
        prop_assert!(!once.free_vars().contains(x));
        prop_assert_eq!(subst_term(&once, x, &v), once);
    }

    #[test]
    fn value_types_are_stable(a in ty()) {
        if is_value_type(&a) {
            prop_assert!(is_stable(&a));
        }
        prop_assert!(is_stable(&Type::boxed(a.clone())));
        prop_assert!(!is_stable(&Type::delay(a.clone())));
        prop_assert!(!is_stable(&Type::arrow(Type::Unit, a)));
    }

    #[test]
    fn allocation_picks_the_smallest_free_index(dom in prop::collection::btree_set(0usize..12, 0..10), input in any::<bool>()) {
        let mut later: Heap = dom.iter().map(|&n| (Location::Heap(n), Term::Unit)).collect();
        if input {
            later.insert(Location::Input, Term::Unit);
        }
        let expected = (0..).find(|n| !dom.contains(n)).unwrap();
        prop_assert_eq!(alloc(&Store::one(later.clone())), Location::Heap(expected));
        prop_assert_eq!(alloc(&Store::two(Heap::new(), later)), Location::Heap(expected));
    }
}

#[test]
fn allocation_examples() {
    let heap = |dom: &[usize]| -> Heap { dom.iter().map(|&n| (Location::Heap(n), Term::Unit)).collect() };
    let cases: [(&[usize], usize); 4] = [(&[], 0), (&[0, 1, 2], 3), (&[1, 2], 0), (&[0, 2, 3], 1)];
    for (dom, expected) in cases {
        assert_eq!(alloc(&Store::one(heap(dom))), Location::Heap(expected), "{dom:?}");
    }
}
