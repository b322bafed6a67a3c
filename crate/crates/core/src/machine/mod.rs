//! Big-step evaluation over heap stores.
//!
//! `delay t` stores `t` unevaluated in the later heap and returns its
//! location; `adv` evaluates its argument against the now heap alone and
//! then runs the thunk it finds there. Nothing is memoised: advancing the
//! same location twice re-runs the thunk.

mod store;

use std::fmt;
use std::mem;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

pub use store::{Heap, Store};

use crate::syntax::{subst_term, Location, PrimOp, Side, Term};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EvalErrorKind {
    /// `delay`, `unbox` or `promote` with no heap available.
    StuckNoStore,
    /// `adv` or `progress` without a now heap.
    StuckNoTick,
    DanglingLocation,
    NotAFunction,
    NotAPair,
    NotAnInj,
    NotABox,
    NotANat,
    NotALocation,
    NotAFold,
    FreeVariable,
    FuelExhausted,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Error)]
#[error("{kind}: {msg}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub term: Term,
    /// Digest of the store at the failing rule.
    pub store: String,
    pub msg: String,
}

type Result<T> = std::result::Result<T, EvalError>;

/// How fresh locations are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Allocator {
    /// Smallest index not bound in the later heap.
    Smallest,
    /// Never reuses an index within a run. Used when old heaps are kept
    /// around instead of being collected, so that bindings cannot collide.
    Monotonic { next: usize },
}

/// Smallest non-reserved location not in the domain of the later heap.
pub fn alloc(sigma: &Store) -> Location {
    let later = sigma.later().expect("alloc on the empty store");
    smallest_free(later)
}

fn smallest_free(later: &Heap) -> Location {
    let mut n = 0;
    for l in later.keys() {
        match l {
            Location::Heap(m) if *m == n => n += 1,
            Location::Heap(m) if *m > n => break,
            _ => {}
        }
    }
    Location::Heap(n)
}

enum Next {
    Done(Term),
    Continue(Term),
}

pub type TraceHook<'a> = Box<dyn FnMut(&'static str, &Term, &Store) + 'a>;

/// Evaluation counters, reset by the caller as needed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Rule applications.
    pub steps: u64,
    /// Locations allocated by `delay` or by unfolding a fixed point.
    pub allocs: usize,
    /// Thunks fetched from the now heap by `adv`.
    pub now_reads: usize,
}

pub struct Machine<'a> {
    fuel: u64,
    pub allocator: Allocator,
    pub counters: Counters,
    trace: Option<TraceHook<'a>>,
}

impl<'a> Machine<'a> {
    pub fn new(fuel: u64) -> Machine<'a> {
        Machine { fuel, allocator: Allocator::Smallest, counters: Counters::default(), trace: None }
    }

    pub fn with_trace(mut self, hook: TraceHook<'a>) -> Machine<'a> {
        self.trace = Some(hook);
        self
    }

    pub fn set_trace(&mut self, hook: TraceHook<'a>) {
        self.trace = Some(hook);
    }

    pub fn set_fuel(&mut self, fuel: u64) {
        self.fuel = fuel;
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    fn alloc(&mut self, sigma: &Store) -> Location {
        let later = sigma.later().expect("alloc on the empty store");
        match &mut self.allocator {
            Allocator::Smallest => smallest_free(later),
            Allocator::Monotonic { next } => {
                while later.contains_key(&Location::Heap(*next)) {
                    *next += 1;
                }
                let l = Location::Heap(*next);
                *next += 1;
                l
            }
        }
    }

    fn err<T>(&self, kind: EvalErrorKind, t: &Term, sigma: &Store, msg: impl Into<String>) -> Result<T> {
        Err(EvalError { kind, term: t.clone(), store: sigma.digest(), msg: msg.into() })
    }

    /// Evaluates `t` in `sigma`, updating the store in place.
    pub fn eval(&mut self, t: &Term, sigma: &mut Store) -> Result<Term> {
        // Rules whose last premise evaluates a new term in the same store
        // continue this loop instead of recursing, so long reduction chains
        // do not grow the native stack.
        let mut current = t.clone();
        loop {
            match self.rule(&current, sigma)? {
                Next::Done(v) => return Ok(v),
                Next::Continue(t) => current = t,
            }
        }
    }

    fn rule(&mut self, t: &Term, sigma: &mut Store) -> Result<Next> {
        use EvalErrorKind::*;
        use Next::*;
        if self.fuel == 0 {
            return self.err(FuelExhausted, t, sigma, "rule-application budget exhausted");
        }
        self.fuel -= 1;
        self.counters.steps += 1;
        if let Some(hook) = self.trace.as_mut() {
            hook(rule_name(t), t, sigma);
        }
        Ok(match t {
            Term::Unit | Term::Nat(_) | Term::Lam(..) | Term::Box(_) | Term::Fix(..) | Term::Loc(_) => Done(t.clone()),
            Term::Ann(body, _) => Continue((**body).clone()),
            Term::Var(x) => return self.err(FreeVariable, t, sigma, format!("free variable `{x}` during evaluation")),
            Term::Pair(a, b) => {
                let a = self.eval(a, sigma)?;
                let b = self.eval(b, sigma)?;
                Done(Term::pair(a, b))
            }
            Term::Proj(side, p) => match self.eval(p, sigma)? {
                Term::Pair(a, b) => Done(match side {
                    Side::Left => (*a).clone(),
                    Side::Right => (*b).clone(),
                }),
                v => return self.err(NotAPair, t, sigma, format!("projection from non-pair `{v}`")),
            },
            Term::Inj(side, a) => Done(Term::Inj(*side, Rc::new(self.eval(a, sigma)?))),
            Term::Case(s, x, l, y, r) => match self.eval(s, sigma)? {
                Term::Inj(Side::Left, v) => Continue(subst_term(l, x, &v)),
                Term::Inj(Side::Right, v) => Continue(subst_term(r, y, &v)),
                v => return self.err(NotAnInj, t, sigma, format!("case on non-injection `{v}`")),
            },
            Term::App(f, a) => {
                let fv = self.eval(f, sigma)?;
                let Term::Lam(x, body) = fv else {
                    return self.err(NotAFunction, t, sigma, format!("application of non-function `{fv}`"));
                };
                let v = self.eval(a, sigma)?;
                Continue(subst_term(&body, &x, &v))
            }
            Term::Add(a, b) => {
                let (m, n) = self.eval_nats(t, a, b, sigma)?;
                Done(Term::Nat(m + n))
            }
            Term::Prim(op, a, b) => {
                let (m, n) = self.eval_nats(t, a, b, sigma)?;
                Done(match op {
                    PrimOp::Eq => bool_term(m == n),
                    PrimOp::Lt => bool_term(m < n),
                    PrimOp::Mul => Term::Nat(m * n),
                    PrimOp::Monus => Term::Nat(if m > n { m - n } else { 0u32.into() }),
                })
            }
            Term::Into(a) => Done(Term::Into(Rc::new(self.eval(a, sigma)?))),
            Term::Out(a) => match self.eval(a, sigma)? {
                Term::Into(v) => Done((*v).clone()),
                v => return self.err(NotAFold, t, sigma, format!("`out` applied to `{v}`")),
            },
            Term::Delay(body) => {
                if sigma.is_bottom() {
                    return self.err(StuckNoStore, t, sigma, "`delay` needs a heap");
                }
                let l = self.alloc(sigma);
                self.counters.allocs += 1;
                sigma.later_mut().unwrap().insert(l, (**body).clone());
                Done(Term::Loc(l))
            }
            Term::Adv(body) => {
                if !matches!(sigma, Store::Two { .. }) {
                    return self.stuck_without_tick(t, sigma, "adv");
                }
                let l = match self.eval_in_now(body, sigma)? {
                    Term::Loc(l) => l,
                    v => return self.err(NotALocation, t, sigma, format!("`adv` of non-location `{v}`")),
                };
                let Some(thunk) = sigma.now().and_then(|now| now.get(&l)).cloned() else {
                    return self.err(DanglingLocation, t, sigma, format!("location {l} is not in the now heap"));
                };
                self.counters.now_reads += 1;
                Continue(thunk)
            }
            Term::Progress(body) => {
                if !matches!(sigma, Store::Two { .. }) {
                    return self.stuck_without_tick(t, sigma, "progress");
                }
                Done(self.eval_in_now(body, sigma)?)
            }
            Term::Promote(body) => {
                if sigma.is_bottom() {
                    return self.err(StuckNoStore, t, sigma, "`promote` needs a heap");
                }
                Done(self.eval(body, &mut Store::Bottom)?)
            }
            Term::Unbox(body) => {
                if sigma.is_bottom() {
                    return self.err(StuckNoStore, t, sigma, "`unbox` needs a heap");
                }
                match self.eval(body, &mut Store::Bottom)? {
                    Term::Box(inner) => Continue((*inner).clone()),
                    Term::Fix(x, inner) => {
                        let l = self.alloc(sigma);
                        self.counters.allocs += 1;
                        let fixpoint = Term::Fix(x.clone(), inner.clone());
                        sigma.later_mut().unwrap().insert(l, Term::unbox(fixpoint));
                        Continue(subst_term(&inner, &x, &Term::Loc(l)))
                    }
                    v => return self.err(NotABox, t, sigma, format!("`unbox` of `{v}`")),
                }
            }
        })
    }

    /// Runs `t` in the one-heap store made of the now heap of a two-heap
    /// store, then puts the (possibly extended) now heap back.
    fn eval_in_now(&mut self, t: &Term, sigma: &mut Store) -> Result<Term> {
        let Store::Two { now, .. } = sigma else { unreachable!("caller checked the store shape") };
        let mut inner = Store::one(mem::take(now));
        let result = self.eval(t, &mut inner);
        let Store::One { later: now_after } = inner else { unreachable!("one-heap stores keep their shape") };
        if let Store::Two { now, .. } = sigma {
            *now = now_after;
        }
        result
    }

    fn eval_nats(
        &mut self,
        t: &Term,
        a: &Term,
        b: &Term,
        sigma: &mut Store,
    ) -> Result<(num_bigint::BigUint, num_bigint::BigUint)> {
        let m = match self.eval(a, sigma)? {
            Term::Nat(m) => m,
            v => return self.err(EvalErrorKind::NotANat, t, sigma, format!("arithmetic on `{v}`")),
        };
        let n = match self.eval(b, sigma)? {
            Term::Nat(n) => n,
            v => return self.err(EvalErrorKind::NotANat, t, sigma, format!("arithmetic on `{v}`")),
        };
        Ok((m, n))
    }

    fn stuck_without_tick<T>(&self, t: &Term, sigma: &Store, what: &str) -> Result<T> {
        let kind = if sigma.is_bottom() { EvalErrorKind::StuckNoStore } else { EvalErrorKind::StuckNoTick };
        self.err(kind, t, sigma, format!("`{what}` needs a store with a now heap"))
    }
}

fn bool_term(b: bool) -> Term {
    if b {
        Term::tt()
    } else {
        Term::ff()
    }
}

/// Name of the rule that fires on `t`, for tracing.
pub fn rule_name(t: &Term) -> &'static str {
    match t {
        Term::Unit | Term::Nat(_) | Term::Lam(..) | Term::Box(_) | Term::Fix(..) | Term::Loc(_) => "value",
        Term::Ann(..) => "ann",
        Term::Var(_) => "var",
        Term::Pair(..) => "pair",
        Term::Proj(..) => "proj",
        Term::Inj(..) => "inj",
        Term::Case(..) => "case",
        Term::App(..) => "app",
        Term::Add(..) => "add",
        Term::Prim(..) => "prim",
        Term::Into(_) => "into",
        Term::Out(_) => "out",
        Term::Delay(_) => "delay",
        Term::Adv(_) => "adv",
        Term::Progress(_) => "progress",
        Term::Promote(_) => "promote",
        Term::Unbox(_) => "unbox",
    }
}

/// Evaluates `t` in `sigma` with the given rule-application budget.
pub fn eval(t: &Term, sigma: Store, fuel: u64) -> Result<(Term, Store)> {
    let mut sigma = sigma;
    let v = Machine::new(fuel).eval(t, &mut sigma)?;
    Ok((v, sigma))
}

/// Same rules as [`eval`]; intended for running terms the type checker
/// rejects. Errors describe where the machine got stuck.
pub fn eval_unsafe(t: &Term, sigma: Store, fuel: u64) -> Result<(Term, Store)> {
    eval(t, sigma, fuel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros() -> Term {
        Term::fix("s", Term::cons(Term::nat(0), Term::var("s")))
    }

    fn heap(bindings: &[(usize, Term)]) -> Heap {
        bindings.iter().map(|(l, t)| (Location::Heap(*l), t.clone())).collect()
    }

    #[test]
    fn allocation_is_smallest_free() {
        assert_eq!(alloc(&Store::one(Heap::new())), Location::Heap(0));
        let h = heap(&[(0, Term::Unit), (2, Term::Unit)]);
        assert_eq!(alloc(&Store::two(Heap::new(), h)), Location::Heap(1));
        let mut reserved = Heap::new();
        reserved.insert(Location::Input, Term::Unit);
        assert_eq!(alloc(&Store::one(reserved)), Location::Heap(0));
    }

    #[test]
    fn unfolding_zeros_allocates_its_fixed_point() {
        let (v, s) = eval(&Term::unbox(zeros()), Store::two(Heap::new(), Heap::new()), DEFAULT_FUEL).unwrap();
        assert_eq!(v, Term::cons(Term::nat(0), Term::Loc(Location::Heap(0))));
        assert_eq!(s, Store::two(Heap::new(), heap(&[(0, Term::unbox(zeros()))])));
    }

    #[test]
    fn arithmetic_needs_no_store() {
        let (v, s) = eval(&Term::add(Term::nat(3), Term::nat(4)), Store::Bottom, 10).unwrap();
        assert_eq!(v, Term::nat(7));
        assert_eq!(s, Store::Bottom);
        let monus = Term::prim(PrimOp::Monus, Term::nat(3), Term::nat(4));
        assert_eq!(eval(&monus, Store::Bottom, 10).unwrap().0, Term::nat(0));
    }

    #[test]
    fn dangling_location() {
        let t = Term::adv(Term::Loc(Location::Heap(5)));
        let e = eval(&t, Store::two(Heap::new(), Heap::new()), 10).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::DanglingLocation);
    }

    #[test]
    fn stuck_states() {
        let kind = |t: Term, s: Store| eval(&t, s, 100).unwrap_err().kind;
        assert_eq!(kind(Term::delay(Term::Unit), Store::Bottom), EvalErrorKind::StuckNoStore);
        assert_eq!(kind(Term::adv(Term::Loc(Location::Heap(0))), Store::one(Heap::new())), EvalErrorKind::StuckNoTick);
        assert_eq!(kind(Term::unbox(Term::boxed(Term::Unit)), Store::Bottom), EvalErrorKind::StuckNoStore);
        assert_eq!(kind(Term::promote(Term::Unit), Store::Bottom), EvalErrorKind::StuckNoStore);
        assert_eq!(kind(Term::app(Term::Unit, Term::Unit), Store::Bottom), EvalErrorKind::NotAFunction);
    }

    #[test]
    fn fuel_runs_out() {
        // (\x. x x) (\x. x x)
        let w = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
        let e = eval(&Term::app(w.clone(), w), Store::Bottom, 1000).unwrap_err();
        assert_eq!(e.kind, EvalErrorKind::FuelExhausted);
    }

    #[test]
    fn adv_allocates_into_the_now_heap() {
        // adv (delay 7): the inner delay runs against the now heap only
        let t = Term::adv(Term::delay(Term::nat(7)));
        let (v, s) = eval(&t, Store::two(Heap::new(), Heap::new()), 100).unwrap();
        assert_eq!(v, Term::nat(7));
        assert_eq!(s, Store::two(heap(&[(0, Term::nat(7))]), Heap::new()));
    }

    #[test]
    fn adv_reruns_thunks() {
        let now = heap(&[(0, Term::delay(Term::Unit))]);
        let t = Term::pair(Term::adv(Term::Loc(Location::Heap(0))), Term::adv(Term::Loc(Location::Heap(0))));
        let (v, s) = eval(&t, Store::two(now.clone(), Heap::new()), 100).unwrap();
        assert_eq!(v, Term::pair(Term::Loc(Location::Heap(0)), Term::Loc(Location::Heap(1))));
        assert_eq!(s.later().unwrap().len(), 2);
        assert_eq!(s.now(), Some(&now));
    }

    #[test]
    fn case_selects_branch() {
        let t = Term::case(Term::tt(), "x", Term::nat(0), "y", Term::nat(1));
        assert_eq!(eval(&t, Store::Bottom, 100).unwrap().0, Term::nat(1));
    }
}
