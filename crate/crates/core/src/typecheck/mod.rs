//! Bidirectional type checking over Fitch-style contexts.
//!
//! Introduction forms (`\x.`, `in1`/`in2`, `into`, `fix`, `box`, `delay`)
//! are checked against an expected type; elimination forms infer. An
//! ascription `(t : A)` switches from inference to checking.
//!
//! Token side conditions are tested before recursing into subterms, so the
//! reported error names the outermost construct whose rule is violated.

mod context;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use context::{check_wf, Context, Entry, Judgement};

use crate::syntax::{is_stable_with, Name, Side, Term, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TypeErrorKind {
    /// A variable is used across a lock or tick that follows its binding.
    VarBehindToken,
    LambdaUnderTick,
    AdvOutsideLater,
    DelayOutsideNow,
    UnboxUnderTick,
    UnboxWithoutLock,
    ProgressNotStable,
    PromoteNotStable,
    ProgressOutsideLater,
    PromoteOutsideTemporal,
    FixWithTokens,
    /// `box` needs a token-free context.
    BoxWithTokens,
    UnboundVariable,
    Mismatch,
    CannotInfer,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Error)]
#[error("{kind}: {msg}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// The offending subterm.
    pub term: Term,
    /// Rendering of the context the subterm was checked in.
    pub context: String,
    pub msg: String,
}

type Result<T> = std::result::Result<T, TypeError>;

/// A type parameter of a top-level definition, treated as a rigid type
/// variable while checking its body.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeParam {
    pub name: Name,
    pub stable: bool,
}

/// The checker's view of type parameters: which are in scope, and which
/// are assumed stable.
#[derive(Clone, Debug, Default)]
pub struct Checker {
    params: HashSet<Name>,
    stable: HashSet<Name>,
}

impl Checker {
    pub fn new() -> Checker {
        Checker::default()
    }

    pub fn with_params(params: &[TypeParam]) -> Checker {
        Checker {
            params: params.iter().map(|p| p.name.clone()).collect(),
            stable: params.iter().filter(|p| p.stable).map(|p| p.name.clone()).collect(),
        }
    }

    fn is_stable(&self, ty: &Type) -> bool {
        is_stable_with(&self.stable, ty)
    }

    fn fail<T>(&self, kind: TypeErrorKind, t: &Term, ctx: &Context, msg: impl Into<String>) -> Result<T> {
        Err(TypeError { kind, term: t.clone(), context: ctx.to_string(), msg: msg.into() })
    }

    fn mismatch<T>(&self, t: &Term, ctx: &Context, expected: &str, found: &Type) -> Result<T> {
        self.fail(
            TypeErrorKind::Mismatch,
            t,
            ctx,
            format!("expected {expected}, found {found} in `{}`", short(t)),
        )
    }

    pub fn infer(&self, ctx: &Context, t: &Term) -> Result<Type> {
        use TypeErrorKind::*;
        match t {
            Term::Var(x) => match ctx.lookup(x) {
                None => self.fail(UnboundVariable, t, ctx, format!("unbound variable `{x}`")),
                Some((i, ty)) => {
                    if ctx.token_after(i) {
                        self.fail(
                            VarBehindToken,
                            t,
                            ctx,
                            format!("variable `{x}` is not accessible: a lock or tick separates it from its use"),
                        )
                    } else {
                        Ok(ty.clone())
                    }
                }
            },
            Term::Unit => Ok(Type::Unit),
            Term::Nat(_) => Ok(Type::Nat),
            Term::Loc(l) => self.fail(CannotInfer, t, ctx, format!("heap location {l} has no static type")),
            Term::Add(a, b) => {
                self.check(ctx, a, &Type::Nat)?;
                self.check(ctx, b, &Type::Nat)?;
                Ok(Type::Nat)
            }
            Term::Prim(op, a, b) => {
                self.check(ctx, a, &Type::Nat)?;
                self.check(ctx, b, &Type::Nat)?;
                Ok(if op.returns_bool() { Type::bool() } else { Type::Nat })
            }
            Term::App(f, a) => match self.infer(ctx, f)? {
                Type::Arrow(dom, cod) => {
                    self.check(ctx, a, &dom)?;
                    Ok((*cod).clone())
                }
                other => self.mismatch(f, ctx, "a function", &other),
            },
            Term::Pair(a, b) => Ok(Type::prod(self.infer(ctx, a)?, self.infer(ctx, b)?)),
            Term::Proj(side, p) => match self.infer(ctx, p)? {
                Type::Prod(l, r) => Ok(match side {
                    Side::Left => (*l).clone(),
                    Side::Right => (*r).clone(),
                }),
                other => self.mismatch(p, ctx, "a product", &other),
            },
            Term::Case(s, x, l, y, r) => {
                let (a1, a2) = self.infer_sum(ctx, s)?;
                let ty = self.infer(&ctx.bind(x.clone(), a1), l)?;
                self.check(&ctx.bind(y.clone(), a2), r, &ty)?;
                Ok(ty)
            }
            Term::Delay(body) => {
                self.require_now(ctx, t)?;
                Ok(Type::delay(self.infer(&ctx.tick(), body)?))
            }
            Term::Adv(body) => {
                let before = self.split_tick(ctx, t, AdvOutsideLater, "adv")?;
                match self.infer(&before, body)? {
                    Type::Delay(a) => Ok((*a).clone()),
                    other => self.mismatch(body, &before, "a delayed type O A", &other),
                }
            }
            Term::Box(body) => {
                self.require_token_free(ctx, t, BoxWithTokens, "box")?;
                Ok(Type::boxed(self.infer(&ctx.lock(), body)?))
            }
            Term::Unbox(body) => {
                let before = self.split_unbox(ctx, t)?;
                match self.infer(&before, body)? {
                    Type::Box(a) => Ok((*a).clone()),
                    other => self.mismatch(body, &before, "a boxed type Box A", &other),
                }
            }
            Term::Progress(body) => {
                let before = self.split_tick(ctx, t, ProgressOutsideLater, "progress")?;
                let ty = self.infer(&before, body)?;
                self.require_stable(ctx, t, &ty, ProgressNotStable, "progress")?;
                Ok(ty)
            }
            Term::Promote(body) => {
                let before = self.split_lock(ctx, t)?;
                let ty = self.infer(&before, body)?;
                self.require_stable(ctx, t, &ty, PromoteNotStable, "promote")?;
                Ok(ty)
            }
            Term::Out(body) => {
                let ty = self.infer(ctx, body)?;
                match ty.unfold() {
                    Some(unfolded) => Ok(unfolded),
                    None => self.mismatch(body, ctx, "a recursive type", &ty),
                }
            }
            Term::Ann(body, ty) => {
                self.check_type_wf(ctx, t, ty)?;
                self.check(ctx, body, ty)?;
                Ok(ty.clone())
            }
            Term::Lam(..) => {
                self.require_tick_free(ctx, t)?;
                self.fail(CannotInfer, t, ctx, "cannot infer the type of a lambda; add an annotation")
            }
            Term::Fix(..) => {
                self.require_token_free(ctx, t, FixWithTokens, "fix")?;
                self.fail(CannotInfer, t, ctx, "cannot infer the type of a fixed point; add an annotation")
            }
            Term::Inj(..) | Term::Into(..) => {
                self.fail(CannotInfer, t, ctx, format!("cannot infer the type of `{}`; add an annotation", short(t)))
            }
        }
    }

    pub fn check(&self, ctx: &Context, t: &Term, expected: &Type) -> Result<()> {
        use TypeErrorKind::*;
        match (t, expected) {
            (Term::Lam(x, body), _) => {
                self.require_tick_free(ctx, t)?;
                match expected {
                    Type::Arrow(a, b) => self.check(&ctx.bind(x.clone(), (**a).clone()), body, b),
                    _ => self.fail(Mismatch, t, ctx, format!("a lambda cannot have type {expected}")),
                }
            }
            (Term::Fix(x, body), _) => {
                self.require_token_free(ctx, t, FixWithTokens, "fix")?;
                match expected {
                    Type::Box(a) => {
                        let inner = ctx.lock().bind(x.clone(), Type::delay((**a).clone()));
                        self.check(&inner, body, a)
                    }
                    _ => self.fail(Mismatch, t, ctx, format!("a fixed point has a boxed type, not {expected}")),
                }
            }
            (Term::Box(body), _) => {
                self.require_token_free(ctx, t, BoxWithTokens, "box")?;
                match expected {
                    Type::Box(a) => self.check(&ctx.lock(), body, a),
                    _ => self.fail(Mismatch, t, ctx, format!("`box` cannot have type {expected}")),
                }
            }
            (Term::Delay(body), _) => {
                self.require_now(ctx, t)?;
                match expected {
                    Type::Delay(a) => self.check(&ctx.tick(), body, a),
                    _ => self.fail(Mismatch, t, ctx, format!("`delay` cannot have type {expected}")),
                }
            }
            (Term::Inj(side, body), Type::Sum(l, r)) => {
                self.check(ctx, body, if *side == Side::Left { l } else { r })
            }
            (Term::Into(body), Type::Mu(..)) => {
                let unfolded = expected.unfold().expect("mu type");
                self.check(ctx, body, &unfolded)
            }
            (Term::Pair(a, b), Type::Prod(l, r)) => {
                self.check(ctx, a, l)?;
                self.check(ctx, b, r)
            }
            (Term::Case(s, x, l, y, r), _) => {
                let (a1, a2) = self.infer_sum(ctx, s)?;
                self.check(&ctx.bind(x.clone(), a1), l, expected)?;
                self.check(&ctx.bind(y.clone(), a2), r, expected)
            }
            (Term::Adv(body), _) => {
                let before = self.split_tick(ctx, t, AdvOutsideLater, "adv")?;
                self.check(&before, body, &Type::delay(expected.clone()))
            }
            (Term::Unbox(body), _) => {
                let before = self.split_unbox(ctx, t)?;
                self.check(&before, body, &Type::boxed(expected.clone()))
            }
            (Term::Progress(body), _) => {
                let before = self.split_tick(ctx, t, ProgressOutsideLater, "progress")?;
                self.require_stable(ctx, t, expected, ProgressNotStable, "progress")?;
                self.check(&before, body, expected)
            }
            (Term::Promote(body), _) => {
                let before = self.split_lock(ctx, t)?;
                self.require_stable(ctx, t, expected, PromoteNotStable, "promote")?;
                self.check(&before, body, expected)
            }
            _ => {
                let found = self.infer(ctx, t)?;
                if &found == expected {
                    Ok(())
                } else {
                    self.fail(
                        Mismatch,
                        t,
                        ctx,
                        format!("expected {expected}, found {found} in `{}`", short(t)),
                    )
                }
            }
        }
    }

    fn infer_sum(&self, ctx: &Context, s: &Term) -> Result<(Type, Type)> {
        match self.infer(ctx, s)? {
            Type::Sum(a, b) => Ok(((*a).clone(), (*b).clone())),
            other => self.mismatch(s, ctx, "a sum type", &other),
        }
    }

    fn require_tick_free(&self, ctx: &Context, t: &Term) -> Result<()> {
        if ctx.is_tick_free() {
            Ok(())
        } else {
            self.fail(
                TypeErrorKind::LambdaUnderTick,
                t,
                ctx,
                "functions cannot be built in a later context (the context contains a tick)",
            )
        }
    }

    fn require_token_free(&self, ctx: &Context, t: &Term, kind: TypeErrorKind, what: &str) -> Result<()> {
        if ctx.is_token_free() {
            Ok(())
        } else {
            self.fail(kind, t, ctx, format!("`{what}` requires a context without lock or tick"))
        }
    }

    fn require_now(&self, ctx: &Context, t: &Term) -> Result<()> {
        if ctx.lock_pos().is_some() && ctx.is_tick_free() {
            Ok(())
        } else {
            self.fail(
                TypeErrorKind::DelayOutsideNow,
                t,
                ctx,
                "`delay` requires a context with a lock and no tick",
            )
        }
    }

    fn require_stable(&self, ctx: &Context, t: &Term, ty: &Type, kind: TypeErrorKind, what: &str) -> Result<()> {
        if self.is_stable(ty) {
            Ok(())
        } else {
            self.fail(kind, t, ctx, format!("`{what}` needs a stable type, but {ty} is not stable"))
        }
    }

    /// The context left of the tick.
    fn split_tick(&self, ctx: &Context, t: &Term, kind: TypeErrorKind, what: &str) -> Result<Context> {
        match ctx.tick_pos() {
            Some(i) => Ok(ctx.prefix(i)),
            None => self.fail(kind, t, ctx, format!("`{what}` requires a tick in the context")),
        }
    }

    /// The context left of the lock.
    fn split_lock(&self, ctx: &Context, t: &Term) -> Result<Context> {
        match ctx.lock_pos() {
            Some(i) => Ok(ctx.prefix(i)),
            None => self.fail(
                TypeErrorKind::PromoteOutsideTemporal,
                t,
                ctx,
                "`promote` requires a lock in the context",
            ),
        }
    }

    fn split_unbox(&self, ctx: &Context, t: &Term) -> Result<Context> {
        let Some(i) = ctx.lock_pos() else {
            return self.fail(
                TypeErrorKind::UnboxWithoutLock,
                t,
                ctx,
                "`unbox` requires a lock in the context",
            );
        };
        if ctx.token_after(i) {
            return self.fail(
                TypeErrorKind::UnboxUnderTick,
                t,
                ctx,
                "`unbox` cannot be used after a tick; unfolding a boxed value in a delayed computation leaks time",
            );
        }
        Ok(ctx.prefix(i))
    }

    fn check_type_wf(&self, ctx: &Context, t: &Term, ty: &Type) -> Result<()> {
        let stray: Vec<_> = ty.free_vars().into_iter().filter(|v| !self.params.contains(v)).collect();
        if stray.is_empty() {
            Ok(())
        } else {
            self.fail(
                TypeErrorKind::Mismatch,
                t,
                ctx,
                format!("type {ty} mentions unbound type variable `{}`", stray[0]),
            )
        }
    }
}

/// Abbreviated rendering of a term for messages.
fn short(t: &Term) -> String {
    let s = t.to_string();
    if s.chars().count() > 60 {
        let cut: String = s.chars().take(57).collect();
        format!("{cut}...")
    } else {
        s
    }
}

pub fn infer(ctx: &Context, t: &Term) -> Result<Type> {
    Checker::new().infer(ctx, t)
}

pub fn check(ctx: &Context, t: &Term, ty: &Type) -> Result<()> {
    Checker::new().check(ctx, t, ty)
}

/// A closed, elaborated top-level definition.
#[derive(Clone, Debug)]
pub struct CoreDef {
    pub name: String,
    pub params: Vec<TypeParam>,
    pub ty: Type,
    pub term: Term,
}

#[derive(Clone, Debug)]
pub struct DefReport {
    pub name: String,
    pub result: std::result::Result<(), TypeError>,
}

/// Per-definition outcome of checking a whole program.
#[derive(Clone, Debug, Default)]
pub struct ProgramReport {
    pub defs: Vec<DefReport>,
}

impl ProgramReport {
    pub fn is_ok(&self) -> bool {
        self.defs.iter().all(|d| d.result.is_ok())
    }

    pub fn errors(&self) -> impl Iterator<Item = (&str, &TypeError)> {
        self.defs
            .iter()
            .filter_map(|d| d.result.as_ref().err().map(|e| (d.name.as_str(), e)))
    }
}

/// Checks every definition in the empty context against its declared type.
pub fn check_program(defs: &[CoreDef]) -> ProgramReport {
    let defs = defs
        .iter()
        .map(|d| {
            let checker = Checker::with_params(&d.params);
            let ctx = Context::new();
            let result = checker
                .check_type_wf(&ctx, &d.term, &d.ty)
                .and_then(|_| checker.check(&ctx, &d.term, &d.ty));
            DefReport { name: d.name.clone(), result }
        })
        .collect();
    ProgramReport { defs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::PrimOp;
    use TypeErrorKind::*;

    fn str_nat() -> Type {
        Type::stream(Type::Nat)
    }

    fn kind(r: Result<impl Sized>) -> TypeErrorKind {
        match r {
            Err(e) => e.kind,
            Ok(_) => panic!("expected a type error"),
        }
    }

    fn zeros() -> Term {
        Term::fix("s", Term::cons(Term::nat(0), Term::var("s")))
    }

    fn later_ctx() -> Context {
        Context::new().lock().tick()
    }

    #[test]
    fn zeros_is_a_boxed_stream() {
        let t = Term::ann(zeros(), Type::boxed(str_nat()));
        assert_eq!(infer(&Context::new(), &t).unwrap(), Type::boxed(str_nat()));
        check(&Context::new(), &zeros(), &Type::boxed(str_nat())).unwrap();
    }

    #[test]
    fn unbox_under_tick_is_rejected() {
        assert_eq!(kind(infer(&later_ctx(), &Term::unbox(Term::var("t")))), UnboxUnderTick);
        assert_eq!(kind(infer(&Context::new(), &Term::unbox(Term::var("t")))), UnboxWithoutLock);
    }

    #[test]
    fn lambda_under_tick_is_rejected() {
        let id = Term::lam("x", Term::var("x"));
        assert_eq!(kind(infer(&later_ctx(), &id)), LambdaUnderTick);
        let ty = Type::arrow(Type::Nat, Type::Nat);
        assert_eq!(kind(check(&later_ctx(), &id, &ty)), LambdaUnderTick);
        check(&Context::new().lock(), &id, &ty).unwrap();
    }

    #[test]
    fn variables_do_not_cross_tokens() {
        let ctx = Context::new().bind(Name::from("x"), Type::Nat).lock();
        assert_eq!(kind(infer(&ctx, &Term::var("x"))), VarBehindToken);
        // ...but a stable one can be promoted across the lock
        assert_eq!(infer(&ctx, &Term::promote(Term::var("x"))).unwrap(), Type::Nat);
        let later = Context::new().lock().bind(Name::from("n"), Type::Nat).tick();
        assert_eq!(kind(infer(&later, &Term::var("n"))), VarBehindToken);
        assert_eq!(infer(&later, &Term::progress(Term::var("n"))).unwrap(), Type::Nat);
    }

    #[test]
    fn token_side_conditions() {
        let f = Name::from("f");
        let now = Context::new().lock().bind(f.clone(), Type::arrow(Type::Nat, Type::Nat));
        assert_eq!(kind(infer(&Context::new(), &Term::delay(Term::Unit))), DelayOutsideNow);
        assert_eq!(kind(infer(&later_ctx(), &Term::delay(Term::Unit))), DelayOutsideNow);
        assert_eq!(kind(infer(&now, &Term::adv(Term::var("f")))), AdvOutsideLater);
        assert_eq!(kind(infer(&now, &Term::progress(Term::nat(1)))), ProgressOutsideLater);
        assert_eq!(kind(infer(&Context::new(), &Term::promote(Term::nat(1)))), PromoteOutsideTemporal);
        let later = now.tick();
        assert_eq!(kind(infer(&later, &Term::progress(Term::var("f")))), ProgressNotStable);
        let g = Context::new().bind(f.clone(), Type::arrow(Type::Nat, Type::Nat)).lock();
        assert_eq!(kind(infer(&g, &Term::promote(Term::var("f")))), PromoteNotStable);
        assert_eq!(kind(check(&Context::new().lock(), &zeros(), &Type::boxed(str_nat()))), FixWithTokens);
        assert_eq!(kind(check(&Context::new().lock(), &Term::boxed(Term::Unit), &Type::boxed(Type::Unit))), BoxWithTokens);
    }

    #[test]
    fn promote_is_allowed_in_later_contexts() {
        let ctx = Context::new().bind(Name::from("n"), Type::Nat).lock().tick();
        assert_eq!(infer(&ctx, &Term::promote(Term::var("n"))).unwrap(), Type::Nat);
    }

    #[test]
    fn delay_and_adv_round_trip() {
        let ctx = Context::new().lock().bind(Name::from("d"), Type::delay(Type::Nat));
        let t = Term::delay(Term::add(Term::adv(Term::var("d")), Term::nat(1)));
        assert_eq!(infer(&ctx, &t).unwrap(), Type::delay(Type::Nat));
    }

    #[test]
    fn case_may_scrutinise_later_variables() {
        let ctx = Context::new().lock().tick().bind(Name::from("b"), Type::bool());
        let t = Term::case(Term::var("b"), "x", Term::nat(0), "y", Term::nat(1));
        assert_eq!(infer(&ctx, &t).unwrap(), Type::Nat);
    }

    #[test]
    fn primitives() {
        let t = Term::prim(PrimOp::Eq, Term::nat(1), Term::nat(2));
        assert_eq!(infer(&Context::new(), &t).unwrap(), Type::bool());
        let t = Term::prim(PrimOp::Monus, Term::nat(1), Term::Unit);
        assert_eq!(kind(infer(&Context::new(), &t)), Mismatch);
    }

    #[test]
    fn introductions_need_annotations_in_inference_mode() {
        assert_eq!(kind(infer(&Context::new(), &Term::in1(Term::Unit))), CannotInfer);
        assert_eq!(kind(infer(&Context::new(), &Term::into(Term::Unit))), CannotInfer);
        assert_eq!(kind(infer(&Context::new(), &Term::var("nope"))), UnboundVariable);
    }

    #[test]
    fn empty_program_gives_empty_report() {
        let r = check_program(&[]);
        assert!(r.is_ok());
        assert!(r.defs.is_empty());
    }
}
