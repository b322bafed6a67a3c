//! Elaboration: resolves references to earlier definitions, instantiates
//! their type parameters by unification, and inlines them.
//!
//! The output is a closed core term in which every inlined definition and
//! every construct that the checker would otherwise have to guess a type
//! for carries an ascription. Elaboration ignores locks and ticks entirely;
//! those are the checker's business.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::syntax::{fresh_name, is_stable_with, Name, Side, Term, Type};
use crate::typecheck::TypeParam;

use super::lower::instantiate;
use super::{DesugarError, DesugarErrorKind};

/// An earlier definition as seen by later ones.
#[derive(Clone, Debug)]
pub struct Global {
    pub params: Vec<TypeParam>,
    pub ty: Type,
    /// The elaborated body, or `None` if the definition itself failed.
    pub term: Option<Term>,
}

type Result<T> = std::result::Result<T, DesugarError>;

fn err<T>(kind: DesugarErrorKind, msg: impl Into<String>) -> Result<T> {
    Err(DesugarError { kind, msg: msg.into() })
}

fn is_meta(name: &str) -> bool {
    name.starts_with('?')
}

pub struct Elaborator<'a> {
    globals: &'a HashMap<Name, Global>,
    params: &'a [TypeParam],
    solutions: HashMap<Name, Type>,
    next_meta: usize,
}

/// Elaborates a lowered definition body against its declared type.
pub fn elaborate(
    term: &Term,
    params: &[TypeParam],
    ty: &Type,
    globals: &HashMap<Name, Global>,
) -> Result<Term> {
    let scope: HashSet<Name> = params.iter().map(|p| p.name.clone()).collect();
    if let Some(v) = ty.free_vars().into_iter().find(|v| !scope.contains(v)) {
        return err(DesugarErrorKind::UnknownIdentifier, format!("unknown type variable `{v}`"));
    }
    let mut el = Elaborator { globals, params, solutions: HashMap::new(), next_meta: 0 };
    let t = el.check(&mut Vec::new(), term, ty)?;
    el.finish(&t, &mut Vec::new())
}

impl Elaborator<'_> {
    fn meta(&mut self) -> Type {
        self.next_meta += 1;
        Type::Var(Name::from(format!("?{}", self.next_meta)))
    }

    /// Follows solved metavariables at the head of `ty`.
    fn resolve(&self, ty: &Type) -> Type {
        let mut t = ty.clone();
        while let Type::Var(v) = &t {
            match self.solutions.get(v) {
                Some(s) => t = s.clone(),
                None => break,
            }
        }
        t
    }

    fn zonk(&self, ty: &Type) -> Type {
        match self.resolve(ty) {
            Type::Var(v) => Type::Var(v),
            Type::Unit => Type::Unit,
            Type::Nat => Type::Nat,
            Type::Prod(a, b) => Type::prod(self.zonk(&a), self.zonk(&b)),
            Type::Sum(a, b) => Type::sum(self.zonk(&a), self.zonk(&b)),
            Type::Arrow(a, b) => Type::arrow(self.zonk(&a), self.zonk(&b)),
            Type::Delay(a) => Type::delay(self.zonk(&a)),
            Type::Box(a) => Type::boxed(self.zonk(&a)),
            Type::Mu(x, a) => Type::Mu(x, Rc::new(self.zonk(&a))),
        }
    }

    fn occurs(&self, m: &str, ty: &Type) -> bool {
        self.zonk(ty).free_vars().iter().any(|v| &**v == m)
    }

    fn unify_inner(&mut self, a: &Type, b: &Type) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => true,
            (Type::Var(m), other) | (other, Type::Var(m)) if is_meta(m) => {
                if self.occurs(m, other) {
                    return false;
                }
                self.solutions.insert(m.clone(), other.clone());
                true
            }
            (Type::Unit, Type::Unit) | (Type::Nat, Type::Nat) => true,
            (Type::Prod(a1, b1), Type::Prod(a2, b2))
            | (Type::Sum(a1, b1), Type::Sum(a2, b2))
            | (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                self.unify_inner(a1, a2) && self.unify_inner(b1, b2)
            }
            (Type::Delay(x), Type::Delay(y)) | (Type::Box(x), Type::Box(y)) => self.unify_inner(x, y),
            (Type::Mu(x, s), Type::Mu(y, t)) => {
                let z = Type::Var(fresh_name("mu"));
                let (s, t) = (s.subst(x, &z), t.subst(y, &z));
                self.unify_inner(&s, &t)
            }
            _ => false,
        }
    }

    fn expect(&mut self, found: &Type, expected: &Type, t: &Term) -> Result<()> {
        if self.unify_inner(found, expected) {
            Ok(())
        } else {
            err(
                DesugarErrorKind::Mismatch,
                format!(
                    "expected {}, found {} in `{}`",
                    self.zonk(expected),
                    self.zonk(found),
                    super::pretty::term_to_string_short(t)
                ),
            )
        }
    }

    fn lookup<'c>(ctx: &'c [(Name, Type)], x: &str) -> Option<&'c Type> {
        ctx.iter().rev().find(|(y, _)| &**y == x).map(|(_, t)| t)
    }

    /// A reference to an earlier definition: instantiate its parameters
    /// with fresh metavariables and leave a placeholder ascription.
    fn global(&mut self, g: &Name) -> Result<(Term, Type)> {
        let Some(def) = self.globals.get(g) else {
            return err(DesugarErrorKind::UnknownIdentifier, format!("unknown identifier `{g}`"));
        };
        if def.term.is_none() {
            return err(
                DesugarErrorKind::UnknownIdentifier,
                format!("`{g}` refers to a definition that failed to elaborate"),
            );
        }
        let (params, ty) = (def.params.clone(), def.ty.clone());
        let metas: Vec<Type> = params.iter().map(|_| self.meta()).collect();
        let inst = instantiate(&ty, &params, &metas);
        Ok((Term::ann(Term::Var(g.clone()), inst.clone()), inst))
    }

    fn infer(&mut self, ctx: &mut Vec<(Name, Type)>, t: &Term) -> Result<(Term, Type)> {
        use DesugarErrorKind::*;
        Ok(match t {
            Term::Var(x) => match Self::lookup(ctx, x) {
                Some(ty) => (t.clone(), ty.clone()),
                None => return self.global(x),
            },
            Term::Unit => (Term::Unit, Type::Unit),
            Term::Nat(_) => (t.clone(), Type::Nat),
            Term::Loc(l) => return err(CannotInfer, format!("location {l} in source")),
            Term::Add(a, b) => {
                let a = self.check(ctx, a, &Type::Nat)?;
                let b = self.check(ctx, b, &Type::Nat)?;
                (Term::add(a, b), Type::Nat)
            }
            Term::Prim(op, a, b) => {
                let a = self.check(ctx, a, &Type::Nat)?;
                let b = self.check(ctx, b, &Type::Nat)?;
                (Term::prim(*op, a, b), if op.returns_bool() { Type::bool() } else { Type::Nat })
            }
            Term::App(f, a) => {
                let (f2, tf) = self.infer(ctx, f)?;
                let (dom, cod) = match self.resolve(&tf) {
                    Type::Arrow(d, c) => ((*d).clone(), (*c).clone()),
                    other => {
                        let (d, c) = (self.meta(), self.meta());
                        let arrow = Type::arrow(d.clone(), c.clone());
                        if !self.unify_inner(&other, &arrow) {
                            return err(
                                Mismatch,
                                format!(
                                    "`{}` has type {} and cannot be applied",
                                    super::pretty::term_to_string_short(f),
                                    self.zonk(&other)
                                ),
                            );
                        }
                        (d, c)
                    }
                };
                let a2 = self.check(ctx, a, &dom)?;
                (Term::app(f2, a2), cod)
            }
            Term::Pair(a, b) => {
                let (a, ta) = self.infer(ctx, a)?;
                let (b, tb) = self.infer(ctx, b)?;
                (Term::pair(a, b), Type::prod(ta, tb))
            }
            Term::Proj(side, p) => {
                let (p2, tp) = self.infer(ctx, p)?;
                let (l, r) = (self.meta(), self.meta());
                self.expect(&tp, &Type::prod(l.clone(), r.clone()), p)?;
                (Term::Proj(*side, Rc::new(p2)), if *side == Side::Left { l } else { r })
            }
            Term::Case(s, x, l, y, r) => {
                let (s2, a1, a2) = self.infer_sum(ctx, s)?;
                ctx.push((x.clone(), a1));
                let left = self.infer(ctx, l);
                ctx.pop();
                let (l2, ty) = left?;
                ctx.push((y.clone(), a2));
                let right = self.check(ctx, r, &ty);
                ctx.pop();
                (Term::Case(Rc::new(s2), x.clone(), Rc::new(l2), y.clone(), Rc::new(right?)), ty)
            }
            Term::Delay(b) => {
                let (b, ty) = self.infer(ctx, b)?;
                (Term::delay(b), Type::delay(ty))
            }
            Term::Box(b) => {
                let (b, ty) = self.infer(ctx, b)?;
                (Term::boxed(b), Type::boxed(ty))
            }
            Term::Adv(b) => {
                let (b2, tb) = self.infer(ctx, b)?;
                let a = self.meta();
                self.expect(&tb, &Type::delay(a.clone()), b)?;
                (Term::adv(b2), a)
            }
            Term::Unbox(b) => {
                let (b2, tb) = self.infer(ctx, b)?;
                let a = self.meta();
                self.expect(&tb, &Type::boxed(a.clone()), b)?;
                (Term::unbox(b2), a)
            }
            Term::Progress(b) => {
                let (b, ty) = self.infer(ctx, b)?;
                (Term::progress(b), ty)
            }
            Term::Promote(b) => {
                let (b, ty) = self.infer(ctx, b)?;
                (Term::promote(b), ty)
            }
            Term::Out(b) => {
                let (b2, tb) = self.infer(ctx, b)?;
                match self.resolve(&tb) {
                    mu @ Type::Mu(..) => (Term::out(b2), mu.unfold().expect("mu")),
                    Type::Var(v) if is_meta(&v) => {
                        return err(
                            CannotInfer,
                            format!(
                                "the type of `{}` must be known to unfold it; add an annotation",
                                super::pretty::term_to_string_short(b)
                            ),
                        )
                    }
                    other => {
                        return err(
                            Mismatch,
                            format!("`out` expects a recursive type, found {}", self.zonk(&other)),
                        )
                    }
                }
            }
            Term::Ann(b, ty) => {
                self.check_type_scope(ty)?;
                let b = self.check(ctx, b, ty)?;
                (Term::ann(b, ty.clone()), ty.clone())
            }
            Term::Lam(x, b) => {
                let a = self.meta();
                ctx.push((x.clone(), a.clone()));
                let body = self.infer(ctx, b);
                ctx.pop();
                let (b, tb) = body?;
                let ty = Type::arrow(a, tb);
                (Term::ann(Term::Lam(x.clone(), Rc::new(b)), ty.clone()), ty)
            }
            Term::Inj(side, b) => {
                let (b, tb) = self.infer(ctx, b)?;
                let other = self.meta();
                let ty = match side {
                    Side::Left => Type::sum(tb, other),
                    Side::Right => Type::sum(other, tb),
                };
                (Term::ann(Term::Inj(*side, Rc::new(b)), ty.clone()), ty)
            }
            Term::Fix(x, b) => {
                let a = self.meta();
                ctx.push((x.clone(), Type::delay(a.clone())));
                let body = self.check(ctx, b, &a);
                ctx.pop();
                let ty = Type::boxed(a);
                (Term::ann(Term::Fix(x.clone(), Rc::new(body?)), ty.clone()), ty)
            }
            Term::Into(_) => {
                return err(
                    CannotInfer,
                    format!(
                        "cannot tell which recursive type `{}` folds into; add an annotation",
                        super::pretty::term_to_string_short(t)
                    ),
                )
            }
        })
    }

    fn infer_sum(&mut self, ctx: &mut Vec<(Name, Type)>, s: &Term) -> Result<(Term, Type, Type)> {
        let (s2, ts) = self.infer(ctx, s)?;
        let (a1, a2) = (self.meta(), self.meta());
        self.expect(&ts, &Type::sum(a1.clone(), a2.clone()), s)?;
        Ok((s2, a1, a2))
    }

    fn check(&mut self, ctx: &mut Vec<(Name, Type)>, t: &Term, expected: &Type) -> Result<Term> {
        use DesugarErrorKind::*;
        let exp = self.resolve(expected);
        Ok(match t {
            Term::Lam(x, b) => {
                let (a, r) = (self.meta(), self.meta());
                self.expect_shape(&exp, &Type::arrow(a.clone(), r.clone()), t)?;
                ctx.push((x.clone(), a));
                let body = self.check(ctx, b, &r);
                ctx.pop();
                Term::Lam(x.clone(), Rc::new(body?))
            }
            Term::Inj(side, b) => {
                let (l, r) = (self.meta(), self.meta());
                self.expect_shape(&exp, &Type::sum(l.clone(), r.clone()), t)?;
                let b = self.check(ctx, b, if *side == Side::Left { &l } else { &r })?;
                Term::Inj(*side, Rc::new(b))
            }
            Term::Into(b) => match &exp {
                Type::Mu(..) => Term::into(self.check(ctx, b, &exp.unfold().expect("mu"))?),
                Type::Var(v) if is_meta(v) => {
                    return err(
                        CannotInfer,
                        format!(
                            "cannot tell which recursive type `{}` folds into; add an annotation",
                            super::pretty::term_to_string_short(t)
                        ),
                    )
                }
                other => {
                    return err(
                        Mismatch,
                        format!("`into` builds a recursive type, but {} is expected", self.zonk(other)),
                    )
                }
            },
            Term::Fix(x, b) => {
                let a = self.meta();
                self.expect_shape(&exp, &Type::boxed(a.clone()), t)?;
                ctx.push((x.clone(), Type::delay(a.clone())));
                let body = self.check(ctx, b, &a);
                ctx.pop();
                Term::Fix(x.clone(), Rc::new(body?))
            }
            Term::Box(b) => {
                let a = self.meta();
                self.expect_shape(&exp, &Type::boxed(a.clone()), t)?;
                Term::boxed(self.check(ctx, b, &a)?)
            }
            Term::Delay(b) => {
                let a = self.meta();
                self.expect_shape(&exp, &Type::delay(a.clone()), t)?;
                Term::delay(self.check(ctx, b, &a)?)
            }
            Term::Pair(a, b) => {
                let (l, r) = (self.meta(), self.meta());
                self.expect_shape(&exp, &Type::prod(l.clone(), r.clone()), t)?;
                Term::pair(self.check(ctx, a, &l)?, self.check(ctx, b, &r)?)
            }
            Term::Case(s, x, l, y, r) => {
                let (s2, a1, a2) = self.infer_sum(ctx, s)?;
                ctx.push((x.clone(), a1));
                let left = self.check(ctx, l, &exp);
                ctx.pop();
                ctx.push((y.clone(), a2));
                let right = self.check(ctx, r, &exp);
                ctx.pop();
                Term::Case(Rc::new(s2), x.clone(), Rc::new(left?), y.clone(), Rc::new(right?))
            }
            Term::Adv(b) => Term::adv(self.check(ctx, b, &Type::delay(exp.clone()))?),
            Term::Unbox(b) => Term::unbox(self.check(ctx, b, &Type::boxed(exp.clone()))?),
            Term::Progress(b) => Term::progress(self.check(ctx, b, &exp)?),
            Term::Promote(b) => Term::promote(self.check(ctx, b, &exp)?),
            _ => {
                let (t2, found) = self.infer(ctx, t)?;
                self.expect(&found, &exp, t)?;
                t2
            }
        })
    }

    fn expect_shape(&mut self, expected: &Type, shape: &Type, t: &Term) -> Result<()> {
        if self.unify_inner(expected, shape) {
            Ok(())
        } else {
            err(
                DesugarErrorKind::Mismatch,
                format!(
                    "`{}` cannot have type {}",
                    super::pretty::term_to_string_short(t),
                    self.zonk(expected)
                ),
            )
        }
    }

    fn check_type_scope(&self, ty: &Type) -> Result<()> {
        for v in ty.free_vars() {
            if !is_meta(&v) && !self.params.iter().any(|p| p.name == v) {
                return err(DesugarErrorKind::UnknownIdentifier, format!("unknown type variable `{v}`"));
            }
        }
        Ok(())
    }

    /// Zonks every ascription and replaces global placeholders with the
    /// instantiated bodies of the definitions they name.
    fn finish(&self, t: &Term, bound: &mut Vec<Name>) -> Result<Term> {
        let go = |t: &Rc<Term>, bound: &mut Vec<Name>| self.finish(t, bound).map(Rc::new);
        Ok(match t {
            Term::Ann(inner, ty) => {
                let ty = self.zonk(ty);
                if let Term::Var(g) = &**inner {
                    if !bound.contains(g) {
                        return Ok(Term::ann(self.inline(g, &ty)?, ty));
                    }
                }
                if let Some(m) = ty.free_vars().into_iter().find(|v| is_meta(v)) {
                    return err(
                        DesugarErrorKind::CannotInfer,
                        format!(
                            "could not determine the type of `{}` (unsolved {m})",
                            super::pretty::term_to_string_short(inner)
                        ),
                    );
                }
                Term::Ann(go(inner, bound)?, ty)
            }
            Term::Lam(x, b) | Term::Fix(x, b) => {
                bound.push(x.clone());
                let b = go(b, bound);
                bound.pop();
                if matches!(t, Term::Lam(..)) {
                    Term::Lam(x.clone(), b?)
                } else {
                    Term::Fix(x.clone(), b?)
                }
            }
            Term::Case(s, x, l, y, r) => {
                let s = go(s, bound)?;
                bound.push(x.clone());
                let l = go(l, bound);
                bound.pop();
                bound.push(y.clone());
                let r = go(r, bound);
                bound.pop();
                Term::Case(s, x.clone(), l?, y.clone(), r?)
            }
            Term::Var(x) if !bound.contains(x) => {
                return err(DesugarErrorKind::UnknownIdentifier, format!("unknown identifier `{x}`"))
            }
            Term::Unit | Term::Nat(_) | Term::Var(_) | Term::Loc(_) => t.clone(),
            Term::App(a, b) => Term::App(go(a, bound)?, go(b, bound)?),
            Term::Add(a, b) => Term::Add(go(a, bound)?, go(b, bound)?),
            Term::Pair(a, b) => Term::Pair(go(a, bound)?, go(b, bound)?),
            Term::Prim(op, a, b) => Term::Prim(*op, go(a, bound)?, go(b, bound)?),
            Term::Proj(i, a) => Term::Proj(*i, go(a, bound)?),
            Term::Inj(i, a) => Term::Inj(*i, go(a, bound)?),
            Term::Delay(a) => Term::Delay(go(a, bound)?),
            Term::Adv(a) => Term::Adv(go(a, bound)?),
            Term::Box(a) => Term::Box(go(a, bound)?),
            Term::Unbox(a) => Term::Unbox(go(a, bound)?),
            Term::Progress(a) => Term::Progress(go(a, bound)?),
            Term::Promote(a) => Term::Promote(go(a, bound)?),
            Term::Into(a) => Term::Into(go(a, bound)?),
            Term::Out(a) => Term::Out(go(a, bound)?),
        })
    }

    /// The body of global `g`, instantiated at the (zonked) type `ty`.
    fn inline(&self, g: &Name, ty: &Type) -> Result<Term> {
        let def = &self.globals[g];
        let mut assignment = HashMap::new();
        match_type(&def.ty, ty, &def.params, &mut assignment, &mut Vec::new());
        let mut args = Vec::new();
        for p in &def.params {
            match assignment.get(&p.name) {
                Some(a) if !a.free_vars().iter().any(|v| is_meta(v)) => {
                    if p.stable {
                        let stable: HashSet<Name> =
                            self.params.iter().filter(|q| q.stable).map(|q| q.name.clone()).collect();
                        if !is_stable_with(&stable, a) {
                            return err(
                                DesugarErrorKind::StabilityConstraintViolated,
                                format!("`{g}` requires its parameter {} to be stable, but {a} is not", p.name),
                            );
                        }
                    }
                    args.push(a.clone());
                }
                _ => {
                    return err(
                        DesugarErrorKind::UninstantiableTypeParameter,
                        format!(
                            "cannot determine type parameter {} of `{g}`; use `{g}[...]` or an annotation",
                            p.name
                        ),
                    )
                }
            }
        }
        let body = def.term.as_ref().expect("checked when referenced");
        if def.params.is_empty() {
            return Ok(body.clone());
        }
        let params = def.params.clone();
        Ok(body.map_types(&|t| instantiate(t, &params, &args)))
    }
}

/// Finds the parameter assignment that turns `pattern` into `target`.
fn match_type(
    pattern: &Type,
    target: &Type,
    params: &[TypeParam],
    out: &mut HashMap<Name, Type>,
    env: &mut Vec<(Name, Name)>,
) {
    match (pattern, target) {
        (Type::Var(p), _) if !env.iter().any(|(x, _)| x == p) && params.iter().any(|q| &q.name == p) => {
            out.entry(p.clone()).or_insert_with(|| target.clone());
        }
        (Type::Prod(a1, b1), Type::Prod(a2, b2))
        | (Type::Sum(a1, b1), Type::Sum(a2, b2))
        | (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
            match_type(a1, a2, params, out, env);
            match_type(b1, b2, params, out, env);
        }
        (Type::Delay(a), Type::Delay(b)) | (Type::Box(a), Type::Box(b)) => match_type(a, b, params, out, env),
        (Type::Mu(x, a), Type::Mu(y, b)) => {
            env.push((x.clone(), y.clone()));
            match_type(a, b, params, out, env);
            env.pop();
        }
        _ => {}
    }
}
