//! Syntactic desugaring of surface definitions into core terms.
//!
//! This pass does not resolve global names: a reference to an earlier
//! definition stays a free variable, and an explicit instantiation
//! `g[T1, ..]` becomes an ascription `(g : T[T1/A1, ..])`. Resolution and
//! inlining happen during elaboration.

use std::collections::{HashMap, HashSet};

use crate::syntax::{fresh_name, Name, PrimOp, Term, Type};
use crate::typecheck::TypeParam;

use super::ast::*;
use super::{DesugarError, DesugarErrorKind};

/// Declared signature of an earlier definition.
pub type Signature = (Vec<TypeParam>, Type);

#[derive(Clone, Debug)]
enum Binding {
    Plain,
    /// A pattern variable standing for a projection of a hidden binder.
    Alias(Term),
    /// The recursion variable of a fixed-point definition, together with
    /// the scope positions of the outer parameters.
    Rec(Vec<usize>),
}

struct Lowerer<'a> {
    scope: Vec<(Name, Binding)>,
    used: HashSet<String>,
    sigs: &'a HashMap<Name, Signature>,
}

type Result<T> = std::result::Result<T, DesugarError>;

fn err<T>(kind: DesugarErrorKind, msg: impl Into<String>) -> Result<T> {
    Err(DesugarError { kind, msg: msg.into() })
}

/// Simultaneous substitution of types for type parameters.
pub fn instantiate(ty: &Type, params: &[TypeParam], args: &[Type]) -> Type {
    // rename first so that arguments mentioning parameter names are safe
    let fresh: Vec<Name> = params.iter().map(|p| fresh_name(&p.name)).collect();
    let mut out = ty.clone();
    for (p, f) in params.iter().zip(&fresh) {
        out = out.subst(&p.name, &Type::Var(f.clone()));
    }
    for (f, a) in fresh.iter().zip(args) {
        out = out.subst(f, a);
    }
    out
}

/// Desugars one definition; `sigs` holds the definitions before it.
pub fn lower_def(def: &Def, sigs: &HashMap<Name, Signature>) -> Result<Term> {
    let mut used = HashSet::new();
    collect_idents(&def.body, &mut used);
    for p in def.outer.iter().chain(def.inner.iter().flatten()) {
        let mut names = Vec::new();
        p.binders(&mut names);
        used.extend(names.iter().map(|n| n.to_string()));
    }
    used.insert(def.name.to_string());
    let mut lw = Lowerer { scope: Vec::new(), used, sigs };
    match &def.inner {
        None => lw.lambdas(&def.outer, &mut |lw| lw.expr(&def.body)),
        Some(inner) => {
            let k = def.outer.len();
            if !has_fixpoint_shape(&def.ty, k) {
                return err(
                    DesugarErrorKind::ArityMismatch,
                    format!(
                        "`{}` has {k} parameter(s) before `$`, so its type must be {k} argument(s) followed by a Box type",
                        def.name
                    ),
                );
            }
            lw.lambdas(&def.outer, &mut |lw| {
                let outer_positions: Vec<usize> = def
                    .outer
                    .iter()
                    .map(|p| match p {
                        Pattern::Var(x) => lw.position(x),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
                    .unwrap_or_default();
                let outer_ok = outer_positions.len() == k;
                lw.scope.push((def.name.clone(), Binding::Rec(if outer_ok { outer_positions } else { vec![usize::MAX; k] })));
                let body = lw.lambdas(inner, &mut |lw| lw.expr(&def.body));
                lw.scope.pop();
                Ok(Term::fix(&def.name, body?))
            })
        }
    }
}

fn has_fixpoint_shape(ty: &Type, k: usize) -> bool {
    let mut t = ty;
    for _ in 0..k {
        match t {
            Type::Arrow(_, b) => t = b,
            _ => return false,
        }
    }
    matches!(t, Type::Box(_))
}

/// Desugars an expression with no enclosing definition.
pub fn lower_expr(e: &Expr) -> Result<Term> {
    let mut used = HashSet::new();
    collect_idents(e, &mut used);
    let sigs = HashMap::new();
    let mut lw = Lowerer { scope: Vec::new(), used, sigs: &sigs };
    lw.expr(e)
}

impl Lowerer<'_> {
    fn fresh(&mut self) -> Name {
        let mut i = 0usize;
        loop {
            let cand = if i == 0 { "p".to_string() } else { format!("p{i}") };
            if self.used.insert(cand.clone()) {
                return Name::from(cand);
            }
            i += 1;
        }
    }

    fn lookup(&self, x: &str) -> Option<(usize, &Binding)> {
        self.scope.iter().enumerate().rev().find(|(_, (n, _))| &**n == x).map(|(i, (_, b))| (i, b))
    }

    fn position(&self, x: &str) -> Option<usize> {
        self.lookup(x).map(|(i, _)| i)
    }

    /// Binds a pattern; returns the lambda/case binder to use.
    fn bind_pattern(&mut self, p: &Pattern) -> Name {
        match p {
            Pattern::Var(x) => {
                self.scope.push((x.clone(), Binding::Plain));
                x.clone()
            }
            Pattern::Wild => Name::from("_"),
            _ => {
                let z = self.fresh();
                self.scope.push((z.clone(), Binding::Plain));
                self.bind_aliases(p, Term::Var(z.clone()));
                z
            }
        }
    }

    fn bind_aliases(&mut self, p: &Pattern, t: Term) {
        match p {
            Pattern::Var(x) => self.scope.push((x.clone(), Binding::Alias(t))),
            Pattern::Wild => {}
            Pattern::Pair(a, b) => {
                self.bind_aliases(a, Term::fst(t.clone()));
                self.bind_aliases(b, Term::snd(t));
            }
            Pattern::Cons(a, b) => {
                self.bind_aliases(a, Term::head(t.clone()));
                self.bind_aliases(b, Term::tail(t));
            }
        }
    }

    fn lambdas(&mut self, pats: &[Pattern], body: &mut dyn FnMut(&mut Self) -> Result<Term>) -> Result<Term> {
        let mark = self.scope.len();
        let mut binders = Vec::new();
        for p in pats {
            binders.push(self.bind_pattern(p));
        }
        let result = body(self);
        self.scope.truncate(mark);
        let mut t = result?;
        for x in binders.into_iter().rev() {
            t = Term::Lam(x, std::rc::Rc::new(t));
        }
        Ok(t)
    }

    fn expr(&mut self, e: &Expr) -> Result<Term> {
        Ok(match &e.kind {
            ExprKind::Var(x) => match self.lookup(x) {
                Some((_, Binding::Alias(t))) => t.clone(),
                Some((_, Binding::Rec(outer))) if !outer.is_empty() => {
                    return err(
                        DesugarErrorKind::ArityMismatch,
                        format!("recursive reference to `{x}` must be applied to its parameters before `$`"),
                    )
                }
                _ => Term::Var(x.clone()),
            },
            ExprKind::TyApp(g, args) => {
                if self.lookup(g).is_some() {
                    return err(
                        DesugarErrorKind::ArityMismatch,
                        format!("`{g}` is a local variable and takes no type arguments"),
                    );
                }
                let Some((params, ty)) = self.sigs.get(g) else {
                    return err(DesugarErrorKind::UnknownIdentifier, format!("unknown definition `{g}`"));
                };
                if params.len() != args.len() {
                    return err(
                        DesugarErrorKind::ArityMismatch,
                        format!("`{g}` takes {} type argument(s), {} given", params.len(), args.len()),
                    );
                }
                Term::ann(Term::Var(g.clone()), instantiate(ty, params, args))
            }
            ExprKind::Unit => Term::Unit,
            ExprKind::Nat(n) => Term::Nat(n.clone()),
            ExprKind::True => Term::tt(),
            ExprKind::False => Term::ff(),
            ExprKind::Nothing => Term::in1(Term::Unit),
            ExprKind::Lam(pats, body) => self.lambdas(pats, &mut |lw| lw.expr(body))?,
            ExprKind::Fix(x, body) => {
                self.scope.push((x.clone(), Binding::Plain));
                let b = self.expr(body);
                self.scope.pop();
                Term::fix(x, b?)
            }
            ExprKind::App(..) => return self.application(e),
            ExprKind::Bin(op, a, b) => {
                let (a, b) = (self.expr(a)?, self.expr(b)?);
                match op {
                    BinOp::Add => Term::add(a, b),
                    BinOp::Monus => Term::prim(PrimOp::Monus, a, b),
                    BinOp::Mul => Term::prim(PrimOp::Mul, a, b),
                    BinOp::Eq => Term::prim(PrimOp::Eq, a, b),
                    BinOp::Lt => Term::prim(PrimOp::Lt, a, b),
                    BinOp::Cons => Term::cons(a, b),
                    BinOp::LaterApp => Term::later_app(a, b),
                    BinOp::LaterAppStable => Term::later_app_stable(a, b),
                    BinOp::BoxAppStable => Term::box_app_stable(a, b),
                    BinOp::BoxApp => Term::box_app(a, b),
                }
            }
            ExprKind::Pair(a, b) => Term::pair(self.expr(a)?, self.expr(b)?),
            ExprKind::Ann(a, ty) => Term::ann(self.expr(a)?, ty.clone()),
            ExprKind::Prefix(p, a) => {
                let a = self.expr(a)?;
                match p {
                    Prefix::Delay => Term::delay(a),
                    Prefix::Adv => Term::adv(a),
                    Prefix::Box => Term::boxed(a),
                    Prefix::Unbox => Term::unbox(a),
                    Prefix::Progress => Term::progress(a),
                    Prefix::Promote => Term::promote(a),
                    Prefix::Into => Term::into(a),
                    Prefix::Out => Term::out(a),
                    Prefix::Fst => Term::fst(a),
                    Prefix::Snd => Term::snd(a),
                    Prefix::In1 => Term::in1(a),
                    Prefix::In2 | Prefix::Just => Term::in2(a),
                    Prefix::Val => Term::into(Term::in1(a)),
                    Prefix::Wait => Term::into(Term::in2(a)),
                    Prefix::Head => Term::head(a),
                    Prefix::Tail => Term::tail(a),
                }
            }
            ExprKind::If(c, t, f) => {
                let c = self.expr(c)?;
                let t = self.expr(t)?;
                let f = self.expr(f)?;
                Term::case(c, "_", f, "_", t)
            }
            ExprKind::Case(s, alts) => {
                let (left, right) = if alts[0].ctor.is_left() { (&alts[0], &alts[1]) } else { (&alts[1], &alts[0]) };
                let mut scrutinee = self.expr(s)?;
                if left.ctor.unfolds() {
                    scrutinee = Term::out(scrutinee);
                }
                let (x, l) = self.alternative(left)?;
                let (y, r) = self.alternative(right)?;
                Term::Case(scrutinee.into(), x, l.into(), y, r.into())
            }
        })
    }

    fn alternative(&mut self, alt: &Alt) -> Result<(Name, Term)> {
        let mark = self.scope.len();
        let x = self.bind_pattern(&alt.pat);
        let body = self.expr(&alt.body);
        self.scope.truncate(mark);
        Ok((x, body?))
    }

    fn application(&mut self, e: &Expr) -> Result<Term> {
        let mut args = Vec::new();
        let mut head = e;
        while let ExprKind::App(f, a) = &head.kind {
            args.push(&**a);
            head = f;
        }
        args.reverse();
        if let ExprKind::Var(g) = &head.kind {
            if let Some((_, Binding::Rec(outer))) = self.lookup(g) {
                let outer = outer.clone();
                return self.recursive_call(g, &outer, &args);
            }
        }
        let mut t = self.expr(head)?;
        for a in args {
            t = Term::app(t, self.expr(a)?);
        }
        Ok(t)
    }

    /// `g o1 .. ok u1 .. un` inside the body of `g` becomes
    /// `r <* u1 <* .. <* un`, where `r` is the recursion variable.
    fn recursive_call(&mut self, g: &Name, outer: &[usize], args: &[&Expr]) -> Result<Term> {
        let k = outer.len();
        let passes_outer = args.len() >= k
            && args[..k].iter().zip(outer).all(|(a, pos)| match &a.kind {
                ExprKind::Var(x) => self.position(x) == Some(*pos),
                _ => false,
            });
        if !passes_outer {
            return err(
                DesugarErrorKind::ArityMismatch,
                format!("recursive call of `{g}` must pass its {k} parameter(s) before `$` unchanged"),
            );
        }
        let mut t = Term::Var(g.clone());
        for a in &args[k..] {
            t = Term::later_app_stable(t, self.expr(a)?);
        }
        Ok(t)
    }
}

fn collect_idents(e: &Expr, out: &mut HashSet<String>) {
    let pat = |p: &Pattern, out: &mut HashSet<String>| {
        let mut names = Vec::new();
        p.binders(&mut names);
        out.extend(names.iter().map(|n| n.to_string()));
    };
    match &e.kind {
        ExprKind::Var(x) | ExprKind::TyApp(x, _) => {
            out.insert(x.to_string());
        }
        ExprKind::Unit | ExprKind::Nat(_) | ExprKind::True | ExprKind::False | ExprKind::Nothing => {}
        ExprKind::Lam(ps, b) => {
            for p in ps {
                pat(p, out);
            }
            collect_idents(b, out);
        }
        ExprKind::Fix(x, b) => {
            out.insert(x.to_string());
            collect_idents(b, out);
        }
        ExprKind::App(a, b) | ExprKind::Bin(_, a, b) | ExprKind::Pair(a, b) => {
            collect_idents(a, out);
            collect_idents(b, out);
        }
        ExprKind::Ann(a, _) | ExprKind::Prefix(_, a) => collect_idents(a, out),
        ExprKind::If(a, b, c) => {
            collect_idents(a, out);
            collect_idents(b, out);
            collect_idents(c, out);
        }
        ExprKind::Case(s, alts) => {
            collect_idents(s, out);
            for alt in alts {
                pat(&alt.pat, out);
                collect_idents(&alt.body, out);
            }
        }
    }
}
