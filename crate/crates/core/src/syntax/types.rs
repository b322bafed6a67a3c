//! Types of the calculus.
//!
//! `Type` covers the full grammar: base types, products, sums, functions,
//! the later modality `O A`, the box modality `Box A` and iso-recursive
//! `mu a. A`. Equality is structural up to renaming of `mu` binders.

use std::collections::HashSet;
use std::fmt;
use std::rc::Rc;

use super::{fresh_name, Name};

#[derive(Clone, Debug)]
pub enum Type {
    Var(Name),
    Unit,
    Nat,
    Prod(Rc<Type>, Rc<Type>),
    Sum(Rc<Type>, Rc<Type>),
    Arrow(Rc<Type>, Rc<Type>),
    Delay(Rc<Type>),
    Box(Rc<Type>),
    Mu(Name, Rc<Type>),
}

impl Type {
    pub fn var(name: &str) -> Type {
        Type::Var(Name::from(name))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Rc::new(a), Rc::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Rc::new(a), Rc::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Rc::new(a), Rc::new(b))
    }

    pub fn delay(a: Type) -> Type {
        Type::Delay(Rc::new(a))
    }

    pub fn boxed(a: Type) -> Type {
        Type::Box(Rc::new(a))
    }

    pub fn mu(binder: &str, body: Type) -> Type {
        Type::Mu(Name::from(binder), Rc::new(body))
    }

    /// `Unit + Unit`, with `in2 ()` as true.
    pub fn bool() -> Type {
        Type::sum(Type::Unit, Type::Unit)
    }

    /// `Unit + A`.
    pub fn maybe(a: Type) -> Type {
        Type::sum(Type::Unit, a)
    }

    /// `mu s. A * s`, so that `Str A` unfolds to `A * O (Str A)`.
    pub fn stream(a: Type) -> Type {
        let binder = binder_avoiding("s", &a);
        Type::Mu(binder.clone(), Rc::new(Type::prod(a, Type::Var(binder))))
    }

    /// `mu e. A + e`, so that `Ev A` unfolds to `A + O (Ev A)`.
    pub fn event(a: Type) -> Type {
        let binder = binder_avoiding("e", &a);
        Type::Mu(binder.clone(), Rc::new(Type::sum(a, Type::Var(binder))))
    }

    /// If this is `Str A`, returns `A`.
    pub fn as_stream(&self) -> Option<&Type> {
        match self {
            Type::Mu(binder, body) => match body.as_ref() {
                Type::Prod(head, tail) if matches!(tail.as_ref(), Type::Var(v) if v == binder) => {
                    (!head.free_vars().contains(binder)).then_some(head.as_ref())
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// If this is `Ev A`, returns `A`.
    pub fn as_event(&self) -> Option<&Type> {
        match self {
            Type::Mu(binder, body) => match body.as_ref() {
                Type::Sum(now, later) if matches!(later.as_ref(), Type::Var(v) if v == binder) => {
                    (!now.free_vars().contains(binder)).then_some(now.as_ref())
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// If this is `Str A -> Str B`, returns `(A, B)`.
    pub fn as_transducer(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Arrow(a, b) => Some((a.as_stream()?, b.as_stream()?)),
            _ => None,
        }
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::Sum(a, b) if matches!(**a, Type::Unit) && matches!(**b, Type::Unit))
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        match self {
            Type::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Type::Unit | Type::Nat => {}
            Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::Delay(a) | Type::Box(a) => a.collect_free(bound, out),
            Type::Mu(binder, body) => {
                bound.push(binder.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Capture-avoiding `self[replacement/var]`.
    pub fn subst(&self, var: &str, replacement: &Type) -> Type {
        let fv = replacement.free_vars();
        self.subst_inner(var, replacement, &fv)
    }

    fn subst_inner(&self, var: &str, replacement: &Type, fv: &HashSet<Name>) -> Type {
        match self {
            Type::Var(v) if &**v == var => replacement.clone(),
            Type::Var(_) | Type::Unit | Type::Nat => self.clone(),
            Type::Prod(a, b) => Type::prod(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Sum(a, b) => Type::sum(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Arrow(a, b) => Type::arrow(
                a.subst_inner(var, replacement, fv),
                b.subst_inner(var, replacement, fv),
            ),
            Type::Delay(a) => Type::delay(a.subst_inner(var, replacement, fv)),
            Type::Box(a) => Type::boxed(a.subst_inner(var, replacement, fv)),
            Type::Mu(binder, body) => {
                if &**binder == var {
                    self.clone()
                } else if fv.contains(binder) {
                    let renamed = fresh_name(binder);
                    let body = body.subst(binder, &Type::Var(renamed.clone()));
                    Type::Mu(renamed, Rc::new(body.subst_inner(var, replacement, fv)))
                } else {
                    Type::Mu(binder.clone(), Rc::new(body.subst_inner(var, replacement, fv)))
                }
            }
        }
    }

    /// One unfolding of `mu a. A`, giving `A[O (mu a. A) / a]`.
    pub fn unfold(&self) -> Option<Type> {
        match self {
            Type::Mu(binder, body) => Some(body.subst(binder, &Type::delay(self.clone()))),
            _ => None,
        }
    }

    fn alpha_eq(&self, other: &Type, env: &mut Vec<(Name, Name)>) -> bool {
        match (self, other) {
            (Type::Var(a), Type::Var(b)) => {
                for (l, r) in env.iter().rev() {
                    if l == a || r == b {
                        return l == a && r == b;
                    }
                }
                a == b
            }
            (Type::Unit, Type::Unit) | (Type::Nat, Type::Nat) => true,
            (Type::Prod(a1, b1), Type::Prod(a2, b2))
            | (Type::Sum(a1, b1), Type::Sum(a2, b2))
            | (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                a1.alpha_eq(a2, env) && b1.alpha_eq(b2, env)
            }
            (Type::Delay(a), Type::Delay(b)) | (Type::Box(a), Type::Box(b)) => a.alpha_eq(b, env),
            (Type::Mu(x, a), Type::Mu(y, b)) => {
                env.push((x.clone(), y.clone()));
                let eq = a.alpha_eq(b, env);
                env.pop();
                eq
            }
            _ => false,
        }
    }
}

fn binder_avoiding(preferred: &str, ty: &Type) -> Name {
    let fv = ty.free_vars();
    if fv.iter().any(|v| &**v == preferred) {
        fresh_name(preferred)
    } else {
        Name::from(preferred)
    }
}

impl PartialEq for Type {
    fn eq(&self, other: &Type) -> bool {
        self.alpha_eq(other, &mut Vec::new())
    }
}

impl Eq for Type {}

/// Every free type variable of `ty` is in `theta`.
pub fn well_formed_type(theta: &HashSet<Name>, ty: &Type) -> bool {
    ty.free_vars().iter().all(|v| theta.contains(v))
}

/// `Unit | Nat | Box A | stable * stable | stable + stable`.
pub fn is_stable(ty: &Type) -> bool {
    is_stable_with(&HashSet::new(), ty)
}

/// Stability where the named type parameters are assumed stable.
pub fn is_stable_with(stable_params: &HashSet<Name>, ty: &Type) -> bool {
    match ty {
        Type::Unit | Type::Nat | Type::Box(_) => true,
        Type::Prod(a, b) | Type::Sum(a, b) => {
            is_stable_with(stable_params, a) && is_stable_with(stable_params, b)
        }
        Type::Var(v) => stable_params.contains(v),
        Type::Arrow(..) | Type::Delay(_) | Type::Mu(..) => false,
    }
}

/// Types built from `Unit`, `Nat`, `*` and `+` only.
pub fn is_value_type(ty: &Type) -> bool {
    match ty {
        Type::Unit | Type::Nat => true,
        Type::Prod(a, b) | Type::Sum(a, b) => is_value_type(a) && is_value_type(b),
        _ => false,
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty::type_to_string(self))
    }
}
