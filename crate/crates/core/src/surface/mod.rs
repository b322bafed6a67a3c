//! The concrete language: lexing, parsing, lowering to core terms,
//! elaboration of polymorphic references, and printing.
//!
//! [`compile`] runs the whole front end and type checks every definition.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod pretty;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Name, Term, Type};
use crate::typecheck::{Checker, Context, TypeError, TypeParam};

pub use parser::{parse, parse_expr, parse_type};

/// A source range; lines and columns count from 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("{span}: {msg}")]
pub struct SyntaxError {
    pub span: Span,
    /// What the parser would have accepted at `span`.
    pub expected: Vec<String>,
    pub msg: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DesugarErrorKind {
    UnknownIdentifier,
    ArityMismatch,
    UninstantiableTypeParameter,
    StabilityConstraintViolated,
    DuplicateDefinition,
    Mismatch,
    CannotInfer,
}

impl fmt::Display for DesugarErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("{kind}: {msg}")]
pub struct DesugarError {
    pub kind: DesugarErrorKind,
    pub msg: String,
}

/// One definition after the front end has run.
#[derive(Clone, Debug)]
pub struct CompiledDef {
    pub name: Name,
    pub span: Span,
    pub params: Vec<TypeParam>,
    pub ty: Type,
    /// The definition translated to core syntax; references to other
    /// definitions are still free variables.
    pub lowered: Option<Term>,
    /// The closed, elaborated term with all references inlined.
    pub term: Option<Term>,
    pub desugar_error: Option<DesugarError>,
    pub type_error: Option<TypeError>,
}

impl CompiledDef {
    pub fn is_ok(&self) -> bool {
        self.term.is_some() && self.desugar_error.is_none() && self.type_error.is_none()
    }

    pub fn diagnostic(&self) -> Option<Diagnostic> {
        let (kind, msg) = if let Some(e) = &self.desugar_error {
            (e.kind.to_string(), e.msg.clone())
        } else if let Some(e) = &self.type_error {
            (e.kind.to_string(), e.msg.clone())
        } else {
            return None;
        };
        Some(Diagnostic { def: self.name.to_string(), kind, span: self.span, msg })
    }
}

/// The error report format shared by the library and the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub def: String,
    pub kind: String,
    pub span: Span,
    pub msg: String,
}

#[derive(Clone, Debug, Default)]
pub struct Module {
    pub defs: Vec<CompiledDef>,
}

impl Module {
    pub fn get(&self, name: &str) -> Option<&CompiledDef> {
        self.defs.iter().find(|d| &*d.name == name)
    }

    pub fn is_ok(&self) -> bool {
        self.defs.iter().all(CompiledDef::is_ok)
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.defs.iter().filter_map(CompiledDef::diagnostic).collect()
    }

    /// The executable form of a definition, whether or not it type checks.
    /// Annotations are erased.
    pub fn runnable(&self, name: &str) -> Option<(Term, Type)> {
        let d = self.get(name)?;
        Some((d.term.as_ref()?.erase_annotations(), d.ty.clone()))
    }
}

/// Parses, lowers, elaborates and type checks a program.
///
/// Only syntax errors abort; everything else is recorded per definition.
/// A definition that elaborates but fails to type check can still be
/// referenced by later definitions, which will then usually fail too.
pub fn compile(src: &str) -> Result<Module, SyntaxError> {
    let program = parse(src)?;
    let mut sigs: HashMap<Name, lower::Signature> = HashMap::new();
    let mut globals: HashMap<Name, elab::Global> = HashMap::new();
    let mut module = Module::default();
    for def in &program.defs {
        let mut out = CompiledDef {
            name: def.name.clone(),
            span: def.span,
            params: def.params.clone(),
            ty: def.ty.clone(),
            lowered: None,
            term: None,
            desugar_error: None,
            type_error: None,
        };
        if sigs.contains_key(&def.name) {
            out.desugar_error = Some(DesugarError {
                kind: DesugarErrorKind::DuplicateDefinition,
                msg: format!("`{}` is already defined", def.name),
            });
            module.defs.push(out);
            continue;
        }
        let result = lower::lower_def(def, &sigs).and_then(|lowered| {
            out.lowered = Some(lowered.clone());
            elab::elaborate(&lowered, &def.params, &def.ty, &globals)
        });
        match result {
            Ok(term) => {
                let checker = Checker::with_params(&def.params);
                out.type_error = checker.check(&Context::new(), &term, &def.ty).err();
                out.term = Some(term);
            }
            Err(e) => out.desugar_error = Some(e),
        }
        sigs.insert(def.name.clone(), (def.params.clone(), def.ty.clone()));
        globals.insert(
            def.name.clone(),
            elab::Global { params: def.params.clone(), ty: def.ty.clone(), term: out.term.clone() },
        );
        module.defs.push(out);
    }
    Ok(module)
}
