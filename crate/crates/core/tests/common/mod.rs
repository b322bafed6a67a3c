//! Shared helpers for the integration tests: corpus lookup, random value
//! generation and the list-level oracles.
#![allow(dead_code)]

pub mod oracles;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ratt::corpus::{self, CorpusEntry, Expectation};
use ratt::drivers::parse_value;
use ratt::syntax::{is_value_type, Term, Type};

/// The executable term and declared type of a corpus entry.
pub fn runnable(entry: &CorpusEntry) -> (Term, Type) {
    let file = corpus::files().iter().find(|f| f.path == entry.path).expect("entry has a file");
    file.compile().runnable(&entry.name).unwrap_or_else(|| panic!("{} has no term", entry.name))
}

/// Looks a definition up by name, in the first corpus file defining it.
pub fn def(name: &str) -> (Term, Type) {
    runnable(&corpus::entry(name).unwrap_or_else(|| panic!("no corpus entry {name}")))
}

pub fn def_in(stem: &str, name: &str) -> (Term, Type) {
    corpus::file(stem).expect("corpus file").compile().runnable(name).expect("definition")
}

pub fn values(lits: &[&str]) -> Vec<Term> {
    lits.iter().map(|s| parse_value(s).unwrap()).collect()
}

pub fn is_runs(e: &CorpusEntry) -> bool {
    matches!(e.expectation, Expectation::Runs { .. })
}

/// `A` for a declared `Box (Str A)` with A a value type.
pub fn stream_elem(ty: &Type) -> Option<Type> {
    match ty {
        Type::Box(inner) => inner.as_stream().filter(|a| is_value_type(a)).cloned(),
        _ => None,
    }
}

/// `(A, B)` for a declared `Box (Str A -> Str B)` with value types.
pub fn transducer_types(ty: &Type) -> Option<(Type, Type)> {
    match ty {
        Type::Box(inner) => {
            let (a, b) = inner.as_transducer()?;
            (is_value_type(a) && is_value_type(b)).then(|| (a.clone(), b.clone()))
        }
        _ => None,
    }
}

pub struct StreamProgram {
    pub entry: CorpusEntry,
    pub term: Term,
    pub elem: Type,
}

pub struct TransducerProgram {
    pub entry: CorpusEntry,
    pub term: Term,
    pub input: Type,
    pub output: Type,
}

/// Every well-typed corpus stream of value type.
pub fn streams() -> Vec<StreamProgram> {
    corpus::list_entries()
        .into_iter()
        .filter(is_runs)
        .filter_map(|entry| {
            let (term, ty) = runnable(&entry);
            let elem = stream_elem(&ty)?;
            Some(StreamProgram { entry, term, elem })
        })
        .collect()
}

/// Every well-typed corpus transducer between value types.
pub fn transducers() -> Vec<TransducerProgram> {
    corpus::list_entries()
        .into_iter()
        .filter(is_runs)
        .filter_map(|entry| {
            let (term, ty) = runnable(&entry);
            let (input, output) = transducer_types(&ty)?;
            Some(TransducerProgram { entry, term, input, output })
        })
        .collect()
}

/// A random closed value of the value type `ty`. Naturals are small half
/// of the time so that threshold tests see both sides; `Maybe` is
/// `nothing` more often than not so that events are not always immediate.
pub fn random_value(rng: &mut ChaCha8Rng, ty: &Type) -> Term {
    match ty {
        Type::Unit => Term::Unit,
        Type::Nat => {
            let n = if rng.gen_bool(0.5) { rng.gen_range(0..20) } else { rng.gen_range(0..150) };
            Term::nat(n)
        }
        Type::Prod(a, b) => Term::pair(random_value(rng, a), random_value(rng, b)),
        Type::Sum(a, b) => {
            let p_right = if matches!(**a, Type::Unit) && !ty.is_bool() { 0.3 } else { 0.5 };
            if rng.gen_bool(p_right) {
                Term::in2(random_value(rng, b))
            } else {
                Term::in1(random_value(rng, a))
            }
        }
        other => panic!("not a value type: {other}"),
    }
}

pub fn random_inputs(rng: &mut ChaCha8Rng, ty: &Type, len: usize) -> Vec<Term> {
    (0..len).map(|_| random_value(rng, ty)).collect()
}
