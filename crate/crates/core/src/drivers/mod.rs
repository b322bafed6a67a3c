//! Step-by-step execution of streams and stream transducers.
//!
//! A stream state is a term and the heap it may refer to. Each step runs
//! the machine in a store with that heap as the now heap and an empty later
//! heap, expects a cell `v :: l`, and continues with `adv l` over the later
//! heap. The now heap is dropped at that point; [`Gc::Off`] keeps it
//! instead, which changes nothing observable on well-typed programs.
//!
//! Transducers additionally see their input at the reserved location `#in`.

pub mod values;

use serde::Serialize;
use thiserror::Error;

use crate::machine::{Allocator, EvalError, Heap, Machine, Store, DEFAULT_FUEL};
use crate::syntax::{Location, Term, Type};

pub use values::{has_value_type, parse_value, value_to_string};

#[derive(Clone, Debug, PartialEq)]
pub struct StreamState {
    pub term: Term,
    pub heap: Heap,
    pub step: usize,
}

/// Same shape as [`StreamState`]; the heap never binds `#in`.
pub type TransducerState = StreamState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    /// Counts from 1.
    pub step: usize,
    /// Bindings in both heaps when the step's evaluation finished.
    pub heap_before: usize,
    /// Bindings carried into the next step.
    pub heap_after: usize,
    pub allocs: usize,
    pub fuel_used: u64,
}

#[derive(Clone, Debug, Error)]
pub enum DriverError {
    #[error("step {step}: {source}")]
    Eval { step: usize, source: EvalError },
    #[error("step {step}: expected a stream cell `v :: l`, got `{term}`")]
    NotAStreamValue { step: usize, term: String },
    #[error("step {step}: {msg}")]
    InputTypeMismatch { step: usize, msg: String },
    #[error("step {step}: {msg}")]
    OutputTypeMismatch { step: usize, msg: String },
}

impl DriverError {
    pub fn step(&self) -> usize {
        match self {
            DriverError::Eval { step, .. }
            | DriverError::NotAStreamValue { step, .. }
            | DriverError::InputTypeMismatch { step, .. }
            | DriverError::OutputTypeMismatch { step, .. } => *step,
        }
    }

    /// The error kind as a single name, e.g. `DanglingLocation`.
    pub fn kind(&self) -> String {
        match self {
            DriverError::Eval { source, .. } => source.kind.to_string(),
            DriverError::NotAStreamValue { .. } => "NotAStreamValue".into(),
            DriverError::InputTypeMismatch { .. } => "InputTypeMismatch".into(),
            DriverError::OutputTypeMismatch { .. } => "OutputTypeMismatch".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gc {
    /// Drop the now heap after every step.
    On,
    /// Carry every binding forward.
    Off,
}

pub fn stream_init(t: &Term) -> StreamState {
    StreamState { term: Term::unbox(t.clone()), heap: Heap::new(), step: 0 }
}

pub fn transducer_init(t: &Term) -> TransducerState {
    StreamState { term: Term::app(Term::unbox(t.clone()), Term::adv(Term::Loc(Location::Input))), heap: Heap::new(), step: 0 }
}

/// Runs steps of one stream or transducer. Holds the machine so that the
/// allocator state survives between steps when nothing is collected.
pub struct Driver<'a> {
    machine: Machine<'a>,
    fuel: u64,
    gc: Gc,
    input: Option<Type>,
    output: Option<Type>,
}

impl<'a> Driver<'a> {
    pub fn new(fuel: u64, gc: Gc) -> Driver<'a> {
        let mut machine = Machine::new(fuel);
        if gc == Gc::Off {
            machine.allocator = Allocator::Monotonic { next: 0 };
        }
        Driver { machine, fuel, gc, input: None, output: None }
    }

    /// Each emitted value is checked against `ty`.
    pub fn output_type(mut self, ty: Type) -> Self {
        self.output = Some(ty);
        self
    }

    /// Each input is checked against `ty` before it is fed in.
    pub fn input_type(mut self, ty: Type) -> Self {
        self.input = Some(ty);
        self
    }

    pub fn machine(&mut self) -> &mut Machine<'a> {
        &mut self.machine
    }

    pub fn stream_step(&mut self, s: &StreamState) -> Result<(Term, StreamState, StepStats), DriverError> {
        let store = Store::two(s.heap.clone(), Heap::new());
        self.step(s, store)
    }

    pub fn transducer_step(
        &mut self,
        s: &TransducerState,
        input: &Term,
    ) -> Result<(Term, TransducerState, StepStats), DriverError> {
        let step = s.step + 1;
        if let Some(ty) = &self.input {
            if !has_value_type(input, ty) {
                return Err(DriverError::InputTypeMismatch {
                    step,
                    msg: format!("input `{input}` does not have type {ty}"),
                });
            }
        }
        let mut now = s.heap.clone();
        now.insert(Location::Input, Term::cons(input.clone(), Term::Loc(Location::Input)));
        let mut later = Heap::new();
        later.insert(Location::Input, Term::Unit);
        self.step(s, Store::two(now, later))
    }

    fn step(&mut self, s: &StreamState, mut store: Store) -> Result<(Term, StreamState, StepStats), DriverError> {
        let step = s.step + 1;
        self.machine.set_fuel(self.fuel);
        let allocs_before = self.machine.counters.allocs;
        let v = self.machine.eval(&s.term, &mut store).map_err(|source| DriverError::Eval { step, source })?;
        let (head, tail) = match &v {
            Term::Into(p) => match &**p {
                Term::Pair(h, t) => match &**t {
                    Term::Loc(l) => ((**h).clone(), *l),
                    _ => return Err(DriverError::NotAStreamValue { step, term: v.to_string() }),
                },
                _ => return Err(DriverError::NotAStreamValue { step, term: v.to_string() }),
            },
            _ => return Err(DriverError::NotAStreamValue { step, term: v.to_string() }),
        };
        if let Some(ty) = &self.output {
            if !has_value_type(&head, ty) {
                return Err(DriverError::OutputTypeMismatch {
                    step,
                    msg: format!("emitted `{head}`, which does not have type {ty}"),
                });
            }
        }
        let heap_before = store.size();
        let Store::Two { now, mut later } = store else {
            unreachable!("evaluation preserves the shape of the store")
        };
        later.remove(&Location::Input);
        let heap = match self.gc {
            Gc::On => later,
            Gc::Off => {
                let mut all = now;
                all.remove(&Location::Input);
                all.extend(later);
                all
            }
        };
        let stats = StepStats {
            step,
            heap_before,
            heap_after: heap.len(),
            allocs: self.machine.counters.allocs - allocs_before,
            fuel_used: self.fuel - self.machine.fuel(),
        };
        Ok((head, StreamState { term: Term::adv(Term::Loc(tail)), heap, step }, stats))
    }
}

/// The outcome of a bounded run: every output produced before the run
/// ended, and the error that ended it early, if any.
#[derive(Clone, Debug, Default)]
pub struct Run {
    pub outputs: Vec<Term>,
    pub stats: Vec<StepStats>,
    pub error: Option<DriverError>,
}

impl Run {
    pub fn heap_sizes(&self) -> Vec<usize> {
        self.stats.iter().map(|s| s.heap_after).collect()
    }
}

fn run_stream_with(t: &Term, n: usize, gc: Gc, elem: Option<&Type>) -> Run {
    let mut driver = Driver::new(DEFAULT_FUEL, gc);
    if let Some(ty) = elem {
        driver = driver.output_type(ty.clone());
    }
    let mut state = stream_init(t);
    let mut run = Run::default();
    for _ in 0..n {
        match driver.stream_step(&state) {
            Ok((v, next, stats)) => {
                run.outputs.push(v);
                run.stats.push(stats);
                state = next;
            }
            Err(e) => {
                run.error = Some(e);
                break;
            }
        }
    }
    run
}

fn run_transducer_with(t: &Term, inputs: &[Term], gc: Gc, types: Option<(&Type, &Type)>) -> Run {
    let mut driver = Driver::new(DEFAULT_FUEL, gc);
    if let Some((a, b)) = types {
        driver = driver.input_type(a.clone()).output_type(b.clone());
    }
    let mut state = transducer_init(t);
    let mut run = Run::default();
    for input in inputs {
        match driver.transducer_step(&state, input) {
            Ok((v, next, stats)) => {
                run.outputs.push(v);
                run.stats.push(stats);
                state = next;
            }
            Err(e) => {
                run.error = Some(e);
                break;
            }
        }
    }
    run
}

/// `n` steps of the stream `t : Box (Str A)`.
pub fn run_stream(t: &Term, n: usize) -> Run {
    run_stream_with(t, n, Gc::On, None)
}

/// Like [`run_stream`], also checking every output against `elem`.
pub fn run_stream_typed(t: &Term, n: usize, elem: &Type, gc: Gc) -> Run {
    run_stream_with(t, n, gc, Some(elem))
}

pub fn run_stream_nogc(t: &Term, n: usize) -> Run {
    run_stream_with(t, n, Gc::Off, None)
}

/// Feeds `inputs` to the transducer `t : Box (Str A -> Str B)`.
pub fn run_transducer(t: &Term, inputs: &[Term]) -> Run {
    run_transducer_with(t, inputs, Gc::On, None)
}

/// Like [`run_transducer`], checking inputs against `a` and outputs against `b`.
pub fn run_transducer_typed(t: &Term, inputs: &[Term], a: &Type, b: &Type, gc: Gc) -> Run {
    run_transducer_with(t, inputs, gc, Some((a, b)))
}

pub fn run_transducer_nogc(t: &Term, inputs: &[Term]) -> Run {
    run_transducer_with(t, inputs, Gc::Off, None)
}
