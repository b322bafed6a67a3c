//! A modal calculus for functional reactive programming with a
//! Fitch-style type system and a heap-based evaluator that runs streams
//! without space leaks.
//!
//! The pipeline is [`surface::compile`] (parse, lower, elaborate, check),
//! then [`drivers`] to run a stream or transducer step by step.

pub mod corpus;
pub mod drivers;
pub mod machine;
pub mod surface;
pub mod syntax;
pub mod typecheck;

pub use surface::{compile, Module};
pub use syntax::{Term, Type};
