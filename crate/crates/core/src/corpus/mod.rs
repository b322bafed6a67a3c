//! The example programs shipped in `corpus/`, with their expected
//! behaviour.
//!
//! Every `corpus/NAME.ratt` has a `corpus/NAME.expect` listing each of its
//! definitions and what should happen to it. Both are compiled into the
//! library so that tests and tools need no file system access.

use serde::Deserialize;

use crate::surface::{compile, Module};

#[derive(Clone, Copy, Debug)]
pub struct CorpusFile {
    /// Relative to the repository root, e.g. `corpus/sum.ratt`.
    pub path: &'static str,
    pub source: &'static str,
    expect: &'static str,
}

impl CorpusFile {
    pub fn compile(&self) -> Module {
        compile(self.source).unwrap_or_else(|e| panic!("{}: {e}", self.path))
    }

    /// The file name without directory and extension.
    pub fn stem(&self) -> &'static str {
        self.path.trim_start_matches("corpus/").trim_end_matches(".ratt")
    }
}

macro_rules! corpus_file {
    ($name:literal) => {
        CorpusFile {
            path: concat!("corpus/", $name, ".ratt"),
            source: include_str!(concat!("../../../../corpus/", $name, ".ratt")),
            expect: include_str!(concat!("../../../../corpus/", $name, ".expect")),
        }
    };
}

static FILES: &[CorpusFile] = &[
    corpus_file!("basics"),
    corpus_file!("nats"),
    corpus_file!("sum"),
    corpus_file!("frp"),
    corpus_file!("lustre"),
    corpus_file!("leaky_nats"),
    corpus_file!("leaky"),
];

pub fn files() -> &'static [CorpusFile] {
    FILES
}

pub fn file(stem: &str) -> Option<&'static CorpusFile> {
    FILES.iter().find(|f| f.stem() == stem)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub path: &'static str,
    /// The declared type as written in the expectation file.
    pub ty: String,
    pub expectation: Expectation,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "expect", rename_all = "snake_case")]
pub enum Expectation {
    /// Type checks; not runnable on its own (polymorphic or higher order).
    Checks,
    /// Type checks and runs as a stream or transducer.
    Runs {
        /// Names a reference implementation in the test suite.
        oracle: String,
        /// Every step's trimmed heap has exactly this many bindings.
        #[serde(default)]
        heap_bound: Option<usize>,
        #[serde(default)]
        examples: Vec<Example>,
    },
    /// Fails to type check with the given error kind.
    Rejected {
        error: String,
        #[serde(default)]
        unsafe_trace: Option<UnsafeTrace>,
    },
}

/// Inputs (empty for streams) and the outputs they produce, as value
/// literals.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Example {
    #[serde(default)]
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

/// What a rejected stream does when run anyway.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct UnsafeTrace {
    /// `fresh` means locations are never reused; the default allocator
    /// otherwise.
    #[serde(default)]
    pub allocator: Option<String>,
    pub outputs: Vec<String>,
    pub heap_sizes: Vec<usize>,
    #[serde(default)]
    pub stuck: Option<Stuck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Stuck {
    pub step: usize,
    pub kind: String,
}

#[derive(Deserialize)]
struct ExpectFile {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    name: String,
    #[serde(rename = "type")]
    ty: String,
    #[serde(flatten)]
    expectation: Expectation,
}

/// Every entry of every corpus file, in file order.
pub fn list_entries() -> Vec<CorpusEntry> {
    FILES.iter().flat_map(entries_of).collect()
}

pub fn entries_of(file: &CorpusFile) -> Vec<CorpusEntry> {
    let parsed: ExpectFile = serde_json::from_str(file.expect)
        .unwrap_or_else(|e| panic!("{}: malformed expectation file: {e}", file.path));
    parsed
        .entries
        .into_iter()
        .map(|r| CorpusEntry { name: r.name, path: file.path, ty: r.ty, expectation: r.expectation })
        .collect()
}

pub fn entry(name: &str) -> Option<CorpusEntry> {
    list_entries().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_entries_are_present() {
        let names: Vec<String> = list_entries().into_iter().map(|e| e.name).collect();
        for required in ["zeros", "nats", "sum", "await", "counter", "leakyNats", "leaky"] {
            assert!(names.iter().any(|n| n == required), "missing {required}");
        }
    }

    #[test]
    fn every_definition_has_an_entry() {
        for f in files() {
            let module = f.compile();
            let entries = entries_of(f);
            let declared: Vec<&str> = module.defs.iter().map(|d| &*d.name).collect();
            let listed: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
            assert_eq!(declared, listed, "{}", f.path);
        }
    }
}
