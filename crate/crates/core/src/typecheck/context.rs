//! Fitch-style contexts: variable bindings interleaved with at most one
//! lock and at most one tick.

use std::fmt;

use crate::syntax::{Name, Type};

#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    Bind(Name, Type),
    Lock,
    Tick,
}

/// What kind of judgement a context supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Judgement {
    /// No tokens.
    Initial,
    /// A lock but no tick.
    Now,
    /// A lock followed by a tick.
    Later,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    entries: Vec<Entry>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Context {
        Context { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn bind(&self, x: Name, ty: Type) -> Context {
        self.extend(Entry::Bind(x, ty))
    }

    pub fn lock(&self) -> Context {
        self.extend(Entry::Lock)
    }

    pub fn tick(&self) -> Context {
        self.extend(Entry::Tick)
    }

    fn extend(&self, e: Entry) -> Context {
        let mut entries = self.entries.clone();
        entries.push(e);
        Context { entries }
    }

    pub fn lock_pos(&self) -> Option<usize> {
        self.entries.iter().position(|e| matches!(e, Entry::Lock))
    }

    pub fn tick_pos(&self) -> Option<usize> {
        self.entries.iter().position(|e| matches!(e, Entry::Tick))
    }

    pub fn is_token_free(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, Entry::Bind(..)))
    }

    pub fn is_tick_free(&self) -> bool {
        self.tick_pos().is_none()
    }

    /// The entries strictly before position `n`.
    pub fn prefix(&self, n: usize) -> Context {
        Context { entries: self.entries[..n].to_vec() }
    }

    /// Innermost binding of `x`, with its position.
    pub fn lookup(&self, x: &str) -> Option<(usize, &Type)> {
        self.entries.iter().enumerate().rev().find_map(|(i, e)| match e {
            Entry::Bind(y, ty) if &**y == x => Some((i, ty)),
            _ => None,
        })
    }

    /// True if a token occurs strictly after position `i`.
    pub fn token_after(&self, i: usize) -> bool {
        self.entries[i + 1..].iter().any(|e| !matches!(e, Entry::Bind(..)))
    }

    pub fn judgement(&self) -> Judgement {
        match (self.lock_pos(), self.tick_pos()) {
            (None, _) => Judgement::Initial,
            (Some(_), None) => Judgement::Now,
            (Some(_), Some(_)) => Judgement::Later,
        }
    }
}

/// Well-formedness: a lock only after a token-free prefix, a tick only
/// after a lock and never twice, and every bound type closed.
pub fn check_wf(ctx: &Context) -> bool {
    let mut seen_lock = false;
    let mut seen_tick = false;
    for e in ctx.entries() {
        match e {
            Entry::Bind(_, ty) => {
                if !ty.free_vars().is_empty() {
                    return false;
                }
            }
            Entry::Lock => {
                if seen_lock || seen_tick {
                    return false;
                }
                seen_lock = true;
            }
            Entry::Tick => {
                if seen_tick || !seen_lock {
                    return false;
                }
                seen_tick = true;
            }
        }
    }
    true
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match e {
                Entry::Bind(x, ty) => write!(f, "{x} : {ty}")?,
                Entry::Lock => f.write_str("lock")?,
                Entry::Tick => f.write_str("tick")?,
            }
        }
        f.write_str(")")
    }
}
