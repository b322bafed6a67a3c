//! Heaps and the three shapes of store.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Location, Term};

pub type Heap = BTreeMap<Location, Term>;

/// No heap, a single heap (the one `delay` writes to), or a now heap
/// that `adv` reads from together with a later heap.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Store {
    #[default]
    Bottom,
    One { later: Heap },
    Two { now: Heap, later: Heap },
}

impl Store {
    pub fn one(later: Heap) -> Store {
        Store::One { later }
    }

    pub fn two(now: Heap, later: Heap) -> Store {
        Store::Two { now, later }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Store::Bottom)
    }

    pub fn later(&self) -> Option<&Heap> {
        match self {
            Store::Bottom => None,
            Store::One { later } | Store::Two { later, .. } => Some(later),
        }
    }

    pub fn later_mut(&mut self) -> Option<&mut Heap> {
        match self {
            Store::Bottom => None,
            Store::One { later } | Store::Two { later, .. } => Some(later),
        }
    }

    pub fn now(&self) -> Option<&Heap> {
        match self {
            Store::Two { now, .. } => Some(now),
            _ => None,
        }
    }

    /// Garbage collection at a step boundary: the now heap is dropped.
    pub fn trim(self) -> Store {
        match self {
            Store::Two { later, .. } => Store::One { later },
            other => other,
        }
    }

    /// Number of bindings across both heaps.
    pub fn size(&self) -> usize {
        self.now().map_or(0, |h| h.len()) + self.later().map_or(0, |h| h.len())
    }

    /// `self ⊑ other`: same shape, and each heap of `other` extends the
    /// corresponding heap of `self` without changing existing bindings.
    pub fn extended_by(&self, other: &Store) -> bool {
        fn sub(a: &Heap, b: &Heap) -> bool {
            a.iter().all(|(l, t)| b.get(l) == Some(t))
        }
        match (self, other) {
            (Store::Bottom, Store::Bottom) => true,
            (Store::One { later: a }, Store::One { later: b }) => sub(a, b),
            (Store::Two { now: n1, later: l1 }, Store::Two { now: n2, later: l2 }) => {
                sub(n1, n2) && sub(l1, l2)
            }
            _ => false,
        }
    }

    /// One-line summary used by trace output.
    pub fn digest(&self) -> String {
        fn dom(h: &Heap) -> String {
            let locs: Vec<String> = h.keys().map(|l| l.to_string()).collect();
            format!("{{{}}}", locs.join(","))
        }
        match self {
            Store::Bottom => "bottom".into(),
            Store::One { later } => format!("lock {}", dom(later)),
            Store::Two { now, later } => format!("lock {} tick {}", dom(now), dom(later)),
        }
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::pretty::store_to_string(self))
    }
}
