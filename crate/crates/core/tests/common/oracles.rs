//! List-level reference implementations, one per `oracle` id used in the
//! corpus expectation files. These never touch the machine: they work on
//! plain Rust values and are converted to terms only for comparison.

use num_bigint::BigUint;
use ratt::syntax::{Side, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum V {
    Unit,
    Nat(u128),
    Pair(Box<V>, Box<V>),
    In1(Box<V>),
    In2(Box<V>),
}

impl V {
    pub fn bool(b: bool) -> V {
        if b { V::In2(Box::new(V::Unit)) } else { V::In1(Box::new(V::Unit)) }
    }

    pub fn nothing() -> V {
        V::In1(Box::new(V::Unit))
    }

    pub fn just(v: V) -> V {
        V::In2(Box::new(v))
    }

    pub fn pair(a: V, b: V) -> V {
        V::Pair(Box::new(a), Box::new(b))
    }

    pub fn nat(&self) -> u128 {
        match self {
            V::Nat(n) => *n,
            v => panic!("not a natural: {v:?}"),
        }
    }

    pub fn as_bool(&self) -> bool {
        match self {
            V::In2(_) => true,
            V::In1(_) => false,
            v => panic!("not a boolean: {v:?}"),
        }
    }

    pub fn as_maybe(&self) -> Option<&V> {
        match self {
            V::In1(_) => None,
            V::In2(v) => Some(v),
            v => panic!("not a maybe: {v:?}"),
        }
    }

    pub fn split(&self) -> (&V, &V) {
        match self {
            V::Pair(a, b) => (a, b),
            v => panic!("not a pair: {v:?}"),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            V::Unit => Term::Unit,
            V::Nat(n) => Term::Nat(BigUint::from(*n)),
            V::Pair(a, b) => Term::pair(a.to_term(), b.to_term()),
            V::In1(a) => Term::in1(a.to_term()),
            V::In2(a) => Term::in2(a.to_term()),
        }
    }

    pub fn from_term(t: &Term) -> V {
        match t {
            Term::Unit => V::Unit,
            Term::Nat(n) => V::Nat(u128::try_from(n).expect("natural fits in 128 bits")),
            Term::Pair(a, b) => V::pair(V::from_term(a), V::from_term(b)),
            Term::Inj(Side::Left, a) => V::In1(Box::new(V::from_term(a))),
            Term::Inj(Side::Right, a) => V::In2(Box::new(V::from_term(a))),
            t => panic!("not a value: {t}"),
        }
    }
}

pub enum Oracle {
    /// The first `n` elements.
    Stream(fn(usize) -> Vec<V>),
    /// One output per input.
    Transducer(fn(&[V]) -> Vec<V>),
}

pub fn lookup(id: &str) -> Oracle {
    use Oracle::*;
    match id {
        "zeros" => Stream(|n| vec![V::Nat(0); n]),
        "nats" => Stream(|n| (0..n as u128).map(V::Nat).collect()),
        "fibonacci" => Stream(fibonacci),
        "always_true" => Stream(|n| vec![V::bool(true); n]),
        "always_false" => Stream(|n| vec![V::bool(false); n]),
        "every_third_step" => Stream(|n| (1..=n).map(|i| V::bool(i % 3 == 0)).collect()),
        "identity" => Transducer(|xs| xs.to_vec()),
        "double" => Transducer(|xs| xs.iter().map(|x| V::Nat(2 * x.nat())).collect()),
        "successor" => Transducer(|xs| xs.iter().map(|x| V::Nat(x.nat() + 1)).collect()),
        "prefix_sums" => Transducer(prefix_sums),
        "small_or_zero" => Transducer(|xs| {
            xs.iter().map(|x| V::Nat(if x.nat() < 10 { x.nat() } else { 0 })).collect()
        }),
        "pair_sums" => Transducer(|xs| {
            xs.iter()
                .map(|p| {
                    let (a, b) = p.split();
                    V::Nat(a.nat() + b.nat())
                })
                .collect()
        }),
        "switch_above_100" => Transducer(switch_above_100),
        "first_successor" => Transducer(first_successor),
        "await_both" => Transducer(await_both),
        "add_to_10" => Transducer(|xs| {
            xs.iter()
                .map(|m| match m.as_maybe() {
                    Some(n) => V::just(V::Nat(10 + n.nat())),
                    None => V::nothing(),
                })
                .collect()
        }),
        "every_third" => Transducer(every_third),
        "when" => Transducer(|xs| {
            xs.iter()
                .map(|p| {
                    let (m, c) = p.split();
                    if c.as_bool() { m.clone() } else { V::nothing() }
                })
                .collect()
        }),
        "rising_edge" => Transducer(rising_edge),
        "hold_from_0" => Transducer(hold_from_0),
        "counter_5_2" => Transducer(counter_5_2),
        other => panic!("no oracle named `{other}`"),
    }
}

fn fibonacci(n: usize) -> Vec<V> {
    let (mut a, mut b) = (0u128, 1u128);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(V::Nat(a));
        (a, b) = (b, a + b);
    }
    out
}

fn prefix_sums(xs: &[V]) -> Vec<V> {
    xs.iter()
        .scan(0u128, |acc, x| {
            *acc += x.nat();
            Some(V::Nat(*acc))
        })
        .collect()
}

fn switch_above_100(xs: &[V]) -> Vec<V> {
    let switch_at = xs.iter().position(|x| x.nat() > 100).unwrap_or(xs.len());
    xs.iter()
        .enumerate()
        .map(|(i, x)| V::Nat(if i < switch_at { x.nat() + 1000 } else { x.nat() }))
        .collect()
}

fn first_successor(xs: &[V]) -> Vec<V> {
    let first = xs.iter().position(|m| m.as_maybe().is_some());
    xs.iter()
        .enumerate()
        .map(|(i, m)| match (Some(i) == first, m.as_maybe()) {
            (true, Some(n)) => V::just(V::Nat(n.nat() + 1)),
            _ => V::nothing(),
        })
        .collect()
}

fn await_both(xs: &[V]) -> Vec<V> {
    let firsts = |side: usize| {
        xs.iter().enumerate().find_map(|(i, p)| {
            let (a, b) = p.split();
            [a, b][side].as_maybe().map(|v| (i, v.clone()))
        })
    };
    let fire = match (firsts(0), firsts(1)) {
        (Some((i, a)), Some((j, b))) => Some((i.max(j), V::pair(a, b))),
        _ => None,
    };
    (0..xs.len())
        .map(|i| match &fire {
            Some((k, v)) if *k == i => V::just(v.clone()),
            _ => V::nothing(),
        })
        .collect()
}

fn every_third(xs: &[V]) -> Vec<V> {
    let mut ticks = 0;
    xs.iter()
        .map(|b| {
            if b.as_bool() {
                ticks += 1;
                V::bool(ticks % 3 == 0)
            } else {
                V::bool(false)
            }
        })
        .collect()
}

fn rising_edge(xs: &[V]) -> Vec<V> {
    xs.iter()
        .enumerate()
        .map(|(i, b)| V::bool(i > 0 && b.as_bool() && !xs[i - 1].as_bool()))
        .collect()
}

fn hold_from_0(xs: &[V]) -> Vec<V> {
    let mut last = 0;
    xs.iter()
        .map(|m| {
            if let Some(v) = m.as_maybe() {
                last = v.nat();
            }
            V::Nat(last)
        })
        .collect()
}

/// Lustre: `pn = 5 -> pre n; n = if reset then 5 else if x then pn + 2 else pn`.
fn counter_5_2(xs: &[V]) -> Vec<V> {
    let mut pre: Option<u128> = None;
    xs.iter()
        .map(|p| {
            let (x, reset) = p.split();
            let pn = pre.unwrap_or(5);
            let n = if reset.as_bool() {
                5
            } else if x.as_bool() {
                pn + 2
            } else {
                pn
            };
            pre = Some(n);
            V::Nat(n)
        })
        .collect()
}
