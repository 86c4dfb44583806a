//! Domain types for (a,b)-triples and k-term a-progressions.
//!
//! An (a,b)-triple is a set {x, ax+d, bx+2d} with x, d >= 1. A k-term
//! a-progression is {x, ax+d, ax+2d, ..., ax+(k-1)d}. All arithmetic is
//! checked 64-bit; enumeration order is lexicographic in (x, d) so that
//! every downstream output is deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A problem instance: the pair (a,b) with 1 <= a <= b, plus the color count r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ABParams {
    pub a: u64,
    pub b: u64,
    pub r: u64,
}

impl ABParams {
    pub fn new(a: u64, b: u64, r: u64) -> Result<Self> {
        if a < 1 || b < a {
            return Err(Error::InvalidParams(format!(
                "need 1 <= a <= b, got a={a}, b={b}"
            )));
        }
        if r < 1 || r > 255 {
            return Err(Error::InvalidParams(format!("need 1 <= r <= 255, got r={r}")));
        }
        Ok(Self { a, b, r })
    }
}

fn checked_elem(mul: u64, x: u64, add: u64) -> Result<u64> {
    mul.checked_mul(x)
        .and_then(|v| v.checked_add(add))
        .ok_or(Error::Overflow)
}

/// The triple {x, ax+d, bx+2d} together with its generating (x, d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub x: u64,
    pub d: u64,
    pub elements: [u64; 3],
}

impl Triple {
    pub fn contains(&self, v: u64) -> bool {
        self.elements.contains(&v)
    }
}

/// Builds {x, ax+d, bx+2d}. Rejects x = 0 or d = 0: the generating x and d
/// are natural numbers starting at 1.
pub fn make_triple(params: ABParams, x: u64, d: u64) -> Result<Triple> {
    if x == 0 || d == 0 {
        return Err(Error::InvalidParams(format!(
            "triple generators must be positive, got x={x}, d={d}"
        )));
    }
    let second = checked_elem(params.a, x, d)?;
    let third = checked_elem(params.b, x, d.checked_mul(2).ok_or(Error::Overflow)?)?;
    debug_assert!(x < second && second < third);
    Ok(Triple {
        x,
        d,
        elements: [x, second, third],
    })
}

/// All (a,b)-triples contained in [1,n], in lexicographic (x,d) order.
pub fn enumerate_triples(params: ABParams, n: u64) -> Vec<Triple> {
    let mut out = Vec::new();
    let mut x = 1;
    while params.b * x + 2 <= n {
        let mut d = 1;
        while params.b * x + 2 * d <= n {
            out.push(Triple {
                x,
                d,
                elements: [x, params.a * x + d, params.b * x + 2 * d],
            });
            d += 1;
        }
        x += 1;
    }
    out
}

/// All (x,d) with bx+2d = z, in increasing x. These are the triples whose
/// largest element is exactly z, the completion index used by the
/// incremental checker and the search engine.
pub fn triples_with_max(params: ABParams, z: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut x = 1;
    while params.b * x + 2 <= z {
        let rest = z - params.b * x;
        if rest % 2 == 0 {
            out.push((x, rest / 2));
        }
        x += 1;
    }
    out
}

/// The k-term a-progression {x, ax+d, ax+2d, ..., ax+(k-1)d}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    pub x: u64,
    pub d: u64,
    pub k: u64,
    pub elements: Vec<u64>,
}

pub fn make_progression(a: u64, k: u64, x: u64, d: u64) -> Result<Progression> {
    if a == 0 || x == 0 || d == 0 {
        return Err(Error::InvalidParams(
            "progression generators must be positive".into(),
        ));
    }
    if k < 3 {
        return Err(Error::InvalidParams(format!("need k >= 3, got k={k}")));
    }
    let head = checked_elem(a, x, 0)?;
    let mut elements = Vec::with_capacity(k as usize);
    elements.push(x);
    for i in 1..k {
        elements.push(head.checked_add(i.checked_mul(d).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?);
    }
    Ok(Progression { x, d, k, elements })
}

/// All k-term a-progressions with largest element ax+(k-1)d <= n,
/// in lexicographic (x,d) order.
pub fn enumerate_progressions(a: u64, k: u64, n: u64) -> Vec<Progression> {
    assert!(a >= 1 && k >= 3);
    let mut out = Vec::new();
    let mut x = 1;
    while a * x + (k - 1) <= n {
        let mut d = 1;
        while a * x + (k - 1) * d <= n {
            out.push(make_progression(a, k, x, d).expect("bounded by n"));
            d += 1;
        }
        x += 1;
    }
    out
}
