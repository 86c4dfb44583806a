//! Generators for the explicit avoidance colorings: block colorings, their
//! recursive r-color extensions, and the logarithmic-interval families.
//!
//! Interval boundaries involving sqrt(2), sqrt(3), or rational ratios are
//! decided with exact integer arithmetic only: membership x in [p^i, p^(i+1))
//! for p = sqrt(d) reduces to comparing x^2 against powers of d, and rational
//! split points are floor divisions. No floating point anywhere.

use crate::bounds::{lower_thm24, recursive_lower};
use crate::checker::{find_mono_triple, verify_certificate, CertKind, Certificate, Coloring};
use crate::error::{Error, Result};
use crate::triples::ABParams;

/// Exact representation of the interval ratio p: either sqrt(d) or u/v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PTag {
    Sqrt(u64),
    Ratio(u64, u64),
}

impl PTag {
    /// Compares p^i with the integer x, exactly.
    pub fn pow_cmp(self, i: u32, x: u64) -> Result<std::cmp::Ordering> {
        let x = x as u128;
        match self {
            PTag::Sqrt(d) => {
                // p^i <= x  iff  d^i <= x^2, both sides exact integers.
                let lhs = (d as u128).checked_pow(i).ok_or(Error::Overflow)?;
                Ok(lhs.cmp(&x.checked_mul(x).ok_or(Error::Overflow)?))
            }
            PTag::Ratio(u, v) => {
                let lhs = (u as u128).checked_pow(i).ok_or(Error::Overflow)?;
                let rhs = (v as u128)
                    .checked_pow(i)
                    .and_then(|p| p.checked_mul(x))
                    .ok_or(Error::Overflow)?;
                Ok(lhs.cmp(&rhs))
            }
        }
    }

    fn gt_one(self) -> bool {
        match self {
            PTag::Sqrt(d) => d > 1,
            PTag::Ratio(u, v) => v >= 1 && u > v,
        }
    }

    /// floor(p * m), exactly.
    pub fn floor_mul(self, m: u64) -> Result<u64> {
        match self {
            PTag::Sqrt(d) => {
                let sq = (d as u128)
                    .checked_mul(m as u128)
                    .and_then(|v| v.checked_mul(m as u128))
                    .ok_or(Error::Overflow)?;
                Ok(isqrt_u128(sq) as u64)
            }
            PTag::Ratio(u, v) => {
                let num = (u as u128).checked_mul(m as u128).ok_or(Error::Overflow)?;
                u64::try_from(num / v as u128).map_err(|_| Error::Overflow)
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse ratio '{s}': want sqrtD or u/v"));
        if let Some(d) = s.strip_prefix("sqrt") {
            return d.parse().map(PTag::Sqrt).map_err(|_| bad());
        }
        let (u, v) = s.split_once('/').ok_or_else(bad)?;
        Ok(PTag::Ratio(
            u.trim().parse().map_err(|_| bad())?,
            v.trim().parse().map_err(|_| bad())?,
        ))
    }
}

impl std::fmt::Display for PTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PTag::Sqrt(d) => write!(f, "sqrt{d}"),
            PTag::Ratio(u, v) => write!(f, "{u}/{v}"),
        }
    }
}

/// Exact floor square root.
fn isqrt_u128(v: u128) -> u128 {
    if v == 0 {
        return 0;
    }
    let mut x = (v as f64).sqrt() as u128 + 2;
    while x * x > v {
        x -= 1;
    }
    debug_assert!(x * x <= v && (x + 1) * (x + 1) > v);
    x
}

/// The 2-coloring chi(x) = (2-adic valuation of x) mod 2 on [1,n]. For each
/// even 2m the color differs from that of m, so no (a,2a)-triple
/// {x, y, 2y} is ever monochromatic. Odd numbers are fixed to color 0.
pub fn parity_doubling(n: u64) -> Coloring {
    Coloring::from_fn(2, n, |x| (x.trailing_zeros() % 2) as u8).expect("valid 2-coloring")
}

fn verified_lower_bound_cert(
    params: ABParams,
    colors: Vec<u8>,
    meta: String,
) -> Result<Certificate> {
    let coloring = Coloring::new(params.r, colors.clone())?;
    if let Some(t) = find_mono_triple(&coloring, params) {
        return Err(Error::InvalidCertificate(format!(
            "construction contains monochromatic triple {:?}",
            t.elements
        )));
    }
    Ok(Certificate {
        a: params.a,
        b: params.b,
        r: params.r,
        kind: CertKind::LowerBoundWitness,
        n: colors.len() as u64,
        colors,
        meta,
    })
}

/// Block coloring: [b+2, b^2+2b+1] red, complement blue, on the interval
/// whose length is one less than the claimed bound. Certifies
/// N(a,b;2) >= 2b^2+5b-(2a-4) for b >= 2a and
/// N(a,b;2) >= 3b^2-(2a-5)b-(2a-4) for b < 2a.
pub fn block_thm24(a: u64, b: u64) -> Result<Certificate> {
    let params = ABParams::new(a, b, 2)?;
    if b == 2 * a {
        return Err(Error::Inapplicable("b = 2a: no finite N(a,b;2)".into()));
    }
    let bound = lower_thm24(a, b)?;
    let n = bound - 1;
    let lo = b + 2;
    let hi = b * b + 2 * b + 1;
    let colors: Vec<u8> = (1..=n).map(|x| u8::from(x >= lo && x <= hi)).collect();
    verified_lower_bound_cert(
        params,
        colors,
        format!("block coloring, [b+2,b^2+2b+1] one color; certifies N({a},{b};2) >= {bound}"),
    )
}

/// Refined a=1 block coloring: [1,b+1], {b+3}, and [b^2+2b+4, 2b^2+5b+5]
/// red, the rest blue. Certifies N(1,b;2) >= 2b^2+5b+6, which matches the
/// computed exact values for b in {3,4,5}.
pub fn block_thm25(b: u64) -> Result<Certificate> {
    if b < 3 {
        return Err(Error::Inapplicable(format!("need b >= 3, got b={b}")));
    }
    let params = ABParams::new(1, b, 2)?;
    let n = 2 * b * b + 5 * b + 5;
    let red = |x: u64| x <= b + 1 || x == b + 3 || (x >= b * b + 2 * b + 4);
    let colors: Vec<u8> = (1..=n).map(|x| u8::from(!red(x))).collect();
    verified_lower_bound_cert(
        params,
        colors,
        format!("refined block coloring for a=1; certifies N(1,{b};2) >= {}", n + 1),
    )
}

/// Extends a valid (r-1)-color certificate to r colors by coloring the next
/// interval with the fresh color, then re-verifies by full scan.
pub fn recursive_extension(base: &Certificate, a: u64, b: u64, r: u64) -> Result<Certificate> {
    if base.a != a || base.b != b || base.r + 1 != r {
        return Err(Error::InvalidParams(format!(
            "base certificate is for ({},{};r={}), cannot extend to ({a},{b};r={r})",
            base.a, base.b, base.r
        )));
    }
    if !verify_certificate(base).is_valid() {
        return Err(Error::InvalidCertificate(
            "base certificate does not verify".into(),
        ));
    }
    let needed = recursive_lower(a, b, r - 1)? - 1;
    if base.n < needed {
        return Err(Error::InvalidParams(format!(
            "base covers [1,{}] but the induction needs [1,{needed}]",
            base.n
        )));
    }
    let bound = recursive_lower(a, b, r)?;
    let params = ABParams::new(a, b, r)?;
    let fresh = (r - 1) as u8;
    let mut colors = base.colors[..needed as usize].to_vec();
    colors.resize(bound as usize - 1, fresh);
    verified_lower_bound_cert(
        params,
        colors,
        format!("recursive block extension; certifies N({a},{b};{r}) >= {bound}"),
    )
}

/// chi(x) = i mod r where p^i <= x < p^(i+1). With p = sqrt(2) and
/// r = ceil(log_sqrt2 ceil(b/a)) + 1 this avoids monochromatic
/// (a,b)-triples for the eligible pairs.
pub fn log_interval(p: PTag, r: u64, n: u64) -> Result<Coloring> {
    if !p.gt_one() {
        return Err(Error::InvalidParams(format!("need p > 1, got {p}")));
    }
    if r < 2 {
        return Err(Error::InvalidParams("need r >= 2".into()));
    }
    let mut colors = Vec::with_capacity(n as usize);
    let mut i: u32 = 0;
    for x in 1..=n {
        while p.pow_cmp(i + 1, x)? != std::cmp::Ordering::Greater {
            i += 1;
        }
        colors.push((i as u64 % r) as u8);
    }
    Coloring::new(r, colors)
}

/// Each block [q^k, q^(k+1)) is split at floor(p*q^k); the halves get
/// colors 2k and 2k+1 taken mod `modulus`.
pub fn split_interval(q: u64, p: PTag, modulus: u64, n: u64) -> Result<Coloring> {
    if q < 2 {
        return Err(Error::InvalidParams("need q >= 2".into()));
    }
    if modulus < 2 || modulus % 2 != 0 {
        return Err(Error::InvalidParams("modulus must be even and >= 2".into()));
    }
    if !p.gt_one() || p.pow_cmp(1, q)? != std::cmp::Ordering::Less {
        return Err(Error::InvalidParams(format!("need 1 < p < q, got p={p}, q={q}")));
    }
    let mut colors = Vec::with_capacity(n as usize);
    let mut k: u32 = 0;
    let mut block_hi = q; // exclusive upper end of [q^k, q^(k+1))
    let mut split = p.floor_mul(1)?;
    for x in 1..=n {
        while x >= block_hi {
            k += 1;
            split = p.floor_mul(block_hi)?;
            block_hi = block_hi.checked_mul(q).ok_or(Error::Overflow)?;
        }
        let half = if x < split { 2 * k as u64 } else { 2 * k as u64 + 1 };
        colors.push((half % modulus) as u8);
    }
    Coloring::new(modulus, colors)
}

/// The Theorem 4.1 family: 4-coloring with interval [a^j, a^(j+1)) colored
/// j mod 4, which avoids monochromatic k-term a-progressions for every
/// k >= ceil(a^2/(a+1)) + 2.
pub fn power_interval_thm41(a: u64, n: u64) -> Result<Coloring> {
    if a < 2 {
        return Err(Error::InvalidParams("need a >= 2".into()));
    }
    let mut colors = Vec::with_capacity(n as usize);
    let mut j: u64 = 0;
    let mut next = a; // a^(j+1)
    for x in 1..=n {
        while x >= next {
            j += 1;
            next = next.checked_mul(a).ok_or(Error::Overflow)?;
        }
        colors.push((j % 4) as u8);
    }
    Coloring::new(4, colors)
}

/// Wraps a generated coloring as a certificate, scanning it first.
pub fn certify_coloring(
    params: ABParams,
    coloring: &Coloring,
    kind: CertKind,
    meta: String,
) -> Result<Certificate> {
    let cert = Certificate {
        a: params.a,
        b: params.b,
        r: params.r,
        kind,
        n: coloring.n(),
        colors: coloring.colors().to_vec(),
        meta,
    };
    match verify_certificate(&cert) {
        crate::checker::Verdict::Valid => Ok(cert),
        crate::checker::Verdict::Invalid(reason) => Err(Error::InvalidCertificate(reason)),
    }
}

pub use crate::checker::progression_threshold_k as thm41_k;
