//! Monochromatic-object detection in colorings, incremental extension
//! checks, and self-contained witness certificates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triples::{triples_with_max, ABParams, Progression, Triple};

/// Fixed-size bit set over [1,n], one per color class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    domain: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(domain: usize) -> Self {
        Self {
            domain,
            words: vec![0; domain.div_ceil(64) + 1],
        }
    }

    pub fn insert(&mut self, v: usize) {
        debug_assert!(v >= 1 && v <= self.domain);
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        if v < 1 || v > self.domain {
            return false;
        }
        self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

/// A total r-coloring of [1,n]. Colors are 0..r-1; `colors[i-1]` holds the
/// color of i. Per-color bit sets give O(1) membership probes in the scan
/// loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    n: u64,
    r: u64,
    colors: Vec<u8>,
    classes: Vec<BitSet>,
}

impl Coloring {
    pub fn new(r: u64, colors: Vec<u8>) -> Result<Self> {
        if r < 1 || r > 255 {
            return Err(Error::InvalidParams(format!("need 1 <= r <= 255, got {r}")));
        }
        let n = colors.len() as u64;
        let mut classes = vec![BitSet::new(colors.len()); r as usize];
        for (i, &c) in colors.iter().enumerate() {
            if c as u64 >= r {
                return Err(Error::InvalidParams(format!(
                    "color {c} of element {} out of range 0..{r}",
                    i + 1
                )));
            }
            classes[c as usize].insert(i + 1);
        }
        Ok(Self { n, r, colors, classes })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn color_of(&self, i: u64) -> u8 {
        self.colors[i as usize - 1]
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn class(&self, c: u8) -> &BitSet {
        &self.classes[c as usize]
    }

    /// Builds a coloring from a membership rule, evaluated at 1..=n.
    pub fn from_fn(r: u64, n: u64, f: impl Fn(u64) -> u8) -> Result<Self> {
        Self::new(r, (1..=n).map(f).collect())
    }
}

/// Least monochromatic (a,b)-triple fully inside [1,n], in lexicographic
/// (x,d) order, or None. The scan parallelizes over x; the reduction keeps
/// the result deterministic.
pub fn find_mono_triple(coloring: &Coloring, params: ABParams) -> Option<Triple> {
    let n = coloring.n;
    if params.b + 2 > n {
        return None;
    }
    let colors = &coloring.colors;
    let max_x = (n - 2) / params.b;
    let check_x = |x: u64| -> Option<Triple> {
        let c = colors[x as usize - 1];
        let mut second = params.a * x + 1;
        let mut third = params.b * x + 2;
        while third <= n {
            if colors[second as usize - 1] == c && colors[third as usize - 1] == c {
                return Some(Triple {
                    x,
                    d: second - params.a * x,
                    elements: [x, second, third],
                });
            }
            second += 1;
            third += 2;
        }
        None
    };
    if max_x >= 2048 {
        (1..=max_x)
            .into_par_iter()
            .filter_map(check_x)
            .min_by_key(|t| (t.x, t.d))
    } else {
        (1..=max_x).find_map(check_x)
    }
}

/// Least monochromatic k-term a-progression in [1,n], or None.
pub fn find_mono_progression(coloring: &Coloring, a: u64, k: u64) -> Option<Progression> {
    assert!(a >= 1 && k >= 3);
    let n = coloring.n;
    let colors = &coloring.colors;
    let check_x = |x: u64| -> Option<Progression> {
        let c = colors[x as usize - 1];
        let head = a * x;
        let mut d = 1;
        'outer: while head + (k - 1) * d <= n {
            for i in 1..k {
                if colors[(head + i * d) as usize - 1] != c {
                    d += 1;
                    continue 'outer;
                }
            }
            return Some(Progression {
                x,
                d,
                k,
                elements: std::iter::once(x)
                    .chain((1..k).map(|i| head + i * d))
                    .collect(),
            });
        }
        None
    };
    let max_x = if a * 1 + (k - 1) > n { 0 } else { (n - (k - 1)) / a };
    if max_x >= 2048 {
        (1..=max_x)
            .into_par_iter()
            .filter_map(check_x)
            .min_by_key(|p| (p.x, p.d))
    } else {
        (1..=max_x).find_map(check_x)
    }
}

/// Incremental check: given a triple-free prefix coloring of [1,m-1],
/// does assigning `color` to m keep it triple-free? Only triples whose
/// largest element is m can be affected.
pub fn extends_safely(prefix: &[u8], params: ABParams, color: u8) -> bool {
    let m = prefix.len() as u64 + 1;
    for (x, d) in triples_with_max(params, m) {
        let second = params.a * x + d;
        if prefix[x as usize - 1] == color && prefix[second as usize - 1] == color {
            return false;
        }
    }
    true
}

/// What a certificate claims about its embedded coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertKind {
    /// A triple-free coloring of [1,n], certifying N(a,b;r) >= n+1.
    #[serde(rename = "lower-bound-witness")]
    LowerBoundWitness,
    /// A triple-free prefix of an infinite avoidance coloring for b = 2a.
    #[serde(rename = "dne-prefix-witness")]
    DnePrefixWitness,
    /// A coloring of [1,n] with no monochromatic k-term a-progression,
    /// where k is the Theorem 4.1 threshold for a.
    #[serde(rename = "progression-witness")]
    ProgressionWitness,
}

/// Self-contained, search-free witness: the full coloring is embedded, so
/// verification is a scan and nothing else.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub a: u64,
    pub b: u64,
    pub r: u64,
    pub kind: CertKind,
    pub n: u64,
    pub colors: Vec<u8>,
    pub meta: String,
}

/// Smallest k covered by the Theorem 4.1 coloring: ceil(a^2/(a+1)) + 2.
pub fn progression_threshold_k(a: u64) -> u64 {
    (a * a).div_ceil(a + 1) + 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl Certificate {
    pub fn params(&self) -> Result<ABParams> {
        ABParams::new(self.a, self.b, self.r)
    }

    pub fn coloring(&self) -> Result<Coloring> {
        Coloring::new(self.r, self.colors.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Checks well-formedness and re-scans the embedded coloring for the
/// claimed kind of monochromatic object. No search, no trust.
pub fn verify_certificate(cert: &Certificate) -> Verdict {
    let params = match cert.params() {
        Ok(p) => p,
        Err(e) => return Verdict::Invalid(e.to_string()),
    };
    if cert.colors.len() as u64 != cert.n {
        return Verdict::Invalid(format!(
            "colors array has {} entries but n = {}",
            cert.colors.len(),
            cert.n
        ));
    }
    let coloring = match cert.coloring() {
        Ok(c) => c,
        Err(e) => return Verdict::Invalid(e.to_string()),
    };
    match cert.kind {
        CertKind::LowerBoundWitness | CertKind::DnePrefixWitness => {
            if cert.kind == CertKind::DnePrefixWitness && cert.b != 2 * cert.a {
                return Verdict::Invalid(format!(
                    "dne prefix witness requires b = 2a, got ({}, {})",
                    cert.a, cert.b
                ));
            }
            match find_mono_triple(&coloring, params) {
                None => Verdict::Valid,
                Some(t) => Verdict::Invalid(format!(
                    "monochromatic ({},{})-triple {:?} at (x={}, d={})",
                    cert.a, cert.b, t.elements, t.x, t.d
                )),
            }
        }
        CertKind::ProgressionWitness => {
            let k = progression_threshold_k(cert.a);
            match find_mono_progression(&coloring, cert.a, k) {
                None => Verdict::Valid,
                Some(p) => Verdict::Invalid(format!(
                    "monochromatic {k}-term {}-progression {:?}",
                    cert.a, p.elements
                )),
            }
        }
    }
}
