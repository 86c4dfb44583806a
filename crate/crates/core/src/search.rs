//! Exhaustive backtracking search for N(a,b;r).
//!
//! Colors are assigned to 1, 2, ... in order. Each assignment propagates:
//! whenever the two smaller elements of a triple share a color, that color
//! is forbidden at the triple's largest element, and a future position left
//! with a single admissible color is treated as colored, cascading to a
//! fixpoint. A branch is cut when some future position has every color
//! forbidden and lies no deeper than the best prefix already on record.
//! Symmetry breaking fixes color(1) = 0 and admits at each position only
//! colors up to one past the maximum color used so far. A single DFS records
//! the deepest triple-free prefix; when the tree is exhausted below the cap,
//! N is that depth plus one.
//!
//! Parallelism splits the tree at a fixed shallow frontier depth and merges
//! subtree results in enumeration order, so the outcome is bit-identical
//! across worker counts.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::checker::{verify_certificate, CertKind, Certificate};
use crate::error::{Error, Result};
use crate::triples::{triples_with_max, ABParams};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DneReason {
    /// b = 2a: the doubling-parity coloring avoids (a,2a)-triples on all of N.
    BEquals2A,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    /// N(a,b;r) = n, with a verified triple-free witness for [1, n-1].
    Exact { n: u64, witness: Certificate },
    /// A triple-free coloring of [1, cap] exists; N(a,b;r) >= cap + 1.
    LowerBound { cap: u64, witness: Certificate },
    /// No finite N(a,b;r) exists.
    NonExistent { reason: DneReason },
    /// The deadline expired; the deepest verified prefix proves
    /// N(a,b;r) >= best + 1 but the tree was not exhausted.
    Inconclusive { best: u64, witness: Certificate },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    pub max_depth: u64,
    pub subtrees: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub cap: u64,
    /// Depth at which the tree is split into independent subtrees.
    pub frontier_depth: u64,
    pub deadline: Option<Instant>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cap: 2000,
            frontier_depth: 12,
            deadline: None,
        }
    }
}

/// The only non-existence the engine ever claims: b = 2a with r >= 2.
/// For every other pair existence at r = 2 is proven, and for r >= 3 the
/// question is open, so the engine reports a lower bound at the cap instead.
pub fn detect_dne(params: ABParams) -> Option<DneReason> {
    if params.b == 2 * params.a && params.r >= 2 {
        Some(DneReason::BEquals2A)
    } else {
        None
    }
}

/// Flattened completion index: for each position m, the (0-based) index
/// pairs of the two smaller elements of every triple with max element m.
struct PairTable {
    pairs: Vec<(u32, u32)>,
    offsets: Vec<u32>,
}

impl PairTable {
    /// Pairs for position m (1-based).
    #[inline]
    fn at(&self, m: usize) -> &[(u32, u32)] {
        &self.pairs[self.offsets[m - 1] as usize..self.offsets[m] as usize]
    }
}

/// Triple incidence keyed by element: under position p (1-based), entry
/// (o, z) lists a triple whose two smaller elements are p and o+1 and whose
/// largest is z+1 (o and z are 0-based). A pair of smaller elements is
/// complete as soon as the *later* of its two coloring events happens, so
/// each coloring event scans its own incidence list and checks the partner.
struct IncidenceTable {
    items: Vec<(u32, u32)>,
    offsets: Vec<u32>,
}

impl IncidenceTable {
    /// Entries involving position p (1-based) as a smaller element.
    #[inline]
    fn at(&self, p: usize) -> &[(u32, u32)] {
        &self.items[self.offsets[p - 1] as usize..self.offsets[p] as usize]
    }
}

fn build_tables(params: ABParams, cap: u64) -> Result<(PairTable, IncidenceTable)> {
    if cap > u32::MAX as u64 / 2 {
        return Err(Error::Overflow);
    }
    let mut pairs = Vec::new();
    let mut offsets = Vec::with_capacity(cap as usize + 2);
    offsets.push(0);
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cap as usize];
    for m in 1..=cap {
        for (x, d) in triples_with_max(params, m) {
            let second = params.a * x + d;
            pairs.push((x as u32 - 1, second as u32 - 1));
            // Both smaller elements point at each other.
            buckets[x as usize - 1].push((second as u32 - 1, m as u32 - 1));
            buckets[second as usize - 1].push((x as u32 - 1, m as u32 - 1));
        }
        offsets.push(pairs.len() as u32);
    }
    let mut items = Vec::with_capacity(pairs.len() * 2);
    let mut inc_offsets = Vec::with_capacity(cap as usize + 1);
    inc_offsets.push(0);
    for bucket in &buckets {
        items.extend_from_slice(bucket);
        inc_offsets.push(items.len() as u32);
    }
    Ok((PairTable { pairs, offsets }, IncidenceTable { items, offsets: inc_offsets }))
}

#[inline]
fn allowed(colors: &[u8], table: &PairTable, m: usize, c: u8) -> bool {
    table
        .at(m)
        .iter()
        .all(|&(i, j)| colors[i as usize] != c || colors[j as usize] != c)
}

enum SubtreeEnd {
    Exhausted,
    FoundFull(Vec<u8>),
    TimedOut,
    Skipped,
}

struct SubtreeResult {
    end: SubtreeEnd,
    deepest: u64,
    deepest_witness: Vec<u8>,
    stats: SearchStats,
}

const UNCOLORED: u8 = u8::MAX;

struct Dfs<'a> {
    inc: &'a IncidenceTable,
    cap: usize,
    r: u8,
    /// Bit c of forbidden[i] is set when coloring position i+1 with c would
    /// complete a monochromatic triple, given the current deductions.
    forbidden: Vec<u64>,
    /// Color per position: real assignments up to the DFS depth, plus
    /// *forced* colors of later positions (every alternative forbidden).
    /// Forced colors hold in any extension of the branch, so pairs they
    /// complete propagate further forbidden bits ahead of the search.
    vcol: Vec<u8>,
    /// Undo logs for backtracking.
    mask_trail: Vec<(u32, u64)>,
    vcol_trail: Vec<u32>,
    /// Positions whose (real or forced) color has not yet been propagated.
    queue: Vec<u32>,
    full_mask: u64,
    deadline: Option<Instant>,
    timed_out: &'a AtomicBool,
    // Index of the leftmost subtree that found a full coloring; later
    // subtrees abort since they cannot win the ordered merge.
    found_at: &'a AtomicUsize,
    my_index: usize,
    stats: SearchStats,
    deepest: u64,
    deepest_witness: Vec<u8>,
    ticks: u64,
}

enum Flow {
    Continue,
    Full(Vec<u8>),
    Abort(SubtreeEnd),
}

impl<'a> Dfs<'a> {
    fn record_depth(&mut self, colors: &[u8], depth: usize) {
        if depth as u64 > self.deepest {
            self.deepest = depth as u64;
            self.deepest_witness = colors[..depth].to_vec();
        }
    }

    fn should_abort(&mut self) -> Option<SubtreeEnd> {
        self.ticks += 1;
        if self.ticks & 0x1fff != 0 {
            return None;
        }
        if self.found_at.load(Ordering::Relaxed) < self.my_index {
            return Some(SubtreeEnd::Skipped);
        }
        if self.timed_out.load(Ordering::Relaxed) {
            return Some(SubtreeEnd::TimedOut);
        }
        if let Some(dl) = self.deadline {
            if Instant::now() >= dl {
                self.timed_out.store(true, Ordering::Relaxed);
                return Some(SubtreeEnd::TimedOut);
            }
        }
        None
    }

    /// Colors position `pos` (0-based) with c and propagates to a fixpoint:
    /// every pair of smaller triple elements now monochromatic forbids that
    /// color at the triple's max, and a position left with a single color is
    /// itself treated as colored, cascading. Returns false when some position
    /// ends up with every color forbidden *and* lies no deeper than the
    /// deepest prefix already recorded: the branch then can neither improve
    /// the record nor reach the cap, so it is dead.
    fn assign(&mut self, pos: usize, c: u8) -> bool {
        if self.vcol[pos] != UNCOLORED {
            // Already forced to this color; its pairs have propagated.
            debug_assert_eq!(self.vcol[pos], c);
            return true;
        }
        self.set_color(pos as u32, c);
        while let Some(p) = self.queue.pop() {
            let pc = self.vcol[p as usize];
            for &(other, z) in self.inc.at(p as usize + 1) {
                if self.vcol[other as usize] == pc && !self.mark(z, pc) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    fn set_color(&mut self, pos: u32, c: u8) {
        self.vcol[pos as usize] = c;
        self.vcol_trail.push(pos);
        self.queue.push(pos);
    }

    #[inline]
    fn mark(&mut self, z: u32, c: u8) -> bool {
        let old = self.forbidden[z as usize];
        let new = old | 1 << c;
        if new == old {
            return true;
        }
        self.mask_trail.push((z, old));
        self.forbidden[z as usize] = new;
        if new == self.full_mask {
            // z is unreachable; the branch tops out at depth z (0-based
            // index = depth of the prefix below it). Dead only if that
            // cannot beat the current record.
            return z as u64 > self.deepest;
        }
        let free = self.full_mask & !new;
        if free.count_ones() == 1 && self.vcol[z as usize] == UNCOLORED {
            self.set_color(z, free.trailing_zeros() as u8);
        }
        true
    }

    fn undo(&mut self, mark: (usize, usize)) {
        while self.mask_trail.len() > mark.0 {
            let (z, old) = self.mask_trail.pop().expect("mask trail entry");
            self.forbidden[z as usize] = old;
        }
        while self.vcol_trail.len() > mark.1 {
            let p = self.vcol_trail.pop().expect("color trail entry");
            self.vcol[p as usize] = UNCOLORED;
        }
    }

    #[inline]
    fn trail_mark(&self) -> (usize, usize) {
        (self.mask_trail.len(), self.vcol_trail.len())
    }

    /// Extends the prefix colors[0..depth]; colors beyond depth are scratch.
    /// `used` counts the distinct colors in the prefix; a fresh color is only
    /// ever the next unused index, so each color-permutation class is visited
    /// exactly once (in particular color(1) = 0).
    fn go(&mut self, colors: &mut Vec<u8>, depth: usize, used: u8) -> Flow {
        if depth == self.cap {
            return Flow::Full(colors.clone());
        }
        if let Some(end) = self.should_abort() {
            return Flow::Abort(end);
        }
        let cmax = (self.r - 1).min(used);
        for c in 0..=cmax {
            self.stats.nodes += 1;
            if self.forbidden[depth] >> c & 1 == 1 {
                self.stats.prunes += 1;
                continue;
            }
            colors[depth] = c;
            let mark = self.trail_mark();
            if self.assign(depth, c) {
                self.record_depth(colors, depth + 1);
                match self.go(colors, depth + 1, used.max(c + 1)) {
                    Flow::Continue => {}
                    other => {
                        self.undo(mark);
                        return other;
                    }
                }
            } else {
                self.stats.prunes += 1;
            }
            self.undo(mark);
        }
        Flow::Continue
    }
}

#[allow(clippy::too_many_arguments)]
fn run_subtree(
    inc: &IncidenceTable,
    cap: usize,
    r: u8,
    prefix: &[u8],
    used: u8,
    deadline: Option<Instant>,
    timed_out: &AtomicBool,
    found_at: &AtomicUsize,
    my_index: usize,
) -> SubtreeResult {
    let mut dfs = Dfs {
        inc,
        cap,
        r,
        forbidden: vec![0; cap],
        vcol: vec![UNCOLORED; cap],
        mask_trail: Vec::new(),
        vcol_trail: Vec::new(),
        queue: Vec::new(),
        full_mask: if r >= 64 { u64::MAX } else { (1u64 << r) - 1 },
        deadline,
        timed_out,
        found_at,
        my_index,
        stats: SearchStats::default(),
        deepest: 0,
        deepest_witness: Vec::new(),
        ticks: 0,
    };
    let mut colors = vec![0u8; cap];
    colors[..prefix.len()].copy_from_slice(prefix);
    // Replay the prefix to seed the masks and forced colors. The prefix is
    // triple-free, so it always agrees with any color propagation forced
    // ahead of the replay; it may still doom a later position outright.
    let mut viable = true;
    for (i, &c) in prefix.iter().enumerate() {
        debug_assert!(dfs.vcol[i] == UNCOLORED || dfs.vcol[i] == c);
        if !dfs.assign(i, c) {
            viable = false;
            break;
        }
    }
    let end = if !viable {
        SubtreeEnd::Exhausted
    } else {
        match dfs.go(&mut colors, prefix.len(), used) {
            Flow::Continue => SubtreeEnd::Exhausted,
            Flow::Full(full) => {
                found_at.fetch_min(my_index, Ordering::Relaxed);
                SubtreeEnd::FoundFull(full)
            }
            Flow::Abort(end) => end,
        }
    };
    SubtreeResult {
        end,
        deepest: dfs.deepest,
        deepest_witness: dfs.deepest_witness,
        stats: dfs.stats,
    }
}

/// Enumerates the symmetry-broken triple-free prefixes of length `depth`,
/// in DFS (lexicographic) order. Also records the deepest prefix among
/// branches that die before the frontier.
fn frontier(
    table: &PairTable,
    r: u8,
    depth: usize,
    stats: &mut SearchStats,
    deepest: &mut u64,
    deepest_witness: &mut Vec<u8>,
) -> Vec<(Vec<u8>, u8)> {
    let mut out = Vec::new();
    let mut colors = vec![0u8; depth];
    fn rec(
        table: &PairTable,
        r: u8,
        depth: usize,
        colors: &mut Vec<u8>,
        level: usize,
        used: u8,
        stats: &mut SearchStats,
        deepest: &mut u64,
        deepest_witness: &mut Vec<u8>,
        out: &mut Vec<(Vec<u8>, u8)>,
    ) {
        if level == depth {
            out.push((colors.clone(), used));
            return;
        }
        let cmax = (r - 1).min(used);
        for c in 0..=cmax {
            stats.nodes += 1;
            if allowed(colors, table, level + 1, c) {
                colors[level] = c;
                if (level + 1) as u64 > *deepest {
                    *deepest = (level + 1) as u64;
                    *deepest_witness = colors[..level + 1].to_vec();
                }
                rec(
                    table,
                    r,
                    depth,
                    colors,
                    level + 1,
                    used.max(c + 1),
                    stats,
                    deepest,
                    deepest_witness,
                    out,
                );
            } else {
                stats.prunes += 1;
            }
        }
    }
    rec(
        table, r, depth, &mut colors, 0, 0, stats, deepest, deepest_witness, &mut out,
    );
    out
}

fn witness_certificate(params: ABParams, colors: Vec<u8>, note: &str) -> Certificate {
    Certificate {
        a: params.a,
        b: params.b,
        r: params.r,
        kind: CertKind::LowerBoundWitness,
        n: colors.len() as u64,
        colors,
        meta: format!("{note}; engine v{ENGINE_VERSION}"),
    }
}

/// Computes N(a,b;r) exactly by exhaustive search up to `cap`, or reports a
/// lower bound at the cap, or non-existence for b = 2a. Deterministic for a
/// given (params, config) regardless of thread count.
pub fn compute_n(params: ABParams, config: SearchConfig) -> Result<SearchOutcome> {
    compute_n_with_stats(params, config).map(|(o, _)| o)
}

pub fn compute_n_with_stats(
    params: ABParams,
    config: SearchConfig,
) -> Result<(SearchOutcome, SearchStats)> {
    if let Some(reason) = detect_dne(params) {
        return Ok((SearchOutcome::NonExistent { reason }, SearchStats::default()));
    }
    if config.cap < params.b + 2 {
        return Err(Error::InvalidParams(format!(
            "cap {} is below the smallest possible triple maximum {}",
            config.cap,
            params.b + 2
        )));
    }
    if params.r > 64 {
        return Err(Error::InvalidParams(format!(
            "the search engine supports at most 64 colors, got r = {}",
            params.r
        )));
    }
    let cap = config.cap;
    let (table, inc) = build_tables(params, cap)?;
    let r = params.r as u8;

    let mut stats = SearchStats::default();
    let mut deepest = 0u64;
    let mut deepest_witness = Vec::new();
    let split = config.frontier_depth.min(cap.saturating_sub(1)) as usize;
    let prefixes = frontier(&table, r, split, &mut stats, &mut deepest, &mut deepest_witness);
    stats.subtrees = prefixes.len() as u64;

    let timed_out = AtomicBool::new(false);
    let found_at = AtomicUsize::new(usize::MAX);
    let results: Vec<SubtreeResult> = prefixes
        .par_iter()
        .enumerate()
        .map(|(i, (prefix, max_used))| {
            run_subtree(
                &inc,
                cap as usize,
                r,
                prefix,
                *max_used,
                config.deadline,
                &timed_out,
                &found_at,
                i,
            )
        })
        .collect();

    let mut any_timeout = false;
    for res in &results {
        stats.nodes += res.stats.nodes;
        stats.prunes += res.stats.prunes;
        if res.deepest > deepest {
            deepest = res.deepest;
            deepest_witness = res.deepest_witness.clone();
        }
        if matches!(res.end, SubtreeEnd::TimedOut) {
            any_timeout = true;
        }
    }
    stats.max_depth = deepest;

    // Ordered merge: the leftmost full coloring wins, matching what a
    // single-threaded DFS would find first.
    for res in &results {
        if let SubtreeEnd::FoundFull(full) = &res.end {
            let witness =
                witness_certificate(params, full.clone(), "triple-free coloring found by search");
            debug_assert!(verify_certificate(&witness).is_valid());
            return Ok((SearchOutcome::LowerBound { cap, witness }, stats));
        }
    }

    let witness = witness_certificate(params, deepest_witness, "deepest triple-free prefix");
    debug_assert!(verify_certificate(&witness).is_valid());
    if any_timeout {
        return Ok((
            SearchOutcome::Inconclusive {
                best: deepest,
                witness,
            },
            stats,
        ));
    }
    Ok((
        SearchOutcome::Exact {
            n: deepest + 1,
            witness,
        },
        stats,
    ))
}

/// Observational statistics for one search run; the outcome is unchanged.
pub fn search_strategy_report(params: ABParams, config: SearchConfig) -> Result<SearchStats> {
    compute_n_with_stats(params, config).map(|(_, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: u64, b: u64, r: u64, cap: u64) -> u64 {
        let params = ABParams::new(a, b, r).unwrap();
        match compute_n(params, SearchConfig { cap, ..Default::default() }).unwrap() {
            SearchOutcome::Exact { n, witness } => {
                assert!(verify_certificate(&witness).is_valid());
                assert_eq!(witness.n, n - 1);
                n
            }
            other => panic!("expected exact result, got {other:?}"),
        }
    }

    #[test]
    fn classical_w32() {
        assert_eq!(exact(1, 1, 2, 100), 9);
    }

    #[test]
    fn one_color_is_first_forced_triple() {
        // With one color, {1, a+1, b+2} appears as soon as b+2 does.
        for &(a, b) in &[(1, 1), (1, 3), (2, 4), (3, 5)] {
            assert_eq!(exact(a, b, 1, b + 10), b + 2);
        }
    }

    #[test]
    fn small_table_values() {
        assert_eq!(exact(2, 2, 2, 100), 16);
        assert_eq!(exact(4, 4, 2, 100), 40);
    }

    #[test]
    fn dne_detection() {
        for &(a, b) in &[(1, 2), (2, 4), (3, 6)] {
            let params = ABParams::new(a, b, 2).unwrap();
            assert!(matches!(
                compute_n(params, SearchConfig::default()).unwrap(),
                SearchOutcome::NonExistent { reason: DneReason::BEquals2A }
            ));
            assert!(detect_dne(params).is_some());
        }
        assert!(detect_dne(ABParams::new(2, 3, 2).unwrap()).is_none());
        // r = 1 never hits the dne branch.
        assert!(detect_dne(ABParams::new(1, 2, 1).unwrap()).is_none());
    }

    #[test]
    fn lower_bound_at_cap() {
        let params = ABParams::new(2, 2, 2).unwrap();
        let out = compute_n(params, SearchConfig { cap: 15, ..Default::default() }).unwrap();
        match out {
            SearchOutcome::LowerBound { cap, witness } => {
                assert_eq!(cap, 15);
                assert_eq!(witness.n, 15);
                assert!(verify_certificate(&witness).is_valid());
            }
            other => panic!("expected lower bound, got {other:?}"),
        }
    }

    #[test]
    fn cap_below_minimum_rejected() {
        let params = ABParams::new(1, 5, 2).unwrap();
        assert!(compute_n(params, SearchConfig { cap: 3, ..Default::default() }).is_err());
    }

    #[test]
    fn stats_are_populated() {
        let params = ABParams::new(1, 1, 2).unwrap();
        let stats = search_strategy_report(params, SearchConfig { cap: 100, ..Default::default() })
            .unwrap();
        assert!(stats.nodes > 0);
        assert_eq!(stats.max_depth, 8);
    }

    #[test]
    fn deterministic_across_frontier_depths() {
        let params = ABParams::new(2, 2, 2).unwrap();
        let mut outcomes = Vec::new();
        for fd in [0, 4, 12, 20] {
            let out = compute_n(
                params,
                SearchConfig { cap: 100, frontier_depth: fd, deadline: None },
            )
            .unwrap();
            match out {
                SearchOutcome::Exact { n, witness } => outcomes.push((n, witness.colors)),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert!(outcomes.windows(2).all(|w| w[0] == w[1]));
    }
}
