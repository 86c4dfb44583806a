//! Two-color forcing propagation.
//!
//! The single rule: if two elements of an (a,b)-triple inside [1,n] share a
//! color and the third is uncolored, the third is forced to the other color.
//! A contradiction is a triple that becomes monochromatic. Chaining this
//! rule from a small set of assumed colors, with limited branching where
//! propagation stalls, exhausts all cases and proves concrete-instance
//! upper bounds on N(a,a;2).
//!
//! Every contradiction is emitted as a replayable trace: the derivation log
//! plus the final monochromatic triple, checkable with no propagation
//! machinery at all.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::triples::{enumerate_triples, make_triple, ABParams, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }

    fn from_letter(s: &str) -> Option<Color> {
        match s {
            "R" => Some(Color::Red),
            "B" => Some(Color::Blue),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Assumption,
    /// The triple whose other two elements shared the opposite color.
    Forced(Triple),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub element: u64,
    pub color: Color,
    pub justification: Justification,
}

/// A derivation log ending in a monochromatic triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingTrace {
    pub a: u64,
    pub b: u64,
    pub n: u64,
    pub steps: Vec<TraceStep>,
    pub contradiction: Triple,
}

/// Partial 2-coloring of [1,n] with the derivation log that produced it.
#[derive(Debug, Clone)]
pub struct ForcingState {
    params: ABParams,
    n: u64,
    colors: Vec<Option<Color>>,
    log: Vec<TraceStep>,
    // Triples of [1,n] and, per element, the indices of incident triples.
    triples: std::sync::Arc<TripleIndex>,
    queue: VecDeque<u64>,
}

#[derive(Debug)]
struct TripleIndex {
    triples: Vec<Triple>,
    incident: Vec<Vec<u32>>,
}

impl TripleIndex {
    fn build(params: ABParams, n: u64) -> Self {
        let triples = enumerate_triples(params, n);
        let mut incident = vec![Vec::new(); n as usize + 1];
        for (i, t) in triples.iter().enumerate() {
            for &e in &t.elements {
                incident[e as usize].push(i as u32);
            }
        }
        Self { triples, incident }
    }
}

#[derive(Debug, Clone)]
pub enum ForcingVerdict {
    /// Propagation derived a monochromatic triple.
    Contradiction(ForcingTrace),
    /// Propagation reached a fixpoint with no contradiction.
    Fixpoint(ForcingState),
    /// Every branch of a case exhaustion contradicts; the traces cover all
    /// branches.
    Exhausted { traces: Vec<ForcingTrace> },
}

impl ForcingState {
    pub fn new(params: ABParams, n: u64) -> Result<Self> {
        if params.r != 2 {
            return Err(Error::InvalidParams(
                "forcing propagation is specific to two colors".into(),
            ));
        }
        Ok(Self {
            params,
            n,
            colors: vec![None; n as usize + 1],
            log: Vec::new(),
            triples: std::sync::Arc::new(TripleIndex::build(params, n)),
            queue: VecDeque::new(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn color_of(&self, element: u64) -> Option<Color> {
        self.colors[element as usize]
    }

    pub fn log(&self) -> &[TraceStep] {
        &self.log
    }

    pub fn unknown_count(&self) -> usize {
        self.colors[1..].iter().filter(|c| c.is_none()).count()
    }

    /// Records an assumed color. Assuming an already-colored element is an
    /// error; callers branch only on unknowns.
    pub fn assume(&mut self, element: u64, color: Color) -> Result<()> {
        if element < 1 || element > self.n {
            return Err(Error::InvalidParams(format!(
                "element {element} outside [1,{}]",
                self.n
            )));
        }
        if self.colors[element as usize].is_some() {
            return Err(Error::InvalidParams(format!(
                "element {element} already colored"
            )));
        }
        self.colors[element as usize] = Some(color);
        self.log.push(TraceStep {
            element,
            color,
            justification: Justification::Assumption,
        });
        self.queue.push_back(element);
        Ok(())
    }

    fn trace(&self, contradiction: Triple) -> ForcingTrace {
        ForcingTrace {
            a: self.params.a,
            b: self.params.b,
            n: self.n,
            steps: self.log.clone(),
            contradiction,
        }
    }

    /// Applies the forcing rule to fixpoint. Returns the contradiction
    /// trace if a triple becomes monochromatic.
    pub fn propagate(&mut self) -> Option<ForcingTrace> {
        let index = self.triples.clone();
        while let Some(e) = self.queue.pop_front() {
            for &ti in &index.incident[e as usize] {
                let t = index.triples[ti as usize];
                let cs = [
                    self.colors[t.elements[0] as usize],
                    self.colors[t.elements[1] as usize],
                    self.colors[t.elements[2] as usize],
                ];
                let colored = cs.iter().flatten().count();
                if colored < 2 {
                    continue;
                }
                if colored == 3 {
                    if cs[0] == cs[1] && cs[1] == cs[2] {
                        return Some(self.trace(t));
                    }
                    continue;
                }
                // Exactly two colored: force the third if the two agree.
                let (i, j, u) = match cs {
                    [Some(_), Some(_), None] => (0, 1, 2),
                    [Some(_), None, Some(_)] => (0, 2, 1),
                    [None, Some(_), Some(_)] => (1, 2, 0),
                    _ => unreachable!(),
                };
                if cs[i] == cs[j] {
                    let forced = cs[i].unwrap().other();
                    let target = t.elements[u];
                    self.colors[target as usize] = Some(forced);
                    self.log.push(TraceStep {
                        element: target,
                        color: forced,
                        justification: Justification::Forced(t),
                    });
                    self.queue.push_back(target);
                }
            }
        }
        None
    }

    /// Branch heuristic: the uncolored element incident to the most
    /// two-colored triples, least index on ties. The paper branches on the
    /// element 2 in its subcases; this generalizes that choice.
    fn branch_element(&self) -> Option<u64> {
        let index = &self.triples;
        let mut best: Option<(usize, u64)> = None;
        for e in 1..=self.n {
            if self.colors[e as usize].is_some() {
                continue;
            }
            let score = index.incident[e as usize]
                .iter()
                .filter(|&&ti| {
                    let t = index.triples[ti as usize];
                    t.elements
                        .iter()
                        .filter(|&&v| self.colors[v as usize].is_some())
                        .count()
                        == 2
                })
                .count();
            match best {
                Some((s, _)) if s >= score => {}
                _ => best = Some((score, e)),
            }
        }
        best.map(|(_, e)| e)
    }
}

/// Outcome of `propagate` as a standalone operation.
pub fn propagate(mut state: ForcingState) -> ForcingVerdict {
    match state.propagate() {
        Some(trace) => ForcingVerdict::Contradiction(trace),
        None => ForcingVerdict::Fixpoint(state),
    }
}

fn explore(
    state: ForcingState,
    branch_depth: u32,
    traces: &mut Vec<ForcingTrace>,
) -> std::result::Result<(), ForcingState> {
    let mut state = state;
    if let Some(trace) = state.propagate() {
        traces.push(trace);
        return Ok(());
    }
    if state.unknown_count() == 0 {
        // Fully colored with no contradiction: a genuine counterexample to
        // the claimed bound; report the stall.
        return Err(state);
    }
    if branch_depth == 0 {
        return Err(state);
    }
    let e = state.branch_element().expect("unknown element exists");
    for color in [Color::Red, Color::Blue] {
        let mut branch = state.clone();
        branch.assume(e, color).expect("branch element is unknown");
        explore(branch, branch_depth - 1, traces)?;
    }
    Ok(())
}

/// Case exhaustion proving N(a,a;2) <= M for a concrete a: fix color(1) =
/// red, enumerate all 2-colorings of `key_set`, propagate each to
/// contradiction, branching on up to `branch_depth` further elements where
/// propagation stalls. `Exhausted` means every branch contradicts; a
/// `Fixpoint` reports the first stalled state and is inconclusive, not
/// unsound.
pub fn prove_upper_bound(
    a: u64,
    m: u64,
    key_set: &[u64],
    branch_depth: u32,
) -> Result<ForcingVerdict> {
    if a < 2 {
        return Err(Error::InvalidParams("need a >= 2".into()));
    }
    let params = ABParams::new(a, a, 2)?;
    for &e in key_set {
        if e < 2 || e > m {
            return Err(Error::InvalidParams(format!(
                "key element {e} outside [2,{m}]"
            )));
        }
    }
    let base = ForcingState::new(params, m)?;
    let mut traces = Vec::new();
    for mask in 0..(1u64 << key_set.len()) {
        let mut state = base.clone();
        state.assume(1, Color::Red)?;
        for (i, &e) in key_set.iter().enumerate() {
            let color = if mask >> i & 1 == 0 { Color::Red } else { Color::Blue };
            state.assume(e, color)?;
        }
        if let Err(stalled) = explore(state, branch_depth, &mut traces) {
            return Ok(ForcingVerdict::Fixpoint(stalled));
        }
    }
    Ok(ForcingVerdict::Exhausted { traces })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayError {
    /// Index of the first bad step; steps.len() marks a bad contradiction.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.reason)
    }
}

/// Independent proof check: replays every derivation against the partial
/// coloring built so far and confirms the final triple is monochromatic.
/// Uses no propagation machinery.
pub fn replay_trace(
    trace: &ForcingTrace,
    params: ABParams,
    n: u64,
) -> std::result::Result<(), ReplayError> {
    let bad = |step: usize, reason: String| Err(ReplayError { step, reason });
    if trace.a != params.a || trace.b != params.b || trace.n != n {
        return bad(0, "trace header does not match instance".into());
    }
    let mut colors: Vec<Option<Color>> = vec![None; n as usize + 1];
    for (i, step) in trace.steps.iter().enumerate() {
        if step.element < 1 || step.element > n {
            return bad(i, format!("element {} outside [1,{n}]", step.element));
        }
        if colors[step.element as usize].is_some() {
            return bad(i, format!("element {} colored twice", step.element));
        }
        if let Justification::Forced(t) = &step.justification {
            let rebuilt = make_triple(params, t.x, t.d)
                .map_err(|e| ReplayError { step: i, reason: e.to_string() })?;
            if rebuilt != *t {
                return bad(i, "justifying triple is not an (a,b)-triple".into());
            }
            if t.elements[2] > n {
                return bad(i, "justifying triple extends beyond [1,n]".into());
            }
            if !t.contains(step.element) {
                return bad(i, "derived element not in its justifying triple".into());
            }
            let others: Vec<Color> = t
                .elements
                .iter()
                .filter(|&&e| e != step.element)
                .map(|&e| colors[e as usize])
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ReplayError {
                    step: i,
                    reason: "justifying triple has uncolored elements".into(),
                })?;
            if others.len() != 2 || others[0] != others[1] || others[0] != step.color.other() {
                return bad(
                    i,
                    "other two elements do not share the opposite color".into(),
                );
            }
        }
        colors[step.element as usize] = Some(step.color);
    }
    let t = &trace.contradiction;
    let last = trace.steps.len();
    let rebuilt = make_triple(params, t.x, t.d)
        .map_err(|e| ReplayError { step: last, reason: e.to_string() })?;
    if rebuilt != *t || t.elements[2] > n {
        return bad(last, "contradiction triple invalid for this instance".into());
    }
    let cs: Vec<Option<Color>> = t.elements.iter().map(|&e| colors[e as usize]).collect();
    match (cs[0], cs[1], cs[2]) {
        (Some(x), Some(y), Some(z)) if x == y && y == z => Ok(()),
        _ => bad(last, "contradiction triple is not monochromatic".into()),
    }
}

// Line-oriented text export: one derivation per line,
// "element color <= triple(x,d)" or "element color <= assumption", then a
// final "contradiction triple(x,d)" line. Stable for diffing.
impl fmt::Display for ForcingTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance a={} b={} n={}", self.a, self.b, self.n)?;
        for step in &self.steps {
            match &step.justification {
                Justification::Assumption => {
                    writeln!(f, "{} {} <= assumption", step.element, step.color.letter())?
                }
                Justification::Forced(t) => writeln!(
                    f,
                    "{} {} <= triple({},{})",
                    step.element,
                    step.color.letter(),
                    t.x,
                    t.d
                )?,
            }
        }
        writeln!(
            f,
            "contradiction triple({},{})",
            self.contradiction.x, self.contradiction.d
        )
    }
}

fn parse_xd(token: &str) -> Option<(u64, u64)> {
    let inner = token.strip_prefix("triple(")?.strip_suffix(')')?;
    let (x, d) = inner.split_once(',')?;
    Some((x.trim().parse().ok()?, d.trim().parse().ok()?))
}

impl ForcingTrace {
    /// Parses the line-oriented export format back into a trace.
    pub fn from_text(text: &str) -> Result<Self> {
        let malformed = |line: &str| Error::InvalidParams(format!("malformed trace line: {line}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| malformed("<empty>"))?;
        let mut a = None;
        let mut b = None;
        let mut n = None;
        for field in header.trim().strip_prefix("instance ").ok_or_else(|| malformed(header))?.split_whitespace() {
            match field.split_once('=') {
                Some(("a", v)) => a = v.parse().ok(),
                Some(("b", v)) => b = v.parse().ok(),
                Some(("n", v)) => n = v.parse().ok(),
                _ => return Err(malformed(header)),
            }
        }
        let (a, b, n) = match (a, b, n) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => return Err(malformed(header)),
        };
        let params = ABParams::new(a, b, 2)?;
        let mut steps = Vec::new();
        let mut contradiction = None;
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["contradiction", t] => {
                    let (x, d) = parse_xd(t).ok_or_else(|| malformed(line))?;
                    contradiction = Some(make_triple(params, x, d)?);
                }
                [elem, color, "<=", just] => {
                    let element = elem.parse().map_err(|_| malformed(line))?;
                    let color = Color::from_letter(color).ok_or_else(|| malformed(line))?;
                    let justification = if *just == "assumption" {
                        Justification::Assumption
                    } else {
                        let (x, d) = parse_xd(just).ok_or_else(|| malformed(line))?;
                        Justification::Forced(make_triple(params, x, d)?)
                    };
                    steps.push(TraceStep { element, color, justification });
                }
                _ => return Err(malformed(line)),
            }
        }
        let contradiction = contradiction
            .ok_or_else(|| Error::InvalidParams("trace has no contradiction line".into()))?;
        Ok(ForcingTrace { a, b, n, steps, contradiction })
    }
}
