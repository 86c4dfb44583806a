//! Closed-form bound evaluators and the degree-of-regularity summary.
//!
//! Every formula is evaluated in checked 64-bit integer arithmetic. The
//! inequalities involving sqrt(2) (applicability of the logarithmic
//! coloring, and ceil(log_sqrt2 c)) are decided by squaring both sides,
//! never by floating point.

use crate::checker::progression_threshold_k;
use crate::error::{Error, Result};
use crate::triples::ABParams;

fn ck_mul(x: u64, y: u64) -> Result<u64> {
    x.checked_mul(y).ok_or(Error::Overflow)
}

fn ck_add(x: u64, y: u64) -> Result<u64> {
    x.checked_add(y).ok_or(Error::Overflow)
}

fn ck_sub(x: u64, y: u64) -> Result<u64> {
    x.checked_sub(y).ok_or(Error::Overflow)
}

fn ck_pow(b: u64, e: u32) -> Result<u64> {
    b.checked_pow(e).ok_or(Error::Overflow)
}

/// General existence upper bound:
/// 4a(b^3+b^2-3b-3)+2b^3+6b^2+6b for b > 2a, 4a(b^3+2b^2+2b)-4b^2 for
/// b < 2a (the case b = a included). Note the statement's 6b^2 term; the
/// proof works with 4b^2, and the evaluator follows the statement.
pub fn upper_thm21(a: u64, b: u64) -> Result<u64> {
    ABParams::new(a, b, 2)?;
    if b == 2 * a {
        return Err(Error::Inapplicable("b = 2a: no finite N(a,b;2)".into()));
    }
    let b2 = ck_mul(b, b)?;
    let b3 = ck_mul(b2, b)?;
    if b > 2 * a {
        // 4a(b^3 + b^2 - 3b - 3) + 2b^3 + 6b^2 + 6b
        let inner = ck_sub(ck_add(b3, b2)?, ck_add(ck_mul(3, b)?, 3)?)?;
        ck_add(
            ck_mul(4 * a, inner)?,
            ck_add(ck_mul(2, b3)?, ck_add(ck_mul(6, b2)?, ck_mul(6, b)?)?)?,
        )
    } else {
        // 4a(b^3 + 2b^2 + 2b) - 4b^2
        let inner = ck_add(b3, ck_add(ck_mul(2, b2)?, ck_mul(2, b)?)?)?;
        ck_sub(ck_mul(4 * a, inner)?, ck_mul(4, b2)?)
    }
}

/// Diagonal upper bound: 3a^2+a for even a >= 4, 8a^2+a for odd a.
pub fn upper_thm22(a: u64) -> Result<u64> {
    if a % 2 == 0 {
        if a < 4 {
            return Err(Error::Inapplicable(format!("even branch needs a >= 4, got {a}")));
        }
        ck_add(ck_mul(3, ck_mul(a, a)?)?, a)
    } else {
        ck_add(ck_mul(8, ck_mul(a, a)?)?, a)
    }
}

/// f(x) = slope*x + intercept, the affine difference-threshold function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineFunction {
    pub slope: u64,
    pub intercept: i64,
}

impl AffineFunction {
    pub fn eval(&self, x: u64) -> Result<i64> {
        let sx = i64::try_from(ck_mul(self.slope, x)?).map_err(|_| Error::Overflow)?;
        sx.checked_add(self.intercept).ok_or(Error::Overflow)
    }

    fn eval_pos(&self, x: u64) -> Result<u64> {
        let v = self.eval(x)?;
        u64::try_from(v).map_err(|_| Error::InvalidParams(format!("f({x}) = {v} is not positive")))
    }

    /// f maps N into N with f(n) >= n for all n: for affine f this holds
    /// exactly when slope >= 1 and f(1) >= 1.
    fn dominates_identity(&self) -> bool {
        self.slope >= 1 && self.eval(1).map(|v| v >= 1).unwrap_or(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WF3Bounds {
    /// Present only when f(n) >= n for all n, the lower-bound precondition.
    pub lower: Option<u64>,
    pub upper: u64,
}

/// Ramsey bounds for 3-term progressions with difference d >= f(a):
/// upper = ceil(4f(b + 4*ceil(f(b)/2)) + 14*ceil(f(b)/2) + 7b/2 - 13/2)
/// with b = 1 + 4*ceil(f(1)/2); lower = 8f(h)+2h+2-c with h = 2f(1)+1 and
/// c the largest integer with f(c)+c <= 4f(h)+h+1.
pub fn w_f3_bounds(f: AffineFunction) -> Result<WF3Bounds> {
    let f1 = f.eval_pos(1)?;
    // b = 1 + 4*ceil(f(1)/2) is always odd, so 7b/2 - 13/2 is an integer
    // and no rounding ever happens.
    let b = ck_add(1, ck_mul(4, f1.div_ceil(2))?)?;
    let fb_half = f.eval_pos(b)?.div_ceil(2);
    let x = ck_add(b, ck_mul(4, fb_half)?)?;
    let upper = ck_add(
        ck_add(ck_mul(4, f.eval_pos(x)?)?, ck_mul(14, fb_half)?)?,
        (ck_sub(ck_mul(7, b)?, 13)?) / 2,
    )?;

    let lower = if f.dominates_identity() {
        let h = ck_add(ck_mul(2, f1)?, 1)?;
        let fh = f.eval_pos(h)?;
        let budget = ck_add(ck_mul(4, fh)?, ck_add(h, 1)?)?; // f(c) + c <= budget
        // c = floor((budget - intercept) / (slope + 1)), exact integer search
        // collapsed to a division for affine f.
        let num = i64::try_from(budget).map_err(|_| Error::Overflow)?
            .checked_sub(f.intercept)
            .ok_or(Error::Overflow)?;
        let c = u64::try_from(num).map_err(|_| Error::Overflow)? / (f.slope + 1);
        debug_assert!(f.eval_pos(c)? + c <= budget && f.eval_pos(c + 1)? + c + 1 > budget);
        Some(ck_sub(ck_add(ck_mul(8, fh)?, ck_add(ck_mul(2, h)?, 2)?)?, c)?)
    } else {
        None
    };
    Ok(WF3Bounds { lower, upper })
}

/// Corollary closed forms for N(a,2a-1;2), a >= 2.
pub fn cor21_lower(a: u64) -> Result<u64> {
    if a < 2 {
        return Err(Error::Inapplicable("need a >= 2".into()));
    }
    ck_sub(ck_mul(16, ck_mul(a, a)?)?, ck_sub(ck_mul(12, a)?, 6)?)
}

pub fn cor21_upper(a: u64) -> Result<u64> {
    if a < 2 {
        return Err(Error::Inapplicable("need a >= 2".into()));
    }
    let a2 = ck_mul(a, a)?;
    let a3 = ck_mul(a2, a)?;
    if a % 2 == 0 {
        // 16a^3 - 2a^2 + 4a - 3
        ck_sub(ck_add(ck_mul(16, a3)?, ck_mul(4, a)?)?, ck_add(ck_mul(2, a2)?, 3)?)
    } else {
        // 16a^3 + 14a^2 + 2a - 3
        ck_sub(
            ck_add(ck_mul(16, a3)?, ck_add(ck_mul(14, a2)?, ck_mul(2, a)?)?)?,
            3,
        )
    }
}

/// Block-coloring lower bound: 2b^2+5b-(2a-4) for b >= 2a,
/// 3b^2-(2a-5)b-(2a-4) for b < 2a.
pub fn lower_thm24(a: u64, b: u64) -> Result<u64> {
    ABParams::new(a, b, 2)?;
    if b == 2 * a {
        return Err(Error::Inapplicable("b = 2a".into()));
    }
    let b2 = ck_mul(b, b)?;
    if b >= 2 * a {
        ck_sub(ck_add(ck_mul(2, b2)?, ck_add(ck_mul(5, b)?, 4)?)?, ck_mul(2, a)?)
    } else {
        ck_sub(
            ck_add(ck_mul(3, b2)?, ck_add(ck_mul(5, b)?, 4)?)?,
            ck_add(ck_mul(ck_mul(2, a)?, b)?, ck_mul(2, a)?)?,
        )
    }
}

/// Refined a=1 lower bound: 2b^2+5b+6 for b >= 3.
pub fn lower_thm25(b: u64) -> Result<u64> {
    if b < 3 {
        return Err(Error::Inapplicable(format!("need b >= 3, got {b}")));
    }
    ck_add(ck_mul(2, ck_mul(b, b)?)?, ck_add(ck_mul(5, b)?, 6)?)
}

fn pow_sum(b: u64, upto: i64) -> Result<u64> {
    let mut total: u64 = 0;
    let mut i: i64 = 0;
    while i <= upto {
        total = ck_add(total, ck_pow(b, i as u32)?)?;
        i += 1;
    }
    Ok(total)
}

/// r-color recursive lower bound, b != 2a:
/// 2b^r+5b^(r-1)-(2a-4)b^(r-2)+sum_{i=0}^{r-3} b^i for b >= 2a,
/// 3b^r-(2a-5)b^(r-1)-(2a-4)b^(r-2)+2*sum_{i=0}^{r-3} b^i for b < 2a.
pub fn lower_prop31(a: u64, b: u64, r: u64) -> Result<u64> {
    ABParams::new(a, b, 2)?;
    if r < 2 {
        return Err(Error::Inapplicable("need r >= 2".into()));
    }
    if b == 2 * a {
        return Err(Error::Inapplicable("b = 2a".into()));
    }
    let ri = r as i64;
    let p = |i: i64| -> Result<u64> {
        if i < 0 { Ok(0) } else { ck_pow(b, i as u32) }
    };
    if b >= 2 * a {
        ck_sub(
            ck_add(
                ck_add(ck_mul(2, p(ri)?)?, ck_mul(5, p(ri - 1)?)?)?,
                ck_add(ck_mul(4, p(ri - 2)?)?, pow_sum(b, ri - 3)?)?,
            )?,
            ck_mul(2 * a, p(ri - 2)?)?,
        )
    } else {
        ck_sub(
            ck_add(
                ck_add(ck_mul(3, p(ri)?)?, ck_mul(5, p(ri - 1)?)?)?,
                ck_add(ck_mul(4, p(ri - 2)?)?, ck_mul(2, pow_sum(b, ri - 3)?)?)?,
            )?,
            ck_add(ck_mul(2 * a, p(ri - 1)?)?, ck_mul(2 * a, p(ri - 2)?)?)?,
        )
    }
}

/// r-color a=1 lower bound: 2b^r+5b^(r-1)+6b^(r-2)+2*sum_{i=0}^{r-3} b^i.
pub fn lower_prop32(b: u64, r: u64) -> Result<u64> {
    if b < 2 || r < 2 {
        return Err(Error::Inapplicable("need b >= 2 and r >= 2".into()));
    }
    let ri = r as i64;
    let p = |i: i64| -> Result<u64> {
        if i < 0 { Ok(0) } else { ck_pow(b, i as u32) }
    };
    ck_add(
        ck_add(ck_mul(2, p(ri)?)?, ck_mul(5, p(ri - 1)?)?)?,
        ck_add(ck_mul(6, p(ri - 2)?)?, ck_mul(2, pow_sum(b, ri - 3)?)?)?,
    )
}

/// The recursive bound matching the block construction actually built for
/// (a,b): the refined a=1 family when it applies, otherwise the general one.
pub fn recursive_lower(a: u64, b: u64, r: u64) -> Result<u64> {
    if a == 1 && b >= 3 {
        lower_prop32(b, r)
    } else {
        lower_prop31(a, b, r)
    }
}

/// dor(a,b) <= ceil(log_sqrt2 ceil(b/a)) when a < b and
/// b >= (2^(3/2)-1)a + 2 - 2^(3/2). The applicability test rearranges to
/// b+a-2 >= 2*sqrt(2)*(a-1), decided by comparing squares; the ceiling log
/// is the least t with 2^t >= c^2.
pub fn dor_upper_thm31(a: u64, b: u64) -> Option<u64> {
    if a >= b {
        return None;
    }
    let lhs = b + a - 2; // a >= 1, b >= 2 here
    if lhs * lhs < 8 * (a - 1) * (a - 1) {
        return None;
    }
    let c = b.div_ceil(a);
    let c2 = c * c;
    let mut t = 0u64;
    while 1u64 << t < c2 {
        t += 1;
    }
    Some(t)
}

/// dor_k(a) <= 3 once k reaches the power-interval coloring's threshold.
pub fn dor_k_upper(a: u64, k: u64) -> Result<Option<u64>> {
    if a < 2 {
        return Err(Error::Inapplicable(
            "a = 1 is van der Waerden: no bound on dor_k(1)".into(),
        ));
    }
    Ok((k >= progression_threshold_k(a)).then_some(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DorSource {
    Thm21,
    Thm31,
    Thm32,
    VanDerWaerden,
}

impl std::fmt::Display for DorSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DorSource::Thm21 => write!(f, "Theorem 2.1"),
            DorSource::Thm31 => write!(f, "Theorem 3.1"),
            DorSource::Thm32 => write!(f, "Theorem 3.2"),
            DorSource::VanDerWaerden => write!(f, "van der Waerden's Theorem"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DorValue {
    ExactlyOne,
    Infinite,
    /// dor in [2, hi]; hi absent when no upper bound is known.
    Range { hi: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DorRow {
    pub a: u64,
    pub b: u64,
    pub value: DorValue,
    pub source: Option<DorSource>,
}

impl std::fmt::Display for DorRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let value = match self.value {
            DorValue::ExactlyOne => "1".to_string(),
            DorValue::Infinite => "inf".to_string(),
            DorValue::Range { hi: Some(2) } => "2".to_string(),
            DorValue::Range { hi: Some(hi) } => format!("2-{hi}"),
            DorValue::Range { hi: None } => "2-?".to_string(),
        };
        let source = self
            .source
            .map(|s| s.to_string())
            .unwrap_or_else(|| "open".to_string());
        write!(f, "({},{}) {} {}", self.a, self.b, value, source)
    }
}

/// Split-interval colorings proved for specific pairs: (a, b) -> dor bound.
const THM32_SPECIALS: &[(u64, u64, u64)] = &[
    (1, 3, 3),
    (2, 2, 5),
    (2, 5, 3),
    (2, 6, 3),
    (3, 3, 5),
    (3, 4, 5),
    (3, 8, 3),
    (3, 9, 3),
];

/// One row of the dor(a,b) summary: exactly 1 when b = 2a, infinite for
/// (1,1), otherwise the range [2, U] with U the best applicable upper bound.
pub fn dor_summary(a: u64, b: u64) -> Result<DorRow> {
    ABParams::new(a, b, 2)?;
    if (a, b) == (1, 1) {
        return Ok(DorRow {
            a,
            b,
            value: DorValue::Infinite,
            source: Some(DorSource::VanDerWaerden),
        });
    }
    if b == 2 * a {
        return Ok(DorRow {
            a,
            b,
            value: DorValue::ExactlyOne,
            source: Some(DorSource::Thm21),
        });
    }
    let thm31 = dor_upper_thm31(a, b).map(|u| (u, DorSource::Thm31));
    let thm32 = THM32_SPECIALS
        .iter()
        .find(|&&(sa, sb, _)| (sa, sb) == (a, b))
        .map(|&(_, _, u)| (u, DorSource::Thm32));
    let best = match (thm31, thm32) {
        (Some(x), Some(y)) => Some(if y.0 <= x.0 { y } else { x }),
        (x, y) => x.or(y),
    };
    Ok(DorRow {
        a,
        b,
        value: DorValue::Range { hi: best.map(|(u, _)| u) },
        source: best.map(|(_, s)| s),
    })
}

/// Everything the formulas say about one instance, each value tagged with
/// its source.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub params: ABParams,
    pub lower: Vec<(u64, &'static str)>,
    pub upper: Vec<(u64, &'static str)>,
    pub best_lower: Option<u64>,
    pub best_upper: Option<u64>,
    pub dor: DorRow,
    pub notes: Vec<String>,
}

pub fn bound_report(params: ABParams) -> Result<BoundReport> {
    let ABParams { a, b, r } = params;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut notes = Vec::new();
    if b != 2 * a {
        if r == 2 {
            if let Ok(v) = lower_thm24(a, b) {
                lower.push((v, "Theorem 2.4"));
            }
            if a == 1 {
                if let Ok(v) = lower_thm25(b) {
                    lower.push((v, "Theorem 2.5"));
                }
            }
            if b + 1 == 2 * a {
                if let Ok(v) = cor21_lower(a) {
                    lower.push((v, "Corollary 2.1"));
                }
                if let Ok(v) = cor21_upper(a) {
                    upper.push((v, "Corollary 2.1"));
                }
            }
            if let Ok(v) = upper_thm21(a, b) {
                upper.push((v, "Theorem 2.1"));
                notes.push(
                    "Theorem 2.1 evaluated as stated (+6b^2 term); its proof works with +4b^2"
                        .into(),
                );
            }
            if a == b {
                if let Ok(v) = upper_thm22(a) {
                    upper.push((v, "Theorem 2.2"));
                }
            }
        } else if r >= 3 {
            if let Ok(v) = lower_prop31(a, b, r) {
                lower.push((v, "Proposition 3.1"));
            }
            if a == 1 {
                if let Ok(v) = lower_prop32(b, r) {
                    lower.push((v, "Proposition 3.2"));
                }
            }
            notes.push(format!(
                "no upper bound is known for r = {r}; existence itself is open"
            ));
        }
    }
    let best_lower = lower.iter().map(|&(v, _)| v).max();
    let best_upper = upper.iter().map(|&(v, _)| v).min();
    Ok(BoundReport {
        params,
        lower,
        upper,
        best_lower,
        best_upper,
        dor: dor_summary(a, b)?,
        notes,
    })
}
