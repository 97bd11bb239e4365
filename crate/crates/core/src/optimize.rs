//! Certified one-dimensional global maximization of periodic functions.
//!
//! The engine is a best-first branch and bound over `[0, period]`. Each open
//! interval carries an upper bound on `f` over it. The interval with the
//! highest bound is bisected until that bound is within `eps` of the best
//! value seen. The best value is attained at an evaluated point, so it is a
//! valid lower bound, and the final gap is a valid upper-bound certificate.
//!
//! Two interval bounds are available:
//!
//! * the Lipschitz cone `(f(a) + f(b))/2 + L(b - a)/2`, valid for any
//!   `L`-Lipschitz `f`;
//! * the sinusoid bound for `f(t) = N(cos t P + sin t Q)` with `N` a norm.
//!   On `[a, b]` with `b - a < pi`,
//!   `X(t) = (sin(b - t) X(a) + sin(t - a) X(b)) / sin(b - a)` with
//!   non-negative weights, so the triangle inequality bounds `f` by a
//!   sinusoid through `f(a)` and `f(b)`. Its excess over `f` shrinks
//!   quadratically with the interval width.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Target absolute gap between the returned value and the supremum.
    pub eps: f64,
    /// Budget of objective evaluations.
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            max_evals: 200_000,
        }
    }
}

impl OptimizerConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_evals < 3 {
            return Err(Error::InvalidConfig(format!(
                "max_evals must be at least 3, got {}",
                self.max_evals
            )));
        }
        Ok(())
    }
}

/// A supremum known to lie in `[value, value + eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    /// A point where `value` is attained. Informational only.
    pub arg: f64,
    pub eps: f64,
    pub evals: usize,
}

impl CertifiedValue {
    pub fn upper(&self) -> f64 {
        self.value + self.eps
    }

    pub fn contains(&self, x: f64) -> bool {
        self.value <= x && x <= self.upper()
    }
}

/// Per-interval upper bound on the objective.
pub(crate) trait IntervalBound {
    fn upper(&self, a: f64, fa: f64, b: f64, fb: f64) -> f64;
}

pub(crate) struct LipschitzBound(pub f64);

impl IntervalBound for LipschitzBound {
    fn upper(&self, a: f64, fa: f64, b: f64, fb: f64) -> f64 {
        0.5 * (fa + fb + self.0 * (b - a))
    }
}

/// Minimum of the Lipschitz cone and the sinusoid bound for norm pencils.
pub(crate) struct PencilBound {
    pub lipschitz: f64,
}

impl IntervalBound for PencilBound {
    fn upper(&self, a: f64, fa: f64, b: f64, fb: f64) -> f64 {
        let cone = LipschitzBound(self.lipschitz).upper(a, fa, b, fb);
        cone.min(sinusoid_bound(b - a, fa, fb))
    }
}

/// Maximum over `t in [0, width]` of
/// `(fa sin(width - t) + fb sin t) / sin(width)`.
pub(crate) fn sinusoid_bound(width: f64, fa: f64, fb: f64) -> f64 {
    if !(width > 0.0 && width < 3.0) {
        return f64::INFINITY;
    }
    let (s, c) = width.sin_cos();
    // h(t) = fa s cos t + (fb - fa c) sin t peaks at atan2(fb - fa c, fa s)
    let peak = (fb - fa * c).atan2(fa * s);
    if peak <= 0.0 {
        return fa;
    }
    if peak >= width {
        return fb;
    }
    let half = (0.5 * width).sin();
    let amp_sqr = (fa - fb) * (fa - fb) + 4.0 * fa * fb * half * half;
    amp_sqr.sqrt() / s
}

#[derive(Debug)]
struct Cell {
    upper: f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // max-heap on the bound; among equal bounds the leftmost cell first
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

const INITIAL_POINTS: usize = 8;
/// Relative slack added to every interval bound to absorb rounding in the
/// bound arithmetic itself.
const BOUND_ROUNDING: f64 = 8.0 * f64::EPSILON;

pub(crate) fn maximize<F, B>(mut f: F, period: f64, bound: &B, cfg: &OptimizerConfig) -> Result<CertifiedValue>
where
    F: FnMut(f64) -> Result<f64>,
    B: IntervalBound,
{
    cfg.validate()?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidConfig(format!("period must be positive, got {period}")));
    }
    let n0 = INITIAL_POINTS.min(cfg.max_evals - 1);
    let step = period / n0 as f64;
    let mut samples = Vec::with_capacity(n0 + 1);
    for k in 0..n0 {
        let t = k as f64 * step;
        samples.push((t, f(t)?));
    }
    samples.push((period, samples[0].1));
    let mut evals = n0;

    let (mut best, mut arg) = (samples[0].1, 0.0);
    for &(t, v) in &samples[..n0] {
        if v > best {
            best = v;
            arg = t;
        }
    }

    let make = |a: f64, fa: f64, b: f64, fb: f64| {
        let raw = bound.upper(a, fa, b, fb);
        let hi = fa.max(fb);
        let upper = if raw.is_nan() { f64::INFINITY } else { raw.max(hi) };
        Cell {
            upper: upper + BOUND_ROUNDING * upper.abs(),
            a,
            b,
            fa,
            fb,
        }
    };
    let mut heap: BinaryHeap<Cell> = samples.windows(2).map(|w| make(w[0].0, w[0].1, w[1].0, w[1].1)).collect();

    loop {
        let top = heap.peek().expect("cell set is never empty");
        let gap = (top.upper - best).max(0.0);
        if gap <= cfg.eps {
            return Ok(CertifiedValue {
                value: best,
                arg,
                eps: gap,
                evals,
            });
        }
        if evals >= cfg.max_evals {
            return Err(Error::Uncertified {
                best,
                arg,
                achieved_eps: gap,
                evals,
            });
        }
        let cell = heap.pop().expect("peeked");
        let mid = 0.5 * (cell.a + cell.b);
        let fm = f(mid)?;
        evals += 1;
        if fm > best || (fm == best && mid < arg) {
            best = fm;
            arg = mid;
        }
        heap.push(make(cell.a, cell.fa, mid, fm));
        heap.push(make(mid, fm, cell.b, cell.fb));
    }
}

/// Certified supremum of an `L`-Lipschitz, `period`-periodic function.
///
/// Returns `value` attained at `arg` with `sup f <= value + eps` and
/// `eps <= cfg.eps`, or [`Error::Uncertified`] when the evaluation budget
/// runs out first. With `lipschitz == 0` the function is constant and
/// `f(0)` is returned with a zero bound.
pub fn certified_sup<F>(mut f: F, period: f64, lipschitz: f64, cfg: &OptimizerConfig) -> Result<CertifiedValue>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidConfig(format!("invalid Lipschitz bound {lipschitz}")));
    }
    if lipschitz == 0.0 {
        return Ok(CertifiedValue {
            value: f(0.0),
            arg: 0.0,
            eps: 0.0,
            evals: 1,
        });
    }
    maximize(|t| Ok(f(t)), period, &LipschitzBound(lipschitz), cfg)
}
