//! The Axiom-3 bound `g(p, q, α)`, its supremum `M_α` over the integer
//! lattice, and bisection for the exponents at which `M_α` crosses a given
//! alienation ratio.
//!
//! `M_α` is not known in closed form. It is estimated on a lattice that is
//! dense for `p, q ≤ 64` and geometric beyond (32 points per octave), with
//! the limits doubled until the running maximum moves by less than the
//! requested tolerance. For `α > 0` the supremum is approached along rays
//! `q/p → const` and is not attained, so estimates approach it from below.
//! At `α = 0` the `q = 2` ray tends to 2 and that limit is included.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::shape::{self, SHAPE_TOLERANCE};
use crate::model::{is_midpoint_convex, is_nondecreasing, Alienation};

const DENSE_LIMIT: u64 = 64;
const POINTS_PER_OCTAVE: u32 = 32;
pub const MAX_GRID_LIMIT: u64 = 1 << 20;
/// Limit of `g(p, 2, 0) = 4p / (2p + 1)` as `p → ∞`.
const ALPHA_ZERO_RAY_LIMIT: f64 = 2.0;
pub const DEFAULT_ALPHA_RANGE: (f64, f64) = (0.0, 4.0);
pub const MAX_BISECTION_STEPS: usize = 40;
const SCAN_INTERVALS: usize = 16;

/// `g(p, q, α)`: the alienation-ratio threshold that Axiom 3 imposes at
/// group sizes `(p, q, p)`.
pub fn g_value(p: u64, q: u64, alpha: f64) -> Result<f64> {
    if p < 1 {
        return Err(Error::DomainError(format!("p must be >= 1, got {p}")));
    }
    if q < 2 {
        return Err(Error::DomainError(format!("q must be >= 2, got {q}")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::DomainError(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(g_unchecked(p as f64, q as f64, alpha))
}

/// Numerator and denominator are divided by `p^(α+1)` and every
/// `(1 + h)^β − 1` is formed with `exp_m1`/`ln_1p`, so nothing of order
/// `p^(α+2)` is ever subtracted.
fn g_unchecked(p: f64, q: f64, alpha: f64) -> f64 {
    let a1 = alpha + 1.0;
    let inv_p = p.recip();
    // (1 + 1/p)^(α+1) − 1 and (1 + 1/p)^(α+2) − 1
    let e1 = (a1 * inv_p.ln_1p()).exp_m1();
    let e2 = ((alpha + 2.0) * inv_p.ln_1p()).exp_m1();
    let numerator = if q == 2.0 {
        // (q − 2) terms vanish exactly
        2.0 + (q * inv_p).powf(alpha) * q
    } else {
        // 1 − (1 − 2/q)^(α+1)
        let e3 = -(a1 * (-2.0 / q).ln_1p()).exp_m1();
        let shrunk = (q - 2.0) * inv_p;
        2.0 - e1 * (q - 2.0) + (q * inv_p).powf(alpha) * q * e3 - shrunk.powf(a1)
    };
    numerator / (p * e2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupEstimate {
    pub alpha: f64,
    pub value: f64,
    /// Lattice point of the largest sampled `g`.
    pub argmax: (u64, u64),
    pub grid_limits: (u64, u64),
    pub stabilized: bool,
    /// Analytic ray limit folded into `value`, if any.
    pub ray_limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupPolicy {
    pub tolerance: f64,
    pub initial_limits: (u64, u64),
    pub max_limit: u64,
}

impl Default for SupPolicy {
    fn default() -> Self {
        Self {
            tolerance: 1e-7,
            initial_limits: (DENSE_LIMIT, DENSE_LIMIT),
            max_limit: MAX_GRID_LIMIT,
        }
    }
}

/// Axis values `start..=64`, then `64·2^(k/32)` up to `limit` (inclusive).
fn lattice_axis(start: u64, limit: u64) -> Vec<u64> {
    let mut axis: Vec<u64> = (start..=limit.min(DENSE_LIMIT)).collect();
    let mut k = 1;
    loop {
        let v = (DENSE_LIMIT as f64 * 2f64.powf(k as f64 / POINTS_PER_OCTAVE as f64)).round() as u64;
        if v > limit {
            break;
        }
        if axis.last().is_none_or(|&last| v > last) {
            axis.push(v);
        }
        k += 1;
    }
    if axis.last().is_some_and(|&last| last < limit) {
        axis.push(limit);
    }
    axis
}

#[derive(Clone, Copy)]
struct Peak {
    value: f64,
    p: u64,
    q: u64,
}

impl Peak {
    /// Larger value wins; ties go to the lexicographically smaller point so
    /// the parallel reduction is deterministic.
    fn better(self, other: Peak) -> Peak {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => {
                if (self.p, self.q) <= (other.p, other.q) {
                    self
                } else {
                    other
                }
            }
        }
    }
}

fn lattice_peak(alpha: f64, p_max: u64, q_max: u64) -> Peak {
    let ps = lattice_axis(1, p_max);
    let qs = lattice_axis(2, q_max);
    let start = ps
        .par_iter()
        .map(|&p| {
            qs.iter()
                .map(|&q| Peak {
                    value: g_unchecked(p as f64, q as f64, alpha),
                    p,
                    q,
                })
                .reduce(Peak::better)
                .expect("q axis is non-empty")
        })
        .reduce_with(Peak::better)
        .expect("p axis is non-empty");
    refine_peak(alpha, start, p_max, q_max)
}

/// Integer pattern search around a lattice peak, shrinking the step from
/// about 3% of the coordinates down to 1.
fn refine_peak(alpha: f64, start: Peak, p_max: u64, q_max: u64) -> Peak {
    let mut best = start;
    let mut step = (best.p.max(best.q) / 32).max(1) as i64;
    while step > 0 {
        let mut moved = false;
        for (dp, dq) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)] {
            let p = best.p as i64 + dp * step;
            let q = best.q as i64 + dq * step;
            if p < 1 || q < 2 || p as u64 > p_max || q as u64 > q_max {
                continue;
            }
            let candidate = Peak {
                value: g_unchecked(p as f64, q as f64, alpha),
                p: p as u64,
                q: q as u64,
            };
            if candidate.value > best.value {
                best = candidate;
                moved = true;
            }
        }
        if !moved {
            step /= 2;
        }
    }
    best
}

/// Runs the doubling schedule and reports whether it stabilized.
pub fn estimate_sup(alpha: f64, policy: &SupPolicy) -> Result<SupEstimate> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::DomainError(format!("alpha must be >= 0, got {alpha}")));
    }
    if !(policy.tolerance.is_finite() && policy.tolerance > 0.0) {
        return Err(Error::DomainError("tolerance must be > 0".into()));
    }
    let (mut p_max, mut q_max) = policy.initial_limits;
    if p_max < 1 || q_max < 2 {
        return Err(Error::DomainError(
            "initial limits need p_max >= 1 and q_max >= 2".into(),
        ));
    }
    let ray_limit = (alpha == 0.0).then_some(ALPHA_ZERO_RAY_LIMIT);
    let max_limit = policy.max_limit.max(p_max).max(q_max);
    let mut running: Option<Peak> = None;
    loop {
        let mut peak = lattice_peak(alpha, p_max, q_max);
        if let Some(prev) = running {
            peak = prev.better(peak);
        }
        let value = |peak: Peak| ray_limit.map_or(peak.value, |r| peak.value.max(r));
        let estimate = |stabilized| SupEstimate {
            alpha,
            value: value(peak),
            argmax: (peak.p, peak.q),
            grid_limits: (p_max, q_max),
            stabilized,
            ray_limit,
        };
        if let Some(prev) = running {
            if value(peak) - value(prev) < policy.tolerance {
                return Ok(estimate(true));
            }
        }
        running = Some(peak);
        if p_max >= max_limit && q_max >= max_limit {
            return Ok(estimate(false));
        }
        p_max = (p_max * 2).min(max_limit);
        q_max = (q_max * 2).min(max_limit);
    }
}

/// Stabilized estimate of `M_α = sup g(p, q, α)` over `p ≥ 1`, `q ≥ 2`.
pub fn sup_g(alpha: f64, tolerance: f64, initial_limits: (u64, u64)) -> Result<SupEstimate> {
    sup_g_with(
        alpha,
        &SupPolicy {
            tolerance,
            initial_limits,
            ..SupPolicy::default()
        },
    )
}

pub fn sup_g_with(alpha: f64, policy: &SupPolicy) -> Result<SupEstimate> {
    let estimate = estimate_sup(alpha, policy)?;
    if !estimate.stabilized {
        return Err(Error::NotStabilized {
            alpha,
            p_max: estimate.grid_limits.0,
            q_max: estimate.grid_limits.1,
        });
    }
    Ok(estimate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    /// Alienation ratio compared against `M_α`.
    pub bound: f64,
    pub alpha_critical: f64,
    /// `M_lo < bound ≤ M_hi`.
    pub bracket: (f64, f64),
    /// Largest lattice limits used by any supremum estimate.
    pub grid_limits: (u64, u64),
    /// Every `(α, M_α)` evaluated, sorted by `α`.
    pub m_alpha_samples: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub sup_tolerance: f64,
}

/// Largest `α` in `alpha_range` where `M_α` crosses `bound` from below.
pub fn critical_alpha(bound: f64, tolerance: f64, alpha_range: (f64, f64)) -> Result<ThresholdEstimate> {
    critical_alpha_with(bound, tolerance, alpha_range, &SupPolicy::default())
}

/// `M_α` is not monotone on `[0, ∞)` (it falls from 2 to 1 on `[0, 1]`
/// and rises afterwards), so the range is first scanned on a coarse grid
/// and the last upward crossing is bisected.
pub fn critical_alpha_with(
    bound: f64,
    tolerance: f64,
    alpha_range: (f64, f64),
    policy: &SupPolicy,
) -> Result<ThresholdEstimate> {
    let (lo, hi) = alpha_range;
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::DomainError(format!("bound must be > 0, got {bound}")));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::DomainError("tolerance must be > 0".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
        return Err(Error::DomainError(format!("invalid alpha range [{lo}, {hi}]")));
    }

    let mut samples: Vec<(f64, SupEstimate)> = Vec::new();
    let mut sup_at = |alpha: f64| -> Result<f64> {
        let estimate = sup_g_with(alpha, policy)?;
        samples.push((alpha, estimate));
        Ok(estimate.value)
    };

    let scan: Vec<f64> = shape::uniform_grid(lo, hi, SCAN_INTERVALS + 1);
    let scanned = scan.iter().map(|&a| sup_at(a)).collect::<Result<Vec<_>>>()?;
    let k = (0..SCAN_INTERVALS)
        .rev()
        .find(|&k| scanned[k] < bound && scanned[k + 1] >= bound)
        .ok_or(Error::NoSignChange { bound, lo, hi })?;

    let (mut a, mut b) = (scan[k], scan[k + 1]);
    for _ in 0..MAX_BISECTION_STEPS {
        if b - a <= tolerance {
            break;
        }
        let mid = 0.5 * (a + b);
        if sup_at(mid)? < bound {
            a = mid;
        } else {
            b = mid;
        }
    }

    let grid_limits = samples.iter().fold((0, 0), |acc, (_, s)| {
        (acc.0.max(s.grid_limits.0), acc.1.max(s.grid_limits.1))
    });
    let mut m_alpha_samples: Vec<(f64, f64)> = samples.iter().map(|(a, s)| (*a, s.value)).collect();
    m_alpha_samples.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(ThresholdEstimate {
        bound,
        alpha_critical: 0.5 * (a + b),
        bracket: (a, b),
        grid_limits,
        m_alpha_samples,
        tolerance,
        sup_tolerance: policy.tolerance,
    })
}

/// `min f(2d) / f(d)` over the grid.
pub fn ratio_infimum(f: &Alienation, d_grid: &[f64]) -> Result<f64> {
    if d_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best = f64::INFINITY;
    for &d in d_grid {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::DomainError(format!("ratio grid needs d > 0, got {d}")));
        }
        let ratio = alienation_ratio(f, d)?;
        best = best.min(ratio);
    }
    Ok(best)
}

/// `f(2d) / f(d)` for a single `d > 0`.
pub fn alienation_ratio(f: &Alienation, d: f64) -> Result<f64> {
    let doubled = f.evaluate(2.0 * d).map_err(|e| match e {
        Error::OutsideTable { d, max } => Error::DomainError(format!("table ends at {max}, cannot evaluate f({d})")),
        other => other,
    })?;
    let base = f.evaluate(d)?;
    if base <= 0.0 {
        return Err(Error::DomainError(format!("f({d}) = {base} is not positive")));
    }
    Ok(doubled / base)
}

/// 1000 geometric points from `1e-3` to half the default distance range
/// (or half the table domain).
pub fn default_ratio_grid(f: &Alienation) -> Vec<f64> {
    let top = 0.5 * f.domain_max().unwrap_or(shape::DEFAULT_D_MAX);
    let lo: f64 = 1e-3_f64.min(top * 0.5);
    let n = shape::DEFAULT_GRID_POINTS;
    let ratio = (top / lo).ln();
    (0..n).map(|k| lo * (ratio * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Largest `α` for which `f(2d)/f(d) > M_α` on the probed grid; `f` must
/// be non-decreasing and convex on its default grid.
pub fn feasible_alpha_interval(f: &Alienation, tolerance: f64) -> Result<ThresholdEstimate> {
    let grid = shape::default_grid_for(f);
    let monotone = is_nondecreasing(f, &grid)?;
    if let Some((a, b)) = monotone.witness {
        return Err(Error::ShapeViolation {
            property: "non-decreasing",
            a,
            b,
        });
    }
    let convex = is_midpoint_convex(f, &grid, SHAPE_TOLERANCE)?;
    if let Some((a, b)) = convex.witness {
        return Err(Error::ShapeViolation {
            property: "convex",
            a,
            b,
        });
    }
    let bound = ratio_infimum(f, &default_ratio_grid(f))?;
    critical_alpha(bound, tolerance, DEFAULT_ALPHA_RANGE)
}
