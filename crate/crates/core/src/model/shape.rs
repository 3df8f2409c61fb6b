//! Sampled monotonicity and midpoint-convexity checks for alienation
//! functions. These are grid surrogates for analytic properties: a pass
//! only certifies the sampled points.

use serde::Serialize;

use super::Alienation;
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 1000;
pub const SHAPE_TOLERANCE: f64 = 1e-9;
/// Upper end of the default grid when no distances are in play.
pub const DEFAULT_D_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub holds: bool,
    /// Grid pair `(a, b)` with the largest violation, when there is one.
    pub witness: Option<(f64, f64)>,
    /// Largest observed excess over the allowed bound (negative when holding).
    pub worst_excess: f64,
}

/// `DEFAULT_GRID_POINTS` uniform points on `[0, d_max]`.
pub fn default_grid(d_max: f64) -> Vec<f64> {
    uniform_grid(0.0, d_max, DEFAULT_GRID_POINTS)
}

/// Default grid for `f`: up to its table end, else `DEFAULT_D_MAX`.
pub fn default_grid_for(f: &Alienation) -> Vec<f64> {
    default_grid(f.domain_max().unwrap_or(DEFAULT_D_MAX))
}

pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid);
    }
    Ok(())
}

/// True iff `f(gᵢ) ≤ f(gᵢ₊₁) + SHAPE_TOLERANCE` for consecutive grid points.
pub fn is_nondecreasing(f: &Alienation, grid: &[f64]) -> Result<ShapeCheck> {
    validate_grid(grid)?;
    let values = grid.iter().map(|&d| f.evaluate(d)).collect::<Result<Vec<_>>>()?;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for k in 1..grid.len() {
        let excess = values[k - 1] - values[k];
        if excess > worst {
            worst = excess;
            if excess > SHAPE_TOLERANCE {
                witness = Some((grid[k - 1], grid[k]));
            }
        }
    }
    Ok(ShapeCheck {
        holds: witness.is_none(),
        witness,
        worst_excess: if grid.len() > 1 { worst } else { 0.0 },
    })
}

/// True iff `f((a+b)/2) ≤ (f(a)+f(b))/2 + tolerance` for every grid pair `a < b`.
pub fn is_midpoint_convex(f: &Alienation, grid: &[f64], tolerance: f64) -> Result<ShapeCheck> {
    if grid.len() < 3 {
        return Err(Error::GridTooSmall(grid.len()));
    }
    validate_grid(grid)?;
    let values = grid.iter().map(|&d| f.evaluate(d)).collect::<Result<Vec<_>>>()?;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let (a, b) = (grid[i], grid[j]);
            if a == b {
                continue;
            }
            let excess = f.evaluate(0.5 * (a + b))? - 0.5 * (values[i] + values[j]);
            if excess > worst {
                worst = excess;
                if excess > tolerance {
                    witness = Some((a, b));
                }
            }
        }
    }
    Ok(ShapeCheck {
        holds: witness.is_none(),
        witness,
        worst_excess: worst,
    })
}
