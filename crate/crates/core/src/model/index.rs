use serde::Serialize;

use super::{Alienation, Distribution};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Effective antagonism `θ(π, d) = π^α f(d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntagonismSpec {
    alpha: f64,
    alienation: Alienation,
}

impl AntagonismSpec {
    pub fn new(alpha: f64, alienation: Alienation) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { alpha, alienation })
    }

    /// The Gini special case, `θ(π, d) = d`.
    pub fn gini() -> Self {
        Self {
            alpha: 0.0,
            alienation: Alienation::linear(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alienation(&self) -> &Alienation {
        &self.alienation
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.alienation.clone())
    }

    /// Identification factor `π^α`.
    pub fn identification(&self, pi: u64) -> Result<f64> {
        if pi == 0 {
            return Err(Error::DomainError("group size must be >= 1".into()));
        }
        Ok((pi as f64).powf(self.alpha))
    }

    pub fn theta(&self, pi: u64, d: f64) -> Result<f64> {
        let f = self.alienation.evaluate(d)?;
        Ok(self.identification(pi)? * f)
    }
}

/// `P(π, y) = Σᵢ Σⱼ πᵢ πⱼ θ(πᵢ, |yᵢ − yⱼ|)` over ordered pairs.
///
/// Both `(i, j)` and `(j, i)` contribute; the diagonal terms vanish because
/// `θ(π, 0) = 0` and are skipped. The sum is accumulated with compensation.
pub fn evaluate_index(dist: &Distribution, spec: &AntagonismSpec) -> Result<f64> {
    let pi = dist.populations();
    let y = dist.values();
    // πᵢ · πᵢ^α for each group
    let weight: Vec<f64> = pi
        .iter()
        .map(|&p| Ok(p as f64 * spec.identification(p)?))
        .collect::<Result<_>>()?;
    let mut acc = CompensatedSum::new();
    for i in 0..pi.len() {
        for j in (i + 1)..pi.len() {
            let f = spec.alienation.evaluate((y[i] - y[j]).abs())?;
            acc.add(weight[i] * pi[j] as f64 * f);
            acc.add(weight[j] * pi[i] as f64 * f);
        }
    }
    Ok(acc.total())
}

/// Gini index: the index with `α = 0` and linear alienation.
pub fn gini_index(dist: &Distribution) -> Result<f64> {
    evaluate_index(dist, &AntagonismSpec::gini())
}
