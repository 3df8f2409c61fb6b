use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest population that converts to and from `f64` without loss.
const MAX_EXACT_POPULATION: f64 = 9_007_199_254_740_992.0;

/// A discrete distribution: `n >= 2` groups with positive integer sizes
/// (one individual per unit) and pairwise distinct characteristic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct Distribution {
    pi: Vec<u64>,
    y: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    pi: Vec<f64>,
    y: Vec<f64>,
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        validate_distribution(&raw.pi, &raw.y)
    }
}

/// Validates raw population and characteristic vectors.
///
/// Populations must be exact positive integers (no rounding) and
/// characteristic values must be finite and pairwise distinct under `==`
/// (so `0.0` and `-0.0` count as the same value).
pub fn validate_distribution(raw_pi: &[f64], raw_y: &[f64]) -> Result<Distribution> {
    if raw_pi.len() != raw_y.len() {
        return Err(Error::LengthMismatch {
            pi: raw_pi.len(),
            y: raw_y.len(),
        });
    }
    if raw_pi.len() < 2 {
        return Err(Error::TooFewGroups(raw_pi.len()));
    }
    Distribution::new(validate_populations(raw_pi)?, raw_y.to_vec())
}

/// Converts raw populations to counts, rejecting anything that is not an
/// exact integer in `[1, 2^53]`.
pub fn validate_populations(raw_pi: &[f64]) -> Result<Vec<u64>> {
    raw_pi
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            let integral = value.fract() == 0.0 && (1.0..=MAX_EXACT_POPULATION).contains(&value);
            integral
                .then_some(value as u64)
                .ok_or(Error::NonIntegralPopulation { index, value })
        })
        .collect()
}

impl Distribution {
    pub fn new(pi: Vec<u64>, y: Vec<f64>) -> Result<Self> {
        if pi.len() != y.len() {
            return Err(Error::LengthMismatch {
                pi: pi.len(),
                y: y.len(),
            });
        }
        if pi.len() < 2 {
            return Err(Error::TooFewGroups(pi.len()));
        }
        if let Some(index) = pi.iter().position(|&p| p == 0 || p as f64 > MAX_EXACT_POPULATION) {
            return Err(Error::NonIntegralPopulation {
                index,
                value: pi[index] as f64,
            });
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCharacteristic { index, value: y[index] });
        }
        if let Some((first, second)) = first_duplicate(&y) {
            return Err(Error::DuplicateCharacteristic {
                first,
                second,
                value: y[first],
            });
        }
        Ok(Self { pi, y })
    }

    /// Builds a distribution after merging groups whose characteristic values
    /// are exactly equal. Merged groups keep the position of their first
    /// occurrence and sum their populations.
    pub fn merging_duplicates(pi: &[u64], y: &[f64]) -> Result<Self> {
        if pi.len() != y.len() {
            return Err(Error::LengthMismatch {
                pi: pi.len(),
                y: y.len(),
            });
        }
        let mut merged_pi: Vec<u64> = Vec::with_capacity(pi.len());
        let mut merged_y: Vec<f64> = Vec::with_capacity(y.len());
        for (&p, &v) in pi.iter().zip(y) {
            match merged_y.iter().position(|&w| w == v) {
                Some(k) => merged_pi[k] += p,
                None => {
                    merged_pi.push(p);
                    merged_y.push(v);
                }
            }
        }
        Self::new(merged_pi, merged_y)
    }

    pub fn populations(&self) -> &[u64] {
        &self.pi
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn total_population(&self) -> u64 {
        self.pi.iter().sum()
    }

    pub fn max_distance(&self) -> f64 {
        let lo = self.y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    pub fn groups(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.pi.iter().copied().zip(self.y.iter().copied())
    }

    /// Homothecy of the population vector: `(λπ, y)`.
    pub fn scale_population(&self, lambda: u64) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        let pi = self
            .pi
            .iter()
            .map(|&p| {
                p.checked_mul(lambda)
                    .ok_or_else(|| Error::InvalidParameter(format!("population {p} x {lambda} overflows")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pi, self.y.clone())
    }

    /// Shifts every characteristic value by `offset`.
    pub fn translate(&self, offset: f64) -> Result<Self> {
        Self::new(self.pi.clone(), self.y.iter().map(|v| v + offset).collect())
    }

    /// Applies the same permutation to populations and values.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidParameter(
                "permutation length differs from group count".into(),
            ));
        }
        Self::new(
            order.iter().map(|&k| self.pi[k]).collect(),
            order.iter().map(|&k| self.y[k]).collect(),
        )
    }
}

/// Returns the duplicate pair `(i, j)`, `i < j`, with the smallest `j`.
fn first_duplicate(y: &[f64]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
    let mut best: Option<(usize, usize)> = None;
    let mut run_start = 0;
    for k in 1..=order.len() {
        if k < order.len() && y[order[k]] == y[order[run_start]] {
            continue;
        }
        if k - run_start >= 2 {
            let mut run: Vec<usize> = order[run_start..k].to_vec();
            run.sort_unstable();
            let pair = (run[0], run[1]);
            if best.is_none_or(|b| pair.1 < b.1) {
                best = Some(pair);
            }
        }
        run_start = k;
    }
    best
}
