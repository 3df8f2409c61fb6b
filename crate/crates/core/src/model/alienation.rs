use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Distance factor `f` of the antagonism `θ(π, d) = π^α f(d)`.
///
/// Every kind satisfies `f(0) = 0` exactly and is positive for `d > 0`.
/// Monotonicity and convexity are properties of the chosen parameters and
/// are checked by sampling (see [`crate::model::shape`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Alienation(Kind);

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `f(d) = d`
    Linear,
    /// `f(d) = d^r`, `r > 0`
    Power { exponent: f64 },
    /// `f(d) = c₁d + c₂d² + …`, non-negative coefficients, zero constant term
    Polynomial { coefficients: Vec<f64> },
    /// `f(d) = e^{kd} − 1`, `k > 0`
    Exponential { rate: f64 },
    /// Piecewise-linear interpolation through `(d, f(d))` breakpoints.
    Tabulated { breakpoints: Vec<(f64, f64)> },
}

impl Alienation {
    pub fn linear() -> Self {
        Self(Kind::Linear)
    }

    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidAlienation(format!(
                "power exponent must be > 0, got {exponent}"
            )));
        }
        Ok(Self(Kind::Power { exponent }))
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidAlienation(
                "polynomial coefficients must be finite and non-negative".into(),
            ));
        }
        if !coefficients.iter().any(|&c| c > 0.0) {
            return Err(Error::InvalidAlienation(
                "polynomial needs at least one positive coefficient".into(),
            ));
        }
        Ok(Self(Kind::Polynomial { coefficients }))
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidAlienation(format!(
                "exponential rate must be > 0, got {rate}"
            )));
        }
        Ok(Self(Kind::Exponential { rate }))
    }

    /// Breakpoints must start at `(0, 0)`, have strictly increasing
    /// distances and positive values after the origin.
    pub fn tabulated(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidAlienation("table needs at least two breakpoints".into()));
        }
        if breakpoints[0] != (0.0, 0.0) {
            return Err(Error::InvalidAlienation("table must start at (0, 0)".into()));
        }
        if breakpoints.iter().any(|(d, f)| !(d.is_finite() && f.is_finite())) {
            return Err(Error::InvalidAlienation("table entries must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidAlienation(
                "table distances must be strictly increasing".into(),
            ));
        }
        if breakpoints[1..].iter().any(|&(_, f)| f <= 0.0) {
            return Err(Error::InvalidAlienation(
                "table values must be positive for d > 0".into(),
            ));
        }
        Ok(Self(Kind::Tabulated { breakpoints }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0
    }

    /// Largest distance at which `f` is defined, if bounded.
    pub fn domain_max(&self) -> Option<f64> {
        match &self.0 {
            Kind::Tabulated { breakpoints } => breakpoints.last().map(|&(d, _)| d),
            _ => None,
        }
    }

    pub fn evaluate(&self, d: f64) -> Result<f64> {
        if d.is_nan() {
            return Err(Error::DomainError("distance is NaN".into()));
        }
        if d < 0.0 {
            return Err(Error::NegativeDistance(d));
        }
        Ok(match &self.0 {
            Kind::Linear => d,
            Kind::Power { exponent } => d.powf(*exponent),
            Kind::Polynomial { coefficients } => d * coefficients.iter().rev().fold(0.0, |acc, &c| acc * d + c),
            Kind::Exponential { rate } => (rate * d).exp_m1(),
            Kind::Tabulated { breakpoints } => interpolate(breakpoints, d)?,
        })
    }
}

fn interpolate(breakpoints: &[(f64, f64)], d: f64) -> Result<f64> {
    let (max, last) = breakpoints[breakpoints.len() - 1];
    if d > max {
        return Err(Error::OutsideTable { d, max });
    }
    if d == max {
        return Ok(last);
    }
    // index of the first breakpoint strictly beyond d
    let upper = breakpoints.partition_point(|&(x, _)| x <= d);
    let (x0, f0) = breakpoints[upper - 1];
    let (x1, f1) = breakpoints[upper];
    if d == x0 {
        return Ok(f0);
    }
    Ok(f0 + (f1 - f0) * (d - x0) / (x1 - x0))
}

impl fmt::Display for Alienation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Kind::Linear => write!(f, "linear"),
            Kind::Power { exponent } => write!(f, "power:{exponent}"),
            Kind::Polynomial { coefficients } => {
                let parts: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            Kind::Exponential { rate } => write!(f, "exp:{rate}"),
            Kind::Tabulated { breakpoints } => {
                let parts: Vec<String> = breakpoints.iter().map(|(d, v)| format!("{d}/{v}")).collect();
                write!(f, "table[{}]", parts.join(";"))
            }
        }
    }
}

impl Serialize for Alienation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
