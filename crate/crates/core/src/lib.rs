//! Discrete polarization indices with antagonism `θ(π, d) = π^α f(d)`.
//!
//! The index of a distribution `(π, y)` is the ordered-pair double sum
//! `P = Σᵢ Σⱼ πᵢ πⱼ θ(πᵢ, |yᵢ − yⱼ|)`: each unordered pair of groups is
//! counted twice, once from each side.

pub mod analysis;
pub mod axioms;
pub mod error;
pub mod model;
pub mod sum;
pub mod thresholds;

pub use error::{Error, Result};
pub use model::{
    evaluate_index, gini_index, is_midpoint_convex, is_nondecreasing, validate_distribution, validate_populations,
    Alienation, AlienationKind, AntagonismSpec, Distribution, ShapeCheck,
};
