//! Distributions, antagonism functions and the polarization index.

mod alienation;
mod distribution;
mod index;
pub mod shape;

pub use alienation::{Alienation, Kind as AlienationKind};
pub use distribution::{validate_distribution, validate_populations, Distribution};
pub use index::{evaluate_index, gini_index, AntagonismSpec};
pub use shape::{is_midpoint_convex, is_nondecreasing, ShapeCheck};
