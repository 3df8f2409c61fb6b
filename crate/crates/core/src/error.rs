use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population and characteristic vectors differ in length ({pi} vs {y})")]
    LengthMismatch { pi: usize, y: usize },

    #[error("group {index}: population {value} is not a positive integer")]
    NonIntegralPopulation { index: usize, value: f64 },

    #[error("groups {first} and {second} share the characteristic value {value}")]
    DuplicateCharacteristic { first: usize, second: usize, value: f64 },

    #[error("group {index}: characteristic value {value} is not finite")]
    NonFiniteCharacteristic { index: usize, value: f64 },

    #[error("a distribution needs at least two groups, got {0}")]
    TooFewGroups(usize),

    #[error("distance {0} is negative")]
    NegativeDistance(f64),

    #[error("distance {d} lies beyond the last table breakpoint {max}")]
    OutsideTable { d: f64, max: f64 },

    #[error("invalid alienation function: {0}")]
    InvalidAlienation(String),

    #[error("identification exponent must be a finite real >= 0, got {0}")]
    InvalidAlpha(f64),

    #[error("population scale factor must be >= 1, got {0}")]
    NonPositiveLambda(u64),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("grid has too few points ({0})")]
    GridTooSmall(usize),

    #[error("grid must be sorted ascending and non-negative")]
    InvalidGrid,

    #[error("probe lists must be non-empty")]
    EmptyProbeLists,

    #[error("invalid probe plan: {0}")]
    InvalidProbePlan(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("supremum of g at alpha={alpha} not stabilized up to limits ({p_max}, {q_max})")]
    NotStabilized { alpha: f64, p_max: u64, q_max: u64 },

    #[error("bound {bound} is not crossed on alpha range [{lo}, {hi}]")]
    NoSignChange { bound: f64, lo: f64, hi: f64 },

    #[error("central group size {0} is odd and cannot be split evenly")]
    OddCentralGroup(u64),

    #[error("alienation function is not {property} on the sampled grid (witness {a}, {b})")]
    ShapeViolation { property: &'static str, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
