use thiserror::Error;

/// Every failure the library reports.
///
/// Variants split into two families: input validation problems (bad shapes,
/// broken invariants, unmet preconditions) and solver infeasibility. The CLI
/// maps the first to exit code 2 and the second to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("metric requires strictly positive coordinates, got {value} at component {index}")]
    NonPositiveCoordinate { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the mapping rule range [{low}, {high}]")]
    OutOfRange { value: f64, low: f64, high: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("universe mismatch: {left} items vs {right} items")]
    UniverseMismatch { left: usize, right: usize },

    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("proximity between {0} and {1} is absent but required by the linkage")]
    AbsentProximity(usize, usize),

    #[error("enumeration guard exceeded: {needed} > {limit}")]
    GuardExceeded { needed: u128, limit: u128 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("items {i} and {j}: {source}")]
    AtPair { i: usize, j: usize, source: Box<Error> },
}

impl Error {
    /// True for solver infeasibility, false for validation failures.
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::Infeasible(_) | Error::Disconnected { .. } => true,
            Error::AtPair { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
