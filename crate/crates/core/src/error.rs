use std::fmt;

use thiserror::Error;

/// Which inversion inside a partitioned (Schur) inverse failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurBlock {
    /// The leading block `h1`.
    H1,
    /// The trailing block `h4`.
    H4,
    /// The complement `h1 - h2 h4⁻¹ h3`.
    ComplementOfH4,
    /// The complement `h4 - h3 h1⁻¹ h2`.
    ComplementOfH1,
}

impl fmt::Display for SchurBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchurBlock::H1 => "h1",
            SchurBlock::H4 => "h4",
            SchurBlock::ComplementOfH4 => "h1 - h2 h4^-1 h3",
            SchurBlock::ComplementOfH1 => "h4 - h3 h1^-1 h2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("y is not positive definite")]
    NotPositiveDefinite,

    #[error("cv' + d is singular")]
    SingularDenominator,

    #[error("singular block in partitioned inverse: {0}")]
    SingularBlock(SchurBlock),

    #[error("near-singular matrix: |det| = {det:e} below threshold {threshold:e}")]
    NearSingular { det: f64, threshold: f64 },

    #[error("invalid metric parameter {name} = {value} (must be finite and > 0)")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("coordinate perturbation left the chart (y lost positive definiteness)")]
    PositivityLoss,

    #[error("geodesic step {step} rejected: relative speed drift {drift:e}")]
    StepRejected { step: usize, drift: f64 },

    #[error("no closed form available: {0}")]
    Unavailable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
