use thiserror::Error;

/// Errors produced while building operators, spectra and pseudo prolate families.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PpsfError {
    #[error("dimension mismatch: expected {expected} samples, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("only one-dimensional intervals are supported (requested d = {0})")]
    UnsupportedDimension(usize),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("degenerate geometry: no grid point lies inside rT = [-{half_width}, {half_width}]")]
    DegenerateGeometry { half_width: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid energy budget: {0}")]
    Budget(String),

    #[error("eigensolver failed on a {size}x{size} matrix (trace {trace:.6e}, frobenius norm {frobenius:.6e}): {reason}")]
    Numerical {
        size: usize,
        trace: f64,
        frobenius: f64,
        reason: String,
    },

    #[error(
        "empty family: no eigenvalue exceeds 1 - sigma = {threshold} (largest is {top}); \
         increase r or sigma"
    )]
    EmptyFamily { threshold: f64, top: f64 },

    #[error(
        "only {available} grid points lie outside rT but {needed} kernel functions were requested; \
         increase the margin or the number of grid points"
    )]
    InsufficientPadding { needed: usize, available: usize },

    #[error(
        "verification failed for function {index}: residual {residual:.3e} exceeds epsilon + tolerance \
         = {limit:.3e} (discretization too coarse?)"
    )]
    Verification {
        index: usize,
        residual: f64,
        limit: f64,
    },

    #[error("no valid sweep records: {0}")]
    NoValidRecords(String),
}

pub type Result<T> = std::result::Result<T, PpsfError>;
