use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision (pivot {pivot} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("Muller iteration did not converge in {iterations} steps (last z = {last}, |f| = {residual:e})")]
    NoConvergence {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("Muller iteration stalled on a degenerate triple near z = {at}")]
    DegenerateTriple { at: Complex64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("capacitance matrix is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("eigenvalues {first} and {second} of the capacitance pencil are not separated")]
    EigenvalueCollision { first: usize, second: usize },

    #[error("wavenumber {k} hits an interior Dirichlet eigenvalue of gap {gap_index}")]
    ExcludedWavenumber { k: Complex64, gap_index: usize },

    #[error("spherical Hankel function is singular at z = 0")]
    HankelAtOrigin,

    #[error("harmonic order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),

    #[error("roots for modes {first} and {second} collided at {at} after deflation")]
    RootCollision {
        first: usize,
        second: usize,
        at: Complex64,
    },

    #[error("frequency must be nonzero")]
    ZeroFrequency,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
