use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("data length {got} does not match {rows}x{cols}")]
    InvalidData { rows: usize, cols: usize, got: usize },

    #[error("non-finite entry at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("half-dimension must be at least 1")]
    DegenerateDimension,

    #[error("matrix must be square with even side, got {rows}x{cols}")]
    OddDimension { rows: usize, cols: usize },

    #[error("matrix is singular or numerically degenerate (pivot {pivot:.3e} at step {index})")]
    Singular { index: usize, pivot: f64 },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {deviation:.3e}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    #[error("matrix is not positive-definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is not symplectic: max |T'*Omega0*T - Omega0| = {residual:.3e} > {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    #[error("form is degenerate: {context}")]
    Degenerate { context: String },

    #[error("form is not the canonical one; this operation is defined for Omega0 only")]
    NotCanonical,

    #[error("point is outside the potential's domain (or too close to its boundary)")]
    OutOfDomain,

    #[error("conjugate appears unbounded above at the given target")]
    UnboundedConjugate,

    #[error("gradient inversion did not converge after {iterations} iterations (residual {residual:.3e})")]
    GradientInversion { iterations: usize, residual: f64 },

    #[error("grid oracle supports dimension <= {max}, got {got}")]
    OracleScale { max: usize, got: usize },

    #[error("divergence value {value:.6e} is below the numerical floor; the potential is likely not convex")]
    ConvexityViolation { value: f64 },

    #[error("time grid is degenerate: {context}")]
    DegenerateGrid { context: String },

    #[error("empty series: nothing to emit")]
    EmptySeries,

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("csv parse error at line {line}: {context}")]
    Csv { line: usize, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
