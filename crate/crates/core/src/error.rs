use thiserror::Error;

/// Errors raised by the linear algebra, divergence and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix has {rows} rows but row {row} has {len} entries")]
    Ragged { rows: usize, row: usize, len: usize },

    #[error("empty matrix: dimension must be at least 1")]
    Empty,

    #[error("matrix is not Hermitian (max defect {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("reference operator is zero")]
    ZeroOperator,

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),

    #[error(
        "Jacobi eigensolver did not converge on {dim}x{dim} matrix after {sweeps} sweeps \
         (residual off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { dim: usize, sweeps: usize, off_norm: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alpha = 1 is the Kullback-Leibler limit; use classical_kl")]
    UseKullbackLeibler,

    #[error("relative entropy variance is undefined: reference does not dominate the state")]
    SupportViolation,

    #[error("formula undefined for this support configuration (alpha = {alpha}, z = {z}): {detail}")]
    FormulaUndefined { alpha: f64, z: f64, detail: &'static str },

    #[error(
        "dual-path mismatch for {family} at alpha = {alpha}: direct trace {direct:e} vs alpha-z trace {alpha_z:e}"
    )]
    DualPathMismatch { family: &'static str, alpha: f64, direct: f64, alpha_z: f64 },

    #[error("non-finite function value at stencil point x = {0}")]
    NonFiniteSample(f64),

    #[error("invalid finite-difference step {0} (must lie in [1e-7, 1e-1])")]
    InvalidStep(f64),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid generator request: {0}")]
    InvalidGenerator(String),
}

impl Error {
    /// True for errors caused by parameters outside a function's mathematical
    /// domain, as opposed to malformed or inconsistent input data.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::UseKullbackLeibler
                | Error::SupportViolation
                | Error::FormulaUndefined { .. }
                | Error::InvalidCurve(_)
                | Error::InvalidStep(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
