use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GqcError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: relative defect {defect:.3e} exceeds {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:.3e} exceeds {tol:.1e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("invalid density operator ({field}): {detail}")]
    InvalidDensity { field: &'static str, detail: String },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigen-solver failed to converge for a {0}x{0} matrix")]
    EigenConvergence(usize),

    #[error("function undefined on spectrum: eigenvalue {eigenvalue:.3e} below -{tol:.1e}")]
    SpectrumDomain { eigenvalue: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not traceless: |Tr| = {trace:.3e}")]
    NotTraceless { trace: f64 },

    #[error("no feasible dilation found: {0}")]
    Infeasible(String),

    #[error("integration budget exceeded: {0}")]
    Integration(String),
}

pub type Result<T, E = GqcError> = std::result::Result<T, E>;

pub(crate) fn dim_err(msg: impl Into<String>) -> GqcError {
    GqcError::DimensionMismatch(msg.into())
}
