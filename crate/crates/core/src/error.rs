use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("site {site} out of range for a register of {len} sites")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("repeated site {0} in support")]
    RepeatedSite(usize),
    #[error("invalid local dimension {0}; every site needs dimension at least 2")]
    InvalidDimension(usize),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("term norm {0:.6} exceeds 1")]
    NormTooLarge(f64),
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("eigensolver did not converge (residual {0:.3e})")]
    NoConvergence(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {t} out of range 0..={max}")]
    TimeOutOfRange { t: usize, max: usize },
    #[error("input state is orthogonal to the ground space")]
    OrthogonalToGroundSpace,
    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("error support of {support} sites exceeds the correction budget {budget}")]
    ErrorBudget { support: usize, budget: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
