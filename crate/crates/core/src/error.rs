use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("dilation weights must be positive, got {0}")]
    NonPositiveWeight(String),
    #[error("dilation weights must be >= 1 with smallest weight exactly 1")]
    WeightsNotNormalized,
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("L^p exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("translation does not map grid nodes onto grid nodes")]
    NotGridAligned,
    #[error("dilation by {0} does not map grid nodes onto grid nodes")]
    DilationNotRepresentable(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("operator and function live on different grids")]
    GridMismatch,
    #[error("monomial exponents give unequal homogeneity degrees 2*m_i*w_i")]
    InhomogeneousSymbol,
    #[error("grid too small: every axis needs at least 4 points")]
    GridTooSmall,
    #[error("dense eigendecomposition is limited to {limit} nodes, grid has {size}")]
    DenseLimitExceeded { size: usize, limit: usize },
    #[error("method `{0}` is not available for this operator backend")]
    MethodMismatch(&'static str),
    #[error("Chebyshev degree must be at least 1")]
    InvalidDegree,
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("spectral mass {mass:e} near zero exceeds {limit:e}")]
    SingularSpectralMass { mass: f64, limit: f64 },
    #[error("band-limited function has no spectral content")]
    EmptySpectralContent,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("dense eigendecomposition did not converge")]
    EigenFailure,
}

pub type Result<T> = core::result::Result<T, Error>;
