use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole of the gamma function at {0}")]
    GammaPole(String),
    #[error("series divergence guard: {0}")]
    SeriesDivergence(String),
    #[error("contour abscissa {sigma} outside (0, {order})")]
    ContourOutOfRange { sigma: f64, order: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("insufficient series order: need {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("inconsistent dimension: formula {formula}, constructed {constructed}")]
    InconsistentDimension { formula: usize, constructed: usize },
    #[error("repeated Hecke eigenvalue not separated by T_2, T_3, T_5 at weight {0}")]
    RepeatedEigenvalue(u32),
    #[error("tail bound unattainable: {0}")]
    TailBound(String),
    #[error("identity violated: {what}: gap {gap:e} exceeds {tolerance:e}")]
    IdentityViolation { what: String, gap: f64, tolerance: f64 },
    #[error("non-constant calibration: relative spread {spread:e} exceeds {tolerance:e}")]
    Calibration { spread: f64, tolerance: f64 },
    #[error("internal enumeration error: {0}")]
    Enumeration(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::GammaPole(_) => "gamma_pole",
            Error::SeriesDivergence(_) => "series_divergence",
            Error::ContourOutOfRange { .. } => "contour_out_of_range",
            Error::Quadrature(_) => "quadrature",
            Error::UnsupportedField(_) => "unsupported_field",
            Error::InsufficientOrder { .. } => "insufficient_order",
            Error::InconsistentDimension { .. } => "inconsistent_dimension",
            Error::RepeatedEigenvalue(_) => "repeated_eigenvalue",
            Error::TailBound(_) => "tail_bound",
            Error::IdentityViolation { .. } => "identity_violation",
            Error::Calibration { .. } => "calibration",
            Error::Enumeration(_) => "enumeration",
            Error::Cache(_) => "cache",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
