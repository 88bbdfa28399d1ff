use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms ({reason})")]
    SeriesNonConvergence { terms: usize, reason: &'static str },

    #[error("ellipticity violated: a({x}) = {value} <= 0")]
    Ellipticity { x: f64, value: f64 },

    #[error("sign condition violated: c({x}) = {value} > 0")]
    PotentialSign { x: f64, value: f64 },

    #[error("need at least {required} eigenvalues, basis has {available}")]
    InsufficientModes { required: usize, available: usize },

    #[error("quadrature mismatch: {0}")]
    QuadratureMismatch(String),

    #[error("point {0:?} lies outside the domain")]
    PointOutsideDomain(Vec<f64>),

    #[error("operation not available for this problem: {0}")]
    OutOfScope(String),

    #[error("invalid observation geometry: {0}")]
    Geometry(String),

    #[error("need at least {required} samples, got {available}")]
    InsufficientSamples { required: usize, available: usize },

    #[error("cannot fit a power law: {0}")]
    DegenerateSamples(String),

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
