use thiserror::Error;

/// Errors raised by the numerical core and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular value {value} at index {index} is not strictly positive")]
    NonPositiveSingularValue { index: usize, value: f64 },

    #[error("singular values must be nonincreasing (index {index}: {previous} < {next})")]
    NonMonotoneSpectrum {
        index: usize,
        previous: f64,
        next: f64,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("argument `{name}` must be strictly positive, got {value}")]
    NonPositiveArgument { name: &'static str, value: f64 },

    #[error("regularization parameter must be strictly positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("parameter grid needs at least two nodes, got {0}")]
    GridTooSmall(usize),

    #[error("bracket [{lo}, {hi}] does not straddle target {target}")]
    BracketDoesNotStraddle { lo: f64, hi: f64, target: f64 },

    #[error("logarithmic index function evaluated at {0}, outside (0, 1/e]")]
    LogDomain(f64),

    #[error("approximant at grid index {0} has zero norm")]
    ZeroNormApproximant(usize),

    #[error("cannot aggregate an empty set of approximants")]
    EmptySubset,

    #[error("Gram matrix has no eigenvalue above the truncation threshold")]
    ZeroMatrix,

    #[error("selected parameter {0} is not a node of the grid")]
    AlphaNotInGrid(f64),

    #[error("invalid noise decay exponent {0}")]
    BadDecay(f64),

    #[error("invalid separation epsilon {0}: expected a value in (0, 1)")]
    BadEpsilon(f64),

    #[error("truncation depth {n_max} must be in 1..{dimension} (the tail needs at least one term)")]
    NMaxTooLarge { n_max: usize, dimension: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("delta sweep is insufficient: {0}")]
    InsufficientSweep(String),

    #[error("run index {index} out of range (have {runs} runs)")]
    BadRunIndex { index: usize, runs: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input (configuration or files)
    /// rather than by a numerical failure during computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::Parse { .. } | Error::Json(_) | Error::InsufficientSweep(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
