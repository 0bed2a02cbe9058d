use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("lambda degenerate: mu({kappa:+}) = {mu} is within {guard:e} of an integer")]
    LambdaDegenerate { kappa: i32, mu: f64, guard: f64 },
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("incomplete table: entry (m={m}, n1={n1}, n2={n2}) lies outside the computed caps")]
    IncompleteTable { m: usize, n1: usize, n2: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate mu: Pochhammer factor vanishes for q-level {level}, j = {j}")]
    DegenerateMu { level: usize, j: usize },
    #[error("ill-conditioned solve for e({n1},{n2}): diagonal bracket {value:e}")]
    IllConditioned { n1: usize, n2: usize, value: f64 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("accuracy not reached after {steps} steps: error estimate {estimate:e}, best trace {best_re} {best_im:+}i")]
    AccuracyNotReached {
        steps: usize,
        estimate: f64,
        best_re: f64,
        best_im: f64,
    },
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    /// Name of the module that raises this kind of error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidParameters(_) | Error::LambdaDegenerate { .. } => "frame",
            Error::IncompleteTable { .. } | Error::Precondition(_) => "coeffs",
            Error::DegenerateMu { .. } | Error::IllConditioned { .. } => "stokes",
            Error::GammaPole(_) | Error::PrecisionExhausted(_) => "numerics",
            Error::Inconsistency(_) => "monodromy",
            Error::AccuracyNotReached { .. } => "oracle",
            Error::Usage(_) => "cli",
        }
    }

    /// True for errors caused by the input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidParameters(_) | Error::Usage(_))
    }
}

/// Non-fatal condition surfaced in the report.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Warning {
    pub module: &'static str,
    pub message: String,
}

impl Warning {
    pub fn new(module: &'static str, message: impl Into<String>) -> Self {
        Warning {
            module,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.module, self.message)
    }
}
