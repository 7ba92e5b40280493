use std::path::PathBuf;

/// Errors surfaced by the library.
///
/// The variants split into three groups the command line maps onto exit
/// codes: bad input ([`Error::is_invalid_input`]), violated invariants, and
/// environmental failures (I/O, timeouts).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported weight {weight}: supported weights are {supported}")]
    UnsupportedWeight { weight: u32, supported: String },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("enumeration budget exceeded: modulus {modulus} > {budget}")]
    BudgetExceeded { modulus: u64, budget: u64 },

    #[error("factorization of {value} incomplete after {elapsed_ms} ms")]
    FactorizationIncomplete { value: String, elapsed_ms: u128 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no sign change of F on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed data: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the caller's arguments.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedWeight { .. }
                | Error::InvalidArgument { .. }
                | Error::BudgetExceeded { .. }
        )
    }

    /// True when a checked mathematical invariant failed.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedWeight { .. } => "unsupported_weight",
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::FactorizationIncomplete { .. } => "factorization_incomplete",
            Error::Invariant(_) => "invariant_violation",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
