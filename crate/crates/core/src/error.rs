use thiserror::Error;

/// Errors raised by scenario validation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    #[error("joint probability at (state {row}, signal {col}) is {value:e}; full support is required")]
    ZeroEntry { row: usize, col: usize, value: f64 },

    #[error("states must be strictly increasing (index {index})")]
    NonMonotoneStates { index: usize },

    #[error("bias values must be strictly increasing (index {index})")]
    NonMonotoneBias { index: usize },

    #[error("marginal mismatch: {what} (expected {expected}, found {found})")]
    MarginalMismatch {
        what: String,
        expected: f64,
        found: f64,
    },

    #[error("signals are not ordered by strictly increasing posterior mean (columns {first} and {second})")]
    UnorderedSignals { first: usize, second: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("signal column {0} has zero probability")]
    ZeroColumn(usize),

    #[error("operation requires a 2x2 scenario, got {rows}x{cols}")]
    NotBinary { rows: usize, cols: usize },

    #[error("hypothesis violated: {condition} ({lhs} > {rhs})")]
    HypothesisViolated {
        condition: String,
        lhs: f64,
        rhs: f64,
    },

    #[error("solver did not converge after {iterations} iterations (duality gap {gap:e})")]
    ConvergenceFailure { iterations: usize, gap: f64 },

    #[error("confidence level {kappa} outside [{lower}, {upper}]")]
    KappaOutOfRange { kappa: f64, lower: f64, upper: f64 },

    #[error("bias function has zero variance under the state distribution")]
    DegenerateBias,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 1 usage, 2 validation/input, 3 hypothesis violation, 4 convergence failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HypothesisViolated { .. } | Error::NotBinary { .. } => 3,
            Error::ConvergenceFailure { .. } => 4,
            Error::InvalidInput(_) => 1,
            Error::Parse { .. }
            | Error::ZeroEntry { .. }
            | Error::NonMonotoneStates { .. }
            | Error::NonMonotoneBias { .. }
            | Error::MarginalMismatch { .. }
            | Error::UnorderedSignals { .. }
            | Error::ShapeMismatch(_)
            | Error::ZeroColumn(_)
            | Error::KappaOutOfRange { .. }
            | Error::DegenerateBias
            | Error::Io(_) => 2,
        }
    }

    /// Variant name, for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "Parse",
            Error::ZeroEntry { .. } => "ZeroEntry",
            Error::NonMonotoneStates { .. } => "NonMonotoneStates",
            Error::NonMonotoneBias { .. } => "NonMonotoneBias",
            Error::MarginalMismatch { .. } => "MarginalMismatch",
            Error::UnorderedSignals { .. } => "UnorderedSignals",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::ZeroColumn(_) => "ZeroColumn",
            Error::NotBinary { .. } => "NotBinary",
            Error::HypothesisViolated { .. } => "HypothesisViolated",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::KappaOutOfRange { .. } => "KappaOutOfRange",
            Error::DegenerateBias => "DegenerateBias",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
        }
    }
}
