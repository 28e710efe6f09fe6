use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("row {row} sums to {sum} (must be 1 within 1e-12)")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("entry ({row}, {col}) = {value} is negative or not finite")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("parameter out of domain: {0}")]
    DomainError(String),

    #[error("quadrature did not converge after {evals} evaluations (estimate {estimate}, error {error})")]
    QuadratureNonConvergence { evals: usize, estimate: f64, error: f64 },

    #[error("quantization lost probability mass: row {row} sums to {sum} before renormalization")]
    MassLoss { row: usize, sum: f64 },

    #[error("unsupported LFSR degree {0} (supported: 2..=16)")]
    UnsupportedDegree(u32),

    #[error("LFSR seed must be nonzero")]
    ZeroSeed,

    #[error("length {n} with K = {k} gives prefix {prefix}, which is not 2^m - 1 for any m >= 2")]
    IncompatibleLength { n: usize, k: usize, prefix: usize },

    #[error("no valid sync-word length at or below {n_target} for K = {k}")]
    NoValidLength { n_target: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("output stream exhausted: needed {needed} symbols, have {available}")]
    StreamExhausted { needed: usize, available: usize },

    #[error("simulation infeasible: {0}")]
    SimulationInfeasible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Failures that can only surface mid-computation, as opposed to bad
    /// input. The command line maps these to exit code 3 and the rest to 2.
    pub fn is_runtime(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::MassLoss { .. }
                | Error::StreamExhausted { .. }
                | Error::SimulationInfeasible(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
