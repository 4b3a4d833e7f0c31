use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("{what} needs n <= {cap} qubits, got {n}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bit string {0:?}")]
    InvalidBits(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("too few distinct depths for a decay fit: need 3, got {0}")]
    TooFewDepths(usize),

    #[error("signal is SPAM dominated: every value is at or below the 2^-n offset")]
    SpamDominated,
}

impl CoreError {
    /// True for errors raised because a size cap was hit.
    pub fn is_cap(&self) -> bool {
        matches!(self, CoreError::CapExceeded { .. })
    }
}

pub(crate) fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(CoreError::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}
