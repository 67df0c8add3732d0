//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit count must be at least {min}, got {got}")]
    InvalidQubitCount { min: usize, got: usize },

    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gate operands must be distinct")]
    DuplicateQubits,

    #[error("state has zero norm")]
    ZeroNormState,

    #[error("rate too large: gamma {gamma} with {n_qubits} qubits leaves no no-jump weight")]
    RateTooLarge { gamma: f64, n_qubits: usize },

    #[error("jump operator {mu} has zero probability on this state")]
    ZeroProbabilityJump { mu: usize },

    #[error("requested measurement outcome has zero probability")]
    ZeroProbabilityOutcome,

    #[error("Kraus set violates completeness by {deviation:.3e}")]
    KrausIncomplete { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("{n} qubits exceed the dense-matrix cap of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
