use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("expected {expected} qubits, got {got}")]
    QubitCountMismatch { expected: usize, got: usize },
    #[error("qubit count {0} outside supported range")]
    UnsupportedQubitCount(usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operation requires a pure state")]
    RequiresPureState,
    #[error("invalid Pauli label {0:?}")]
    InvalidPauli(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("T2 = {t2} exceeds 2*T1 = {two_t1}")]
    T2ExceedsLimit { t2: f64, two_t1: f64 },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("confusion matrix for qubit {0} is singular")]
    SingularConfusion(usize),
    #[error("invalid counts record: {0}")]
    InvalidCounts(String),
    #[error("missing bases: {}", .0.join(", "))]
    MissingBases(Vec<String>),
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
