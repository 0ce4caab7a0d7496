use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {what} is {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("classical bit {index} out of range for {num_cbits} bits")]
    CbitIndex { index: usize, num_cbits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("classical bit {0} written by more than one measurement")]
    CbitReassigned(usize),
    #[error("{kind} expects {expected} qubit(s), got {got}")]
    Arity {
        kind: String,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("marker label {0:?} already used")]
    DuplicateMarker(String),
    #[error("no marker labelled {0:?}")]
    UnknownMarker(String),
    #[error("invalid Pauli character {0:?}")]
    InvalidPauli(char),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("invalid error spec: {0}")]
    ErrorSpec(String),
    #[error("uncorrectable: {0}")]
    Uncorrectable(String),
    #[error("routing failed: {0}")]
    Routing(String),
    #[error("tomography: {0}")]
    Tomography(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
