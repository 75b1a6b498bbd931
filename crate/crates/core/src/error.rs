use thiserror::Error;

use crate::circuit::Mode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },

    #[error("{}qubit index {qubit} out of range for {num_qubits} qubits", line_prefix(*line))]
    QubitOutOfRange {
        line: Option<usize>,
        qubit: usize,
        num_qubits: usize,
    },

    #[error("{}qubit {qubit} appears twice in one gate", line_prefix(*line))]
    DuplicateQubit { line: Option<usize>, qubit: usize },

    #[error("{}gate `{gate}` is not allowed in {mode} mode", line_prefix(*line))]
    IllegalGate {
        line: Option<usize>,
        gate: String,
        mode: Mode,
    },

    #[error("circuit must have at least one qubit")]
    NoQubits,

    #[error("expected a {expected} mode circuit, got {found} mode")]
    ModeMismatch { expected: Mode, found: Mode },

    #[error("basis string has {found} bits, circuit has {expected} qubits")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid basis string `{0}`")]
    InvalidBasisString(String),

    #[error("variable x{0} has no value in the assignment")]
    MissingVariable(u32),

    #[error("invalid polynomial `{0}`")]
    InvalidPolynomial(String),

    #[error("{vars} path variables exceed the enumeration cap of {cap}")]
    CapExceeded { vars: u32, cap: u32 },

    #[error("{num_qubits} qubits exceed the limit of {max}")]
    TooManyQubits { num_qubits: usize, max: usize },

    #[error("output polynomial for qubit {qubit} has degree {degree}, expected at most 1")]
    NonLinearOutput { qubit: usize, degree: usize },

    #[error("at least 2 samples are needed, got {0}")]
    TooFewSamples(u64),

    #[error("malformed path system document: {0}")]
    Document(String),
}

fn line_prefix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn at_line(self, l: usize) -> Self {
        match self {
            Error::QubitOutOfRange {
                qubit, num_qubits, ..
            } => Error::QubitOutOfRange {
                line: Some(l),
                qubit,
                num_qubits,
            },
            Error::DuplicateQubit { qubit, .. } => Error::DuplicateQubit {
                line: Some(l),
                qubit,
            },
            Error::IllegalGate { gate, mode, .. } => Error::IllegalGate {
                line: Some(l),
                gate,
                mode,
            },
            other => other,
        }
    }
}
