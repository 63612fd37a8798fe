use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for {bound} modes or qubits")]
    InvalidIndex { index: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{n} qubits exceeds the limit of {limit} for this operation")]
    TooLarge { n: usize, limit: usize },
    #[error("operator is not Hermitian (anti-Hermitian residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("generator is not anti-Hermitian (Hermitian residual {residual:e})")]
    NotAntiHermitian { residual: f64 },
    #[error("unsupported encoding for this operation: {0}")]
    UnsupportedScheme(String),
    #[error("operator acts on tapered qubit {qubit} with a non-diagonal Pauli")]
    NotSymmetric { qubit: usize },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("parameter vector has length {found}, ansatz expects {expected}")]
    ParameterMismatch { expected: usize, found: usize },
    #[error("evolution collapsed the state norm to {norm:e}")]
    ZeroOverlap { norm: f64 },
    #[error("extrapolation inputs change sign or vanish")]
    SignInconsistent,
    #[error("scale factors must be distinct and at least one; got {0}")]
    InvalidScale(f64),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("no samples survived post-selection")]
    AllRejected,
    #[error("Hamiltonian partition does not reproduce the target operator (residual {residual:e})")]
    PartitionIncomplete { residual: f64 },
    #[error("1-RDM is not symmetric (residual {residual:e})")]
    NotSymmetricRdm { residual: f64 },
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    #[error("gate cannot be differentiated: {0}")]
    UnsupportedGate(String),
    #[error("every overlap eigenvalue fell below the cutoff")]
    DegenerateSubspace,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
