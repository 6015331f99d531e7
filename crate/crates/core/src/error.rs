use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {qubits} modes")]
    IndexOutOfRange { index: u64, qubits: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("invalid mode indexing: {0}")]
    InvalidIndexing(String),

    #[error("invalid interaction term: {0}")]
    InvalidTerm(String),

    #[error("gate position {position} out of range for {qubits} qubits")]
    QubitOutOfRange { position: usize, qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("measurement family {0} is not valid for this term")]
    InvalidMeasurementFamily(String),

    #[error("parameter vector outside the ansatz domain: {0}")]
    OutOfDomain(String),

    #[error("ansatz normalization vanished (all sampled families excluded)")]
    DegenerateNormalization,

    #[error("no sample set for circuit `{0}`")]
    MissingSampleSet(String),

    #[error("sample archive does not match this problem: {0}")]
    ArchiveMismatch(String),

    #[error("system too large for dense treatment: {qubits} modes (limit {limit})")]
    TooLarge { qubits: usize, limit: usize },

    #[error("operator is not hermitian")]
    NonHermitian,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::UnknownMode(_) => "unknown_mode",
            Error::InvalidIndexing(_) => "invalid_indexing",
            Error::InvalidTerm(_) => "invalid_term",
            Error::QubitOutOfRange { .. } => "qubit_out_of_range",
            Error::InvalidGate(_) => "invalid_gate",
            Error::InvalidMeasurementFamily(_) => "invalid_measurement_family",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::DegenerateNormalization => "degenerate_normalization",
            Error::MissingSampleSet(_) => "missing_sample_set",
            Error::ArchiveMismatch(_) => "archive_mismatch",
            Error::TooLarge { .. } => "too_large",
            Error::NonHermitian => "non_hermitian",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
