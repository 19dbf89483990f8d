use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("wrong qubit count: expected {expected}, found {found}")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("collective map is singular")]
    SingularMap,

    #[error("state is zero")]
    ZeroState,

    #[error("state is not generic: root degeneracy gamma={gamma} for N={n_qubits}")]
    NonGeneric { gamma: usize, n_qubits: usize },

    #[error("solver failure: {detail} (best residual {residual:e})")]
    SolverFailure { residual: f64, detail: String },

    #[error("coefficient ordering is ill-defined: |c_{first}| and |c_{second}| tie at {magnitude:e}")]
    TieBreakUnstable {
        first: usize,
        second: usize,
        magnitude: f64,
    },

    #[error("decomposition has {terms} term(s), canonical form needs at least {required}")]
    InsufficientTerms { terms: usize, required: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Short stable name, used on standard error by the CLI and over the C ABI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::QubitMismatch { .. } => "QubitMismatch",
            Error::WrongQubitCount { .. } => "WrongQubitCount",
            Error::SingularMap => "SingularMap",
            Error::ZeroState => "ZeroState",
            Error::NonGeneric { .. } => "NonGeneric",
            Error::SolverFailure { .. } => "SolverFailure",
            Error::TieBreakUnstable { .. } => "TieBreakUnstable",
            Error::InsufficientTerms { .. } => "InsufficientTerms",
            Error::Parse { .. } => "ParseError",
        }
    }
}
