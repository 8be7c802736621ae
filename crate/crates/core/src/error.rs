use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// Parameters fall outside the admissible set of a log-partition function
    /// or a special function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A posterior update left the admissible set. The shipped models never
    /// trigger this on valid input; it signals bad hyperparameters.
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("enumeration cap exceeded: n = {n} exceeds cap {cap} (Bell({n}) ~ {bell:.3e} partitions)")]
    CapExceeded { n: usize, cap: usize, bell: f64 },

    #[error("combinatorial guard exceeded: C({n}, {k}) = {count:.3e} > {limit:.3e}")]
    TooManySubsets {
        n: usize,
        k: usize,
        count: f64,
        limit: f64,
    },

    #[error("LP solver failure: {0}")]
    SolverFailure(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {col}: cannot parse {cell:?} as a finite number")]
    NonNumeric { row: usize, col: usize, cell: String },

    #[error("row {row} duplicates row {first}; pass a jitter epsilon to perturb duplicates")]
    DuplicatePoint { row: usize, first: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::Domain(_) => "domain",
            Error::ModelInconsistency(_) => "model-inconsistency",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::TooManySubsets { .. } => "too-many-subsets",
            Error::SolverFailure(_) => "solver-failure",
            Error::Quadrature { .. } => "quadrature",
            Error::RaggedRow { .. } => "ragged-row",
            Error::NonNumeric { .. } => "non-numeric",
            Error::DuplicatePoint { .. } => "duplicate-point",
            Error::EmptyDataset => "empty-dataset",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
