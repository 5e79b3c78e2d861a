use thiserror::Error;

/// Errors raised by model construction, probability evaluation, estimation
/// and data handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid choice tree: {0}")]
    InvalidTree(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("missing covariate '{variable}' for individual '{individual}'")]
    MissingCovariate {
        variable: String,
        individual: String,
    },

    #[error("observation '{individual}' references unknown alternative '{alternative}'")]
    UnknownAlternative {
        individual: String,
        alternative: String,
    },

    #[error("non-finite objective while perturbing coordinate {coordinate} ({name})")]
    NonFiniteObjective { coordinate: usize, name: String },

    #[error("objective is not finite at the starting point")]
    NonFiniteStart,

    #[error(
        "negative Hessian is singular beyond the ridge cap: min eigenvalue {min_eigenvalue:.3e}, \
         condition estimate {condition:.3e}, last ridge tried {ridge:.3e}"
    )]
    SingularHessian {
        min_eigenvalue: f64,
        condition: f64,
        ridge: f64,
    },

    #[error("negative variance for coefficient '{name}': diagonal entry {value:.3e}")]
    NegativeVariance { name: String, value: f64 },

    #[error("unknown variable '{0}' (not in any utility covariate list)")]
    UnknownVariable(String),

    #[error("class index {index} out of range ({n_classes} classes)")]
    ClassOutOfRange { index: usize, n_classes: usize },

    #[error("constraint violated for '{name}': value {value} does not satisfy {tag}")]
    ConstraintViolated {
        name: String,
        value: f64,
        tag: String,
    },

    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("unknown column '{column}' in {path}")]
    UnknownColumn { column: String, path: String },

    #[error("column '{column}' has value {value} outside the documented range {range}")]
    CodeOutOfRange {
        column: String,
        value: i64,
        range: String,
    },

    #[error("negative kalym payment {value} for community '{community}'")]
    NegativePayment { value: f64, community: String },

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset is empty: no observations after filtering")]
    EmptyDataset,

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<String>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
