use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing header")]
    MissingHeader,

    #[error("response column '{0}' absent")]
    MissingResponse(String),

    #[error("non-binary response value '{value}' on data row {row}")]
    NonBinaryResponse { row: usize, value: String },

    #[error("non-numeric cell '{value}' in column '{column}' on data row {row}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("ragged rows: data row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("single-class response")]
    SingleClass,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("duplicate variable '{0}'")]
    DuplicateVariable(String),

    #[error("unparsable config: {0}")]
    ConfigParse(String),

    #[error("unknown key '{0}'")]
    UnknownKey(String),

    #[error("value out of range: {key} = {value}")]
    OutOfRange { key: String, value: String },

    #[error("singular matrix")]
    SingularMatrix,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("models are not nested")]
    NotNested,

    #[error("degrees of freedom must be positive, got {0}")]
    NonPositiveDf(i64),

    #[error("invalid standard error for '{0}'")]
    InvalidStdError(String),

    #[error("zero variance in column '{0}'")]
    ZeroVariance(String),

    #[error("model has not converged")]
    NotConverged,

    #[error("empty model set")]
    EmptyModelSet,

    #[error("invalid study spec: {0}")]
    InvalidStudy(String),

    #[error("unknown method '{name}'; valid methods: {valid}")]
    UnknownMethod { name: String, valid: String },

    #[error("invalid sign expectation '{0}'")]
    InvalidSign(String),
}
