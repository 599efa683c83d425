use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("point {point} out of range 1..={degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("point {0} appears more than once")]
    DuplicatePoint(usize),

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("group of order {order} exceeds the element enumeration cap {cap}")]
    GroupTooLarge { order: u128, cap: usize },

    #[error("invalid parameters: {0}")]
    Parameters(String),

    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),

    #[error("Kramer-Mesner entry for row {row}, column {column} is {numerator}/{denominator}")]
    BadEntry {
        row: usize,
        column: usize,
        numerator: u64,
        denominator: u64,
    },

    #[error("orbit image not found among the good orbits: {0}")]
    OrbitNotFound(String),

    #[error("encoding {0} requires normalizer classes")]
    MissingClasses(char),

    #[error("duplicate block {0} while expanding orbits")]
    DuplicateBlock(String),

    #[error("refinement search exceeded the node budget of {0}")]
    BudgetExceeded(u64),

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}
