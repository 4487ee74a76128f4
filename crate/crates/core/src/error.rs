use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside of [{lower}, {upper}{close}")]
    OutOfRange {
        value: String,
        lower: String,
        upper: String,
        /// `)` or `]`, depending on whether the upper end is attained.
        close: char,
    },

    #[error("instance has no items that fit into the knapsack")]
    EmptyInstance,

    #[error("oracle too large: {needed} exceeds budget {budget}")]
    OracleTooLarge { needed: u128, budget: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
