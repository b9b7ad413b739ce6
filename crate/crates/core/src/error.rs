use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("unknown value `{0}`")]
    UnknownValue(String),

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid model: {0}")]
    Model(String),

    #[error("line {line}: {msg}")]
    ModelFile { line: usize, msg: String },

    /// A Kripke structure violates one of the multi-decision model constraints.
    #[error("constraint {constraint} violated by worlds {0} and {1}", .witness.0, .witness.1)]
    Constraint {
        constraint: &'static str,
        witness: (usize, usize),
    },

    #[error("the model is disconnected; pick a root world")]
    Disconnected,

    #[error("knowledge is inconsistent: no classifier survived the update")]
    Inconsistent,

    #[error("{0} is not supported here")]
    Unsupported(&'static str),

    #[error("`{0}` is not a subset of `{1}`")]
    NotSubset(String, String),

    #[error("formula grows beyond the node budget of {0}")]
    NodeBudget(usize),

    #[error("oracle bounds too large: {0}")]
    BoundsTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
