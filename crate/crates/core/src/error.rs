use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown operator '{symbol}' at {pos} for signature {signature}")]
    UnknownOperator {
        symbol: String,
        pos: usize,
        signature: String,
    },

    #[error("operator '{symbol}' expects {expected} argument(s), got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("identifier '{name}' at {pos} is used both as a group and as a proposition variable")]
    SortClash { name: String, pos: usize },

    #[error("unbound group variable '{0}'")]
    UnboundGroup(String),

    #[error("unbound proposition variable '{0}'")]
    UnboundProp(String),

    #[error("operator '{symbol}' is not part of theory {theory}")]
    OperatorNotInTheory { symbol: String, theory: String },

    #[error("{what} cap exceeded: need {needed}, limit {limit}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid document: {0}")]
    Document(String),

    #[error("infeasible bounds: {0}")]
    Infeasible(String),

    #[error("time limit of {0:?} exceeded")]
    Timeout(std::time::Duration),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn cap(what: &'static str, needed: u128, limit: u128) -> Self {
        Error::CapExceeded {
            what,
            needed,
            limit,
        }
    }

    /// Resource exhaustion, as opposed to a logical or input failure.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::Timeout(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
