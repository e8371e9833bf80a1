use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected size {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vocabulary error: {0}")]
    Vocabulary(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid bijection: {0}")]
    InvalidBijection(String),

    #[error("enumeration limit exceeded: {count} items requested, budget is {budget}")]
    EnumerationLimit { count: u128, budget: u128 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("cannot evaluate over the empty domain")]
    EmptyDomain,

    #[error("formula has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),

    #[error("ill-formed formula: {0}")]
    IllFormed(String),

    #[error("no class oracle named `{0}` is registered")]
    UnresolvedOracle(String),

    #[error("schematic quantifier `Q` has no binding in this environment")]
    UnboundQuantifier,

    #[error("class oracle `{name}` is not closed under isomorphism: {detail}")]
    NotIsomorphismClosed { name: String, detail: String },

    #[error("invalid operation: {0}")]
    InvalidOperation(String),

    #[error("size {size} exceeds the configured cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("invalid proof file: {0}")]
    ProofFormat(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::EnumerationLimit { .. })
    }
}
