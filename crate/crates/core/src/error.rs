use thiserror::Error;

use crate::universal::StagedUniversal;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("order relation has a cycle through distinct elements `{0}` and `{1}`")]
    CycleError(String, String),

    #[error("`{0}` is not a bound of the poset ({1})")]
    InvalidBound(String, &'static str),

    #[error("not a lattice: `{0}` and `{1}` have no {2}")]
    NotALattice(String, String, &'static str),

    #[error("lattice is not distributive (witness `{0}`, `{1}`, `{2}`)")]
    NotDistributive(String, String, String),

    #[error("carrier has no {0} element")]
    MissingBound(&'static str),

    #[error("pair (`{0}`, `{1}`) is declared {2} consistent but its {3} does not exist")]
    MissingCertificate(String, String, &'static str, &'static str),

    #[error("rule {rule} concludes ({left}, {right}) {relation} consistent but the {op} is not in the carrier")]
    ConflictError {
        rule: String,
        left: String,
        right: String,
        relation: &'static str,
        op: &'static str,
    },

    #[error("`{0}` and `{1}` are not comparable")]
    NotComparable(String, String),

    #[error("consistency relations are non-reflexive: (`{0}`, `{0}`)")]
    ReflexivePair(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("valuation is not monotone: `{0}` <= `{1}` but v({0}) = 1, v({1}) = 0")]
    NonMonotoneValuation(String, String),

    #[error("valuation has {got} entries, expected {expected}")]
    ValuationLength { expected: usize, got: usize },

    #[error("size guard exceeded: {what} ({size} > {limit})")]
    SizeGuardExceeded {
        what: String,
        size: usize,
        limit: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("index lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("invalid index list: {0}")]
    InvalidIndices(String),

    #[error("partition is not a congruence: `{0}` ~ `{1}` but not after translating by `{2}`")]
    NotACongruence(String, String, String),

    #[error("staged construction did not stabilize within {depth} stages")]
    DepthExceeded {
        depth: usize,
        partial: Box<StagedUniversal>,
    },

    #[error("staged construction has not stabilized")]
    NotStabilized,

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn guard(what: impl Into<String>, size: usize, limit: usize) -> Self {
        Error::SizeGuardExceeded {
            what: what.into(),
            size,
            limit,
        }
    }
}
