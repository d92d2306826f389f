use thiserror::Error;

/// Errors raised by the structure, leveled-C, permutation and tower layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element not in universe: {0}")]
    UnknownElement(String),
    #[error("signature mismatch")]
    SignatureMismatch,
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("meet undefined for equal points")]
    EqualPoints,
    #[error("duplicate point at positions {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("not a partial isomorphism")]
    NotPartialIsomorphism,
    #[error("point already in domain")]
    PointInDomain,
    #[error("invalid level tree: {0}")]
    InvalidLevelTree(String),
    #[error("invalid permutation: {0}")]
    InvalidPerm(String),
    #[error("not a sigma-structure: {0}")]
    NotSigmaStructure(String),
    #[error("{0} exceeds desk scale")]
    ExceedsDeskScale(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not pairwise inequivalent")]
    NotPairwiseInequivalent,
    #[error("unknown point id: {0}")]
    UnknownPoint(String),
    #[error("arity mismatch for {symbol}: expected {expected}, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("ambient tower not in class D")]
    NotClassD,
    #[error("no witness in bounded search space")]
    NoWitness,
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
