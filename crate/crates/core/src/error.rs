use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl ParseError {
    pub fn new(input: &str, reason: impl Into<String>) -> Self {
        ParseError { input: input.to_string(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HochschildError {
    #[error(
        "unsupported endomorphism shape {0}: reduction needs b1 = 1, b2 = 0 and kernel of [phi] - I generated by (1,0)"
    )]
    UnsupportedEndo(String),
    #[error("chain is not a cycle: d1 = {0}")]
    NotACycle(String),
    #[error("chain has a term with marker outside the requested class: {0}")]
    WrongClass(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("internal reduction error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("boundary maps of the model homotopy have fixed points")]
    BoundaryFixedPoints,
    #[error("trace chain fails the cycle criterion: d1 = {0}")]
    NotACycle(String),
    #[error(transparent)]
    Hochschild(#[from] HochschildError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("fixed set component at t = {0} is not a circle")]
    NonCircle(String),
    #[error("homotopy pieces do not tile [0,1] consistently: {0}")]
    BadPieces(String),
    #[error("boundary maps have fixed points")]
    BoundaryFixedPoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("invalid bundle data: {0}")]
    Invalid(String),
    #[error("no case of the classification table matches: {0}")]
    NoMatch(String),
    #[error("matrix is not unimodular: {0}")]
    NotUnimodular(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("map is not cellular: {0}")]
    NotCellular(String),
}
