use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown firm `{0}`")]
    UnknownFirm(String),
    #[error("unknown worker `{0}`")]
    UnknownWorker(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("firm `{firm}` lists the worker set {set} twice")]
    DuplicateSet { firm: String, set: String },
    #[error("firm `{0}` lists the empty set in its preference chain")]
    EmptySetInChain(String),
    #[error("worker `{worker}` lists firm `{firm}` twice")]
    DuplicatePreference { worker: String, firm: String },
    #[error("too many agents: {0} exceeds the supported maximum of 64")]
    TooManyAgents(usize),
    #[error("malformed matching: {0}")]
    MalformedMatching(String),
    #[error("firm `{0}` has no acceptable set and cannot be decomposed")]
    NoAcceptableSet(String),
    #[error("firm `{0}` does not have a complementary preference")]
    NotComplementary(String),
    #[error("firm `{0}` must have exactly one acceptable set in a Leontief market")]
    NotSingleSet(String),
    #[error("malformed fractional matching: {0}")]
    MalformedFractional(String),
    #[error("no 0/1 solution exists for the constraint system ({0})")]
    NoIntegralSolution(String),
    #[error("stable transformation broke fractional stability at firm `{0}`")]
    TransformationUnstable(String),
    #[error("vector does not satisfy the constraint system: {0}")]
    ConstraintViolated(String),
    #[error("invalid technology tree: {0}")]
    InvalidTree(String),
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}
