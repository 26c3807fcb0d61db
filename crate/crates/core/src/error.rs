use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("partition enumeration for k = {k} exceeds the budget of k <= {budget}")]
    DepthTooLarge { k: usize, budget: usize },

    #[error("sequence has {available} entries, index {requested} is out of range")]
    InsufficientDepth { requested: usize, available: usize },

    #[error("expansions are taken over different weight sequences")]
    SequenceMismatch,

    #[error("expansions live on different sectors")]
    SectorMismatch,

    #[error("constant term {value} is not zero within {tolerance:e}")]
    NonzeroConstantTerm { value: String, tolerance: f64 },

    #[error("point (r = {r}, theta = {theta}) is outside the domain of {function}")]
    EvaluationDomain { function: String, r: f64, theta: f64 },

    #[error("precision budget of {cap_bits} bits exceeded: {context}")]
    BudgetExceeded { cap_bits: u32, context: String },

    #[error("gamma is evaluated only for positive arguments, got {0}")]
    NonpositiveArgument(f64),

    #[error("alpha = {0} is outside the admissible range")]
    AlphaOutOfRange(f64),

    #[error("argument theta = {0} lies outside S_2")]
    OutsideS2(f64),

    #[error("no ray angle satisfies the side conditions at theta = {0}")]
    RayAngleInfeasible(f64),

    #[error("sequence is not log-convex (first violation at j = {0})")]
    NotLogConvex(usize),

    #[error("the transform requires an unbounded domain sector")]
    DomainNotUnbounded,

    #[error("L is not log-convex and no equivalent log-convex witness was supplied: {0}")]
    NoLcWitness(String),

    #[error("alpha > 2 requires alphaprime > alpha")]
    AlphaprimeMissing,

    #[error("coefficient {0} vanishes")]
    ZeroCoefficient(usize),

    #[error("coefficient {0} is not real")]
    NonrealCoefficient(usize),

    #[error("cannot parse {what}: {input}")]
    Parse { what: String, input: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(what: &str, input: impl Into<String>) -> Self {
        Error::Parse {
            what: what.to_string(),
            input: input.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
