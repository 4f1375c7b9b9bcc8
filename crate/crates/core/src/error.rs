use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gromov product of a boundary point with itself is infinite")]
    InfiniteProduct,

    #[error("boundary word resolved to depth {available}, but depth {required} is needed")]
    InsufficientDepth { required: usize, available: usize },

    #[error("resolution budget exceeded: depth {required} > budget {budget}")]
    ResolutionBudget { required: usize, budget: usize },

    #[error(
        "annulus too large: |S_t| = {size} exceeds budget {budget}; largest feasible t is {max_t}"
    )]
    AnnulusBudget {
        size: u128,
        budget: u128,
        max_t: f64,
    },

    #[error("orbit cache covers radius {covered}, but radius {required} is needed")]
    CacheExhausted { covered: f64, required: f64 },

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
