use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A size parameter exceeds what the implementation is willing to allocate.
    #[error("capacity exceeded: {what} = {requested} exceeds limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent arguments.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A theory predicate failed where the caller required it to hold.
    #[error("validity violation: {0}")]
    Validity(String),

    /// Grid refinement did not settle before the grid cap.
    #[error("no convergence up to N = {grid}: last {last}, previous {previous}")]
    Convergence { grid: usize, last: f64, previous: f64 },
}

impl Error {
    pub(crate) fn capacity(what: &'static str, requested: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Capacity {
            what,
            requested: requested.into(),
            limit: limit.into(),
        }
    }
}
