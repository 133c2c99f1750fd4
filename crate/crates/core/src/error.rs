use nsmac_lp::LpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("channel file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("object would hold {needed} entries, limit is {limit}")]
    TooLarge { needed: u128, limit: u128 },
    #[error("exact arithmetic requested but the channel has no rational entries")]
    NotExact,
    #[error("code was built for a different channel")]
    ChannelMismatch,
    #[error("induced channel entry {0} is negative beyond rounding")]
    NegativeEntry(f64),
    #[error("LP solve failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
