use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("row {row} references variable {var} which does not exist")]
    BadIndex { row: usize, var: usize },
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(usize),
    #[error("solver finished with status {0:?}")]
    NotOptimal(crate::solve::LpStatus),
    #[error("exact mode needs rational coefficients")]
    NotRational,
    #[error("external solver: {0}")]
    External(String),
    #[error("malformed LP file at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
