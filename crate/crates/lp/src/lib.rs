//! Sparse linear programming: a bounded revised simplex that runs over
//! doubles or exact rationals, MPS interchange, and an external solver hook.

pub mod error;
pub mod external;
pub mod lu;
pub mod mps;
pub mod problem;
pub mod scalar;
pub mod simplex;
pub mod solve;

pub use error::LpError;
pub use num_rational::BigRational;
pub use problem::{ExactProgram, LinearProgram, Relation, Row, Sense};
pub use scalar::{format_rational, parse_rational, rational_to_f64, Scalar};
pub use solve::{
    check_value_is_one, solve, solve_with, Certificate, ExactSolution, LpSolution, LpStatus, SolveMode,
    SolverOptions, EXTERNAL_SOLVER_ENV,
};
