//! Non-signaling assisted coding: programs, solutions, and strategies.

mod boxes;
mod code;
mod indep;
mod program;

pub use boxes::*;
pub use code::*;
pub use indep::*;
pub use program::*;
