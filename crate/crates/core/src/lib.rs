//! Multiple-access channel coding with and without non-signaling assistance.

pub mod channel;
pub mod capacity;
pub mod classical;
pub mod concat;
pub mod error;
pub mod frontier;
pub mod ns;
pub mod orbit;

pub use channel::{Channel, P2pChannel};
pub use error::{Error, Result};
