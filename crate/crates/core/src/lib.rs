//! Hurwitz products of positive matrices: exact word counts, trace
//! computation, positivity thresholds and extremal searches.

pub mod asymptotics;
pub mod error;
pub mod extremal;
pub mod hurwitz;
pub mod matrix;
pub mod sampling;
pub mod scan;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
