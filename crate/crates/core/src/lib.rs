pub mod error;
pub mod geometry;
pub mod objectives;
pub mod planner;
pub mod scenegen;
pub mod visibility;

pub use error::{Error, Result};
