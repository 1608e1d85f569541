pub mod adaptation;
pub mod config;
pub mod datasets;
pub mod detectors;
pub mod dilemma;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod runner;
pub mod stream;

pub use error::{Error, Result};
