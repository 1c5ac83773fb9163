//! Computer algebra for Smith long exact sequences of bordism groups.

pub mod anderson;
pub mod bordismdb;
pub mod error;
pub mod fgab;
pub mod gradedalg;
pub mod lescore;

pub use error::{Error, Result};
