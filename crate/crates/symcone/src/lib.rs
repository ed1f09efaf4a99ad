pub mod error;
pub mod jordan;
pub mod conefunc;
pub mod quad;
pub mod spaces;
pub mod paleywiener;
pub mod operators;
pub mod report;
pub mod suites;
pub mod cli;

pub use error::{ConeError, Result};
