pub mod error;
pub mod blocks;
pub mod cli;
pub mod discrepancy;
pub mod kernel;
pub mod report;
pub mod totient;

pub use error::{Error, Result};
pub use kernel::{ExponentC, Interval, Precision};
