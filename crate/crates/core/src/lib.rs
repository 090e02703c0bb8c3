//! Quasi-arithmetic means, their generators and the families whose means
//! tend to the maximum.

pub mod cli;
pub mod comparison;
pub mod constructions;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod means;
pub mod quadrature;

pub use error::{Error, Result};
