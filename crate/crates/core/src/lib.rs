pub mod analysis;
pub mod banded;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod expression;
pub mod lambda;
pub mod plot;
pub mod quadrature;
pub mod resolvent;
pub mod spectrum;

pub use error::{Error, Result};
