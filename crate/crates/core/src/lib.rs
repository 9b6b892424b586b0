pub mod asymptotics;
pub mod cache;
pub mod check;
pub mod cli;
pub mod config;
pub mod error;
pub mod flow;
pub mod invariants;
pub mod scalar;
pub mod series;
pub mod singularity;

pub use error::{Error, Result};
