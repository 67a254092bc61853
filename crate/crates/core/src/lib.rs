//! Steiner symmetrization processes driven by the Kakutani–Fibonacci sequence.

pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod fmt;
pub mod metrics;
pub mod partitions;
pub mod planar_sets;
pub mod process;
pub mod registry;
pub mod sequences;

pub use error::{Error, Result};
