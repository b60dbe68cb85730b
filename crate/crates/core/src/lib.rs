//! Last-passage percolation laboratory for the exponential corner growth model.
//!
//! The crate samples weight arrays under equilibrium, rarefaction and zeroed
//! boundaries ([`weights`]), solves the last-passage recurrence and extracts
//! maximal paths and exit points ([`lpp`]), builds competition interfaces and
//! the time-reversed field ([`interface`]), simulates the exclusion process
//! whose exchange times match the last-passage times in law ([`tasep`]), and
//! runs the Monte Carlo checks in [`experiments`].

pub mod error;
pub mod rng;
pub mod weights;
pub mod lpp;
pub mod interface;
pub mod stats;
pub mod tasep;
pub mod experiments;
pub mod config;
pub mod manifest;
pub mod verify;

#[cfg(test)]
mod fixtures;

pub use error::{Error, Result};
