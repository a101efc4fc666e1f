//! Numerical laboratory for a singular-weight p-Laplacian flow with a
//! logarithmic source: potential-well constants, Nehari classification,
//! semi-implicit evolution, and closed-form theorem checkers.

pub mod checkers;
pub mod config;
pub mod constants;
pub mod domain;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod functionals;
pub mod nehari;
pub mod profiles;
pub mod report;
pub mod trials;

pub use error::{Error, Result};
