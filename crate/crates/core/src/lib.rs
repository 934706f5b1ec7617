//! Finite-size de Finetti bounds for continuous-variable QKD, and numerical
//! certificates for the operator inequalities they rest on.

pub mod coherent;
pub mod energytest;
pub mod error;
pub mod fockoracle;
pub mod haar;
pub mod mathkit;
pub mod parallel;
pub mod params;
pub mod subspace;

pub use error::{Error, Result};
pub use mathkit::LogReal;
