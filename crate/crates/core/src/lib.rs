//! Differential geometry of Abresch–Rosenberg pairs and curves in the
//! homogeneous spaces E(κ, τ).

pub mod ambient;
pub mod arpair;
pub mod cli;
pub mod curvelab;
pub mod error;
pub mod gallery;
pub mod real;
pub mod report;
pub mod surface;

pub use error::{GeomError, Result};
