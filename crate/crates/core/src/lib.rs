//! Strictly sign-regular matrices and totally positive discrete-time systems.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod matrix;
pub mod minors;
pub mod report;
pub mod sign_regularity;
pub mod sign_variation;
pub mod spectral;
pub mod vdp;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, IndexSet};
