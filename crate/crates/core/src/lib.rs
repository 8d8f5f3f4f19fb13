//! Angle operators of spin-model subfactors built from complex Hadamard
//! matrices: construction, spectra, and exact eigenpair certificates.

pub mod angle;
pub mod box_vector;
pub mod engine;
pub mod error;
pub mod exact;
pub mod hadamard;
pub mod jsonfmt;
pub mod reports;
pub mod spectral;

pub use error::{Result, SpinError};
