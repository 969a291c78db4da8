//! Optimal Hardy constants for `-Δ - μ/δ²` on cones, computed from the
//! principal eigenvalue of the cross-section problem and checked against
//! closed-form families and variational estimates.

pub mod closed_forms;
pub mod error;
pub mod geometry;
pub mod hardy;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod verification;

pub use error::{Error, Result};
