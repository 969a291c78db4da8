//! Quadrature checks of Hardy inequalities, optimality and null-sequences
//! on truncated cones.

mod checks;
mod profiles;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use checks::{
    annulus_scale_invariance, best_constant_localized, hardy_margin, one_dimensional_hardy_margin,
    radial_null_sequence_energy, separable_decomposition_check, sharpness_probe,
    spherical_null_sequence_energy, upper_bound_witness, AnnulusReport, LocalizedEstimate,
    LocalizedOptions, NullSequenceReport, WitnessReport,
};
pub use profiles::{
    random_angular_bump, random_radial_bump, AngularProfile, NullSequenceSpec, QuadratureGrid,
    RadialProfile, TestFunction,
};

/// Seed used when a configuration does not name one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
}

/// Outcome of one check. `verdict` is `Fail` exactly when some margin is
/// below `-quadrature_error`; otherwise `Flagged` if any flag was raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub margins: Vec<f64>,
    pub quadrature_error: f64,
    pub grid: Vec<usize>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
    /// Named auxiliary values.
    pub values: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, margins: Vec<f64>, quadrature_error: f64, grid: Vec<usize>) -> Self {
        let mut r = Self {
            check: check.into(),
            margins,
            quadrature_error,
            grid,
            verdict: Verdict::Pass,
            flags: Vec::new(),
            values: BTreeMap::new(),
        };
        r.update_verdict();
        r
    }

    pub fn with_value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn flag(&mut self, message: impl Into<String>) {
        self.flags.push(message.into());
        self.update_verdict();
    }

    /// Replaces the margin-based verdict by an explicit outcome.
    pub fn force(&mut self, pass: bool) {
        self.verdict = if !pass {
            Verdict::Fail
        } else if self.flags.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Flagged
        };
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    fn update_verdict(&mut self) {
        self.verdict = if self.margins.iter().any(|m| !(*m >= -self.quadrature_error)) {
            Verdict::Fail
        } else if self.flags.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Flagged
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_uses_error_estimate() {
        assert_eq!(VerificationReport::new("a", vec![-1e-9], 1e-8, vec![]).verdict, Verdict::Pass);
        assert_eq!(VerificationReport::new("a", vec![-1e-7], 1e-8, vec![]).verdict, Verdict::Fail);
        assert_eq!(VerificationReport::new("a", vec![f64::NAN], 1.0, vec![]).verdict, Verdict::Fail);
        let mut r = VerificationReport::new("a", vec![1.0], 0.0, vec![]);
        r.flag("coarse");
        assert_eq!(r.verdict, Verdict::Flagged);
    }
}
