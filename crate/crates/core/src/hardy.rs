//! Hardy constants `λ(μ)`, exponents `γ±` and multiplicative solutions
//! derived from the cross-section eigenvalue `σ(μ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{norm, PointOnSphere};
use crate::spectral::{Eigenfunction, SpectralResult};

/// Tolerance below `-(n-2)²/4` within which `σ` is clamped to the bound.
pub const SIGMA_CLAMP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyConstants {
    pub n: usize,
    pub mu: f64,
    pub mu0: f64,
    pub sigma: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub lambda: f64,
    pub sigma_clamped: bool,
    pub flags: Vec<String>,
}

impl HardyConstants {
    /// Largest violation of `(γ₊-γ₋)² = 4λ` and `γ₊+γ₋ = 2-n`.
    pub fn identity_residual(&self) -> f64 {
        let d = self.gamma_plus - self.gamma_minus;
        let a = (d * d - 4.0 * self.lambda).abs();
        let b = (self.gamma_plus + self.gamma_minus - (2.0 - self.n as f64)).abs();
        a.max(b)
    }
}

pub fn derive_constants(n: usize, sigma: f64, mu: f64, mu0: f64) -> Result<HardyConstants> {
    if n < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if !sigma.is_finite() || !mu.is_finite() || !mu0.is_finite() {
        return Err(invalid("sigma, mu and mu0 must be finite"));
    }
    let nm2 = n as f64 - 2.0;
    let bound = -nm2 * nm2 / 4.0;
    if sigma < bound - SIGMA_CLAMP_TOLERANCE {
        return Err(Error::InconsistentSpectrum(format!(
            "sigma = {sigma} lies below -(n-2)²/4 = {bound}"
        )));
    }
    let clamped = sigma < bound;
    let sigma = sigma.max(bound);
    let disc = (nm2 * nm2 + 4.0 * sigma).max(0.0);
    let root = disc.sqrt();
    let mut flags = Vec::new();
    if clamped {
        flags.push("sigma clamped to -(n-2)²/4".into());
    }
    if mu >= mu0 - 1e-12 {
        flags.push("pair structure proved for mu < mu0 only".into());
    }
    Ok(HardyConstants {
        n,
        mu,
        mu0,
        sigma,
        gamma_plus: (-nm2 + root) / 2.0,
        gamma_minus: (-nm2 - root) / 2.0,
        lambda: disc / 4.0,
        sigma_clamped: clamped,
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceConstants {
    pub n: usize,
    pub mu: f64,
    pub alpha_plus: f64,
    pub eta: f64,
    pub lambda: f64,
}

impl HalfSpaceConstants {
    /// `x₁^{α₊}`.
    pub fn v0(&self, x: &[f64]) -> f64 {
        x[0].max(0.0).powf(self.alpha_plus)
    }

    /// `x₁^{α₊} |x|^{-η}`.
    pub fn v1(&self, x: &[f64]) -> f64 {
        self.v0(x) * norm(x).powf(-self.eta)
    }
}

pub fn halfspace_closed_form(n: usize, mu: f64) -> Result<HalfSpaceConstants> {
    if n < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if !(mu <= 0.25) {
        return Err(invalid(format!("mu must not exceed 1/4, got {mu}")));
    }
    let root = (1.0 - 4.0 * mu).sqrt();
    let alpha_plus = 0.5 * (1.0 + root);
    let eta = n as f64 - 1.0 + root;
    Ok(HalfSpaceConstants { n, mu, alpha_plus, eta, lambda: eta * eta / 4.0 })
}

/// `u(x) = |x|^γ φ(x/|x|)`.
#[derive(Debug, Clone)]
pub struct MultiplicativeSolution {
    pub gamma: f64,
    pub phi: Arc<Eigenfunction>,
}

impl MultiplicativeSolution {
    pub fn new(gamma: f64, phi: Arc<Eigenfunction>) -> Self {
        Self { gamma, phi }
    }

    pub fn pair(constants: &HardyConstants, phi: &SpectralResult) -> (Self, Self) {
        let p = Arc::new(phi.phi.clone());
        (Self::new(constants.gamma_plus, Arc::clone(&p)), Self::new(constants.gamma_minus, p))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r <= 0.0 {
            return Err(invalid("the origin is not in the cone"));
        }
        let p = PointOnSphere::normalized(x)?;
        Ok(r.powf(self.gamma) * self.phi.eval(&p)?)
    }
}

/// Residual of `|∇w|²/(4w²) = λ/|x|²` for `w = u₊/u₋`.
///
/// `w` is evaluated from both solutions; since `φ` cancels it must equal
/// `|x|^{γ₊-γ₋}`, whose logarithmic gradient is `(γ₊-γ₋) x/|x|²`. The
/// returned value is the larger of the ratio mismatch (relative) and the
/// weight mismatch (absolute, times `|x|²`).
pub fn supersolution_weight_identity(
    u_plus: &MultiplicativeSolution,
    u_minus: &MultiplicativeSolution,
    lambda: f64,
    samples: &[Vec<f64>],
) -> Result<f64> {
    let d = u_plus.gamma - u_minus.gamma;
    if d == 0.0 {
        return Err(invalid("the identity needs gamma_plus != gamma_minus"));
    }
    let mut worst: f64 = 0.0;
    for x in samples {
        let r = norm(x);
        let w = u_plus.eval(x)? / u_minus.eval(x)?;
        let expected = r.powf(d);
        worst = worst.max((w - expected).abs() / expected);
        // |∇ log w|² = d²/r²
        let lhs = d * d / (4.0 * r * r);
        worst = worst.max((lhs - lambda / (r * r)).abs() * r * r);
    }
    Ok(worst)
}

/// Ground state `|x|^{(2-n)/2} φ_μ(x/|x|)`.
pub fn ground_state_eval(constants: &HardyConstants, phi: &SpectralResult, x: &[f64]) -> Result<f64> {
    if x.len() != constants.n {
        return Err(invalid(format!("point has dimension {}, expected {}", x.len(), constants.n)));
    }
    let u = MultiplicativeSolution::new((2.0 - constants.n as f64) / 2.0, Arc::new(phi.phi.clone()));
    u.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants_match_examples() {
        let c = derive_constants(3, 2.0, 0.0, 0.25).unwrap();
        assert_eq!((c.gamma_plus, c.gamma_minus, c.lambda), (1.0, -2.0, 2.25));
        let c = derive_constants(2, 1.0, 0.0, 0.25).unwrap();
        assert_eq!((c.gamma_plus, c.gamma_minus, c.lambda), (1.0, -1.0, 1.0));
        let c = derive_constants(5, -2.25, 0.0, 0.25).unwrap();
        assert_eq!((c.gamma_plus, c.gamma_minus, c.lambda), (-1.5, -1.5, 0.0));
    }

    #[test]
    fn clamps_small_violations_and_rejects_large_ones() {
        let c = derive_constants(3, -0.25 - 1e-8, 0.1, 0.25).unwrap();
        assert!(c.sigma_clamped && c.lambda == 0.0);
        assert!(matches!(derive_constants(3, -0.3, 0.1, 0.25), Err(Error::InconsistentSpectrum(_))));
    }

    #[test]
    fn flags_pair_structure_at_mu0() {
        let c = derive_constants(2, 0.25, 0.25, 0.25).unwrap();
        assert!(c.flags.iter().any(|f| f.contains("mu < mu0")));
    }

    #[test]
    fn halfspace_examples() {
        let h = halfspace_closed_form(3, 0.0).unwrap();
        assert_eq!((h.alpha_plus, h.eta, h.lambda), (1.0, 3.0, 2.25));
        let h = halfspace_closed_form(3, 0.25).unwrap();
        assert_eq!((h.alpha_plus, h.eta, h.lambda), (0.5, 2.0, 1.0));
        let h = halfspace_closed_form(3, 2.0 / 9.0).unwrap();
        assert!((h.alpha_plus - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.eta - 7.0 / 3.0).abs() < 1e-15);
        assert!((h.lambda - 49.0 / 36.0).abs() < 1e-14);
        assert!(halfspace_closed_form(3, 0.3).is_err());
    }
}
