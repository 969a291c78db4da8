//! Half-space weights `V = Σ β_i / |X_i|²` with `X_i = (x₁, …, x_i)` and
//! their positive solutions `ψ = Π |X_i|^{-γ_i}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;

/// Samples closer than this to an axis `{X_k = 0}` are rejected.
pub const AXIS_COLLAR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FttSpec {
    pub n: usize,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

pub fn ftt_derive(n: usize, alphas: &[f64]) -> Result<FttSpec> {
    if n < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if alphas.len() != n {
        return Err(invalid(format!("expected {n} exponents, got {}", alphas.len())));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a <= 0.0)) {
        return Err(invalid(format!("exponents must be nonpositive, got {a}")));
    }
    let mut betas = Vec::with_capacity(n);
    let mut gammas = Vec::with_capacity(n);
    for (i, a) in alphas.iter().enumerate() {
        if i == 0 {
            betas.push(0.25 - a * a);
            gammas.push(a - 0.5);
        } else {
            let prev = alphas[i - 1];
            betas.push((prev - 0.5).powi(2) - a * a);
            gammas.push(a - prev + 0.5);
        }
    }
    Ok(FttSpec { n, alphas: alphas.to_vec(), betas, gammas })
}

impl FttSpec {
    /// `|X_i|²` for `i = 1..=n`.
    fn prefix_norms(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(invalid(format!("point has dimension {}, expected {}", x.len(), self.n)));
        }
        if !(x[0] > 0.0) {
            return Err(invalid("points must satisfy x₁ > 0"));
        }
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.n);
        for v in x {
            acc += v * v;
            out.push(acc);
        }
        Ok(out)
    }

    fn checked_prefix_norms(&self, x: &[f64], upto: usize) -> Result<Vec<f64>> {
        let rho = self.prefix_norms(x)?;
        if rho[..upto].iter().any(|r| r.sqrt() <= AXIS_COLLAR) {
            return Err(invalid("sample is too close to an axis X_k = 0"));
        }
        Ok(rho)
    }

    /// `Σ_{i≤j} β_i / |X_i|²`.
    pub fn potential(&self, x: &[f64], j: usize) -> Result<f64> {
        if j > self.n {
            return Err(invalid(format!("prefix length {j} exceeds dimension {}", self.n)));
        }
        let rho = self.checked_prefix_norms(x, j)?;
        Ok(self.betas[..j].iter().zip(&rho).map(|(b, r)| b / r).sum())
    }

    pub fn psi(&self, x: &[f64]) -> Result<f64> {
        let rho = self.checked_prefix_norms(x, self.n)?;
        let log: f64 = self.gammas.iter().zip(&rho).map(|(g, r)| -0.5 * g * r.ln()).sum();
        Ok(log.exp())
    }

    /// `Δψ/ψ` from `Δ log ψ = Σ -γ_i (i-2)/|X_i|²` and
    /// `∂_j log ψ = Σ_{i≥j} -γ_i x_j/|X_i|²`.
    pub fn laplacian_ratio(&self, x: &[f64]) -> Result<f64> {
        let rho = self.checked_prefix_norms(x, self.n)?;
        let mut lap = 0.0;
        for (i, (g, r)) in self.gammas.iter().zip(&rho).enumerate() {
            lap += -g * (i as f64 + 1.0 - 2.0) / r;
        }
        let mut grad2 = 0.0;
        for j in 0..self.n {
            let s: f64 = (j..self.n).map(|i| -self.gammas[i] / rho[i]).sum();
            grad2 += (s * x[j]).powi(2);
        }
        Ok(lap + grad2)
    }

    /// Homogeneity degree `-Σγ_i` of `ψ`.
    pub fn degree(&self) -> f64 {
        -self.gammas.iter().sum::<f64>()
    }

    pub fn classify(&self) -> FttClass {
        ftt_classify(self)
    }
}

pub fn ftt_potential(spec: &FttSpec, x: &[f64], j: usize) -> Result<f64> {
    spec.potential(x, j)
}

pub fn ftt_psi(spec: &FttSpec, x: &[f64]) -> Result<f64> {
    spec.psi(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FttResidual {
    /// `max |Δψ/ψ + V| / V` with a central-difference Laplacian.
    pub fd_residual: f64,
    /// Same with the closed-form Laplacian.
    pub analytic_residual: f64,
    pub checked: usize,
    pub rejected: usize,
    pub flags: Vec<String>,
}

/// Residual of `-Δψ/ψ = V` at the samples. The step is `fd_step·|x|`;
/// samples within `10³` steps of an axis are rejected and flagged.
pub fn ftt_residual_check(spec: &FttSpec, samples: &[Vec<f64>], fd_step: f64) -> Result<FttResidual> {
    if !(fd_step > 0.0 && fd_step < 0.1) {
        return Err(invalid("fd_step must lie in (0, 0.1)"));
    }
    let mut out = FttResidual { fd_residual: 0.0, analytic_residual: 0.0, checked: 0, rejected: 0, flags: Vec::new() };
    for x in samples {
        let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = fd_step * scale;
        let rho = match spec.prefix_norms(x) {
            Ok(r) => r,
            Err(_) => {
                out.rejected += 1;
                continue;
            }
        };
        if rho.iter().any(|r| r.sqrt() < 1e3 * h) || x[0] < 1e3 * h {
            out.rejected += 1;
            continue;
        }
        let v = spec.potential(x, spec.n)?;
        let psi = spec.psi(x)?;
        let mut lap = 0.0;
        let mut y = x.clone();
        for i in 0..spec.n {
            y[i] = x[i] + h;
            let p = spec.psi(&y)?;
            y[i] = x[i] - h;
            let m = spec.psi(&y)?;
            y[i] = x[i];
            lap += (p - 2.0 * psi + m) / (h * h);
        }
        let denom = v.abs().max(f64::MIN_POSITIVE);
        out.fd_residual = out.fd_residual.max((lap / psi + v).abs() / denom);
        out.analytic_residual = out.analytic_residual.max((spec.laplacian_ratio(x)? + v).abs() / denom);
        out.checked += 1;
    }
    if out.rejected > 0 {
        out.flags.push(format!("{} samples within 10³ steps of an axis were rejected", out.rejected));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FttClass {
    Critical,
    Subcritical,
    CriticalConjectured,
}

impl FttClass {
    pub fn description(&self) -> &'static str {
        match self {
            Self::Critical => "critical: the inequality cannot be improved",
            Self::Subcritical => "subcritical: Sobolev-improvable",
            Self::CriticalConjectured => "critical conjectured: the distinctness/negativity hypothesis is not met",
        }
    }
}

pub fn ftt_classify(spec: &FttSpec) -> FttClass {
    let (last, head) = spec.alphas.split_last().expect("at least two exponents");
    if *last < 0.0 {
        return FttClass::Subcritical;
    }
    let all_negative = head.iter().all(|a| *a < 0.0);
    let all_distinct = head.iter().enumerate().all(|(i, a)| head[..i].iter().all(|b| b != a));
    if all_negative || all_distinct {
        FttClass::Critical
    } else {
        FttClass::CriticalConjectured
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrabilityVerdict {
    Finite,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    /// `L` with inner cutoff `ε_L = 2^{-2^L}`.
    pub levels: Vec<u32>,
    pub partial_integrals: Vec<f64>,
    /// Ratios of successive increments.
    pub ratios: Vec<f64>,
    pub verdict: IntegrabilityVerdict,
}

/// Partial integrals of `(φ/(ρ log ρ))²` over `{ε_L < ρ ≤ 1/2}` on the
/// upper half-sphere, `ρ = ω₁`, `φ = ψ` on the sphere.
pub fn ftt_integrability_check(spec: &FttSpec, levels: u32) -> Result<IntegrabilityReport> {
    integrability_with_shift(spec, levels, 0.0)
}

/// As [`ftt_integrability_check`] with `γ₁` replaced by `γ₁ + shift`.
pub fn integrability_with_shift(spec: &FttSpec, levels: u32, shift: f64) -> Result<IntegrabilityReport> {
    if !(2..=3).contains(&spec.n) {
        return Err(invalid("direct quadrature is implemented for n = 2 and n = 3"));
    }
    if spec.alphas[spec.n - 1] != 0.0 {
        return Err(invalid("the integrability test needs alpha_n = 0"));
    }
    if !(3..=9).contains(&levels) {
        return Err(invalid("levels must lie in 3..=9"));
    }
    let mut gammas = spec.gammas.clone();
    gammas[0] += shift;
    let (g, w) = gauss_legendre(8);
    // ∫ over the slice {ρ = t} of φ², by symmetry of the remaining coordinates
    let slice = |t: f64| -> f64 {
        let base = t.powf(-2.0 * gammas[0]);
        if spec.n == 2 {
            // two points ω = (t, ±√(1-t²)), arc element dt/√(1-t²)
            return 2.0 * base / (1.0 - t * t).sqrt();
        }
        // ω = (t, √(1-t²) sin d, √(1-t²) cos d), dS = dt dd; graded toward d = 0
        let c2 = 1.0 - t * t;
        let f = |d: f64| (t * t + c2 * d.sin().powi(2)).powf(-gammas[1]);
        let mut breaks = vec![std::f64::consts::FRAC_PI_2];
        while *breaks.last().unwrap() > 1e-3 * t {
            breaks.push(0.5 * breaks.last().unwrap());
        }
        breaks.push(0.0);
        let mut s = 0.0;
        for p in breaks.windows(2) {
            for (gi, wi) in g.iter().zip(&w) {
                s += 0.5 * (p[0] - p[1]) * wi * f(0.5 * (p[0] + p[1]) + 0.5 * (p[0] - p[1]) * gi);
            }
        }
        4.0 * base * s
    };
    // integrate in u = ln t: dt = t du, integrand φ²/(t² ln² t)
    let integrand = |u: f64| -> f64 {
        let t = u.exp();
        slice(t) / (t * u * u)
    };
    let piece = |a: f64, b: f64| -> f64 {
        let panels = ((b - a) / 0.25).ceil().max(1.0) as usize;
        let mut s = 0.0;
        for p in 0..panels {
            let pa = a + (b - a) * p as f64 / panels as f64;
            let pb = a + (b - a) * (p + 1) as f64 / panels as f64;
            for (gi, wi) in g.iter().zip(&w) {
                s += 0.5 * (pb - pa) * wi * integrand(0.5 * (pa + pb) + 0.5 * (pb - pa) * gi);
            }
        }
        s
    };
    let ln2 = std::f64::consts::LN_2;
    let mut upper = -ln2;
    let mut total = 0.0;
    let mut levels_out = Vec::new();
    let mut partial = Vec::new();
    for l in 1..=levels {
        let lower = -(2f64.powi(l as i32)) * ln2;
        total += piece(lower, upper);
        upper = lower;
        levels_out.push(l);
        partial.push(total);
    }
    let increments: Vec<f64> = partial.windows(2).map(|p| p[1] - p[0]).collect();
    let ratios: Vec<f64> = increments.windows(2).map(|d| d[1] / d[0]).collect();
    let last = *partial.last().unwrap();
    let last_inc = *increments.last().unwrap();
    let tail = |k: usize| ratios.iter().rev().take(k);
    let verdict = if !last.is_finite() || tail(2).all(|r| !r.is_finite() || *r >= 0.99) && last_inc > 0.0 {
        IntegrabilityVerdict::Divergent
    } else if last_inc.abs() <= 1e-14 * last.abs() || tail(3).all(|r| *r < 0.9) {
        IntegrabilityVerdict::Finite
    } else {
        IntegrabilityVerdict::Inconclusive
    };
    Ok(IntegrabilityReport { levels: levels_out, partial_integrals: partial, ratios, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_examples() {
        let s = ftt_derive(2, &[0.0, 0.0]).unwrap();
        assert_eq!((s.betas.clone(), s.gammas.clone()), (vec![0.25, 0.25], vec![-0.5, 0.5]));
        let s = ftt_derive(2, &[-0.5, 0.0]).unwrap();
        assert_eq!((s.betas.clone(), s.gammas.clone()), (vec![0.0, 1.0], vec![-1.0, 1.0]));
        let s = ftt_derive(3, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.betas, vec![0.25; 3]);
        assert_eq!(s.gammas, vec![-0.5, 0.5, 0.5]);
        assert!(ftt_derive(2, &[0.1, 0.0]).is_err());
    }

    #[test]
    fn potential_and_psi_examples() {
        let s = ftt_derive(2, &[0.0, 0.0]).unwrap();
        assert!((s.potential(&[1.0, 1.0], 2).unwrap() - 0.375).abs() < 1e-15);
        assert_eq!(s.potential(&[1.0, 1.0], 0).unwrap(), 0.0);
        assert!((s.psi(&[1.0, 1.0]).unwrap() - 0.840_896_415_253_714_5).abs() < 1e-12);
        let s3 = ftt_derive(3, &[0.0, 0.0, 0.0]).unwrap();
        assert!((s3.potential(&[1.0, 1.0, 1.0], 3).unwrap() - (0.25 + 0.125 + 0.25 / 3.0)).abs() < 1e-15);
        let h = ftt_derive(2, &[-0.5, 0.0]).unwrap();
        assert!((h.psi(&[1.0, 2.0]).unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(h.psi(&[1e-7, 1.0]).is_err());
    }

    #[test]
    fn classifier_examples() {
        assert_eq!(ftt_derive(3, &[-0.3, -0.2, 0.0]).unwrap().classify(), FttClass::Critical);
        assert_eq!(ftt_derive(3, &[0.0, 0.0, -0.1]).unwrap().classify(), FttClass::Subcritical);
        assert_eq!(ftt_derive(3, &[-0.2, -0.2, 0.0]).unwrap().classify(), FttClass::Critical);
        assert_eq!(ftt_derive(3, &[0.0, 0.0, 0.0]).unwrap().classify(), FttClass::CriticalConjectured);
    }
}
