//! The inequality field `E = -Δδ + (η/|x|²)(x·∇δ - δ)`, the ground-state
//! identity behind it, and the weak superharmonicity of `δ` on cones.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{norm, ConeSpec, CrossSection, PointOnSphere};
use crate::quadrature::gauss_on;

/// Relative finite-difference step `h = FD_STEP·|x|`.
pub const FD_STEP: f64 = 1e-4;
/// Width of the excluded collars, relative to `|x|`.
const RIDGE_COLLAR: f64 = 1e-6;

/// `η(μ) = n - 1 + √(1 - 4μ)`.
pub fn eta(n: usize, mu: f64) -> Result<f64> {
    if !(mu <= 0.25) {
        return Err(invalid(format!("mu must be at most 1/4, got {mu}")));
    }
    Ok(n as f64 - 1.0 + (1.0 - 4.0 * mu).sqrt())
}

fn alpha_plus(mu: f64) -> f64 {
    0.5 * (1.0 + (1.0 - 4.0 * mu).sqrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ball of radius `R` centred at `x0` with `|x0| = R`, so `0 ∈ ∂B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub radius: f64,
    pub center: Vec<f64>,
    pub mu: f64,
}

impl BallSpec {
    pub fn new(radius: f64, center: Vec<f64>, mu: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("ball radius must be positive"));
        }
        if center.len() < 2 {
            return Err(invalid("ball dimension must be at least 2"));
        }
        if (norm(&center) - radius).abs() > 1e-12 * radius.max(1.0) {
            return Err(invalid("the ball must touch the origin: |x0| = R"));
        }
        eta(center.len(), mu)?;
        Ok(Self { radius, center, mu })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn delta(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.radius - norm(&d)
    }

    /// `|x|² - (R|x0 - x| - x0·(x0 - x))`.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = self.center.iter().zip(x).map(|(a, b)| a - b).collect();
        dot(x, x) - (self.radius * norm(&d) - dot(&self.center, &d))
    }

    pub fn evaluator(&self) -> DeltaEvaluator {
        DeltaEvaluator::Ball { radius: self.radius, center: self.center.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaEvaluator {
    /// `{x₁ > 0}`.
    HalfSpace { n: usize },
    Ball { radius: f64, center: Vec<f64> },
    Cone { spec: ConeSpec },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMethod {
    Auto,
    ClosedForm,
    FiniteDifference,
}

/// `(δ, ∇δ, Δδ)` at a smooth point.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl DeltaEvaluator {
    pub fn dim(&self) -> usize {
        match self {
            Self::HalfSpace { n } => *n,
            Self::Ball { center, .. } => center.len(),
            Self::Cone { spec } => spec.dim(),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(invalid(format!("point has dimension {}, expected {}", x.len(), self.dim())));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        match self {
            Self::HalfSpace { .. } => Ok(x[0]),
            Self::Ball { radius, center } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                Ok(radius - norm(&d))
            }
            Self::Cone { spec } => spec.delta(x),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        match self {
            Self::HalfSpace { .. } | Self::Ball { .. } => true,
            Self::Cone { spec } => matches!(spec.cross_section(), CrossSection::Sector { .. }),
        }
    }

    /// Closed-form jet; rejects points off the domain, on ridges and on
    /// the singular set.
    pub fn closed_form(&self, x: &[f64]) -> Result<DeltaJet> {
        self.check_dim(x)?;
        let scale = norm(x);
        match self {
            Self::HalfSpace { n } => {
                if !(x[0] > 0.0) {
                    return Err(Error::OutsideCrossSection("x₁ must be positive".into()));
                }
                let mut gradient = vec![0.0; *n];
                gradient[0] = 1.0;
                Ok(DeltaJet { value: x[0], gradient, laplacian: 0.0 })
            }
            Self::Ball { radius, center } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                let rho = norm(&d);
                if rho <= RIDGE_COLLAR * radius {
                    return Err(invalid("point lies on the ridge at the ball centre"));
                }
                if rho >= *radius {
                    return Err(Error::OutsideCrossSection("point is outside the ball".into()));
                }
                Ok(DeltaJet {
                    value: radius - rho,
                    gradient: d.iter().map(|v| -v / rho).collect(),
                    laplacian: -(x.len() as f64 - 1.0) / rho,
                })
            }
            Self::Cone { spec } => {
                let CrossSection::Sector { alpha } = *spec.cross_section() else {
                    return Err(invalid("closed-form derivatives are available for sectors only"));
                };
                sector_jet(alpha, x, scale)
            }
        }
    }

    /// Central-difference jet with step `fd_step·|x|`; points where the
    /// one-sided differences disagree are rejected as ridge-adjacent.
    pub fn finite_difference(&self, x: &[f64], fd_step: f64) -> Result<DeltaJet> {
        self.check_dim(x)?;
        let h = fd_step * norm(x);
        if !(h > 0.0) {
            return Err(invalid("finite differences need x ≠ 0 and a positive step"));
        }
        let value = self.value(x)?;
        if !(value > 10.0 * h) {
            return Err(invalid("point is within ten steps of the boundary"));
        }
        let mut gradient = vec![0.0; x.len()];
        let mut laplacian = 0.0;
        let mut y = x.to_vec();
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let p = self.value(&y)?;
            y[i] = x[i] - h;
            let m = self.value(&y)?;
            y[i] = x[i];
            let (fwd, bwd) = ((p - value) / h, (value - m) / h);
            if (fwd - bwd).abs() > 1e-3 * fwd.abs().max(bwd.abs()).max(1.0) {
                return Err(invalid("point is adjacent to a ridge of δ"));
            }
            gradient[i] = (p - m) / (2.0 * h);
            laplacian += (p - 2.0 * value + m) / (h * h);
        }
        Ok(DeltaJet { value, gradient, laplacian })
    }

    fn jet(&self, x: &[f64], method: FieldMethod) -> Result<(DeltaJet, FieldMethod)> {
        match method {
            FieldMethod::ClosedForm => Ok((self.closed_form(x)?, FieldMethod::ClosedForm)),
            FieldMethod::FiniteDifference => Ok((self.finite_difference(x, FD_STEP)?, FieldMethod::FiniteDifference)),
            FieldMethod::Auto if self.has_closed_form() => self.jet(x, FieldMethod::ClosedForm),
            FieldMethod::Auto => self.jet(x, FieldMethod::FiniteDifference),
        }
    }
}

fn sector_jet(alpha: f64, x: &[f64], r: f64) -> Result<DeltaJet> {
    if r == 0.0 {
        return Err(invalid("the vertex is singular"));
    }
    let mut theta = x[1].atan2(x[0]);
    if theta < 0.0 {
        theta += TAU;
    }
    if !(theta > 0.0 && theta < alpha) {
        return Err(Error::OutsideCrossSection(format!("angle {theta} is outside (0, {alpha})")));
    }
    #[derive(PartialEq, Clone, Copy)]
    enum Piece {
        First,
        Second,
        Vertex,
    }
    let first = if theta <= FRAC_PI_2 { (r * theta.sin(), Piece::First) } else { (r, Piece::Vertex) };
    let second = if alpha - theta <= FRAC_PI_2 { (r * (alpha - theta).sin(), Piece::Second) } else { (r, Piece::Vertex) };
    let (active, other) = if first.0 <= second.0 { (first, second) } else { (second, first) };
    let tol = RIDGE_COLLAR;
    let near_switch = (theta - FRAC_PI_2).abs() < tol || (alpha - theta - FRAC_PI_2).abs() < tol;
    if (other.1 != active.1 && (other.0 - active.0).abs() < tol * r) || near_switch {
        return Err(invalid("point is adjacent to a ridge of δ"));
    }
    Ok(match active.1 {
        Piece::First => DeltaJet { value: x[1], gradient: vec![0.0, 1.0], laplacian: 0.0 },
        Piece::Second => DeltaJet {
            value: x[0] * alpha.sin() - x[1] * alpha.cos(),
            gradient: vec![alpha.sin(), -alpha.cos()],
            laplacian: 0.0,
        },
        Piece::Vertex => DeltaJet { value: r, gradient: vec![x[0] / r, x[1] / r], laplacian: 1.0 / r },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityFieldSample {
    pub x: Vec<f64>,
    pub e_value: f64,
    pub method: FieldMethod,
}

pub fn diff_ineq_field(evaluator: &DeltaEvaluator, mu: f64, x: &[f64], method: FieldMethod) -> Result<InequalityFieldSample> {
    let eta = eta(evaluator.dim(), mu)?;
    let r2 = dot(x, x);
    if !(r2 > 0.0) {
        return Err(invalid("the origin is singular"));
    }
    let (jet, used) = evaluator.jet(x, method)?;
    let e_value = -jet.laplacian + eta / r2 * (dot(x, &jet.gradient) - jet.value);
    Ok(InequalityFieldSample { x: x.to_vec(), e_value, method: used })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallScanReport {
    pub samples: usize,
    pub min_e: f64,
    pub min_margin: f64,
    /// A sample attaining `min_e`.
    pub argmin: Vec<f64>,
}

/// Uniform seeded samples in the ball, minus collars of width `1e-6`
/// around the centre, the sphere and the origin.
pub fn ball_inequality_scan(ball: &BallSpec, sample_count: usize, seed: u64) -> Result<BallScanReport> {
    if sample_count == 0 {
        return Err(invalid("sample_count must be positive"));
    }
    let eval = ball.evaluator();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ball.dim();
    let r = ball.radius;
    let collar = 1e-6 * r;
    let mut report = BallScanReport { samples: 0, min_e: f64::INFINITY, min_margin: f64::INFINITY, argmin: Vec::new() };
    while report.samples < sample_count {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
        let rho = norm(&y);
        if rho >= r - collar || rho <= collar {
            continue;
        }
        let x: Vec<f64> = y.iter().zip(&ball.center).map(|(a, b)| a + b).collect();
        if norm(&x) <= collar {
            continue;
        }
        let s = diff_ineq_field(&eval, ball.mu, &x, FieldMethod::ClosedForm)?;
        report.min_margin = report.min_margin.min(ball.margin(&x));
        if s.e_value < report.min_e {
            report.min_e = s.e_value;
            report.argmin = x;
        }
        report.samples += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `max |LHS - RHS|` relative to the size of the individual terms.
    pub max_residual: f64,
    pub checked: usize,
    pub rejected: usize,
}

/// Compares `(-Δ - μ/δ² - η²/(4|x|²))ψ` for `ψ = δ^{α₊}|x|^{-η/2}`, with a
/// central-difference Laplacian, against `α₊ δ^{α₊-1}|x|^{-η/2} E(x)`.
pub fn supersolution_identity_check(evaluator: &DeltaEvaluator, mu: f64, samples: &[Vec<f64>], fd_step: f64) -> Result<IdentityReport> {
    if !(fd_step > 0.0 && fd_step < 0.1) {
        return Err(invalid("fd_step must lie in (0, 0.1)"));
    }
    let eta = eta(evaluator.dim(), mu)?;
    let a = alpha_plus(mu);
    let psi = |x: &[f64]| -> Result<f64> {
        let d = evaluator.value(x)?;
        Ok(d.powf(a) * dot(x, x).powf(-eta / 4.0))
    };
    let mut report = IdentityReport { max_residual: 0.0, checked: 0, rejected: 0 };
    for x in samples {
        let field = match diff_ineq_field(evaluator, mu, x, FieldMethod::Auto) {
            Ok(f) => f,
            Err(Error::InvalidArgument(_)) => {
                report.rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let h = fd_step * norm(x);
        let d = evaluator.value(x)?;
        if d <= 10.0 * h || evaluator.finite_difference(x, fd_step).is_err() {
            report.rejected += 1;
            continue;
        }
        let p0 = psi(x)?;
        let mut lap = 0.0;
        let mut y = x.clone();
        for i in 0..x.len() {
            y[i] = x[i] + h;
            let p = psi(&y)?;
            y[i] = x[i] - h;
            let m = psi(&y)?;
            y[i] = x[i];
            lap += (p - 2.0 * p0 + m) / (h * h);
        }
        let r2 = dot(x, x);
        let lhs = -lap - (mu / (d * d) + eta * eta / (4.0 * r2)) * p0;
        let rhs = a * d.powf(a - 1.0) * r2.powf(-eta / 4.0) * field.e_value;
        let scale = p0 * (lap.abs() / p0 + mu.abs() / (d * d) + eta * eta / (4.0 * r2)) + rhs.abs();
        report.max_residual = report.max_residual.max((lhs - rhs).abs() / scale);
        report.checked += 1;
    }
    Ok(report)
}

/// Nonnegative test function `(1 - |y - c|²/ρ²)²` on the ball `B(c, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallBump {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicityReport {
    /// `-∫ δ Δφ` per bump.
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub min: f64,
    /// Index of the minimizing bump.
    pub argmin: usize,
    /// True iff every value is at least minus its error.
    pub nonnegative: bool,
}

/// `-∫ δ Δφ dx` over each bump; the cone is weakly mean convex on the
/// family exactly when no value is negative beyond its error.
pub fn cone_weak_superharmonicity(spec: &ConeSpec, bumps: &[BallBump]) -> Result<SuperharmonicityReport> {
    let n = spec.dim();
    if n > 3 {
        return Err(invalid("ball quadrature is implemented for n = 2 and n = 3"));
    }
    if bumps.is_empty() {
        return Err(invalid("at least one bump is required"));
    }
    let mut values = Vec::with_capacity(bumps.len());
    let mut errors = Vec::with_capacity(bumps.len());
    for b in bumps {
        if b.center.len() != n || !(b.radius > 0.0) {
            return Err(invalid("bump centre has the wrong dimension or radius is not positive"));
        }
        let clearance = spec.delta(&b.center)?;
        if !(b.radius < clearance) {
            return Err(invalid("bump support must lie inside the cone"));
        }
        let (coarse, _) = bump_integral(spec, b, 16, 32)?;
        let (fine, scale) = bump_integral(spec, b, 32, 64)?;
        values.push(fine);
        errors.push((fine - coarse).abs() + 1e-12 * scale);
    }
    let (argmin, min) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let nonnegative = values.iter().zip(&errors).all(|(v, e)| *v >= -e);
    Ok(SuperharmonicityReport { values, errors, min, argmin, nonnegative })
}

/// Returns `(-∫ δ Δφ, ∫ δ |Δφ|)`.
fn bump_integral(spec: &ConeSpec, b: &BallBump, radial_panels: usize, angular: usize) -> Result<(f64, f64)> {
    let n = spec.dim();
    let rho = b.radius;
    let lap = |s: f64| {
        let q = s * s / (rho * rho);
        -(4.0 / (rho * rho)) * (n as f64 * (1.0 - q) - 2.0 * q)
    };
    let mut dirs: Vec<(Vec<f64>, f64)> = Vec::new();
    if n == 2 {
        for k in 0..angular {
            let t = TAU * (k as f64 + 0.5) / angular as f64;
            dirs.push((vec![t.cos(), t.sin()], TAU / angular as f64));
        }
    } else {
        let (zs, wz) = gauss_on(-1.0, 1.0, angular / 2);
        for (z, wz) in zs.iter().zip(&wz) {
            let s = (1.0 - z * z).sqrt();
            for k in 0..angular {
                let t = TAU * (k as f64 + 0.5) / angular as f64;
                dirs.push((vec![s * t.cos(), s * t.sin(), *z], wz * TAU / angular as f64));
            }
        }
    }
    let mut value = 0.0;
    let mut scale = 0.0;
    for p in 0..radial_panels {
        let a = rho * p as f64 / radial_panels as f64;
        let c = rho * (p + 1) as f64 / radial_panels as f64;
        let (ss, ws) = gauss_on(a, c, 4);
        for (s, w) in ss.iter().zip(&ws) {
            let jac = w * s.powi(n as i32 - 1);
            let l = lap(*s);
            for (u, wu) in &dirs {
                let x: Vec<f64> = b.center.iter().zip(u).map(|(c, u)| c + s * u).collect();
                let d = spec.delta(&x)?;
                value -= jac * wu * d * l;
                scale += jac * wu * (d * l).abs();
            }
        }
    }
    Ok((value, scale))
}

/// Seeded bumps centred at `|x| ∈ [0.5, 2]` with radius a random fraction
/// in `[0.2, 0.9]` of the clearance `δ(centre)`.
pub fn random_ball_bumps(spec: &ConeSpec, count: usize, seed: u64) -> Result<Vec<BallBump>> {
    let n = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) + 10_000 {
            return Err(invalid("could not place bumps inside the cone"));
        }
        let v: Vec<f64> = if n == 2 {
            let t = rng.random_range(0.0..TAU);
            vec![t.cos(), t.sin()]
        } else {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r = norm(&v);
            if !(r > 1e-3 && r <= 1.0) {
                continue;
            }
            v.iter().map(|c| c / r).collect()
        };
        let p = PointOnSphere::new(v)?;
        let Ok(d) = spec.delta_on_sphere(&p) else { continue };
        if d < 0.05 {
            continue;
        }
        let r = rng.random_range(0.5..2.0);
        let center: Vec<f64> = p.coords().iter().map(|c| c * r).collect();
        let radius = rng.random_range(0.2..0.9) * d * r;
        out.push(BallBump { center, radius });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn field_examples() {
        let hs = DeltaEvaluator::HalfSpace { n: 3 };
        assert_eq!(diff_ineq_field(&hs, 0.1, &[0.3, -2.0, 1.0], FieldMethod::Auto).unwrap().e_value, 0.0);
        let ball = BallSpec::new(1.0, vec![1.0, 0.0, 0.0], 0.25).unwrap();
        let s = diff_ineq_field(&ball.evaluator(), 0.25, &[1.0, 0.5, 0.0], FieldMethod::ClosedForm).unwrap();
        assert!((s.e_value - 2.4).abs() < 1e-14);
        let fd = diff_ineq_field(&ball.evaluator(), 0.25, &[1.0, 0.5, 0.0], FieldMethod::FiniteDifference).unwrap();
        assert!((fd.e_value - 2.4).abs() < 1e-5);
        let quarter = DeltaEvaluator::Cone { spec: ConeSpec::sector(FRAC_PI_2).unwrap() };
        let t = PI / 8.0;
        let s = diff_ineq_field(&quarter, 0.25, &[t.cos(), t.sin()], FieldMethod::Auto).unwrap();
        assert!(s.e_value.abs() < 1e-15);
    }

    #[test]
    fn ridge_is_rejected() {
        let quarter = DeltaEvaluator::Cone { spec: ConeSpec::sector(FRAC_PI_2).unwrap() };
        assert!(diff_ineq_field(&quarter, 0.0, &[1.0, 1.0], FieldMethod::Auto).is_err());
        assert!(diff_ineq_field(&quarter, 0.0, &[1.0, 1.0], FieldMethod::FiniteDifference).is_err());
    }

    #[test]
    fn margin_on_the_segment() {
        let ball = BallSpec::new(2.0, vec![0.0, 2.0], 0.25).unwrap();
        assert!((ball.margin(&[0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!(BallSpec::new(1.0, vec![0.5, 0.0], 0.25).is_err());
    }
}
