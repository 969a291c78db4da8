//! Tensor-product test functions `amplitude · f(|x|) · g(x/|x|)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    angle_between, any_orthogonal, cross3, norm, normalize3, ConeSpec, CrossSection, PointOnSphere,
    RegionKind, TruncatedRegion,
};
use crate::quadrature::{simpson_on, simpson_with_error, sphere_area};
use crate::spectral::{Eigenfunction, QuadraticForms};

/// `(1 - u²)²` and its derivative, zero for `|u| >= 1`.
pub(crate) fn bump(u: f64) -> (f64, f64) {
    if u.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - u * u;
    (s * s, -4.0 * u * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `bump((r - center)/half_width)`.
    Bump { center: f64, half_width: f64 },
    /// `r^{(2-n)/2} · bump(log(r/center)/half_width)`.
    LogBump { center: f64, half_width: f64 },
}

/// `∫ f'² r^{n-1} dr` and `∫ f² r^{n-3} dr` with error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RadialForms {
    pub gradient: f64,
    pub weighted: f64,
    pub gradient_error: f64,
    pub weighted_error: f64,
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Bump { center, half_width } => {
                if !(half_width > 0.0 && center - half_width > 0.0 && center.is_finite()) {
                    return Err(invalid(format!(
                        "radial bump needs 0 < half_width < center (got {center}, {half_width})"
                    )));
                }
            }
            Self::LogBump { center, half_width } => {
                if !(center > 0.0 && half_width > 0.0 && center.is_finite() && half_width.is_finite()) {
                    return Err(invalid("log bump needs positive center and half width"));
                }
            }
        }
        Ok(())
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Bump { center, half_width } => (center - half_width, center + half_width),
            Self::LogBump { center, half_width } => (center * (-half_width).exp(), center * half_width.exp()),
        }
    }

    /// `f(r)` and `f'(r)`.
    pub fn eval(&self, n: usize, r: f64) -> (f64, f64) {
        match *self {
            Self::Bump { center, half_width } => {
                let (v, d) = bump((r - center) / half_width);
                (v, d / half_width)
            }
            Self::LogBump { center, half_width } => {
                let c = (2.0 - n as f64) / 2.0;
                let (v, d) = bump((r / center).ln() / half_width);
                let p = r.powf(c);
                (p * v, p * (c * v + d / half_width) / r)
            }
        }
    }

    pub(crate) fn forms(&self, n: usize, panels: usize) -> RadialForms {
        let nm1 = n as i32 - 1;
        match *self {
            Self::Bump { center, half_width } => {
                let breaks = [center - half_width, center, center + half_width];
                let (g, ge) = simpson_with_error(&breaks, panels, |r| {
                    let (_, d) = self.eval(n, r);
                    d * d * r.powi(nm1)
                });
                let (w, we) = simpson_with_error(&breaks, panels, |r| {
                    let (v, _) = self.eval(n, r);
                    v * v * r.powi(nm1 - 2)
                });
                RadialForms { gradient: g, weighted: w, gradient_error: ge, weighted_error: we }
            }
            Self::LogBump { center, half_width } => {
                // in s = log r the forms become ∫ (r f')² r^{n-2} ds and ∫ f² r^{n-2} ds
                let s0 = center.ln();
                let breaks = [s0 - half_width, s0, s0 + half_width];
                let (g, ge) = simpson_with_error(&breaks, panels, |s| {
                    let r = s.exp();
                    let (_, d) = self.eval(n, r);
                    d * d * r.powi(nm1 + 1)
                });
                let (w, we) = simpson_with_error(&breaks, panels, |s| {
                    let r = s.exp();
                    let (v, _) = self.eval(n, r);
                    v * v * r.powi(nm1 - 1)
                });
                RadialForms { gradient: g, weighted: w, gradient_error: ge, weighted_error: we }
            }
        }
    }
}

/// Angular factor of a test function.
#[derive(Debug, Clone)]
pub enum AngularProfile {
    /// Bump in the coordinate of a sector or cap; `center = 0` on a cap
    /// gives a bump around the axis.
    CoordinateBump { center: f64, half_width: f64 },
    /// Bump in the geodesic distance from `center` (polygons).
    GeodesicBump { center: [f64; 3], half_width: f64 },
    /// A computed principal eigenfunction.
    Principal { phi: Arc<Eigenfunction> },
}

impl AngularProfile {
    pub fn validate(&self, spec: &ConeSpec) -> Result<()> {
        match (self, spec.cross_section()) {
            (Self::CoordinateBump { center, half_width }, CrossSection::Sector { alpha }) => {
                if !(*half_width > 0.0 && center - half_width > 0.0 && center + half_width < *alpha) {
                    return Err(invalid("angular bump must lie inside the sector"));
                }
            }
            (Self::CoordinateBump { center, half_width }, CrossSection::Cap { alpha }) => {
                let lower_ok = *center == 0.0 || center - half_width >= 0.0;
                if !(*half_width > 0.0 && lower_ok && center + half_width < *alpha) {
                    return Err(invalid("angular bump must lie inside the cap"));
                }
            }
            (Self::GeodesicBump { center, half_width }, CrossSection::SphericalPolygon { .. }) => {
                let p = PointOnSphere::new(center.to_vec())?;
                if !(*half_width > 0.0 && *half_width < spec.geodesic_distance(&p)?) {
                    return Err(invalid("geodesic bump must lie inside the polygon"));
                }
            }
            (Self::Principal { phi }, _) => {
                if phi.spec() != spec {
                    return Err(invalid("eigenfunction belongs to a different cone"));
                }
            }
            _ => return Err(invalid("angular profile does not match the cross-section")),
        }
        Ok(())
    }

    pub fn eval(&self, spec: &ConeSpec, p: &PointOnSphere) -> Result<f64> {
        match self {
            Self::CoordinateBump { center, half_width } => {
                Ok(bump((spec.coordinate(p)? - center) / half_width).0)
            }
            Self::GeodesicBump { center, half_width } => {
                let c = p.coords();
                Ok(bump(angle_between(&[c[0], c[1], c[2]], center) / half_width).0)
            }
            Self::Principal { phi } => phi.eval(p),
        }
    }

    /// `g` and `dg/dx` at the one-dimensional coordinate `x`.
    pub(crate) fn eval_coordinate(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            Self::CoordinateBump { center, half_width } => {
                let (v, d) = bump((x - center) / half_width);
                Ok((v, d / half_width))
            }
            Self::Principal { phi } => Ok((phi.at_coordinate(x)?, phi.derivative_at_coordinate(x)?)),
            Self::GeodesicBump { .. } => Err(invalid("geodesic bumps have no 1-D coordinate")),
        }
    }

    /// `∫ g²` and `∫ |∇g|² - μ g²/δ²` over the cross-section.
    pub(crate) fn forms(&self, spec: &ConeSpec, mu: f64, panels: usize) -> Result<QuadraticForms> {
        match self {
            Self::Principal { phi } => phi.quadratic_forms(mu),
            Self::CoordinateBump { center, half_width } => {
                let lo = (center - half_width).max(0.0);
                let hi = center + half_width;
                let n = spec.dim();
                let area = match spec.cross_section() {
                    CrossSection::Cap { .. } => sphere_area(n - 1),
                    _ => 1.0,
                };
                let j = |x: f64| if n == 2 { 1.0 } else { x.sin().powi(n as i32 - 2) };
                let breaks = [lo, *center, hi];
                let breaks: &[f64] = if *center > lo { &breaks } else { &breaks[1..] };
                let (m, _) = simpson_with_error(breaks, panels, |x| {
                    let (v, _) = self.eval_coordinate(x).unwrap_or((0.0, 0.0));
                    j(x) * v * v
                });
                let (e, ee) = simpson_with_error(breaks, panels, |x| {
                    let (v, d) = self.eval_coordinate(x).unwrap_or((0.0, 0.0));
                    let delta = spec.delta_of_coordinate(x);
                    j(x) * (d * d - mu * v * v / (delta * delta))
                });
                Ok(QuadraticForms { mass: area * m, energy: area * e, error: area * ee })
            }
            Self::GeodesicBump { center, half_width } => {
                let coarse = geodesic_bump_forms(spec, mu, center, *half_width, panels)?;
                let fine = geodesic_bump_forms(spec, mu, center, *half_width, 2 * panels)?;
                Ok(QuadraticForms {
                    mass: fine.0,
                    energy: fine.1,
                    error: (fine.1 - coarse.1).abs() / 15.0 + f64::EPSILON * fine.1.abs(),
                })
            }
        }
    }
}

/// Simpson in the geodesic radius, trapezoid in the azimuth.
fn geodesic_bump_forms(spec: &ConeSpec, mu: f64, center: &[f64; 3], w: f64, panels: usize) -> Result<(f64, f64)> {
    let e1 = any_orthogonal(center);
    let e2 = normalize3(&cross3(center, &e1));
    let (rho, wr) = simpson_on(0.0, w, panels);
    let azimuths = 4 * panels;
    let mut mass = 0.0;
    let mut energy = 0.0;
    for (r, wr) in rho.iter().zip(&wr) {
        let (v, d) = bump(r / w);
        let d = d / w;
        let jac = r.sin();
        if jac == 0.0 || v == 0.0 {
            continue;
        }
        let mut ring = 0.0;
        for k in 0..azimuths {
            let psi = TAU * k as f64 / azimuths as f64;
            let (c, s) = (psi.cos(), psi.sin());
            let q: Vec<f64> = (0..3).map(|i| r.cos() * center[i] + r.sin() * (c * e1[i] + s * e2[i])).collect();
            let delta = spec.delta_on_sphere(&PointOnSphere::normalized(&q)?)?;
            ring += 1.0 / (delta * delta);
        }
        ring *= TAU / azimuths as f64;
        mass += wr * jac * TAU * v * v;
        energy += wr * jac * (TAU * d * d - mu * v * v * ring);
    }
    Ok((mass, energy))
}

/// `amplitude · f(|x|) · g(x/|x|)`.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub radial: RadialProfile,
    pub angular: AngularProfile,
    pub amplitude: f64,
}

impl TestFunction {
    pub fn new(radial: RadialProfile, angular: AngularProfile) -> Self {
        Self { radial, angular, amplitude: 1.0 }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn validate(&self, spec: &ConeSpec) -> Result<()> {
        self.radial.validate()?;
        self.angular.validate(spec)
    }

    pub fn support(&self) -> Result<TruncatedRegion> {
        let (a, b) = self.radial.support();
        TruncatedRegion::new(a, b, RegionKind::Shell)
    }

    pub fn eval(&self, spec: &ConeSpec, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        let (f, _) = self.radial.eval(spec.dim(), r);
        if f == 0.0 {
            return Ok(0.0);
        }
        let p = PointOnSphere::normalized(x)?;
        Ok(self.amplitude * f * self.angular.eval(spec, &p)?)
    }
}

/// Resolution of the tensor quadrature (Simpson panels per piece).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureGrid {
    pub radial_panels: usize,
    pub angular_panels: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { radial_panels: 64, angular_panels: 64 }
    }
}

/// The log cutoff `v_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullSequenceSpec {
    pub k: u64,
}

impl NullSequenceSpec {
    pub fn new(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(invalid("cutoff index must be at least 2"));
        }
        Ok(Self { k })
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = self.k as f64;
        if t <= 1.0 / (k * k) {
            0.0
        } else if t < 1.0 / k {
            1.0 + (k * t).ln() / k.ln()
        } else {
            1.0
        }
    }

    /// `t · v_k'(t)`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let k = self.k as f64;
        if t > 1.0 / (k * k) && t < 1.0 / k {
            1.0 / k.ln()
        } else {
            0.0
        }
    }
}

pub fn random_radial_bump<R: rand::Rng + ?Sized>(rng: &mut R) -> RadialProfile {
    let center = rng.random_range(0.5..2.0);
    RadialProfile::Bump { center, half_width: center * rng.random_range(0.1..0.9) }
}

pub fn random_angular_bump<R: rand::Rng + ?Sized>(spec: &ConeSpec, rng: &mut R) -> Result<AngularProfile> {
    match spec.cross_section() {
        CrossSection::Sector { alpha } => {
            let center = rng.random_range(0.05 * alpha..0.95 * alpha);
            let room = center.min(alpha - center);
            Ok(AngularProfile::CoordinateBump { center, half_width: room * rng.random_range(0.1..0.95) })
        }
        CrossSection::Cap { alpha } => {
            let center = rng.random_range(0.0..0.95 * alpha);
            if center < 0.1 * alpha {
                return Ok(AngularProfile::CoordinateBump {
                    center: 0.0,
                    half_width: alpha * rng.random_range(0.1..0.95),
                });
            }
            let room = center.min(alpha - center);
            Ok(AngularProfile::CoordinateBump { center, half_width: room * rng.random_range(0.1..0.95) })
        }
        CrossSection::SphericalPolygon { .. } => {
            let data = spec.polygon_data().expect("polygon data");
            let c = data.center;
            let reach = spec.geodesic_distance(&PointOnSphere::new(c.to_vec())?)?;
            let e1 = any_orthogonal(&c);
            let e2 = normalize3(&cross3(&c, &e1));
            let psi = rng.random_range(0.0..TAU);
            let rho = reach * rng.random_range(0.0..0.8);
            let p: Vec<f64> = (0..3)
                .map(|i| rho.cos() * c[i] + rho.sin() * (psi.cos() * e1[i] + psi.sin() * e2[i]))
                .collect();
            let p = PointOnSphere::normalized(&p)?;
            let room = spec.geodesic_distance(&p)?;
            let q = p.coords();
            Ok(AngularProfile::GeodesicBump {
                center: [q[0], q[1], q[2]],
                half_width: room * rng.random_range(0.1..0.95),
            })
        }
    }
}
