use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{ConeSpec, CrossSection, RegionKind};
use crate::hardy::HardyConstants;
use crate::quadrature::{gauss_legendre, gauss_on, simpson_on, sphere_area};
use crate::spectral::tridiag::{lowest_pencil_eigenvalue, SymTridiagonal};
use crate::spectral::{sigma_of_mu_with, Eigenfunction, QuadraticForms, SolverOptions, SpectralResult};

use super::profiles::{AngularProfile, NullSequenceSpec, QuadratureGrid, RadialProfile, TestFunction};
use super::VerificationReport;

/// `∫|∇φ|² - μ∫φ²/δ² - λ∫φ²/|x|²` for a tensor test function.
pub fn hardy_margin(
    spec: &ConeSpec,
    mu: f64,
    lambda: f64,
    test: &TestFunction,
    grid: &QuadratureGrid,
) -> Result<VerificationReport> {
    test.validate(spec)?;
    let n = spec.dim();
    let rf = test.radial.forms(n, grid.radial_panels);
    let af = test.angular.forms(spec, mu, grid.angular_panels)?;
    let a2 = test.amplitude * test.amplitude;
    let angular_excess = af.energy - lambda * af.mass;
    let terms = [rf.gradient * af.mass, rf.weighted * af.energy, lambda * rf.weighted * af.mass];
    let margin = a2 * (rf.gradient * af.mass + rf.weighted * angular_excess);
    // mass errors are dominated by the energy errors and not tracked separately
    let error = a2
        * (rf.gradient_error * af.mass.abs()
            + rf.weighted_error * angular_excess.abs()
            + rf.weighted.abs() * af.error);
    let mut report = VerificationReport::new(
        "hardy_margin",
        vec![margin],
        error,
        vec![2 * grid.radial_panels + 1, 2 * grid.angular_panels + 1],
    )
    .with_value("lambda", lambda)
    .with_value("mu", mu)
    .with_value("radial_gradient", rf.gradient)
    .with_value("radial_weighted", rf.weighted)
    .with_value("angular_mass", af.mass)
    .with_value("angular_energy", af.energy);
    if terms.iter().any(|t| t.abs() > 0.0 && error > 0.1 * a2 * t.abs()) {
        report.flag("quadrature error exceeds 10% of a term");
    }
    Ok(report)
}

/// Margin of a near-ground-state test function against `factor · λ`.
///
/// The test function is the principal eigenfunction times a bump in
/// `log |x|` of half width `L`, whose radial excess over `((n-2)/2)²` is
/// `3/L²`; `L` is chosen so that this excess is 1% of `λ`. The check
/// passes when the margin is negative beyond its error estimate.
pub fn sharpness_probe(
    spec: &ConeSpec,
    constants: &HardyConstants,
    phi: &SpectralResult,
    factor: f64,
    grid: &QuadratureGrid,
) -> Result<VerificationReport> {
    if !(constants.lambda > 0.0) || !(factor > 1.0) {
        return Err(invalid("sharpness probe needs lambda > 0 and factor > 1"));
    }
    let half_width = (300.0 / constants.lambda).sqrt().max(4.0);
    let test = TestFunction::new(
        RadialProfile::LogBump { center: 1.0, half_width },
        AngularProfile::Principal { phi: Arc::new(phi.phi.clone()) },
    );
    let mut r = hardy_margin(spec, constants.mu, factor * constants.lambda, &test, grid)?;
    r.check = "sharpness_probe".into();
    let found = r.margins[0] < -r.quadrature_error;
    r.force(found);
    Ok(r.with_value("log_half_width", half_width))
}

/// `∫ f'² t^{n-1} - ((n-2)/2)² ∫ f² t^{n-3}`.
pub fn one_dimensional_hardy_margin(n: usize, f: &RadialProfile, panels: usize) -> Result<VerificationReport> {
    f.validate()?;
    let rf = f.forms(n, panels);
    let c2 = ((n as f64 - 2.0) / 2.0).powi(2);
    Ok(VerificationReport::new(
        "one_dimensional_hardy",
        vec![rf.gradient - c2 * rf.weighted],
        rf.gradient_error + c2 * rf.weighted_error,
        vec![4 * panels + 1],
    ))
}

/// Compares `q(fg) - μ∫(fg)²/δ²` from Cartesian gradients and Euclidean
/// distances with the separated radial and angular integrals on the same
/// nodes. The margin is `1e-8` minus the relative residual.
pub fn separable_decomposition_check(
    spec: &ConeSpec,
    mu: f64,
    f: &RadialProfile,
    g: &AngularProfile,
    grid: &QuadratureGrid,
) -> Result<VerificationReport> {
    f.validate()?;
    g.validate(spec)?;
    let n = spec.dim();
    let (alpha, cap) = match spec.cross_section() {
        CrossSection::Sector { alpha } => (*alpha, false),
        CrossSection::Cap { alpha } => (*alpha, true),
        CrossSection::SphericalPolygon { .. } => {
            return Err(invalid("the separable check needs a sector or cap"));
        }
    };
    let (r0, r1) = f.support();
    let (rs, rw) = gauss_on(r0, r1, 8 * grid.radial_panels);
    let (xs, xw) = match g {
        AngularProfile::CoordinateBump { center, half_width } => {
            gauss_on((center - half_width).max(0.0), center + half_width, 8 * grid.angular_panels)
        }
        _ => gauss_on(0.0, alpha, 8 * grid.angular_panels),
    };
    let area = if cap { sphere_area(n - 1) } else { 1.0 };
    let j = |x: f64| if cap { x.sin().powi(n as i32 - 2) } else { 1.0 };

    let mut radial = [0.0; 2];
    for (r, w) in rs.iter().zip(&rw) {
        let (v, d) = f.eval(n, *r);
        radial[0] += w * d * d * r.powi(n as i32 - 1);
        radial[1] += w * v * v * r.powi(n as i32 - 3);
    }
    let mut angular = [0.0; 3];
    let mut gs = Vec::with_capacity(xs.len());
    for (x, w) in xs.iter().zip(&xw) {
        let (v, d) = g.eval_coordinate(*x)?;
        let delta = spec.delta_of_coordinate(*x);
        let wj = w * j(*x) * area;
        angular[0] += wj * v * v;
        angular[1] += wj * d * d;
        angular[2] += wj * v * v / (delta * delta);
        gs.push((v, d));
    }
    let separated = radial[0] * angular[0] + radial[1] * (angular[1] - mu * angular[2]);

    let mut cartesian = 0.0;
    for (r, wr) in rs.iter().zip(&rw) {
        let (fv, fd) = f.eval(n, *r);
        for ((x, wx), (gv, gd)) in xs.iter().zip(&xw).zip(&gs) {
            // unit radial and angular directions in the plane of the coordinate
            let (radial_dir, angular_dir) = if cap {
                let mut e = vec![0.0; n];
                let mut t = vec![0.0; n];
                e[0] = x.sin();
                e[n - 1] = x.cos();
                t[0] = x.cos();
                t[n - 1] = -x.sin();
                (e, t)
            } else {
                (vec![x.cos(), x.sin()], vec![-x.sin(), x.cos()])
            };
            let point: Vec<f64> = radial_dir.iter().map(|e| r * e).collect();
            let grad: Vec<f64> = radial_dir
                .iter()
                .zip(&angular_dir)
                .map(|(e, t)| fd * gv * e + fv / r * gd * t)
                .collect();
            let g2: f64 = grad.iter().map(|v| v * v).sum();
            let u = fv * gv;
            let delta = spec.delta(&point)?;
            let w = wr * wx * j(*x) * area * r.powi(n as i32 - 1);
            cartesian += w * (g2 - mu * u * u / (delta * delta));
        }
    }
    let scale = (radial[0] * angular[0]).abs()
        + (radial[1] * angular[1]).abs()
        + (mu * radial[1] * angular[2]).abs();
    let residual = (cartesian - separated).abs() / scale;
    let mut report = VerificationReport::new("separable_decomposition", vec![1e-8 - residual], 0.0, vec![rs.len(), xs.len()])
        .with_value("residual", residual)
        .with_value("cartesian", cartesian)
        .with_value("separated", separated)
        .with_value("angular_ratio", (angular[1] - mu * angular[2]) / angular[0]);
    report.force(residual <= 1e-8);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalizedOptions {
    /// `log10(r_max / r_min)` of the region.
    pub decades: f64,
    pub radial_nodes: usize,
    pub solver: SolverOptions,
}

impl Default for LocalizedOptions {
    fn default() -> Self {
        Self { decades: 12.0, radial_nodes: 512, solver: SolverOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizedEstimate {
    pub estimate: f64,
    pub radial_eigenvalue: f64,
    pub sigma_h: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub radial_nodes: usize,
}

/// Lowest discrete Rayleigh quotient `q(φ)/∫φ²/|x|²` over grid functions on
/// `(R·10^{-d}, R)` (inner) or `(R, R·10^d)` (outer) vanishing at both radii.
///
/// The grid is the tensor product of a uniform grid in `s = log r` with the
/// finest cross-section grid, so the minimum is the sum of the lowest radial
/// eigenvalue of `-(e^{(n-2)s} f')' = ν e^{(n-2)s} f` and the discrete `σ`.
pub fn best_constant_localized(
    spec: &ConeSpec,
    mu: f64,
    kind: RegionKind,
    radius: f64,
    opts: &LocalizedOptions,
) -> Result<LocalizedEstimate> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("radius must be positive"));
    }
    if opts.radial_nodes < 8 {
        return Err(invalid(format!("region too thin: {} radial nodes (need 8)", opts.radial_nodes)));
    }
    if !(opts.decades > 0.0) {
        return Err(invalid("region needs a positive radial extent"));
    }
    let span = 10f64.powf(opts.decades);
    let (r_min, r_max) = match kind {
        RegionKind::Inner => (radius / span, radius),
        RegionKind::Outer => (radius, radius * span),
        _ => return Err(invalid("localized constants use inner or outer regions")),
    };
    let m = opts.radial_nodes;
    let h = (r_max / r_min).ln() / (m + 1) as f64;
    let beta = spec.dim() as f64 - 2.0;
    // symmetrically scaled by e^{-(n-2)s/2}: the weight ratios reduce to e^{±βh/2}
    let mut a = SymTridiagonal::zeros(m);
    let diag = 2.0 * (0.5 * beta * h).cosh() / (h * h);
    a.diag.iter_mut().for_each(|d| *d = diag);
    a.off.iter_mut().for_each(|o| *o = -1.0 / (h * h));
    let b = SymTridiagonal::from_diagonal(vec![1.0; m]);
    let (lo, hi) = lowest_pencil_eigenvalue(&a, &b, 0.0, 1e-15)?;
    let nu = 0.5 * (lo + hi);
    let sigma = sigma_of_mu_with(spec, mu, &opts.solver)?;
    let sigma_h = sigma.levels.last().map(|l| l.sigma).unwrap_or(sigma.sigma);
    Ok(LocalizedEstimate { estimate: nu + sigma_h, radial_eigenvalue: nu, sigma_h, r_min, r_max, radial_nodes: m })
}

/// `q_R(w_k)` for `w_k = r^{(2-n)/2} χ_k(r)`, where `χ_k` is the log cutoff
/// on `(1/k², 1/k)` and its mirror on `(k, k²)`.
pub fn radial_null_sequence_energy(n: usize, k: u64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("dimension must be at least 2"));
    }
    if k < 3 {
        return Err(invalid("cutoff index must be at least 3"));
    }
    let lk = (k as f64).ln();
    let c = (2.0 - n as f64) / 2.0;
    // χ on the piece containing `mid`, so that break nodes take one-sided values
    let chi = |s: f64, mid: f64| -> (f64, f64) {
        let a = mid.abs();
        if a > 2.0 * lk {
            (0.0, 0.0)
        } else if a > lk {
            (2.0 - s.abs() / lk, -mid.signum() / lk)
        } else {
            (1.0, 0.0)
        }
    };
    // integrand of ∫ (w')² r^{n-1} - c² w² r^{n-3} dr, written in s = log r
    let integrand = |s: f64, mid: f64| -> f64 {
        let r = s.exp();
        let (x, xs) = chi(s, mid);
        let w = r.powf(c) * x;
        let dw = c * r.powf(c - 1.0) * x + r.powf(c) * xs / r;
        (dw * dw * r.powi(n as i32 - 1) - c * c * w * w * r.powi(n as i32 - 3)) * r
    };
    let breaks = [-2.0 * lk, -lk, lk, 2.0 * lk];
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        let (x, w) = simpson_on(pair[0], pair[1], 64);
        total += x.iter().zip(&w).map(|(x, w)| w * integrand(*x, mid)).sum::<f64>();
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSequenceReport {
    pub mu: f64,
    pub ks: Vec<u64>,
    pub energies: Vec<f64>,
    pub decreasing: bool,
    /// `0 <= v_k(δ) <= 1` at every quadrature node.
    pub cutoff_bounded: bool,
}

/// `∫_Σ φ² |∇v_k(δ)|²` over the collar `1/k² < δ < 1/k` for each `k`.
pub fn spherical_null_sequence_energy(
    spec: &ConeSpec,
    mu: f64,
    phi: &Eigenfunction,
    ks: &[u64],
) -> Result<NullSequenceReport> {
    if phi.spec() != spec {
        return Err(invalid("eigenfunction belongs to a different cone"));
    }
    let (alpha, sides, area) = match spec.cross_section() {
        CrossSection::Sector { alpha } => (*alpha, 2, 1.0),
        CrossSection::Cap { alpha } => (*alpha, 1, sphere_area(spec.dim() - 1)),
        CrossSection::SphericalPolygon { .. } => {
            return Err(invalid("collar quadrature is implemented for sectors and caps"));
        }
    };
    let (g, gw) = gauss_legendre(8);
    let mut energies = Vec::with_capacity(ks.len());
    let mut bounded = true;
    for &k in ks {
        let v = NullSequenceSpec::new(k)?;
        let kf = k as f64;
        let (t0, t1) = ((1.0 / (kf * kf)).asin(), (1.0 / kf).asin());
        if t1 >= 0.5 * alpha.min(2.0 * FRAC_PI_2) {
            return Err(invalid(format!("collar for k = {k} is wider than the cross-section")));
        }
        let (u0, u1) = (t0.ln(), t1.ln());
        let panels = 32;
        let mut e = 0.0;
        for p in 0..panels {
            let a = u0 + (u1 - u0) * p as f64 / panels as f64;
            let b = u0 + (u1 - u0) * (p + 1) as f64 / panels as f64;
            for (gi, wi) in g.iter().zip(&gw) {
                let tau = (0.5 * (a + b) + 0.5 * (b - a) * gi).exp();
                let jac = 0.5 * (b - a) * wi * tau;
                let delta = tau.sin();
                let dv = v.log_derivative(delta) / delta;
                let val = v.value(delta);
                bounded &= (0.0..=1.0).contains(&val);
                for side in 0..sides {
                    let x = if sides == 2 && side == 0 { tau } else { alpha - tau };
                    let weight = if spec.dim() == 2 { 1.0 } else { x.sin().powi(spec.dim() as i32 - 2) };
                    let f = phi.at_coordinate(x)?;
                    // |∇δ| = cos τ on the collar
                    e += jac * weight * f * f * (dv * tau.cos()).powi(2);
                }
            }
        }
        for x in phi.nodes() {
            let val = v.value(spec.delta_of_coordinate(*x));
            bounded &= (0.0..=1.0).contains(&val);
        }
        energies.push(area * e);
    }
    let decreasing = energies.windows(2).all(|w| w[1] < w[0]);
    Ok(NullSequenceReport { mu, ks: ks.to_vec(), energies, decreasing, cutoff_bounded: bounded })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub radii: Vec<f64>,
    pub energies: Vec<f64>,
    /// `(max - min) / max |E|`.
    pub spread: f64,
    pub positive: bool,
    /// Energy per unit of `log r`; the integral over `Ω_R` grows like this
    /// rate times `log` of the radial extent at both ends.
    pub log_rate: f64,
    pub quadrature_error: f64,
}

/// `E(R) = ∫_{A_R} |∇v|² - μv²/δ²` for the ground state `v = |x|^{(2-n)/2} φ`.
pub fn annulus_scale_invariance(
    spec: &ConeSpec,
    constants: &HardyConstants,
    phi: &SpectralResult,
    radii: &[f64],
) -> Result<AnnulusReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(invalid("annulus radii must be positive"));
    }
    let n = spec.dim();
    let c = (2.0 - n as f64) / 2.0;
    let forms: QuadraticForms = phi.phi.quadratic_forms(constants.mu)?;
    let (g, gw) = gauss_legendre(16);
    let mut energies = Vec::with_capacity(radii.len());
    for &radius in radii {
        let (s0, s1) = ((radius / 2.0).ln(), (2.0 * radius).ln());
        let mut e = 0.0;
        for (gi, wi) in g.iter().zip(&gw) {
            let r = (0.5 * (s0 + s1) + 0.5 * (s1 - s0) * gi).exp();
            let w = 0.5 * (s1 - s0) * wi * r;
            // |∇v|² - μv²/δ² = r^{2c-2} (c² φ² + |∇_ω φ|² - μ φ²/δ(ω)²)
            let density = r.powf(2.0 * c - 2.0) * (c * c * forms.mass + forms.energy);
            e += w * density * r.powi(n as i32 - 1);
        }
        energies.push(e);
    }
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Ok(AnnulusReport {
        radii: radii.to_vec(),
        spread: if scale > 0.0 { (max - min) / scale } else { 0.0 },
        positive: min > 0.0,
        log_rate: (c * c * forms.mass + forms.energy),
        quadrature_error: 4f64.ln() * forms.error,
        energies,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub mu: f64,
    pub epsilons: Vec<f64>,
    pub quotients: Vec<f64>,
    /// `(n - 1 + √(1-4μ))² / 4`.
    pub bound: f64,
    /// Last quotient within 5% of the bound.
    pub within_bound: bool,
}

/// Rayleigh quotients `(q(φ) - μ∫φ²/δ²) / ∫φ²/|x|²` of
/// `φ_ε = χ_ε(|x|) |x|^{(2-n)/2} δ(ω)^{α₊} v_k(δ(x))` with `k = 1/ε`, where
/// `χ_ε` is the log cutoff rising on `(ε³, ε²)` and falling on `(ε, 1)`.
pub fn upper_bound_witness(spec: &ConeSpec, mu: f64, epsilons: &[f64]) -> Result<WitnessReport> {
    if !spec.has_supporting_hyperplane() {
        return Err(invalid("the witness needs a cone inside a half-space"));
    }
    if !(0.0..=0.25).contains(&mu) {
        return Err(invalid("the witness needs 0 <= mu <= 1/4"));
    }
    let n = spec.dim();
    // the quotient is invariant under the mirror symmetry of sectors and the
    // constant surface factor of caps, so one side and the bare weight suffice
    let (alpha, top, two_sided) = match spec.cross_section() {
        CrossSection::Sector { alpha } => (*alpha, 0.5 * alpha, true),
        CrossSection::Cap { alpha } => (*alpha, *alpha, false),
        CrossSection::SphericalPolygon { .. } => {
            return Err(invalid("the witness is implemented for sectors and caps"));
        }
    };
    let root = (1.0 - 4.0 * mu).sqrt();
    let ap = 0.5 * (1.0 + root);
    let c = (2.0 - n as f64) / 2.0;
    let bound = (n as f64 - 1.0 + root).powi(2) / 4.0;
    let (g, gw) = gauss_legendre(8);
    let mut quotients = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(invalid("concentration scales must lie in (0, 1/2]"));
        }
        let k = 1.0 / eps;
        let lk = k.ln();
        let le = -lk;
        // v_k and t v_k'(t) for a real index
        let cutoff = |t: f64| -> (f64, f64) {
            if t <= eps * eps {
                (0.0, 0.0)
            } else if t < eps {
                (1.0 + (k * t).ln() / lk, 1.0 / lk)
            } else {
                (1.0, 0.0)
            }
        };
        let radial = |s: f64| -> (f64, f64) {
            if s <= 3.0 * le || s >= 0.0 {
                (0.0, 0.0)
            } else if s < 2.0 * le {
                ((s - 3.0 * le) / -le, 1.0 / -le)
            } else if s <= le {
                (1.0, 0.0)
            } else {
                (s / le, 1.0 / le)
            }
        };
        let top_sin = top.min(FRAC_PI_2).sin();
        let inner = |s: f64| -> (f64, f64) {
            let (x, xs) = radial(s);
            if x == 0.0 && xs == 0.0 {
                return (0.0, 0.0);
            }
            let r = s.exp();
            let d_lo = eps * eps / r;
            if d_lo >= top_sin {
                return (0.0, 0.0);
            }
            let t_lo = d_lo.asin();
            let d_hi = eps / r;
            let t_hi = if d_hi >= top_sin { top } else { d_hi.asin() };
            let mut num = 0.0;
            let mut den = 0.0;
            for (a, b) in [(t_lo, t_hi), (t_hi, top)] {
                if b <= a {
                    continue;
                }
                let (ua, ub) = (a.ln(), b.ln());
                let panels = ((ub - ua) / 0.5).ceil().max(1.0) as usize;
                for p in 0..panels {
                    let pa = ua + (ub - ua) * p as f64 / panels as f64;
                    let pb = ua + (ub - ua) * (p + 1) as f64 / panels as f64;
                    for (gi, wi) in g.iter().zip(&gw) {
                        let tau = (0.5 * (pa + pb) + 0.5 * (pb - pa) * gi).exp();
                        let jac = 0.5 * (pb - pa) * wi * tau;
                        let d = tau.sin();
                        let dp = tau.cos();
                        let (vv, tv) = cutoff(r * d);
                        let xc = if two_sided { tau } else { alpha - tau };
                        let j = if n == 2 { 1.0 } else { xc.sin().powi(n as i32 - 2) };
                        let weight = jac * j * d.powf(2.0 * ap);
                        // r ∂_r φ and ∂_ω φ, both divided by r^c d^{α₊}
                        let ar = xs * vv + x * c * vv + x * tv;
                        let aw = x * dp / d * (ap * vv + tv);
                        num += weight * (ar * ar + aw * aw - mu * x * x * vv * vv / (d * d));
                        den += weight * x * x * vv * vv;
                    }
                }
            }
            (num, den)
        };
        let mut breaks = vec![3.0 * le, 2.0 * le, le, 0.0];
        for edge in [-2.0 * lk - top_sin.ln(), -lk - top_sin.ln()] {
            if edge > 3.0 * le && edge < 0.0 {
                breaks.push(edge);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut num = 0.0;
        let mut den = 0.0;
        for pair in breaks.windows(2) {
            let sub = 16;
            for p in 0..sub {
                let a = pair[0] + (pair[1] - pair[0]) * p as f64 / sub as f64;
                let b = pair[0] + (pair[1] - pair[0]) * (p + 1) as f64 / sub as f64;
                for (gi, wi) in g.iter().zip(&gw) {
                    let s = 0.5 * (a + b) + 0.5 * (b - a) * gi;
                    let (nm, dn) = inner(s);
                    num += 0.5 * (b - a) * wi * nm;
                    den += 0.5 * (b - a) * wi * dn;
                }
            }
        }
        quotients.push(num / den);
    }
    let within_bound = quotients.last().is_some_and(|q| *q <= 1.05 * bound);
    Ok(WitnessReport { mu, epsilons: epsilons.to_vec(), quotients, bound, within_bound })
}
