//! Refinement studies built on the single-level solvers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ray_distance, ConeSpec, CrossSection};

use super::fem::{self, shrink_toward, SurfaceMesh};
use super::interval::{self, IntervalProblem};
use super::tridiag::lowest_pencil_eigenvalue;
use super::{
    assemble_interval, assemble_on_mesh, assemble_polygon, operator_from_pencil, principal_eigenpair,
    LevelValue, Scheme, SolverOptions, SpectralResult,
};

/// Outcome of Richardson extrapolation on a sequence of grid-doubling values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    pub value: f64,
    pub extrapolated: bool,
    pub observed_order: Option<f64>,
    pub monotone: bool,
    pub flags: Vec<String>,
}

fn noise(v: f64) -> f64 {
    1e-10 * v.abs().max(1.0)
}

/// Second-order Richardson extrapolation, applied only when the last two
/// differences shrink by a factor within 30% of 4.
pub fn richardson(values: &[f64]) -> Richardson {
    let mut out = Richardson {
        value: values.last().copied().unwrap_or(f64::NAN),
        extrapolated: false,
        observed_order: None,
        monotone: true,
        flags: Vec::new(),
    };
    if values.len() < 2 {
        return out;
    }
    let last = out.value;
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let significant: Vec<f64> = diffs.iter().copied().filter(|d| d.abs() > noise(last)).collect();
    out.monotone = significant.windows(2).all(|w| w[0].signum() == w[1].signum());
    let d_last = *diffs.last().unwrap();
    if d_last.abs() <= noise(last) {
        out.flags.push("converged to rounding level".into());
        return out;
    }
    if !out.monotone {
        out.flags.push("non-monotone level sequence; extrapolation disabled".into());
        return out;
    }
    if diffs.len() == 1 {
        out.value = last + d_last / 3.0;
        out.extrapolated = true;
        out.flags.push("second order assumed from two levels".into());
        return out;
    }
    let d_prev = diffs[diffs.len() - 2];
    let ratio = d_prev / d_last;
    if ratio > 0.0 {
        out.observed_order = Some(ratio.log2());
    }
    if (ratio - 4.0).abs() <= 1.2 {
        out.value = last + d_last / 3.0;
        out.extrapolated = true;
    } else {
        out.flags.push(format!("difference ratio {ratio:.3} is not near 4; not extrapolated"));
    }
    out
}

/// `σ(μ)` with default options and `levels` grid doublings.
pub fn sigma_of_mu(spec: &ConeSpec, mu: f64, levels: usize) -> Result<SpectralResult> {
    sigma_of_mu_with(spec, mu, &SolverOptions { levels, ..SolverOptions::default() })
}

pub fn sigma_of_mu_with(spec: &ConeSpec, mu: f64, opts: &SolverOptions) -> Result<SpectralResult> {
    if !mu.is_finite() || mu > 0.25 + 0.1 + 1e-12 {
        return Err(invalid(format!("mu = {mu} exceeds 1/4 + 0.1; use the divergence diagnostic")));
    }
    if opts.levels < 1 {
        return Err(invalid("at least one level is required"));
    }
    let mut results = Vec::with_capacity(opts.levels);
    for l in 0..opts.levels {
        let op = match spec.cross_section() {
            CrossSection::SphericalPolygon { .. } => {
                assemble_polygon(spec, mu, opts.mesh_h / f64::powi(2.0, l as i32))?
            }
            _ => assemble_interval(
                spec,
                mu,
                opts.nodes << l,
                opts.grading,
                opts.interval_scheme(mu),
            )?,
        };
        results.push(principal_eigenpair(&op)?);
    }
    Ok(combine_levels(results))
}

fn combine_levels(results: Vec<SpectralResult>) -> SpectralResult {
    let levels: Vec<LevelValue> = results.iter().map(|r| r.levels[0]).collect();
    let values: Vec<f64> = levels.iter().map(|l| l.sigma).collect();
    let rich = richardson(&values);
    let mut finest = results.into_iter().last().unwrap();
    finest.sigma = rich.value;
    finest.levels = levels;
    finest.extrapolated = rich.extrapolated;
    finest.observed_order = rich.observed_order;
    finest.monotone = rich.monotone;
    finest.flags = rich.flags;
    finest
}

/// Discrete `σ(μ)` for several `μ` on one fixed graded mesh (or one
/// surface mesh). The stiffness and both masses are independent of `μ`, so
/// each value is an exact minimum of affine functions of `μ`.
pub fn sigma_on_fixed_grid(spec: &ConeSpec, mus: &[f64], nodes: usize, grading: f64, mesh_h: f64) -> Result<Vec<f64>> {
    match spec.cross_section() {
        CrossSection::SphericalPolygon { .. } => {
            let data = spec.polygon_data().unwrap();
            let mesh = Arc::new(SurfaceMesh::from_polygon(&data.vertices, data.center, mesh_h)?);
            let mut out = Vec::with_capacity(mus.len());
            let mut guess = 0.0;
            for &mu in mus {
                let op = assemble_on_mesh(spec, mu, Arc::clone(&mesh))?;
                let (a, b) = op.sparse_pencil().unwrap();
                let (s, _, _) = fem::lowest_sparse_eigenpair(a, b, guess)?;
                guess = s;
                out.push(s);
            }
            Ok(out)
        }
        _ => {
            let problem = IntervalProblem::from_spec(spec)?;
            let pencil = interval::assemble_galerkin(problem, nodes + nodes % 2, grading.max(1.0));
            let sing = pencil.singular_mass.as_ref().unwrap();
            mus.iter()
                .map(|&mu| {
                    let a = pencil.stiffness.add_scaled(-mu, sing);
                    lowest_pencil_eigenvalue(&a, &pencil.mass, 0.0, 1e-15).map(|(lo, hi)| 0.5 * (lo + hi))
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mu0Method {
    GeneralizedEigenproblem,
    SigmaRootBisection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mu0Result {
    pub mu0: f64,
    pub method: Mu0Method,
    /// Generalized eigenvalue after clamping at 1/4.
    pub generalized: f64,
    pub generalized_raw: f64,
    pub generalized_levels: Vec<LevelValue>,
    pub root: Option<f64>,
    pub cross_check_gap: Option<f64>,
    pub flagged: bool,
    pub flags: Vec<String>,
}

/// Cross-check gap above which the μ₀ result is flagged.
pub const MU0_GAP_TOLERANCE: f64 = 1e-2;

pub fn mu0_compute(spec: &ConeSpec, levels: usize) -> Result<Mu0Result> {
    mu0_compute_with(spec, &SolverOptions { levels, ..SolverOptions::default() })
}

fn generalized_mu0_levels(spec: &ConeSpec, opts: &SolverOptions) -> Result<Vec<LevelValue>> {
    let c = (spec.dim() as f64 - 2.0).powi(2) / 4.0;
    let mut out = Vec::new();
    for l in 0..opts.levels.max(1) {
        match spec.cross_section() {
            CrossSection::SphericalPolygon { .. } => {
                let h = opts.mesh_h / f64::powi(2.0, l as i32);
                let op = assemble_polygon(spec, 0.0, h)?;
                let (k, mass) = op.sparse_pencil().unwrap();
                let weight = op.singular_weight().unwrap();
                let a = k.add_diagonal(c, mass);
                let (m, _, _) = fem::lowest_sparse_eigenpair(&a, &weight, 0.25)?;
                out.push(LevelValue { mesh_size: h, unknowns: op.dimension(), sigma: m });
            }
            _ => {
                let problem = IntervalProblem::from_spec(spec)?;
                let intervals = (opts.nodes << l) + (opts.nodes << l) % 2;
                let pencil = interval::assemble_galerkin(problem, intervals, MU0_GRADING);
                let a = pencil.stiffness.add_scaled(c, &pencil.mass);
                let (lo, hi) = lowest_pencil_eigenvalue(&a, pencil.singular_mass.as_ref().unwrap(), 0.25, 1e-14)?;
                out.push(LevelValue {
                    mesh_size: pencil.mesh_size,
                    unknowns: pencil.unknowns.len(),
                    sigma: 0.5 * (lo + hi),
                });
            }
        }
    }
    Ok(out)
}

/// Boundary grading of the meshes used for the generalized μ₀ problem.
pub const MU0_GRADING: f64 = 6.0;

/// `μ₀` from the generalized problem `(K + (n-2)²/4 M) φ = μ B_{δ⁻²} φ`,
/// cross-checked by bisection on the sign of `σ(μ) + (n-2)²/4`.
pub fn mu0_compute_with(spec: &ConeSpec, opts: &SolverOptions) -> Result<Mu0Result> {
    let c = (spec.dim() as f64 - 2.0).powi(2) / 4.0;
    let gen_levels = generalized_mu0_levels(spec, opts)?;
    let values: Vec<f64> = gen_levels.iter().map(|l| l.sigma).collect();
    let rich = richardson(&values);
    let mut flags = rich.flags.clone();
    let raw = rich.value;
    let generalized = if raw >= 0.25 - 1e-3 { 0.25 } else { raw };
    if generalized <= 0.0 {
        return Err(Error::InconsistentSpectrum(format!("generalized eigenvalue {raw} is not positive")));
    }
    let polygon = matches!(spec.cross_section(), CrossSection::SphericalPolygon { .. });
    let root_opts = SolverOptions { scheme: None, grading: 1.0, ..*opts };
    let g = |mu: f64| -> Result<f64> { Ok(sigma_of_mu_with(spec, mu, &root_opts)?.sigma + c) };
    let root = if g(0.25)? >= 0.0 {
        0.25
    } else {
        let tol = if polygon { 1e-5 } else { 1e-10 };
        let (mut lo, mut hi) = (0.0, 0.25);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if g(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let gap = (generalized - root).abs();
    let flagged = gap > MU0_GAP_TOLERANCE;
    let (mu0, method) = if flagged {
        flags.push(format!("methods disagree by {gap:.3e}"));
        (generalized, Mu0Method::GeneralizedEigenproblem)
    } else {
        (root, Mu0Method::SigmaRootBisection)
    };
    if polygon {
        flags.push("criticality interpretation is heuristic for non-smooth cross-sections".into());
    }
    Ok(Mu0Result {
        mu0,
        method,
        generalized,
        generalized_raw: raw,
        generalized_levels: gen_levels,
        root: Some(root),
        cross_check_gap: Some(gap),
        flagged,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub mu: f64,
    pub levels: Vec<LevelValue>,
    pub strictly_decreasing: bool,
    pub final_value: f64,
    pub divergent: bool,
}

/// Boundary grading of the divergence diagnostic meshes.
pub const DIVERGENCE_GRADING: f64 = 3.0;
/// Coarsest 1-D mesh of the divergence diagnostic.
pub const DIVERGENCE_COARSEST: usize = 256;

/// Discrete `σ_h(μ)` on nested refinements. For `μ > 1/4` the values
/// decrease without bound.
pub fn divergence_diagnostic(spec: &ConeSpec, mu: f64, levels: usize) -> Result<DivergenceReport> {
    if levels < 2 {
        return Err(invalid("the divergence diagnostic needs at least two levels"));
    }
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        match spec.cross_section() {
            CrossSection::SphericalPolygon { .. } => {
                let h = 0.2 / f64::powi(2.0, l as i32);
                let r = principal_eigenpair(&assemble_polygon(spec, mu, h)?)?;
                out.push(r.levels[0]);
            }
            _ => {
                let n = DIVERGENCE_COARSEST << l;
                let op = assemble_interval(spec, mu, n, DIVERGENCE_GRADING, Scheme::Galerkin)?;
                let a = op.tridiagonal_pencil().unwrap();
                let (lo, hi) = lowest_pencil_eigenvalue(a.0, a.1, 0.0, 1e-14)?;
                out.push(LevelValue { mesh_size: op.mesh_size(), unknowns: op.dimension(), sigma: 0.5 * (lo + hi) });
            }
        }
    }
    let strictly_decreasing = out.windows(2).all(|w| w[1].sigma < w[0].sigma);
    let final_value = out.last().unwrap().sigma;
    Ok(DivergenceReport {
        mu,
        strictly_decreasing,
        final_value,
        divergent: strictly_decreasing && final_value < -1e3,
        levels: out,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub mu: f64,
    pub fractions: Vec<f64>,
    pub values: Vec<f64>,
    pub full: f64,
    pub strictly_decreasing: bool,
    pub above_full: bool,
}

/// `σ(μ)` on the subdomains obtained by shrinking the cross-section to each
/// fraction of its angular extent, keeping the potential of the full cone.
pub fn exhaustion_monotonicity(spec: &ConeSpec, mu: f64, fractions: &[f64], opts: &SolverOptions) -> Result<ExhaustionReport> {
    if fractions.is_empty()
        || fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0))
        || fractions.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(invalid("fractions must increase strictly within (0, 1]"));
    }
    let levels = opts.levels.max(2);
    let mut values = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let mut per_level = Vec::with_capacity(levels);
        for l in 0..levels {
            let s = match spec.cross_section() {
                CrossSection::SphericalPolygon { .. } => {
                    let data = spec.polygon_data().unwrap();
                    let verts: Vec<[f64; 3]> =
                        data.vertices.iter().map(|v| shrink_toward(&data.center, v, f)).collect();
                    let h = opts.mesh_h / f64::powi(2.0, l as i32);
                    let mesh = Arc::new(SurfaceMesh::from_polygon(&verts, data.center, h)?);
                    principal_eigenpair(&assemble_on_mesh(spec, mu, mesh)?)?.sigma
                }
                _ => {
                    let problem = IntervalProblem::from_spec(spec)?;
                    let (lo, hi) = if problem.dirichlet_left {
                        (0.5 * problem.alpha * (1.0 - f), 0.5 * problem.alpha * (1.0 + f))
                    } else {
                        (0.0, f * problem.alpha)
                    };
                    let pencil = interval::assemble_finite_difference(problem, lo, hi, opts.nodes << l);
                    let op = operator_from_pencil(spec, mu, Scheme::FiniteDifference, problem, pencil, None, (lo, hi));
                    principal_eigenpair(&op)?.sigma
                }
            };
            per_level.push(s);
        }
        values.push(richardson(&per_level).value);
    }
    let full = sigma_of_mu_with(spec, mu, opts)?.sigma;
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let above_full = values.iter().all(|v| *v > full - 1e-6 * full.abs().max(1.0));
    Ok(ExhaustionReport { mu, fractions: fractions.to_vec(), values, full, strictly_decreasing, above_full })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgmonReport {
    pub epsilon: f64,
    pub band_width: f64,
    /// Largest `c` (to 1e-6) keeping the expression nonnegative on the collar.
    pub c: f64,
    pub samples: usize,
    /// Minimum over the collar of `(-Δ_S - 1/(4δ²)) u`.
    pub min_base: f64,
}

/// Largest `c` such that `(-Δ_S - 1/(4δ²) - c/δ^ε)(δ^{1/2} - δ/2) >= 0` on
/// the collar `{d_Σ < band_width}`, with `Δ_S` by central differences.
pub fn agmon_supersolution_check(spec: &ConeSpec, epsilon: f64, band_width: f64) -> Result<AgmonReport> {
    if !(epsilon > 0.0 && epsilon < 1.5) {
        return Err(invalid(format!("epsilon must lie in (0, 3/2), got {epsilon}")));
    }
    let problem = IntervalProblem::from_spec(spec)?;
    let limit = if problem.dirichlet_left { 0.5 * problem.alpha } else { problem.alpha }.min(std::f64::consts::FRAC_PI_2);
    if !(band_width > 0.0 && band_width < limit) {
        return Err(invalid(format!("band width must lie in (0, {limit})")));
    }
    let nm2 = problem.n as f64 - 2.0;
    let u = |x: f64| {
        let d = ray_distance(problem.tau(x));
        d.sqrt() - 0.5 * d
    };
    let samples = 400;
    let lo = 1e-6 * band_width;
    let mut base = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = lo * (band_width / lo).powf(i as f64 / (samples - 1) as f64);
        let x = if problem.dirichlet_left { tau } else { problem.alpha - tau };
        let h = 1e-4 * tau;
        let (um, u0, up) = (u(x - h), u(x), u(x + h));
        let d2 = (up - 2.0 * u0 + um) / (h * h);
        let d1 = (up - um) / (2.0 * h);
        let lap = if problem.dirichlet_left { d2 } else { d2 + nm2 * d1 / x.tan() };
        let d = ray_distance(tau);
        let e0 = -lap - u0 / (4.0 * d * d);
        base.push((e0, u0 / d.powf(epsilon)));
    }
    let min_base = base.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
    if min_base <= 0.0 {
        return Err(invalid(format!(
            "collar too wide: the expression is negative for every c > 0 (min {min_base:.3e}); use a smaller band"
        )));
    }
    let ok = |c: f64| base.iter().all(|(e0, w)| e0 - c * w >= 0.0);
    let mut hi = 1.0;
    while ok(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut lo_c = 0.0;
    while hi - lo_c > 1e-6 {
        let mid = 0.5 * (lo_c + hi);
        if ok(mid) {
            lo_c = mid;
        } else {
            hi = mid;
        }
    }
    Ok(AgmonReport { epsilon, band_width, c: lo_c, samples, min_base })
}
