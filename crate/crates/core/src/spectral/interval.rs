//! One-dimensional reductions for sectors and axisymmetric caps.
//!
//! Both cross-sections reduce to a weighted Sturm-Liouville problem on
//! `(0, alpha)` with weight `J(x) = sin^{n-2}(x)` (caps) or `J = 1`
//! (sectors). Three discretizations are provided: a ground-state
//! transformed finite-volume scheme, plain central differences, and
//! piecewise-linear Galerkin elements on boundary-graded meshes.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Result};
use crate::geometry::{ray_distance, ConeSpec, CrossSection};
use crate::quadrature::gauss_on;

use super::tridiag::SymTridiagonal;

/// Shape data of the reduced problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct IntervalProblem {
    pub alpha: f64,
    pub n: usize,
    /// Dirichlet condition at `x = 0` (sectors) or a free axis node (caps).
    pub dirichlet_left: bool,
}

impl IntervalProblem {
    pub fn from_spec(spec: &ConeSpec) -> Result<Self> {
        match spec.cross_section() {
            CrossSection::Sector { alpha } => {
                Ok(Self { alpha: *alpha, n: 2, dirichlet_left: true })
            }
            CrossSection::Cap { alpha } => {
                Ok(Self { alpha: *alpha, n: spec.dim(), dirichlet_left: false })
            }
            CrossSection::SphericalPolygon { .. } => {
                Err(invalid("spherical polygons are not one-dimensional"))
            }
        }
    }

    pub fn weight(&self, x: f64) -> f64 {
        if self.dirichlet_left {
            1.0
        } else {
            x.sin().powi(self.n as i32 - 2)
        }
    }

    /// Distance from `x` to the nearest Dirichlet end.
    pub fn tau(&self, x: f64) -> f64 {
        if self.dirichlet_left {
            x.min(self.alpha - x).max(0.0)
        } else {
            (self.alpha - x).max(0.0)
        }
    }
}

/// `1/sin²(x) - 1/x²` for `0 < x <= π/2`, without cancellation near 0.
pub(crate) fn inv_sin2_minus_inv_x2(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        1.0 / 3.0
            + x2 * (1.0 / 15.0
                + x2 * (2.0 / 189.0
                    + x2 * (1.0 / 675.0 + x2 * (2.0 / 10395.0 + x2 * 0.000_023_808_447_088_870_37))))
    } else {
        let s = x.sin();
        1.0 / (s * s) - 1.0 / (x * x)
    }
}

/// Ground-state factor `b = ψ^a e^{h}` with `ψ = sin(kτ)/k`, where
/// `a(1-a) = μ` and `h` cancels the first-order boundary term of caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GroundFactor {
    pub problem: IntervalProblem,
    pub a: f64,
    pub k: f64,
    pub mu: f64,
    /// `h(x) = slope * x² / 2`.
    pub slope: f64,
}

impl GroundFactor {
    pub fn new(problem: IntervalProblem, mu: f64) -> Result<Self> {
        if mu > 0.25 + 1e-15 {
            return Err(invalid(format!(
                "ground-state transform needs mu <= 1/4 (got {mu})"
            )));
        }
        let a = 0.5 * (1.0 + (1.0 - 4.0 * mu).max(0.0).sqrt());
        let (k, slope) = if problem.dirichlet_left {
            (PI / problem.alpha, 0.0)
        } else {
            let nm2 = problem.n as f64 - 2.0;
            (FRAC_PI_2 / problem.alpha, -nm2 / (2.0 * problem.alpha * problem.alpha.tan()))
        };
        Ok(Self { problem, a, k, mu, slope })
    }

    pub(crate) fn psi(&self, tau: f64) -> f64 {
        (self.k * tau).sin() / self.k
    }

    /// `ψ'/ψ` with respect to `x`.
    pub(crate) fn log_psi_slope(&self, x: f64, tau: f64) -> f64 {
        let c = self.k / (self.k * tau).tan();
        let left_half = self.problem.dirichlet_left && x <= 0.5 * self.problem.alpha;
        if left_half {
            c
        } else {
            -c
        }
    }

    pub fn value(&self, x: f64, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.psi(tau).powf(self.a) * (0.5 * self.slope * x * x).exp()
    }

    /// `b'/b`.
    pub fn log_slope(&self, x: f64, tau: f64) -> f64 {
        self.a * self.log_psi_slope(x, tau) + self.slope * x
    }

    /// `k² cot²(kτ) - 1/δ(τ)²`, stable as `τ -> 0`.
    pub(crate) fn cot2_minus_potential(&self, tau: f64) -> f64 {
        let k = self.k;
        if tau <= FRAC_PI_2 {
            k * k * inv_sin2_minus_inv_x2(k * tau) - k * k - inv_sin2_minus_inv_x2(tau)
        } else {
            let c = 1.0 / (k * tau).tan();
            k * k * c * c - 1.0
        }
    }

    /// Potential of the transformed operator, bounded up to the boundary.
    pub fn potential(&self, x: f64, tau: f64) -> f64 {
        let a = self.a;
        let k = self.k;
        let mut v = a * k * k + self.mu * self.cot2_minus_potential(tau);
        if !self.problem.dirichlet_left {
            let nm2 = self.problem.n as f64 - 2.0;
            let hp = self.slope * x;
            let hpp = self.slope;
            let cot_x = 1.0 / x.tan();
            let l = self.log_psi_slope(x, tau);
            let alpha = self.problem.alpha;
            let g = nm2 * (cot_x - x / (alpha * alpha.tan()));
            v += -hpp - hp * hp - nm2 * cot_x * hp - a * l * g;
        }
        v
    }
}

/// Piecewise representation of a principal eigenfunction on `[0, alpha]`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum IntervalFunction {
    /// Linear interpolation through nodes that include the end points.
    Nodal { x: Vec<f64>, values: Vec<f64> },
    /// `b(x) w(x)` with `w` linear between cell centers and constant beyond.
    Factored { factor: GroundFactor, centers: Vec<f64>, w: Vec<f64> },
}

fn locate(x: &[f64], t: f64) -> usize {
    match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
        Ok(i) => i.min(x.len() - 2),
        Err(i) => i.saturating_sub(1).min(x.len() - 2),
    }
}

impl IntervalFunction {
    /// Linear interpolant and its slope, constant outside the nodes.
    pub(crate) fn linear(x: &[f64], v: &[f64], t: f64) -> (f64, f64) {
        if t <= x[0] {
            return (v[0], 0.0);
        }
        if t >= x[x.len() - 1] {
            return (v[v.len() - 1], 0.0);
        }
        let i = locate(x, t);
        let s = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
        (v[i] + s * (t - x[i]), s)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Nodal { x, values } => Self::linear(x, values, t).0,
            Self::Factored { factor, centers, w } => {
                let tau = factor.problem.tau(t);
                factor.value(t, tau) * Self::linear(centers, w, t).0
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Self::Nodal { x, values } => Self::linear(x, values, t).1,
            Self::Factored { factor, centers, w } => {
                let tau = factor.problem.tau(t);
                if tau <= 0.0 {
                    return 0.0;
                }
                let b = factor.value(t, tau);
                let (wv, ws) = Self::linear(centers, w, t);
                b * (factor.log_slope(t, tau) * wv + ws)
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        match self {
            Self::Nodal { values, .. } => values.iter_mut().for_each(|v| *v *= c),
            Self::Factored { w, .. } => w.iter_mut().for_each(|v| *v *= c),
        }
    }
}

/// Assembled tridiagonal pencil on an interval.
#[derive(Debug, Clone)]
pub(crate) struct IntervalPencil {
    pub stiffness: SymTridiagonal,
    pub singular_mass: Option<SymTridiagonal>,
    pub mass: SymTridiagonal,
    /// Positions of the unknowns.
    pub unknowns: Vec<f64>,
    pub mesh_size: f64,
}

/// Ground-state transformed cell-centered finite volumes (`mu <= 1/4`).
pub(crate) fn assemble_ground_state(problem: IntervalProblem, mu: f64, cells: usize) -> Result<(IntervalPencil, GroundFactor)> {
    let factor = GroundFactor::new(problem, mu)?;
    let alpha = problem.alpha;
    let h = alpha / cells as f64;
    let face_weight = |f: usize| {
        if f == 0 || f == cells {
            return 0.0;
        }
        let x = h * f as f64;
        let tau = problem.tau(x);
        let b = factor.value(x, tau);
        problem.weight(x) * b * b
    };
    let faces: Vec<f64> = (0..=cells).map(face_weight).collect();
    let mut diag = Vec::with_capacity(cells);
    let mut mass = Vec::with_capacity(cells);
    let mut centers = Vec::with_capacity(cells);
    for i in 0..cells {
        let x = h * (i as f64 + 0.5);
        let tau = problem.tau(x);
        let b = factor.value(x, tau);
        let m = problem.weight(x) * b * b * h;
        centers.push(x);
        mass.push(m);
        diag.push((faces[i] + faces[i + 1]) / h + m * factor.potential(x, tau));
    }
    let off = (1..cells).map(|f| -faces[f] / h).collect();
    Ok((
        IntervalPencil {
            stiffness: SymTridiagonal { diag, off },
            singular_mass: None,
            mass: SymTridiagonal::from_diagonal(mass),
            unknowns: centers,
            mesh_size: h,
        },
        factor,
    ))
}

/// Central differences on a uniform grid with the potential evaluated at
/// the nodes. Caps use control volumes weighted by `sin^{n-2}`.
pub(crate) fn assemble_finite_difference(problem: IntervalProblem, lo: f64, hi: f64, intervals: usize) -> IntervalPencil {
    let h = (hi - lo) / intervals as f64;
    let first = if problem.dirichlet_left { 1 } else { 0 };
    let free_axis = !problem.dirichlet_left && lo == 0.0;
    let first = if free_axis { 0 } else { first.max(1) };
    let nodes: Vec<f64> = (first..intervals).map(|i| lo + h * i as f64).collect();
    let m = nodes.len();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m.saturating_sub(1)];
    let mut mass = vec![0.0; m];
    let mut pot = vec![0.0; m];
    for (j, &x) in nodes.iter().enumerate() {
        let left_face = if free_axis && j == 0 { 0.0 } else { problem.weight(x - 0.5 * h) };
        let right_face = problem.weight(x + 0.5 * h);
        diag[j] = (left_face + right_face) / h;
        if j + 1 < m {
            off[j] = -right_face / h;
        }
        let a = if free_axis && j == 0 { x } else { x - 0.5 * h };
        let (t, w) = gauss_on(a, x + 0.5 * h, 6);
        let vol: f64 = t.iter().zip(&w).map(|(t, w)| w * problem.weight(*t)).sum();
        mass[j] = vol;
        let d = ray_distance(problem.tau(x));
        pot[j] = vol / (d * d);
    }
    IntervalPencil {
        stiffness: SymTridiagonal { diag, off },
        singular_mass: Some(SymTridiagonal::from_diagonal(pot)),
        mass: SymTridiagonal::from_diagonal(mass),
        unknowns: nodes,
        mesh_size: h,
    }
}

/// Nodes of a power-graded mesh: `(position, distance to nearest Dirichlet end)`.
pub(crate) fn graded_nodes(problem: IntervalProblem, intervals: usize, grading: f64) -> Vec<(f64, f64)> {
    let alpha = problem.alpha;
    (0..=intervals)
        .map(|j| {
            let xi = j as f64 / intervals as f64;
            if problem.dirichlet_left {
                if 2 * j <= intervals {
                    let tau = 0.5 * alpha * (2.0 * xi).powf(grading);
                    (tau, tau)
                } else {
                    let tau = 0.5 * alpha * (2.0 * (1.0 - xi)).powf(grading);
                    (alpha - tau, tau)
                }
            } else {
                let tau = alpha * (1.0 - xi).powf(grading);
                (alpha - tau, tau)
            }
        })
        .collect()
}

/// Piecewise-linear Galerkin elements with consistent stiffness, mass and
/// `δ^{-2}`-weighted mass on a power-graded mesh.
pub(crate) fn assemble_galerkin(problem: IntervalProblem, intervals: usize, grading: f64) -> IntervalPencil {
    let nodes = graded_nodes(problem, intervals, grading);
    let total = nodes.len();
    let mut kd = vec![0.0; total];
    let mut ko = vec![0.0; total - 1];
    let mut md = vec![0.0; total];
    let mut mo = vec![0.0; total - 1];
    let mut bd = vec![0.0; total];
    let mut bo = vec![0.0; total - 1];
    let (g8, w8) = crate::quadrature::gauss_legendre(8);
    let (g16, w16) = crate::quadrature::gauss_legendre(16);
    for e in 0..total - 1 {
        let (x0, t0) = nodes[e];
        let (x1, t1) = nodes[e + 1];
        // Parametrize by τ when both ends share a Dirichlet side.
        let mid = 0.5 * problem.alpha;
        let same_side = !problem.dirichlet_left || x1 <= mid || x0 >= mid;
        let len = if same_side { (t1 - t0).abs() } else { x1 - x0 };
        // point at local coordinate s ∈ [0,1] from node e to e+1
        let point = |s: f64| -> (f64, f64) {
            if same_side {
                let tau = t0 + s * (t1 - t0);
                let x = if problem.dirichlet_left && x0 < mid { tau } else { problem.alpha - tau };
                (x, tau)
            } else {
                let x = x0 + s * (x1 - x0);
                (x, problem.tau(x))
            }
        };
        let (tmin, tmax) = (t0.min(t1), t0.max(t1));
        let logarithmic = same_side && tmin > 0.0 && tmax / tmin > 1.5;
        let mut acc = [0.0f64; 9];
        let mut add = |s: f64, w: f64| {
            let (x, tau) = point(s);
            let j = problem.weight(x);
            let d = ray_distance(tau);
            let n0 = 1.0 - s;
            let n1 = s;
            acc[0] += w * j; // ∫J ds
            acc[1] += w * j * n0 * n0;
            acc[2] += w * j * n0 * n1;
            acc[3] += w * j * n1 * n1;
            if d > 0.0 {
                let inv = 1.0 / (d * d);
                acc[4] += w * j * n0 * n0 * inv;
                acc[5] += w * j * n0 * n1 * inv;
                acc[6] += w * j * n1 * n1 * inv;
            }
        };
        if logarithmic {
            // s as a function of u = ln τ
            let (u0, u1) = (tmin.ln(), tmax.ln());
            for (g, w) in g16.iter().zip(&w16) {
                let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * g;
                let tau = u.exp();
                let s = (tau - t0) / (t1 - t0);
                let jac = 0.5 * (u1 - u0) * tau / len;
                add(s, w * jac);
            }
        } else {
            for (g, w) in g8.iter().zip(&w8) {
                add(0.5 * (1.0 + g), 0.5 * w);
            }
        }
        let ji = acc[0];
        kd[e] += ji / len;
        kd[e + 1] += ji / len;
        ko[e] -= ji / len;
        md[e] += acc[1] * len;
        md[e + 1] += acc[3] * len;
        mo[e] += acc[2] * len;
        bd[e] += acc[4] * len;
        bd[e + 1] += acc[6] * len;
        bo[e] += acc[5] * len;
    }
    let first = if problem.dirichlet_left { 1 } else { 0 };
    let last = total - 1; // exclusive: node at alpha is Dirichlet
    let slice = |d: &[f64], o: &[f64]| SymTridiagonal {
        diag: d[first..last].to_vec(),
        off: o[first..last - 1].to_vec(),
    };
    IntervalPencil {
        stiffness: slice(&kd, &ko),
        singular_mass: Some(slice(&bd, &bo)),
        mass: slice(&md, &mo),
        unknowns: nodes[first..last].iter().map(|p| p.0).collect(),
        mesh_size: problem.alpha / intervals as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_direct_formula() {
        for x in [0.05f64, 0.099, 0.1, 0.5, 1.2] {
            let s = x.sin();
            let direct = 1.0 / (s * s) - 1.0 / (x * x);
            assert!((inv_sin2_minus_inv_x2(x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn hemisphere_factor_is_exact_ground_state_at_zero() {
        let p = IntervalProblem { alpha: FRAC_PI_2, n: 3, dirichlet_left: false };
        let f = GroundFactor::new(p, 0.0).unwrap();
        for x in [0.1, 0.7, 1.5] {
            let tau = p.tau(x);
            assert!((f.value(x, tau) - x.cos()).abs() < 1e-14);
            // b = cos t satisfies -Δ_S b = 2 b
            assert!((f.potential(x, tau) - 2.0).abs() < 1e-12, "{}", f.potential(x, tau));
        }
    }

    #[test]
    fn graded_nodes_are_strictly_increasing() {
        let p = IntervalProblem { alpha: 1.75 * PI, n: 2, dirichlet_left: true };
        let nodes = graded_nodes(p, 1024, 6.0);
        for w in nodes.windows(2) {
            assert!(w[1].0 > w[0].0 || (w[1].1 - w[0].1).abs() > 0.0);
        }
        assert_eq!(nodes[512].0, 0.5 * p.alpha);
    }
}
