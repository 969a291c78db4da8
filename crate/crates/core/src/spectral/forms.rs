//! Mass and energy of a computed eigenfunction on the cross-section.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ray_distance;
use crate::quadrature::{gauss_legendre, sphere_area};

use super::interval::{GroundFactor, IntervalFunction, IntervalProblem};
use super::{Eigenfunction, Repr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForms {
    /// `∫ φ²`.
    pub mass: f64,
    /// `∫ |∇φ|² - μ φ²/δ²`.
    pub energy: f64,
    /// Estimated quadrature error of `energy`.
    pub error: f64,
}

/// Halvings toward a Dirichlet end.
const GEOMETRIC_PANELS: usize = 100;

impl Eigenfunction {
    /// Mass and energy of `φ` for the potential `μ/δ²`.
    ///
    /// One-dimensional reductions are integrated piecewise between the
    /// interpolation nodes, with geometric panels next to Dirichlet ends and
    /// the leading boundary term added in closed form. Polygon eigenfunctions
    /// use the discrete forms on their mesh.
    pub fn quadratic_forms(&self, mu: f64) -> Result<QuadraticForms> {
        match &self.repr {
            Repr::Interval { problem, f } => interval_forms(*problem, f, mu),
            Repr::Surface { mesh, full } => {
                let data = self.spec.polygon_data().expect("surface eigenfunctions live on polygons");
                let m = mesh.lumped_mass();
                let k = mesh.stiffness();
                let kx = k.mul_vec(full);
                let mut mass = 0.0;
                let mut energy: f64 = full.iter().zip(&kx).map(|(a, b)| a * b).sum();
                for (i, v) in full.iter().enumerate() {
                    if *v == 0.0 {
                        continue;
                    }
                    mass += m[i] * v * v;
                    let d = ray_distance(data.boundary_distance(&mesh.vertices[i]));
                    energy -= mu * m[i] * v * v / (d * d);
                }
                Ok(QuadraticForms { mass, energy, error: 0.0 })
            }
        }
    }
}

struct Piece {
    /// `(x, τ)` at both ends.
    a: (f64, f64),
    b: (f64, f64),
}

fn interval_forms(problem: IntervalProblem, f: &IntervalFunction, mu: f64) -> Result<QuadraticForms> {
    let alpha = problem.alpha;
    let mut breaks: Vec<f64> = match f {
        IntervalFunction::Nodal { x, .. } => x.clone(),
        IntervalFunction::Factored { centers, .. } => centers.clone(),
    };
    breaks.push(0.0);
    breaks.push(alpha);
    if problem.dirichlet_left {
        breaks.push(0.5 * alpha);
    }
    breaks.retain(|x| (0.0..=alpha).contains(x));
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let pieces: Vec<Piece> = breaks
        .windows(2)
        .map(|p| Piece { a: (p[0], problem.tau(p[0])), b: (p[1], problem.tau(p[1])) })
        .collect();
    let area = if problem.dirichlet_left { 1.0 } else { sphere_area(problem.n - 1) };
    let (g4, w4) = gauss_legendre(4);
    let (g8, w8) = gauss_legendre(8);
    let integrand = |x: f64, tau: f64| -> (f64, f64) { point_forms(problem, f, mu, x, tau) };

    let mut mass = 0.0;
    let mut energy = 0.0;
    let mut error = 0.0;
    for piece in &pieces {
        let singular_end = if piece.a.1 == 0.0 {
            Some((piece.a.0, 1.0))
        } else if piece.b.1 == 0.0 {
            Some((piece.b.0, -1.0))
        } else {
            None
        };
        let rule = |g: &[f64], w: &[f64]| -> (f64, f64) {
            let mut m = 0.0;
            let mut e = 0.0;
            match singular_end {
                Some((x_end, dir)) => {
                    // τ runs from the end into the piece
                    let len = (piece.b.0 - piece.a.0).abs();
                    let mut hi = len;
                    for _ in 0..GEOMETRIC_PANELS {
                        let lo = 0.5 * hi;
                        for (gi, wi) in g.iter().zip(w) {
                            let tau = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gi;
                            let x = x_end + dir * tau;
                            let (pm, pe) = integrand(x, tau);
                            m += 0.5 * (hi - lo) * wi * pm;
                            e += 0.5 * (hi - lo) * wi * pe;
                        }
                        hi = lo;
                    }
                }
                None => {
                    let (x0, x1) = (piece.a.0, piece.b.0);
                    for (gi, wi) in g.iter().zip(w) {
                        let x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gi;
                        let (pm, pe) = integrand(x, problem.tau(x));
                        m += 0.5 * (x1 - x0) * wi * pm;
                        e += 0.5 * (x1 - x0) * wi * pe;
                    }
                }
            }
            (m, e)
        };
        let (m8, e8) = rule(&g8, &w8);
        let (_, e4) = rule(&g4, &w4);
        mass += m8;
        energy += e8;
        error += (e8 - e4).abs();
        if let (Some((x_end, _)), IntervalFunction::Factored { factor, centers, w }) = (singular_end, f) {
            let len = (piece.b.0 - piece.a.0).abs();
            let tau_min = len * 0.5f64.powi(GEOMETRIC_PANELS as i32);
            let wb = IntervalFunction::linear(centers, w, x_end).0;
            let tail = boundary_tail(factor, mu, x_end, tau_min, wb)?;
            energy += tail;
        }
    }
    Ok(QuadraticForms { mass: area * mass, energy: area * energy, error: area * error })
}

/// `∫_0^{τ_min} J b² (a² - μ)/τ² w² dτ` with `b ≈ τ^a e^h`.
fn boundary_tail(factor: &GroundFactor, mu: f64, x_end: f64, tau_min: f64, wb: f64) -> Result<f64> {
    let a = factor.a;
    let c0 = a * a - mu;
    if c0.abs() < 1e-15 {
        return Ok(0.0);
    }
    let p = 2.0 * a - 1.0;
    if p <= 1e-12 {
        return Err(Error::InvalidArgument(
            "energy of the eigenfunction diverges for this potential".into(),
        ));
    }
    let j = factor.problem.weight(x_end);
    let e2h = (factor.slope * x_end * x_end).exp();
    Ok(j * e2h * wb * wb * c0 * tau_min.powf(p) / p)
}

/// Pointwise `(Jφ², J(|φ'|² - μφ²/δ²))`.
fn point_forms(problem: IntervalProblem, f: &IntervalFunction, mu: f64, x: f64, tau: f64) -> (f64, f64) {
    let j = problem.weight(x);
    match f {
        IntervalFunction::Nodal { .. } => {
            let v = f.value(x);
            let dv = f.derivative(x);
            let d = ray_distance(tau);
            let pot = if d > 0.0 { mu * v * v / (d * d) } else { 0.0 };
            (j * v * v, j * (dv * dv - pot))
        }
        IntervalFunction::Factored { factor, centers, w } => {
            if tau <= 0.0 {
                return (0.0, 0.0);
            }
            let b = factor.value(x, tau);
            let (wv, dw) = IntervalFunction::linear(centers, w, x);
            let a = factor.a;
            let l = factor.log_slope(x, tau);
            let ell = factor.log_psi_slope(x, tau);
            let sx = factor.slope * x;
            let d = ray_distance(tau);
            // L² - μ/δ² without the cancelling 1/δ² parts
            let q = a * a * factor.cot2_minus_potential(tau)
                + (a * a - mu) / (d * d)
                + 2.0 * a * ell * sx
                + sx * sx;
            let b2 = b * b;
            (j * b2 * wv * wv, j * b2 * (q * wv * wv + 2.0 * l * wv * dw + dw * dw))
        }
    }
}
