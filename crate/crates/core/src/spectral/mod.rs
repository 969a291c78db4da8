//! Principal eigenvalue `σ(μ)` of `-Δ_S - μ/δ²` on a cross-section with
//! Dirichlet boundary conditions.

pub mod fem;
mod forms;
pub(crate) mod interval;
pub mod sparse;
pub mod tridiag;

mod analysis;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ray_distance, ConeSpec, CrossSection, PointOnSphere};

pub use forms::QuadraticForms;

use fem::SurfaceMesh;
use interval::{IntervalFunction, IntervalPencil, IntervalProblem};
use sparse::CsrMatrix;
use tridiag::{inverse_iteration, lowest_pencil_eigenvalue, pencil_residual, SymTridiagonal};

pub use analysis::{
    agmon_supersolution_check, divergence_diagnostic, exhaustion_monotonicity, mu0_compute,
    mu0_compute_with, richardson, sigma_of_mu, sigma_of_mu_with, sigma_on_fixed_grid, AgmonReport,
    DivergenceReport, ExhaustionReport, Mu0Method, Mu0Result, Richardson,
};

/// Discretization of the one-dimensional reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Finite volumes for `w = φ/b` where `b` carries the boundary behaviour.
    GroundState,
    /// Central differences with the potential sampled at the nodes.
    FiniteDifference,
    /// Piecewise-linear elements on a boundary-graded mesh.
    Galerkin,
    /// Piecewise-linear elements on a triangulated polygon.
    SurfaceElements,
}

/// Solver controls shared by all σ computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Unknowns on the coarsest 1-D level.
    pub nodes: usize,
    /// Number of grid doublings.
    pub levels: usize,
    /// Power-law boundary grading; `1` means uniform.
    pub grading: f64,
    /// Forces a 1-D scheme instead of the automatic choice.
    pub scheme: Option<Scheme>,
    /// Coarsest target edge length for polygons.
    pub mesh_h: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { nodes: 1024, levels: 3, grading: 1.0, scheme: None, mesh_h: 0.1 }
    }
}

impl SolverOptions {
    pub(crate) fn interval_scheme(&self, mu: f64) -> Scheme {
        match self.scheme {
            Some(s) if s != Scheme::SurfaceElements => s,
            _ if self.grading > 1.0 => Scheme::Galerkin,
            _ if mu <= 0.25 => Scheme::GroundState,
            _ => Scheme::FiniteDifference,
        }
    }
}

#[derive(Debug, Clone)]
enum Body {
    Interval {
        problem: IntervalProblem,
        pencil: IntervalPencil,
        /// `stiffness - μ singular_mass`, or the transformed matrix.
        a: SymTridiagonal,
        factor: Option<interval::GroundFactor>,
        /// Dirichlet/free ends of the computational interval.
        span: (f64, f64),
    },
    Surface {
        mesh: Arc<SurfaceMesh>,
        interior: Vec<usize>,
        a: CsrMatrix,
        mass: Vec<f64>,
        potential: Vec<f64>,
    },
}

/// Assembled symmetric pencil `(A, B)` whose lowest eigenvalue is the
/// discrete `σ(μ)`.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    spec: ConeSpec,
    mu: f64,
    scheme: Scheme,
    body: Body,
}

impl DiscreteOperator {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        match &self.body {
            Body::Interval { a, .. } => a.len(),
            Body::Surface { interior, .. } => interior.len(),
        }
    }

    pub fn mesh_size(&self) -> f64 {
        match &self.body {
            Body::Interval { pencil, .. } => pencil.mesh_size,
            Body::Surface { mesh, .. } => mesh.target_h,
        }
    }

    /// Positions of the unknowns: angular coordinate for 1-D problems,
    /// mesh vertex index for polygons.
    pub fn unknowns(&self) -> Vec<f64> {
        match &self.body {
            Body::Interval { pencil, .. } => pencil.unknowns.clone(),
            Body::Surface { interior, .. } => interior.iter().map(|i| *i as f64).collect(),
        }
    }

    /// `μ/δ²` at the unknowns.
    pub fn potential_diag(&self) -> Vec<f64> {
        match &self.body {
            Body::Interval { problem, pencil, .. } => pencil
                .unknowns
                .iter()
                .map(|x| self.mu / ray_distance(problem.tau(*x)).powi(2))
                .collect(),
            Body::Surface { potential, .. } => potential.iter().map(|p| self.mu * p).collect(),
        }
    }

    /// Diagonal of the mass matrix.
    pub fn mass_diag(&self) -> Vec<f64> {
        match &self.body {
            Body::Interval { pencil, .. } => pencil.mass.diag.clone(),
            Body::Surface { mass, .. } => mass.clone(),
        }
    }

    pub(crate) fn sparse_pencil(&self) -> Option<(&CsrMatrix, &[f64])> {
        match &self.body {
            Body::Surface { a, mass, .. } => Some((a, mass)),
            Body::Interval { .. } => None,
        }
    }

    /// Lumped `δ⁻²`-weighted mass of a surface operator.
    pub(crate) fn singular_weight(&self) -> Option<Vec<f64>> {
        match &self.body {
            Body::Surface { mass, potential, .. } => Some(mass.iter().zip(potential).map(|(m, p)| m * p).collect()),
            Body::Interval { .. } => None,
        }
    }

    pub(crate) fn tridiagonal_pencil(&self) -> Option<(&SymTridiagonal, &SymTridiagonal)> {
        match &self.body {
            Body::Interval { a, pencil, .. } => Some((a, &pencil.mass)),
            Body::Surface { .. } => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.body {
            Body::Interval { .. } => true,
            Body::Surface { a, .. } => a.is_symmetric(1e-12),
        }
    }
}

fn check_nodes(node_count: usize) -> Result<()> {
    if node_count < 16 {
        return Err(invalid(format!("at least 16 nodes are required, got {node_count}")));
    }
    Ok(())
}

pub(crate) fn assemble_interval(
    spec: &ConeSpec,
    mu: f64,
    node_count: usize,
    grading: f64,
    scheme: Scheme,
) -> Result<DiscreteOperator> {
    check_nodes(node_count)?;
    if !mu.is_finite() {
        return Err(invalid("mu must be finite"));
    }
    let problem = IntervalProblem::from_spec(spec)?;
    let span = (0.0, problem.alpha);
    let (pencil, factor) = match scheme {
        Scheme::GroundState => {
            let (p, f) = interval::assemble_ground_state(problem, mu, node_count)?;
            (p, Some(f))
        }
        Scheme::FiniteDifference => {
            (interval::assemble_finite_difference(problem, 0.0, problem.alpha, node_count), None)
        }
        Scheme::Galerkin => {
            if grading < 1.0 {
                return Err(invalid("grading must be at least 1"));
            }
            let intervals = node_count + node_count % 2;
            (interval::assemble_galerkin(problem, intervals, grading), None)
        }
        Scheme::SurfaceElements => return Err(invalid("surface elements need a polygon")),
    };
    Ok(operator_from_pencil(spec, mu, scheme, problem, pencil, factor, span))
}

fn operator_from_pencil(
    spec: &ConeSpec,
    mu: f64,
    scheme: Scheme,
    problem: IntervalProblem,
    pencil: IntervalPencil,
    factor: Option<interval::GroundFactor>,
    span: (f64, f64),
) -> DiscreteOperator {
    let a = match &pencil.singular_mass {
        Some(s) => pencil.stiffness.add_scaled(-mu, s),
        None => pencil.stiffness.clone(),
    };
    DiscreteOperator { spec: spec.clone(), mu, scheme, body: Body::Interval { problem, pencil, a, factor, span } }
}

/// Sector reduction on `(0, α)`. `grading > 1` selects graded elements;
/// otherwise the ground-state scheme is used for `μ <= 1/4` and central
/// differences above.
pub fn assemble_sector(spec: &ConeSpec, mu: f64, node_count: usize, grading: f64) -> Result<DiscreteOperator> {
    if !matches!(spec.cross_section(), CrossSection::Sector { .. }) {
        return Err(invalid("assemble_sector needs a sector"));
    }
    let opts = SolverOptions { grading, ..SolverOptions::default() };
    assemble_interval(spec, mu, node_count, grading, opts.interval_scheme(mu))
}

/// Axisymmetric cap reduction in the measure `sin^{n-2}(t) dt`.
pub fn assemble_cap(spec: &ConeSpec, mu: f64, node_count: usize, grading: f64) -> Result<DiscreteOperator> {
    if !matches!(spec.cross_section(), CrossSection::Cap { .. }) {
        return Err(invalid("assemble_cap needs a cap"));
    }
    let opts = SolverOptions { grading, ..SolverOptions::default() };
    assemble_interval(spec, mu, node_count, grading, opts.interval_scheme(mu))
}

/// Surface elements on a triangulated polygon, potential lumped at vertices.
pub fn assemble_polygon(spec: &ConeSpec, mu: f64, target_h: f64) -> Result<DiscreteOperator> {
    let data = spec.polygon_data().ok_or_else(|| invalid("assemble_polygon needs a spherical polygon"))?;
    let mesh = Arc::new(SurfaceMesh::from_polygon(&data.vertices, data.center, target_h)?);
    assemble_on_mesh(spec, mu, mesh)
}

pub(crate) fn assemble_on_mesh(spec: &ConeSpec, mu: f64, mesh: Arc<SurfaceMesh>) -> Result<DiscreteOperator> {
    let data = spec.polygon_data().ok_or_else(|| invalid("surface elements need a spherical polygon"))?;
    let interior = mesh.interior();
    if interior.is_empty() {
        return Err(Error::Mesh("mesh has no interior vertices".into()));
    }
    let full_mass = mesh.lumped_mass();
    let stiffness = mesh.stiffness().submatrix(&interior);
    let mass: Vec<f64> = interior.iter().map(|i| full_mass[*i]).collect();
    let potential: Vec<f64> = interior
        .iter()
        .map(|i| {
            let d = ray_distance(data.boundary_distance(&mesh.vertices[*i]));
            full_mass[*i] / (d * d)
        })
        .collect();
    let a = stiffness.add_diagonal(-mu, &potential);
    let potential = potential.iter().zip(&mass).map(|(p, m)| p / m).collect();
    Ok(DiscreteOperator {
        spec: spec.clone(),
        mu,
        scheme: Scheme::SurfaceElements,
        body: Body::Surface { mesh, interior, a, mass, potential },
    })
}

/// Eigenfunction of a single discretization level.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    spec: ConeSpec,
    repr: Repr,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Repr {
    Interval { problem: IntervalProblem, f: IntervalFunction },
    Surface { mesh: Arc<SurfaceMesh>, full: Vec<f64> },
}

impl Eigenfunction {
    /// Unknown positions (see [`DiscreteOperator::unknowns`]).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Values at the unknowns, positive with maximum 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }

    /// Value at the angular coordinate of a 1-D reduction.
    pub fn at_coordinate(&self, x: f64) -> Result<f64> {
        match &self.repr {
            Repr::Interval { problem, f } => {
                if !(-1e-12..=problem.alpha + 1e-12).contains(&x) {
                    return Err(Error::OutsideCrossSection(format!("coordinate {x} outside [0, {}]", problem.alpha)));
                }
                Ok(f.value(x.clamp(0.0, problem.alpha)))
            }
            Repr::Surface { .. } => Err(invalid("polygon eigenfunctions have no 1-D coordinate")),
        }
    }

    /// Derivative with respect to the angular coordinate.
    pub fn derivative_at_coordinate(&self, x: f64) -> Result<f64> {
        match &self.repr {
            Repr::Interval { problem, f } => {
                if !(0.0..=problem.alpha).contains(&x) {
                    return Err(Error::OutsideCrossSection(format!("coordinate {x} outside [0, {}]", problem.alpha)));
                }
                Ok(f.derivative(x))
            }
            Repr::Surface { .. } => Err(invalid("polygon eigenfunctions have no 1-D coordinate")),
        }
    }

    /// Value at a point of the closed cross-section.
    pub fn eval(&self, p: &PointOnSphere) -> Result<f64> {
        match &self.repr {
            Repr::Interval { .. } => self.at_coordinate(self.spec.coordinate(p)?),
            Repr::Surface { mesh, full } => {
                let c = p.coords();
                let q = [c[0], c[1], c[2]];
                let (t, w) = mesh
                    .locate(&q)
                    .ok_or_else(|| Error::OutsideCrossSection("direction is outside the mesh".into()))?;
                Ok(mesh.triangles[t].iter().zip(w).map(|(i, w)| w * full[*i]).sum())
            }
        }
    }

    /// Mesh and vertex values (boundary vertices carry 0) for polygons.
    pub fn surface(&self) -> Option<(&SurfaceMesh, &[f64])> {
        match &self.repr {
            Repr::Surface { mesh, full } => Some((mesh, full)),
            Repr::Interval { .. } => None,
        }
    }
}

/// One refinement level of a σ computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelValue {
    pub mesh_size: f64,
    pub unknowns: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub mu: f64,
    pub sigma: f64,
    pub phi: Eigenfunction,
    /// `‖(A - σB)φ‖ / ‖Bφ‖` at the finest level.
    pub residual_norm: f64,
    /// `‖(A - σB)φ‖ / ((‖A‖ + |σ|‖B‖)‖φ‖)` at the finest level.
    pub backward_error: f64,
    pub levels: Vec<LevelValue>,
    pub extrapolated: bool,
    pub observed_order: Option<f64>,
    pub monotone: bool,
    pub scheme: Scheme,
    pub flags: Vec<String>,
}

fn tridiagonal_norm(a: &SymTridiagonal) -> f64 {
    (0..a.len())
        .map(|i| {
            let mut s = a.diag[i].abs();
            if i > 0 {
                s += a.off[i - 1].abs();
            }
            if i + 1 < a.len() {
                s += a.off[i].abs();
            }
            s
        })
        .fold(0.0, f64::max)
}

/// Lowest eigenpair of an assembled operator.
pub fn principal_eigenpair(op: &DiscreteOperator) -> Result<SpectralResult> {
    let (sigma, phi, residual, backward) = match &op.body {
        Body::Interval { problem, pencil, a, factor, span } => {
            let b = &pencil.mass;
            let guess = if a.diag.iter().zip(&b.diag).all(|(x, y)| y.abs() > 0.0 && x.is_finite()) {
                0.0
            } else {
                return Err(Error::NoConvergence("non-finite matrix entries".into()));
            };
            let (lo, hi) = lowest_pencil_eigenvalue(a, b, guess, 1e-15)?;
            let sigma = 0.5 * (lo + hi);
            let mut x = inverse_iteration(a, b, lo, 8);
            let m = x.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
            x.iter_mut().for_each(|v| *v /= m);
            let negative = x.iter().filter(|v| **v <= 0.0).count();
            if negative > 0 {
                return Err(Error::SignChange(format!("{negative} of {} components are not positive", x.len())));
            }
            let residual = pencil_residual(a, b, sigma, &x);
            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ax_norm = residual * b.mul_vec(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
            let backward =
                ax_norm / ((tridiagonal_norm(a) + sigma.abs() * tridiagonal_norm(b)) * xnorm);
            let (f, nodes, values) = interval_function(*problem, pencil, factor.as_ref(), &x, *span);
            let phi = Eigenfunction {
                spec: op.spec.clone(),
                repr: Repr::Interval { problem: *problem, f },
                nodes,
                values,
            };
            (sigma, phi, residual, backward)
        }
        Body::Surface { mesh, interior, a, mass, .. } => {
            let guess = 0.0;
            let (sigma, x, _) = fem::lowest_sparse_eigenpair(a, mass, guess)?;
            let residual = a.pencil_residual(mass, sigma, &x);
            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let bx = x.iter().zip(mass).map(|(p, q)| (p * q).powi(2)).sum::<f64>().sqrt();
            let anorm = (0..a.dim()).map(|i| a.row(i).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max);
            let bnorm = mass.iter().copied().fold(0.0, f64::max);
            let backward = residual * bx / ((anorm + sigma.abs() * bnorm) * xnorm);
            let mut full = vec![0.0; mesh.vertices.len()];
            for (k, &i) in interior.iter().enumerate() {
                full[i] = x[k];
            }
            let phi = Eigenfunction {
                spec: op.spec.clone(),
                repr: Repr::Surface { mesh: Arc::clone(mesh), full },
                nodes: interior.iter().map(|i| *i as f64).collect(),
                values: x,
            };
            (sigma, phi, residual, backward)
        }
    };
    Ok(SpectralResult {
        mu: op.mu,
        sigma,
        phi,
        residual_norm: residual,
        backward_error: backward,
        levels: vec![LevelValue { mesh_size: op.mesh_size(), unknowns: op.dimension(), sigma }],
        extrapolated: false,
        observed_order: None,
        monotone: true,
        scheme: op.scheme,
        flags: Vec::new(),
    })
}

/// Builds the continuous representation and max-normalized nodal values.
fn interval_function(
    problem: IntervalProblem,
    pencil: &IntervalPencil,
    factor: Option<&interval::GroundFactor>,
    x: &[f64],
    span: (f64, f64),
) -> (IntervalFunction, Vec<f64>, Vec<f64>) {
    let nodes = pencil.unknowns.clone();
    match factor {
        Some(g) => {
            let values: Vec<f64> = nodes.iter().zip(x).map(|(t, w)| g.value(*t, problem.tau(*t)) * w).collect();
            let mut m = values.iter().copied().fold(0.0, f64::max);
            if !problem.dirichlet_left {
                m = m.max(g.value(0.0, problem.tau(0.0)) * x[0]);
            }
            let mut f = IntervalFunction::Factored { factor: *g, centers: nodes.clone(), w: x.to_vec() };
            f.scale(1.0 / m);
            (f, nodes, values.iter().map(|v| v / m).collect())
        }
        None => {
            let mut xs = Vec::with_capacity(nodes.len() + 2);
            let mut vs = Vec::with_capacity(nodes.len() + 2);
            let free_axis = !problem.dirichlet_left && span.0 == 0.0;
            if !free_axis {
                xs.push(span.0);
                vs.push(0.0);
            }
            xs.extend_from_slice(&nodes);
            vs.extend_from_slice(x);
            xs.push(span.1);
            vs.push(0.0);
            let m = x.iter().copied().fold(0.0, f64::max);
            let mut f = IntervalFunction::Nodal { x: xs, values: vs };
            f.scale(1.0 / m);
            (f, nodes, x.iter().map(|v| v / m).collect())
        }
    }
}
