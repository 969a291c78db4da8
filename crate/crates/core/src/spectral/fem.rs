//! Piecewise-linear finite elements on triangulated spherical polygons.
//!
//! The polygon is projected stereographically from the antipode of its
//! center, triangulated by constrained Delaunay refinement and lifted back
//! to the sphere. Elements are the flat chord triangles through the lifted
//! vertices.

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, any_orthogonal, cross3, dot3, norm, normalize3, ConeSpec};

use super::sparse::{reverse_cuthill_mckee, CsrMatrix, EnvelopeLdl};

/// Smallest interior angle accepted for a lifted triangle, in degrees.
pub const MIN_ANGLE_DEG: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    /// Unit vectors.
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    /// `true` for vertices on the polygon boundary.
    pub boundary: Vec<bool>,
    pub target_h: f64,
    pub min_angle_deg: f64,
}

fn slerp(a: &[f64; 3], b: &[f64; 3], t: f64) -> [f64; 3] {
    let theta = angle_between(a, b);
    if theta < 1e-15 {
        return *a;
    }
    let s = theta.sin();
    let (wa, wb) = (((1.0 - t) * theta).sin() / s, (t * theta).sin() / s);
    normalize3(&[wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2]])
}

/// Point on the great-circle arc from `center` through `v` at fraction `f`
/// of their angular distance.
pub(crate) fn shrink_toward(center: &[f64; 3], v: &[f64; 3], f: f64) -> [f64; 3] {
    slerp(center, v, f)
}

struct Stereo {
    c: [f64; 3],
    e1: [f64; 3],
    e2: [f64; 3],
}

impl Stereo {
    fn new(c: [f64; 3]) -> Self {
        let e1 = any_orthogonal(&c);
        let e2 = cross3(&c, &e1);
        Self { c, e1, e2 }
    }

    fn project(&self, p: &[f64; 3]) -> [f64; 2] {
        let d = 1.0 + dot3(p, &self.c);
        [dot3(p, &self.e1) / d, dot3(p, &self.e2) / d]
    }

    fn lift(&self, q: [f64; 2]) -> [f64; 3] {
        let r2 = q[0] * q[0] + q[1] * q[1];
        let s = 1.0 / (1.0 + r2);
        let mut p = [0.0; 3];
        for k in 0..3 {
            p[k] = s * (2.0 * (q[0] * self.e1[k] + q[1] * self.e2[k]) + (1.0 - r2) * self.c[k]);
        }
        normalize3(&p)
    }
}

fn triangle_angles(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> [f64; 3] {
    let ang = |p: &[f64; 3], q: &[f64; 3], r: &[f64; 3]| {
        let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
        let v = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
        norm(&cross3(&u, &v)).atan2(dot3(&u, &v))
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

impl SurfaceMesh {
    /// Triangulates the cross-section of a spherical-polygon cone with
    /// target edge length `h` (radians).
    pub fn build(spec: &ConeSpec, h: f64) -> Result<Self> {
        let data = spec
            .polygon_data()
            .ok_or_else(|| Error::InvalidArgument("surface meshes need a spherical polygon".into()))?;
        Self::from_polygon(&data.vertices, data.center, h)
    }

    pub(crate) fn from_polygon(vertices: &[[f64; 3]], center: [f64; 3], h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 0.2) {
            return Err(Error::InvalidArgument(format!("mesh size must lie in (0, 0.2], got {h}")));
        }
        let stereo = Stereo::new(center);
        let k = vertices.len();
        let mut outline: Vec<[f64; 2]> = Vec::new();
        for i in 0..k {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % k];
            // plane spacing h/2 everywhere: sphere spacing scales by 2/(1+|P|²)
            let pa = stereo.project(a);
            let pb = stereo.project(b);
            let ra = pa[0] * pa[0] + pa[1] * pa[1];
            let rb = pb[0] * pb[0] + pb[1] * pb[1];
            let step = h / (1.0 + ra.max(rb));
            let segments = (angle_between(a, b) / step).ceil().max(1.0) as usize;
            for s in 0..segments {
                outline.push(stereo.project(&slerp(a, b, s as f64 / segments as f64)));
            }
        }
        let m = outline.len();
        let points: Vec<Point2<f64>> = outline.iter().map(|q| Point2::new(q[0], q[1])).collect();
        let edges: Vec<[usize; 2]> = (0..m).map(|i| [i, (i + 1) % m]).collect();
        let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
            ConstrainedDelaunayTriangulation::bulk_load_cdt(points, edges)
                .map_err(|e| Error::Mesh(format!("boundary insertion failed: {e:?}")))?;
        let plane_h = 0.5 * h;
        let params = RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(25.0))
            .with_max_allowed_area(0.5 * 3f64.sqrt() * 0.5 * plane_h * plane_h)
            .with_max_additional_vertices(4_000_000)
            .keep_constraint_edges()
            .exclude_outer_faces(true);
        let result = cdt.refine(params);
        if !result.refinement_complete {
            return Err(Error::Mesh("refinement did not complete".into()));
        }
        let excluded: std::collections::HashSet<_> = result.excluded_faces.iter().copied().collect();
        let mut vertices3 = Vec::with_capacity(cdt.num_vertices());
        let mut boundary = vec![false; cdt.num_vertices()];
        for v in cdt.vertices() {
            let p = v.position();
            vertices3.push(stereo.lift([p.x, p.y]));
        }
        for e in cdt.undirected_edges() {
            if cdt.is_constraint_edge(e.fix()) {
                for v in e.vertices() {
                    boundary[v.fix().index()] = true;
                }
            }
        }
        let mut triangles = Vec::new();
        for f in cdt.inner_faces() {
            if excluded.contains(&f.fix()) {
                continue;
            }
            let [a, b, c] = f.vertices().map(|v| v.fix().index());
            triangles.push([a, b, c]);
        }
        // drop vertices not used by any retained triangle
        let mut used = vec![false; vertices3.len()];
        for t in &triangles {
            for &i in t {
                used[i] = true;
            }
        }
        let mut remap = vec![usize::MAX; vertices3.len()];
        let mut verts = Vec::new();
        let mut bnd = Vec::new();
        for i in 0..vertices3.len() {
            if used[i] {
                remap[i] = verts.len();
                verts.push(vertices3[i]);
                bnd.push(boundary[i]);
            }
        }
        let triangles: Vec<[usize; 3]> = triangles.iter().map(|t| t.map(|i| remap[i])).collect();
        let mut min_angle = f64::INFINITY;
        for t in &triangles {
            let [a, b, c] = t.map(|i| verts[i]);
            for ang in triangle_angles(&a, &b, &c) {
                min_angle = min_angle.min(ang.to_degrees());
            }
        }
        if min_angle < MIN_ANGLE_DEG {
            return Err(Error::Mesh(format!(
                "minimum angle {min_angle:.2} degrees is below {MIN_ANGLE_DEG}"
            )));
        }
        Ok(Self { vertices: verts, triangles, boundary: bnd, target_h: h, min_angle_deg: min_angle })
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|i| !self.boundary[*i]).collect()
    }

    fn flat_area(&self, t: &[usize; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        0.5 * norm(&cross3(&u, &v))
    }

    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.vertices.len()];
        for t in &self.triangles {
            let a = self.flat_area(t) / 3.0;
            for &i in t {
                m[i] += a;
            }
        }
        m
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| self.flat_area(t)).sum()
    }

    /// Cotangent stiffness matrix on all vertices.
    pub fn stiffness(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(9 * self.triangles.len());
        for tri in &self.triangles {
            let p = tri.map(|i| self.vertices[i]);
            for k in 0..3 {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let u = [p[i][0] - p[k][0], p[i][1] - p[k][1], p[i][2] - p[k][2]];
                let v = [p[j][0] - p[k][0], p[j][1] - p[k][1], p[j][2] - p[k][2]];
                let cot = dot3(&u, &v) / norm(&cross3(&u, &v));
                let w = 0.5 * cot;
                let (gi, gj) = (tri[i], tri[j]);
                t.push((gi, gj, -w));
                t.push((gj, gi, -w));
                t.push((gi, gi, w));
                t.push((gj, gj, w));
            }
        }
        CsrMatrix::from_triplets(self.vertices.len(), t)
    }

    /// Triangle containing the direction `p` and barycentric weights.
    pub fn locate(&self, p: &[f64; 3]) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for (ti, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|i| self.vertices[i]);
            let det = dot3(&a, &cross3(&b, &c));
            if det.abs() < 1e-300 {
                continue;
            }
            let w = [
                dot3(p, &cross3(&b, &c)) / det,
                dot3(&a, &cross3(p, &c)) / det,
                dot3(&a, &cross3(&b, p)) / det,
            ];
            let s = w[0] + w[1] + w[2];
            if s <= 0.0 {
                continue;
            }
            let w = [w[0] / s, w[1] / s, w[2] / s];
            let worst = w.iter().copied().fold(f64::INFINITY, f64::min);
            if worst >= -1e-12 {
                return Some((ti, w));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((ti, w, worst));
            }
        }
        best.filter(|b| b.2 > -1e-6).map(|b| (b.0, b.1))
    }
}

/// Lowest eigenpair of the pencil `(a, diag(b))` by shift-invert inverse
/// iteration with inertia-verified shifts. Returns `(λ, x, iterations)`
/// with `x` max-normalized to 1.
pub(crate) fn lowest_sparse_eigenpair(a: &CsrMatrix, b: &[f64], guess: f64) -> Result<(f64, Vec<f64>, usize)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("no interior unknowns".into()));
    }
    let perm = reverse_cuthill_mckee(a);
    let g = if guess.is_finite() { guess } else { 0.0 };
    let mut step = 0.05 * (1.0 + g.abs());
    let mut shift = g - step;
    let mut factor = EnvelopeLdl::factor(a, b, shift, &perm)?;
    let mut trace = Vec::new();
    while factor.negative_count() > 0 {
        trace.push(shift);
        step *= 4.0;
        shift = g - step;
        if trace.len() > 60 || !shift.is_finite() {
            return Err(Error::NoConvergence(format!("no shift below the spectrum; tried {trace:?}")));
        }
        factor = EnvelopeLdl::factor(a, b, shift, &perm)?;
    }
    let quotient = |x: &[f64]| {
        let ax = a.mul_vec(x);
        let num: f64 = ax.iter().zip(x).map(|(p, q)| p * q).sum();
        let den: f64 = x.iter().zip(b).map(|(q, w)| q * q * w).sum();
        num / den
    };
    let mut x = vec![1.0; n];
    let mut rq = quotient(&x);
    let mut iterations = 0;
    for it in 0..400 {
        iterations = it + 1;
        let rhs: Vec<f64> = x.iter().zip(b).map(|(p, w)| p * w).collect();
        let mut y = factor.solve(&rhs);
        let m = y.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        if m == 0.0 || !m.is_finite() {
            return Err(Error::NoConvergence("inverse iteration produced a degenerate vector".into()));
        }
        y.iter_mut().for_each(|v| *v /= m);
        let new_rq = quotient(&y);
        x = y;
        let done = (new_rq - rq).abs() <= 1e-14 * new_rq.abs().max(1.0);
        rq = new_rq;
        if done && it > 0 {
            break;
        }
        if it % 4 == 3 {
            let candidate = shift + 0.9 * (rq - shift);
            if candidate > shift {
                let f = EnvelopeLdl::factor(a, b, candidate, &perm)?;
                if f.negative_count() == 0 {
                    shift = candidate;
                    factor = f;
                }
            }
        }
        if it == 399 {
            return Err(Error::NoConvergence(format!("inverse iteration stalled at {rq}")));
        }
    }
    let tol = 1e-9 * rq.abs().max(1.0);
    let check = EnvelopeLdl::factor(a, b, rq + tol, &perm)?;
    if check.negative_count() != 1 {
        return Err(Error::NoConvergence(format!(
            "Rayleigh quotient {rq} is not the lowest eigenvalue ({} below it)",
            check.negative_count()
        )));
    }
    if x.iter().any(|v| *v <= 0.0) {
        return Err(Error::SignChange(format!(
            "{} of {n} components are not positive",
            x.iter().filter(|v| **v <= 0.0).count()
        )));
    }
    Ok((rq, x, iterations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octant() -> ConeSpec {
        ConeSpec::polygon(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn stereographic_round_trip() {
        let s = Stereo::new(normalize3(&[1.0, 2.0, 3.0]));
        let p = normalize3(&[0.3, -0.2, 0.9]);
        let q = s.lift(s.project(&p));
        assert!(angle_between(&p, &q) < 1e-14);
    }

    #[test]
    fn octant_mesh_quality_and_area() {
        let mesh = SurfaceMesh::build(&octant(), 0.1).unwrap();
        assert!(mesh.min_angle_deg >= MIN_ANGLE_DEG);
        let area = std::f64::consts::PI / 2.0;
        assert!((mesh.total_area() - area).abs() < 0.01 * area);
        let k = mesh.stiffness();
        assert!(k.is_symmetric(1e-14));
        // constants lie in the kernel of the full stiffness
        let ones = vec![1.0; mesh.vertices.len()];
        assert!(k.mul_vec(&ones).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn rejects_oversized_target() {
        assert!(SurfaceMesh::build(&octant(), 0.5).is_err());
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let mesh = SurfaceMesh::build(&octant(), 0.2).unwrap();
        let p = normalize3(&[1.0, 1.0, 1.0]);
        let (t, w) = mesh.locate(&p).unwrap();
        let mut q = [0.0; 3];
        for (k, &i) in mesh.triangles[t].iter().enumerate() {
            for c in 0..3 {
                q[c] += w[k] * mesh.vertices[i][c];
            }
        }
        assert!(angle_between(&normalize3(&q), &p) < 1e-12);
    }
}
