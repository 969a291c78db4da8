//! Cone cross-sections on the unit sphere and the distance functions they
//! induce.
//!
//! A cone is `{x != 0 : x/|x| in Σ}`. Sectors live in the plane with the
//! angle measured from the positive x-axis, so the sector of opening π is
//! the upper half-plane. Caps are axisymmetric about the last coordinate
//! axis. Spherical polygons live on the 2-sphere and are bounded by minor
//! great-circle arcs.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{gauss_on, sphere_area};

const UNIT_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-12;

/// `sin t` up to a right angle and 1 beyond: the distance from a unit
/// vector to a ray at angle `t` from it.
pub fn ray_distance(t: f64) -> f64 {
    if t <= FRAC_PI_2 {
        t.sin()
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossSection {
    Sector { alpha: f64 },
    Cap { alpha: f64 },
    SphericalPolygon { vertices: Vec<[f64; 3]> },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeSpec {
    n: usize,
    cross_section: CrossSection,
    #[serde(skip)]
    polygon: Option<PolygonData>,
}

impl PartialEq for ConeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cross_section == other.cross_section
    }
}

impl ConeSpec {
    pub fn new(n: usize, cross_section: CrossSection) -> Result<Self> {
        match &cross_section {
            CrossSection::Sector { alpha } => {
                if n != 2 {
                    return Err(Error::InvalidCone(format!(
                        "a sector requires n = 2 (got n = {n})"
                    )));
                }
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < TAU) {
                    return Err(Error::InvalidCone(format!(
                        "a sector requires 0 < alpha < 2π (got alpha = {alpha})"
                    )));
                }
                Ok(Self { n, cross_section, polygon: None })
            }
            CrossSection::Cap { alpha } => {
                if n < 3 {
                    return Err(Error::InvalidCone(format!(
                        "a cap requires n >= 3 (got n = {n})"
                    )));
                }
                if !(alpha.is_finite() && *alpha > 0.0 && *alpha < PI) {
                    return Err(Error::InvalidCone(format!(
                        "a cap requires 0 < alpha < π (got alpha = {alpha})"
                    )));
                }
                Ok(Self { n, cross_section, polygon: None })
            }
            CrossSection::SphericalPolygon { vertices } => {
                if n != 3 {
                    return Err(Error::InvalidCone(format!(
                        "a spherical polygon requires n = 3 (got n = {n})"
                    )));
                }
                let data = PolygonData::new(vertices)?;
                let cross_section = CrossSection::SphericalPolygon {
                    vertices: data.vertices.clone(),
                };
                Ok(Self { n, cross_section, polygon: Some(data) })
            }
        }
    }

    pub fn sector(alpha: f64) -> Result<Self> {
        Self::new(2, CrossSection::Sector { alpha })
    }

    pub fn cap(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, CrossSection::Cap { alpha })
    }

    pub fn polygon(vertices: Vec<[f64; 3]>) -> Result<Self> {
        Self::new(3, CrossSection::SphericalPolygon { vertices })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cross_section
    }

    /// Opening angle for sectors and polar half-angle for caps.
    pub fn alpha(&self) -> Option<f64> {
        match self.cross_section {
            CrossSection::Sector { alpha } | CrossSection::Cap { alpha } => Some(alpha),
            CrossSection::SphericalPolygon { .. } => None,
        }
    }

    pub(crate) fn polygon_data(&self) -> Option<&PolygonData> {
        self.polygon.as_ref()
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match &self.cross_section {
            CrossSection::Sector { alpha } => format!("sector(alpha={alpha})"),
            CrossSection::Cap { alpha } => format!("cap(n={},alpha={alpha})", self.n),
            CrossSection::SphericalPolygon { vertices } => {
                format!("polygon({} vertices)", vertices.len())
            }
        }
    }

    /// Whether the cone lies in a half-space whose boundary contains the origin.
    pub fn has_supporting_hyperplane(&self) -> bool {
        match &self.cross_section {
            CrossSection::Sector { alpha } => *alpha <= PI + 1e-12,
            CrossSection::Cap { alpha } => *alpha <= FRAC_PI_2 + 1e-12,
            CrossSection::SphericalPolygon { .. } => {
                let data = self.polygon.as_ref().expect("polygon data");
                data.vertices.iter().all(|v| dot3(v, &data.center) >= -1e-12)
            }
        }
    }

    /// The one-dimensional coordinate of `p` for sectors (angle from the
    /// x-axis) and caps (polar angle from the axis).
    pub fn coordinate(&self, p: &PointOnSphere) -> Result<f64> {
        self.check_dim(p)?;
        match self.cross_section {
            CrossSection::Sector { alpha } => {
                let c = p.coords();
                let mut theta = c[1].atan2(c[0]);
                if theta < 0.0 {
                    theta += TAU;
                }
                if theta > alpha + CLOSURE_TOL {
                    if TAU - theta <= CLOSURE_TOL {
                        theta = 0.0;
                    } else {
                        return Err(Error::OutsideCrossSection(format!(
                            "angle {theta} is not in [0, {alpha}]"
                        )));
                    }
                }
                Ok(theta.min(alpha))
            }
            CrossSection::Cap { alpha } => {
                let c = p.coords();
                let last = c[c.len() - 1];
                let rest = c[..c.len() - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
                let t = rest.atan2(last);
                if t > alpha + CLOSURE_TOL {
                    return Err(Error::OutsideCrossSection(format!(
                        "polar angle {t} exceeds {alpha}"
                    )));
                }
                Ok(t.min(alpha))
            }
            CrossSection::SphericalPolygon { .. } => Err(invalid(
                "spherical polygons have no one-dimensional coordinate",
            )),
        }
    }

    /// Great-circle distance to the boundary of the cross-section.
    pub fn geodesic_distance(&self, p: &PointOnSphere) -> Result<f64> {
        match self.cross_section {
            CrossSection::Sector { alpha } => {
                let theta = self.coordinate(p)?;
                Ok(theta.min(alpha - theta).max(0.0))
            }
            CrossSection::Cap { alpha } => Ok((alpha - self.coordinate(p)?).max(0.0)),
            CrossSection::SphericalPolygon { .. } => {
                self.check_dim(p)?;
                let data = self.polygon.as_ref().expect("polygon data");
                let q = [p.coords()[0], p.coords()[1], p.coords()[2]];
                let d = data.boundary_distance(&q);
                if d > 1e-10 && !data.contains(&q) {
                    return Err(Error::OutsideCrossSection(format!(
                        "point {q:?} lies outside the polygon"
                    )));
                }
                Ok(d)
            }
        }
    }

    /// Euclidean distance from the unit vector `p` to the boundary of the cone.
    pub fn delta_on_sphere(&self, p: &PointOnSphere) -> Result<f64> {
        Ok(ray_distance(self.geodesic_distance(p)?))
    }

    /// Distance to the cone boundary for an arbitrary point of the closed cone.
    pub fn delta(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(invalid(format!(
                "point has dimension {} but the cone lives in R^{}",
                x.len(),
                self.n
            )));
        }
        let r = norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        let p = PointOnSphere { coords: x.iter().map(|v| v / r).collect() };
        Ok(r * self.delta_on_sphere(&p)?)
    }

    /// Distance profile as a function of the one-dimensional coordinate.
    pub fn delta_of_coordinate(&self, x: f64) -> f64 {
        ray_distance(self.offset_of_coordinate(x))
    }

    /// Great-circle distance to the boundary as a function of the coordinate.
    pub fn offset_of_coordinate(&self, x: f64) -> f64 {
        match self.cross_section {
            CrossSection::Sector { alpha } => x.min(alpha - x).max(0.0),
            CrossSection::Cap { alpha } => (alpha - x).max(0.0),
            CrossSection::SphericalPolygon { .. } => f64::NAN,
        }
    }

    /// Unit vector with the given one-dimensional coordinate.
    pub fn point_at(&self, x: f64) -> PointOnSphere {
        match self.cross_section {
            CrossSection::Sector { .. } => PointOnSphere::from_angle(x),
            _ => PointOnSphere::from_polar(self.n, x),
        }
    }

    /// Area of the cross-section (surface measure on the sphere).
    pub fn cross_section_area(&self) -> f64 {
        match self.cross_section {
            CrossSection::Sector { alpha } => alpha,
            CrossSection::Cap { alpha } => {
                let (t, w) = gauss_on(0.0, alpha, 64);
                let k = self.n - 2;
                sphere_area(self.n - 1)
                    * t.iter().zip(&w).map(|(t, w)| w * t.sin().powi(k as i32)).sum::<f64>()
            }
            CrossSection::SphericalPolygon { .. } => self.polygon.as_ref().unwrap().area,
        }
    }

    fn check_dim(&self, p: &PointOnSphere) -> Result<()> {
        if p.dim() != self.n {
            return Err(invalid(format!(
                "point has dimension {} but the cone lives in R^{}",
                p.dim(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Euclidean distance from `p` to the boundary cone of `spec`.
pub fn boundary_distance_delta(spec: &ConeSpec, p: &PointOnSphere) -> Result<f64> {
    spec.delta_on_sphere(p)
}

/// Great-circle distance from `p` to the boundary of the cross-section.
pub fn geodesic_boundary_distance(spec: &ConeSpec, p: &PointOnSphere) -> Result<f64> {
    spec.geodesic_distance(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOnSphere {
    coords: Vec<f64>,
}

impl PointOnSphere {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 || coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("a point on the sphere needs at least two finite coordinates"));
        }
        let r = norm(&coords);
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(invalid(format!("point has norm {r}, expected 1")));
        }
        Ok(Self { coords })
    }

    pub fn normalized(v: &[f64]) -> Result<Self> {
        let r = norm(v);
        if !(r > 0.0 && r.is_finite()) || v.len() < 2 {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { coords: v.iter().map(|c| c / r).collect() })
    }

    pub fn from_angle(theta: f64) -> Self {
        Self { coords: vec![theta.cos(), theta.sin()] }
    }

    /// Point at polar angle `t` from the last coordinate axis.
    pub fn from_polar(n: usize, t: f64) -> Self {
        let mut coords = vec![0.0; n];
        coords[0] = t.sin();
        coords[n - 1] = t.cos();
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Inner,
    Outer,
    Annulus,
    /// Radial support of a test function.
    Shell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedRegion {
    pub r_min: f64,
    pub r_max: f64,
    pub kind: RegionKind,
}

impl TruncatedRegion {
    pub fn new(r_min: f64, r_max: f64, kind: RegionKind) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_min < r_max) {
            return Err(invalid(format!(
                "region radii must satisfy 0 < r_min < r_max < ∞ (got {r_min}, {r_max})"
            )));
        }
        Ok(Self { r_min, r_max, kind })
    }

    /// The annulus `R/2 <= |x| <= 2R`.
    pub fn annulus(radius: f64) -> Result<Self> {
        Self::new(radius / 2.0, 2.0 * radius, RegionKind::Annulus)
    }
}

/// Tensor quadrature grid over a truncated cone: radial nodes times
/// cross-section nodes.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub directions: Vec<PointOnSphere>,
    pub angular_weights: Vec<f64>,
}

impl RegionGrid {
    pub fn total_weight(&self) -> f64 {
        let r: f64 = self.radial_weights.iter().sum();
        let a: f64 = self.angular_weights.iter().sum();
        r * a
    }

    /// Iterates over (point, weight) pairs of the tensor grid.
    pub fn points(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.radii.iter().zip(&self.radial_weights).flat_map(move |(r, wr)| {
            self.directions.iter().zip(&self.angular_weights).map(move |(d, wa)| {
                (d.coords().iter().map(|c| c * r).collect::<Vec<_>>(), wr * wa)
            })
        })
    }
}

/// Tensor grid with log-spaced Gauss radial nodes on `[r_min, r_max]`
/// (weights include `r^{n-1}`) and positive cross-section weights.
pub fn sample_region_grid(
    spec: &ConeSpec,
    region: &TruncatedRegion,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<RegionGrid> {
    if radial_nodes < 4 || angular_nodes < 4 {
        return Err(invalid("radial and angular node counts must be at least 4"));
    }
    TruncatedRegion::new(region.r_min, region.r_max, region.kind)?;
    let n = spec.dim() as i32;
    let (s, ws) = gauss_on(region.r_min.ln(), region.r_max.ln(), radial_nodes);
    let radii: Vec<f64> = s.iter().map(|s| s.exp()).collect();
    let radial_weights = radii.iter().zip(&ws).map(|(r, w)| w * r.powi(n)).collect();
    let (directions, angular_weights) = match spec.cross_section() {
        CrossSection::Sector { alpha } => {
            let (t, w) = gauss_on(0.0, *alpha, angular_nodes);
            (t.into_iter().map(PointOnSphere::from_angle).collect(), w)
        }
        CrossSection::Cap { alpha } => {
            let (t, w) = gauss_on(0.0, *alpha, angular_nodes);
            let k = (spec.dim() - 2) as i32;
            let s = sphere_area(spec.dim() - 1);
            let w = t.iter().zip(&w).map(|(t, w)| s * w * t.sin().powi(k)).collect();
            (t.into_iter().map(|t| PointOnSphere::from_polar(spec.dim(), t)).collect(), w)
        }
        CrossSection::SphericalPolygon { .. } => {
            let area = spec.cross_section_area();
            let h = (2.3 * area / angular_nodes as f64).sqrt().clamp(1e-3, 0.2);
            let mesh = crate::spectral::fem::SurfaceMesh::build(spec, h)?;
            let mut dirs = Vec::with_capacity(mesh.triangles.len());
            let mut weights = Vec::with_capacity(mesh.triangles.len());
            for tri in &mesh.triangles {
                let [a, b, c] = tri.map(|i| mesh.vertices[i]);
                let centroid = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
                dirs.push(PointOnSphere::normalized(&centroid)?);
                weights.push(spherical_triangle_area(&a, &b, &c));
            }
            (dirs, weights)
        }
    };
    Ok(RegionGrid { radii, radial_weights, directions, angular_weights })
}

/// Closed-form volume of a truncated cone.
pub fn region_volume(spec: &ConeSpec, region: &TruncatedRegion) -> f64 {
    let n = spec.dim() as i32;
    spec.cross_section_area() * (region.r_max.powi(n) - region.r_min.powi(n)) / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerCheck {
    pub max_residual: f64,
    pub checked: usize,
    pub ridge_flagged: usize,
}

/// Maximum of `|x·∇δ(x) - δ(x)|` over the samples, with `∇δ` by central
/// differences. Samples whose one-sided differences disagree are counted as
/// ridge-adjacent and skipped.
pub fn euler_identity_check(spec: &ConeSpec, samples: &[Vec<f64>], fd_step: f64) -> Result<EulerCheck> {
    if !(fd_step > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let mut max_residual: f64 = 0.0;
    let mut checked = 0;
    let mut ridge_flagged = 0;
    for x in samples {
        let d0 = spec.delta(x)?;
        if d0 <= 10.0 * fd_step {
            return Err(invalid(format!("sample {x:?} is too close to the boundary")));
        }
        let mut grad = vec![0.0; x.len()];
        let mut ridge = false;
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += fd_step;
            xm[i] -= fd_step;
            let fp = spec.delta(&xp)?;
            let fm = spec.delta(&xm)?;
            let forward = (fp - d0) / fd_step;
            let backward = (d0 - fm) / fd_step;
            if (forward - backward).abs() > 1e-3 * forward.abs().max(backward.abs()).max(1.0) {
                ridge = true;
            }
            grad[i] = (fp - fm) / (2.0 * fd_step);
        }
        if ridge {
            ridge_flagged += 1;
            continue;
        }
        let euler: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum();
        max_residual = max_residual.max((euler - d0).abs());
        checked += 1;
    }
    Ok(EulerCheck { max_residual, checked, ridge_flagged })
}

#[derive(Debug, Clone)]
pub(crate) struct PolygonData {
    pub vertices: Vec<[f64; 3]>,
    /// Unit normals of the edge great circles, pointing into the region.
    pub normals: Vec<[f64; 3]>,
    pub center: [f64; 3],
    pub area: f64,
}

impl PolygonData {
    fn new(raw: &[[f64; 3]]) -> Result<Self> {
        if raw.len() < 3 {
            return Err(Error::InvalidCone("a spherical polygon needs at least 3 vertices".into()));
        }
        let mut vertices = Vec::with_capacity(raw.len());
        for v in raw {
            let r = norm(v);
            if !(r.is_finite() && (r - 1.0).abs() <= 1e-9) {
                return Err(Error::InvalidCone(format!("vertex {v:?} is not a unit vector")));
            }
            vertices.push([v[0] / r, v[1] / r, v[2] / r]);
        }
        let k = vertices.len();
        for i in 0..k {
            for j in i + 1..k {
                if angle_between(&vertices[i], &vertices[j]) < 1e-9 {
                    return Err(Error::InvalidCone(format!("vertices {i} and {j} coincide")));
                }
            }
            let a = vertices[i];
            let b = vertices[(i + 1) % k];
            if norm(&cross3(&a, &b)) < 1e-9 {
                return Err(Error::InvalidCone(format!(
                    "edge {i} joins antipodal or coincident vertices"
                )));
            }
        }
        let mut area = TAU - turning_sum(&vertices);
        if area > TAU + 1e-9 {
            vertices.reverse();
            area = TAU - turning_sum(&vertices);
        }
        let normals: Vec<[f64; 3]> = (0..k)
            .map(|i| normalize3(&cross3(&vertices[i], &vertices[(i + 1) % k])))
            .collect();
        for i in 0..k {
            for j in 0..k {
                let adjacent = j == i || j == (i + 1) % k || i == (j + 1) % k;
                if adjacent {
                    continue;
                }
                let (a, b) = (vertices[i], vertices[(i + 1) % k]);
                let (c, d) = (vertices[j], vertices[(j + 1) % k]);
                if arcs_intersect(&a, &b, &normals[i], &c, &d, &normals[j]) {
                    return Err(Error::InvalidCone(format!(
                        "boundary is not simple: edges {i} and {j} intersect"
                    )));
                }
            }
            let prev = (i + k - 1) % k;
            let t_in = cross3(&normals[prev], &vertices[i]);
            let t_out = cross3(&normals[i], &vertices[i]);
            if dot3(&t_in, &t_out) < -1.0 + 1e-12 {
                return Err(Error::InvalidCone(format!("boundary folds back at vertex {i}")));
            }
        }
        let mut vector_area = [0.0; 3];
        for i in 0..k {
            let theta = angle_between(&vertices[i], &vertices[(i + 1) % k]);
            for c in 0..3 {
                vector_area[c] += 0.5 * theta * normals[i][c];
            }
        }
        if norm(&vector_area) < 1e-12 {
            return Err(Error::InvalidCone("polygon has no well-defined interior".into()));
        }
        let center = normalize3(&vector_area);
        let data = Self { vertices, normals, center, area };
        let antipode = [-center[0], -center[1], -center[2]];
        if data.contains(&antipode) || data.boundary_distance(&antipode) < 1e-6 {
            return Err(Error::InvalidCone(
                "polygon is too large: it reaches the antipode of its center".into(),
            ));
        }
        Ok(data)
    }

    /// Exact great-circle distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: &[f64; 3]) -> f64 {
        let k = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..k {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % k];
            best = best.min(arc_distance(p, a, b, &self.normals[i]));
        }
        best
    }

    /// Winding-number membership test for the open region.
    pub fn contains(&self, p: &[f64; 3]) -> bool {
        let e1 = any_orthogonal(p);
        let e2 = cross3(p, &e1);
        let azimuth = |q: &[f64; 3]| dot3(q, &e2).atan2(dot3(q, &e1));
        let k = self.vertices.len();
        let mut total = 0.0;
        for i in 0..k {
            let a = azimuth(&self.vertices[i]);
            let b = azimuth(&self.vertices[(i + 1) % k]);
            let mut d = b - a;
            while d > PI {
                d -= TAU;
            }
            while d < -PI {
                d += TAU;
            }
            total += d;
        }
        total > PI
    }
}

fn turning_sum(v: &[[f64; 3]]) -> f64 {
    let k = v.len();
    let mut sum = 0.0;
    for i in 0..k {
        let prev = v[(i + k - 1) % k];
        let next = v[(i + 1) % k];
        let n_in = normalize3(&cross3(&prev, &v[i]));
        let n_out = normalize3(&cross3(&v[i], &next));
        let t_in = cross3(&n_in, &v[i]);
        let t_out = cross3(&n_out, &v[i]);
        sum += dot3(&cross3(&t_in, &t_out), &v[i]).atan2(dot3(&t_in, &t_out));
    }
    sum
}

fn arc_distance(p: &[f64; 3], a: &[f64; 3], b: &[f64; 3], normal: &[f64; 3]) -> f64 {
    let h = dot3(p, normal);
    let q = [p[0] - h * normal[0], p[1] - h * normal[1], p[2] - h * normal[2]];
    let qn = norm(&q);
    if qn > 1e-15 {
        let on_arc = dot3(&cross3(a, &q), normal) >= 0.0 && dot3(&cross3(&q, b), normal) >= 0.0;
        if on_arc {
            return h.abs().atan2(qn);
        }
    }
    angle_between(p, a).min(angle_between(p, b))
}

fn arcs_intersect(
    a: &[f64; 3],
    b: &[f64; 3],
    n1: &[f64; 3],
    c: &[f64; 3],
    d: &[f64; 3],
    n2: &[f64; 3],
) -> bool {
    let line = cross3(n1, n2);
    if norm(&line) < 1e-14 {
        // Same great circle: overlapping arcs share interior points.
        let inside = |p: &[f64; 3], s: &[f64; 3], e: &[f64; 3], n: &[f64; 3]| {
            dot3(&cross3(s, p), n) > 1e-12 && dot3(&cross3(p, e), n) > 1e-12
        };
        return inside(c, a, b, n1) || inside(d, a, b, n1) || inside(a, c, d, n2);
    }
    let l = normalize3(&line);
    for sign in [1.0, -1.0] {
        let q = [sign * l[0], sign * l[1], sign * l[2]];
        let on = |s: &[f64; 3], e: &[f64; 3], n: &[f64; 3]| {
            dot3(&cross3(s, &q), n) >= -1e-14 && dot3(&cross3(&q, e), n) >= -1e-14
        };
        if on(a, b, n1) && on(c, d, n2) {
            return true;
        }
    }
    false
}

pub(crate) fn spherical_triangle_area(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    let num = dot3(a, &cross3(b, c)).abs();
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

pub(crate) fn angle_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    norm(&cross3(a, b)).atan2(dot3(a, b))
}

pub(crate) fn any_orthogonal(p: &[f64; 3]) -> [f64; 3] {
    let axis = if p[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if p[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    normalize3(&cross3(p, &axis))
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize3(a: &[f64; 3]) -> [f64; 3] {
    let r = norm(a);
    [a[0] / r, a[1] / r, a[2] / r]
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
