//! One-dimensional quadrature rules shared by the geometry, solver and
//! verification code.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one Gauss node is required");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped onto [a, b].
pub fn gauss_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

/// Composite Simpson nodes and weights on [a, b] with `panels` panels
/// (2 * panels + 1 nodes).
pub fn simpson_on(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = panels.max(1);
    let m = 2 * panels;
    let h = (b - a) / m as f64;
    let mut x = Vec::with_capacity(m + 1);
    let mut w = Vec::with_capacity(m + 1);
    for i in 0..=m {
        x.push(if i == m { b } else { a + h * i as f64 });
        let c = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        w.push(c * h / 3.0);
    }
    (x, w)
}

/// Simpson rule over consecutive breakpoints, `panels` panels per piece.
pub fn simpson_piecewise(breaks: &[f64], panels: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut w: Vec<f64> = Vec::new();
    for pair in breaks.windows(2) {
        if pair[1] <= pair[0] {
            continue;
        }
        let (px, pw) = simpson_on(pair[0], pair[1], panels);
        if let (Some(&last), Some(first)) = (x.last(), px.first()) {
            if last == *first {
                let n = w.len();
                w[n - 1] += pw[0];
                x.extend_from_slice(&px[1..]);
                w.extend_from_slice(&pw[1..]);
                continue;
            }
        }
        x.extend(px);
        w.extend(pw);
    }
    (x, w)
}

/// Integral of `f` by Simpson at two resolutions; returns (fine value, error estimate).
pub fn simpson_with_error(breaks: &[f64], panels: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let coarse = {
        let (x, w) = simpson_piecewise(breaks, panels);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>()
    };
    let fine = {
        let (x, w) = simpson_piecewise(breaks, 2 * panels);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum::<f64>()
    };
    (fine, (fine - coarse).abs() / 15.0 + f64::EPSILON * fine.abs())
}

/// Surface measure of the unit sphere in R^d, `d >= 1` (|S^{d-1}|).
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let (v, err) = simpson_with_error(&[0.0, 0.5, 2.0], 3, |x| x * x * x - x);
        assert!((v - (4.0 - 2.0)).abs() < 1e-13);
        assert!(err < 1e-13);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
