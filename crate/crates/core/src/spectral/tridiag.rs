//! Symmetric tridiagonal pencils: inertia counts, bisection for the lowest
//! eigenvalue and inverse iteration for its eigenvector.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// Super-diagonal, `len() == diag.len() - 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn from_diagonal(diag: Vec<f64>) -> Self {
        let n = diag.len();
        Self { diag, off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        Self {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + c * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + c * b).collect(),
        }
    }

    pub fn is_symmetric_positive_diagonal(&self) -> bool {
        self.diag.iter().all(|d| *d > 0.0)
    }
}

/// Number of eigenvalues of `a - λ b` strictly below `shift` (`b` positive
/// definite), from the signs of the LDLᵀ pivots of `a - shift * b`.
pub fn pencil_inertia(a: &SymTridiagonal, b: &SymTridiagonal, shift: f64) -> usize {
    let n = a.len();
    let mut count = 0;
    let mut d_prev = 1.0;
    let mut e_prev = 0.0;
    let scale = a
        .diag
        .iter()
        .zip(&b.diag)
        .map(|(x, y)| (x - shift * y).abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let pivmin = scale * 1e-40;
    for i in 0..n {
        let c = a.diag[i] - shift * b.diag[i];
        let mut d = if i == 0 { c } else { c - e_prev * e_prev / d_prev };
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        if i + 1 < n {
            e_prev = a.off[i] - shift * b.off[i];
        }
        d_prev = d;
    }
    count
}

/// Bracket `[lo, hi]` of the lowest eigenvalue of the pencil, with
/// `hi - lo <= tol * max(1, |λ|)`. `lo` has inertia zero.
pub fn lowest_pencil_eigenvalue(
    a: &SymTridiagonal,
    b: &SymTridiagonal,
    guess: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty pencil".into()));
    }
    let g = if guess.is_finite() { guess } else { 0.0 };
    let mut step = g.abs().max(1.0);
    let mut lo = g - step;
    let mut expansions = 0;
    while pencil_inertia(a, b, lo) > 0 {
        step *= 4.0;
        lo = g - step;
        expansions += 1;
        if expansions > 600 || !lo.is_finite() {
            return Err(Error::NoConvergence("no lower bound for the pencil spectrum".into()));
        }
    }
    let mut step = g.abs().max(1.0);
    let mut hi = g + step;
    expansions = 0;
    while pencil_inertia(a, b, hi) == 0 {
        step *= 4.0;
        hi = g + step;
        expansions += 1;
        if expansions > 600 || !hi.is_finite() {
            return Err(Error::NoConvergence("no upper bound for the pencil spectrum".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            return Ok((lo, hi));
        }
        if pencil_inertia(a, b, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!("bisection stalled in [{lo}, {hi}]")))
}

/// Solves `(a - shift b) x = rhs` for a positive definite shifted matrix.
pub fn solve_shifted(a: &SymTridiagonal, b: &SymTridiagonal, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        let c = a.diag[i] - shift * b.diag[i];
        d[i] = if i == 0 { c } else { c - l[i - 1] * l[i - 1] * d[i - 1] };
        if d[i] == 0.0 {
            d[i] = f64::EPSILON * (a.diag[i].abs() + shift.abs() * b.diag[i].abs()).max(1e-300);
        }
        if i + 1 < n {
            l[i] = (a.off[i] - shift * b.off[i]) / d[i];
        }
    }
    let mut y = rhs.to_vec();
    for i in 1..n {
        y[i] -= l[i - 1] * y[i - 1];
    }
    for i in 0..n {
        y[i] /= d[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        y[i] -= l[i] * y[i + 1];
    }
    y
}

/// Eigenvector for the eigenvalue just above `shift` by inverse iteration.
pub fn inverse_iteration(
    a: &SymTridiagonal,
    b: &SymTridiagonal,
    shift: f64,
    max_iter: usize,
) -> Vec<f64> {
    let n = a.len();
    let mut x = vec![1.0; n];
    let mut prev = f64::NAN;
    for _ in 0..max_iter {
        let rhs = b.mul_vec(&x);
        let mut y = solve_shifted(a, b, shift, &rhs);
        let m = y.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        for v in &mut y {
            *v /= m;
        }
        let rq = rayleigh(a, b, &y);
        x = y;
        if (rq - prev).abs() <= 1e-15 * rq.abs().max(1.0) {
            break;
        }
        prev = rq;
    }
    x
}

pub fn rayleigh(a: &SymTridiagonal, b: &SymTridiagonal, x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let num: f64 = ax.iter().zip(x).map(|(p, q)| p * q).sum();
    let den: f64 = bx.iter().zip(x).map(|(p, q)| p * q).sum();
    num / den
}

/// `‖(a - λ b) x‖ / ‖b x‖`, accumulated with error-free products.
pub fn pencil_residual(a: &SymTridiagonal, b: &SymTridiagonal, lambda: f64, x: &[f64]) -> f64 {
    let n = a.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let mut acc = TwoSum::default();
        let mut bacc = TwoSum::default();
        let mut push = |m: f64, bm: f64, xv: f64| {
            acc.add_product(m, xv);
            acc.add_product(-lambda * bm, xv);
            bacc.add_product(bm, xv);
        };
        push(a.diag[i], b.diag[i], x[i]);
        if i > 0 {
            push(a.off[i - 1], b.off[i - 1], x[i - 1]);
        }
        if i + 1 < n {
            push(a.off[i], b.off[i], x[i + 1]);
        }
        num += acc.value().powi(2);
        den += bacc.value().powi(2);
    }
    (num / den).sqrt()
}

/// Compensated accumulator for sums of products.
#[derive(Default, Clone, Copy)]
pub(crate) struct TwoSum {
    hi: f64,
    lo: f64,
}

impl TwoSum {
    pub fn add(&mut self, v: f64) {
        let s = self.hi + v;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (v - bp);
        self.hi = s;
        self.lo += err;
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.lo += e;
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        let h = 1.0 / (n + 1) as f64;
        SymTridiagonal {
            diag: vec![2.0 / (h * h); n],
            off: vec![-1.0 / (h * h); n - 1],
        }
    }

    #[test]
    fn inertia_counts_laplacian_eigenvalues() {
        let n = 50;
        let a = laplacian(n);
        let b = SymTridiagonal::from_diagonal(vec![1.0; n]);
        let h = 1.0 / (n + 1) as f64;
        let ev = |k: usize| 4.0 / (h * h) * (k as f64 * std::f64::consts::PI * h / 2.0).sin().powi(2);
        assert_eq!(pencil_inertia(&a, &b, 0.5 * (ev(3) + ev(4))), 3);
        assert_eq!(pencil_inertia(&a, &b, 0.0), 0);
        let (lo, hi) = lowest_pencil_eigenvalue(&a, &b, 0.0, 1e-13).unwrap();
        assert!((0.5 * (lo + hi) - ev(1)).abs() < 1e-10 * ev(1));
    }

    #[test]
    fn generalized_pencil_with_nondiagonal_mass() {
        // P1 elements for -u'' on (0,1): lowest eigenvalue above π².
        let n = 200;
        let h = 1.0 / (n + 1) as f64;
        let a = SymTridiagonal { diag: vec![2.0 / h; n], off: vec![-1.0 / h; n - 1] };
        let b = SymTridiagonal { diag: vec![4.0 * h / 6.0; n], off: vec![h / 6.0; n - 1] };
        let (lo, hi) = lowest_pencil_eigenvalue(&a, &b, 1.0, 1e-13).unwrap();
        let lam = 0.5 * (lo + hi);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(lam > pi2 && lam - pi2 < 1e-3);
        let x = inverse_iteration(&a, &b, lo, 20);
        assert!(x.iter().all(|v| *v > 0.0));
        assert!(pencil_residual(&a, &b, lam, &x) < 1e-8);
    }
}
