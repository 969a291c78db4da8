//! Symmetric sparse matrices: CSR storage, reverse Cuthill-McKee ordering
//! and an envelope LDLᵀ factorization that also reports inertia.

use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::tridiag::TwoSum;

/// Symmetric matrix in compressed sparse row form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|(c, _)| *c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `self + c * diag(d)`.
    pub fn add_diagonal(&self, c: f64, d: &[f64]) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                if out.cols[k] == i {
                    out.vals[k] += c * d[i];
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (v - self.get(j, i)).abs() <= tol * v.abs().max(1.0)))
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Vec::new();
        for (new, &old) in keep.iter().enumerate() {
            for (j, v) in self.row(old) {
                if map[j] != usize::MAX {
                    t.push((new, map[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), t)
    }

    /// `‖(self - λ diag(b)) x‖ / ‖diag(b) x‖` with compensated row sums.
    pub fn pencil_residual(&self, b: &[f64], lambda: f64, x: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n {
            let mut acc = TwoSum::default();
            for (j, v) in self.row(i) {
                acc.add_product(v, x[j]);
            }
            acc.add_product(-lambda * b[i], x[i]);
            num += acc.value().powi(2);
            den += (b[i] * x[i]).powi(2);
        }
        (num / den).sqrt()
    }
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let seed = (0..n).filter(|i| !visited[*i]).min_by_key(|i| degree[*i]).unwrap();
        let start = pseudo_peripheral(a, seed, &visited);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|j| !visited[*j]).collect();
            next.sort_by_key(|j| (degree[*j], *j));
            for j in next {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &CsrMatrix, start: usize, blocked: &[bool]) -> (usize, usize) {
    let n = a.dim();
    let mut level = vec![usize::MAX; n];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        last = v;
        for (j, _) in a.row(v) {
            if !blocked[j] && level[j] == usize::MAX {
                level[j] = level[v] + 1;
                queue.push_back(j);
            }
        }
    }
    (last, level[last])
}

fn pseudo_peripheral(a: &CsrMatrix, seed: usize, blocked: &[bool]) -> usize {
    let mut node = seed;
    let (mut far, mut ecc) = bfs_levels(a, node, blocked);
    for _ in 0..8 {
        let (f2, e2) = bfs_levels(a, far, blocked);
        if e2 <= ecc {
            break;
        }
        node = far;
        far = f2;
        ecc = e2;
    }
    node
}

/// Envelope (profile) LDLᵀ factorization without pivoting.
#[derive(Debug, Clone)]
pub struct EnvelopeLdl {
    perm: Vec<usize>,
    first: Vec<usize>,
    /// Row `i` holds `L[i, first[i]..i]`.
    rows: Vec<Vec<f64>>,
    d: Vec<f64>,
}

impl EnvelopeLdl {
    /// Factors `a - shift * diag(b)` in the ordering `perm`.
    pub fn factor(a: &CsrMatrix, b: &[f64], shift: f64, perm: &[usize]) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first = vec![0usize; n];
        for i in 0..n {
            let old = perm[i];
            first[i] = a.row(old).map(|(j, _)| inv[j]).filter(|j| *j <= i).min().unwrap_or(i);
        }
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut d = vec![0.0; n];
        let scale = a.diagonal().iter().zip(b).map(|(x, y)| (x - shift * y).abs()).fold(0.0f64, f64::max);
        let tiny = scale.max(f64::MIN_POSITIVE) * 1e-40;
        let mut w = Vec::new();
        for i in 0..n {
            let fi = first[i];
            let old = perm[i];
            w.clear();
            w.resize(i - fi + 1, 0.0);
            for (j, v) in a.row(old) {
                let jn = inv[j];
                if jn >= fi && jn <= i {
                    w[jn - fi] += v;
                }
            }
            w[i - fi] -= shift * b[old];
            // w_j <- a_ij - Σ_k L_jk w_k, then L_ij = w_j / d_j
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let rj = &rows[j];
                let mut s = 0.0;
                for k in lo..j {
                    s += rj[k - fj] * w[k - fi];
                }
                w[j - fi] -= s;
            }
            let mut diag = w[i - fi];
            let mut row = Vec::with_capacity(i - fi);
            for j in fi..i {
                let l = w[j - fi] / d[j];
                diag -= l * w[j - fi];
                row.push(l);
            }
            if !diag.is_finite() {
                return Err(Error::NoConvergence(format!("factorization broke down at row {i}")));
            }
            if diag.abs() < tiny {
                diag = -tiny;
            }
            d[i] = diag;
            rows.push(row);
        }
        Ok(Self { perm: perm.to_vec(), first, rows, d })
    }

    /// Number of negative pivots, equal to the number of eigenvalues of the
    /// factored pencil below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|v| **v < 0.0).count()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| rhs[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let mut s = 0.0;
            for (k, l) in self.rows[i].iter().enumerate() {
                s += l * y[fi + k];
            }
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            for (k, l) in self.rows[i].iter().enumerate() {
                y[fi + k] -= l * yi;
            }
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
        out
    }

    pub fn envelope_size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(m: usize) -> CsrMatrix {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(m * m, t)
    }

    #[test]
    fn factor_solves_and_counts_inertia() {
        let m = 12;
        let a = grid_laplacian(m);
        assert!(a.is_symmetric(0.0));
        let b = vec![1.0; m * m];
        let perm = reverse_cuthill_mckee(&a);
        let f = EnvelopeLdl::factor(&a, &b, 0.0, &perm).unwrap();
        let x: Vec<f64> = (0..m * m).map(|i| (i as f64).sin()).collect();
        let rhs = a.mul_vec(&x);
        let y = f.solve(&rhs);
        let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-11);
        assert_eq!(f.negative_count(), 0);
        // eigenvalues 4 - 2cos(iπ/(m+1)) - 2cos(jπ/(m+1)); three lie below this shift
        let h = std::f64::consts::PI / (m as f64 + 1.0);
        let ev = |i: f64, j: f64| 4.0 - 2.0 * (i * h).cos() - 2.0 * (j * h).cos();
        let shift = 0.5 * (ev(2.0, 2.0) + ev(2.0, 1.0));
        let f = EnvelopeLdl::factor(&a, &b, shift, &perm).unwrap();
        assert_eq!(f.negative_count(), 3);
    }

    #[test]
    fn rcm_reduces_envelope() {
        let a = grid_laplacian(15);
        let n = a.dim();
        let b = vec![1.0; n];
        // a scrambled ordering
        let scrambled: Vec<usize> = (0..n).map(|i| (i * 97) % n).collect();
        let bad = EnvelopeLdl::factor(&a, &b, 0.0, &scrambled).unwrap();
        let good = EnvelopeLdl::factor(&a, &b, 0.0, &reverse_cuthill_mckee(&a)).unwrap();
        assert!(good.envelope_size() < bad.envelope_size());
    }
}
