//! Sparse symmetric positive-definite systems: CSR storage, banded Cholesky
//! with iterative refinement, and Jacobi-preconditioned conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles an `n × n` matrix, summing duplicate entries.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(i, j, v) in triplets {
            entries[fill[i]] = (j, v);
            fill[i] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::with_capacity(triplets.len());
        let mut val = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for i in 0..n {
            let row = &mut entries[counts[i]..counts[i + 1]];
            row.sort_by_key(|e| e.0);
            for &(j, v) in row.iter() {
                if col.len() > row_ptr[i] && *col.last().unwrap() == j {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(j);
                    val.push(v);
                }
            }
            row_ptr.push(col.len());
        }
        Self { n, row_ptr, col, val }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).find(|&(j, _)| j == i).map_or(0.0, |(_, v)| v))
            .collect()
    }

    /// Half bandwidth `max |i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }
}

/// Cholesky factor `L` of a banded SPD matrix, stored row-wise with
/// `bw + 1` entries per row.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut data = vec![0.0; n * w];
        // Entry (i, j), j ≤ i, lives at i*w + bw + j - i.
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[i * w + bw + j - i] = v;
                }
            }
        }
        for i in 0..n {
            let start = i.saturating_sub(bw);
            for j in start..=i {
                let jstart = j.saturating_sub(bw).max(start);
                let mut s = data[i * w + bw + j - i];
                for k in jstart..j {
                    s -= data[i * w + bw + k - i] * data[j * w + bw + k - j];
                }
                if j == i {
                    let orig = data[i * w + bw];
                    if !(s > 1e-14 * libm::fabs(orig)) || !s.is_finite() {
                        return Err(Error::Singular { row: i });
                    }
                    data[i * w + bw] = libm::sqrt(s);
                } else {
                    data[i * w + bw + j - i] = s / data[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, data })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.data[i * w + bw + k - i] * y[k];
            }
            y[i] = s / self.data[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + bw + 1).min(n) {
                s -= self.data[k * w + bw + i - k] * y[k];
            }
            y[i] = s / self.data[i * w + bw];
        }
        y
    }
}

/// Direct solve with `refine` rounds of iterative refinement.
pub fn solve_direct(a: &CsrMatrix, b: &[f64], refine: usize) -> Result<Vec<f64>> {
    let chol = BandCholesky::factor(a)?;
    let mut x = chol.solve(b);
    let mut r = vec![0.0; b.len()];
    for _ in 0..refine {
        a.matvec(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let dx = chol.solve(&r);
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
    }
    Ok(x)
}

/// Outcome of [`pcg`].
#[derive(Debug, Clone, PartialEq)]
pub struct PcgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `‖b - Ax‖₂ / ‖b‖₂`.
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<PcgResult> {
    let n = a.n();
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .enumerate()
        .map(|(i, &d)| if d > 0.0 { Ok(1.0 / d) } else { Err(Error::Singular { row: i }) })
        .collect::<Result<_>>()?;
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(PcgResult { x, iterations: 0, residual: 0.0 });
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular { row: 0 });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = norm(&r) / bnorm;
        if res <= tol {
            return Ok(PcgResult { x, iterations: it, residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearNotConverged { iterations: max_iter, residual: norm(&r) / bnorm })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2D five-point Laplacian plus a diagonal shift.
    fn laplacian(nx: usize, ny: usize, shift: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let c = i + nx * j;
                t.push((c, c, 4.0 + shift));
                if i > 0 {
                    t.push((c, c - 1, -1.0));
                }
                if i + 1 < nx {
                    t.push((c, c + 1, -1.0));
                }
                if j > 0 {
                    t.push((c, c - nx, -1.0));
                }
                if j + 1 < ny {
                    t.push((c, c + nx, -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(nx * ny, &t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 1.0), (0, 1, 1.0), (1, 1, 5.0)]);
        assert_eq!(a.diagonal(), vec![3.0, 5.0]);
        assert_eq!(a.bandwidth(), 1);
        let mut y = vec![0.0; 2];
        a.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![4.0, 6.0]);
    }

    #[test]
    fn direct_and_cg_agree_with_manufactured_solution() {
        let a = laplacian(7, 5, 0.1);
        let x_true: Vec<f64> = (0..35).map(|i| libm::sin(i as f64)).collect();
        let mut b = vec![0.0; 35];
        a.matvec(&x_true, &mut b);
        let x = solve_direct(&a, &b, 2).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-13);
        }
        let cg = pcg(&a, &b, 1e-13, 500).unwrap();
        for (u, v) in cg.x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn singular_matrix_detected() {
        // Pure Neumann Laplacian: constant vector in the kernel.
        let mut t = Vec::new();
        for i in 0..4usize {
            let mut d = 0.0;
            for j in [i.wrapping_sub(1), i + 1] {
                if j < 4 {
                    t.push((i, j, -1.0));
                    d += 1.0;
                }
            }
            t.push((i, i, d));
        }
        let a = CsrMatrix::from_triplets(4, &t);
        assert!(matches!(BandCholesky::factor(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn cg_reports_non_convergence() {
        let a = laplacian(10, 10, 0.0);
        let b = vec![1.0; 100];
        assert!(matches!(pcg(&a, &b, 1e-14, 2), Err(Error::LinearNotConverged { .. })));
    }
}
