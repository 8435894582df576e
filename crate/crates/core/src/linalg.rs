//! Dense linear algebra for the small matrices (≤ 32×32) met in Gaussian
//! integrals.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::Complex;

/// Square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMat {
    n: usize,
    data: Vec<Complex>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![Complex::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        CMat::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Sub-matrix picking the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<Complex>> {
        rows.iter().map(|&i| cols.iter().map(|&j| self[(i, j)]).collect()).collect()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with complete pivoting, P·A·Q = L·U.
pub(crate) struct FullPivLu {
    lu: CMat,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    sign: f64,
}

impl FullPivLu {
    pub fn new(a: &CMat) -> Self {
        let n = a.dim();
        let mut lu = a.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, -1.0);
            for i in k..n {
                for j in k..n {
                    let v = lu[(i, j)].norm();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if pi != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pi, j)];
                    lu[(pi, j)] = tmp;
                }
                row_perm.swap(k, pi);
                sign = -sign;
            }
            if pj != k {
                for i in 0..n {
                    let tmp = lu[(i, k)];
                    lu[(i, k)] = lu[(i, pj)];
                    lu[(i, pj)] = tmp;
                }
                col_perm.swap(k, pj);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot.is_zero() {
                continue;
            }
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        FullPivLu { lu, row_perm, col_perm, sign }
    }

    /// Complete pivoting makes the pivots non-increasing, so this is the last one.
    pub fn min_pivot(&self) -> f64 {
        (0..self.lu.dim()).map(|k| self.lu[(k, k)].norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_pivot(&self) -> f64 {
        (0..self.lu.dim()).map(|k| self.lu[(k, k)].norm()).fold(0.0, f64::max)
    }

    pub fn solve(&self, b: &[Complex]) -> Vec<Complex> {
        let n = self.lu.dim();
        let mut y: Vec<Complex> = self.row_perm.iter().map(|&r| b[r]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                y[i] = y[i] - l * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.lu[(i, k)];
                y[i] = y[i] - u * y[k];
            }
            y[i] /= self.lu[(i, i)];
        }
        let mut x = vec![Complex::zero(); n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k];
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        let n = self.lu.dim();
        let mut inv = CMat::zeros(n);
        let mut e = vec![Complex::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex::zero());
            e[j] = Complex::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    #[allow(dead_code)]
    pub fn determinant(&self) -> Complex {
        (0..self.lu.dim()).map(|k| self.lu[(k, k)]).product::<Complex>() * self.sign
    }
}

/// Lower Cholesky factor of a real symmetric matrix, `None` unless it is
/// positive definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

/// Solves L·X = B for lower triangular L, B given column-major as `n` columns.
fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// L⁻¹·S·L⁻ᵀ for symmetric S.
pub(crate) fn congruence_inverse(l: &[f64], s: &[f64], n: usize) -> Vec<f64> {
    // Y = L⁻¹ S, column by column
    let mut y = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = s[i * n + j];
        }
        forward_substitute(l, n, &mut col);
        for i in 0..n {
            y[i * n + j] = col[i];
        }
    }
    // Z = L⁻¹ Yᵀ = L⁻¹ S L⁻ᵀ (S symmetric)
    let mut z = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            col[i] = y[j * n + i];
        }
        forward_substitute(l, n, &mut col);
        for i in 0..n {
            z[i * n + j] = col[i];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (z[i * n + j] + z[j * n + i]);
            z[i * n + j] = avg;
            z[j * n + i] = avg;
        }
    }
    z
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub(crate) fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let scale: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn lu_solve_and_inverse() {
        let a = CMat::from_fn(3, |i, j| match (i, j) {
            (0, 0) => c(2.0, 1.0),
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(1.0, 0.5),
            (1, 1) => c(3.0, 0.0),
            (1, 2) => c(0.2, 0.0),
            (2, 1) => c(-1.0, 2.0),
            (2, 2) => c(1.0, -1.0),
            _ => c(0.0, 0.0),
        });
        let lu = FullPivLu::new(&a);
        let inv = lu.inverse();
        let id = a.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - c(expect, 0.0)).norm() < 1e-14);
            }
        }
        // det by cofactor expansion
        let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
            - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
            + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
        assert!((lu.determinant() - det).norm() < 1e-13);
    }

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        let a = [2.0, 0.5, 0.5, -1.0];
        let mut ev = symmetric_eigenvalues(&a, 2);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mid = 0.5;
        let r = (1.5f64 * 1.5 + 0.25).sqrt();
        assert!((ev[0] - (mid - r)).abs() < 1e-14);
        assert!((ev[1] - (mid + r)).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
        let l = cholesky(&[4.0, 2.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(l[0], 2.0);
        assert!((l[2] - 1.0).abs() < 1e-15 && (l[3] - 2f64.sqrt()).abs() < 1e-15);
    }
}
