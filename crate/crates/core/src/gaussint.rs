//! Closed-form complex Gaussian integrals.
//!
//! A [`GaussianForm`] over n complex variables z is the exponent
//!
//! ```text
//! E(z) = −z̄ᵀA z + zᵀF z + z̄ᵀG z̄ + zᵀb + z̄ᵀc + offset
//! ```
//!
//! stored as −½wᵀMw + hᵀw + offset over w = (z₁…zₙ, z̄₁…z̄ₙ), with z and z̄
//! treated as independent variables. Integrals use the measure
//! ∏ d²zᵢ/π, so ∫ d²z/π e^{−|z|²} = 1.
//!
//! Evaluation goes through the real decomposition z = x + iy, w = T·r, where
//! the exponent matrix becomes R = TᵀMT. The integral converges iff Re R is
//! positive definite, and equals 2ⁿ/√det R · exp(½ hᵀM⁻¹h + offset). The
//! branch of √det R is fixed by writing R = P + iQ, P = LLᵀ and
//! √det R = det L · ∏ₖ √(1 + iσₖ), σₖ the eigenvalues of L⁻¹QL⁻ᵀ; every
//! factor then has positive real part and the principal root is the analytic
//! continuation from Q = 0.
//!
//! Moments of monomials are Wick sums over the formal mean M⁻¹h and
//! covariance M⁻¹.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, congruence_inverse, symmetric_eigenvalues, CMat, FullPivLu};
use crate::Complex;

/// Default cap on the total degree of a [`Monomial`].
pub const DEFAULT_DEGREE_LIMIT: u32 = 8;
/// Largest supported number of complex variables.
pub const MAX_DIM: usize = 16;
const CONDITION_LIMIT: f64 = 1e12;
const DETERMINANT_FLOOR: f64 = 1e-300;

/// One of the 2n independent variables of a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z(usize),
    Zbar(usize),
}

impl Var {
    fn index(self, n: usize) -> usize {
        match self {
            Var::Z(i) => i,
            Var::Zbar(i) => n + i,
        }
    }
}

/// Exponent of a multivariate complex Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianForm {
    dim: usize,
    quad: CMat,
    linear: Vec<Complex>,
    offset: Complex,
}

fn check_square(name: &'static str, m: &[Complex], n: usize) -> Result<()> {
    if m.len() != n * n {
        return Err(Error::Config(format!("{name} must have {n}×{n} entries, got {}", m.len())));
    }
    Ok(())
}

fn check_symmetric(name: &'static str, m: &[Complex], n: usize) -> Result<()> {
    check_square(name, m, n)?;
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (m[i * n + j], m[j * n + i]);
            if (a - b).norm() > 1e-14 * (1.0 + a.norm()) {
                return Err(Error::Config(format!("{name} must be symmetric")));
            }
        }
    }
    Ok(())
}

impl GaussianForm {
    /// The zero exponent over `dim` variables; add terms with the `add_*`
    /// methods.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Config(format!("form dimension {dim} outside 1..={MAX_DIM}")));
        }
        Ok(GaussianForm {
            dim,
            quad: CMat::zeros(2 * dim),
            linear: vec![Complex::zero(); 2 * dim],
            offset: Complex::zero(),
        })
    }

    /// −z̄ᵀAz + zᵀb + z̄ᵀc with A given row major.
    pub fn diagonal(a: &[Complex], b: &[Complex], c: &[Complex]) -> Result<Self> {
        let n = b.len();
        Self::general(a, None, None, b, c).inspect(|f| debug_assert_eq!(f.dim, n))
    }

    /// −z̄ᵀAz + zᵀFz + z̄ᵀGz̄ + zᵀb + z̄ᵀc; F and G must be symmetric.
    pub fn general(
        a: &[Complex],
        f: Option<&[Complex]>,
        g: Option<&[Complex]>,
        b: &[Complex],
        c: &[Complex],
    ) -> Result<Self> {
        let n = b.len();
        if c.len() != n {
            return Err(Error::Config(format!("b has {n} entries but c has {}", c.len())));
        }
        check_square("A", a, n)?;
        let mut form = GaussianForm::zero(n)?;
        for i in 0..n {
            for j in 0..n {
                form.add_term(Var::Zbar(i), Var::Z(j), -a[i * n + j]);
            }
            form.add_linear(Var::Z(i), b[i]);
            form.add_linear(Var::Zbar(i), c[i]);
        }
        if let Some(f) = f {
            check_symmetric("F", f, n)?;
            for i in 0..n {
                for j in 0..n {
                    form.add_term(Var::Z(i), Var::Z(j), f[i * n + j]);
                }
            }
        }
        if let Some(g) = g {
            check_symmetric("G", g, n)?;
            for i in 0..n {
                for j in 0..n {
                    form.add_term(Var::Zbar(i), Var::Zbar(j), g[i * n + j]);
                }
            }
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `coeff·u·v` to the exponent.
    pub fn add_term(&mut self, u: Var, v: Var, coeff: Complex) {
        let (a, b) = (u.index(self.dim), v.index(self.dim));
        self.quad[(a, b)] -= coeff;
        self.quad[(b, a)] -= coeff;
    }

    /// Adds `coeff·u` to the exponent.
    pub fn add_linear(&mut self, u: Var, coeff: Complex) {
        self.linear[u.index(self.dim)] += coeff;
    }

    pub fn add_offset(&mut self, offset: Complex) {
        self.offset += offset;
    }

    pub fn with_offset(mut self, offset: Complex) -> Self {
        self.offset += offset;
        self
    }

    /// Coefficient of the monomial u·v in the exponent.
    pub fn coefficient(&self, u: Var, v: Var) -> Complex {
        let (a, b) = (u.index(self.dim), v.index(self.dim));
        if a == b {
            -self.quad[(a, a)] * 0.5
        } else {
            -self.quad[(a, b)]
        }
    }

    pub fn linear(&self, u: Var) -> Complex {
        self.linear[u.index(self.dim)]
    }

    pub fn offset(&self) -> Complex {
        self.offset
    }

    /// Exponent value at z (with z̄ the true conjugate).
    pub fn exponent_at(&self, z: &[Complex]) -> Complex {
        let n = self.dim;
        let w: Vec<Complex> = z.iter().copied().chain(z.iter().map(|v| v.conj())).collect();
        let mw = self.quad.mul_vec(&w);
        let quad: Complex = w.iter().zip(&mw).map(|(a, b)| a * b).sum();
        let lin: Complex = self.linear.iter().zip(&w).map(|(a, b)| a * b).sum();
        debug_assert_eq!(w.len(), 2 * n);
        -quad * 0.5 + lin + self.offset
    }

    /// Block-diagonal sum: variables of `other` are appended after ours.
    pub fn direct_sum(&self, other: &GaussianForm) -> Result<GaussianForm> {
        let (n1, n2) = (self.dim, other.dim);
        let n = n1 + n2;
        let mut out = GaussianForm::zero(n)?;
        let remap = |k: usize, base: usize, nk: usize| if k < nk { base + k } else { n + base + (k - nk) };
        for (form, base) in [(self, 0usize), (other, n1)] {
            let nk = form.dim;
            for a in 0..2 * nk {
                for b in 0..2 * nk {
                    out.quad[(remap(a, base, nk), remap(b, base, nk))] = form.quad[(a, b)];
                }
                out.linear[remap(a, base, nk)] = form.linear[a];
            }
        }
        out.offset = self.offset + other.offset;
        Ok(out)
    }

    /// Factorizes the form and returns its integral, mean and covariance.
    pub fn solve(&self) -> Result<SolvedGaussian> {
        let n = self.dim;
        let two_n = 2 * n;
        let i_unit = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let t = CMat::from_fn(two_n, |a, b| match (a < n, b < n) {
            (true, true) if a == b => one,
            (true, false) if b - n == a => i_unit,
            (false, true) if a - n == b => one,
            (false, false) if a == b => -i_unit,
            _ => Complex::zero(),
        });
        let r = t.transpose().mul(&self.quad).mul(&t);

        let re: Vec<f64> = (0..two_n * two_n).map(|k| r[(k / two_n, k % two_n)].re).collect();
        let im: Vec<f64> = (0..two_n * two_n).map(|k| r[(k / two_n, k % two_n)].im).collect();
        let sym_re: Vec<f64> =
            (0..two_n * two_n).map(|k| 0.5 * (re[k] + re[(k % two_n) * two_n + k / two_n])).collect();
        let sym_im: Vec<f64> =
            (0..two_n * two_n).map(|k| 0.5 * (im[k] + im[(k % two_n) * two_n + k / two_n])).collect();
        let l = cholesky(&sym_re, two_n)
            .ok_or(Error::Convergence("real part of the exponent matrix is not positive definite"))?;
        let sigma = symmetric_eigenvalues(&congruence_inverse(&l, &sym_im, two_n), two_n);
        // log √det R relative to the 2ⁿ of the unit form, i.e. log det A for
        // forms without F, G blocks
        let mut log_sqrt_det: Complex = (0..two_n).map(|k| Complex::new(l[k * two_n + k].ln(), 0.0)).sum();
        for s in sigma {
            log_sqrt_det += Complex::new(1.0, s).ln() * 0.5;
        }
        log_sqrt_det -= Complex::new(n as f64 * 2f64.ln(), 0.0);
        if log_sqrt_det.re < DETERMINANT_FLOOR.ln() {
            return Err(Error::Singular(format!("determinant e^{:.3e} below 1e-300", log_sqrt_det.re)));
        }

        let lu = FullPivLu::new(&r);
        if lu.min_pivot() == 0.0 || lu.max_pivot() / lu.min_pivot() > CONDITION_LIMIT {
            return Err(Error::Singular(format!("pivot ratio above {CONDITION_LIMIT:e}")));
        }
        let r_inv = lu.inverse();
        let cond = r.norm1() * r_inv.norm1();
        if !(cond <= CONDITION_LIMIT) {
            return Err(Error::Singular(format!("condition number {cond:.3e} above {CONDITION_LIMIT:e}")));
        }
        let j = t.transpose().mul_vec(&self.linear);
        let mean_r = r_inv.mul_vec(&j);
        let quad_term: Complex = j.iter().zip(&mean_r).map(|(a, b)| a * b).sum::<Complex>() * 0.5;
        let mean = t.mul_vec(&mean_r);
        let cov = t.mul(&r_inv).mul(&t.transpose());

        Ok(SolvedGaussian { dim: n, log_integral: quad_term + self.offset - log_sqrt_det, mean, cov })
    }

    /// ∫ ∏ d²zᵢ/π exp(E(z)).
    pub fn integrate(&self) -> Result<Complex> {
        Ok(self.solve()?.integral())
    }

    /// ∫ ∏ d²zᵢ/π m(z, z̄)·exp(E(z)).
    pub fn moment(&self, m: &Monomial) -> Result<Complex> {
        self.moment_with_limit(m, DEFAULT_DEGREE_LIMIT)
    }

    pub fn moment_with_limit(&self, m: &Monomial, limit: u32) -> Result<Complex> {
        let degree = m.degree();
        if degree > limit {
            return Err(Error::Degree { degree, limit });
        }
        let solved = self.solve()?;
        Ok(solved.integral() * solved.expectation(m)?)
    }

    /// Integrates out the first `k` variables; the result is a form over the
    /// remaining `dim − k`, in their original order.
    pub fn integrate_out(&self, k: usize) -> Result<GaussianForm> {
        let n = self.dim;
        if k == 0 || k >= n {
            return Err(Error::Config(format!("can integrate out 1..{n} variables, not {k}")));
        }
        let inner_idx: Vec<usize> = (0..k).chain(n..n + k).collect();
        let outer_idx: Vec<usize> = (k..n).chain(n + k..2 * n).collect();

        let mut inner = GaussianForm::zero(k)?;
        for (a, &ia) in inner_idx.iter().enumerate() {
            for (b, &ib) in inner_idx.iter().enumerate() {
                inner.quad[(a, b)] = self.quad[(ia, ib)];
            }
            inner.linear[a] = self.linear[ia];
        }
        let solved = inner.solve()?;

        let m_oi = self.quad.select(&outer_idx, &inner_idx);
        let m_io = self.quad.select(&inner_idx, &outer_idx);
        let mut out = GaussianForm::zero(n - k)?;
        // −½wᵀMw + hᵀw over w = (w_i, w_o); integrating w_i at fixed w_o
        // shifts h_i by −M_io w_o.
        let inv_m_io: Vec<Vec<Complex>> = (0..inner_idx.len())
            .map(|a| {
                (0..outer_idx.len())
                    .map(|b| (0..inner_idx.len()).map(|c| solved.cov[(a, c)] * m_io[c][b]).sum())
                    .collect()
            })
            .collect();
        for a in 0..outer_idx.len() {
            for b in 0..outer_idx.len() {
                let schur: Complex = (0..inner_idx.len()).map(|c| m_oi[a][c] * inv_m_io[c][b]).sum();
                out.quad[(a, b)] = self.quad[(outer_idx[a], outer_idx[b])] - schur;
            }
            let shift: Complex = (0..inner_idx.len()).map(|c| m_oi[a][c] * solved.mean[c]).sum();
            out.linear[a] = self.linear[outer_idx[a]] - shift;
        }
        out.offset = self.offset + solved.log_integral;
        Ok(out)
    }
}

/// A factorized form: log of its integral plus the formal mean M⁻¹h and
/// covariance M⁻¹ over w = (z, z̄).
#[derive(Debug, Clone)]
pub struct SolvedGaussian {
    dim: usize,
    log_integral: Complex,
    mean: Vec<Complex>,
    cov: CMat,
}

impl SolvedGaussian {
    pub fn integral(&self) -> Complex {
        self.log_integral.exp()
    }

    pub fn log_integral(&self) -> Complex {
        self.log_integral
    }

    pub fn mean(&self, u: Var) -> Complex {
        self.mean[u.index(self.dim)]
    }

    /// ⟨u v⟩ − ⟨u⟩⟨v⟩ under the normalized Gaussian.
    pub fn covariance(&self, u: Var, v: Var) -> Complex {
        self.cov[(u.index(self.dim), v.index(self.dim))]
    }

    /// Normalized expectation of a monomial.
    pub fn expectation(&self, m: &Monomial) -> Result<Complex> {
        let idx = m.indices(self.dim)?;
        Ok(wick_expectation(&idx, |i| self.mean[i], |i, j| self.cov[(i, j)]))
    }
}

/// Product of powers of zᵢ and z̄ᵢ.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Monomial {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Monomial {
    pub fn new(z: Vec<u32>, zbar: Vec<u32>) -> Self {
        Monomial { z, zbar }
    }

    pub fn one() -> Self {
        Monomial::default()
    }

    /// Monomial z_i^p over a form of dimension `dim`.
    pub fn var(dim: usize, v: Var, power: u32) -> Self {
        let mut m = Monomial { z: vec![0; dim], zbar: vec![0; dim] };
        m.mul_var(v, power);
        m
    }

    pub fn times(mut self, v: Var, power: u32) -> Self {
        self.mul_var(v, power);
        self
    }

    fn mul_var(&mut self, v: Var, power: u32) {
        let (slot, i) = match v {
            Var::Z(i) => (&mut self.z, i),
            Var::Zbar(i) => (&mut self.zbar, i),
        };
        if slot.len() <= i {
            slot.resize(i + 1, 0);
        }
        slot[i] += power;
    }

    pub fn degree(&self) -> u32 {
        self.z.iter().chain(&self.zbar).sum()
    }

    fn indices(&self, n: usize) -> Result<Vec<usize>> {
        if self.z.len() > n && self.z[n..].iter().any(|&p| p > 0)
            || self.zbar.len() > n && self.zbar[n..].iter().any(|&p| p > 0)
        {
            return Err(Error::Config(format!("monomial refers to variables beyond dimension {n}")));
        }
        let mut idx = Vec::with_capacity(self.degree() as usize);
        for (i, &p) in self.z.iter().enumerate() {
            idx.extend(core::iter::repeat_n(i, p as usize));
        }
        for (i, &p) in self.zbar.iter().enumerate() {
            idx.extend(core::iter::repeat_n(n + i, p as usize));
        }
        Ok(idx)
    }
}

/// Isserlis/Wick expectation E[∏ w_k] of jointly Gaussian variables with
/// means `mean(k)` and covariances `cov(k, l)`: the sum over all ways of
/// pairing some factors and replacing the rest by their means.
pub fn wick_expectation(
    indices: &[usize],
    mean: impl Fn(usize) -> Complex + Copy,
    cov: impl Fn(usize, usize) -> Complex + Copy,
) -> Complex {
    fn rec(
        idx: &[usize],
        used: &mut [bool],
        mean: impl Fn(usize) -> Complex + Copy,
        cov: impl Fn(usize, usize) -> Complex + Copy,
    ) -> Complex {
        let Some(first) = used.iter().position(|u| !u) else {
            return Complex::new(1.0, 0.0);
        };
        used[first] = true;
        let mut total = Complex::zero();
        let m = mean(idx[first]);
        if !m.is_zero() {
            total += m * rec(idx, used, mean, cov);
        }
        for j in (first + 1)..idx.len() {
            if used[j] {
                continue;
            }
            let c = cov(idx[first], idx[j]);
            if c.is_zero() {
                continue;
            }
            used[j] = true;
            total += c * rec(idx, used, mean, cov);
            used[j] = false;
        }
        used[first] = false;
        total
    }
    let mut used = vec![false; indices.len()];
    rec(indices, &mut used, mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn unit_normalization() {
        let f = GaussianForm::diagonal(&[c(1.0, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((f.integrate().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_examples() {
        let f = GaussianForm::diagonal(&[c(2.0, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!((f.integrate().unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let f = GaussianForm::diagonal(&[c(1.0, 0.0)], &[c(0.5, 0.0)], &[c(0.5, 0.0)]).unwrap();
        assert!((f.integrate().unwrap() - c(0.25f64.exp(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_width_uses_principal_branch() {
        // ∫ d²z/π e^{−a|z|²} = 1/a for Re a > 0
        for a in [c(1.0, 3.0), c(0.2, -5.0), c(2.0, 0.0)] {
            let f = GaussianForm::diagonal(&[a], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
            assert!((f.integrate().unwrap() - a.inv()).norm() < 1e-13, "a = {a}");
        }
    }

    #[test]
    fn pairing_counts() {
        // ⟨z^k z̄^k⟩ = k!·a^{−k} for e^{−a|z|²}, normalized
        let a = 1.7;
        let f = GaussianForm::diagonal(&[c(a, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        let norm = f.integrate().unwrap();
        let mut fact = 1.0;
        for k in 0..=4u32 {
            if k > 0 {
                fact *= k as f64;
            }
            let m = Monomial::new(vec![k], vec![k]);
            let got = f.moment(&m).unwrap() / norm;
            let expect = fact / a.powi(k as i32);
            assert!((got - c(expect, 0.0)).norm() < 1e-12 * expect, "k = {k}");
        }
        assert!((f.moment(&Monomial::new(vec![2], vec![2])).unwrap() * a * a * a - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_moments_vanish() {
        let f = GaussianForm::general(
            &[c(1.0, 0.2), c(0.1, 0.0), c(0.0, 0.3), c(2.0, 0.0)],
            Some(&[c(0.1, 0.0), c(0.05, 0.0), c(0.05, 0.0), c(0.0, 0.1)]),
            Some(&[c(0.0, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(0.2, 0.0)]),
            &[c(0.0, 0.0); 2],
            &[c(0.0, 0.0); 2],
        )
        .unwrap();
        for m in [
            Monomial::new(vec![1, 0], vec![0, 0]),
            Monomial::new(vec![1, 1], vec![1, 0]),
            Monomial::new(vec![0, 2], vec![1, 2]),
        ] {
            assert!(f.moment(&m).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn degree_limit() {
        let f = GaussianForm::diagonal(&[c(1.0, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!(matches!(f.moment(&Monomial::new(vec![5], vec![4])), Err(Error::Degree { degree: 9, limit: 8 })));
        assert!(f.moment_with_limit(&Monomial::new(vec![5], vec![5]), 10).is_ok());
    }

    #[test]
    fn divergent_and_singular_forms() {
        let f = GaussianForm::diagonal(&[c(-1.0, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!(matches!(f.integrate(), Err(Error::Convergence(_))));
        let f = GaussianForm::diagonal(&[c(0.0, 1.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!(matches!(f.integrate(), Err(Error::Convergence(_))));
        let f = GaussianForm::diagonal(&[c(1e-13, 0.0)], &[c(0.0, 0.0)], &[c(0.0, 0.0)]).unwrap();
        assert!(f.integrate().is_ok());
        let f = GaussianForm::diagonal(
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-14, 0.0)],
            &[c(0.0, 0.0); 2],
            &[c(0.0, 0.0); 2],
        )
        .unwrap();
        assert!(matches!(f.integrate(), Err(Error::Singular(_))));
        assert!(GaussianForm::general(
            &[c(1.0, 0.0)],
            Some(&[c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0), c(0.1, 0.0)]),
            None,
            &[c(0.0, 0.0)],
            &[c(0.0, 0.0)]
        )
        .is_err());
    }

    #[test]
    fn linear_term_is_b_transpose_ainv_c() {
        // non-symmetric A distinguishes bᵀA⁻¹c from cᵀA⁻¹b
        let a = [c(2.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(1.0, 0.0), c(0.0, 0.0)];
        let cc = [c(0.0, 0.0), c(1.0, 0.0)];
        let f = GaussianForm::diagonal(&a, &b, &cc).unwrap();
        // A⁻¹ = [[0.5, −0.25], [0, 1]], det A = 2, bᵀA⁻¹c = −0.25
        let expect = c((-0.25f64).exp() / 2.0, 0.0);
        assert!((f.integrate().unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn block_diagonal_factorizes() {
        let f1 = GaussianForm::general(
            &[c(1.5, 0.3)],
            Some(&[c(0.2, 0.1)]),
            Some(&[c(0.0, -0.1)]),
            &[c(0.3, 0.0)],
            &[c(0.0, 0.4)],
        )
        .unwrap();
        let f2 = GaussianForm::diagonal(&[c(0.8, -0.2)], &[c(0.1, 0.1)], &[c(-0.2, 0.0)]).unwrap();
        let sum = f1.direct_sum(&f2).unwrap();
        let lhs = sum.integrate().unwrap();
        let rhs = f1.integrate().unwrap() * f2.integrate().unwrap();
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn integrate_out_matches_full_integral() {
        let a = [
            c(1.2, 0.1),
            c(-0.3, 0.2),
            c(0.1, 0.0),
            c(0.2, 0.0),
            c(1.5, -0.2),
            c(0.0, 0.3),
            c(0.0, -0.1),
            c(0.25, 0.0),
            c(1.1, 0.0),
        ];
        let f = [
            c(0.1, 0.0),
            c(0.05, 0.02),
            c(0.0, 0.0),
            c(0.05, 0.02),
            c(0.0, 0.1),
            c(0.03, 0.0),
            c(0.0, 0.0),
            c(0.03, 0.0),
            c(-0.1, 0.0),
        ];
        let form = GaussianForm::general(
            &a,
            Some(&f),
            None,
            &[c(0.2, 0.1), c(-0.3, 0.0), c(0.0, 0.5)],
            &[c(0.1, 0.0), c(0.0, -0.2), c(0.4, 0.1)],
        )
        .unwrap();
        let full = form.integrate().unwrap();
        let partial = form.integrate_out(1).unwrap();
        assert_eq!(partial.dim(), 2);
        assert!((partial.integrate().unwrap() - full).norm() < 1e-13 * full.norm());
        let twice = partial.integrate_out(1).unwrap();
        assert!((twice.integrate().unwrap() - full).norm() < 1e-13 * full.norm());
        // moments of remaining variables agree too
        let m_full = form.moment(&Monomial::new(vec![0, 1, 0], vec![0, 0, 1])).unwrap();
        let m_part = partial.moment(&Monomial::new(vec![1, 0], vec![0, 1])).unwrap();
        assert!((m_full - m_part).norm() < 1e-13 * m_full.norm());
    }

    #[test]
    fn wick_four_point() {
        // zero-mean: ⟨x1x2x3x4⟩ = c12c34 + c13c24 + c14c23
        let cov = |i: usize, j: usize| c((1 + i + j) as f64, (i * j) as f64 * 0.1);
        let got = wick_expectation(&[0, 1, 2, 3], |_| c(0.0, 0.0), cov);
        let expect = cov(0, 1) * cov(2, 3) + cov(0, 2) * cov(1, 3) + cov(0, 3) * cov(1, 2);
        assert!((got - expect).norm() < 1e-13);
        // with means, two variables: ⟨x y⟩ = m_x m_y + c_xy
        let got = wick_expectation(&[0, 1], |i| c(i as f64 + 1.0, 0.5), cov);
        let expect = c(1.0, 0.5) * c(2.0, 0.5) + cov(0, 1);
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn coefficient_readback() {
        let mut f = GaussianForm::zero(2).unwrap();
        f.add_term(Var::Zbar(0), Var::Z(1), c(0.3, 0.1));
        f.add_term(Var::Z(1), Var::Z(1), c(0.2, 0.0));
        f.add_linear(Var::Zbar(1), c(1.0, -1.0));
        assert_eq!(f.coefficient(Var::Zbar(0), Var::Z(1)), c(0.3, 0.1));
        assert_eq!(f.coefficient(Var::Z(1), Var::Zbar(0)), c(0.3, 0.1));
        assert_eq!(f.coefficient(Var::Z(1), Var::Z(1)), c(0.2, 0.0));
        assert_eq!(f.linear(Var::Zbar(1)), c(1.0, -1.0));
        let z = [c(0.5, 0.2), c(-0.1, 0.7)];
        let direct = c(0.3, 0.1) * z[0].conj() * z[1] + c(0.2, 0.0) * z[1] * z[1] + c(1.0, -1.0) * z[1].conj();
        assert!((f.exponent_at(&z) - direct).norm() < 1e-15);
    }
}
