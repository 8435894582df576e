//! Husimi Q-function route.
//!
//! A Gaussian state has a Gaussian Q-function whose moments are the
//! anti-normally ordered operator moments ⟨a^m a†^l⟩ = ∫ α^m ᾱ^l Q(α) d²α.
//! Normal-ordered quantities follow by commuting the operators back,
//!
//! ```text
//! a†^l a^m = Σ_k (−1)^k k! C(m,k) C(l,k) a^{m−k} a†^{l−k}
//! ```
//!
//! Two-time correlations use a joint Gaussian Q over (α(t), α(t+τ)) whose
//! cross covariances are the regression pair, with the reordering applied to
//! each time separately.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::curve::{CorrelationCurve, TauGrid};
use crate::error::{DomainError, Error, Result};
use crate::gaussint::{GaussianForm, Monomial, Var};
use crate::linalg::{cholesky, CMat, FullPivLu};
use crate::model::{validate_params, MomentState, SystemParams};
use crate::regression::{steady_state, two_time_gaussian, two_time_pair_from};
use crate::Complex;

/// Largest total degree l + m handled by [`to_normal_order`].
pub const ORDERING_DEGREE_LIMIT: u32 = 4;
const PI: f64 = core::f64::consts::PI;
const SLACK: f64 = 1e-12;

/// Q(α) = exp(−½δwᵀC⁻¹δw) / (π√(σₙ² − |σₘ|²)) with δw = (α − mean, ᾱ − mean̄)
/// and C = [[σₘ, σₙ], [σₙ, σ̄ₘ]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianQ {
    pub mean: Complex,
    /// ⟨|δα|²⟩ under Q.
    pub sigma_n: f64,
    /// ⟨δα²⟩ under Q.
    pub sigma_m: Complex,
}

impl GaussianQ {
    pub const VACUUM: GaussianQ =
        GaussianQ { mean: Complex::new(0.0, 0.0), sigma_n: 1.0, sigma_m: Complex::new(0.0, 0.0) };

    /// Checks the vacuum floor σₙ ≥ 1 and the uncertainty bound
    /// |σₘ|² ≤ σₙ(σₙ − 1), which together make Q the Husimi function of a
    /// physical Gaussian state.
    pub fn validate(self) -> Result<Self> {
        if !(self.mean.is_finite() && self.sigma_n.is_finite() && self.sigma_m.is_finite()) {
            return Err(DomainError::QFunction("non-finite parameter").into());
        }
        let slack = SLACK * self.sigma_n.abs().max(1.0);
        if self.sigma_n < 1.0 - slack {
            return Err(DomainError::QFunction("sigma_n below the vacuum floor 1").into());
        }
        if self.sigma_m.norm_sqr() > self.sigma_n * (self.sigma_n - 1.0) + slack * self.sigma_n {
            return Err(DomainError::QFunction("|sigma_m|² exceeds sigma_n(sigma_n − 1)").into());
        }
        Ok(self)
    }

    fn det(&self) -> f64 {
        self.sigma_n * self.sigma_n - self.sigma_m.norm_sqr()
    }

    /// Normalized Gaussian form for Q·π over the measure d²α/π.
    pub fn form(&self) -> Result<GaussianForm> {
        let d = self.det();
        let (sn, sm, mu) = (self.sigma_n, self.sigma_m, self.mean);
        let mut form = GaussianForm::zero(1)?;
        form.add_term(Var::Zbar(0), Var::Z(0), Complex::new(-sn / d, 0.0));
        form.add_term(Var::Z(0), Var::Z(0), sm.conj() / (2.0 * d));
        form.add_term(Var::Zbar(0), Var::Zbar(0), sm / (2.0 * d));
        form.add_linear(Var::Z(0), (mu.conj() * sn - mu * sm.conj()) / d);
        form.add_linear(Var::Zbar(0), (mu * sn - mu.conj() * sm) / d);
        let at_mean = form.exponent_at(&[mu]);
        form.add_offset(-at_mean - 0.5 * d.ln());
        Ok(form)
    }
}

/// Q-function of a Gaussian state with the given normal-ordered moments:
/// σₙ = ⟨δα*δα⟩ + 1 and σₘ = ⟨δα²⟩.
pub fn q_from_moments(s: &MomentState) -> Result<GaussianQ> {
    let s = s.validate()?;
    GaussianQ { mean: s.mean, sigma_n: s.centered_n() + 1.0, sigma_m: s.centered_m2() }.validate()
}

/// Pointwise density Q(α) with respect to d²α.
pub fn q_evaluate(q: &GaussianQ, alpha: Complex) -> f64 {
    let d = q.det();
    let delta = alpha - q.mean;
    let exponent = (-q.sigma_n * delta.norm_sqr() + (q.sigma_m.conj() * delta * delta).re) / d;
    exponent.exp() / (PI * d.sqrt())
}

/// ⟨a^m a†^l⟩ = ∫ α^m ᾱ^l Q(α) d²α.
pub fn antinormal_moment(q: &GaussianQ, l: u32, m: u32) -> Result<Complex> {
    q.form()?.moment(&Monomial::new(vec![m], vec![l]))
}

/// Anti-normal moments ⟨a^m a†^l⟩ for l + m up to a maximum degree.
#[derive(Debug, Clone, PartialEq)]
pub struct AntinormalMoments {
    max_degree: u32,
    values: Vec<Complex>,
}

impl AntinormalMoments {
    pub fn from_q(q: &GaussianQ, max_degree: u32) -> Result<Self> {
        let solved = q.form()?.solve()?;
        let side = max_degree as usize + 1;
        let mut values = vec![Complex::zero(); side * side];
        for l in 0..=max_degree {
            for m in 0..=(max_degree - l) {
                let e = solved.expectation(&Monomial::new(vec![m], vec![l]))?;
                values[l as usize * side + m as usize] = e * solved.integral();
            }
        }
        Ok(AntinormalMoments { max_degree, values })
    }

    /// ⟨a^m a†^l⟩ when l + m is within range.
    pub fn get(&self, l: u32, m: u32) -> Option<Complex> {
        (l + m <= self.max_degree).then(|| self.values[l as usize * (self.max_degree as usize + 1) + m as usize])
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Coefficients (−1)^k k! C(m,k) C(l,k) for k = 0..=min(l, m).
fn reorder_coefficients(l: u32, m: u32) -> impl Iterator<Item = (u32, f64)> {
    (0..=l.min(m)).map(move |k| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        (k, sign * factorial(k) * binomial(m, k) * binomial(l, k))
    })
}

fn check_ordering_degree(l: u32, m: u32) -> Result<()> {
    if l + m > ORDERING_DEGREE_LIMIT {
        return Err(Error::Degree { degree: l + m, limit: ORDERING_DEGREE_LIMIT });
    }
    Ok(())
}

/// ⟨a†^l a^m⟩ from anti-normal moments `antinormal(l', m') = ⟨a^{m'} a†^{l'}⟩`.
pub fn to_normal_order(l: u32, m: u32, antinormal: impl Fn(u32, u32) -> Option<Complex>) -> Result<Complex> {
    check_ordering_degree(l, m)?;
    let mut total = Complex::zero();
    for (k, coeff) in reorder_coefficients(l, m) {
        let value = antinormal(l - k, m - k).ok_or(DomainError::MissingMoment { l: l - k, m: m - k })?;
        total += value * coeff;
    }
    Ok(total)
}

/// Joint Gaussian Q over (α₁, α₂) = (α(t), α(t+τ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointGaussianQ {
    pub mean: [Complex; 2],
    pub sigma_n: [f64; 2],
    pub sigma_m: [Complex; 2],
    /// ⟨δᾱ₁δα₂⟩
    pub cross_normal: Complex,
    /// ⟨δα₁δα₂⟩
    pub cross_anom: Complex,
}

impl JointGaussianQ {
    /// Product of two coherent-state Q-functions.
    pub fn coherent(alpha1: Complex, alpha2: Complex) -> Self {
        JointGaussianQ {
            mean: [alpha1, alpha2],
            sigma_n: [1.0; 2],
            sigma_m: [Complex::zero(); 2],
            cross_normal: Complex::zero(),
            cross_anom: Complex::zero(),
        }
    }

    pub fn marginal(&self, k: usize) -> GaussianQ {
        GaussianQ { mean: self.mean[k], sigma_n: self.sigma_n[k], sigma_m: self.sigma_m[k] }
    }

    /// E[w_a w_b] − E[w_a]E[w_b] over w = (α₁, α₂, ᾱ₁, ᾱ₂).
    pub fn covariance(&self) -> [[Complex; 4]; 4] {
        let c = self.cov_mat();
        core::array::from_fn(|a| core::array::from_fn(|b| c[(a, b)]))
    }

    fn cov_mat(&self) -> CMat {
        let zz = [[self.sigma_m[0], self.cross_anom], [self.cross_anom, self.sigma_m[1]]];
        let zzbar = [
            [Complex::new(self.sigma_n[0], 0.0), self.cross_normal.conj()],
            [self.cross_normal, Complex::new(self.sigma_n[1], 0.0)],
        ];
        CMat::from_fn(4, |a, b| match (a < 2, b < 2) {
            (true, true) => zz[a][b],
            (true, false) => zzbar[a][b - 2],
            (false, true) => zzbar[b][a - 2],
            (false, false) => zz[a - 2][b - 2].conj(),
        })
    }

    /// Marginals must be valid Q-functions and the real 4×4 covariance of
    /// (x₁, x₂, y₁, y₂) positive definite.
    pub fn validate(self) -> Result<Self> {
        self.marginal(0).validate()?;
        self.marginal(1).validate()?;
        let c = self.cov_mat();
        let real: Vec<f64> = (0..16)
            .map(|k| {
                let (a, b) = (k / 4, k % 4);
                let (i, j) = (a % 2, b % 2);
                let zz = c[(i, j)];
                let zzbar = c[(i, j + 2)];
                match (a < 2, b < 2) {
                    (true, true) => 0.5 * (zz + zzbar).re,
                    (false, false) => 0.5 * (zzbar - zz).re,
                    (true, false) => 0.5 * (zz - zzbar).im,
                    (false, true) => 0.5 * (c[(j, i)] - c[(j, i + 2)]).im,
                }
            })
            .collect();
        if cholesky(&real, 4).is_none() {
            return Err(DomainError::QFunction("joint covariance is not positive definite").into());
        }
        Ok(self)
    }

    /// Normalized Gaussian form over the two variables.
    pub fn form(&self) -> Result<GaussianForm> {
        let c = self.cov_mat();
        let lu = FullPivLu::new(&c);
        if !(lu.min_pivot() > 1e-12 * lu.max_pivot()) {
            return Err(Error::Singular("joint Q covariance".into()));
        }
        let m = lu.inverse();
        let vars = [Var::Z(0), Var::Z(1), Var::Zbar(0), Var::Zbar(1)];
        let w0 = [self.mean[0], self.mean[1], self.mean[0].conj(), self.mean[1].conj()];
        let mut form = GaussianForm::zero(2)?;
        for a in 0..4 {
            for b in a..4 {
                let coeff = if a == b { -m[(a, a)] * 0.5 } else { -m[(a, b)] };
                form.add_term(vars[a], vars[b], coeff);
            }
            let h: Complex = (0..4).map(|b| m[(a, b)] * w0[b]).sum();
            form.add_linear(vars[a], h);
        }
        let log_norm = form.solve()?.log_integral();
        form.add_offset(-log_norm);
        Ok(form)
    }

    /// Normal-ordered ⟨a₁†^l₁ a₁^m₁ a₂†^l₂ a₂^m₂⟩, reordering each time
    /// separately.
    pub fn normal_moment(&self, l1: u32, m1: u32, l2: u32, m2: u32) -> Result<Complex> {
        check_ordering_degree(l1, m1)?;
        check_ordering_degree(l2, m2)?;
        let solved = self.form()?.solve()?;
        let norm = solved.integral();
        let mut total = Complex::zero();
        for (k1, c1) in reorder_coefficients(l1, m1) {
            for (k2, c2) in reorder_coefficients(l2, m2) {
                let mono = Monomial::new(vec![m1 - k1, m2 - k2], vec![l1 - k1, l2 - k2]);
                total += solved.expectation(&mono)? * norm * (c1 * c2);
            }
        }
        Ok(total)
    }
}

/// Stationary joint Q: σₙ = n + 1 and σₘ = ⟨α²⟩ at both times, cross
/// covariances (⟨α*(t)α(t+τ)⟩, ⟨α(t)α(t+τ)⟩) from the regression pair.
pub fn joint_q(p: &SystemParams, tau: f64) -> Result<JointGaussianQ> {
    validate_params(*p)?;
    let ss = steady_state(p)?;
    let (c_normal, c_anom) = two_time_pair_from(p, &ss, tau)?;
    let marginal = q_from_moments(&ss)?;
    JointGaussianQ {
        mean: [marginal.mean; 2],
        sigma_n: [marginal.sigma_n; 2],
        sigma_m: [marginal.sigma_m; 2],
        cross_normal: c_normal,
        cross_anom: c_anom,
    }
    .validate()
}

/// Joint Q of (α(t), α(t+τ)) for a run starting from `s0`.
pub fn joint_q_transient(p: &SystemParams, s0: &MomentState, t: f64, tau: f64) -> Result<JointGaussianQ> {
    let g = two_time_gaussian(p, s0, t, tau)?;
    let (q1, q2) = (q_from_moments(&g.at_t)?, q_from_moments(&g.at_t_tau)?);
    let (m1, m2) = (g.at_t.mean, g.at_t_tau.mean);
    JointGaussianQ {
        mean: [m1, m2],
        sigma_n: [q1.sigma_n, q2.sigma_n],
        sigma_m: [q1.sigma_m, q2.sigma_m],
        cross_normal: g.c_normal - m1.conj() * m2,
        cross_anom: g.c_anom - m1 * m2,
    }
    .validate()
}

struct TwoTimeNormal {
    n1: f64,
    n2: f64,
    c_normal: Complex,
    fourth: f64,
}

fn two_time_normal(j: &JointGaussianQ) -> Result<TwoTimeNormal> {
    let n = |k: usize| -> Result<f64> {
        let anti = AntinormalMoments::from_q(&j.marginal(k), 2)?;
        Ok(to_normal_order(1, 1, |l, m| anti.get(l, m))?.re)
    };
    Ok(TwoTimeNormal {
        n1: n(0)?,
        n2: n(1)?,
        c_normal: j.normal_moment(1, 0, 0, 1)?,
        fourth: j.normal_moment(1, 1, 1, 1)?.re,
    })
}

/// Stationary g¹ and g² from normal-ordered moments of the joint Q.
pub fn g2_via_q(p: &SystemParams, grid: &TauGrid) -> Result<CorrelationCurve> {
    let mut g1 = Vec::with_capacity(grid.len());
    let mut g2 = Vec::with_capacity(grid.len());
    let mut n_ss = 0.0;
    for &tau in grid.points() {
        let m = two_time_normal(&joint_q(p, tau)?)?;
        if !(m.n1 > 0.0) {
            return Err(DomainError::ZeroDenominator.into());
        }
        n_ss = m.n1;
        g1.push(m.c_normal / m.n1);
        g2.push(m.fourth / (m.n1 * m.n1));
    }
    CorrelationCurve::new(grid.points().to_vec(), g1, Some(g2), None, n_ss)
}

/// Transient counterpart of [`g2_via_q`], normalized by n(t)·n(t+τ).
pub fn g2_via_q_transient(p: &SystemParams, s0: &MomentState, t: f64, grid: &TauGrid) -> Result<CorrelationCurve> {
    let mut g1 = Vec::with_capacity(grid.len());
    let mut g2 = Vec::with_capacity(grid.len());
    let mut n_t = 0.0;
    for &tau in grid.points() {
        let m = two_time_normal(&joint_q_transient(p, s0, t, tau)?)?;
        let norm = m.n1 * m.n2;
        if !(norm > 0.0) {
            return Err(DomainError::ZeroDenominator.into());
        }
        n_t = m.n1;
        g1.push(m.c_normal / norm.sqrt());
        g2.push(m.fourth / norm);
    }
    CorrelationCurve::new(grid.points().to_vec(), g1, Some(g2), None, n_t)
}
