//! Analytic route: moment equations, steady state and two-time correlations
//! obtained by regressing with the transfer coefficients a±(τ).
//!
//! The one-time moments obey
//!
//! ```text
//! d⟨α⟩/dt   = −(μ/2)⟨α⟩ + β⟨α*⟩
//! d⟨α²⟩/dt  = −μ⟨α²⟩ + 2β⟨α*α⟩ − B
//! d⟨α*α⟩/dt = −μ⟨α*α⟩ + β(⟨α*²⟩ + ⟨α²⟩) + C
//! ```
//!
//! For τ ≥ 0 the future noise is independent of α(t), so
//! ⟨α*(t)α(t+τ)⟩ = a₊⟨α*α⟩ + a₋⟨α*²⟩ and ⟨α(t)α(t+τ)⟩ = a₊⟨α²⟩ + a₋⟨α*α⟩.
//! The stationary state is a zero-mean Gaussian, and the fourth moment in g²
//! is closed with the Isserlis pairing sum.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::curve::{Classification, CorrelationCurve, CorrelationShape, PhotonStatistics, TauGrid};
use crate::error::{DomainError, Result};
use crate::gaussint::wick_expectation;
use crate::model::{transfer_coeffs, validate_params, MomentState, SystemParams};
use crate::Complex;

/// Moments at time `t` starting from `s0`.
///
/// The 3×3 system for (⟨α²⟩, ⟨α*²⟩, ⟨α*α⟩) is diagonalized by hand: Im⟨α²⟩
/// relaxes at rate μ, Re⟨α²⟩ + ⟨α*α⟩ at λ₋ and Re⟨α²⟩ − ⟨α*α⟩ at λ₊, each
/// toward its fixed point. The mean follows the transfer coefficients.
pub fn evolve_moments(p: &SystemParams, s0: &MomentState, t: f64) -> Result<MomentState> {
    validate_params(*p)?;
    if !(t >= 0.0) {
        return Err(DomainError::NegativeTime(t).into());
    }
    let coeffs = transfer_coeffs(p, t)?;
    let (b, c) = (p.noise_b, p.noise_c);
    // x(t) = x∞ + (x0 − x∞)e^{−rate·t}, written to keep precision at small t
    let relax = |x0: f64, x_inf: f64, rate: f64| x0 + (x_inf - x0) * (-(-rate * t).exp_m1());

    let im_m2 = relax(s0.m2.im, -b.im / p.mu, p.mu);
    let sum = relax(s0.m2.re + s0.n, (c - b.re) / p.lambda_minus(), p.lambda_minus());
    let diff = relax(s0.m2.re - s0.n, -(c + b.re) / p.lambda_plus(), p.lambda_plus());

    Ok(MomentState { mean: coeffs.apply(s0.mean), m2: Complex::new(0.5 * (sum + diff), im_m2), n: 0.5 * (sum - diff) })
}

/// Fixed point of the moment equations: mean 0,
/// ⟨α*α⟩ = (μC − 2β·Re B)/(μ² − 4β²), ⟨α²⟩ = (2β⟨α*α⟩ − B)/μ.
pub fn steady_state(p: &SystemParams) -> Result<MomentState> {
    validate_params(*p)?;
    let (mu, beta) = (p.mu, p.beta);
    let n = (mu * p.noise_c - 2.0 * beta * p.noise_b.re) / (p.lambda_minus() * p.lambda_plus());
    let m2 = (Complex::new(2.0 * beta * n, 0.0) - p.noise_b) / mu;
    Ok(MomentState { mean: Complex::new(0.0, 0.0), m2, n })
}

/// (⟨α*(t)α(t+τ)⟩, ⟨α(t)α(t+τ)⟩) given the one-time moments at t.
///
/// Valid for any state at t, stationary or not, since the noise entering
/// after t is uncorrelated with α(t).
pub fn two_time_pair_from(p: &SystemParams, at_t: &MomentState, tau: f64) -> Result<(Complex, Complex)> {
    let k = transfer_coeffs(p, tau)?;
    let c_normal = at_t.n * k.a_plus + at_t.m2.conj() * k.a_minus;
    let c_anom = at_t.m2 * k.a_plus + at_t.n * k.a_minus;
    Ok((c_normal, c_anom))
}

/// Stationary (⟨α*(t)α(t+τ)⟩, ⟨α(t)α(t+τ)⟩).
pub fn two_time_pair(p: &SystemParams, tau: f64) -> Result<(Complex, Complex)> {
    two_time_pair_from(p, &steady_state(p)?, tau)
}

fn stationary_occupation(p: &SystemParams) -> Result<MomentState> {
    let ss = steady_state(p)?;
    if ss.n == 0.0 {
        return Err(DomainError::ZeroDenominator.into());
    }
    Ok(ss)
}

/// g¹(τ) = ⟨α*(t)α(t+τ)⟩/⟨α*α⟩ at steady state.
pub fn g1_curve(p: &SystemParams, grid: &TauGrid) -> Result<Vec<Complex>> {
    let ss = stationary_occupation(p)?;
    grid.points().iter().map(|&tau| Ok(two_time_pair_from(p, &ss, tau)?.0 / ss.n)).collect()
}

/// Stationary g¹ and g² with g² = 1 + (|c_normal|² + |c_anom|²)/n².
///
/// The Isserlis sum for ⟨α*(t)α*(t+τ)α(t+τ)α(t)⟩ has three pairings: the
/// two equal-time occupations (n²), the normal cross pair (|c_normal|²) and
/// the anomalous cross pair (|c_anom|²).
pub fn g2_curve(p: &SystemParams, grid: &TauGrid) -> Result<CorrelationCurve> {
    let ss = stationary_occupation(p)?;
    let n2 = ss.n * ss.n;
    let mut g1 = Vec::with_capacity(grid.len());
    let mut g2 = Vec::with_capacity(grid.len());
    for &tau in grid.points() {
        let (c_normal, c_anom) = two_time_pair_from(p, &ss, tau)?;
        g1.push(c_normal / ss.n);
        g2.push(1.0 + (c_normal.norm_sqr() + c_anom.norm_sqr()) / n2);
    }
    CorrelationCurve::new(grid.points().to_vec(), g1, Some(g2), None, ss.n)
}

/// Equal-time g²(0) = ⟨n⟩(⟨n⟩ − 1)/⟨n⟩² = 1 − 1/⟨n⟩ for a number state.
pub fn g2_zero_number_formula(n: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(DomainError::ZeroDenominator.into());
    }
    Ok(n * (n - 1.0) / (n * n))
}

/// Gaussian statistics of the pair (α(t), α(t+τ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTimeGaussian {
    pub at_t: MomentState,
    pub at_t_tau: MomentState,
    /// ⟨α*(t)α(t+τ)⟩
    pub c_normal: Complex,
    /// ⟨α(t)α(t+τ)⟩
    pub c_anom: Complex,
}

impl TwoTimeGaussian {
    /// Raw ⟨α*(t)α*(t+τ)α(t+τ)α(t)⟩ by Isserlis' theorem with means.
    pub fn fourth_moment(&self) -> Complex {
        let (m1, m2) = (self.at_t.mean, self.at_t_tau.mean);
        // variables: 0 = α*(t), 1 = α*(t+τ), 2 = α(t+τ), 3 = α(t)
        let means = [m1.conj(), m2.conj(), m2, m1];
        let cn = self.c_normal - m1.conj() * m2;
        let ca = self.c_anom - m1 * m2;
        let nc1 = self.at_t.centered_n();
        let nc2 = self.at_t_tau.centered_n();
        let cov = |i: usize, j: usize| -> Complex {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            match (i, j) {
                (0, 0) => self.at_t.centered_m2().conj(),
                (1, 1) => self.at_t_tau.centered_m2().conj(),
                (2, 2) => self.at_t_tau.centered_m2(),
                (3, 3) => self.at_t.centered_m2(),
                (0, 1) => ca.conj(),
                (0, 2) => cn,
                (0, 3) => Complex::new(nc1, 0.0),
                (1, 2) => Complex::new(nc2, 0.0),
                (1, 3) => cn.conj(),
                (2, 3) => ca,
                _ => unreachable!(),
            }
        };
        wick_expectation(&[0, 1, 2, 3], |k| means[k], cov)
    }
}

/// Two-time Gaussian statistics of a (possibly transient) run from `s0`.
pub fn two_time_gaussian(p: &SystemParams, s0: &MomentState, t: f64, tau: f64) -> Result<TwoTimeGaussian> {
    let at_t = evolve_moments(p, s0, t)?;
    let at_t_tau = evolve_moments(p, &at_t, tau)?;
    let (c_normal, c_anom) = two_time_pair_from(p, &at_t, tau)?;
    Ok(TwoTimeGaussian { at_t, at_t_tau, c_normal, c_anom })
}

/// Transient g¹ and g² starting from `s0` and delayed from time `t`.
///
/// Normalized by ⟨α*α⟩(t)·⟨α*α⟩(t+τ) (and its square root for g¹), which
/// reduces to the stationary normalization once the state has relaxed.
pub fn g2_transient(p: &SystemParams, s0: &MomentState, t: f64, grid: &TauGrid) -> Result<CorrelationCurve> {
    let mut g1 = Vec::with_capacity(grid.len());
    let mut g2 = Vec::with_capacity(grid.len());
    let mut n_t = 0.0;
    for &tau in grid.points() {
        let stats = two_time_gaussian(p, s0, t, tau)?;
        n_t = stats.at_t.n;
        let norm = stats.at_t.n * stats.at_t_tau.n;
        if !(norm > 0.0) {
            return Err(DomainError::ZeroDenominator.into());
        }
        g1.push(stats.c_normal / norm.sqrt());
        g2.push(stats.fourth_moment().re / norm);
    }
    CorrelationCurve::new(grid.points().to_vec(), g1, Some(g2), None, n_t)
}

/// Labels a curve by comparing its long-delay tail with g²(0), and g²(0)
/// with 1.
///
/// The tail is the last grid point. Bunching means g²(τ) < g²(0) − tol there,
/// antibunching g²(τ) > g²(0) + tol.
pub fn classify(curve: &CorrelationCurve, tol: f64) -> Result<Classification> {
    let g2 = curve.g2.as_deref().ok_or(DomainError::Curve("curve has no g2 column"))?;
    let (Some(&first), Some(&tail)) = (g2.first(), g2.last()) else {
        return Err(DomainError::Curve("empty curve").into());
    };
    let correlation = if tail < first - tol {
        CorrelationShape::Bunched
    } else if tail > first + tol {
        CorrelationShape::Antibunched
    } else {
        CorrelationShape::Flat
    };
    let statistics = if first > 1.0 + tol {
        PhotonStatistics::SuperPoissonian
    } else if first < 1.0 - tol {
        PhotonStatistics::SubPoissonian
    } else {
        PhotonStatistics::Poissonian
    };
    Ok(Classification { correlation, statistics })
}
