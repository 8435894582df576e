//! Model constants, one-time moment state and the transfer coefficients a±(τ).

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{DomainError, Result};
use crate::Complex;

/// The four constants (μ, β, B, C) of the Langevin model.
///
/// μ is the damping rate, β the phase-sensitive coupling, `noise_b` the
/// (complex) anomalous noise strength with ⟨η(t')η(t)⟩ = −B·δ(t−t') and
/// `noise_c` the normal noise strength with ⟨η*(t')η(t)⟩ = C·δ(t−t').
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "FlatParams", into = "FlatParams"))]
pub struct SystemParams {
    pub mu: f64,
    pub beta: f64,
    pub noise_b: Complex,
    pub noise_c: f64,
}

/// Flat JSON layout: `{"mu", "beta", "B_re", "B_im", "C"}`.
#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatParams {
    mu: f64,
    beta: f64,
    #[serde(rename = "B_re")]
    b_re: f64,
    #[serde(rename = "B_im", default)]
    b_im: f64,
    #[serde(rename = "C")]
    c: f64,
}

#[cfg(feature = "serde")]
impl From<FlatParams> for SystemParams {
    fn from(f: FlatParams) -> Self {
        SystemParams::new(f.mu, f.beta, Complex::new(f.b_re, f.b_im), f.c)
    }
}

#[cfg(feature = "serde")]
impl From<SystemParams> for FlatParams {
    fn from(p: SystemParams) -> Self {
        FlatParams { mu: p.mu, beta: p.beta, b_re: p.noise_b.re, b_im: p.noise_b.im, c: p.noise_c }
    }
}

impl SystemParams {
    pub const fn new(mu: f64, beta: f64, noise_b: Complex, noise_c: f64) -> Self {
        SystemParams { mu, beta, noise_b, noise_c }
    }

    /// Parameters with real B.
    pub const fn real(mu: f64, beta: f64, noise_b: f64, noise_c: f64) -> Self {
        Self::new(mu, beta, Complex::new(noise_b, 0.0), noise_c)
    }

    /// λ₋ = μ − 2β, decay rate of the quadrature Re α (twice its amplitude rate).
    pub fn lambda_minus(&self) -> f64 {
        self.mu - 2.0 * self.beta
    }

    /// λ₊ = μ + 2β, decay rate of the quadrature Im α.
    pub fn lambda_plus(&self) -> f64 {
        self.mu + 2.0 * self.beta
    }

    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }
}

/// Checks stability (λ₋ > 0) and positive semidefiniteness of the noise (C ≥ |B|).
pub fn validate_params(p: SystemParams) -> Result<SystemParams> {
    let finite = |name, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(DomainError::Parameter { name, value: v })
        }
    };
    finite("mu", p.mu)?;
    finite("beta", p.beta)?;
    finite("B_re", p.noise_b.re)?;
    finite("B_im", p.noise_b.im)?;
    finite("C", p.noise_c)?;
    if p.beta < 0.0 {
        return Err(DomainError::Parameter { name: "beta", value: p.beta }.into());
    }
    if p.lambda_minus() <= 0.0 {
        return Err(DomainError::Unstable { lambda_minus: p.lambda_minus() }.into());
    }
    let b_abs = p.noise_b.norm();
    if p.noise_c < 0.0 || p.noise_c < b_abs {
        return Err(DomainError::Noise { c: p.noise_c, b_abs }.into());
    }
    Ok(p)
}

/// First and second normally ordered moments ⟨α⟩, ⟨α²⟩, ⟨α*α⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentState {
    pub mean: Complex,
    pub m2: Complex,
    pub n: f64,
}

impl MomentState {
    pub const VACUUM: MomentState = MomentState { mean: Complex::new(0.0, 0.0), m2: Complex::new(0.0, 0.0), n: 0.0 };

    pub const fn new(mean: Complex, m2: Complex, n: f64) -> Self {
        MomentState { mean, m2, n }
    }

    /// Coherent state |α₀⟩: no fluctuations around the mean.
    pub fn coherent(alpha: Complex) -> Self {
        MomentState { mean: alpha, m2: alpha * alpha, n: alpha.norm_sqr() }
    }

    /// Zero-mean thermal state with occupation `n`.
    pub fn thermal(n: f64) -> Self {
        MomentState { mean: Complex::new(0.0, 0.0), m2: Complex::new(0.0, 0.0), n }
    }

    /// ⟨δα*δα⟩ = n − |⟨α⟩|².
    pub fn centered_n(&self) -> f64 {
        self.n - self.mean.norm_sqr()
    }

    /// ⟨δα²⟩ = ⟨α²⟩ − ⟨α⟩².
    pub fn centered_m2(&self) -> Complex {
        self.m2 - self.mean * self.mean
    }

    /// Checks n ≥ |mean|² and |m2 − mean²| ≤ n − |mean|², allowing for
    /// rounding relative to the size of the moments.
    pub fn validate(self) -> Result<Self> {
        if !(self.n.is_finite() && self.mean.is_finite() && self.m2.is_finite()) {
            return Err(DomainError::MomentState("non-finite moment").into());
        }
        let slack = 1e-12 * (1.0 + self.n.abs());
        let nc = self.centered_n();
        if nc < -slack {
            return Err(DomainError::MomentState("n < |mean|²").into());
        }
        if self.centered_m2().norm() > nc + slack {
            return Err(DomainError::MomentState("|m2 − mean²| > n − |mean|²").into());
        }
        Ok(self)
    }
}

/// Regression coefficients α(t+τ) = a₊(τ)·α(t) + a₋(τ)·α*(t) + noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoeffs {
    pub a_plus: f64,
    pub a_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub tau: f64,
}

impl TransferCoeffs {
    /// Deterministic part of the map α ↦ a₊α + a₋α*.
    pub fn apply(&self, alpha: Complex) -> Complex {
        alpha * self.a_plus + alpha.conj() * self.a_minus
    }

    /// The symmetric 2×2 matrix acting on (α, α*).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.a_plus, self.a_minus], [self.a_minus, self.a_plus]]
    }
}

/// a±(τ) = ½(e^{−λ₋τ/2} ± e^{−λ₊τ/2}).
pub fn transfer_coeffs(p: &SystemParams, tau: f64) -> Result<TransferCoeffs> {
    validate_params(*p)?;
    if !(tau >= 0.0) {
        return Err(DomainError::NegativeTime(tau).into());
    }
    let lambda_minus = p.lambda_minus();
    let lambda_plus = p.lambda_plus();
    let slow = (-0.5 * lambda_minus * tau).exp();
    let fast = (-0.5 * lambda_plus * tau).exp();
    Ok(TransferCoeffs { a_plus: 0.5 * (slow + fast), a_minus: 0.5 * (slow - fast), lambda_plus, lambda_minus, tau })
}
