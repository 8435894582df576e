//! Coherent-state propagator route.
//!
//! Quadratic dynamics have Gaussian kernels
//!
//! ```text
//! K(α,t|β,0) = ⟨α|Û(t)|β⟩ = exp(−|α|²/2 − |β|²/2 + u·ᾱβ + v·ᾱ² + w·β² + p·ᾱ + q·β + offset)
//! ```
//!
//! Kernels compose through the coherent-state completeness relation
//! ∫ d²β/π |β⟩⟨β| = 1, and the first-order correlation of an initial coherent
//! state |α₀⟩ is the five-fold integral
//!
//! ```text
//! ⟨a†(t+τ)a(t)⟩ = ∫ α·ᾱ₄ ⟨α₁|α₀⟩⟨α₀|α₃⟩ K(α₄,τ|α) K*(α₄,τ|α₂) K(α,t|α₁) K*(α₂,t|α₃)
//! ```
//!
//! over d²α d²α₁ d²α₂ d²α₃ d²α₄ / π⁵. Note the delay kernel starts from
//! time 0 (K(α₄,τ|α,0)) and the initial overlaps pair α₁ with the ket side
//! and α₃ with the bra side. Every integral goes through [`crate::gaussint`].

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{DomainError, Error, Result};
use crate::gaussint::{GaussianForm, Monomial, Var};
use crate::Complex;

const STRUCTURE_TOL: f64 = 1e-10;

/// Exponent coefficients of a Gaussian coherent-state kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorKernel {
    pub t: f64,
    pub u: Complex,
    pub v: Complex,
    pub w: Complex,
    pub p: Complex,
    pub q: Complex,
    pub offset: Complex,
}

impl PropagatorKernel {
    /// ⟨α|β⟩.
    pub fn overlap() -> Self {
        PropagatorKernel {
            t: 0.0,
            u: Complex::new(1.0, 0.0),
            v: Complex::zero(),
            w: Complex::zero(),
            p: Complex::zero(),
            q: Complex::zero(),
            offset: Complex::zero(),
        }
    }

    pub fn log_value(&self, alpha: Complex, beta: Complex) -> Complex {
        let ab = alpha.conj();
        -0.5 * (alpha.norm_sqr() + beta.norm_sqr())
            + self.u * ab * beta
            + self.v * ab * ab
            + self.w * beta * beta
            + self.p * ab
            + self.q * beta
            + self.offset
    }

    /// K(α, t | β, 0).
    pub fn evaluate(&self, alpha: Complex, beta: Complex) -> Complex {
        self.log_value(alpha, beta).exp()
    }

    /// Adds log K(z_out | z_in) to `form`.
    fn add_to(&self, form: &mut GaussianForm, out: usize, inp: usize) {
        form.add_term(Var::Zbar(out), Var::Z(out), Complex::new(-0.5, 0.0));
        form.add_term(Var::Zbar(inp), Var::Z(inp), Complex::new(-0.5, 0.0));
        form.add_term(Var::Zbar(out), Var::Z(inp), self.u);
        form.add_term(Var::Zbar(out), Var::Zbar(out), self.v);
        form.add_term(Var::Z(inp), Var::Z(inp), self.w);
        form.add_linear(Var::Zbar(out), self.p);
        form.add_linear(Var::Z(inp), self.q);
        form.add_offset(self.offset);
    }

    /// Adds log K*(z_out | z_in) = conj(log K) to `form`.
    fn add_conj_to(&self, form: &mut GaussianForm, out: usize, inp: usize) {
        form.add_term(Var::Zbar(out), Var::Z(out), Complex::new(-0.5, 0.0));
        form.add_term(Var::Zbar(inp), Var::Z(inp), Complex::new(-0.5, 0.0));
        form.add_term(Var::Z(out), Var::Zbar(inp), self.u.conj());
        form.add_term(Var::Z(out), Var::Z(out), self.v.conj());
        form.add_term(Var::Zbar(inp), Var::Zbar(inp), self.w.conj());
        form.add_linear(Var::Z(out), self.p.conj());
        form.add_linear(Var::Zbar(inp), self.q.conj());
        form.add_offset(self.offset.conj());
    }

    /// Reads a kernel back from a form over (α, β) = (z₀, z₁), checking that
    /// it has the kernel structure.
    fn from_form(form: &GaussianForm, t: f64) -> Result<Self> {
        let (a, b) = (0, 1);
        let must_vanish = [
            form.coefficient(Var::Z(a), Var::Z(a)),
            form.coefficient(Var::Zbar(b), Var::Zbar(b)),
            form.coefficient(Var::Z(a), Var::Z(b)),
            form.coefficient(Var::Zbar(a), Var::Zbar(b)),
            form.coefficient(Var::Z(a), Var::Zbar(b)),
            form.linear(Var::Z(a)),
            form.linear(Var::Zbar(b)),
        ];
        let unit = [form.coefficient(Var::Zbar(a), Var::Z(a)), form.coefficient(Var::Zbar(b), Var::Z(b))];
        if must_vanish.iter().any(|c| c.norm() > STRUCTURE_TOL) || unit.iter().any(|c| (c + 0.5).norm() > STRUCTURE_TOL)
        {
            return Err(Error::Singular("composed exponent is not a coherent-state kernel".into()));
        }
        Ok(PropagatorKernel {
            t,
            u: form.coefficient(Var::Zbar(a), Var::Z(b)),
            v: form.coefficient(Var::Zbar(a), Var::Zbar(a)),
            w: form.coefficient(Var::Z(b), Var::Z(b)),
            p: form.linear(Var::Zbar(a)),
            q: form.linear(Var::Z(b)),
            offset: form.offset(),
        })
    }
}

/// A one-parameter family of kernels K(·, t | ·, 0).
pub trait KernelFamily {
    fn kernel(&self, t: f64) -> Result<PropagatorKernel>;
}

/// Ĥ = ω a†a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEvolution {
    pub omega: f64,
}

/// Noiseless drift −(μ/2 + iω)α + βα*, represented by the operator
/// Û(t) = Ŝ(βt)·exp(−(μ/2 + iω)t a†a) with Ŝ(r) = exp(r(a†² − a²)/2).
///
/// For ω = 0 the normalized state Û(t)|γ⟩ has mean a₊(t)γ + a₋(t)γ̄, the
/// deterministic part of the Langevin flow. The family is a semigroup only
/// when β = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedDrift {
    pub mu: f64,
    pub beta: f64,
    pub omega: f64,
}

impl KernelFamily for FreeEvolution {
    fn kernel(&self, t: f64) -> Result<PropagatorKernel> {
        Ok(kernel_free(self.omega, t))
    }
}

impl KernelFamily for DampedDrift {
    fn kernel(&self, t: f64) -> Result<PropagatorKernel> {
        kernel_damped(self, t)
    }
}

/// u = e^{−iωt}, no squeezing terms.
pub fn kernel_free(omega: f64, t: f64) -> PropagatorKernel {
    PropagatorKernel { t, u: Complex::from_polar(1.0, -omega * t), ..PropagatorKernel::overlap() }
}

/// u = d/cosh r, v = tanh r/2, w = −d²·tanh r/2 and offset −½ ln cosh r,
/// with d = e^{−(μ/2 + iω)t} and r = βt.
pub fn kernel_damped(drift: &DampedDrift, t: f64) -> Result<PropagatorKernel> {
    let DampedDrift { mu, beta, omega } = *drift;
    for (name, value) in [("mu", mu), ("beta", beta), ("omega", omega)] {
        if !value.is_finite() {
            return Err(DomainError::Parameter { name, value }.into());
        }
    }
    if !(beta >= 0.0) {
        return Err(DomainError::Parameter { name: "beta", value: beta }.into());
    }
    if !(mu - 2.0 * beta > 0.0) {
        return Err(DomainError::Unstable { lambda_minus: mu - 2.0 * beta }.into());
    }
    if !(t >= 0.0) {
        return Err(DomainError::NegativeTime(t).into());
    }
    let d = Complex::new(-0.5 * mu * t, -omega * t).exp();
    let r = beta * t;
    let (cosh, tanh) = (r.cosh(), r.tanh());
    Ok(PropagatorKernel {
        t,
        u: d / cosh,
        v: Complex::new(0.5 * tanh, 0.0),
        w: -d * d * (0.5 * tanh),
        p: Complex::zero(),
        q: Complex::zero(),
        offset: Complex::new(-0.5 * cosh.ln(), 0.0),
    })
}

/// ∫ d²β/π K₂(α, t₂|β) K₁(β, t₁|γ), the kernel for `k1` followed by `k2`.
pub fn compose(k1: &PropagatorKernel, k2: &PropagatorKernel) -> Result<PropagatorKernel> {
    // variables: 0 = β (integrated), 1 = α, 2 = γ
    let mut form = GaussianForm::zero(3)?;
    k2.add_to(&mut form, 1, 0);
    k1.add_to(&mut form, 0, 2);
    PropagatorKernel::from_form(&form.integrate_out(1)?, k1.t + k2.t)
}

/// Mean ⟨a⟩ of the normalized state Û(t)|γ⟩: ∫ α|K(α|γ)|² / ∫ |K(α|γ)|².
pub fn induced_mean(k: &PropagatorKernel, gamma: Complex) -> Result<Complex> {
    let mut form = GaussianForm::zero(1)?;
    let lin = k.u * gamma + k.p;
    form.add_term(Var::Zbar(0), Var::Z(0), Complex::new(-1.0, 0.0));
    form.add_term(Var::Zbar(0), Var::Zbar(0), k.v);
    form.add_term(Var::Z(0), Var::Z(0), k.v.conj());
    form.add_linear(Var::Zbar(0), lin);
    form.add_linear(Var::Z(0), lin.conj());
    Ok(form.solve()?.mean(Var::Z(0)))
}

/// ⟨a†(t+τ)a(t)⟩ for the initial state |α₀⟩.
///
/// The five-fold chain is normalized by the same chain without the α·ᾱ₄
/// factor, Tr[Û(τ)Û(t)ρÛ†(t)Û†(τ)], which is 1 for unitary families.
pub fn g1_via_chain(family: &impl KernelFamily, alpha0: Complex, t: f64, tau: f64) -> Result<Complex> {
    let (k_t, k_tau) = (family.kernel(t)?, family.kernel(tau)?);
    // variables: 0 = α, 1 = α₁, 2 = α₂, 3 = α₃, 4 = α₄
    let mut form = GaussianForm::zero(5)?;
    // ⟨α₁|α₀⟩⟨α₀|α₃⟩
    form.add_term(Var::Zbar(1), Var::Z(1), Complex::new(-0.5, 0.0));
    form.add_term(Var::Zbar(3), Var::Z(3), Complex::new(-0.5, 0.0));
    form.add_linear(Var::Zbar(1), alpha0);
    form.add_linear(Var::Z(3), alpha0.conj());
    form.add_offset(Complex::new(-alpha0.norm_sqr(), 0.0));

    k_tau.add_to(&mut form, 4, 0);
    k_tau.add_conj_to(&mut form, 4, 2);
    k_t.add_to(&mut form, 0, 1);
    k_t.add_conj_to(&mut form, 2, 3);

    let solved = form.solve()?;
    let monomial = Monomial::new(alloc::vec![1, 0, 0, 0, 0], alloc::vec![0, 0, 0, 0, 1]);
    solved.expectation(&monomial)
}
