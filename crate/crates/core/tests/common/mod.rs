#![allow(dead_code)]

use core::f64::consts::PI;
use std::num::NonZeroUsize;

use g2kit_core::{Complex, MomentState, SystemParams};
use gauss_quad::legendre::GaussLegendre;

/// Classical fourth-order Runge-Kutta on the raw moment equations.
pub fn rk4_moments(p: &SystemParams, s0: &MomentState, t: f64, h_max: f64) -> MomentState {
    let steps = (t / h_max).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let rhs = |s: &[Complex; 3]| -> [Complex; 3] {
        let (mean, m2, n) = (s[0], s[1], s[2]);
        [
            mean * (-0.5 * p.mu) + mean.conj() * p.beta,
            m2 * (-p.mu) + n * (2.0 * p.beta) - p.noise_b,
            n * (-p.mu) + (m2 + m2.conj()) * p.beta + p.noise_c,
        ]
    };
    let axpy = |a: &[Complex; 3], k: &[Complex; 3], c: f64| -> [Complex; 3] {
        [a[0] + k[0] * c, a[1] + k[1] * c, a[2] + k[2] * c]
    };
    let mut y = [s0.mean, s0.m2, Complex::new(s0.n, 0.0)];
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, h / 2.0));
        let k3 = rhs(&axpy(&y, &k2, h / 2.0));
        let k4 = rhs(&axpy(&y, &k3, h));
        for i in 0..3 {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    MomentState::new(y[0], y[1], y[2].re)
}

fn rule(points: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(points).unwrap())
}

fn mapped(points: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    rule(points).as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * ((b - a) * x + a + b), 0.5 * (b - a) * w)).collect()
}

/// ∫ f(z) d²z/π over the disk |z − center| ≤ radius, in polar coordinates.
pub fn disk_integral(center: Complex, radius: f64, f: impl Fn(Complex) -> Complex) -> Complex {
    let radial = mapped(160, 0.0, radius);
    let angular = mapped(160, 0.0, 2.0 * PI);
    let mut total = Complex::new(0.0, 0.0);
    for &(r, wr) in &radial {
        for &(th, wt) in &angular {
            total += f(center + Complex::from_polar(r, th)) * (r * wr * wt);
        }
    }
    total / PI
}

/// ∫ f(z₁, z₂) d²z₁d²z₂/π² over the box [−l, l]⁴.
pub fn box_integral_4d(l: f64, points: usize, f: impl Fn(Complex, Complex) -> Complex) -> Complex {
    let nodes = mapped(points, -l, l);
    let mut total = Complex::new(0.0, 0.0);
    for &(x1, w1) in &nodes {
        for &(y1, w2) in &nodes {
            let z1 = Complex::new(x1, y1);
            for &(x2, w3) in &nodes {
                for &(y2, w4) in &nodes {
                    total += f(z1, Complex::new(x2, y2)) * (w1 * w2 * w3 * w4);
                }
            }
        }
    }
    total / (PI * PI)
}

/// Fock amplitudes ⟨k|α⟩ for k < cutoff.
pub fn coherent_fock(alpha: Complex, cutoff: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(cutoff);
    let mut c = Complex::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..cutoff {
        out.push(c);
        c = c * alpha / ((k + 1) as f64).sqrt();
    }
    out
}

pub fn apply_a(v: &[Complex]) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); v.len()];
    for k in 1..v.len() {
        out[k - 1] = v[k] * (k as f64).sqrt();
    }
    out
}

/// a† with the top level dropped.
pub fn apply_adag(v: &[Complex]) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); v.len()];
    for k in 0..v.len() - 1 {
        out[k + 1] = v[k] * ((k + 1) as f64).sqrt();
    }
    out
}

/// ⟨x|y⟩.
pub fn inner(x: &[Complex], y: &[Complex]) -> Complex {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// exp(−z·n̂) applied to a Fock vector.
pub fn apply_number_exp(z: Complex, v: &[Complex]) -> Vec<Complex> {
    v.iter().enumerate().map(|(k, c)| c * (-z * k as f64).exp()).collect()
}

/// Thermal occupation probabilities nᵏ/(n+1)^{k+1}.
pub fn thermal_probabilities(n: f64, cutoff: usize) -> Vec<f64> {
    (0..cutoff).map(|k| (n / (n + 1.0)).powi(k as i32) / (n + 1.0)).collect()
}

/// Ŝ(r)|0⟩ for real r, Ŝ(r) = exp(r(a†² − a²)/2).
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); cutoff];
    let t = r.tanh();
    // ⟨2m|Ŝ|0⟩ = (cosh r)^{−1/2} tanhᵐ r √((2m)!)/(2ᵐ m!)
    let mut c = 1.0 / r.cosh().sqrt();
    let mut m = 0;
    while 2 * m < cutoff {
        out[2 * m] = Complex::new(c, 0.0);
        let (a, b) = ((2 * m + 1) as f64, (2 * m + 2) as f64);
        c *= t * (a * b).sqrt() / (2.0 * (m + 1) as f64);
        m += 1;
    }
    out
}
