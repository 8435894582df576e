//! Monte Carlo route: trajectories of the c-number Langevin equation
//!
//! ```text
//! dα/dt = −(μ/2)α + βα* + η(t),   ⟨η(t')η(t)⟩ = −B·δ(t−t'),   ⟨η*(t')η(t)⟩ = C·δ(t−t')
//! ```
//!
//! In the quadratures x = Re α = α₊/2 and y = Im α = iα₋/2 (α± = α* ± α) the
//! drift is diagonal: x decays at λ₋/2 and y at λ₊/2, so each quadrature pair
//! is a two-dimensional Ornstein-Uhlenbeck process that can be stepped
//! exactly.
//!
//! Every trajectory owns a ChaCha8 stream selected by its index, and
//! trajectories are reduced in fixed-size chunks merged in index order. The
//! result is therefore bit-identical however the chunks are scheduled.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::curve::{CorrelationCurve, TauGrid};
use crate::error::{DomainError, Error, Result};
use crate::model::{validate_params, SystemParams};
use crate::regression::steady_state;
use crate::Complex;

/// Trajectories per reduction chunk.
pub const CHUNK_SIZE: usize = 256;

/// Integration scheme for the Langevin equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scheme {
    /// Exact transition density of the Ornstein-Uhlenbeck process.
    #[cfg_attr(feature = "serde", serde(rename = "exact-OU"))]
    ExactOu,
    #[cfg_attr(feature = "serde", serde(rename = "euler-maruyama"))]
    EulerMaruyama,
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Scheme::ExactOu => "exact-OU",
            Scheme::EulerMaruyama => "euler-maruyama",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct EnsembleConfig {
    pub n_traj: u64,
    pub seed: u64,
    /// Euler-Maruyama step, also the relaxation step.
    pub dt: f64,
    /// Relax from vacuum for this long instead of sampling the steady state.
    #[cfg_attr(feature = "serde", serde(default))]
    pub t_relax: f64,
    pub scheme: Scheme,
}

impl EnsembleConfig {
    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        validate_params(*p)?;
        if self.n_traj == 0 {
            return Err(Error::Config("ensemble needs n_traj > 0".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(DomainError::Parameter { name: "dt", value: self.dt }.into());
        }
        if !(self.t_relax >= 0.0 && self.t_relax.is_finite()) {
            return Err(DomainError::Parameter { name: "t_relax", value: self.t_relax }.into());
        }
        if self.scheme == Scheme::EulerMaruyama && self.dt > 0.1 / p.lambda_plus() {
            return Err(DomainError::Parameter { name: "dt (euler-maruyama needs dt ≤ 0.1/λ₊)", value: self.dt }.into());
        }
        Ok(())
    }
}

/// One realization of ∫η dt over an interval of length `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseIncrement {
    pub value: Complex,
    pub dt: f64,
}

/// Per-unit-time covariance of the noise quadratures (Re η, Im η):
/// Var = (C ∓ Re B)/2, Cov = −Im B/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCovariance {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl NoiseCovariance {
    pub fn new(p: &SystemParams) -> Result<Self> {
        let p = validate_params(*p)?;
        let (b, c) = (p.noise_b, p.noise_c);
        Ok(NoiseCovariance { xx: 0.5 * (c - b.re), yy: 0.5 * (c + b.re), xy: -0.5 * b.im })
    }
}

/// Lower-triangular square root of a 2×2 covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Factor2 {
    l11: f64,
    l21: f64,
    l22: f64,
}

impl Factor2 {
    fn new(xx: f64, xy: f64, yy: f64) -> Result<Self> {
        let slack = 1e-14 * (xx.abs() + yy.abs());
        if xx < -slack || yy < -slack || xy * xy > xx * yy + slack * slack.max(xx.abs() + yy.abs()) {
            return Err(
                DomainError::Noise { c: xx + yy, b_abs: Complex::new(0.5 * (yy - xx), -xy).norm() * 2.0 }.into()
            );
        }
        let l11 = xx.max(0.0).sqrt();
        if l11 > 0.0 {
            let l21 = xy / l11;
            Ok(Factor2 { l11, l21, l22: (yy - l21 * l21).max(0.0).sqrt() })
        } else {
            Ok(Factor2 { l11: 0.0, l21: 0.0, l22: yy.max(0.0).sqrt() })
        }
    }

    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Complex {
        let z1: f64 = StandardNormal.sample(rng);
        let z2: f64 = StandardNormal.sample(rng);
        Complex::new(self.l11 * z1, self.l21 * z1 + self.l22 * z2)
    }
}

/// Draws ∫η over `dt`: x + iy with Var x = (C − Re B)dt/2,
/// Var y = (C + Re B)dt/2 and Cov(x, y) = −Im B·dt/2, so that
/// E[η²] = −B·dt and E[|η|²] = C·dt.
pub fn sample_noise<R: RngCore + ?Sized>(p: &SystemParams, dt: f64, rng: &mut R) -> Result<NoiseIncrement> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DomainError::Parameter { name: "dt", value: dt }.into());
    }
    let s = NoiseCovariance::new(p)?;
    let factor = Factor2::new(s.xx * dt, s.xy * dt, s.yy * dt)?;
    Ok(NoiseIncrement { value: factor.sample(rng), dt })
}

/// Exact transition of the quadrature OU process over a fixed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ExactTransition {
    decay_x: f64,
    decay_y: f64,
    noise: Factor2,
}

/// ∫₀ʰ e^{−k s} ds, finite at k = 0.
fn integrated_decay(k: f64, h: f64) -> f64 {
    if k == 0.0 {
        h
    } else {
        -(-k * h).exp_m1() / k
    }
}

impl ExactTransition {
    fn new(p: &SystemParams, h: f64) -> Result<Self> {
        let s = NoiseCovariance::new(p)?;
        let (kx, ky) = (0.5 * p.lambda_minus(), 0.5 * p.lambda_plus());
        let noise = Factor2::new(
            s.xx * integrated_decay(2.0 * kx, h),
            s.xy * integrated_decay(kx + ky, h),
            s.yy * integrated_decay(2.0 * ky, h),
        )?;
        Ok(ExactTransition { decay_x: (-kx * h).exp(), decay_y: (-ky * h).exp(), noise })
    }

    fn apply<R: RngCore + ?Sized>(&self, alpha: Complex, rng: &mut R) -> Complex {
        Complex::new(alpha.re * self.decay_x, alpha.im * self.decay_y) + self.noise.sample(rng)
    }
}

/// Euler-Maruyama over an interval, in equal substeps no longer than `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct EulerTransition {
    substeps: usize,
    h: f64,
    mu: f64,
    beta: f64,
    noise: Factor2,
}

impl EulerTransition {
    fn new(p: &SystemParams, interval: f64, dt: f64) -> Result<Self> {
        let substeps = ((interval / dt).ceil() as usize).max(1);
        let h = interval / substeps as f64;
        let s = NoiseCovariance::new(p)?;
        let noise = Factor2::new(s.xx * h, s.xy * h, s.yy * h)?;
        Ok(EulerTransition { substeps, h, mu: p.mu, beta: p.beta, noise })
    }

    fn apply<R: RngCore + ?Sized>(&self, mut alpha: Complex, rng: &mut R) -> Complex {
        for _ in 0..self.substeps {
            let drift = alpha * (-0.5 * self.mu) + alpha.conj() * self.beta;
            alpha += drift * self.h + self.noise.sample(rng);
        }
        alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Transition {
    Exact(ExactTransition),
    Euler(EulerTransition),
}

impl Transition {
    fn new(p: &SystemParams, scheme: Scheme, interval: f64, dt: f64) -> Result<Self> {
        Ok(match scheme {
            Scheme::ExactOu => Transition::Exact(ExactTransition::new(p, interval)?),
            Scheme::EulerMaruyama => Transition::Euler(EulerTransition::new(p, interval, dt)?),
        })
    }

    fn apply<R: RngCore + ?Sized>(&self, alpha: Complex, rng: &mut R) -> Complex {
        match self {
            Transition::Exact(t) => t.apply(alpha, rng),
            Transition::Euler(t) => t.apply(alpha, rng),
        }
    }
}

/// Advances α by `dt`.
///
/// `ExactOu` draws from the exact transition density:
/// x ↦ e^{−λ₋dt/2}x + G_x and y ↦ e^{−λ₊dt/2}y + G_y, where (G_x, G_y) has
/// covariance Σ_ij·(1 − e^{−(k_i+k_j)dt})/(k_i+k_j). `EulerMaruyama` takes
/// the single step α + (−μα/2 + βα*)dt + η.
pub fn step<R: RngCore + ?Sized>(
    p: &SystemParams,
    alpha: Complex,
    dt: f64,
    rng: &mut R,
    scheme: Scheme,
) -> Result<Complex> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DomainError::Parameter { name: "dt", value: dt }.into());
    }
    let transition = match scheme {
        Scheme::ExactOu => Transition::Exact(ExactTransition::new(p, dt)?),
        Scheme::EulerMaruyama => Transition::Euler(EulerTransition::new(p, dt, dt)?),
    };
    Ok(transition.apply(alpha, rng))
}

/// α sampled at the points of `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Start {
    Stationary(Factor2),
    Relax(Transition),
}

/// A prepared ensemble: parameters, configuration, grid and the precomputed
/// per-gap transitions.
#[derive(Debug, Clone)]
pub struct Ensemble {
    params: SystemParams,
    cfg: EnsembleConfig,
    grid: Vec<f64>,
    start: Start,
    gaps: Vec<Transition>,
}

impl Ensemble {
    pub fn new(p: &SystemParams, cfg: &EnsembleConfig, grid: &TauGrid) -> Result<Self> {
        cfg.validate(p)?;
        let start = if cfg.t_relax > 0.0 {
            Start::Relax(Transition::new(p, cfg.scheme, cfg.t_relax, cfg.dt)?)
        } else {
            let ss = steady_state(p)?;
            // Var x = (n + Re m2)/2, Var y = (n − Re m2)/2, Cov = Im m2/2
            Start::Stationary(Factor2::new(0.5 * (ss.n + ss.m2.re), 0.5 * ss.m2.im, 0.5 * (ss.n - ss.m2.re))?)
        };
        let gaps = grid
            .points()
            .windows(2)
            .map(|w| Transition::new(p, cfg.scheme, w[1] - w[0], cfg.dt))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble { params: *p, cfg: *cfg, grid: grid.points().to_vec(), start, gaps })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn chunk_count(&self) -> usize {
        (self.cfg.n_traj as usize).div_ceil(CHUNK_SIZE)
    }

    /// The random stream of trajectory `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(index);
        rng
    }

    /// Fills `out` with α(t₀ + τ) on the grid for trajectory `index`.
    pub fn trajectory_into(&self, index: u64, out: &mut [Complex]) {
        debug_assert_eq!(out.len(), self.grid.len());
        let mut rng = self.rng(index);
        let mut alpha = match &self.start {
            Start::Stationary(f) => f.sample(&mut rng),
            Start::Relax(t) => t.apply(Complex::new(0.0, 0.0), &mut rng),
        };
        out[0] = alpha;
        for (slot, gap) in out[1..].iter_mut().zip(&self.gaps) {
            alpha = gap.apply(alpha, &mut rng);
            *slot = alpha;
        }
    }

    pub fn trajectory(&self, index: u64) -> Trajectory {
        let mut alpha = alloc::vec![Complex::new(0.0, 0.0); self.grid.len()];
        self.trajectory_into(index, &mut alpha);
        Trajectory { times: self.grid.clone(), alpha }
    }

    /// Sums over the trajectories of chunk `chunk`, in index order.
    pub fn run_chunk(&self, chunk: usize) -> MomentSums {
        let begin = (chunk * CHUNK_SIZE) as u64;
        let end = (begin + CHUNK_SIZE as u64).min(self.cfg.n_traj);
        let mut sums = MomentSums::new(self.grid.len());
        let mut buf = alloc::vec![Complex::new(0.0, 0.0); self.grid.len()];
        for index in begin..end {
            self.trajectory_into(index, &mut buf);
            sums.add(&buf);
        }
        sums
    }

    /// Merges chunk sums given in chunk order.
    pub fn reduce(&self, chunks: impl IntoIterator<Item = MomentSums>) -> Result<EnsembleEstimate> {
        let mut total = MomentSums::new(self.grid.len());
        for chunk in chunks {
            total.merge(&chunk);
        }
        total.estimate(&self.grid)
    }

    /// Sequential run over all chunks.
    pub fn run(&self) -> Result<EnsembleEstimate> {
        self.reduce((0..self.chunk_count()).map(|k| self.run_chunk(k)))
    }
}

/// Number of estimator variables per delay: n, |α(t₀)|²|α(t₀+τ)|²,
/// Re/Im conj(α(t₀))α(t₀+τ) and Re/Im α(t₀)α(t₀+τ).
const VARS: usize = 6;
const PAIRS: usize = VARS * (VARS + 1) / 2;

/// Running first and second sums of the estimator variables at each delay.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSums {
    count: u64,
    first: Vec<[f64; VARS]>,
    second: Vec<[f64; PAIRS]>,
}

fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * VARS - i * (i + 1) / 2 + j
}

impl MomentSums {
    pub fn new(points: usize) -> Self {
        MomentSums { count: 0, first: alloc::vec![[0.0; VARS]; points], second: alloc::vec![[0.0; PAIRS]; points] }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Adds one trajectory sampled on the delay grid.
    pub fn add(&mut self, alpha: &[Complex]) {
        let a0 = alpha[0];
        let n0 = a0.norm_sqr();
        for ((first, second), at) in self.first.iter_mut().zip(self.second.iter_mut()).zip(alpha) {
            let normal = a0.conj() * at;
            let anom = a0 * at;
            let v = [n0, n0 * at.norm_sqr(), normal.re, normal.im, anom.re, anom.im];
            for i in 0..VARS {
                first[i] += v[i];
                for j in i..VARS {
                    second[pair_index(i, j)] += v[i] * v[j];
                }
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.count += other.count;
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    /// Sample means and the covariance of the means at each delay.
    fn stats(&self, k: usize) -> ([f64; VARS], [[f64; VARS]; VARS]) {
        let n = self.count as f64;
        let mean = self.first[k].map(|s| s / n);
        let mut cov = [[0.0; VARS]; VARS];
        if self.count > 1 {
            for i in 0..VARS {
                for j in 0..VARS {
                    let s = self.second[k][pair_index(i, j)] - n * mean[i] * mean[j];
                    cov[i][j] = s / (n - 1.0) / n;
                }
            }
        }
        (mean, cov)
    }

    pub fn estimate(&self, grid: &[f64]) -> Result<EnsembleEstimate> {
        if self.count == 0 {
            return Err(Error::Config("ensemble needs n_traj > 0".into()));
        }
        let points = self.first.len();
        let mut out = EnsembleEstimate {
            n_traj: self.count,
            tau_grid: grid.to_vec(),
            n: 0.0,
            n_err: 0.0,
            c_normal: Vec::with_capacity(points),
            c_anom: Vec::with_capacity(points),
            fourth: Vec::with_capacity(points),
            g1: Vec::with_capacity(points),
            g1_err: Vec::with_capacity(points),
            g2: Vec::with_capacity(points),
            g2_err: Vec::with_capacity(points),
            isserlis_residual: Vec::with_capacity(points),
            isserlis_err: Vec::with_capacity(points),
        };
        let quad = |g: &[f64; VARS], cov: &[[f64; VARS]; VARS]| -> f64 {
            let mut s = 0.0;
            for i in 0..VARS {
                for j in 0..VARS {
                    s += g[i] * cov[i][j] * g[j];
                }
            }
            s.max(0.0)
        };
        for k in 0..points {
            let (m, cov) = self.stats(k);
            let [n, q, cnr, cni, car, cai] = m;
            if k == 0 {
                out.n = n;
                out.n_err = cov[0][0].max(0.0).sqrt();
            }
            out.c_normal.push(Complex::new(cnr, cni));
            out.c_anom.push(Complex::new(car, cai));
            out.fourth.push(q);

            let residual = q - n * n - (cnr * cnr + cni * cni) - (car * car + cai * cai);
            out.isserlis_residual.push(residual);
            out.isserlis_err.push(quad(&[-2.0 * n, 1.0, -2.0 * cnr, -2.0 * cni, -2.0 * car, -2.0 * cai], &cov).sqrt());

            if n > 0.0 {
                out.g1.push(Complex::new(cnr, cni) / n);
                let var_re = quad(&[-cnr / (n * n), 0.0, 1.0 / n, 0.0, 0.0, 0.0], &cov);
                let var_im = quad(&[-cni / (n * n), 0.0, 0.0, 1.0 / n, 0.0, 0.0], &cov);
                out.g1_err.push((var_re + var_im).sqrt());
                out.g2.push(q / (n * n));
                out.g2_err.push(quad(&[-2.0 * q / (n * n * n), 1.0 / (n * n), 0.0, 0.0, 0.0, 0.0], &cov).sqrt());
            }
        }
        Ok(out)
    }
}

/// Raw ensemble moments, normalized correlations and their standard errors.
///
/// The normalized columns are empty when the estimated occupation is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEstimate {
    pub n_traj: u64,
    pub tau_grid: Vec<f64>,
    /// Estimated ⟨α*α⟩ at the time origin.
    pub n: f64,
    pub n_err: f64,
    pub c_normal: Vec<Complex>,
    pub c_anom: Vec<Complex>,
    /// Raw ⟨α*(t₀)α*(t₀+τ)α(t₀+τ)α(t₀)⟩, no factorization assumed.
    pub fourth: Vec<f64>,
    pub g1: Vec<Complex>,
    /// Standard error of ĝ¹ as a complex number, √(Var Re + Var Im).
    pub g1_err: Vec<f64>,
    pub g2: Vec<f64>,
    pub g2_err: Vec<f64>,
    /// Raw fourth moment minus n² + |c_normal|² + |c_anom|².
    pub isserlis_residual: Vec<f64>,
    pub isserlis_err: Vec<f64>,
}

impl EnsembleEstimate {
    pub fn curve(&self) -> Result<CorrelationCurve> {
        if !(self.n > 0.0) {
            return Err(DomainError::ZeroDenominator.into());
        }
        CorrelationCurve::new(
            self.tau_grid.clone(),
            self.g1.clone(),
            Some(self.g2.clone()),
            Some((self.g1_err.clone(), self.g2_err.clone())),
            self.n,
        )
    }
}

/// Runs the whole ensemble sequentially.
pub fn simulate_ensemble(p: &SystemParams, cfg: &EnsembleConfig, grid: &TauGrid) -> Result<EnsembleEstimate> {
    Ensemble::new(p, cfg, grid)?.run()
}

/// ĝ¹(τ) = ĉ_normal(τ)/n̂ and ĝ²(τ) = (raw fourth moment)/n̂² with
/// delta-method standard errors.
pub fn simulate_curve(p: &SystemParams, cfg: &EnsembleConfig, grid: &TauGrid) -> Result<CorrelationCurve> {
    simulate_ensemble(p, cfg, grid)?.curve()
}
