//! Method dispatch and the multi-threaded ensemble driver.

use g2kit_core::propagator::{g1_via_chain, DampedDrift, FreeEvolution, KernelFamily};
use g2kit_core::qfunction::g2_via_q;
use g2kit_core::regression::g2_curve;
use g2kit_core::sde::{Ensemble, EnsembleConfig, EnsembleEstimate};
use g2kit_core::{validate_params, Complex, CorrelationCurve, DomainError, SystemParams, TauGrid};
use rayon::prelude::*;

use crate::config::{KernelKind, Method, PropagatorSpec, RunConfig};
use crate::error::CliError;

pub const THREADS_ENV: &str = "G2KIT_THREADS";

/// Worker count from `G2KIT_THREADS`, `None` when unset.
pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs the ensemble chunks on a pool of `threads` workers.
///
/// Chunk sums are collected in chunk order before being merged, so the
/// estimate does not depend on the worker count.
pub fn simulate_parallel(
    p: &SystemParams,
    cfg: &EnsembleConfig,
    grid: &TauGrid,
    threads: Option<usize>,
) -> Result<EnsembleEstimate, CliError> {
    let ensemble = Ensemble::new(p, cfg, grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
    let chunks: Vec<_> =
        pool.install(|| (0..ensemble.chunk_count()).into_par_iter().map(|k| ensemble.run_chunk(k)).collect());
    Ok(ensemble.reduce(chunks)?)
}

fn chain_curve(
    family: &impl KernelFamily,
    spec: &PropagatorSpec,
    grid: &TauGrid,
) -> Result<CorrelationCurve, CliError> {
    let alpha0 = Complex::new(spec.alpha0_re, spec.alpha0_im);
    let n_t = g1_via_chain(family, alpha0, spec.t, 0.0)?.re;
    if !(n_t > 0.0) {
        return Err(g2kit_core::Error::from(DomainError::ZeroDenominator).into());
    }
    // the chain gives ⟨a†(t+τ)a(t)⟩, the curve stores its conjugate
    let g1 = grid
        .points()
        .iter()
        .map(|&tau| Ok(g1_via_chain(family, alpha0, spec.t, tau)?.conj() / n_t))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CorrelationCurve::new(grid.points().to_vec(), g1, None, None, n_t)?)
}

/// Computes the curve requested by a validated configuration.
pub fn compute_curve(cfg: &RunConfig, threads: Option<usize>) -> Result<CorrelationCurve, CliError> {
    cfg.validate()?;
    let grid = cfg.tau_grid()?;
    let p = validate_params(cfg.params)?;
    match cfg.method {
        Method::Regression => Ok(g2_curve(&p, &grid)?),
        Method::Qfunction => Ok(g2_via_q(&p, &grid)?),
        Method::Sde => {
            let ens = cfg.ensemble.as_ref().expect("validated config has an ensemble section");
            Ok(simulate_parallel(&p, ens, &grid, threads)?.curve()?)
        }
        Method::Propagator => {
            let spec = cfg.propagator.as_ref().expect("validated config has a propagator section");
            match spec.kernel {
                KernelKind::Free => chain_curve(&FreeEvolution { omega: spec.omega }, spec, &grid),
                KernelKind::Damped => {
                    chain_curve(&DampedDrift { mu: p.mu, beta: p.beta, omega: spec.omega }, spec, &grid)
                }
            }
        }
    }
}
