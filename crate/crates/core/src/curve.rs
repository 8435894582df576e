//! Delay grids, correlation curves and their photon-statistics labels.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{DomainError, Result};
use crate::Complex;

/// Strictly increasing delays starting at τ = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TauGrid(Vec<f64>);

impl TauGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        check_grid(&points)?;
        Ok(TauGrid(points))
    }

    /// `steps + 1` evenly spaced points on [0, tau_max].
    pub fn uniform(tau_max: f64, steps: usize) -> Result<Self> {
        if !(tau_max > 0.0 && tau_max.is_finite()) || steps < 1 {
            return Err(DomainError::Curve("uniform grid needs tau_max > 0 and steps ≥ 1").into());
        }
        let h = tau_max / steps as f64;
        let mut points: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
        points[steps] = tau_max;
        TauGrid::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_grid(points: &[f64]) -> Result<()> {
    match points.first() {
        Some(&0.0) => {}
        _ => return Err(DomainError::Curve("grid must start at 0").into()),
    }
    if points.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(DomainError::Curve("grid must be strictly increasing").into());
    }
    Ok(())
}

/// g¹(τ) and g²(τ) sampled on a delay grid.
///
/// `g2` is absent for routes that only produce first-order correlations.
/// Error columns are present for Monte Carlo estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub tau_grid: Vec<f64>,
    pub g1: Vec<Complex>,
    pub g2: Option<Vec<f64>>,
    pub g1_err: Option<Vec<f64>>,
    pub g2_err: Option<Vec<f64>>,
    /// Occupation ⟨α*α⟩ used as normalization.
    pub n_ss: f64,
}

impl CorrelationCurve {
    pub fn new(
        tau_grid: Vec<f64>,
        g1: Vec<Complex>,
        g2: Option<Vec<f64>>,
        errors: Option<(Vec<f64>, Vec<f64>)>,
        n_ss: f64,
    ) -> Result<Self> {
        let (g1_err, g2_err) = match errors {
            Some((e1, e2)) => (Some(e1), Some(e2)),
            None => (None, None),
        };
        let curve = CorrelationCurve { tau_grid, g1, g2, g1_err, g2_err, n_ss };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        check_grid(&self.tau_grid)?;
        let len = self.tau_grid.len();
        let bad = |msg| Err(DomainError::Curve(msg).into());
        if self.g1.len() != len {
            return bad("g1 length differs from grid");
        }
        if let Some(g2) = &self.g2 {
            if g2.len() != len {
                return bad("g2 length differs from grid");
            }
            if g2.iter().any(|v| !(*v >= 0.0)) {
                return bad("g2 must be real and non-negative");
            }
        }
        for err in [&self.g1_err, &self.g2_err].into_iter().flatten() {
            if err.len() != len {
                return bad("error column length differs from grid");
            }
            if err.iter().any(|v| !(*v >= 0.0)) {
                return bad("standard errors must be non-negative");
            }
        }
        if self.g1_err.is_some() != self.g2_err.is_some() {
            return bad("error columns must come together");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tau_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_grid.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.g2_err.is_some()
    }
}

/// Shape of g²(τ) relative to g²(0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationShape {
    Bunched,
    Antibunched,
    Flat,
}

/// Photon statistics read off g²(0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonStatistics {
    Poissonian,
    SuperPoissonian,
    SubPoissonian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub correlation: CorrelationShape,
    pub statistics: PhotonStatistics,
}

impl fmt::Display for CorrelationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationShape::Bunched => "bunched",
            CorrelationShape::Antibunched => "antibunched",
            CorrelationShape::Flat => "flat",
        })
    }
}

impl fmt::Display for PhotonStatistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhotonStatistics::Poissonian => "poissonian",
            PhotonStatistics::SuperPoissonian => "super-Poissonian",
            PhotonStatistics::SubPoissonian => "sub-Poissonian",
        })
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", self.correlation, self.statistics)
    }
}
