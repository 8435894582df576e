//! Pointwise comparison of two curves on the same grid.

use std::fmt::Write as _;

use g2kit_core::CorrelationCurve;

use crate::error::CliError;
use crate::io::format_number;

/// Absolute tolerance for two analytic curves.
pub const ANALYTIC_TOLERANCE: f64 = 1e-8;
/// Largest accepted z-score when a side carries standard errors.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tau_grid: Vec<f64>,
    pub max_dg1: f64,
    /// Absent when either curve lacks g2.
    pub max_dg2: Option<f64>,
    /// |Δ|/σ per point, present when either side has standard errors.
    pub z_g1: Option<Vec<f64>>,
    pub z_g2: Option<Vec<f64>>,
    pub tolerance: f64,
    pub passed: bool,
}

fn z_score(delta: f64, sigma: f64) -> f64 {
    if delta == 0.0 {
        0.0
    } else {
        delta / sigma
    }
}

fn combined_errors(a: Option<&Vec<f64>>, b: Option<&Vec<f64>>) -> Option<Vec<f64>> {
    match (a, b) {
        (None, None) => None,
        (Some(e), None) | (None, Some(e)) => Some(e.clone()),
        (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(x, y)| x.hypot(*y)).collect()),
    }
}

/// Compares `a` with `b`.
///
/// Without standard errors on either side the curves must agree to
/// `tolerance` in both g1 and g2. Otherwise every g2 z-score must be at most
/// [`Z_LIMIT`]; g1 z-scores gate only when g2 is missing.
pub fn compare_curves(a: &CorrelationCurve, b: &CorrelationCurve, tolerance: f64) -> Result<Comparison, CliError> {
    if a.tau_grid != b.tau_grid {
        return Err(CliError::config("curves are on different τ grids"));
    }
    let dg1: Vec<f64> = a.g1.iter().zip(&b.g1).map(|(x, y)| (x - y).norm()).collect();
    let dg2: Option<Vec<f64>> = match (&a.g2, &b.g2) {
        (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(x, y)| (x - y).abs()).collect()),
        _ => None,
    };
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let z_g1 = combined_errors(a.g1_err.as_ref(), b.g1_err.as_ref())
        .map(|s| dg1.iter().zip(&s).map(|(d, s)| z_score(*d, *s)).collect::<Vec<_>>());
    let z_g2 = match (&dg2, combined_errors(a.g2_err.as_ref(), b.g2_err.as_ref())) {
        (Some(d), Some(s)) => Some(d.iter().zip(&s).map(|(d, s)| z_score(*d, *s)).collect::<Vec<_>>()),
        _ => None,
    };
    let passed = match (&z_g2, &z_g1) {
        (Some(z), _) => max(z) <= Z_LIMIT,
        (None, Some(z)) => max(z) <= Z_LIMIT,
        (None, None) => max(&dg1) <= tolerance && dg2.as_deref().is_none_or(|d| max(d) <= tolerance),
    };
    Ok(Comparison {
        tau_grid: a.tau_grid.clone(),
        max_dg1: max(&dg1),
        max_dg2: dg2.as_deref().map(max),
        z_g1,
        z_g2,
        tolerance,
        passed,
    })
}

impl Comparison {
    /// Human-readable report, one line per τ when z-scores exist.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "max |dg1| = {}", format_number(self.max_dg1));
        match self.max_dg2 {
            Some(d) => writeln!(s, "max |dg2| = {}", format_number(d)),
            None => writeln!(s, "max |dg2| = n/a"),
        }
        .unwrap();
        if self.z_g1.is_some() || self.z_g2.is_some() {
            let _ = writeln!(s, "tau,z_g1,z_g2");
            for k in 0..self.tau_grid.len() {
                let cell = |z: &Option<Vec<f64>>| z.as_ref().map_or(String::new(), |z| format!("{:.3}", z[k]));
                let _ = writeln!(s, "{},{},{}", format_number(self.tau_grid[k]), cell(&self.z_g1), cell(&self.z_g2));
            }
            let _ = writeln!(s, "criterion: every z ≤ {Z_LIMIT}");
        } else {
            let _ = writeln!(s, "criterion: max |Δ| ≤ {}", self.tolerance);
        }
        let _ = writeln!(s, "{}", if self.passed { "PASS" } else { "MISMATCH" });
        s
    }
}
