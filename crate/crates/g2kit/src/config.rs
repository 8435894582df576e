//! The JSON run configuration and its command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use g2kit_core::sde::EnsembleConfig;
use g2kit_core::{SystemParams, TauGrid};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Regression,
    Sde,
    Qfunction,
    Propagator,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Regression => "regression",
            Method::Sde => "sde",
            Method::Qfunction => "qfunction",
            Method::Propagator => "propagator",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub tau_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Free,
    Damped,
}

/// Coherent initial state |α₀⟩ propagated for time `t` before the delay τ.
///
/// The damped kernel takes μ and β from `params`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorSpec {
    #[serde(default)]
    pub omega: f64,
    pub alpha0_re: f64,
    #[serde(default)]
    pub alpha0_im: f64,
    #[serde(default)]
    pub t: f64,
    #[serde(default)]
    pub kernel: KernelKind,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: GridSpec,
    pub method: Method,
    #[serde(default)]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default)]
    pub propagator: Option<PropagatorSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Flag values that replace the corresponding config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(method) = o.method {
            self.method = method;
        }
        if let Some(seed) = o.seed {
            match &mut self.ensemble {
                Some(ens) => ens.seed = seed,
                None => return Err(CliError::config("--seed needs an \"ensemble\" section")),
            }
        }
        if let Some(tau_max) = o.tau_max {
            self.grid.tau_max = tau_max;
        }
        if let Some(steps) = o.steps {
            self.grid.steps = steps;
        }
        if let Some(out) = &o.out {
            self.output.path = Some(out.clone());
        }
        if let Some(format) = o.format {
            self.output.format = Some(format);
        }
        Ok(())
    }

    /// Checks the grid, the tolerance and that the method-specific sections
    /// are present exactly when the method needs them.
    ///
    /// Physical parameters are checked later by the numerical routes.
    pub fn validate(&self) -> Result<(), CliError> {
        let GridSpec { tau_max, steps } = self.grid;
        if !(tau_max > 0.0 && tau_max.is_finite()) {
            return Err(CliError::config(format!("grid.tau_max must be positive, got {tau_max}")));
        }
        if steps < 2 {
            return Err(CliError::config(format!("grid.steps must be greater than 1, got {steps}")));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::config(format!("tolerance must be non-negative, got {}", self.tolerance)));
        }
        match (self.method, self.ensemble.is_some()) {
            (Method::Sde, false) => return Err(CliError::config("method \"sde\" needs an \"ensemble\" section")),
            (m, true) if m != Method::Sde => {
                return Err(CliError::config(format!(
                    "\"ensemble\" section is only allowed for method \"sde\", not \"{m}\""
                )))
            }
            _ => {}
        }
        match (self.method, self.propagator.is_some()) {
            (Method::Propagator, false) => {
                Err(CliError::config("method \"propagator\" needs a \"propagator\" section"))
            }
            (m, true) if m != Method::Propagator => Err(CliError::config(format!(
                "\"propagator\" section is only allowed for method \"propagator\", not \"{m}\""
            ))),
            _ => Ok(()),
        }
    }

    pub fn tau_grid(&self) -> Result<TauGrid, CliError> {
        Ok(TauGrid::uniform(self.grid.tau_max, self.grid.steps)?)
    }

    /// Explicit format first, then the output file extension, then CSV.
    pub fn output_format(&self) -> Format {
        self.output.format.unwrap_or_else(|| match &self.output.path {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        })
    }
}
