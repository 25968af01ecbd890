//! Command-line and config-file arguments.
//!
//! Every subcommand option is optional at the clap level so that values can
//! also come from a JSON config file (`--config`). A flag given on the command
//! line always wins over the same key in the file; required values are
//! checked after the merge.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "ellipsoid-lab", version, about = "Metric entropy and minimax risk of l2 ellipsoids")]
pub struct Cli {
    /// JSON file with default values for any option; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Report file (`.json` or `.csv`); stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Report format; inferred from the output extension when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-tau integrals of the counting function.
    Integrals(IntegralsArgs),
    /// Metric-entropy bounds.
    Entropy(EntropyArgs),
    /// Linear minimax risk, critical radius and nonlinear-risk bracket at one noise level.
    Risk(RiskArgs),
    /// The risk report over a grid of noise levels.
    RiskSweep(RiskSweepArgs),
    /// Exact values against closed-form asymptotics over a grid.
    Asymptotics(AsymptoticsArgs),
    /// Dirichlet spectrum of a box and Sobolev risk predictions.
    Sobolev(SobolevArgs),
    /// Monte Carlo MSE of the Pinsker filter at the worst-case point.
    Simulate(SimulateArgs),
    /// Run a self-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
}

impl GridArgs {
    pub fn is_set(&self) -> bool {
        self.start.is_some() || self.stop.is_some() || self.points.is_some()
    }

    /// Grid points from `start` to `stop`, both included.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let start = required(self.start, "start")?;
        let stop = required(self.stop, "stop")?;
        let points = required(self.points, "points")?;
        if !(start < stop) {
            return Err(CliError::invalid(format!("grid start must be below stop, got {start} and {stop}")));
        }
        if points < 2 {
            return Err(CliError::invalid(format!("grid needs at least 2 points, got {points}")));
        }
        let scale = self.scale.unwrap_or_default();
        if scale == Scale::Log && !(start > 0.0) {
            return Err(CliError::invalid("a log grid needs a positive start".to_string()));
        }
        let last = (points - 1) as f64;
        Ok(match scale {
            Scale::Log => {
                let (a, b) = (start.ln(), stop.ln());
                (0..points)
                    .map(|i| endpoint(i, points, start, stop).unwrap_or_else(|| (a + (b - a) * i as f64 / last).exp()))
                    .collect()
            }
            Scale::Linear => (0..points)
                .map(|i| endpoint(i, points, start, stop).unwrap_or_else(|| start + (stop - start) * i as f64 / last))
                .collect(),
        })
    }
}

/// The exact endpoints at the first and last index.
fn endpoint(i: usize, points: usize, start: f64, stop: f64) -> Option<f64> {
    if i == 0 {
        Some(start)
    } else if i + 1 == points {
        Some(stop)
    } else {
        None
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct IntegralsArgs {
    /// Model as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Single threshold; use the grid options for a sweep.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Absolute tolerance of the quadrature.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    #[default]
    Exact,
    Quadrature,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct EntropyArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RiskArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Tolerance on `sigma^2 Psi(eps) - 1`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct RiskSweepArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityArg {
    Entropy,
    LinearRisk,
    CriticalRadius,
    NonlinearRisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    Leading,
    TwoTerm,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct AsymptoticsArgs {
    /// Decay family as JSON, e.g. `{"kind":"polynomial","c":1,"alpha":1}`.
    #[arg(long)]
    pub family: Option<String>,
    /// Model whose family is used when `--family` is absent.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_enum)]
    pub quantity: Option<QuantityArg>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Smallest axis kept when a polynomial pair is materialized.
    #[arg(long)]
    pub floor: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SobolevArgs {
    /// Box side lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<f64>>,
    /// Smoothness order.
    #[arg(long)]
    pub k: Option<u32>,
    /// Largest eigenvalue listed in the spectrum.
    #[arg(long)]
    pub s_max: Option<f64>,
    /// Report exact and predicted risk at this noise level instead of the spectrum.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Maximum number of enumerated eigenvalues.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of simulated coordinates; defaults to the filter support plus a guard band.
    #[arg(long)]
    pub n_trunc: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Core,
    Asymptotics,
    Sobolev,
    Montecarlo,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    #[arg(long)]
    pub eigen_cap: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Points per sweep in the asymptotics suite.
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn required<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::invalid(format!("missing required option --{}", name.replace('_', "-"))))
}

/// Keys of the config file that are not subcommand options.
const GLOBAL_KEYS: [&str; 2] = ["output", "format"];

/// Fills options missing from `args` with values from `config`. A model given
/// as a JSON object in the file is accepted as inline JSON.
pub fn merge<T: Serialize + DeserializeOwned>(args: T, config: &Map<String, Value>) -> Result<T, CliError> {
    let Value::Object(mut fields) = serde_json::to_value(&args).map_err(|e| CliError::config(e.to_string()))? else {
        return Err(CliError::config("options are not a record".into()));
    };
    for (key, value) in config {
        if GLOBAL_KEYS.contains(&key.as_str()) {
            continue;
        }
        let Some(slot) = fields.get_mut(key) else {
            return Err(CliError::config(format!("unknown key {key:?} in config file")));
        };
        if slot.is_null() {
            *slot = match value {
                Value::Object(_) if key == "model" || key == "family" => Value::String(value.to_string()),
                v => v.clone(),
            };
        }
    }
    serde_json::from_value(Value::Object(fields))
        .map_err(|e| CliError::config(format!("bad value in config file: {e}")))
}
