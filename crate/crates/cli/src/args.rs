use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Sobolev spaces, string operators and fixed-point solvers on finite abelian groups.
#[derive(Debug, Parser)]
#[command(name = "abelsob", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group order, factors, weight statistics and the sup / algebra constants.
    Info(InfoArgs),
    /// Forward or inverse Fourier transform of a signal file.
    Transform(TransformArgs),
    /// Table of embedding constants for a grid of s and alpha.
    Constants(ConstantsArgs),
    /// Seeded property suites; exit 1 if any property fails.
    Check(CheckArgs),
    /// Solve L_c u = g and report the isometry and sup-norm checks.
    SolveLinear(SolveLinearArgs),
    /// Damped fixed-point solve of the nonlinear string equation.
    SolveNonlinear(SolveNonlinearArgs),
    /// Repeat solve-nonlinear over a grid of one parameter, one CSV row per run.
    Sweep(SweepArgs),
}

/// Flags selecting the weight. Either a built-in name or a CSV table.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WeightArgs {
    /// zero, sym-euclid, hamming or pruefer:<p> [default: sym-euclid]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// CSV table `index,gamma` in dual enumeration order; needs --c-gamma
    #[arg(long, conflicts_with = "weight")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_table: Option<PathBuf>,
    /// Subadditivity constant; overrides the built-in value
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct InfoArgs {
    /// JSON file with the same keys as the long flags; flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Group descriptor such as Z64, Z2xZ3 or Z2^6
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub weight: WeightArgs,
    /// Smoothness values, comma separated [default: 1]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<f64>,
    /// Machine-readable output
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TransformArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// Signal (or spectrum with --inverse); CSV or .json
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Output file; stdout CSV when omitted
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Spectrum to signal
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub inverse: bool,
    /// Use the O(|G|^2) definition instead of the fast path
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub naive: bool,
    /// Run both paths and fail if they differ by more than 1e-10 (relative)
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub oracle: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConstantsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub weight: WeightArgs,
    /// Smoothness grid [default: 0,0.5,1,2]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<f64>,
    /// Lebesgue exponents alpha (> s) [default: s+0.5, 2s+1, 4]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<f64>,
    /// Operator parameter for the H^{c,inf} constants [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Also list the compactness profile rows
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub compactness: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// [default: 42]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Random cases per configuration [default: 200]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Random signals per shift in the translation suite [default: 100]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation_samples: Option<usize>,
    /// Groups to fuzz [default: the built-in zoo]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<String>,
    /// [default: sym-euclid,hamming]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<String>,
    /// [default: 0,0.5,1,2]
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<f64>,
    /// Operator parameter for the string-operator suites [default: 0.5]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// all, transform, sobolev or stringop [default: all]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Write the JSON result here as well
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[arg(long, hide = true)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub inject_bug: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveLinearArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub weight: WeightArgs,
    /// Smoothness for the sup-norm bound [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Right-hand side g
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Solution u
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// JSON report
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ProblemArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub weight: WeightArgs,
    /// [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Smoothness for the continuity certificate [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// identity, affine, power:<p>,<lambda> or forced-power:<p>,<lambda>
    /// [default: forced-power:2,0.1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<String>,
    /// Forcing h as a signal file
    #[arg(long, conflicts_with = "forcing_norm")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forcing: Option<PathBuf>,
    /// Built-in low-frequency forcing with this L2 norm [default: 0.01]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forcing_norm: Option<f64>,
    /// Damping in (0, 1] [default: 1]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Stop when the L2 step falls below this [default: 1e-10]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// [default: 500]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Radius of the invariant ball in L^{2 alpha}; sized automatically when omitted
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_ball: Option<f64>,
    /// Starting iterate [default: 0]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveNonlinearArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    /// Solution phi
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// JSON report
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub json: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    /// forcing-norm, lambda, c, theta, s, tol, max-iter or epsilon-ball
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    /// Comma separated values, or lin:<a>:<b>:<n> / log:<a>:<b>:<n>
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<String>,
    /// CSV destination; stdout when omitted
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Concurrent solves [default: $ABELSOB_WORKERS or the CPU count]
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Overlays the flags given on the command line onto the config file.
pub fn resolve<T: Serialize + DeserializeOwned>(cli: &T, config: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(cli)?)?);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut merged: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(base) = &mut merged else {
        return Err(CliError::Usage(format!("config {} must hold a JSON object", path.display())));
    };
    if let Value::Object(flags) = serde_json::to_value(cli)? {
        base.extend(flags);
    }
    let resolved: T = serde_json::from_value(merged.clone())
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    // any key that does not survive a round trip was not recognised
    if let (Value::Object(given), Value::Object(kept)) = (&merged, serde_json::to_value(&resolved)?) {
        let unknown: Vec<&String> = given
            .iter()
            .filter(|(k, v)| !kept.contains_key(*k) && !is_empty_value(v))
            .map(|(k, _)| k)
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::Usage(format!("config {}: unknown keys {unknown:?}", path.display())));
        }
    }
    Ok(resolved)
}

fn is_empty_value(v: &Value) -> bool {
    match v {
        Value::Null | Value::Bool(false) => true,
        Value::Array(a) => a.is_empty(),
        _ => false,
    }
}
