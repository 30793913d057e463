//! JSON config files for each subcommand.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use metriq::{ComplexMatrix, MetricJson, ProverModel, PtHamiltonian};

use crate::{CliError, CommonArgs};

pub const DEFAULT_SHOTS: u64 = 100_000;

/// `{"metric": {...}, "rho": [[...]], "seed": 7, "shots": 100000}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GEtaConfig {
    pub metric: MetricJson,
    pub rho: ComplexMatrix,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

/// `{"hamiltonian": {"r": 1, "s": 2, "phi": 0.52}, "t": 1, "rho": [[...]], ...}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtConfig {
    pub hamiltonian: PtHamiltonian,
    pub t: f64,
    pub rho: ComplexMatrix,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

/// `{"metric": {...}, "prover": {"kind": "honest"}, "exact": false, ...}`
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub metric: MetricJson,
    pub prover: ProverModel,
    /// Noiseless responses instead of sampled ones.
    #[serde(default)]
    pub exact: bool,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("cannot parse {}: {e}", path.display())))
}

/// The command-line seed wins over the config's; one of them must exist.
pub fn resolve_seed(args: &CommonArgs, from_config: Option<u64>) -> Result<u64, CliError> {
    args.seed.or(from_config).ok_or_else(|| {
        CliError::Usage("a seed is required: pass --seed or set \"seed\" in the config".into())
    })
}

pub fn resolve_shots(args: &CommonArgs, from_config: Option<u64>) -> Result<u64, CliError> {
    let n = args.shots.or(from_config).unwrap_or(DEFAULT_SHOTS);
    if n == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    Ok(n)
}
