use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::ValueEnum;
use phasefield::lattice::{LatticeSpec, SpatialLattice};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    LinearEvolve,
    ComplexStructure,
    FockCcr,
    HsScan,
    Phi4Evolve,
    MoyalCovariance,
    CovariantPropagator,
    MetricSuite,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::LinearEvolve => "linear-evolve",
            Experiment::ComplexStructure => "complex-structure",
            Experiment::FockCcr => "fock-ccr",
            Experiment::HsScan => "hs-scan",
            Experiment::Phi4Evolve => "phi4-evolve",
            Experiment::MoyalCovariance => "moyal-covariance",
            Experiment::CovariantPropagator => "covariant-propagator",
            Experiment::MetricSuite => "metric-suite",
        }
    }

    /// Parameter keys the experiment reads; anything else in the config is a
    /// schema error.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::LinearEvolve => &["lattice", "m", "a", "t", "dt"],
            Experiment::ComplexStructure => &["lattice", "m", "a", "t"],
            Experiment::FockCcr => &["d", "N_max", "omega", "t"],
            Experiment::HsScan => &["family", "sizes", "r", "m", "m_to", "a"],
            Experiment::Phi4Evolve => &["lattice", "m", "lambda", "a", "t", "dt"],
            Experiment::MoyalCovariance => &["lattice", "max_degree", "epsilon"],
            Experiment::CovariantPropagator => &["N", "T", "a", "dt", "m"],
            Experiment::MetricSuite => &["lattice", "triples"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const COMMON_KEYS: [&str; 3] = ["experiment", "seed", "out"];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub lattice: Option<LatticeSpec>,
    pub m: Option<f64>,
    pub m_to: Option<f64>,
    pub lambda: Option<f64>,
    pub omega: Option<f64>,
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub a: Option<f64>,
    pub d: Option<usize>,
    #[serde(rename = "N_max")]
    pub n_max: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub family: Option<String>,
    pub max_degree: Option<u32>,
    #[serde(rename = "N")]
    pub sites: Option<usize>,
    #[serde(rename = "T")]
    pub steps: Option<usize>,
    pub triples: Option<usize>,
}

impl ExperimentConfig {
    /// Reads the optional config file, applies `key=value` overrides and the
    /// `--seed`/`--out` flags, then validates against the experiment's keys.
    pub fn load(
        experiment: Experiment,
        path: Option<&Path>,
        overrides: &[String],
        seed: Option<u64>,
        out: Option<&Path>,
    ) -> Result<Self, CliError> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => return Err(CliError::Config("config must be a JSON object".into())),
                    Err(e) => return Err(CliError::Config(format!("{}: {e}", p.display()))),
                }
            }
            None => Map::new(),
        };
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        if let Some(s) = seed {
            doc.insert("seed".into(), Value::from(s));
        }
        if let Some(o) = out {
            doc.insert("out".into(), Value::from(o.to_string_lossy().into_owned()));
        }
        for key in doc.keys() {
            if !COMMON_KEYS.contains(&key.as_str()) && !experiment.keys().contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown key `{key}` for {experiment}; accepted: {}",
                    experiment.keys().join(", ")
                )));
            }
        }
        let config: ExperimentConfig =
            serde_json::from_value(Value::Object(doc)).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(name) = &config.experiment {
            if name != experiment.name() {
                return Err(CliError::Config(format!(
                    "config is for `{name}` but `{experiment}` was requested"
                )));
            }
        }
        Ok(config)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self, experiment: Experiment) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("phasefield-out").join(experiment.name()))
    }

    /// The configured lattice, or `fallback` when none is given.
    pub fn lattice_or(
        &self,
        fallback: impl FnOnce() -> phasefield::Result<SpatialLattice>,
    ) -> Result<Arc<SpatialLattice>, CliError> {
        let lattice = match &self.lattice {
            Some(spec) => SpatialLattice::from_spec(spec),
            None => fallback(),
        };
        lattice.map(Arc::new).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// `key=value` with a dotted key path; the value is parsed as JSON and
/// falls back to a bare string.
fn apply_override(doc: &mut Map<String, Value>, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty());
    let last = last.ok_or_else(|| CliError::Config(format!("override `{item}` has an empty key")))?;
    let mut node = doc;
    for part in parts {
        let entry = node.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
        node = entry
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("`{part}` in override `{item}` is not an object")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Rejects values that are not finite and strictly positive.
pub fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("`{name}` must be positive, got {value}")))
    }
}

pub fn non_negative(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("`{name}` must be non-negative, got {value}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_json_and_nest() {
        let mut doc = Map::new();
        apply_override(&mut doc, "sizes=[2,4]").unwrap();
        apply_override(&mut doc, "lattice.sites=3").unwrap();
        apply_override(&mut doc, "family=mass-shift").unwrap();
        assert_eq!(doc["sizes"], serde_json::json!([2, 4]));
        assert_eq!(doc["lattice"]["sites"], Value::from(3));
        assert_eq!(doc["family"], Value::from("mass-shift"));
        assert!(apply_override(&mut doc, "novalue").is_err());
        assert!(apply_override(&mut doc, "family.x=1").is_err());
    }

    #[test]
    fn keys_outside_the_experiment_are_rejected() {
        let overrides = ["lambda=0.1".to_string()];
        let err = ExperimentConfig::load(Experiment::FockCcr, None, &overrides, None, None).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        let ok = ExperimentConfig::load(Experiment::FockCcr, None, &["N_max=4".into()], Some(7), None).unwrap();
        assert_eq!((ok.n_max, ok.seed()), (Some(4), 7));
    }

    #[test]
    fn type_errors_are_schema_errors() {
        let err = ExperimentConfig::load(Experiment::FockCcr, None, &["N_max=-1".into()], None, None);
        assert!(matches!(err, Err(CliError::Config(_))));
    }
}
