//! TOML experiment configuration. Every field has a default, so an empty
//! file (or none) is a valid configuration.

use std::path::{Path, PathBuf};

use nonlocal_core::quadrature::QuadratureConfig;
use nonlocal_core::weight::WeightSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub output: OutputConfig,
    pub counterexample: CounterexampleConfig,
    pub heaviside: HeavisideConfig,
    pub locvsglob: LocVsGlobConfig,
    pub gamma: GammaConfig,
    pub olimpico: OlimpicoConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seed: 1,
            quadrature: QuadratureConfig::default(),
            output: OutputConfig::default(),
            counterexample: CounterexampleConfig::default(),
            heaviside: HeavisideConfig::default(),
            locvsglob: LocVsGlobConfig::default(),
            gamma: GammaConfig::default(),
            olimpico: OlimpicoConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            format: Format::Both,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub preset: String,
    pub j_max: u32,
    /// Largest `J_max` accepted without raising the cap in the config.
    pub j_cap: u32,
    /// Indices checked for the sequence conditions.
    pub n_check: u32,
    pub quotient_max_j: u32,
    pub quotient_samples: u64,
    pub growth_theta: f64,
    /// `ln μ` values for the growth comparison.
    pub growth_grid: Vec<f64>,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            preset: "standard".into(),
            j_max: 12,
            j_cap: 12,
            n_check: 20,
            quotient_max_j: 8,
            quotient_samples: 10_000,
            growth_theta: 1.0,
            growth_grid: vec![1e2, 1e4, 1e6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeavisideConfig {
    pub weights: Vec<WeightSpec>,
    /// ε schedule `2^{-k}` for `k` in `[k_from, k_to]`.
    pub k_from: i32,
    pub k_to: i32,
}

impl Default for HeavisideConfig {
    fn default() -> Self {
        HeavisideConfig {
            weights: vec![
                WeightSpec::PowerLaw { theta: 0.25 },
                WeightSpec::PowerLaw { theta: 0.5 },
                WeightSpec::PowerLaw { theta: 0.75 },
                WeightSpec::Linear,
                WeightSpec::PowerLaw { theta: 1.5 },
                WeightSpec::Counterexample {
                    sequence: nonlocal_core::weight::SequenceKind::Standard,
                },
            ],
            k_from: 6,
            k_to: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocVsGlobConfig {
    pub ells: Vec<f64>,
    pub randomized_count: u32,
    pub rel_tol: f64,
    /// δ schedule `2^{-k}` for `k` in `[k_from, k_to]`.
    pub k_from: i32,
    pub k_to: i32,
}

impl Default for LocVsGlobConfig {
    fn default() -> Self {
        LocVsGlobConfig {
            ells: vec![0.1, 0.25, 0.5, 0.9],
            randomized_count: 20,
            rel_tol: 0.02,
            k_from: 8,
            k_to: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GammaConfig {
    /// `centered_heaviside`, `staircase` or `constant`.
    pub presets: Vec<String>,
    pub weights: Vec<WeightSpec>,
    pub mu_list: Vec<f64>,
    pub delta: f64,
    /// `J` per preset; missing entries use the preset's own value.
    pub j: Option<f64>,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            presets: vec!["centered_heaviside".into(), "staircase".into(), "constant".into()],
            weights: vec![WeightSpec::PowerLaw { theta: 0.5 }, WeightSpec::Linear],
            mu_list: vec![10.0, 50.0, 100.0],
            delta: 1e-3,
            j: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OlimpicoConfig {
    pub count: u64,
    pub m_max: usize,
}

impl Default for OlimpicoConfig {
    fn default() -> Self {
        OlimpicoConfig {
            count: 100_000,
            m_max: 10,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.quadrature.validate()?;
        if self.olimpico.count == 0 {
            return Err(CliError::Config("olimpico.count must be at least 1".into()));
        }
        if self.olimpico.m_max < 2 {
            return Err(CliError::Config("olimpico.m_max must be at least 2".into()));
        }
        if let Some(bad) = self.locvsglob.ells.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(CliError::Config(format!("ℓ = {bad} is outside (0, 1)")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_schema_and_fields() {
        assert!(ExperimentConfig::parse("schema_version = 2").is_err());
        assert!(ExperimentConfig::parse("sed = 3").is_err());
        assert!(ExperimentConfig::parse("[locvsglob]\nells = [1.5]").is_err());
    }

    #[test]
    fn partial_sections() {
        let cfg = ExperimentConfig::parse("seed = 9\n[counterexample]\npreset = \"small\"\nj_max = 6\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.counterexample.preset, "small");
        assert_eq!(cfg.counterexample.j_cap, 12);
    }

    #[test]
    fn weights_from_toml() {
        let cfg = ExperimentConfig::parse("[heaviside]\nweights = [{ family = \"power_law\", theta = 0.5 }, { family = \"linear\" }]\n").unwrap();
        assert_eq!(cfg.heaviside.weights.len(), 2);
    }
}
