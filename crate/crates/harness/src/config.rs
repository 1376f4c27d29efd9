//! Run configuration: a TOML file with `[algorithm]`, `[environment]` and
//! `[run]` sections, every key of which can also be set (and overridden)
//! from the command line. Unset keys fall back to the documented defaults.

use std::path::{Path, PathBuf};

use reset_core::regret::Segmentation;
use serde::Deserialize;

use crate::env::{Environment, ExpertsEnv, QuadraticEnv};
use crate::run::{Algorithm, RunConfig};
use crate::HarnessError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub algorithm: AlgorithmSection,
    #[serde(default)]
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub name: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub kind: Option<String>,
    pub horizon: Option<usize>,
    /// Segment lengths; they must sum to the horizon when both are given.
    pub segments: Option<Vec<usize>>,
    pub experts: Option<usize>,
    pub gap: Option<f64>,
    pub dim: Option<usize>,
    pub scale: Option<f64>,
    pub radius: Option<f64>,
    pub drift: Option<Vec<f64>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    /// Inclusive range `k..m`, expanded to one run per seed.
    pub seeds: Option<String>,
    pub assert_bounds: Option<bool>,
    pub out_dir: Option<String>,
}

/// Command-line overrides, all optional.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub algorithm: Option<String>,
    pub env_kind: Option<String>,
    pub horizon: Option<usize>,
    pub segments: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub seeds: Option<String>,
    pub assert_bounds: bool,
    pub out_dir: Option<PathBuf>,
}

/// A resolved request: one run per seed from a shared template.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub template: RunConfig,
    pub seeds: Vec<u64>,
    pub out_dir: Option<PathBuf>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| HarnessError::config(format!("cannot parse {}: {e}", path.display())))
}

pub fn resolve(file: FileConfig, cli: Overrides) -> Result<ResolvedConfig, HarnessError> {
    let algorithm_name = cli
        .algorithm
        .or(file.algorithm.name)
        .unwrap_or_else(|| "reset+hedge".to_string());
    let algorithm = Algorithm::parse(&algorithm_name)?;

    let kind = cli
        .env_kind
        .or(file.environment.kind)
        .unwrap_or_else(|| "experts".to_string());

    let horizon = cli.horizon.or(file.environment.horizon);
    let segments = cli.segments.or(file.environment.segments);
    let segmentation = match (horizon, segments) {
        (Some(t), None) => Segmentation::single(t).map_err(config_err)?,
        (None, Some(lengths)) => Segmentation::from_lengths(&lengths).map_err(config_err)?,
        (Some(t), Some(lengths)) => {
            let total: usize = lengths.iter().sum();
            if total != t {
                return Err(HarnessError::config(format!(
                    "segments sum to {total} but horizon is {t}"
                )));
            }
            Segmentation::from_lengths(&lengths).map_err(config_err)?
        }
        (None, None) => Segmentation::single(1024).map_err(config_err)?,
    };

    let environment = match kind.as_str() {
        "experts" => Environment::Experts(ExpertsEnv {
            experts: file.environment.experts.unwrap_or(10),
            segmentation,
            gap: file.environment.gap.unwrap_or(0.25),
        }),
        "quadratic" => {
            let count = segmentation.count();
            Environment::Quadratic(QuadraticEnv {
                dim: file.environment.dim.unwrap_or(2),
                drift: file.environment.drift.unwrap_or_else(|| vec![0.0; count]),
                segmentation,
                scale: file.environment.scale.unwrap_or(0.25),
                radius: file.environment.radius.unwrap_or(1.0),
            })
        }
        other => {
            return Err(HarnessError::config(format!(
                "unknown environment '{other}' (expected experts or quadratic)"
            )))
        }
    };

    let seeds = match cli.seeds.or(file.run.seeds) {
        Some(spec) => parse_seed_range(&spec)?,
        None => vec![cli.seed.or(file.run.seed).unwrap_or(0)],
    };

    let assert_bounds = cli.assert_bounds || file.run.assert_bounds.unwrap_or(false);
    let out_dir = cli.out_dir.or_else(|| file.run.out_dir.map(PathBuf::from));

    let template = RunConfig {
        algorithm,
        environment,
        seed: seeds[0],
        assert_bounds,
    };
    template.validate()?;

    Ok(ResolvedConfig {
        template,
        seeds,
        out_dir,
    })
}

fn config_err(e: reset_core::Error) -> HarnessError {
    HarnessError::config(e.to_string())
}

/// `k..m` (inclusive) or a single seed.
fn parse_seed_range(spec: &str) -> Result<Vec<u64>, HarnessError> {
    let bad = || HarnessError::config(format!("cannot parse seed range '{spec}' (want k..m)"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        let single: u64 = spec.trim().parse().map_err(|_| bad())?;
        Ok(vec![single])
    }
}
