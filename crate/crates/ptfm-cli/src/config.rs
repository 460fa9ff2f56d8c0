//! Run configuration: a single TOML document that, together with its seeds,
//! fully determines a run.
//!
//! ```toml
//! [data]
//! source = "synthetic"        # or "csv"
//! # csv_path = "flights.csv"  # required when source = "csv"
//! n_records = 20000           # synthetic parameters
//! seed = 7
//! disruption_fraction = 0.3
//! noise_sigma_turn = 3.0
//! noise_sigma_block = 4.0
//!
//! [run]
//! role = "Weather"
//! output_dir = "out"
//! report_formats = ["json", "text"]
//!
//! [split]
//! train_fraction = 0.7
//! seed = 42
//!
//! [train]
//! epochs = 2000
//! seed = 42
//! learning_rate = 0.001
//! optimizer = "adam"          # or "delta_rule"
//! plateau_window = 500
//! huber_delta = 1.0
//! ```
//!
//! Every key has the default shown above except `data.source`, `run.role`,
//! and `run.output_dir`, which must be present.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use ptfm_core::data::{FunctionalRole, SyntheticConfig};
use ptfm_core::nn::LossKind;
use ptfm_core::train::{OptimizerKind, SplitSpec, TrainConfig};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: RawData,
    run: RawRun,
    #[serde(default)]
    split: RawSplit,
    #[serde(default)]
    train: RawTrain,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    source: String,
    csv_path: Option<PathBuf>,
    #[serde(default = "defaults::n_records")]
    n_records: usize,
    #[serde(default = "defaults::data_seed")]
    seed: u64,
    #[serde(default = "defaults::disruption_fraction")]
    disruption_fraction: f64,
    #[serde(default = "defaults::noise_sigma_turn")]
    noise_sigma_turn: f64,
    #[serde(default = "defaults::noise_sigma_block")]
    noise_sigma_block: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    role: String,
    output_dir: PathBuf,
    #[serde(default = "defaults::report_formats")]
    report_formats: Vec<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RawSplit {
    train_fraction: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RawTrain {
    epochs: Option<usize>,
    seed: Option<u64>,
    learning_rate: Option<f64>,
    optimizer: Option<String>,
    plateau_window: Option<usize>,
    huber_delta: Option<f64>,
}

mod defaults {
    pub fn n_records() -> usize {
        20_000
    }
    pub fn data_seed() -> u64 {
        7
    }
    pub fn disruption_fraction() -> f64 {
        0.3
    }
    pub fn noise_sigma_turn() -> f64 {
        3.0
    }
    pub fn noise_sigma_block() -> f64 {
        4.0
    }
    pub fn report_formats() -> Vec<String> {
        vec!["json".into(), "text".into()]
    }
}

/// Where records come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticConfig),
}

#[derive(Debug, Clone, Copy)]
pub struct ReportFormats {
    pub json: bool,
    pub text: bool,
}

/// Validated, typed run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: DataSource,
    pub role: FunctionalRole,
    pub output_dir: PathBuf,
    pub report_formats: ReportFormats,
    pub split: SplitSpec,
    pub train: TrainConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;

        let data = match raw.data.source.as_str() {
            "csv" => {
                let path = raw
                    .data
                    .csv_path
                    .clone()
                    .context("data.source = \"csv\" requires data.csv_path")?;
                DataSource::Csv(path)
            }
            "synthetic" => DataSource::Synthetic(SyntheticConfig {
                n_records: raw.data.n_records,
                seed: raw.data.seed,
                disruption_fraction: raw.data.disruption_fraction,
                noise_sigma_turn: raw.data.noise_sigma_turn,
                noise_sigma_block: raw.data.noise_sigma_block,
            }),
            other => bail!("data.source must be \"csv\" or \"synthetic\", got {other:?}"),
        };

        let role: FunctionalRole = raw.run.role.parse().map_err(anyhow::Error::msg)?;

        let mut formats = ReportFormats {
            json: false,
            text: false,
        };
        for f in &raw.run.report_formats {
            match f.as_str() {
                "json" => formats.json = true,
                "text" => formats.text = true,
                other => bail!("unknown report format {other:?} (expected json or text)"),
            }
        }

        let split_defaults = SplitSpec::default();
        let split = SplitSpec {
            train_fraction: raw
                .split
                .train_fraction
                .unwrap_or(split_defaults.train_fraction),
            seed: raw.split.seed.unwrap_or(split_defaults.seed),
        };

        let optimizer = match raw.train.optimizer.as_deref() {
            None | Some("adam") => OptimizerKind::default(),
            Some("delta_rule") => OptimizerKind::DeltaRule,
            Some(other) => bail!("train.optimizer must be adam or delta_rule, got {other:?}"),
        };
        let train_defaults = TrainConfig::default();
        let train = TrainConfig {
            epochs: raw.train.epochs.unwrap_or(train_defaults.epochs),
            seed: raw.train.seed.unwrap_or(train_defaults.seed),
            learning_rate: raw
                .train
                .learning_rate
                .unwrap_or(train_defaults.learning_rate),
            loss: LossKind::Huber {
                delta: raw.train.huber_delta.unwrap_or(1.0),
            },
            optimizer,
            plateau_window: raw
                .train
                .plateau_window
                .unwrap_or(train_defaults.plateau_window),
        };

        if train.epochs == 0 {
            bail!("train.epochs must be at least 1");
        }
        Ok(RunConfig {
            data,
            role,
            output_dir: raw.run.output_dir,
            report_formats: formats,
            split,
            train,
        })
    }

    /// Seed recorded as data provenance, when the data is generated.
    pub fn data_seed(&self) -> Option<u64> {
        match &self.data {
            DataSource::Synthetic(cfg) => Some(cfg.seed),
            DataSource::Csv(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[data]
source = "synthetic"

[run]
role = "Weather"
output_dir = "out"
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.role, FunctionalRole::Weather);
        assert_eq!(cfg.split.seed, 42);
        assert!((cfg.split.train_fraction - 0.7).abs() < 1e-15);
        assert_eq!(cfg.train.epochs, 15_000);
        assert!(cfg.report_formats.json && cfg.report_formats.text);
        match cfg.data {
            DataSource::Synthetic(s) => assert_eq!(s.n_records, 20_000),
            _ => panic!("expected synthetic source"),
        }
    }

    #[test]
    fn csv_source_requires_a_path() {
        let text = MINIMAL.replace("synthetic", "csv");
        assert!(RunConfig::parse(&text).is_err());
        let with_path = text.replace("source = \"csv\"", "source = \"csv\"\ncsv_path = \"f.csv\"");
        let cfg = RunConfig::parse(&with_path).unwrap();
        assert!(matches!(cfg.data, DataSource::Csv(p) if p == Path::new("f.csv")));
    }

    #[test]
    fn role_names_accept_spaced_forms() {
        let text = MINIMAL.replace("Weather", "Dispatch CSC");
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.role, FunctionalRole::DispatchCsc);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[train]\nlearning_rat = 0.1\n");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn delta_rule_and_huber_delta_flow_through() {
        let text = format!("{MINIMAL}\n[train]\noptimizer = \"delta_rule\"\nhuber_delta = 2.5\n");
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.train.optimizer, OptimizerKind::DeltaRule);
        assert_eq!(cfg.train.loss, LossKind::Huber { delta: 2.5 });
    }
}
