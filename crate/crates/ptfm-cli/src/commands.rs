//! Subcommand implementations. Data goes to files or stdout; diagnostics go
//! to stderr; nothing here embeds timestamps or machine paths in artifacts,
//! so identical configs reproduce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use ptfm_core::data::{
    generate_synthetic, load_csv, segment, write_csv, DatasetPartition, FlightRecord,
};
use ptfm_core::ensemble::{
    estimate, evaluate_bundle, load_bundle, save_bundle, train_ensemble, EnsembleOptions,
    EvalReport, PtfmEstimate,
};
use ptfm_core::metrics::write_roc_csv;
use ptfm_core::train::{split_dataset, LossSummary, SeedRecord};

use crate::config::{DataSource, RunConfig};

#[derive(Debug, Clone, Copy, Default)]
pub struct CommonFlags {
    /// Reject input files at the first bad row instead of skipping.
    pub strict: bool,
    /// Train the six ensemble members concurrently (off by default; results
    /// are identical either way).
    pub parallel: bool,
}

#[derive(Debug)]
pub struct SynthOutcome {
    pub records_written: usize,
    pub seed: u64,
    pub path: PathBuf,
}

/// Generate a synthetic record CSV at `out_csv`.
pub fn cmd_synth(cfg: &RunConfig, out_csv: &Path) -> Result<SynthOutcome> {
    let synth = match &cfg.data {
        DataSource::Synthetic(s) => *s,
        DataSource::Csv(_) => bail!("synth requires data.source = \"synthetic\" in the config"),
    };
    let records = generate_synthetic(&synth)?;
    if let Some(parent) = out_csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_csv(&records, out_csv)?;
    eprintln!(
        "wrote {} records (seed {}) to {}",
        records.len(),
        synth.seed,
        out_csv.display()
    );
    Ok(SynthOutcome {
        records_written: records.len(),
        seed: synth.seed,
        path: out_csv.to_path_buf(),
    })
}

fn load_records(cfg: &RunConfig, strict: bool) -> Result<Vec<FlightRecord>> {
    match &cfg.data {
        DataSource::Synthetic(s) => Ok(generate_synthetic(s)?),
        DataSource::Csv(path) => {
            let loaded =
                load_csv(path, strict).with_context(|| format!("loading {}", path.display()))?;
            for issue in &loaded.skipped {
                eprintln!("skipping row {}: {}", issue.row, issue.reason);
            }
            if !loaded.skipped.is_empty() {
                eprintln!("skipped {} rows", loaded.skipped.len());
            }
            Ok(loaded.records)
        }
    }
}

#[derive(Serialize)]
struct TrainingLogEntry {
    member: &'static str,
    seeds: SeedRecord,
    loss: LossSummary,
}

#[derive(Serialize)]
struct TrainingLog {
    role: String,
    epochs: usize,
    train_records_non_disrupted: usize,
    train_records_disrupted: usize,
    holdout_records: usize,
    members: Vec<TrainingLogEntry>,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub bundle_dir: PathBuf,
    pub holdout_csv: PathBuf,
}

/// Load (or generate) records, segment them, split each regime 70/30, train
/// the six-model bundle on the training side, and write the bundle, its
/// manifest, a training log, and the held-out rows.
pub fn cmd_train(cfg: &RunConfig, bundle_dir: &Path, flags: CommonFlags) -> Result<TrainOutcome> {
    let records = load_records(cfg, flags.strict)?;
    let partition = segment(&records);
    if !partition.quarantine.is_empty() {
        eprintln!(
            "{} disrupted records have no role mapping and were quarantined",
            partition.quarantine.len()
        );
    }

    let disrupted = partition.disrupted_for(cfg.role);
    if disrupted.is_empty() {
        bail!("the disrupted regime has no records for {}", cfg.role);
    }
    let (nd_train, nd_test) = split_dataset(&partition.non_disrupted, &cfg.split)?;
    let (d_train, d_test) = split_dataset(disrupted, &cfg.split)?;

    let train_partition = DatasetPartition {
        non_disrupted: nd_train,
        disrupted_by_role: [(cfg.role, d_train)].into_iter().collect(),
        quarantine: Vec::new(),
    };

    let options = EnsembleOptions {
        parallel: flags.parallel,
        split_seed: Some(cfg.split.seed),
        data_seed: cfg.data_seed(),
    };
    let bundle = train_ensemble(&train_partition, cfg.role, &cfg.train, &options)?;
    save_bundle(&bundle, bundle_dir)?;

    // Held-out rows, non-disrupted first, for a later `eval` run.
    let holdout_csv = bundle_dir.join("holdout.csv");
    let holdout: Vec<FlightRecord> = nd_test.into_iter().chain(d_test).collect();
    write_csv(&holdout, &holdout_csv)?;

    let log = TrainingLog {
        role: cfg.role.to_string(),
        epochs: cfg.train.epochs,
        train_records_non_disrupted: train_partition.non_disrupted.len(),
        train_records_disrupted: train_partition.disrupted_for(cfg.role).len(),
        holdout_records: holdout.len(),
        members: bundle
            .members()
            .into_iter()
            .map(|(member, model)| TrainingLogEntry {
                member,
                seeds: model.seeds,
                loss: model.summary.clone(),
            })
            .collect(),
    };
    fs::write(
        bundle_dir.join("training_log.json"),
        serde_json::to_string_pretty(&log)?,
    )?;

    eprintln!(
        "trained 6 models for {} ({} non-disrupted + {} disrupted training rows) into {}",
        cfg.role,
        log.train_records_non_disrupted,
        log.train_records_disrupted,
        bundle_dir.display()
    );
    Ok(TrainOutcome {
        bundle_dir: bundle_dir.to_path_buf(),
        holdout_csv,
    })
}

pub struct EvalOutcome {
    pub report: EvalReport,
    pub files: Vec<PathBuf>,
}

/// Score a bundle against a test CSV and emit the report artifacts.
pub fn cmd_eval(
    cfg: &RunConfig,
    bundle_dir: &Path,
    test_csv: &Path,
    flags: CommonFlags,
) -> Result<EvalOutcome> {
    let bundle = load_bundle(bundle_dir)?;
    let loaded = load_csv(test_csv, flags.strict)?;
    for issue in &loaded.skipped {
        eprintln!("skipping row {}: {}", issue.row, issue.reason);
    }
    let partition = segment(&loaded.records);
    let report = evaluate_bundle(&bundle, &partition)?;

    fs::create_dir_all(&cfg.output_dir)?;
    let mut files = Vec::new();
    if cfg.report_formats.json {
        let path = cfg.output_dir.join("report.json");
        fs::write(&path, serde_json::to_string_pretty(&report)?)?;
        files.push(path);
    }
    if cfg.report_formats.text {
        let path = cfg.output_dir.join("report.txt");
        fs::write(&path, report.text_table())?;
        files.push(path);
    }
    for (name, eval) in [("roc_a0.csv", &report.a0), ("roc_a14.csv", &report.a14)] {
        if let Some(curve) = &eval.roc {
            let path = cfg.output_dir.join(name);
            let mut buf = Vec::new();
            write_roc_csv(curve, &mut buf)?;
            fs::write(&path, buf)?;
            files.push(path);
        }
    }

    print!("{}", report.text_table());
    Ok(EvalOutcome { report, files })
}

#[derive(Debug)]
pub struct InferOutcome {
    pub estimates_csv: PathBuf,
    pub rows_written: usize,
    pub failures: usize,
}

const ESTIMATE_COLUMNS: [&str; 14] = [
    "row",
    "a0_pred",
    "a14_pred",
    "s",
    "p_a0",
    "p_a14",
    "turnaround_nd",
    "turnaround_d",
    "block_nd",
    "block_d",
    "turnaround_est",
    "block_est",
    "tactical_delay_est",
    "strategic_delay_est",
];

fn estimate_row(row: usize, e: &PtfmEstimate) -> Vec<String> {
    vec![
        row.to_string(),
        e.a0_pred.to_string(),
        e.a14_pred.to_string(),
        e.s.to_string(),
        e.p_a0.to_string(),
        e.p_a14.to_string(),
        e.turnaround_nd.to_string(),
        e.turnaround_d.to_string(),
        e.block_nd.to_string(),
        e.block_d.to_string(),
        e.turnaround_est.to_string(),
        e.block_est.to_string(),
        e.tactical_delay_est.to_string(),
        e.strategic_delay_est.to_string(),
    ]
}

/// Run fused inference over a record CSV; one estimates row per input row,
/// order preserved. Per-row failures abort in strict mode and are skipped
/// (with a stderr warning) otherwise.
pub fn cmd_infer(
    cfg: &RunConfig,
    bundle_dir: &Path,
    records_csv: &Path,
    flags: CommonFlags,
) -> Result<InferOutcome> {
    let bundle = load_bundle(bundle_dir)?;
    let loaded = load_csv(records_csv, flags.strict)?;
    for issue in &loaded.skipped {
        eprintln!("skipping row {}: {}", issue.row, issue.reason);
    }
    if loaded.records.is_empty() {
        eprintln!("warning: no usable input rows in {}", records_csv.display());
    }

    fs::create_dir_all(&cfg.output_dir)?;
    let estimates_csv = cfg.output_dir.join("estimates.csv");
    let mut writer = csv::Writer::from_path(&estimates_csv)?;
    writer.write_record(ESTIMATE_COLUMNS)?;

    let mut rows_written = 0;
    let mut failures = 0;
    for (i, record) in loaded.records.iter().enumerate() {
        let row = i + 1;
        match estimate(&bundle, record) {
            Ok(e) => {
                writer.write_record(estimate_row(row, &e))?;
                rows_written += 1;
            }
            Err(e) if flags.strict => bail!("row {row}: {e}"),
            Err(e) => {
                eprintln!("row {row} failed: {e}");
                failures += 1;
            }
        }
    }
    writer.flush()?;
    eprintln!(
        "wrote {rows_written} estimates ({failures} failures) to {}",
        estimates_csv.display()
    );
    Ok(InferOutcome {
        estimates_csv,
        rows_written,
        failures,
    })
}
