//! The multi-phase inference engine: six networks per functional role, the
//! on-time classifiers, and the sum-selection (bagging) rule that fuses
//! regime-specific regression predictions into turnaround/block-time
//! estimates with tactical and strategic delay.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    delay_code_columns, feature_matrix_with_code_columns, target_vector, AdmPhase, DataError,
    DatasetPartition, FlightRecord, FunctionalRole, TargetKind,
};
use crate::linalg::Matrix;
use crate::metrics::{auc, rmse, roc_curve, MetricsError, RocCurve};
use crate::nn::{hidden_size, sigmoid, ActivationKind, LossKind, PerceptronNet};
use crate::rng::SplitMix64;
use crate::train::{
    load_model, save_model, train, DataRegime, LossSummary, ModelMeta, ModelPhase, SeedRecord,
    Standardizer, TrainConfig, TrainError, TrainedModel,
};

pub const BUNDLE_FORMAT_VERSION: &str = "ptfm-bundle/1";

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("the {regime} regime has no usable records for {role} (need at least 2)")]
    EmptyRegime {
        regime: &'static str,
        role: FunctionalRole,
    },
    #[error("component {component}: {message}")]
    Component {
        component: &'static str,
        message: String,
    },
    #[error("on-time sum must be 0, 1 or 2, got {0}")]
    BadSum(u8),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
    #[error("bundle io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bundle manifest is not valid JSON: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("bundle format version mismatch: expected {expected}, found {found}")]
    Version {
        expected: &'static str,
        found: String,
    },
    #[error("inconsistent bundle: {0}")]
    Inconsistent(String),
}

/// The six frozen models serving one functional role: turnaround and block
/// time regressors for each data regime, plus the two on-time classifiers
/// (trained on the disrupted regime only).
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleBundle {
    pub role: FunctionalRole,
    pub tactical_nd: TrainedModel,
    pub tactical_d: TrainedModel,
    pub strategic_nd: TrainedModel,
    pub strategic_d: TrainedModel,
    pub op_a0: TrainedModel,
    pub op_a14: TrainedModel,
}

/// Binary on-time calls with their underlying probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnTimeCall {
    pub a0: u8,
    pub a14: u8,
    pub p_a0: f64,
    pub p_a14: f64,
}

/// Fused output for one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtfmEstimate {
    pub a0_pred: u8,
    pub a14_pred: u8,
    /// a0_pred + a14_pred; selects the fusion branch.
    pub s: u8,
    pub p_a0: f64,
    pub p_a14: f64,
    pub turnaround_nd: f64,
    pub turnaround_d: f64,
    pub block_nd: f64,
    pub block_d: f64,
    pub turnaround_est: f64,
    pub block_est: f64,
    /// Disrupted minus non-disrupted turnaround prediction (may be negative).
    pub tactical_delay_est: f64,
    /// Disrupted minus non-disrupted block-time prediction.
    pub strategic_delay_est: f64,
}

/// Extra knobs for [`train_ensemble`] beyond the shared [`TrainConfig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnsembleOptions {
    /// Train the six members on threads. Results are bitwise identical to
    /// the sequential order because every member derives its own seed and
    /// shares nothing mutable.
    pub parallel: bool,
    /// Recorded into each model's seed provenance when known.
    pub split_seed: Option<u64>,
    pub data_seed: Option<u64>,
}

struct MemberSpec {
    component: &'static str,
    phase: AdmPhase,
    model_phase: ModelPhase,
    regime: DataRegime,
    target: TargetKind,
    loss: LossKind,
    hidden: ActivationKind,
}

/// Fixed member order; seeds fork from `TrainConfig::seed` in this order.
const MEMBERS: [MemberSpec; 6] = [
    MemberSpec {
        component: "tactical_nd",
        phase: AdmPhase::Tactical,
        model_phase: ModelPhase::Tactical,
        regime: DataRegime::NonDisrupted,
        target: TargetKind::ActlTurnMins,
        loss: LossKind::Huber { delta: 1.0 },
        hidden: ActivationKind::LogSigmoid,
    },
    MemberSpec {
        component: "tactical_d",
        phase: AdmPhase::Tactical,
        model_phase: ModelPhase::Tactical,
        regime: DataRegime::Disrupted,
        target: TargetKind::ActlTurnMins,
        loss: LossKind::Huber { delta: 1.0 },
        hidden: ActivationKind::LogSigmoid,
    },
    MemberSpec {
        component: "strategic_nd",
        phase: AdmPhase::Strategic,
        model_phase: ModelPhase::Strategic,
        regime: DataRegime::NonDisrupted,
        target: TargetKind::ActlBlockMins,
        loss: LossKind::Huber { delta: 1.0 },
        hidden: ActivationKind::LogSigmoid,
    },
    MemberSpec {
        component: "strategic_d",
        phase: AdmPhase::Strategic,
        model_phase: ModelPhase::Strategic,
        regime: DataRegime::Disrupted,
        target: TargetKind::ActlBlockMins,
        loss: LossKind::Huber { delta: 1.0 },
        hidden: ActivationKind::LogSigmoid,
    },
    MemberSpec {
        component: "op_a0",
        phase: AdmPhase::Operational,
        model_phase: ModelPhase::OperationalA0,
        regime: DataRegime::Disrupted,
        target: TargetKind::A0,
        loss: LossKind::BceWithLogit,
        hidden: ActivationKind::Softplus,
    },
    MemberSpec {
        component: "op_a14",
        phase: AdmPhase::Operational,
        model_phase: ModelPhase::OperationalA14,
        regime: DataRegime::Disrupted,
        target: TargetKind::A14,
        loss: LossKind::BceWithLogit,
        hidden: ActivationKind::Softplus,
    },
];

fn train_member(
    spec: &MemberSpec,
    records: &[FlightRecord],
    role: FunctionalRole,
    cfg: &TrainConfig,
    init_seed: u64,
    options: &EnsembleOptions,
) -> Result<TrainedModel, EnsembleError> {
    let code_columns = if spec.phase == AdmPhase::Operational {
        delay_code_columns(role)
    } else {
        Vec::new()
    };
    let (raw, _names) = feature_matrix_with_code_columns(records, spec.phase, &code_columns)?;
    let targets = target_vector(records, spec.phase, spec.target)?;
    let target_matrix = Matrix::from_fn(targets.len(), 1, |r, _| targets[r]);

    let standardizer = Standardizer::fit(&raw)?;
    let inputs = standardizer.apply_matrix(&raw)?;
    let n_in = inputs.cols();
    let n_hidden = hidden_size(n_in, 1)?;

    // Regressors keep the caller's Huber delta; classifiers are always
    // logit-BCE.
    let member_loss = match (spec.loss, cfg.loss) {
        (LossKind::Huber { .. }, LossKind::Huber { delta }) => LossKind::Huber { delta },
        (loss, _) => loss,
    };
    let member_cfg = TrainConfig {
        loss: member_loss,
        seed: init_seed,
        ..*cfg
    };
    let meta = ModelMeta {
        phase: spec.model_phase,
        regime: spec.regime,
        role,
        standardizer,
        seeds: SeedRecord {
            init: init_seed,
            split: options.split_seed,
            data: options.data_seed,
        },
    };
    let model = train(
        &inputs,
        &target_matrix,
        (n_in, n_hidden, 1, spec.hidden),
        &member_cfg,
        meta,
    )
    .map_err(|e| EnsembleError::Component {
        component: spec.component,
        message: e.to_string(),
    })?;
    Ok(model)
}

/// Train all six members for one role from an (already training-side)
/// partition.
///
/// The shared `cfg` supplies epochs, learning rate, optimizer, and the run
/// seed; each member's loss and hidden activation are fixed by its phase
/// (Huber + log-sigmoid for the regressors, logit-BCE + softplus for the
/// classifiers), and each member trains from its own seed forked from
/// `cfg.seed` in the fixed member order, so results do not depend on
/// scheduling.
pub fn train_ensemble(
    partition: &DatasetPartition,
    role: FunctionalRole,
    cfg: &TrainConfig,
    options: &EnsembleOptions,
) -> Result<EnsembleBundle, EnsembleError> {
    if partition.non_disrupted.len() < 2 {
        return Err(EnsembleError::EmptyRegime {
            regime: "non_disrupted",
            role,
        });
    }
    let disrupted = partition.disrupted_for(role);
    if disrupted.len() < 2 {
        return Err(EnsembleError::EmptyRegime {
            regime: "disrupted",
            role,
        });
    }

    let mut seeder = SplitMix64::new(cfg.seed);
    let seeds: Vec<u64> = (0..MEMBERS.len()).map(|_| seeder.next_u64()).collect();
    let records_for = |regime: DataRegime| -> &[FlightRecord] {
        match regime {
            DataRegime::NonDisrupted => &partition.non_disrupted,
            DataRegime::Disrupted => disrupted,
        }
    };

    let mut models: Vec<Option<TrainedModel>> = (0..MEMBERS.len()).map(|_| None).collect();
    if options.parallel {
        let results: Vec<Result<TrainedModel, EnsembleError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = MEMBERS
                .iter()
                .zip(&seeds)
                .map(|(spec, &seed)| {
                    let records = records_for(spec.regime);
                    scope.spawn(move || train_member(spec, records, role, cfg, seed, options))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("member thread panicked"))
                .collect()
        });
        for (slot, result) in models.iter_mut().zip(results) {
            *slot = Some(result?);
        }
    } else {
        for (i, spec) in MEMBERS.iter().enumerate() {
            models[i] = Some(train_member(
                spec,
                records_for(spec.regime),
                role,
                cfg,
                seeds[i],
                options,
            )?);
        }
    }

    let mut taken = models.into_iter().map(|m| m.expect("all members trained"));
    Ok(EnsembleBundle {
        role,
        tactical_nd: taken.next().unwrap(),
        tactical_d: taken.next().unwrap(),
        strategic_nd: taken.next().unwrap(),
        strategic_d: taken.next().unwrap(),
        op_a0: taken.next().unwrap(),
        op_a14: taken.next().unwrap(),
    })
}

impl EnsembleBundle {
    /// A bundle whose members ignore their inputs and emit fixed values:
    /// the four regression constants and the two classifier logits. Used to
    /// replay worked examples through the real inference path and as a
    /// plumbing fixture in tests.
    pub fn with_constant_outputs(
        role: FunctionalRole,
        turn_nd: f64,
        turn_d: f64,
        block_nd: f64,
        block_d: f64,
        logit_a0: f64,
        logit_a14: f64,
    ) -> Self {
        let op_width = 13 + delay_code_columns(role).len();
        let constant_model =
            |phase: ModelPhase, regime: DataRegime, n_in: usize, value: f64| TrainedModel {
                net: PerceptronNet::constant(n_in, value),
                standardizer: Standardizer::identity(n_in),
                loss_history: vec![0.0],
                summary: LossSummary::from_history(&[0.0], 0, 1),
                phase,
                regime,
                role,
                seeds: SeedRecord::default(),
            };
        EnsembleBundle {
            role,
            tactical_nd: constant_model(
                ModelPhase::Tactical,
                DataRegime::NonDisrupted,
                11,
                turn_nd,
            ),
            tactical_d: constant_model(ModelPhase::Tactical, DataRegime::Disrupted, 11, turn_d),
            strategic_nd: constant_model(
                ModelPhase::Strategic,
                DataRegime::NonDisrupted,
                13,
                block_nd,
            ),
            strategic_d: constant_model(ModelPhase::Strategic, DataRegime::Disrupted, 13, block_d),
            op_a0: constant_model(
                ModelPhase::OperationalA0,
                DataRegime::Disrupted,
                op_width,
                logit_a0,
            ),
            op_a14: constant_model(
                ModelPhase::OperationalA14,
                DataRegime::Disrupted,
                op_width,
                logit_a14,
            ),
        }
    }

    pub fn members(&self) -> [(&'static str, &TrainedModel); 6] {
        [
            ("tactical_nd", &self.tactical_nd),
            ("tactical_d", &self.tactical_d),
            ("strategic_nd", &self.strategic_nd),
            ("strategic_d", &self.strategic_d),
            ("op_a0", &self.op_a0),
            ("op_a14", &self.op_a14),
        ]
    }
}

fn phase_row(
    record: &FlightRecord,
    phase: AdmPhase,
    role: FunctionalRole,
) -> Result<Vec<f64>, DataError> {
    let code_columns = if phase == AdmPhase::Operational {
        delay_code_columns(role)
    } else {
        Vec::new()
    };
    let (m, _) =
        feature_matrix_with_code_columns(std::slice::from_ref(record), phase, &code_columns)?;
    Ok(m.row(0).to_vec())
}

fn component_predict(
    model: &TrainedModel,
    record: &FlightRecord,
    phase: AdmPhase,
    role: FunctionalRole,
    component: &'static str,
) -> Result<f64, EnsembleError> {
    let row = phase_row(record, phase, role).map_err(|e| EnsembleError::Component {
        component,
        message: e.to_string(),
    })?;
    model.predict(&row).map_err(|e| EnsembleError::Component {
        component,
        message: e.to_string(),
    })
}

/// Run both operational classifiers on one record. Each model standardizes
/// the operational feature row with its own fitted standardizer, emits a
/// logit, and calls the flight on time when `sigmoid(logit) >= 0.5` (a logit
/// of exactly zero predicts on time).
pub fn classify_ontime(
    bundle: &EnsembleBundle,
    record: &FlightRecord,
) -> Result<OnTimeCall, EnsembleError> {
    let logit_a0 = component_predict(
        &bundle.op_a0,
        record,
        AdmPhase::Operational,
        bundle.role,
        "op_a0",
    )?;
    let logit_a14 = component_predict(
        &bundle.op_a14,
        record,
        AdmPhase::Operational,
        bundle.role,
        "op_a14",
    )?;
    let p_a0 = sigmoid(logit_a0);
    let p_a14 = sigmoid(logit_a14);
    Ok(OnTimeCall {
        a0: (p_a0 >= 0.5) as u8,
        a14: (p_a14 >= 0.5) as u8,
        p_a0,
        p_a14,
    })
}

/// The selection rule on the summed on-time indicators.
///
/// s = 0: the flight misses both marks, use the disrupted-regime
/// predictions. s = 1: average the two regimes. s = 2: use the
/// non-disrupted-regime predictions.
pub fn select_rule(
    s: u8,
    turn_nd: f64,
    turn_d: f64,
    block_nd: f64,
    block_d: f64,
) -> Result<(f64, f64), EnsembleError> {
    for v in [turn_nd, turn_d, block_nd, block_d] {
        if !v.is_finite() {
            return Err(EnsembleError::Domain(format!(
                "component predictions must be finite, got {v}"
            )));
        }
    }
    match s {
        0 => Ok((turn_d, block_d)),
        1 => Ok(((turn_nd + turn_d) / 2.0, (block_nd + block_d) / 2.0)),
        2 => Ok((turn_nd, block_nd)),
        other => Err(EnsembleError::BadSum(other)),
    }
}

/// Full multi-phase inference for one record: classify on-time arrival, run
/// all four regression members, fuse via [`select_rule`], and difference the
/// regimes into tactical/strategic delay.
pub fn estimate(
    bundle: &EnsembleBundle,
    record: &FlightRecord,
) -> Result<PtfmEstimate, EnsembleError> {
    let call = classify_ontime(bundle, record)?;
    let turn_nd = component_predict(
        &bundle.tactical_nd,
        record,
        AdmPhase::Tactical,
        bundle.role,
        "tactical_nd",
    )?;
    let turn_d = component_predict(
        &bundle.tactical_d,
        record,
        AdmPhase::Tactical,
        bundle.role,
        "tactical_d",
    )?;
    let block_nd = component_predict(
        &bundle.strategic_nd,
        record,
        AdmPhase::Strategic,
        bundle.role,
        "strategic_nd",
    )?;
    let block_d = component_predict(
        &bundle.strategic_d,
        record,
        AdmPhase::Strategic,
        bundle.role,
        "strategic_d",
    )?;

    let s = call.a0 + call.a14;
    let (turnaround_est, block_est) = select_rule(s, turn_nd, turn_d, block_nd, block_d)?;
    Ok(PtfmEstimate {
        a0_pred: call.a0,
        a14_pred: call.a14,
        s,
        p_a0: call.p_a0,
        p_a14: call.p_a14,
        turnaround_nd: turn_nd,
        turnaround_d: turn_d,
        block_nd,
        block_d,
        turnaround_est,
        block_est,
        tactical_delay_est: turn_d - turn_nd,
        strategic_delay_est: block_d - block_nd,
    })
}

/// One classifier's evaluation: AUC when both classes are present in the
/// test labels, otherwise a flag explaining why it is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierEval {
    pub auc: Option<f64>,
    pub undefined_reason: Option<String>,
    pub roc: Option<RocCurve>,
}

/// Bundle evaluation, shaped after the per-role model performance summary:
/// sample counts, block-time and turnaround RMSE, and the two AUCs, plus the
/// regime-level detail behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub role: FunctionalRole,
    /// Disrupted-regime training rows (recorded at training time).
    pub training_samples: usize,
    /// Disrupted-regime test rows scored by this evaluation.
    pub test_samples: usize,
    pub non_disrupted_test_samples: usize,
    pub turnaround_rmse_non_disrupted: f64,
    pub turnaround_rmse_disrupted: f64,
    pub block_rmse_non_disrupted: f64,
    pub block_rmse_disrupted: f64,
    pub a0: ClassifierEval,
    pub a14: ClassifierEval,
}

pub const REPORT_HEADERS: [&str; 7] = [
    "Functional Role",
    "Training Data Samples",
    "Test Data Samples",
    "Block Time RMSE (mins)",
    "Turnaround RMSE (mins)",
    "A0 AUC",
    "A14 AUC",
];

impl EvalReport {
    /// The summary-row values under [`REPORT_HEADERS`]; RMSE columns report
    /// the disrupted-regime (role-specific) models.
    pub fn table_row(&self) -> [String; 7] {
        let auc_cell = |c: &ClassifierEval| match c.auc {
            Some(v) => format!("{v:.4}"),
            None => "undefined".to_string(),
        };
        [
            self.role.to_string(),
            self.training_samples.to_string(),
            self.test_samples.to_string(),
            format!("{:.2}", self.block_rmse_disrupted),
            format!("{:.2}", self.turnaround_rmse_disrupted),
            auc_cell(&self.a0),
            auc_cell(&self.a14),
        ]
    }

    /// Aligned-column text rendering of the summary row.
    pub fn text_table(&self) -> String {
        let row = self.table_row();
        let widths: Vec<usize> = REPORT_HEADERS
            .iter()
            .zip(&row)
            .map(|(h, v)| h.len().max(v.len()))
            .collect();
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let headers: Vec<String> = REPORT_HEADERS.iter().map(|s| s.to_string()).collect();
        let mut out = line(&headers);
        out.push('\n');
        out.push_str(&line(&row));
        out.push('\n');
        out
    }
}

fn regression_eval(
    model: &TrainedModel,
    records: &[FlightRecord],
    phase: AdmPhase,
    role: FunctionalRole,
    target: TargetKind,
    component: &'static str,
) -> Result<f64, EnsembleError> {
    let mut predicted = Vec::with_capacity(records.len());
    for r in records {
        predicted.push(component_predict(model, r, phase, role, component)?);
    }
    let actual = target_vector(records, phase, target)?;
    Ok(rmse(&predicted, &actual)?)
}

fn classifier_eval(
    model: &TrainedModel,
    records: &[FlightRecord],
    role: FunctionalRole,
    target: TargetKind,
    component: &'static str,
) -> Result<ClassifierEval, EnsembleError> {
    let mut scores = Vec::with_capacity(records.len());
    for r in records {
        let logit = component_predict(model, r, AdmPhase::Operational, role, component)?;
        scores.push(sigmoid(logit));
    }
    let labels = target_vector(records, AdmPhase::Operational, target)?;
    match roc_curve(&scores, &labels) {
        Ok(curve) => Ok(ClassifierEval {
            auc: Some(auc(&curve)),
            undefined_reason: None,
            roc: Some(curve),
        }),
        Err(e @ MetricsError::SingleClass { .. }) => Ok(ClassifierEval {
            auc: None,
            undefined_reason: Some(e.to_string()),
            roc: None,
        }),
        Err(other) => Err(other.into()),
    }
}

/// Score a frozen bundle against a test partition: RMSE for each regression
/// member on its own regime's test records, ROC/AUC for both classifiers on
/// the disrupted test records.
pub fn evaluate_bundle(
    bundle: &EnsembleBundle,
    test: &DatasetPartition,
) -> Result<EvalReport, EnsembleError> {
    let role = bundle.role;
    if test.non_disrupted.is_empty() {
        return Err(EnsembleError::EmptyRegime {
            regime: "non_disrupted",
            role,
        });
    }
    let disrupted = test.disrupted_for(role);
    if disrupted.is_empty() {
        return Err(EnsembleError::EmptyRegime {
            regime: "disrupted",
            role,
        });
    }

    Ok(EvalReport {
        role,
        training_samples: bundle.tactical_d.summary.n_train,
        test_samples: disrupted.len(),
        non_disrupted_test_samples: test.non_disrupted.len(),
        turnaround_rmse_non_disrupted: regression_eval(
            &bundle.tactical_nd,
            &test.non_disrupted,
            AdmPhase::Tactical,
            role,
            TargetKind::ActlTurnMins,
            "tactical_nd",
        )?,
        turnaround_rmse_disrupted: regression_eval(
            &bundle.tactical_d,
            disrupted,
            AdmPhase::Tactical,
            role,
            TargetKind::ActlTurnMins,
            "tactical_d",
        )?,
        block_rmse_non_disrupted: regression_eval(
            &bundle.strategic_nd,
            &test.non_disrupted,
            AdmPhase::Strategic,
            role,
            TargetKind::ActlBlockMins,
            "strategic_nd",
        )?,
        block_rmse_disrupted: regression_eval(
            &bundle.strategic_d,
            disrupted,
            AdmPhase::Strategic,
            role,
            TargetKind::ActlBlockMins,
            "strategic_d",
        )?,
        a0: classifier_eval(&bundle.op_a0, disrupted, role, TargetKind::A0, "op_a0")?,
        a14: classifier_eval(&bundle.op_a14, disrupted, role, TargetKind::A14, "op_a14")?,
    })
}

#[derive(Serialize, Deserialize)]
struct BundleManifest {
    format_version: String,
    role: FunctionalRole,
    files: BTreeMap<String, String>,
}

/// Write the six model files plus `manifest.json` into `dir` (created if
/// missing).
pub fn save_bundle(bundle: &EnsembleBundle, dir: &Path) -> Result<(), EnsembleError> {
    fs::create_dir_all(dir)?;
    let mut files = BTreeMap::new();
    for (name, model) in bundle.members() {
        let file_name = format!("{name}.json");
        save_model(model, &dir.join(&file_name))?;
        files.insert(name.to_string(), file_name);
    }
    let manifest = BundleManifest {
        format_version: BUNDLE_FORMAT_VERSION.to_string(),
        role: bundle.role,
        files,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    let tmp = dir.join("manifest.json.tmp");
    fs::write(&tmp, json.as_bytes())?;
    fs::rename(tmp, dir.join("manifest.json"))?;
    Ok(())
}

pub fn load_bundle(dir: &Path) -> Result<EnsembleBundle, EnsembleError> {
    let raw = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: BundleManifest = serde_json::from_str(&raw)?;
    if manifest.format_version != BUNDLE_FORMAT_VERSION {
        return Err(EnsembleError::Version {
            expected: BUNDLE_FORMAT_VERSION,
            found: manifest.format_version,
        });
    }

    let load_member = |name: &str| -> Result<TrainedModel, EnsembleError> {
        let file = manifest
            .files
            .get(name)
            .ok_or_else(|| EnsembleError::Inconsistent(format!("manifest lists no {name} file")))?;
        let model = load_model(&dir.join(file))?;
        if model.role != manifest.role {
            return Err(EnsembleError::Inconsistent(format!(
                "{name} was trained for {}, manifest says {}",
                model.role, manifest.role
            )));
        }
        Ok(model)
    };

    let bundle = EnsembleBundle {
        role: manifest.role,
        tactical_nd: load_member("tactical_nd")?,
        tactical_d: load_member("tactical_d")?,
        strategic_nd: load_member("strategic_nd")?,
        strategic_d: load_member("strategic_d")?,
        op_a0: load_member("op_a0")?,
        op_a14: load_member("op_a14")?,
    };

    let expectations = [
        (
            &bundle.tactical_nd,
            ModelPhase::Tactical,
            DataRegime::NonDisrupted,
            "tactical_nd",
        ),
        (
            &bundle.tactical_d,
            ModelPhase::Tactical,
            DataRegime::Disrupted,
            "tactical_d",
        ),
        (
            &bundle.strategic_nd,
            ModelPhase::Strategic,
            DataRegime::NonDisrupted,
            "strategic_nd",
        ),
        (
            &bundle.strategic_d,
            ModelPhase::Strategic,
            DataRegime::Disrupted,
            "strategic_d",
        ),
        (
            &bundle.op_a0,
            ModelPhase::OperationalA0,
            DataRegime::Disrupted,
            "op_a0",
        ),
        (
            &bundle.op_a14,
            ModelPhase::OperationalA14,
            DataRegime::Disrupted,
            "op_a14",
        ),
    ];
    for (model, phase, regime, name) in expectations {
        if model.phase != phase || model.regime != regime {
            return Err(EnsembleError::Inconsistent(format!(
                "{name} has phase {:?} / regime {:?}",
                model.phase, model.regime
            )));
        }
    }
    Ok(bundle)
}
