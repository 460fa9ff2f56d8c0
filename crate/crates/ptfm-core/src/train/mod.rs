//! Model fitting: weight initialization, the full-batch training loop, and
//! the frozen-model type the rest of the pipeline consumes.

mod optimizer;
mod persist;
mod split;
mod standardize;

pub use optimizer::{adam_step, delta_rule_step, AdamState, OptimizerKind};
pub use persist::{load_model, save_model, MODEL_FORMAT_VERSION};
pub use split::{split_dataset, SplitSpec};
pub use standardize::Standardizer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::FunctionalRole;
use crate::linalg::Matrix;
use crate::nn::{backward, forward, ActivationKind, Gradients, LossKind, PerceptronNet};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{0}")]
    Domain(String),
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error(transparent)]
    Nn(#[from] crate::nn::NnError),
    #[error("model io: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid JSON (truncated or corrupted): {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("model format version mismatch: expected {expected}, found {found}")]
    Version {
        expected: &'static str,
        found: String,
    },
    #[error("model file shape inconsistency: {0}")]
    ShapeInconsistent(String),
}

/// Which of the six networks a trained model is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelPhase {
    Tactical,
    OperationalA0,
    OperationalA14,
    Strategic,
}

/// Which data regime the model was fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataRegime {
    NonDisrupted,
    Disrupted,
}

impl DataRegime {
    pub fn name(self) -> &'static str {
        match self {
            DataRegime::NonDisrupted => "non_disrupted",
            DataRegime::Disrupted => "disrupted",
        }
    }
}

/// Every seed that went into producing a model, so a run is reconstructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SeedRecord {
    /// Weight-initialization seed.
    pub init: u64,
    /// Dataset split seed, when a split preceded training.
    pub split: Option<u64>,
    /// Synthetic-data seed, when the training data was generated.
    pub data: Option<u64>,
}

/// Condensed view of a loss history; this is what model files persist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSummary {
    pub epochs_run: usize,
    pub n_train: usize,
    pub first_epoch_loss: f64,
    pub final_epoch_loss: f64,
    pub min_loss: f64,
    /// Mean loss over the first and last `window` epochs; the plateau check
    /// ("did the error goal settle?") is reportable from these without ever
    /// triggering an early stop.
    pub window: usize,
    pub first_window_mean: f64,
    pub final_window_mean: f64,
}

impl LossSummary {
    pub fn from_history(history: &[f64], n_train: usize, window: usize) -> Self {
        let epochs = history.len();
        let w = window.max(1).min(epochs.max(1));
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
        Self {
            epochs_run: epochs,
            n_train,
            first_epoch_loss: history.first().copied().unwrap_or(f64::NAN),
            final_epoch_loss: history.last().copied().unwrap_or(f64::NAN),
            min_loss: history.iter().copied().fold(f64::INFINITY, f64::min),
            window: w,
            first_window_mean: mean(&history[..w.min(epochs)]),
            final_window_mean: mean(&history[epochs.saturating_sub(w)..]),
        }
    }
}

/// Training hyperparameters. One optimizer step per full-batch epoch; no
/// minibatching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub loss: LossKind,
    pub optimizer: OptimizerKind,
    /// Width of the loss-history windows summarized for plateau reporting.
    pub plateau_window: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 15_000,
            seed: 42,
            learning_rate: 1e-3,
            loss: LossKind::huber_default(),
            optimizer: OptimizerKind::default(),
            plateau_window: 500,
        }
    }
}

/// Identity of a model within the six-network ensemble, supplied by the
/// caller of [`train`] and carried through persistence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub phase: ModelPhase,
    pub regime: DataRegime,
    pub role: FunctionalRole,
    /// Fitted on this model's own training regime; inputs to the network are
    /// always standardized through it.
    pub standardizer: Standardizer,
    pub seeds: SeedRecord,
}

/// A frozen network plus everything needed to use and audit it.
///
/// `loss_history` holds one mean loss per epoch for freshly trained models;
/// models loaded from disk carry only the persisted [`LossSummary`] (the file
/// format stores the summary, not the full curve) and an empty history.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub net: PerceptronNet,
    pub standardizer: Standardizer,
    pub loss_history: Vec<f64>,
    pub summary: LossSummary,
    pub phase: ModelPhase,
    pub regime: DataRegime,
    pub role: FunctionalRole,
    pub seeds: SeedRecord,
}

impl TrainedModel {
    /// Standardize a raw feature row and run the network.
    pub fn predict(&self, raw_row: &[f64]) -> Result<f64, TrainError> {
        let z = self.standardizer.apply(raw_row)?;
        let (out, _) = forward(&self.net, &z)?;
        Ok(out[0])
    }
}

/// Glorot-uniform initialization: each layer's weights are drawn uniformly
/// from +/- sqrt(6 / (fan_in + fan_out)) using the documented SplitMix64
/// stream (W1 row-major first, then W2 row-major); biases start at zero.
pub fn init_weights(
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    hidden: ActivationKind,
    seed: u64,
) -> PerceptronNet {
    let mut rng = SplitMix64::new(seed);
    let mut net = PerceptronNet::zeros(n_in, n_hidden, n_out, hidden);
    let bound1 = (6.0 / (n_in + n_hidden) as f64).sqrt();
    for v in net.w1.iter_mut() {
        *v = rng.uniform(-bound1, bound1);
    }
    let bound2 = (6.0 / (n_hidden + n_out) as f64).sqrt();
    for v in net.w2.iter_mut() {
        *v = rng.uniform(-bound2, bound2);
    }
    net
}

/// Fit a network by full-batch gradient descent.
///
/// `inputs` must already be standardized (callers fit the standardizer that
/// ends up in `meta`). Each epoch runs forward over every row, averages the
/// loss, backpropagates the exact gradient of that mean, and takes one
/// optimizer step. Aborts with [`TrainError::Diverged`] the moment the mean
/// loss stops being finite.
pub fn train(
    inputs: &Matrix,
    targets: &Matrix,
    topology: (usize, usize, usize, ActivationKind),
    cfg: &TrainConfig,
    meta: ModelMeta,
) -> Result<TrainedModel, TrainError> {
    let (n_in, n_hidden, n_out, hidden) = topology;
    if inputs.rows() == 0 {
        return Err(TrainError::Domain("train requires at least one row".into()));
    }
    if inputs.rows() != targets.rows() {
        return Err(TrainError::Shape {
            context: "train targets",
            expected: inputs.rows(),
            actual: targets.rows(),
        });
    }
    if inputs.cols() != n_in {
        return Err(TrainError::Shape {
            context: "train inputs",
            expected: n_in,
            actual: inputs.cols(),
        });
    }
    if targets.cols() != n_out {
        return Err(TrainError::Shape {
            context: "train target width",
            expected: n_out,
            actual: targets.cols(),
        });
    }
    if cfg.epochs == 0 {
        return Err(TrainError::Domain("epochs must be >= 1".into()));
    }
    if meta.standardizer.n_features() != n_in {
        return Err(TrainError::Shape {
            context: "model standardizer",
            expected: n_in,
            actual: meta.standardizer.n_features(),
        });
    }

    let n_rows = inputs.rows();
    let scale = 1.0 / n_rows as f64;
    let mut net = init_weights(n_in, n_hidden, n_out, hidden, cfg.seed);
    let mut adam = match cfg.optimizer {
        OptimizerKind::Adam {
            beta1,
            beta2,
            epsilon,
        } => Some(AdamState::new(&net, cfg.learning_rate).with_betas(beta1, beta2, epsilon)),
        OptimizerKind::DeltaRule => None,
    };

    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut total_loss = 0.0;
        let mut grads = Gradients::zeros_like(&net);
        for r in 0..n_rows {
            let (out, cache) = forward(&net, inputs.row(r))?;
            let (loss, dloss) = cfg.loss.evaluate(&out, targets.row(r))?;
            total_loss += loss;
            let upstream: Vec<f64> = dloss.iter().map(|g| g * scale).collect();
            let sample_grads = backward(&net, &cache, &upstream)?;
            grads.accumulate(&sample_grads);
        }
        let mean_loss = total_loss * scale;
        if !mean_loss.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
        loss_history.push(mean_loss);

        match adam.take() {
            Some(state) => {
                let (next, state) = adam_step(&net, &grads, state);
                net = next;
                adam = Some(state);
            }
            None => {
                net = delta_rule_step(&net, &grads, cfg.learning_rate)?;
            }
        }
    }

    let summary = LossSummary::from_history(&loss_history, n_rows, cfg.plateau_window);
    Ok(TrainedModel {
        net,
        standardizer: meta.standardizer,
        loss_history,
        summary,
        phase: meta.phase,
        regime: meta.regime,
        role: meta.role,
        seeds: meta.seeds,
    })
}
