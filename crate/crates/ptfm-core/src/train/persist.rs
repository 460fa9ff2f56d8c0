//! Versioned JSON persistence for trained models.
//!
//! Weights round-trip bitwise because serde_json emits the shortest decimal
//! that parses back to the same 64-bit float. Files are written to a sibling
//! temp path and renamed into place, so a crashed save never leaves a
//! half-written model behind.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    DataRegime, LossSummary, ModelPhase, SeedRecord, Standardizer, TrainError, TrainedModel,
};
use crate::data::FunctionalRole;
use crate::linalg::Matrix;
use crate::nn::{ActivationKind, PerceptronNet};

pub const MODEL_FORMAT_VERSION: &str = "ptfm-model/1";

#[derive(Serialize, Deserialize)]
struct Topology {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
}

#[derive(Serialize, Deserialize)]
struct Weights {
    w1: Matrix,
    b1: Vec<f64>,
    w2: Matrix,
    b2: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: String,
    phase: ModelPhase,
    regime: DataRegime,
    role: FunctionalRole,
    topology: Topology,
    hidden_activation: ActivationKind,
    weights: Weights,
    standardizer: Standardizer,
    seeds: SeedRecord,
    loss_history_summary: LossSummary,
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), TrainError> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION.to_string(),
        phase: model.phase,
        regime: model.regime,
        role: model.role,
        topology: Topology {
            n_in: model.net.n_in,
            n_hidden: model.net.n_hidden,
            n_out: model.net.n_out,
        },
        hidden_activation: model.net.hidden_activation,
        weights: Weights {
            w1: model.net.w1.clone(),
            b1: model.net.b1.clone(),
            w2: model.net.w2.clone(),
            b2: model.net.b2.clone(),
        },
        standardizer: model.standardizer.clone(),
        seeds: model.seeds,
        loss_history_summary: model.summary.clone(),
    };
    let json = serde_json::to_string_pretty(&file)?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, json.as_bytes())?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel, TrainError> {
    let raw = fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&raw)?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(TrainError::Version {
            expected: MODEL_FORMAT_VERSION,
            found: file.format_version,
        });
    }

    let net = PerceptronNet {
        n_in: file.topology.n_in,
        n_hidden: file.topology.n_hidden,
        n_out: file.topology.n_out,
        w1: file.weights.w1,
        b1: file.weights.b1,
        w2: file.weights.w2,
        b2: file.weights.b2,
        hidden_activation: file.hidden_activation,
        output_activation: ActivationKind::Identity,
    };
    if !net.shapes_consistent() {
        return Err(TrainError::ShapeInconsistent(format!(
            "weights do not match declared topology {}-{}-{}",
            net.n_in, net.n_hidden, net.n_out
        )));
    }
    if !net.is_finite() {
        return Err(TrainError::ShapeInconsistent(
            "non-finite parameter in model file".into(),
        ));
    }
    if file.standardizer.means.len() != net.n_in
        || file.standardizer.stds.len() != net.n_in
        || file.standardizer.stds.iter().any(|&s| s <= 0.0)
    {
        return Err(TrainError::ShapeInconsistent(format!(
            "standardizer has {} features, network expects {}",
            file.standardizer.means.len(),
            net.n_in
        )));
    }

    Ok(TrainedModel {
        net,
        standardizer: file.standardizer,
        loss_history: Vec::new(),
        summary: file.loss_history_summary,
        phase: file.phase,
        regime: file.regime,
        role: file.role,
        seeds: file.seeds,
    })
}
