//! Seeded train/test partitioning.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::rng::SplitMix64;

/// Split parameters. Defaults follow the development recipe: 70% training,
/// seed 42.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: 42,
        }
    }
}

/// Partition `records` into (train, test).
///
/// The permutation is [`SplitMix64`]-seeded Fisher-Yates over the indices,
/// cut at `round(train_fraction * n)` (half away from zero). The result is a
/// true partition - every record appears exactly once across the two halves -
/// and is deterministic for a fixed `(seed, input order)`.
pub fn split_dataset<T: Clone>(
    records: &[T],
    spec: &SplitSpec,
) -> Result<(Vec<T>, Vec<T>), TrainError> {
    if records.is_empty() {
        return Err(TrainError::Domain(
            "split_dataset requires a nonempty input".into(),
        ));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(TrainError::Domain(format!(
            "train_fraction must be in (0, 1), got {}",
            spec.train_fraction
        )));
    }

    let n = records.len();
    let mut indices: Vec<usize> = (0..n).collect();
    SplitMix64::new(spec.seed).shuffle(&mut indices);

    let cut = ((spec.train_fraction * n as f64).round() as usize).min(n);
    let train = indices[..cut].iter().map(|&i| records[i].clone()).collect();
    let test = indices[cut..].iter().map(|&i| records[i].clone()).collect();
    Ok((train, test))
}
