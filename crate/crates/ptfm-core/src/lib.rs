//! Estimators for airline disruption management built from six independently
//! trained single-hidden-layer networks and a parallel-ensemble fusion rule.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`data`] — the flight-record schema, CSV ingestion, disrupted/non-disrupted
//!    segmentation by functional role, per-phase feature wiring, and a seeded
//!    synthetic generator with documented ground truth.
//! 2. [`nn`] — network representation, activations, losses, forward/backward
//!    passes, and a finite-difference gradient checker.
//! 3. [`train`] — dataset splitting, feature standardization, weight
//!    initialization, delta-rule and Adam optimizers, the full-batch training
//!    loop, and versioned model persistence.
//! 4. [`metrics`] — RMSE, confusion counts, recall/fallout, ROC curves,
//!    trapezoidal AUC, and the symmetric percent difference.
//! 5. [`ensemble`] — bundles the six models per functional role, classifies
//!    on-time arrival, applies the sum-selection rule, and emits fused
//!    turnaround/block-time estimates with tactical and strategic delay.
//!
//! Everything random flows through one documented generator ([`rng::SplitMix64`])
//! so a run is reproducible from its seeds alone.
//!
//! The fusion rule end to end, with members pinned to fixed outputs:
//!
//! ```
//! use ptfm_core::data::{generate_synthetic, FunctionalRole, SyntheticConfig};
//! use ptfm_core::ensemble::{estimate, EnsembleBundle};
//!
//! // Members that always predict 30.03/38.37 turnaround and 92.02/93.61
//! // block minutes for the two regimes, and call the flight late twice.
//! let bundle = EnsembleBundle::with_constant_outputs(
//!     FunctionalRole::Weather,
//!     30.03, 38.37, 92.02, 93.61, -9.0, -9.0,
//! );
//! let record = generate_synthetic(&SyntheticConfig {
//!     n_records: 1,
//!     seed: 11,
//!     disruption_fraction: 1.0,
//!     noise_sigma_turn: 0.0,
//!     noise_sigma_block: 0.0,
//! })
//! .unwrap()
//! .remove(0);
//!
//! let est = estimate(&bundle, &record).unwrap();
//! assert_eq!(est.s, 0); // both classifiers said "late"
//! assert_eq!(est.turnaround_est, 38.37); // disrupted-regime prediction
//! assert!((est.tactical_delay_est - 8.34).abs() < 1e-9);
//! assert!((est.strategic_delay_est - 1.59).abs() < 1e-9);
//! ```

pub mod data;
pub mod ensemble;
pub mod linalg;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod train;
