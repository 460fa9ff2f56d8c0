//! Seeded synthetic flight records with fully documented ground truth.
//!
//! The real scheduling-and-recovery dataset is proprietary, so desk-scale
//! verification runs on records from this generator. Every relationship is
//! spelled out below and exposed through [`ground_truth_turnaround`] /
//! [`ground_truth_block`], which makes a noiseless run an exact oracle for
//! the learning pipeline. None of it claims fidelity to real airline
//! dynamics.
//!
//! With `cm` = the disrupted flight's delay-code minutes (one code per
//! disrupted record, drawn uniformly from the code table; `cm` uniform on
//! the documented grid {12, 16, 28, 32, ..., 88}, so the derived classes
//! carry a real margin):
//!
//! * turnaround effect `0.15 cm`, block effect `0.25 cm`;
//! * latent arrival delay `L = 0.6 cm - 10` minutes, so some disrupted
//!   flights still arrive on time;
//! * `ACTL_TURN_MINS  = max(0, ADJST_TURN_MINS + 0.15 cm + N(0, sigma_turn))`
//! * `actl_block_mins = max(0, 22 + actl_enroute_mins + 0.25 cm + N(0, sigma_block))`
//! * `DOT_DELAY_MINS  = max(L, 0)` (0 for non-disrupted flights)
//! * `A0 = [L <= 0]`, `A14 = [L <= 14]`, hence A0 implies A14 by
//!   construction; non-disrupted flights have both set.
//!
//! Exactly `round(n_records * disruption_fraction)` records are disrupted:
//! a seeded permutation of the indices marks the first `k` as disrupted.
//! Per record the generator draws, in order: day of year, origin airport,
//! destination offset, passenger count, originator flag, adjusted turnaround
//! `U[25, 55)`, four shift percentages `U[0, 100)`, enroute wind jitter
//! `U[-3, 3)`, then for disrupted records the code index and the grid draw
//! for minutes, then the two Gaussian noises (drawn even at sigma 0).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DataError, FlightRecord, DELAY_CODE_TABLE};
use crate::rng::SplitMix64;

/// Generator parameters. `noise_sigma_*` are in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_records: usize,
    pub seed: u64,
    pub disruption_fraction: f64,
    pub noise_sigma_turn: f64,
    pub noise_sigma_block: f64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.n_records == 0 {
            return Err(DataError::Domain("n_records must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.disruption_fraction) {
            return Err(DataError::Domain(format!(
                "disruption_fraction must be in [0, 1], got {}",
                self.disruption_fraction
            )));
        }
        if self.noise_sigma_turn < 0.0 || self.noise_sigma_block < 0.0 {
            return Err(DataError::Domain("noise sigmas must be nonnegative".into()));
        }
        Ok(())
    }
}

/// A small point-to-point network: (name, latitude, longitude) in degrees.
const AIRPORTS: [(&str, f64, f64); 8] = [
    ("DAL", 32.847, -96.852),
    ("HOU", 29.646, -95.277),
    ("AUS", 30.197, -97.666),
    ("SAT", 29.534, -98.470),
    ("ELP", 31.807, -106.378),
    ("MSY", 29.993, -90.258),
    ("OKC", 35.393, -97.601),
    ("STL", 38.749, -90.370),
];

const EARTH_RADIUS_MILES: f64 = 3959.0;
/// Fixed taxi-out + taxi-in allowance folded into every block time.
const TAXI_MINUTES: f64 = 22.0;
/// Cruise pace used to tie enroute minutes to route distance (miles/minute).
const CRUISE_MILES_PER_MIN: f64 = 7.5;

/// Delay-code minutes are drawn uniformly from this grid. The hole between
/// 16 and 28 keeps the on-time class (`L <= 0`, i.e. minutes <= 16) a full
/// margin away from every late record instead of a hair's width.
const DELAY_MINUTES_GRID: [f64; 18] = [
    12.0, 16.0, 28.0, 32.0, 36.0, 40.0, 44.0, 48.0, 52.0, 56.0, 60.0, 64.0, 68.0, 72.0, 76.0, 80.0,
    84.0, 88.0,
];

fn unit_vector(lat_deg: f64, lon_deg: f64) -> [f64; 3] {
    let (lat, lon) = (lat_deg.to_radians(), lon_deg.to_radians());
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

fn great_circle_miles(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    EARTH_RADIUS_MILES * dot.clamp(-1.0, 1.0).acos()
}

/// The deterministic part of a record's turnaround: adjusted turnaround plus
/// the disruption effect. With zero noise this reproduces `ACTL_TURN_MINS`
/// exactly.
pub fn ground_truth_turnaround(r: &FlightRecord) -> f64 {
    r.adjst_turn_mins + 0.15 * r.total_delay_code_minutes()
}

/// The deterministic part of a record's block time; exact at zero noise.
pub fn ground_truth_block(r: &FlightRecord) -> f64 {
    TAXI_MINUTES + r.actl_enroute_mins + 0.25 * r.total_delay_code_minutes()
}

pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<Vec<FlightRecord>, DataError> {
    cfg.validate()?;
    let n = cfg.n_records;
    let mut rng = SplitMix64::new(cfg.seed);

    let n_disrupted = (cfg.disruption_fraction * n as f64).round() as usize;
    let mut indices: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut indices);
    let mut disrupted = vec![false; n];
    for &i in indices.iter().take(n_disrupted) {
        disrupted[i] = true;
    }

    let coords: Vec<[f64; 3]> = AIRPORTS
        .iter()
        .map(|&(_, la, lo)| unit_vector(la, lo))
        .collect();

    let mut records = Vec::with_capacity(n);
    for &is_disrupted in disrupted.iter().take(n) {
        let doy = 1 + rng.next_below(365) as u16;
        let orig = rng.next_below(8) as usize;
        let dest = (orig + 1 + rng.next_below(7) as usize) % 8;
        let onbd_ct = 50 + rng.next_below(131) as u32;
        let route_originator_flag = (rng.next_f64() < 0.3) as u8;
        let adjst_turn_mins = rng.uniform(25.0, 55.0);
        let shiftper_sched_pb = rng.uniform(0.0, 100.0);
        let shiftper_sched_gp = rng.uniform(0.0, 100.0);
        let shiftper_actl_pb = rng.uniform(0.0, 100.0);
        let shiftper_actl_gp = rng.uniform(0.0, 100.0);

        let route_dist = great_circle_miles(coords[orig], coords[dest]);
        let actl_enroute_mins = route_dist / CRUISE_MILES_PER_MIN + rng.uniform(-3.0, 3.0);

        let (delay_codes, code_minutes, latent_delay) = if is_disrupted {
            let (code, _) =
                DELAY_CODE_TABLE[rng.next_below(DELAY_CODE_TABLE.len() as u64) as usize];
            let minutes =
                DELAY_MINUTES_GRID[rng.next_below(DELAY_MINUTES_GRID.len() as u64) as usize];
            let mut codes = BTreeMap::new();
            codes.insert(code.to_string(), minutes);
            (codes, minutes, 0.6 * minutes - 10.0)
        } else {
            (BTreeMap::new(), 0.0, 0.0)
        };

        let turn_noise = rng.normal(0.0, cfg.noise_sigma_turn);
        let block_noise = rng.normal(0.0, cfg.noise_sigma_block);

        let actl_turn_mins = (adjst_turn_mins + 0.15 * code_minutes + turn_noise).max(0.0);
        let actl_block_mins =
            (TAXI_MINUTES + actl_enroute_mins + 0.25 * code_minutes + block_noise).max(0.0);

        let (dot_delay_mins, a0, a14) = if is_disrupted {
            (
                latent_delay.max(0.0),
                (latent_delay <= 0.0) as u8,
                (latent_delay <= 14.0) as u8,
            )
        } else {
            (0.0, 1, 1)
        };

        let record = FlightRecord {
            doy,
            orig_x_dir: coords[orig][0],
            orig_y_dir: coords[orig][1],
            orig_z_dir: coords[orig][2],
            dest_x_dir: coords[dest][0],
            dest_y_dir: coords[dest][1],
            dest_z_dir: coords[dest][2],
            onbd_ct,
            route_dist,
            route_originator_flag,
            delay_codes,
            adjst_turn_mins,
            shiftper_sched_pb,
            shiftper_sched_gp,
            shiftper_actl_pb,
            shiftper_actl_gp,
            dot_delay_mins,
            actl_enroute_mins,
            actl_turn_mins,
            actl_block_mins,
            a0,
            a14,
        };
        debug_assert!(record.validate().is_ok());
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{load_csv, segment, write_csv};
    use crate::metrics::rmse;

    fn config(n: usize, fraction: f64, sigma: f64) -> SyntheticConfig {
        SyntheticConfig {
            n_records: n,
            seed: 7,
            disruption_fraction: fraction,
            noise_sigma_turn: sigma,
            noise_sigma_block: sigma,
        }
    }

    #[test]
    fn zero_disruption_means_empty_disrupted_buckets() {
        let records = generate_synthetic(&config(500, 0.0, 2.0)).unwrap();
        let partition = segment(&records);
        assert_eq!(partition.non_disrupted.len(), 500);
        assert!(partition.disrupted_by_role.is_empty());
        assert!(partition.quarantine.is_empty());
    }

    #[test]
    fn disruption_count_follows_the_rounding_rule() {
        let records = generate_synthetic(&config(1000, 0.3, 1.0)).unwrap();
        let n_disrupted = records.iter().filter(|r| !r.is_non_disrupted()).count();
        assert_eq!(n_disrupted, 300);
    }

    #[test]
    fn every_record_validates_and_satisfies_a0_implies_a14() {
        let records = generate_synthetic(&config(2000, 0.4, 3.0)).unwrap();
        for r in &records {
            r.validate().unwrap();
            assert!(r.a0 == 0 || r.a14 == 1);
        }
        // Disrupted records should include both on-time and late arrivals so
        // classifier training sees both classes.
        let disrupted: Vec<_> = records.iter().filter(|r| !r.is_non_disrupted()).collect();
        assert!(disrupted.iter().any(|r| r.a0 == 1));
        assert!(disrupted.iter().any(|r| r.a0 == 0));
        assert!(disrupted.iter().any(|r| r.a14 == 1));
        assert!(disrupted.iter().any(|r| r.a14 == 0));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_synthetic(&config(200, 0.25, 2.0)).unwrap();
        let b = generate_synthetic(&config(200, 0.25, 2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_round_trip_preserves_every_generated_record() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("synth.csv");
        let records = generate_synthetic(&config(300, 0.35, 2.5)).unwrap();
        write_csv(&records, &path).unwrap();
        let loaded = load_csv(&path, true).unwrap();
        assert_eq!(loaded.records, records);
        assert!(loaded.skipped.is_empty());
    }

    #[test]
    fn noiseless_ground_truth_is_an_exact_oracle() {
        let records = generate_synthetic(&config(500, 0.5, 0.0)).unwrap();
        let turn_pred: Vec<f64> = records.iter().map(ground_truth_turnaround).collect();
        let turn_actual: Vec<f64> = records.iter().map(|r| r.actl_turn_mins).collect();
        assert!(rmse(&turn_pred, &turn_actual).unwrap() < 0.1);

        let block_pred: Vec<f64> = records.iter().map(ground_truth_block).collect();
        let block_actual: Vec<f64> = records.iter().map(|r| r.actl_block_mins).collect();
        assert!(rmse(&block_pred, &block_actual).unwrap() < 0.1);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(generate_synthetic(&config(0, 0.5, 1.0)).is_err());
        assert!(generate_synthetic(&config(10, 1.5, 1.0)).is_err());
        assert!(generate_synthetic(&SyntheticConfig {
            n_records: 10,
            seed: 1,
            disruption_fraction: 0.5,
            noise_sigma_turn: -1.0,
            noise_sigma_block: 0.0,
        })
        .is_err());
    }
}
