//! The flight-schedule-execution data model and everything that turns raw
//! records into training problems: validation, disrupted/non-disrupted
//! segmentation by functional role, and per-phase feature wiring.
//!
//! One modelling caveat is inherited from the feature wiring and flagged
//! here rather than silently accepted: `DOT_DELAY_MINS` (total arrival
//! delay) is an *input* to the operational classifiers even though it is
//! only fully known after arrival. Treat operational predictions as
//! conditional on a postulated delay figure, not as a forecast from
//! pre-departure information alone.

mod codes;
mod csv_io;
mod synthetic;

pub use codes::{delay_code_columns, role_for_code, DELAY_CODE_TABLE};
pub use csv_io::{load_csv, write_csv, CsvLoad, RowIssue, FIXED_COLUMNS};
pub use synthetic::{
    generate_synthetic, ground_truth_block, ground_truth_turnaround, SyntheticConfig,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("missing required column {column}")]
    MissingColumn { column: String },
    #[error("unexpected column {column} (not a schema feature or a DC_ code column)")]
    UnexpectedColumn { column: String },
    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: {message}")]
    Invariant { row: usize, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("target {target:?} is not legal for phase {phase:?}")]
    IllegalTarget { phase: AdmPhase, target: TargetKind },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e.to_string())
    }
}

impl From<csv::Error> for DataError {
    fn from(e: csv::Error) -> Self {
        DataError::Io(e.to_string())
    }
}

/// The eleven specialist domains of an operations control center; disrupted
/// flights are owned by exactly one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionalRole {
    CustomerHold,
    DispatchCsc,
    FlightOperations,
    FuelManagement,
    GroundOperations,
    Inflight,
    Maintenance,
    Nas,
    Security,
    Technology,
    Weather,
}

pub const ALL_ROLES: [FunctionalRole; 11] = [
    FunctionalRole::CustomerHold,
    FunctionalRole::DispatchCsc,
    FunctionalRole::FlightOperations,
    FunctionalRole::FuelManagement,
    FunctionalRole::GroundOperations,
    FunctionalRole::Inflight,
    FunctionalRole::Maintenance,
    FunctionalRole::Nas,
    FunctionalRole::Security,
    FunctionalRole::Technology,
    FunctionalRole::Weather,
];

impl FunctionalRole {
    pub fn name(self) -> &'static str {
        match self {
            FunctionalRole::CustomerHold => "Customer Hold",
            FunctionalRole::DispatchCsc => "Dispatch CSC",
            FunctionalRole::FlightOperations => "Flight Operations",
            FunctionalRole::FuelManagement => "Fuel Management",
            FunctionalRole::GroundOperations => "Ground Operations",
            FunctionalRole::Inflight => "Inflight",
            FunctionalRole::Maintenance => "Maintenance",
            FunctionalRole::Nas => "NAS",
            FunctionalRole::Security => "Security",
            FunctionalRole::Technology => "Technology",
            FunctionalRole::Weather => "Weather",
        }
    }
}

impl std::fmt::Display for FunctionalRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FunctionalRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        ALL_ROLES
            .iter()
            .find(|r| {
                let target: String = r
                    .name()
                    .chars()
                    .filter(|c| c.is_ascii_alphanumeric())
                    .collect::<String>()
                    .to_lowercase();
                target == squashed
            })
            .copied()
            .ok_or_else(|| format!("unknown functional role {s:?}"))
    }
}

/// One flight-schedule execution instance: the ten determinate aleatoric
/// identity features, the disruption (delay-code) features, the epistemic
/// resolution features, and the four targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub doy: u16,
    pub orig_x_dir: f64,
    pub orig_y_dir: f64,
    pub orig_z_dir: f64,
    pub dest_x_dir: f64,
    pub dest_y_dir: f64,
    pub dest_z_dir: f64,
    pub onbd_ct: u32,
    pub route_dist: f64,
    pub route_originator_flag: u8,
    /// Delay code -> minutes attributed to it; present implies minutes > 0.
    pub delay_codes: BTreeMap<String, f64>,
    pub adjst_turn_mins: f64,
    pub shiftper_sched_pb: f64,
    pub shiftper_sched_gp: f64,
    pub shiftper_actl_pb: f64,
    pub shiftper_actl_gp: f64,
    pub dot_delay_mins: f64,
    pub actl_enroute_mins: f64,
    pub actl_turn_mins: f64,
    pub actl_block_mins: f64,
    pub a0: u8,
    pub a14: u8,
}

impl FlightRecord {
    /// Check every record invariant; returns the first violation.
    pub fn validate(&self) -> Result<(), String> {
        if self.a0 > 1 || self.a14 > 1 {
            return Err(format!(
                "A0/A14 must be binary, got ({}, {})",
                self.a0, self.a14
            ));
        }
        if self.a0 == 1 && self.a14 == 0 {
            return Err("A0 = 1 requires A14 = 1 (on time implies within 14 minutes)".into());
        }
        if self.route_originator_flag > 1 {
            return Err(format!(
                "route_originator_flag must be binary, got {}",
                self.route_originator_flag
            ));
        }
        if self.route_dist.is_nan() || self.route_dist <= 0.0 {
            return Err(format!(
                "route_dist must be positive, got {}",
                self.route_dist
            ));
        }
        for (name, v) in [
            ("ADJST_TURN_MINS", self.adjst_turn_mins),
            ("DOT_DELAY_MINS", self.dot_delay_mins),
            ("actl_enroute_mins", self.actl_enroute_mins),
            ("ACTL_TURN_MINS", self.actl_turn_mins),
            ("actl_block_mins", self.actl_block_mins),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(format!("{name} must be a nonnegative duration, got {v}"));
            }
        }
        for (code, &mins) in &self.delay_codes {
            if mins.is_nan() || mins <= 0.0 {
                return Err(format!(
                    "delay code {code} must carry positive minutes, got {mins}"
                ));
            }
        }
        let all_finite = [
            self.orig_x_dir,
            self.orig_y_dir,
            self.orig_z_dir,
            self.dest_x_dir,
            self.dest_y_dir,
            self.dest_z_dir,
            self.route_dist,
            self.adjst_turn_mins,
            self.shiftper_sched_pb,
            self.shiftper_sched_gp,
            self.shiftper_actl_pb,
            self.shiftper_actl_gp,
            self.dot_delay_mins,
            self.actl_enroute_mins,
            self.actl_turn_mins,
            self.actl_block_mins,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err("non-finite numeric feature".into());
        }
        Ok(())
    }

    /// Executed without any disruption: no delay codes and zero total delay.
    pub fn is_non_disrupted(&self) -> bool {
        self.delay_codes.is_empty() && self.dot_delay_mins == 0.0
    }

    /// The delay code carrying the most minutes; ties break toward the
    /// lexicographically smallest code (BTreeMap iterates codes ascending,
    /// and only a strictly larger minute count displaces the current best).
    pub fn dominant_delay_code(&self) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (code, &mins) in &self.delay_codes {
            if best.is_none_or(|(_, m)| mins > m) {
                best = Some((code, mins));
            }
        }
        best.map(|(code, _)| code)
    }

    pub fn total_delay_code_minutes(&self) -> f64 {
        self.delay_codes.values().sum()
    }
}

/// Disrupted/non-disrupted segmentation of a record set.
#[derive(Debug, Clone, Default)]
pub struct DatasetPartition {
    pub non_disrupted: Vec<FlightRecord>,
    pub disrupted_by_role: BTreeMap<FunctionalRole, Vec<FlightRecord>>,
    /// Disrupted records whose dominant code has no role mapping (or that
    /// carry delay without any code); reported rather than dropped.
    pub quarantine: Vec<FlightRecord>,
}

impl DatasetPartition {
    pub fn total_records(&self) -> usize {
        self.non_disrupted.len()
            + self.disrupted_by_role.values().map(Vec::len).sum::<usize>()
            + self.quarantine.len()
    }

    pub fn disrupted_for(&self, role: FunctionalRole) -> &[FlightRecord] {
        self.disrupted_by_role
            .get(&role)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Split records into the non-disrupted set and per-role disrupted sets.
/// A disrupted flight goes to the role owning its dominant delay code.
pub fn segment(records: &[FlightRecord]) -> DatasetPartition {
    let mut partition = DatasetPartition::default();
    for record in records {
        if record.is_non_disrupted() {
            partition.non_disrupted.push(record.clone());
            continue;
        }
        match record.dominant_delay_code().and_then(role_for_code) {
            Some(role) => partition
                .disrupted_by_role
                .entry(role)
                .or_default()
                .push(record.clone()),
            None => partition.quarantine.push(record.clone()),
        }
    }
    partition
}

/// The three disruption-management phases; each has its own feature set and
/// target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmPhase {
    Tactical,
    Operational,
    Strategic,
}

/// Trainable target columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    ActlTurnMins,
    ActlBlockMins,
    A0,
    A14,
}

/// The ten determinate aleatoric features every network receives, in the
/// fixed documented column order.
pub const DETERMINATE_COLUMNS: [&str; 10] = [
    "doy",
    "orig_x_dir",
    "orig_y_dir",
    "orig_z_dir",
    "dest_x_dir",
    "dest_y_dir",
    "dest_z_dir",
    "ONBD_CT",
    "route_dist",
    "route_originator_flag",
];

fn determinate_values(r: &FlightRecord) -> [f64; 10] {
    [
        r.doy as f64,
        r.orig_x_dir,
        r.orig_y_dir,
        r.orig_z_dir,
        r.dest_x_dir,
        r.dest_y_dir,
        r.dest_z_dir,
        r.onbd_ct as f64,
        r.route_dist,
        r.route_originator_flag as f64,
    ]
}

/// Per-phase epistemic input columns (delay-code columns excluded).
fn epistemic_columns(phase: AdmPhase) -> &'static [&'static str] {
    match phase {
        AdmPhase::Tactical => &["ADJST_TURN_MINS"],
        AdmPhase::Operational => &["shiftper_sched_PB", "shiftper_sched_GP", "DOT_DELAY_MINS"],
        AdmPhase::Strategic => &["shiftper_actl_PB", "shiftper_actl_GP", "actl_enroute_mins"],
    }
}

fn epistemic_values(r: &FlightRecord, phase: AdmPhase) -> Vec<f64> {
    match phase {
        AdmPhase::Tactical => vec![r.adjst_turn_mins],
        AdmPhase::Operational => {
            vec![r.shiftper_sched_pb, r.shiftper_sched_gp, r.dot_delay_mins]
        }
        AdmPhase::Strategic => {
            vec![r.shiftper_actl_pb, r.shiftper_actl_gp, r.actl_enroute_mins]
        }
    }
}

/// Assemble the input matrix for a phase.
///
/// Column order is fixed: the ten determinate aleatoric features
/// ([`DETERMINATE_COLUMNS`]), then the phase's epistemic features, then - for
/// the operational phase only - one `DC_<code>` minutes column per distinct
/// delay code present in `records`, sorted by code. Returns the matrix and
/// its column names.
pub fn feature_matrix(
    records: &[FlightRecord],
    phase: AdmPhase,
) -> Result<(Matrix, Vec<String>), DataError> {
    let code_columns: Vec<String> = if phase == AdmPhase::Operational {
        let codes: BTreeSet<&str> = records
            .iter()
            .flat_map(|r| r.delay_codes.keys().map(String::as_str))
            .collect();
        codes.into_iter().map(str::to_owned).collect()
    } else {
        Vec::new()
    };
    feature_matrix_with_code_columns(records, phase, &code_columns)
}

/// Same as [`feature_matrix`] but with the operational delay-code column set
/// pinned by the caller (the ensemble pins it to the role's code family so
/// training and inference agree on the input contract).
pub fn feature_matrix_with_code_columns(
    records: &[FlightRecord],
    phase: AdmPhase,
    code_columns: &[String],
) -> Result<(Matrix, Vec<String>), DataError> {
    if records.is_empty() {
        return Err(DataError::Domain(
            "feature_matrix requires at least one record".into(),
        ));
    }
    if phase != AdmPhase::Operational && !code_columns.is_empty() {
        return Err(DataError::Domain(format!(
            "delay-code columns are operational-phase inputs only, got {} for {phase:?}",
            code_columns.len()
        )));
    }

    let mut names: Vec<String> = DETERMINATE_COLUMNS.iter().map(|s| s.to_string()).collect();
    names.extend(epistemic_columns(phase).iter().map(|s| s.to_string()));
    names.extend(code_columns.iter().map(|c| format!("DC_{c}")));

    let n_cols = names.len();
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let mut row = Vec::with_capacity(n_cols);
        row.extend_from_slice(&determinate_values(r));
        row.extend(epistemic_values(r, phase));
        for code in code_columns {
            row.push(r.delay_codes.get(code).copied().unwrap_or(0.0));
        }
        rows.push(row);
    }
    let matrix = Matrix::from_rows(rows).map_err(DataError::Domain)?;
    Ok((matrix, names))
}

/// Extract a target column in record order, enforcing the phase/target
/// pairing: tactical predicts turnaround, strategic predicts block time, and
/// the operational classifiers predict A0 or A14.
pub fn target_vector(
    records: &[FlightRecord],
    phase: AdmPhase,
    target: TargetKind,
) -> Result<Vec<f64>, DataError> {
    let legal = matches!(
        (phase, target),
        (AdmPhase::Tactical, TargetKind::ActlTurnMins)
            | (AdmPhase::Strategic, TargetKind::ActlBlockMins)
            | (AdmPhase::Operational, TargetKind::A0)
            | (AdmPhase::Operational, TargetKind::A14)
    );
    if !legal {
        return Err(DataError::IllegalTarget { phase, target });
    }
    Ok(records
        .iter()
        .map(|r| match target {
            TargetKind::ActlTurnMins => r.actl_turn_mins,
            TargetKind::ActlBlockMins => r.actl_block_mins,
            TargetKind::A0 => r.a0 as f64,
            TargetKind::A14 => r.a14 as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base_record() -> FlightRecord {
        FlightRecord {
            doy: 120,
            orig_x_dir: 0.1,
            orig_y_dir: -0.8,
            orig_z_dir: 0.55,
            dest_x_dir: 0.2,
            dest_y_dir: -0.75,
            dest_z_dir: 0.5,
            onbd_ct: 143,
            route_dist: 239.0,
            route_originator_flag: 0,
            delay_codes: BTreeMap::new(),
            adjst_turn_mins: 35.0,
            shiftper_sched_pb: 40.0,
            shiftper_sched_gp: 55.0,
            shiftper_actl_pb: 42.0,
            shiftper_actl_gp: 60.0,
            dot_delay_mins: 0.0,
            actl_enroute_mins: 52.0,
            actl_turn_mins: 38.0,
            actl_block_mins: 104.0,
            a0: 1,
            a14: 1,
        }
    }

    fn disrupted_record(codes: &[(&str, f64)]) -> FlightRecord {
        let mut r = base_record();
        r.delay_codes = codes.iter().map(|(c, m)| (c.to_string(), *m)).collect();
        r.dot_delay_mins = 25.0;
        r.a0 = 0;
        r.a14 = 0;
        r
    }

    #[test]
    fn validate_catches_a0_without_a14() {
        let mut r = base_record();
        r.a0 = 1;
        r.a14 = 0;
        let err = r.validate().unwrap_err();
        assert!(err.contains("A0"));
    }

    #[test]
    fn validate_catches_negative_duration_and_zero_distance() {
        let mut r = base_record();
        r.actl_turn_mins = -1.0;
        assert!(r.validate().is_err());
        let mut r = base_record();
        r.route_dist = 0.0;
        assert!(r.validate().is_err());
    }

    #[test]
    fn segmentation_reference_cases() {
        let nd = base_record();
        let weather = disrupted_record(&[("HD06", 25.0)]);
        let multi = disrupted_record(&[("HD06", 5.0), ("MX01", 30.0)]);
        let partition = segment(&[nd.clone(), weather.clone(), multi.clone()]);

        assert_eq!(partition.non_disrupted, vec![nd]);
        assert_eq!(partition.disrupted_for(FunctionalRole::Weather), &[weather]);
        // Dominant-minutes rule: MX01 carries more minutes than HD06.
        assert_eq!(
            partition.disrupted_for(FunctionalRole::Maintenance),
            &[multi]
        );
        assert!(partition.quarantine.is_empty());
        assert_eq!(partition.total_records(), 3);
    }

    #[test]
    fn dominant_code_ties_break_lexicographically() {
        let r = disrupted_record(&[("MX01", 10.0), ("HD06", 10.0)]);
        assert_eq!(r.dominant_delay_code(), Some("HD06"));
    }

    #[test]
    fn unmapped_code_goes_to_quarantine() {
        let odd = disrupted_record(&[("ZZ99", 12.0)]);
        let partition = segment(std::slice::from_ref(&odd));
        assert_eq!(partition.quarantine, vec![odd]);

        // Delay without any code cannot be attributed either.
        let mut bare = base_record();
        bare.dot_delay_mins = 9.0;
        bare.a0 = 0;
        let partition = segment(&[bare.clone()]);
        assert_eq!(partition.quarantine, vec![bare]);
    }

    #[test]
    fn feature_counts_per_phase() {
        let records = vec![disrupted_record(&[("HD06", 25.0)])];
        let (m, names) = feature_matrix(&records, AdmPhase::Tactical).unwrap();
        assert_eq!(m.cols(), 11);
        assert_eq!(names.len(), 11);
        assert_eq!(names[10], "ADJST_TURN_MINS");

        let (m, names) = feature_matrix(&records, AdmPhase::Strategic).unwrap();
        assert_eq!(m.cols(), 13);
        assert_eq!(names[12], "actl_enroute_mins");

        let (m, names) = feature_matrix(&records, AdmPhase::Operational).unwrap();
        assert_eq!(m.cols(), 14);
        assert_eq!(names[13], "DC_HD06");
        assert_eq!(m.get(0, 13), 25.0);
    }

    #[test]
    fn feature_columns_are_stable_across_calls() {
        let records = vec![
            disrupted_record(&[("HD06", 5.0)]),
            disrupted_record(&[("MX01", 10.0)]),
        ];
        let (a, names_a) = feature_matrix(&records, AdmPhase::Operational).unwrap();
        let (b, names_b) = feature_matrix(&records, AdmPhase::Operational).unwrap();
        assert_eq!(names_a, names_b);
        assert_eq!(a, b);
        // Codes sort lexicographically regardless of record order.
        assert_eq!(
            &names_a[13..],
            &["DC_HD06".to_string(), "DC_MX01".to_string()]
        );
        for r in 0..a.rows() {
            assert!(a.row(r).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn code_columns_rejected_outside_operational() {
        let records = vec![base_record()];
        let err =
            feature_matrix_with_code_columns(&records, AdmPhase::Tactical, &["HD06".to_string()])
                .unwrap_err();
        assert!(matches!(err, DataError::Domain(_)));
    }

    #[test]
    fn target_pairings() {
        let records = vec![base_record()];
        let turn = target_vector(&records, AdmPhase::Tactical, TargetKind::ActlTurnMins).unwrap();
        assert_eq!(turn, vec![38.0]);
        let a14 = target_vector(&records, AdmPhase::Operational, TargetKind::A14).unwrap();
        assert_eq!(a14, vec![1.0]);
        let err = target_vector(&records, AdmPhase::Strategic, TargetKind::A0).unwrap_err();
        assert_eq!(
            err,
            DataError::IllegalTarget {
                phase: AdmPhase::Strategic,
                target: TargetKind::A0
            }
        );
    }

    #[test]
    fn role_names_round_trip_from_strings() {
        for role in ALL_ROLES {
            let parsed: FunctionalRole = role.name().parse().unwrap();
            assert_eq!(parsed, role);
        }
        assert_eq!(
            "weather".parse::<FunctionalRole>().unwrap(),
            FunctionalRole::Weather
        );
        assert_eq!(
            "DispatchCSC".parse::<FunctionalRole>().unwrap(),
            FunctionalRole::DispatchCsc
        );
        assert!("Catering".parse::<FunctionalRole>().is_err());
    }
}
