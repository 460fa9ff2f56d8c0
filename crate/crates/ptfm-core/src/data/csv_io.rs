//! CSV ingestion and emission for flight records.
//!
//! Schema: UTF-8, comma-separated, `.` decimal point. The header row carries
//! the 21 fixed feature/target names ([`FIXED_COLUMNS`]) in any order plus
//! one `DC_<code>` minutes column per delay code (0 means the code is absent
//! from that flight). Floats are written with Rust's shortest-round-trip
//! formatting, so a write -> read cycle reproduces every value bit for bit.

use std::collections::BTreeSet;
use std::path::Path;

use super::{DataError, FlightRecord};

/// Required columns, in canonical write order.
pub const FIXED_COLUMNS: [&str; 21] = [
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
    "ADJST_TURN_MINS",
    "shiftper_sched_PB",
    "shiftper_sched_GP",
    "shiftper_actl_PB",
    "shiftper_actl_GP",
    "DOT_DELAY_MINS",
    "actl_enroute_mins",
    "ACTL_TURN_MINS",
    "actl_block_mins",
    "A0",
    "A14",
];

/// A skipped row in lenient mode: 1-based data row index plus the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct RowIssue {
    pub row: usize,
    pub reason: String,
}

/// Result of a lenient or strict load.
#[derive(Debug, Clone, Default)]
pub struct CsvLoad {
    pub records: Vec<FlightRecord>,
    pub skipped: Vec<RowIssue>,
}

pub fn write_csv(records: &[FlightRecord], path: &Path) -> Result<(), DataError> {
    let codes: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.delay_codes.keys().map(String::as_str))
        .collect();
    let mut writer = csv::Writer::from_path(path)?;

    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(codes.iter().map(|c| format!("DC_{c}")));
    writer.write_record(&header)?;

    for r in records {
        let mut row: Vec<String> = vec![
            r.doy.to_string(),
            r.orig_x_dir.to_string(),
            r.orig_y_dir.to_string(),
            r.orig_z_dir.to_string(),
            r.dest_x_dir.to_string(),
            r.dest_y_dir.to_string(),
            r.dest_z_dir.to_string(),
            r.onbd_ct.to_string(),
            r.route_dist.to_string(),
            r.route_originator_flag.to_string(),
            r.adjst_turn_mins.to_string(),
            r.shiftper_sched_pb.to_string(),
            r.shiftper_sched_gp.to_string(),
            r.shiftper_actl_pb.to_string(),
            r.shiftper_actl_gp.to_string(),
            r.dot_delay_mins.to_string(),
            r.actl_enroute_mins.to_string(),
            r.actl_turn_mins.to_string(),
            r.actl_block_mins.to_string(),
            r.a0.to_string(),
            r.a14.to_string(),
        ];
        for code in &codes {
            row.push(r.delay_codes.get(*code).copied().unwrap_or(0.0).to_string());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

struct ColumnIndex {
    fixed: [usize; 21],
    /// (column position, code name without the DC_ prefix)
    codes: Vec<(usize, String)>,
}

fn index_header(header: &csv::StringRecord) -> Result<ColumnIndex, DataError> {
    let names: Vec<&str> = header.iter().collect();
    let mut fixed = [0usize; 21];
    for (slot, wanted) in fixed.iter_mut().zip(FIXED_COLUMNS) {
        *slot =
            names
                .iter()
                .position(|n| *n == wanted)
                .ok_or_else(|| DataError::MissingColumn {
                    column: wanted.to_string(),
                })?;
    }
    let mut codes = Vec::new();
    for (pos, name) in names.iter().enumerate() {
        if FIXED_COLUMNS.contains(name) {
            continue;
        }
        match name.strip_prefix("DC_") {
            Some(code) if !code.is_empty() => codes.push((pos, code.to_string())),
            _ => {
                return Err(DataError::UnexpectedColumn {
                    column: name.to_string(),
                })
            }
        }
    }
    Ok(ColumnIndex { fixed, codes })
}

fn parse_row(
    record: &csv::StringRecord,
    index: &ColumnIndex,
    row: usize,
) -> Result<FlightRecord, DataError> {
    let cell = |pos: usize, column: &str| -> Result<&str, DataError> {
        record.get(pos).ok_or_else(|| DataError::Parse {
            row,
            column: column.to_string(),
            value: "<missing>".into(),
        })
    };
    let float = |pos: usize, column: &str| -> Result<f64, DataError> {
        let raw = cell(pos, column)?;
        raw.trim().parse::<f64>().map_err(|_| DataError::Parse {
            row,
            column: column.to_string(),
            value: raw.to_string(),
        })
    };
    let int = |pos: usize, column: &str| -> Result<u64, DataError> {
        let raw = cell(pos, column)?;
        raw.trim().parse::<u64>().map_err(|_| DataError::Parse {
            row,
            column: column.to_string(),
            value: raw.to_string(),
        })
    };

    let f = &index.fixed;
    let mut delay_codes = std::collections::BTreeMap::new();
    for (pos, code) in &index.codes {
        let minutes = float(*pos, &format!("DC_{code}"))?;
        if minutes != 0.0 {
            delay_codes.insert(code.clone(), minutes);
        }
    }

    let parsed = FlightRecord {
        doy: int(f[0], "doy")? as u16,
        orig_x_dir: float(f[1], "orig_x_dir")?,
        orig_y_dir: float(f[2], "orig_y_dir")?,
        orig_z_dir: float(f[3], "orig_z_dir")?,
        dest_x_dir: float(f[4], "dest_x_dir")?,
        dest_y_dir: float(f[5], "dest_y_dir")?,
        dest_z_dir: float(f[6], "dest_z_dir")?,
        onbd_ct: int(f[7], "ONBD_CT")? as u32,
        route_dist: float(f[8], "route_dist")?,
        route_originator_flag: int(f[9], "route_originator_flag")? as u8,
        adjst_turn_mins: float(f[10], "ADJST_TURN_MINS")?,
        shiftper_sched_pb: float(f[11], "shiftper_sched_PB")?,
        shiftper_sched_gp: float(f[12], "shiftper_sched_GP")?,
        shiftper_actl_pb: float(f[13], "shiftper_actl_PB")?,
        shiftper_actl_gp: float(f[14], "shiftper_actl_GP")?,
        dot_delay_mins: float(f[15], "DOT_DELAY_MINS")?,
        actl_enroute_mins: float(f[16], "actl_enroute_mins")?,
        actl_turn_mins: float(f[17], "ACTL_TURN_MINS")?,
        actl_block_mins: float(f[18], "actl_block_mins")?,
        a0: int(f[19], "A0")? as u8,
        a14: int(f[20], "A14")? as u8,
        delay_codes,
    };
    parsed
        .validate()
        .map_err(|message| DataError::Invariant { row, message })?;
    Ok(parsed)
}

/// Load and validate a record CSV.
///
/// `strict` rejects the whole file at the first bad row; lenient mode skips
/// bad rows and reports them in [`CsvLoad::skipped`]. Schema problems
/// (missing or unknown columns) are fatal in both modes.
pub fn load_csv(path: &Path, strict: bool) -> Result<CsvLoad, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header = reader.headers()?.clone();
    let index = index_header(&header)?;

    let mut out = CsvLoad::default();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        match parse_row(&record, &index, row) {
            Ok(parsed) => out.records.push(parsed),
            Err(e) if strict => return Err(e),
            Err(e) => out.skipped.push(RowIssue {
                row,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}
