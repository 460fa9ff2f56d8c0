//! Delay-code ownership table.
//!
//! Only one code assignment is externally fixed: HD06 (ATC hold for bad
//! weather at the departure station) belongs to the Weather role. The rest
//! of the table is a documented, editable placeholder family per role so
//! that every role is reachable by the segmentation and the synthetic
//! generator; deployments with a real code dictionary should replace it
//! wholesale. Codes are grouped by a two-letter role prefix.

use super::FunctionalRole;

/// Code -> owning functional role. Kept sorted by code for readability;
/// lookups go through [`role_for_code`].
pub const DELAY_CODE_TABLE: &[(&str, FunctionalRole)] = &[
    ("CH01", FunctionalRole::CustomerHold),
    ("CH02", FunctionalRole::CustomerHold),
    ("DC01", FunctionalRole::DispatchCsc),
    ("DC02", FunctionalRole::DispatchCsc),
    ("FM01", FunctionalRole::FuelManagement),
    ("FM02", FunctionalRole::FuelManagement),
    ("FO01", FunctionalRole::FlightOperations),
    ("FO02", FunctionalRole::FlightOperations),
    ("GO01", FunctionalRole::GroundOperations),
    ("GO02", FunctionalRole::GroundOperations),
    ("HD06", FunctionalRole::Weather),
    ("IN01", FunctionalRole::Inflight),
    ("IN02", FunctionalRole::Inflight),
    ("MX01", FunctionalRole::Maintenance),
    ("MX02", FunctionalRole::Maintenance),
    ("NA01", FunctionalRole::Nas),
    ("NA02", FunctionalRole::Nas),
    ("SE01", FunctionalRole::Security),
    ("SE02", FunctionalRole::Security),
    ("TE01", FunctionalRole::Technology),
    ("TE02", FunctionalRole::Technology),
];

pub fn role_for_code(code: &str) -> Option<FunctionalRole> {
    DELAY_CODE_TABLE
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, role)| *role)
}

/// The role's code family in lexicographic order. This is the operational
/// input contract: the ensemble's classifiers take one `DC_<code>` column per
/// family member, in this order, at training and inference alike.
pub fn delay_code_columns(role: FunctionalRole) -> Vec<String> {
    DELAY_CODE_TABLE
        .iter()
        .filter(|(_, r)| *r == role)
        .map(|(c, _)| c.to_string())
        .collect()
}
