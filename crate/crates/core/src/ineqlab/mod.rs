//! The verification lab: a catalog of labeled checks, each reproducing one
//! inequality or identity on configurable function families and grids, with
//! empirical constants and refinement-drift estimates.

pub mod families;
pub mod report;
mod run;

pub use families::{make_family, FamilyKind, FamilyMember, FamilySpec};
pub use report::{rows_to_csv, CheckReport, CheckRow, CheckRun, LabSummary};
pub use run::{default_families, run_check, run_check_in, verify_all, CheckId, GridSpec, LabContext};
