//! Loading a scenario document and producing the same JSON report the
//! command-line tool writes.
//!
//! Run with `cargo run --example scenario_report [path]`; defaults to the
//! bundled three-state scenario.

use belief_design::model::{validate_scenario, ValidationOptions};
use belief_design::report::{joint_report, ReportOptions, Sections};

const DEFAULT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/mild_3x3.json");

fn main() -> belief_design::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| DEFAULT.to_string());
    let raw = std::fs::read_to_string(&path).map_err(|e| belief_design::Error::Io(format!("{path}: {e}")))?;
    let validated = validate_scenario(&raw, ValidationOptions { relabel_signals: true })?;
    let options = ReportOptions {
        oracle_check: true,
        ..ReportOptions::default()
    };
    let sections = Sections {
        transfers: validated.scenario.is_binary(),
        ..Sections::ALL
    };
    let report = joint_report("report", &validated, sections, &options)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    Ok(())
}
