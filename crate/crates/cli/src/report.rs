//! JSON report written by `analyze`.

use std::path::PathBuf;

use anyhow::bail;
use serde::Serialize;
use spherenet::analysis::QualityReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ReportInput {
    pub net: PathBuf,
    pub n: usize,
    pub distinct_points: usize,
    pub total_weight: u64,
    pub probes: usize,
    pub max_degree: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub input: ReportInput,
    pub report: QualityReport,
}

impl ReportFile {
    pub fn new(input: ReportInput, report: QualityReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            input,
            report,
        }
    }

    /// Pretty JSON; refuses to emit non-finite numbers.
    pub fn to_json(&self) -> anyhow::Result<String> {
        let r = &self.report;
        let mut values = vec![r.covering_radius_est, r.w1_lower_bound];
        values.extend(r.discrepancy.values());
        values.extend(r.integration_errors.values());
        if let Some(gap) = &r.gap_estimates {
            values.extend(gap.values());
        }
        if values.iter().any(|v| !v.is_finite()) {
            bail!("report contains a non-finite value");
        }
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
