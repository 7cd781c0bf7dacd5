//! Report records and their two renderings: columnar CSV and hierarchical
//! JSON. Both carry the tool version and the config hash, and both render
//! deterministically (fixed field order, shortest round-trip floats).

use serde::Serialize;
use sha2::{Digest, Sha256};

use convact_core::approx::AttemptRecord;
use convact_core::ellis::EllisReport;
use convact_core::laws::SuiteResult;

use crate::config::{ReportFormat, Scenario};

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub config_hash: String,
    pub command: String,
    pub scenario: String,
    pub system: String,
    pub mode: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(scenario: &Scenario) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(scenario.canonical_text().as_bytes());
        Self {
            tool: format!("convact {}", env!("CARGO_PKG_VERSION")),
            config_hash: format!("{:x}", hasher.finalize()),
            command: scenario.params.name().to_string(),
            scenario: scenario.label.clone(),
            system: scenario.system.name().to_string(),
            mode: scenario.mode.to_string(),
            seed: scenario.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximationSection {
    pub samples_per_attempt: u64,
    pub attempts_used: u64,
    pub inside: bool,
    pub attempts: Vec<AttemptRecord>,
}

/// One scenario's full report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<SuiteResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximation: Option<ApproximationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ellis: Option<EllisReport>,
}

impl Report {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut text =
                    serde_json::to_string_pretty(self).expect("report serialization is total");
                text.push('\n');
                text
            }
            ReportFormat::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> String {
        let p = &self.provenance;
        let prefix = format!(
            "{},{},{},{},{},{},{}",
            csv_field(&p.tool),
            p.config_hash,
            p.command,
            csv_field(&p.scenario),
            csv_field(&p.system),
            p.mode,
            p.seed
        );
        let mut out = String::new();
        if let Some(suites) = &self.suites {
            out.push_str(
                "tool,config_hash,command,scenario,system,mode,seed,suite,cases,violations,passed\n",
            );
            for s in suites {
                out.push_str(&format!(
                    "{prefix},{},{},{},{}\n",
                    csv_field(&s.name),
                    s.cases,
                    s.violations,
                    s.passed
                ));
            }
        }
        if let Some(a) = &self.approximation {
            out.push_str(
                "tool,config_hash,command,scenario,system,mode,seed,attempt,constraint,label,\
                 target,target_half_width,achieved,half_width,lower,upper,n,inside\n",
            );
            for attempt in &a.attempts {
                for c in &attempt.constraints {
                    out.push_str(&format!(
                        "{prefix},{},{},{},{},{},{},{},{},{},{},{}\n",
                        attempt.attempt,
                        c.constraint,
                        csv_field(&c.label),
                        c.target,
                        c.target_half_width,
                        c.achieved,
                        c.half_width,
                        c.lower,
                        c.upper,
                        a.samples_per_attempt,
                        c.inside
                    ));
                }
            }
        }
        if let Some(e) = &self.ellis {
            out.push_str(
                "tool,config_hash,command,scenario,system,mode,seed,group_order,space_size,\
                 grid_denominator,distinct_maps,matrices_checked,max_residual,all_decomposed,\
                 reconstruction_unique,reconstructions_matched,passed\n",
            );
            out.push_str(&format!(
                "{prefix},{},{},{},{},{},{},{},{},{},{}\n",
                e.group_order,
                e.space_size,
                e.grid_denominator,
                e.distinct_maps,
                e.matrices_checked,
                e.max_residual,
                e.all_decomposed,
                e.reconstruction_unique,
                e.reconstructions_matched,
                self.passed
            ));
        }
        out
    }
}

// RFC-4180 quoting for fields that carry delimiters.
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}
