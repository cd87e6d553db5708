//! Output records and the text/json/csv emitters.

use cpdim_core::cdim::{CdReport, MethodOutcome, Support};
use cpdim_core::CoreError;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(CoreError::input(format!("unknown format {other:?}"))),
        }
    }
}

/// One emitted line of `cpdim compute`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeRecord {
    pub family: String,
    pub rank: u32,
    pub isogeny: String,
    pub prime: u32,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cd: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hilbert: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovered_degrees: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_reason: Option<String>,
    pub verdict: String,
}

pub fn records_from_report(report: &CdReport) -> Vec<ComputeRecord> {
    report
        .outcomes
        .iter()
        .map(|outcome| {
            let mut record = ComputeRecord {
                family: report.spec.family.to_string(),
                rank: report.spec.rank as u32,
                isogeny: report.spec.isogeny.token().to_string(),
                prime: report.prime,
                method: outcome.method().token().to_string(),
                cd: outcome.cd(),
                hilbert: None,
                recovered_degrees: None,
                skipped_reason: None,
                verdict: report.verdict.token().to_string(),
            };
            match outcome {
                MethodOutcome::Computed(r) => match &r.support {
                    Support::Direct(image) => {
                        record.hilbert = image.hilbert.coeffs_u64();
                        record.recovered_degrees = image.recovery.degrees().map(<[u64]>::to_vec);
                    }
                    Support::ClosedForm { mod_p_degrees } => {
                        record.recovered_degrees = Some(mod_p_degrees.clone());
                    }
                    _ => {}
                },
                MethodOutcome::Skipped { reason, .. } => {
                    record.skipped_reason = Some(reason.clone());
                }
            }
            record
        })
        .collect()
}

pub const CSV_HEADER: &str = "family,rank,isogeny,prime,method,cd,verdict,detail";

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn emit_records(records: &[ComputeRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(records).expect("records serialize")
        }
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            for r in records {
                let detail = r
                    .skipped_reason
                    .clone()
                    .or_else(|| {
                        r.recovered_degrees
                            .as_ref()
                            .map(|d| format!("degrees {d:?}"))
                    })
                    .unwrap_or_default();
                let cd = r.cd.map(|v| v.to_string()).unwrap_or_default();
                let _ = write!(
                    out,
                    "\n{},{},{},{},{},{},{},{}",
                    r.family,
                    r.rank,
                    r.isogeny,
                    r.prime,
                    r.method,
                    cd,
                    r.verdict,
                    csv_escape(&detail)
                );
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            for r in records {
                let head = format!(
                    "{}{}^{} p={} {:<14}",
                    r.family, r.rank, r.isogeny, r.prime, r.method
                );
                match (r.cd, &r.skipped_reason) {
                    (Some(cd), _) => {
                        let _ = write!(out, "{head} cd = {cd:<4} [{}]", r.verdict);
                        if let Some(d) = &r.recovered_degrees {
                            let _ = write!(out, " degrees {d:?}");
                        }
                    }
                    (None, Some(reason)) => {
                        let _ = write!(out, "{head} skipped: {reason}");
                    }
                    (None, None) => {
                        let _ = write!(out, "{head} (no value)");
                    }
                }
                out.push('\n');
            }
            out.pop();
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trips() {
        let records = vec![ComputeRecord {
            family: "F".into(),
            rank: 4,
            isogeny: "sc".into(),
            prime: 3,
            method: "direct_charmap".into(),
            cd: Some(8),
            hilbert: Some(vec![1, 4, 9]),
            recovered_degrees: Some(vec![2, 4, 6, 8]),
            skipped_reason: None,
            verdict: "agree".into(),
        }];
        let text = emit_records(&records, OutputFormat::Json);
        let back: Vec<ComputeRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn csv_header_is_fixed() {
        let out = emit_records(&[], OutputFormat::Csv);
        assert_eq!(out, CSV_HEADER);
    }
}
