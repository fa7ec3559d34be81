//! Experiment reports and their CSV and JSON forms.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::spec::Experiment;
use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u64,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub target: f64,
    pub target_source: String,
    pub diagnostics: BTreeMap<String, f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub walk: String,
    pub scenery: String,
    pub seed: u64,
    pub config_digest: String,
    pub wall_time_secs: f64,
    pub rows: Vec<ReportRow>,
    /// Statistical flags raised; empty when every check passed.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "n",
    "trials",
    "estimate",
    "stderr",
    "target",
    "target_source",
    "seed",
];

impl ExperimentReport {
    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    /// `# config_digest: <hex>` followed by the header and one line per row.
    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut out = format!("# config_digest: {}\n", self.config_digest).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_HEADER)?;
            for r in &self.rows {
                w.write_record([
                    self.experiment.name().to_string(),
                    r.n.to_string(),
                    r.trials.to_string(),
                    r.estimate.to_string(),
                    r.stderr.to_string(),
                    r.target.to_string(),
                    r.target_source.clone(),
                    self.seed.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Lines after the digest comment: everything that depends only on the
/// experiment's results.
pub fn csv_body(csv: &str) -> &str {
    csv.split_once('\n').map_or("", |(_, body)| body)
}

pub fn emit(report: &ExperimentReport, format: Format, path: &Path) -> Result<(), LabError> {
    let text = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(rows: Vec<ReportRow>) -> ExperimentReport {
        ExperimentReport {
            experiment: Experiment::Range,
            walk: "srw2d".into(),
            scenery: "gaussian".into(),
            seed: 9,
            config_digest: "ab".repeat(32),
            wall_time_secs: 0.5,
            rows,
            flags: vec![],
        }
    }

    fn row() -> ReportRow {
        ReportRow {
            n: 1000,
            trials: 10,
            estimate: 2.5,
            stderr: 0.01,
            target: std::f64::consts::PI,
            target_source: "πA, range asymptotics".into(),
            diagnostics: BTreeMap::from([("spread".into(), 0.25)]),
            flagged: false,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let csv = report(vec![]).to_csv().unwrap();
        assert_eq!(
            csv_body(&csv),
            "experiment,n,trials,estimate,stderr,target,target_source,seed\n"
        );
        assert!(csv.starts_with("# config_digest: abab"));
    }

    #[test]
    fn one_row_round_trips() {
        let r = report(vec![row()]);
        let csv = r.to_csv().unwrap();
        assert_eq!(csv_body(&csv).lines().count(), 2);
        let mut rd = csv::Reader::from_reader(csv_body(&csv).as_bytes());
        let rec = rd.records().next().unwrap().unwrap();
        assert_eq!(&rec[6], "πA, range asymptotics");
        assert_eq!(rec[5].parse::<f64>().unwrap(), std::f64::consts::PI);
        let back: ExperimentReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
