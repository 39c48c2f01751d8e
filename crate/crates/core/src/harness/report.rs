use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{lemma2_experiment, sharp_interface_experiment, subsuper_experiment, ExperimentConfig};
use crate::error::{invalid, Result};

/// One row per `eps`; cells of experiments that were not run stay empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub eps: f64,
    pub sup_l2_dist: Option<f64>,
    pub sup_radius_gap: Option<f64>,
    /// Largest over both correction signs.
    pub lemma2_sup: Option<f64>,
    pub lemma2_holder: Option<f64>,
    /// `min(u+ - u, u - u-)`.
    pub ordering_margin: Option<f64>,
}

impl ReportRow {
    pub fn new(eps: f64) -> ReportRow {
        ReportRow {
            eps,
            sup_l2_dist: None,
            sup_radius_gap: None,
            lemma2_sup: None,
            lemma2_holder: None,
            ordering_margin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// End of the common comparison interval of the sharp-interface legs.
    pub tau: Option<f64>,
    /// Sorted by decreasing `eps`.
    pub rows: Vec<ReportRow>,
    /// Experiments that failed, with their error messages.
    pub errors: Vec<String>,
}

impl ConvergenceReport {
    pub fn empty(cfg: &ExperimentConfig) -> ConvergenceReport {
        ConvergenceReport {
            seed: cfg.seed,
            config_hash: cfg.hash(),
            config: cfg.clone(),
            tau: None,
            rows: cfg.eps_sorted().into_iter().map(ReportRow::new).collect(),
            errors: Vec::new(),
        }
    }

    fn row_mut(&mut self, eps: f64) -> Option<&mut ReportRow> {
        self.rows.iter_mut().find(|r| r.eps == eps)
    }
}

/// Runs the sharp-interface, drift-integral and barrier experiments and
/// merges them by `eps`. A failing experiment leaves its columns empty and
/// is listed in `errors`.
pub fn run_report(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut report = ConvergenceReport::empty(cfg);
    match sharp_interface_experiment(cfg) {
        Ok(sharp) => {
            report.tau = sharp.tau;
            for r in sharp.rows {
                if let Some(row) = report.row_mut(r.eps) {
                    row.sup_l2_dist = r.sup_l2_dist;
                    row.sup_radius_gap = r.sup_radius_gap;
                }
            }
        }
        Err(e) => report.errors.push(format!("compare: {e}")),
    }
    match lemma2_experiment(cfg) {
        Ok(rows) => {
            for r in rows {
                if let Some(row) = report.row_mut(r.eps) {
                    row.lemma2_sup = Some(row.lemma2_sup.unwrap_or(0.0).max(r.sup_dist));
                    row.lemma2_holder = Some(row.lemma2_holder.unwrap_or(0.0).max(r.holder_dist));
                }
            }
        }
        Err(e) => report.errors.push(format!("lemma2: {e}")),
    }
    match subsuper_experiment(cfg) {
        Ok(rows) => {
            for r in rows {
                if let Some(row) = report.row_mut(r.eps) {
                    row.ordering_margin = Some(r.margin());
                }
            }
        }
        Err(e) => report.errors.push(format!("sandwich: {e}")),
    }
    Ok(report)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `report.csv` and `report.json` into `dir`.
pub fn report_emit(report: &ConvergenceReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    if report.rows.is_empty() {
        return Err(invalid("eps", "report has no rows"));
    }
    std::fs::create_dir_all(dir)?;
    let mut csv = String::from("eps,sup_l2_dist,sup_radius_gap,lemma2_sup,lemma2_holder,ordering_margin\n");
    for r in &report.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.eps,
            cell(r.sup_l2_dist),
            cell(r.sup_radius_gap),
            cell(r.lemma2_sup),
            cell(r.lemma2_holder),
            cell(r.ordering_margin)
        )
        .expect("write to string");
    }
    let csv_path = dir.join("report.csv");
    let json_path = dir.join("report.json");
    std::fs::write(&csv_path, csv)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| invalid("report", e.to_string()))?;
    std::fs::write(&json_path, json + "\n")?;
    Ok((csv_path, json_path))
}
