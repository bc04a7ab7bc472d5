//! Trace CSV, summary JSON and run output directories.

use std::path::Path;

use geoadapt::adapt::{compute_eac, descent_check, IterationRecord, Problem, RunTrace, Termination, CHEMICAL_ACCURACY};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_COLUMNS: [&str; 14] = [
    "outer_k",
    "total_iter",
    "energy",
    "energy_error",
    "selected_op",
    "position",
    "skipped",
    "nat_grad_max",
    "fnorm",
    "mu_hat",
    "lambda_hat",
    "rho_hat",
    "n_params",
    "descent_pass",
];

/// One trace CSV row. Optional fields are empty cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub outer_k: usize,
    pub total_iter: usize,
    pub energy: f64,
    pub energy_error: Option<f64>,
    pub selected_op: Option<usize>,
    pub position: Option<usize>,
    pub skipped: bool,
    pub nat_grad_max: f64,
    pub fnorm: f64,
    pub mu_hat: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub rho_hat: Option<f64>,
    pub n_params: usize,
    pub descent_pass: Option<bool>,
}

impl From<&IterationRecord> for CsvRow {
    fn from(r: &IterationRecord) -> Self {
        Self {
            outer_k: r.outer_k,
            total_iter: r.total_iter,
            energy: r.energy,
            energy_error: r.energy_error,
            selected_op: r.selected_index,
            position: r.position,
            skipped: r.skipped,
            nat_grad_max: r.nat_grad_max,
            fnorm: r.fnorm,
            mu_hat: r.diagnostics.map(|d| d.mu_hat),
            lambda_hat: r.diagnostics.map(|d| d.lambda_hat),
            rho_hat: r.diagnostics.map(|d| d.rho_hat),
            n_params: r.n_params,
            descent_pass: r.descent_pass,
        }
    }
}

impl CsvRow {
    /// Whether the row carries the same values as `r` for every CSV column.
    pub fn matches(&self, r: &IterationRecord) -> bool {
        *self == CsvRow::from(r)
    }
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in &trace.records {
        w.serialize(CsvRow::from(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Validation(format!("trace CSV header: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(CliError::Validation(format!("unexpected trace CSV columns: {headers:?}")));
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| CliError::Parse { line: i + 2, message: e.to_string() }))
        .collect()
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<CsvRow>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_trace_csv(&text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub algorithm: String,
    pub final_energy: f64,
    pub e_fci: Option<f64>,
    pub energy_error: Option<f64>,
    pub chemical_accuracy_reached: bool,
    pub first_crossing_outer_k: Option<usize>,
    pub first_crossing_total_iter: Option<usize>,
    pub eac: Option<usize>,
    pub n_params: usize,
    pub uccsd_params: usize,
    pub outer_iterations: usize,
    pub total_iterations: usize,
    pub termination: Termination,
    pub final_nat_grad_max: Option<f64>,
    pub final_fnorm: Option<f64>,
    pub descent_checks: usize,
    pub descent_all_pass: bool,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn new(label: &str, trace: &RunTrace, problem: &Problem, wall_time_s: f64) -> Result<Self, CliError> {
        let crossing = trace.first_crossing(CHEMICAL_ACCURACY);
        let report = descent_check(trace, problem)?;
        Ok(Self {
            label: label.to_string(),
            algorithm: trace.config.algorithm.name().to_string(),
            final_energy: trace.final_energy(),
            e_fci: trace.e_fci,
            energy_error: trace.final_error(),
            chemical_accuracy_reached: crossing.is_some(),
            first_crossing_outer_k: crossing.map(|r| r.outer_k),
            first_crossing_total_iter: crossing.map(|r| r.total_iter),
            eac: compute_eac(trace, CHEMICAL_ACCURACY),
            n_params: trace.n_params(),
            uccsd_params: trace.uccsd_params,
            outer_iterations: trace.records.len(),
            total_iterations: trace.total_iterations(),
            termination: trace.termination.clone(),
            final_nat_grad_max: trace.final_nat_grad_max,
            final_fnorm: trace.final_fnorm,
            descent_checks: report.checks.len(),
            descent_all_pass: report.all_passed(),
            wall_time_s,
        })
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}
