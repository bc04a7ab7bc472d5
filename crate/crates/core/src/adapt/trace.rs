use serde::{Deserialize, Serialize};

use super::config::{RunConfig, CHEMICAL_ACCURACY};
use crate::geometry::SpectralDiagnostics;
use crate::state::Ansatz;

/// One outer iteration of an adaptive run, or one optimizer step of a
/// fixed-ansatz run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub outer_k: usize,
    pub total_iter: usize,
    pub energy: f64,
    pub energy_error: Option<f64>,
    pub selected_index: Option<usize>,
    pub selected_label: Option<String>,
    /// 0-based insertion slot; equals the ansatz length for appends.
    pub position: Option<usize>,
    pub skipped: bool,
    /// `|g~_{j_k}|` at the selected operator (and position).
    pub nat_grad_max: f64,
    pub fnorm: f64,
    pub diagnostics: Option<SpectralDiagnostics>,
    pub n_params: usize,
    pub descent_pass: Option<bool>,

    pub energy_before: f64,
    /// Raw pool gradient at the selected operator.
    pub grad_selected: f64,
    /// Diagonal of the selection metric at the selected operator, including regularization.
    pub metric_diag: f64,
    /// Energies after each inner step.
    pub inner_energies: Vec<f64>,
    /// `max(0, E^(k) - min inner energy)`.
    pub inner_slack: f64,
    /// Minimum eigenvalue and max asymmetry of the true pool metric.
    pub metric_min_eig: f64,
    pub metric_asymmetry: f64,
    /// `|(F + lambda I) g~ - g|` of the selection solve.
    pub solve_residual: f64,
    /// Best score restricted to the append slot (equals the selected score for
    /// non-positional runs).
    pub append_score: f64,
    pub ansatz_before: Ansatz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Termination {
    /// Stopping rule fired at the start of outer iteration `outer_k`.
    Converged { outer_k: usize },
    MaxOuter,
    /// Fixed-ansatz run finished its iteration budget.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: RunConfig,
    pub records: Vec<IterationRecord>,
    pub final_ansatz: Ansatz,
    pub e_fci: Option<f64>,
    pub initial_energy: f64,
    pub termination: Termination,
    /// `max_j |g~_j|` and F-norm on the final state (adaptive runs).
    pub final_nat_grad_max: Option<f64>,
    pub final_fnorm: Option<f64>,
    /// Parameter count of the full fixed ansatz, for plotting reference.
    pub uccsd_params: usize,
}

impl RunTrace {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(self.initial_energy, |r| r.energy)
    }

    pub fn final_error(&self) -> Option<f64> {
        self.e_fci.map(|e| self.final_energy() - e)
    }

    pub fn n_params(&self) -> usize {
        self.final_ansatz.len()
    }

    pub fn total_iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.total_iter)
    }

    /// First record whose energy error is below `threshold`.
    pub fn first_crossing(&self, threshold: f64) -> Option<&IterationRecord> {
        self.records.iter().find(|r| r.energy_error.is_some_and(|e| e.abs() < threshold))
    }
}

/// Effective ansatz complexity: parameters times total iterations at the
/// first record below `threshold`.
pub fn compute_eac(trace: &RunTrace, threshold: f64) -> Option<usize> {
    trace.first_crossing(threshold).map(|r| r.n_params * r.total_iter)
}

pub fn compute_eac_default(trace: &RunTrace) -> Option<usize> {
    compute_eac(trace, CHEMICAL_ACCURACY)
}

#[cfg(test)]
pub(crate) fn blank_record(outer_k: usize, total_iter: usize, n_params: usize, energy_error: Option<f64>) -> IterationRecord {
    IterationRecord {
        outer_k,
        total_iter,
        energy: 0.0,
        energy_error,
        selected_index: None,
        selected_label: None,
        position: None,
        skipped: false,
        nat_grad_max: 0.0,
        fnorm: 0.0,
        diagnostics: None,
        n_params,
        descent_pass: None,
        energy_before: 0.0,
        grad_selected: 0.0,
        metric_diag: 1.0,
        inner_energies: Vec::new(),
        inner_slack: 0.0,
        metric_min_eig: 0.0,
        metric_asymmetry: 0.0,
        solve_residual: 0.0,
        append_score: 0.0,
        ansatz_before: Ansatz::default(),
    }
}
