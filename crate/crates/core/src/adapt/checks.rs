use serde::{Deserialize, Serialize};

use super::trace::{IterationRecord, RunTrace};
use super::Problem;
use crate::error::{Error, Result};
use crate::state::{expectation, prepare_state};

/// Tolerance on the trial-step and inner-loop descent inequalities.
pub const DESCENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentCheck {
    pub outer_k: usize,
    /// Single-coordinate trial step `beta = -eta g_j / F_jj`.
    pub beta: f64,
    pub trial_energy: f64,
    pub trial_pass: bool,
    pub inner_pass: bool,
    /// `(E^(k-1) - phi(beta e_j)) / g~_j^2`.
    pub ratio: f64,
}

impl DescentCheck {
    pub fn passed(&self) -> bool {
        self.trial_pass && self.inner_pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub checks: Vec<DescentCheck>,
    /// Smallest observed ratio, a proxy for the descent constant.
    pub min_ratio: Option<f64>,
}

impl DescentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(DescentCheck::passed)
    }
}

/// Descent inequalities for one record; `None` for skipped or fixed-ansatz records.
pub fn check_record(record: &IterationRecord, problem: &Problem, eta: f64) -> Result<Option<DescentCheck>> {
    let (Some(index), Some(position)) = (record.selected_index, record.position) else {
        return Ok(None);
    };
    if record.skipped {
        return Ok(None);
    }
    let beta = if record.metric_diag > 0.0 { -eta * record.grad_selected / record.metric_diag } else { 0.0 };
    let mut trial = record.ansatz_before.clone();
    trial.insert(position, index, beta)?;
    let trial_energy = expectation(&problem.hamiltonian, &prepare_state(&trial, &problem.pool, &problem.reference)?)?;
    let trial_pass = trial_energy <= record.energy_before + DESCENT_TOL;
    let inner_pass = record.energy <= record.energy_before + record.inner_slack + DESCENT_TOL;
    let ratio = if record.nat_grad_max > 0.0 {
        (record.energy_before - trial_energy) / (record.nat_grad_max * record.nat_grad_max)
    } else {
        0.0
    };
    Ok(Some(DescentCheck { outer_k: record.outer_k, beta, trial_energy, trial_pass, inner_pass, ratio }))
}

/// Re-evaluates the descent inequalities on every non-skipped iteration.
pub fn descent_check(trace: &RunTrace, problem: &Problem) -> Result<DescentReport> {
    let mut checks = Vec::new();
    for r in &trace.records {
        if let Some(c) = check_record(r, problem, trace.config.eta)? {
            checks.push(c);
        }
    }
    let min_ratio = checks.iter().map(|c| c.ratio).reduce(f64::min);
    Ok(DescentReport { checks, min_ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionReport {
    /// `Delta_k` simulated at equality, `k = 0..=k_max`.
    pub deltas: Vec<f64>,
    /// `rho^k Delta_0 + R_k` by direct summation.
    pub bounds: Vec<f64>,
    pub remainders: Vec<f64>,
    pub bound_holds: bool,
    pub tail_vanishes: bool,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.bound_holds && self.tail_vanishes
    }
}

/// Simulates `Delta_{k+1} = rho Delta_k + delta_{k+1}` and checks it against
/// `rho^k Delta_0 + sum_{m<=k} rho^{k-m} delta_m`. `deltas[m-1]` is `delta_m`.
pub fn recursion_bound_check(delta0: f64, rho: f64, deltas: &[f64], k_max: usize) -> Result<RecursionReport> {
    if !(delta0 >= 0.0 && delta0.is_finite()) {
        return Err(Error::InvalidConfig(format!("delta0 must be finite and >= 0, got {delta0}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidConfig(format!("rho must lie in (0, 1), got {rho}")));
    }
    if deltas.len() < k_max {
        return Err(Error::InvalidConfig(format!("need {k_max} perturbations, got {}", deltas.len())));
    }
    if deltas.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(Error::InvalidConfig("perturbations must be finite and >= 0".into()));
    }
    let mut sim = vec![delta0];
    for m in 1..=k_max {
        sim.push(rho * sim[m - 1] + deltas[m - 1]);
    }
    let mut bounds = Vec::with_capacity(k_max + 1);
    let mut remainders = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let r: f64 = (1..=k).map(|m| rho.powi((k - m) as i32) * deltas[m - 1]).sum();
        remainders.push(r);
        bounds.push(rho.powi(k as i32) * delta0 + r);
    }
    let bound_holds = sim.iter().zip(&bounds).all(|(d, b)| *d <= b * (1.0 + 1e-12) + 1e-300);
    let tail_vanishes = remainders.last().is_some_and(|r| *r < 1e-8);
    Ok(RecursionReport { deltas: sim, bounds, remainders, bound_holds, tail_vanishes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_is_exact() {
        let r = recursion_bound_check(2.0, 0.3, &[0.0; 10], 10).unwrap();
        for (k, d) in r.deltas.iter().enumerate() {
            assert_eq!(*d, r.bounds[k]);
            assert!((d - 2.0 * 0.3f64.powi(k as i32)).abs() < 1e-15);
        }
        assert!(r.passed());
    }

    #[test]
    fn geometric_perturbation() {
        let deltas: Vec<f64> = (1..=60).map(|m| 0.5f64.powi(m)).collect();
        let r = recursion_bound_check(1.0, 0.5, &deltas, 60).unwrap();
        assert!(r.passed());
        for k in 0..=60 {
            let expected = k as f64 * 0.5f64.powi(k as i32);
            assert!((r.remainders[k] - expected).abs() <= 1e-15 * (1.0 + expected));
            assert!((r.deltas[k] - r.bounds[k]).abs() <= 1e-14 * r.bounds[k].max(1e-300));
        }
    }

    #[test]
    fn zero_start_equals_remainder() {
        let deltas = [0.3, 0.0, 0.7, 0.1];
        let r = recursion_bound_check(0.0, 0.4, &deltas, 4).unwrap();
        for k in 0..=4 {
            assert!((r.deltas[k] - r.remainders[k]).abs() < 1e-15);
        }
        assert!(r.bound_holds);
    }

    #[test]
    fn bad_inputs() {
        assert!(recursion_bound_check(1.0, 1.0, &[], 0).is_err());
        assert!(recursion_bound_check(-1.0, 0.5, &[], 0).is_err());
        assert!(recursion_bound_check(1.0, 0.5, &[-0.1], 1).is_err());
        assert!(recursion_bound_check(1.0, 0.5, &[0.1], 2).is_err());
    }
}
