//! Adaptive outer loops, inner optimizers, fixed-ansatz baselines and the
//! runtime descent checks.

mod checks;
mod config;
mod inner;
mod run;
mod select;
mod trace;

pub use checks::{
    check_record, descent_check, recursion_bound_check, DescentCheck, DescentReport, RecursionReport, DESCENT_TOL,
};
pub use config::{
    Algorithm, InnerOptimizer, OuterMetric, RunConfig, CHEMICAL_ACCURACY, DEFAULT_EPS, DEFAULT_ETA_GRID,
    DEFAULT_KAPPA, DEFAULT_MAX_OUTER,
};
pub use inner::{inner_gd, inner_qngd, inner_step, MetricMode, StepInfo};
pub use run::{adapt_vqe_run, geo_adapt_run, pos_adapt_run, pos_geo_adapt_run, run, vqe_fixed_run};
pub use select::{select_operator, select_positional, PositionalSelection, Selection};
pub use trace::{compute_eac, compute_eac_default, IterationRecord, RunTrace, Termination};

use crate::eigen;
use crate::error::{Error, Result};
use crate::fermion::{build_pool, hf_reference, MoleculeSpec, OperatorPool, PoolOptions};
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Hamiltonian, pool and reference state for one run.
#[derive(Clone, Debug)]
pub struct Problem {
    pub hamiltonian: PauliSum,
    pub pool: OperatorPool,
    pub reference: StateVector,
    pub e_fci: Option<f64>,
}

impl Problem {
    pub fn new(hamiltonian: PauliSum, pool: OperatorPool, reference: StateVector) -> Result<Self> {
        hamiltonian.ensure_hermitian()?;
        if hamiltonian.n_qubits() != reference.n_qubits() {
            return Err(Error::DimensionMismatch { expected: hamiltonian.n_qubits(), got: reference.n_qubits() });
        }
        if let Some(op) = pool.operators().first() {
            if op.generator.n_qubits() != hamiltonian.n_qubits() {
                return Err(Error::DimensionMismatch { expected: hamiltonian.n_qubits(), got: op.generator.n_qubits() });
            }
        }
        Ok(Self { hamiltonian, pool, reference, e_fci: None })
    }

    /// Excitation pool and Hartree-Fock reference for `spec`.
    pub fn molecular(hamiltonian: PauliSum, spec: &MoleculeSpec, opts: &PoolOptions) -> Result<Self> {
        Self::new(hamiltonian, build_pool(spec, opts)?, hf_reference(spec)?)
    }

    pub fn with_e_fci(mut self, e: f64) -> Self {
        self.e_fci = Some(e);
        self
    }

    /// Sets the reference energy from the lowest eigenvalue of the Hamiltonian.
    pub fn with_computed_e_fci(self, seed: u64) -> Result<Self> {
        let e = eigen::ground_state(&self.hamiltonian, seed)?.energy;
        Ok(self.with_e_fci(e))
    }
}

/// Run error carrying the trace recorded up to the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    pub error: Error,
    pub trace: Box<RunTrace>,
}
