//! Built-in Hamiltonians and problem loading.

use std::path::{Path, PathBuf};

use geoadapt::adapt::Problem;
use geoadapt::eigen::{ground_state, GroundStateResult};
use geoadapt::fermion::{MoleculeSpec, PoolOptions};
use geoadapt::pauli::PauliSum;

use crate::error::CliError;
use crate::hamfile::HamiltonianFile;

/// Tolerance between a stored and a recomputed reference energy.
pub const E_FCI_TOL: f64 = 1e-9;

pub const FIXTURES: &[(&str, &str)] = &[
    ("h2_sto3g_0p74", include_str!("../../../fixtures/h2_sto3g_0p74.ham")),
    ("h4_sto3g_1p00", include_str!("../../../fixtures/h4_sto3g_1p00.ham")),
];

pub fn fixture_text(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// A parsed Hamiltonian with its recomputed ground-state energy.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub source: String,
    pub file: HamiltonianFile,
    pub hamiltonian: PauliSum,
    pub ground: GroundStateResult,
}

impl Loaded {
    pub fn label(&self) -> String {
        match &self.file.molecule {
            Some(m) if !m.label.is_empty() => m.label.clone(),
            _ => self.source.clone(),
        }
    }

    pub fn spec(&self, n_electrons: Option<usize>) -> Result<MoleculeSpec, CliError> {
        let ne = n_electrons
            .or(self.file.molecule.as_ref().map(|m| m.n_electrons))
            .ok_or_else(|| CliError::Validation(format!("{}: electron count unknown; add [molecule] n_electrons", self.source)))?;
        Ok(MoleculeSpec::new(self.file.n_qubits, ne, self.label())?)
    }

    pub fn problem(&self, n_electrons: Option<usize>, opts: &PoolOptions) -> Result<Problem, CliError> {
        let spec = self.spec(n_electrons)?;
        Ok(Problem::molecular(self.hamiltonian.clone(), &spec, opts)?.with_e_fci(self.ground.energy))
    }
}

/// Resolves `source` as a file path first, then as a built-in fixture name.
/// `base` anchors relative paths.
pub fn resolve_text(source: &str, base: Option<&Path>) -> Result<(String, String), CliError> {
    let mut path = PathBuf::from(source);
    if path.is_relative() {
        if let Some(b) = base {
            path = b.join(&path);
        }
    }
    if path.is_file() {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        return Ok((path.display().to_string(), text));
    }
    match fixture_text(source) {
        Some(t) => Ok((source.to_string(), t.to_string())),
        None => Err(CliError::io(&path, "no such file or built-in fixture")),
    }
}

/// Parses, checks hermiticity, recomputes the ground-state energy and checks
/// it against any stored value.
pub fn load(source: &str, base: Option<&Path>, seed: u64) -> Result<Loaded, CliError> {
    let (name, text) = resolve_text(source, base)?;
    let file = HamiltonianFile::parse_str(&text)?;
    let hamiltonian = file.operator()?;
    let ground = ground_state(&hamiltonian, seed)?;
    if let Some(stored) = file.molecule.as_ref().and_then(|m| m.e_fci) {
        if (stored - ground.energy).abs() > E_FCI_TOL {
            return Err(CliError::Validation(format!(
                "{name}: stored e_fci {stored} differs from recomputed {} by {:.3e}",
                ground.energy,
                (stored - ground.energy).abs()
            )));
        }
    }
    Ok(Loaded { source: name, file, hamiltonian, ground })
}
