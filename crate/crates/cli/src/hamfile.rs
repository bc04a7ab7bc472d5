//! Sectioned text format for qubit Hamiltonians.
//!
//! ```text
//! # comment
//! [hamiltonian]
//! n_qubits = 4
//!
//! [molecule]            # optional
//! label = h2
//! n_electrons = 2
//! nuclear_repulsion = 0.715   # added to the identity term
//! e_fci = -1.137              # optional, total energy
//!
//! [terms]
//! -0.81 IIII
//! 0.17 ZZII
//! ```
//! Letters are I/X/Y/Z, leftmost letter is qubit 0. Duplicate strings are summed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use geoadapt::fermion::MoleculeSpec;
use geoadapt::pauli::{PauliString, PauliSum, PauliTerm};
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct MoleculeMeta {
    pub label: String,
    pub n_electrons: usize,
    pub nuclear_repulsion: f64,
    pub e_fci: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianFile {
    pub n_qubits: usize,
    /// Canonical terms (sorted, merged), nuclear repulsion excluded.
    pub terms: PauliSum,
    pub molecule: Option<MoleculeMeta>,
}

#[derive(PartialEq)]
enum Section {
    None,
    Hamiltonian,
    Molecule,
    Terms,
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| parse_err(line, format!("invalid value '{v}' for {key}")))
}

fn finite(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = parse_num(line, key, v)?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("{key} must be finite")));
    }
    Ok(x)
}

impl HamiltonianFile {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut section = Section::None;
        let mut n_qubits: Option<usize> = None;
        let mut meta: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut raw: Vec<(usize, f64, String)> = Vec::new();
        let mut seen_molecule = false;

        for (idx, full) in text.lines().enumerate() {
            let line = idx + 1;
            let content = full.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                section = match content {
                    "[hamiltonian]" => Section::Hamiltonian,
                    "[molecule]" => {
                        seen_molecule = true;
                        Section::Molecule
                    }
                    "[terms]" => Section::Terms,
                    other => return Err(parse_err(line, format!("unknown section {other}"))),
                };
                continue;
            }
            match section {
                Section::None => return Err(parse_err(line, "content before the first section")),
                Section::Hamiltonian | Section::Molecule => {
                    let (k, v) = content
                        .split_once('=')
                        .ok_or_else(|| parse_err(line, "expected 'key = value'"))?;
                    let (k, v) = (k.trim(), v.trim());
                    if section == Section::Hamiltonian {
                        match k {
                            "n_qubits" => n_qubits = Some(parse_num(line, k, v)?),
                            _ => return Err(parse_err(line, format!("unknown key '{k}' in [hamiltonian]"))),
                        }
                    } else {
                        if !matches!(k, "label" | "n_electrons" | "nuclear_repulsion" | "e_fci") {
                            return Err(parse_err(line, format!("unknown key '{k}' in [molecule]")));
                        }
                        if meta.insert(k.to_string(), (line, v.to_string())).is_some() {
                            return Err(parse_err(line, format!("duplicate key '{k}'")));
                        }
                    }
                }
                Section::Terms => {
                    let mut parts = content.split_whitespace();
                    let (Some(c), Some(s), None) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(parse_err(line, "expected '<coefficient> <pauli letters>'"));
                    };
                    raw.push((line, finite(line, "coefficient", c)?, s.to_string()));
                }
            }
        }

        let n_qubits = n_qubits.ok_or_else(|| parse_err(0, "missing n_qubits in [hamiltonian]"))?;
        if n_qubits == 0 || n_qubits > geoadapt::state::MAX_STATE_QUBITS {
            return Err(parse_err(0, format!("n_qubits must be in 1..={}", geoadapt::state::MAX_STATE_QUBITS)));
        }
        let mut terms = Vec::with_capacity(raw.len());
        for (line, c, s) in raw {
            if s.chars().count() != n_qubits {
                return Err(parse_err(line, format!("pauli string '{s}' has length {}, expected {n_qubits}", s.len())));
            }
            let string = PauliString::from_letters(&s).map_err(|e| parse_err(line, e.to_string()))?;
            terms.push(PauliTerm { coeff: Complex64::new(c, 0.0), string });
        }
        let terms = PauliSum::from_terms(n_qubits, terms).map_err(|e| CliError::Validation(e.to_string()))?;

        let molecule = if seen_molecule {
            let get = |k: &str| meta.get(k).map(|(l, v)| (*l, v.as_str()));
            let (l, ne) = get("n_electrons").ok_or_else(|| parse_err(0, "[molecule] requires n_electrons"))?;
            let n_electrons: usize = parse_num(l, "n_electrons", ne)?;
            let nuclear_repulsion = match get("nuclear_repulsion") {
                Some((l, v)) => finite(l, "nuclear_repulsion", v)?,
                None => 0.0,
            };
            let e_fci = get("e_fci").map(|(l, v)| finite(l, "e_fci", v)).transpose()?;
            let label = get("label").map(|(_, v)| v.to_string()).unwrap_or_default();
            Some(MoleculeMeta { label, n_electrons, nuclear_repulsion, e_fci })
        } else {
            None
        };
        let file = Self { n_qubits, terms, molecule };
        if let Some(spec) = file.spec() {
            spec.map_err(|e| CliError::Validation(e.to_string()))?;
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text)
    }

    /// Full operator including the nuclear-repulsion identity offset.
    pub fn operator(&self) -> Result<PauliSum, CliError> {
        let offset = self.molecule.as_ref().map_or(0.0, |m| m.nuclear_repulsion);
        let h = if offset == 0.0 {
            self.terms.clone()
        } else {
            self.terms
                .add(&PauliSum::identity(self.n_qubits, offset))
                .map_err(|e| CliError::Validation(e.to_string()))?
        };
        h.ensure_hermitian().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(h)
    }

    pub fn spec(&self) -> Option<Result<MoleculeSpec, geoadapt::Error>> {
        self.molecule.as_ref().map(|m| MoleculeSpec::new(self.n_qubits, m.n_electrons, m.label.clone()))
    }

    /// Text form that parses back to an identical file.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[hamiltonian]\nn_qubits = {}", self.n_qubits);
        if let Some(m) = &self.molecule {
            let _ = writeln!(out, "\n[molecule]");
            if !m.label.is_empty() {
                let _ = writeln!(out, "label = {}", m.label);
            }
            let _ = writeln!(out, "n_electrons = {}", m.n_electrons);
            let _ = writeln!(out, "nuclear_repulsion = {:?}", m.nuclear_repulsion);
            if let Some(e) = m.e_fci {
                let _ = writeln!(out, "e_fci = {e:?}");
            }
        }
        let _ = writeln!(out, "\n[terms]");
        for t in self.terms.terms() {
            let _ = writeln!(out, "{:?} {}", t.coeff.re, t.string);
        }
        out
    }
}
