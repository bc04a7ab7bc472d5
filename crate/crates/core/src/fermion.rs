//! Jordan-Wigner mapping, excitation generators, the excitation pool and the
//! Hartree-Fock reference.
//!
//! Conventions: spin orbital `q` is qubit `q`, spins interleave (even = up,
//! odd = down) and an occupied orbital is `|1>`. Under these,
//! `a_p^dag = (X_p - i Y_p)/2 * Z_0 ... Z_{p-1}`.
//!
//! Pool operators are stored as Hermitian generators `G = i * tau` with `tau`
//! the anti-Hermitian excitation `a_a^dag a_i - h.c.`; circuit elements are
//! `exp(-i theta G)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{CommutingGenerator, Pauli, PauliString, PauliSum, PauliTerm};
use crate::state::{Ansatz, StateVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    #[serde(default)]
    pub label: String,
}

impl MoleculeSpec {
    pub fn new(n_spin_orbitals: usize, n_electrons: usize, label: impl Into<String>) -> Result<Self> {
        let spec = Self { n_spin_orbitals, n_electrons, label: label.into() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spin_orbitals == 0 || self.n_spin_orbitals > crate::state::MAX_STATE_QUBITS {
            return Err(Error::SizeCap { n: self.n_spin_orbitals, cap: crate::state::MAX_STATE_QUBITS });
        }
        if self.n_electrons > self.n_spin_orbitals {
            return Err(Error::InvalidConfig(format!(
                "{} electrons do not fit in {} spin orbitals",
                self.n_electrons, self.n_spin_orbitals
            )));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_spin_orbitals
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolOptions {
    /// Keep only excitations that conserve the spin z-projection.
    pub spin_conserving: bool,
}

impl Default for PoolOptions {
    fn default() -> Self {
        Self { spin_conserving: true }
    }
}

/// `a_p^dag` (`dagger = true`) or `a_p` as a Pauli sum on `n` qubits.
pub fn jw_ladder(p: usize, dagger: bool, n: usize) -> Result<PauliSum> {
    if p >= n {
        return Err(Error::IndexOutOfRange { index: p, bound: n });
    }
    let chain: Vec<(usize, Pauli)> = (0..p).map(|q| (q, Pauli::Z)).collect();
    let mut x_letters = chain.clone();
    x_letters.push((p, Pauli::X));
    let mut y_letters = chain;
    y_letters.push((p, Pauli::Y));
    let y_coeff = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n,
        vec![
            PauliTerm { coeff: Complex64::new(0.5, 0.0), string: PauliString::from_sparse(n, &x_letters)? },
            PauliTerm { coeff: Complex64::new(0.0, y_coeff), string: PauliString::from_sparse(n, &y_letters)? },
        ],
    )
}

/// Product of ladder operators, leftmost factor acting last.
pub fn ladder_product(ops: &[(usize, bool)], n: usize) -> Result<PauliSum> {
    let mut acc = PauliSum::identity(n, 1.0);
    for &(p, dagger) in ops {
        acc = acc.mul(&jw_ladder(p, dagger, n)?)?;
    }
    Ok(acc)
}

/// Total number operator `sum_q (I - Z_q)/2`.
pub fn number_operator(n: usize) -> PauliSum {
    let mut terms = vec![PauliTerm { coeff: Complex64::new(n as f64 / 2.0, 0.0), string: PauliString::identity(n) }];
    for q in 0..n {
        terms.push(PauliTerm {
            coeff: Complex64::new(-0.5, 0.0),
            string: PauliString::single(n, q, Pauli::Z).expect("q < n"),
        });
    }
    PauliSum::from_terms(n, terms).expect("widths match")
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Excitation {
    Single { occ: usize, virt: usize },
    Double { occ: [usize; 2], virt: [usize; 2] },
}

impl Excitation {
    /// Twice the spin z-projection change (0 for spin-conserving excitations).
    pub fn spin_change(&self) -> i64 {
        let s = |q: usize| if q.is_multiple_of(2) { 1i64 } else { -1 };
        match *self {
            Excitation::Single { occ, virt } => s(virt) - s(occ),
            Excitation::Double { occ, virt } => s(virt[0]) + s(virt[1]) - s(occ[0]) - s(occ[1]),
        }
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Excitation::Single { occ, virt } => write!(f, "s({occ}->{virt})"),
            Excitation::Double { occ, virt } => write!(f, "d({},{}->{},{})", occ[0], occ[1], virt[0], virt[1]),
        }
    }
}

/// One pool entry: a Hermitian generator with exactly-exponentiable strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolOperator {
    pub label: String,
    pub excitation: Option<Excitation>,
    pub generator: CommutingGenerator,
}

impl PoolOperator {
    /// Wraps an arbitrary Hermitian, mutually commuting sum.
    pub fn custom(label: impl Into<String>, sum: PauliSum) -> Result<Self> {
        Ok(Self { label: label.into(), excitation: None, generator: CommutingGenerator::new(sum)? })
    }

    pub fn operator(&self) -> &PauliSum {
        self.generator.sum()
    }
}

fn ensure_distinct(indices: &[usize], n: usize) -> Result<()> {
    for (k, &p) in indices.iter().enumerate() {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, bound: n });
        }
        if indices[..k].contains(&p) {
            return Err(Error::InvalidExcitation(format!("repeated orbital {p} in {indices:?}")));
        }
    }
    Ok(())
}

fn hermitian_from_tau(tau: PauliSum, excitation: Excitation) -> Result<PoolOperator> {
    let g = tau.scale(Complex64::new(0.0, 1.0));
    g.ensure_hermitian()?;
    let real = PauliSum::from_terms(
        g.n_qubits(),
        g.terms().iter().map(|t| PauliTerm { coeff: Complex64::new(t.coeff.re, 0.0), string: t.string }).collect(),
    )?;
    Ok(PoolOperator { label: excitation.to_string(), excitation: Some(excitation), generator: CommutingGenerator::new(real)? })
}

/// `G = i (a_a^dag a_i - a_i^dag a_a)`.
pub fn single_excitation_generator(i: usize, a: usize, n: usize) -> Result<PoolOperator> {
    ensure_distinct(&[i, a], n)?;
    let fwd = ladder_product(&[(a, true), (i, false)], n)?;
    let bwd = ladder_product(&[(i, true), (a, false)], n)?;
    hermitian_from_tau(fwd.sub(&bwd)?, Excitation::Single { occ: i, virt: a })
}

/// `G = i (a_a^dag a_b^dag a_j a_i - a_i^dag a_j^dag a_b a_a)` with `i < j`, `a < b`.
pub fn double_excitation_generator(i: usize, j: usize, a: usize, b: usize, n: usize) -> Result<PoolOperator> {
    ensure_distinct(&[i, j, a, b], n)?;
    if i > j || a > b {
        return Err(Error::InvalidExcitation(format!(
            "double excitation indices must be ordered (i<j, a<b), got ({i},{j},{a},{b})"
        )));
    }
    let fwd = ladder_product(&[(a, true), (b, true), (j, false), (i, false)], n)?;
    let bwd = ladder_product(&[(i, true), (j, true), (b, false), (a, false)], n)?;
    hermitian_from_tau(fwd.sub(&bwd)?, Excitation::Double { occ: [i, j], virt: [a, b] })
}

/// Ordered operator pool.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorPool {
    operators: Vec<PoolOperator>,
}

impl OperatorPool {
    pub fn new(operators: Vec<PoolOperator>) -> Result<Self> {
        if let Some(first) = operators.first() {
            let n = first.generator.n_qubits();
            if let Some(bad) = operators.iter().find(|o| o.generator.n_qubits() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: bad.generator.n_qubits() });
            }
        }
        Ok(Self { operators })
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, j: usize) -> Result<&PoolOperator> {
        self.operators.get(j).ok_or(Error::IndexOutOfRange { index: j, bound: self.operators.len() })
    }

    pub fn operators(&self) -> &[PoolOperator] {
        &self.operators
    }

    pub fn iter(&self) -> impl Iterator<Item = &PoolOperator> {
        self.operators.iter()
    }
}

fn pairs(v: &[usize]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for (k, &p) in v.iter().enumerate() {
        for &q in &v[k + 1..] {
            out.push([p, q]);
        }
    }
    out
}

/// Singles then doubles, each block in lexicographic index order, relative to
/// the Hartree-Fock occupation `{0, ..., n_electrons - 1}`.
pub fn build_pool(spec: &MoleculeSpec, opts: &PoolOptions) -> Result<OperatorPool> {
    spec.validate()?;
    let n = spec.n_spin_orbitals;
    let occ: Vec<usize> = (0..spec.n_electrons).collect();
    let virt: Vec<usize> = (spec.n_electrons..n).collect();
    let keep = |e: &Excitation| !opts.spin_conserving || e.spin_change() == 0;

    let mut ops = Vec::new();
    for &i in &occ {
        for &a in &virt {
            if keep(&Excitation::Single { occ: i, virt: a }) {
                ops.push(single_excitation_generator(i, a, n)?);
            }
        }
    }
    for o in pairs(&occ) {
        for v in pairs(&virt) {
            if keep(&Excitation::Double { occ: o, virt: v }) {
                ops.push(double_excitation_generator(o[0], o[1], v[0], v[1], n)?);
            }
        }
    }
    OperatorPool::new(ops)
}

/// Basis state with qubits `0..n_electrons` set.
pub fn hf_reference(spec: &MoleculeSpec) -> Result<StateVector> {
    spec.validate()?;
    let index = if spec.n_electrons == 0 { 0 } else { (1usize << spec.n_electrons) - 1 };
    StateVector::basis(spec.n_spin_orbitals, index)
}

/// Fixed UCCSD layout: every pool generator once (singles, then doubles), all angles zero.
pub fn uccsd_ansatz(spec: &MoleculeSpec, opts: &PoolOptions) -> Result<Ansatz> {
    let pool = build_pool(spec, opts)?;
    Ok(Ansatz::from_indices(0..pool.len()))
}
