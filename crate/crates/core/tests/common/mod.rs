//! Dense-matrix and finite-difference oracles shared by the integration
//! tests and the acceptance suite. Nothing here calls the bitmask algebra
//! to produce an expected value.

#![allow(dead_code)]

use geoadapt::dense::{expm_generator, fermionic_sum_oracle, kron_qubits, letter_matrix, sum_matrix, CMatrix, CVector};
use geoadapt::fermion::{
    build_pool, double_excitation_generator, jw_ladder, single_excitation_generator, MoleculeSpec, OperatorPool,
    PoolOptions,
};
use geoadapt::geometry::{ansatz_metric, pool_gradient, pool_gradient_raw, pool_metric};
use geoadapt::pauli::{Pauli, PauliString, PauliSum, PauliTerm};
use geoadapt::state::{
    apply_exp_generator, apply_sum_raw, energy_gradient, prefix_states, suffix_adjoint_states, Ansatz,
    AnsatzElement, StateVector,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense matrix of a letter string, qubit 0 leftmost, built letter by letter.
pub fn letters_matrix(text: &str) -> CMatrix {
    let blocks: Vec<CMatrix> = text
        .chars()
        .map(|ch| {
            letter_matrix(match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => panic!("bad letter {ch}"),
            })
        })
        .collect();
    kron_qubits(&blocks)
}

pub fn all_strings(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out.iter().flat_map(|s| "IXYZ".chars().map(move |ch| format!("{s}{ch}"))).collect();
    }
    out
}

pub fn random_letters(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect()
}

/// Random sum with complex coefficients, plus the dense matrix built from
/// the letter strings directly.
pub fn random_sum(rng: &mut ChaCha8Rng, n: usize, n_terms: usize) -> (PauliSum, CMatrix) {
    let dim = 1 << n;
    let mut dense = CMatrix::zeros(dim, dim);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let text = random_letters(rng, n);
        let coeff = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        dense += letters_matrix(&text) * coeff;
        terms.push(PauliTerm { coeff, string: PauliString::from_letters(&text).unwrap() });
    }
    (PauliSum::from_terms(n, terms).unwrap(), dense)
}

/// Random Hermitian sum (real coefficients) and its dense matrix.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, n_terms: usize) -> (PauliSum, CMatrix) {
    let dim = 1 << n;
    let mut dense = CMatrix::zeros(dim, dim);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let text = random_letters(rng, n);
        let coeff = rng.random_range(-1.0..1.0);
        dense += letters_matrix(&text) * c(coeff, 0.0);
        terms.push((coeff, text));
    }
    let refs: Vec<(f64, &str)> = terms.iter().map(|(k, t)| (*k, t.as_str())).collect();
    (PauliSum::from_letters(&refs).unwrap(), dense)
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized(n, amps).unwrap()
}

pub fn to_dense(v: &[Complex64]) -> CVector {
    CVector::from_column_slice(v)
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn vec_diff(a: &CVector, b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// Algebra

#[derive(Debug, Default)]
pub struct AlgebraReport {
    pub exhaustive_cases: usize,
    pub exhaustive_mismatches: usize,
    pub random_cases: usize,
    pub random_max_err: f64,
}

/// Every string pair on 1 and 2 qubits (product and commutator, exact), then
/// `n_random` random 3-4 qubit sum pairs (product and commutator).
pub fn algebra_oracle(n_random: usize, seed: u64) -> AlgebraReport {
    let mut rep = AlgebraReport::default();
    for n in 1..=2 {
        let strings = all_strings(n);
        for a in &strings {
            for b in &strings {
                let pa = PauliString::from_letters(a).unwrap();
                let pb = PauliString::from_letters(b).unwrap();
                let (ma, mb) = (letters_matrix(a), letters_matrix(b));
                let expected = &ma * &mb;
                let (phase, s) = pa.mul(&pb).unwrap();
                let got = letters_matrix(&s.to_string()) * phase.to_complex();
                let sa = PauliSum::from_letters(&[(1.0, a.as_str())]).unwrap();
                let sb = PauliSum::from_letters(&[(1.0, b.as_str())]).unwrap();
                let comm = sum_matrix(&sa.commutator(&sb).unwrap()).unwrap();
                let comm_expected = &ma * &mb - &mb * &ma;
                let commute_flag = pa.commutes_with(&pb) == (comm_expected.iter().all(|z| z.norm() == 0.0));
                rep.exhaustive_cases += 1;
                if got != expected || comm != comm_expected || !commute_flag {
                    rep.exhaustive_mismatches += 1;
                }
            }
        }
    }
    let mut r = rng(seed);
    for _ in 0..n_random {
        let n = r.random_range(3..=4);
        let (ka, kb) = (r.random_range(1..=6), r.random_range(1..=6));
        let (a, da) = random_sum(&mut r, n, ka);
        let (b, db) = random_sum(&mut r, n, kb);
        let prod = sum_matrix(&a.mul(&b).unwrap()).unwrap();
        let comm = sum_matrix(&a.commutator(&b).unwrap()).unwrap();
        let e1 = max_diff(&prod, &(&da * &db));
        let e2 = max_diff(&comm, &(&da * &db - &db * &da));
        rep.random_cases += 1;
        rep.random_max_err = rep.random_max_err.max(e1).max(e2);
    }
    rep
}

// Jordan-Wigner

#[derive(Debug, Default)]
pub struct JwReport {
    pub generators: usize,
    pub generator_max_err: f64,
    pub anticommutators: usize,
    pub anticommutator_max_err: f64,
}

/// `i (T - T^dag)` with `T` the creators in order, then the annihilators reversed.
fn excitation_oracle(create: &[usize], annihilate: &[usize], n: usize) -> CMatrix {
    let mut fwd: Vec<(usize, bool)> = create.iter().map(|&p| (p, true)).collect();
    fwd.extend(annihilate.iter().rev().map(|&p| (p, false)));
    let mut bwd: Vec<(usize, bool)> = annihilate.iter().map(|&p| (p, true)).collect();
    bwd.extend(create.iter().rev().map(|&p| (p, false)));
    fermionic_sum_oracle(&[(c(0.0, 1.0), fwd), (c(0.0, -1.0), bwd)], n).unwrap()
}

/// Every single (all ordered pairs) and every double (`i<j`, `a<b`, disjoint)
/// for `n = 2..=n_max`, plus all ladder anticommutators.
pub fn jw_oracle(n_max: usize) -> JwReport {
    let mut rep = JwReport::default();
    for n in 2..=n_max {
        for i in 0..n {
            for a in 0..n {
                if i == a {
                    continue;
                }
                let op = single_excitation_generator(i, a, n).unwrap();
                let err = max_diff(&sum_matrix(op.operator()).unwrap(), &excitation_oracle(&[a], &[i], n));
                rep.generators += 1;
                rep.generator_max_err = rep.generator_max_err.max(err);
            }
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
        for &(i, j) in &pairs {
            for &(a, b) in &pairs {
                if [a, b].iter().any(|x| *x == i || *x == j) {
                    continue;
                }
                let op = double_excitation_generator(i, j, a, b, n).unwrap();
                let err = max_diff(&sum_matrix(op.operator()).unwrap(), &excitation_oracle(&[a, b], &[i, j], n));
                rep.generators += 1;
                rep.generator_max_err = rep.generator_max_err.max(err);
            }
        }
        let dim = 1 << n;
        for p in 0..n {
            for q in 0..n {
                let ap = jw_ladder(p, false, n).unwrap();
                let aqd = jw_ladder(q, true, n).unwrap();
                let anti = ap.mul(&aqd).unwrap().add(&aqd.mul(&ap).unwrap()).unwrap();
                let expected = if p == q { CMatrix::identity(dim, dim) } else { CMatrix::zeros(dim, dim) };
                let ap2 = jw_ladder(q, false, n).unwrap();
                let same = ap.mul(&ap2).unwrap().add(&ap2.mul(&ap).unwrap()).unwrap();
                let err = max_diff(&sum_matrix(&anti).unwrap(), &expected)
                    .max(max_diff(&sum_matrix(&same).unwrap(), &CMatrix::zeros(dim, dim)));
                rep.anticommutators += 1;
                rep.anticommutator_max_err = rep.anticommutator_max_err.max(err);
            }
        }
    }
    rep
}

// Exponentials

/// Every generator of every 4-qubit pool (all electron counts, no spin
/// filter) at `n_angles` random angles on random states.
pub fn exp_oracle(n_angles: usize, seed: u64) -> (usize, f64) {
    let mut r = rng(seed);
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for ne in 1..=3 {
        let spec = MoleculeSpec::new(4, ne, "").unwrap();
        let pool = build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap();
        for op in pool.iter() {
            let g = sum_matrix(op.operator()).unwrap();
            for _ in 0..n_angles {
                let theta = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                let s = random_state(&mut r, 4);
                let expected = expm_generator(&g, theta) * to_dense(s.amplitudes());
                let got = apply_exp_generator(&s, &op.generator, theta).unwrap();
                worst = worst.max(vec_diff(&expected, got.amplitudes()));
                cases += 1;
            }
        }
    }
    (cases, worst)
}

// Finite differences

pub struct Instance {
    pub h: PauliSum,
    pub h_dense: CMatrix,
    pub pool: OperatorPool,
    pub pool_dense: Vec<CMatrix>,
    pub reference: StateVector,
    pub ansatz: Ansatz,
}

/// Random 4-qubit Hamiltonian, full 4-qubit 2-electron pool, random
/// reference and a random 3-element ansatz.
pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let (h, h_dense) = random_hermitian(&mut r, 4, 10);
    let spec = MoleculeSpec::new(4, 2, "").unwrap();
    let pool = build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap();
    let pool_dense = pool.iter().map(|op| sum_matrix(op.operator()).unwrap()).collect();
    let reference = random_state(&mut r, 4);
    let elements = (0..3)
        .map(|_| AnsatzElement { pool_index: r.random_range(0..pool.len()), theta: r.random_range(-1.0..1.0) })
        .collect();
    Instance { h, h_dense, pool, pool_dense, reference, ansatz: Ansatz::new(elements) }
}

impl Instance {
    /// Dense circuit state for `(pool_index, theta)` elements, first element first.
    pub fn dense_state(&self, elements: &[(usize, f64)]) -> CVector {
        let mut v = to_dense(self.reference.amplitudes());
        for &(j, t) in elements {
            v = expm_generator(&self.pool_dense[j], t) * v;
        }
        v
    }

    pub fn dense_energy(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.h_dense * v)[(0, 0)].re
    }

    pub fn elements(&self) -> Vec<(usize, f64)> {
        self.ansatz.elements().iter().map(|e| (e.pool_index, e.theta)).collect()
    }

    fn with_inserted(&self, p: usize, j: usize, t: f64) -> Vec<(usize, f64)> {
        let mut els = self.elements();
        els.insert(p, (j, t));
        els
    }
}

#[derive(Debug, Default)]
pub struct FdReport {
    pub pool_gradient: f64,
    pub positional_gradient: f64,
    pub energy_gradient: f64,
    pub ansatz_metric: f64,
    pub pool_metric: f64,
}

impl FdReport {
    pub fn max(&self) -> f64 {
        [self.pool_gradient, self.positional_gradient, self.energy_gradient, self.ansatz_metric, self.pool_metric]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn merge(&mut self, o: &FdReport) {
        self.pool_gradient = self.pool_gradient.max(o.pool_gradient);
        self.positional_gradient = self.positional_gradient.max(o.positional_gradient);
        self.energy_gradient = self.energy_gradient.max(o.energy_gradient);
        self.ansatz_metric = self.ansatz_metric.max(o.ansatz_metric);
        self.pool_metric = self.pool_metric.max(o.pool_metric);
    }
}

fn fs_metric(psi: &CVector, derivs: &[CVector]) -> DMatrix<f64> {
    let k = derivs.len();
    DMatrix::from_fn(k, k, |i, j| {
        let a = derivs[i].dotc(&derivs[j]);
        let b = derivs[i].dotc(psi) * psi.dotc(&derivs[j]);
        (a - b).re
    })
}

fn mat_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Central differences with step `h` against the analytic quantities.
pub fn fd_check(inst: &Instance, h: f64) -> FdReport {
    let mut rep = FdReport::default();
    let els = inst.elements();
    let psi_dense = inst.dense_state(&els);
    let psi = geoadapt::state::prepare_state(&inst.ansatz, &inst.pool, &inst.reference).unwrap();
    let m = inst.pool.len();

    let g = pool_gradient(&inst.h, &inst.pool, &psi).unwrap();
    for j in 0..m {
        let e = |t: f64| inst.dense_energy(&inst.dense_state(&inst.with_inserted(els.len(), j, t)));
        let fd = (e(h) - e(-h)) / (2.0 * h);
        rep.pool_gradient = rep.pool_gradient.max((fd - g[j]).abs());
    }

    let prefixes = prefix_states(&inst.ansatz, &inst.pool, &inst.reference).unwrap();
    let hpsi = apply_sum_raw(&inst.h, prefixes.last().unwrap());
    let suffixes = suffix_adjoint_states(&inst.ansatz, &inst.pool, &hpsi);
    for p in 0..=els.len() {
        let gp = pool_gradient_raw(&inst.pool, &suffixes[p], &prefixes[p]);
        for j in 0..m {
            let e = |t: f64| inst.dense_energy(&inst.dense_state(&inst.with_inserted(p, j, t)));
            let fd = (e(h) - e(-h)) / (2.0 * h);
            rep.positional_gradient = rep.positional_gradient.max((fd - gp[j]).abs());
        }
    }

    let eg = energy_gradient(&inst.h, &inst.ansatz, &inst.pool, &inst.reference).unwrap();
    let mut derivs = Vec::new();
    for i in 0..els.len() {
        let shifted = |s: f64| {
            let mut e = els.clone();
            e[i].1 += s;
            inst.dense_state(&e)
        };
        let (plus, minus) = (shifted(h), shifted(-h));
        let fd = (inst.dense_energy(&plus) - inst.dense_energy(&minus)) / (2.0 * h);
        rep.energy_gradient = rep.energy_gradient.max((fd - eg[i]).abs());
        derivs.push((plus - minus) / c(2.0 * h, 0.0));
    }
    let fa = ansatz_metric(&inst.ansatz, &inst.pool, &inst.reference).unwrap();
    rep.ansatz_metric = mat_diff(&fa, &fs_metric(&psi_dense, &derivs));

    let pool_derivs: Vec<CVector> = (0..m)
        .map(|j| {
            let plus = expm_generator(&inst.pool_dense[j], h) * &psi_dense;
            let minus = expm_generator(&inst.pool_dense[j], -h) * &psi_dense;
            (plus - minus) / c(2.0 * h, 0.0)
        })
        .collect();
    let fp = pool_metric(&inst.pool, &psi).unwrap();
    rep.pool_metric = mat_diff(&fp, &fs_metric(&psi_dense, &pool_derivs));
    rep
}
