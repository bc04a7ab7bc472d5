//! Reference ground-state energies: dense diagonalization for small
//! registers and matrix-free Lanczos with full reorthogonalization above that.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::{apply_sum_raw, inner, norm, MAX_STATE_QUBITS};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;
pub const DENSE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub energy: f64,
    /// `||Hv - Ev||` for the returned unit vector.
    pub residual: f64,
    pub iterations: usize,
    /// Lowest Ritz value after each Lanczos step (empty for the dense path).
    #[serde(default)]
    pub ritz_history: Vec<f64>,
}

fn residual_of(h: &PauliSum, v: &[Complex64], e: f64) -> f64 {
    let hv = apply_sum_raw(h, v);
    let r: Vec<Complex64> = hv.iter().zip(v).map(|(a, b)| a - b * e).collect();
    norm(&r)
}

pub fn dense_ground_state(h: &PauliSum) -> Result<GroundStateResult> {
    if h.n_qubits() > DENSE_LIMIT {
        return Err(Error::SizeCap { n: h.n_qubits(), cap: DENSE_LIMIT });
    }
    h.ensure_hermitian()?;
    let m = dense::sum_matrix(h)?;
    let eig = m.symmetric_eigen();
    let (idx, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    Ok(GroundStateResult { energy, residual: residual_of(h, &v, energy), iterations: 1, ritz_history: Vec::new() })
}

fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (val, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Lowest eigenvalue of `h` by Lanczos from a seeded random start vector.
pub fn lanczos_ground_energy(h: &PauliSum, tol: f64, max_iter: usize, seed: u64) -> Result<GroundStateResult> {
    h.ensure_hermitian()?;
    let n = h.n_qubits();
    if n > MAX_STATE_QUBITS {
        return Err(Error::SizeCap { n, cap: MAX_STATE_QUBITS });
    }
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|z| *z /= nq);

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    let limit = max_iter.min(dim);
    let mut best = (f64::INFINITY, f64::INFINITY);

    for it in 1..=limit {
        let mut w = apply_sum_raw(h, &q);
        let a = inner(&q, &w).re;
        basis.push(q.clone());
        alpha.push(a);
        // Full reorthogonalization, two passes.
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= y * c);
            }
        }
        let b_next = norm(&w);
        let (theta, y) = lowest_ritz(&alpha, &beta);
        history.push(theta);
        let estimate = b_next * y.last().expect("non-empty").abs();
        let exhausted = b_next <= 1e-12 * (1.0 + theta.abs());
        if estimate <= tol || exhausted || it == limit {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (coef, b) in y.iter().zip(&basis) {
                v.iter_mut().zip(b).for_each(|(x, z)| *x += z * *coef);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|z| *z /= nv);
            let residual = residual_of(h, &v, theta);
            best = (theta, residual);
            if residual <= tol {
                return Ok(GroundStateResult { energy: theta, residual, iterations: it, ritz_history: history });
            }
            if it == limit || exhausted {
                break;
            }
        }
        beta.push(b_next);
        q = w.into_iter().map(|z| z / b_next).collect();
    }
    Err(Error::Convergence { energy: best.0, residual: best.1, iterations: alpha.len() })
}

/// Dense path up to [`DENSE_LIMIT`] qubits, Lanczos above.
pub fn ground_state(h: &PauliSum, seed: u64) -> Result<GroundStateResult> {
    if h.n_qubits() <= DENSE_LIMIT {
        dense_ground_state(h)
    } else {
        lanczos_ground_energy(h, 1e-8, 400, seed)
    }
}
