//! Pool gradient, pool metric, natural gradient and the ansatz
//! Fubini-Study metric.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::OperatorPool;
use crate::pauli::PauliSum;
use crate::state::{apply_sum_raw, derivative_states, inner, Ansatz, StateVector};

/// Tikhonov scale applied before every metric solve.
pub const DEFAULT_REG: f64 = 1e-8;

/// Sentinel for `rho_hat` when the selected diagonal entry vanishes.
pub const RHO_UNDEFINED: f64 = f64::NEG_INFINITY;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalGradient {
    pub values: Vec<f64>,
    /// `sqrt(g^T x)` for the regularized solution `x`.
    pub fnorm: f64,
    pub regularization_used: f64,
}

impl NaturalGradient {
    /// Plain gradient with the identity metric: `x = g`, `fnorm = |g|`.
    pub fn euclidean(g: &[f64]) -> Self {
        let fnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { values: g.to_vec(), fnorm, regularization_used: 0.0 }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiagnostics {
    pub mu_hat: f64,
    pub lambda_hat: f64,
    pub rho_hat: f64,
}

/// `O_j|v>` for every pool operator.
fn applied(pool: &OperatorPool, v: &[Complex64]) -> Vec<Vec<Complex64>> {
    pool.operators().par_iter().map(|op| apply_sum_raw(op.operator(), v)).collect()
}

/// `2 Im <xi| O_j |chi>` for every pool operator.
pub fn pool_gradient_raw(pool: &OperatorPool, xi: &[Complex64], chi: &[Complex64]) -> Vec<f64> {
    pool.operators().par_iter().map(|op| 2.0 * inner(xi, &apply_sum_raw(op.operator(), chi)).im).collect()
}

fn check_width(pool: &OperatorPool, n: usize) -> Result<()> {
    match pool.operators().first() {
        Some(op) if op.generator.n_qubits() != n => {
            Err(Error::DimensionMismatch { expected: op.generator.n_qubits(), got: n })
        }
        _ => Ok(()),
    }
}

/// `g_j = -i <[H, O_j]> = 2 Im <psi|H O_j|psi>`.
pub fn pool_gradient(h: &PauliSum, pool: &OperatorPool, state: &StateVector) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    if h.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: h.n_qubits(), got: state.n_qubits() });
    }
    check_width(pool, state.n_qubits())?;
    let hpsi = apply_sum_raw(h, state.amplitudes());
    Ok(pool_gradient_raw(pool, &hpsi, state.amplitudes()))
}

/// Pool covariance matrix on raw (unit-norm) amplitudes.
pub fn pool_metric_raw(pool: &OperatorPool, v: &[Complex64]) -> DMatrix<f64> {
    let m = pool.len();
    let ov = applied(pool, v);
    let means: Vec<f64> = ov.iter().map(|o| inner(v, o).re).collect();
    let upper: Vec<(usize, usize, f64)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let ov = &ov;
            let means = &means;
            (i..m).map(move |j| (i, j, inner(&ov[i], &ov[j]).re - means[i] * means[j]))
        })
        .collect();
    let mut f = DMatrix::zeros(m, m);
    for (i, j, c) in upper {
        f[(i, j)] = c;
        f[(j, i)] = c;
    }
    f
}

/// `F_ij = Cov(O_i, O_j)` on `state`.
pub fn pool_metric(pool: &OperatorPool, state: &StateVector) -> Result<DMatrix<f64>> {
    check_width(pool, state.n_qubits())?;
    Ok(pool_metric_raw(pool, state.amplitudes()))
}

/// `lambda = reg * max(1, tr(F)/M)`.
pub fn regularization(f: &DMatrix<f64>, reg: f64) -> f64 {
    let m = f.nrows();
    if m == 0 {
        return reg;
    }
    reg * (f.trace() / m as f64).max(1.0)
}

/// Solves `(F + lambda I) x = g`, Cholesky first and LU as fallback.
pub fn regularized_solve(f: &DMatrix<f64>, g: &[f64], reg: f64) -> Result<(Vec<f64>, f64)> {
    let m = g.len();
    if f.nrows() != m || f.ncols() != m {
        return Err(Error::DimensionMismatch { expected: f.nrows(), got: m });
    }
    if reg < 0.0 || !reg.is_finite() {
        return Err(Error::InvalidConfig(format!("regularization must be finite and >= 0, got {reg}")));
    }
    if m == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let lambda = regularization(f, reg);
    let a = f + DMatrix::identity(m, m) * lambda;
    let b = DVector::from_column_slice(g);
    let x = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => a.lu().solve(&b).ok_or_else(|| Error::SingularMetric(format!("lambda = {lambda:.3e}")))?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMetric(format!("non-finite solution, lambda = {lambda:.3e}")));
    }
    Ok((x.iter().copied().collect(), lambda))
}

/// `g~ = (F + lambda I)^{-1} g` and its F-norm.
pub fn natural_gradient(f: &DMatrix<f64>, g: &[f64], reg: f64) -> Result<NaturalGradient> {
    let (x, lambda) = regularized_solve(f, g, reg)?;
    let gx: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(NaturalGradient { values: x, fnorm: gx.max(0.0).sqrt(), regularization_used: lambda })
}

/// `|(F + lambda I) x - g|_2`.
pub fn solve_residual(f: &DMatrix<f64>, ng: &NaturalGradient, g: &[f64]) -> f64 {
    let m = g.len();
    if m == 0 {
        return 0.0;
    }
    let x = DVector::from_column_slice(&ng.values);
    let r = (f + DMatrix::identity(m, m) * ng.regularization_used) * x - DVector::from_column_slice(g);
    r.norm()
}

pub fn fnorm_stopping(ng: &NaturalGradient, eps: f64) -> bool {
    ng.fnorm < eps
}

/// Fubini-Study metric from precomputed derivative states.
pub fn metric_from_derivatives(psi: &[Complex64], derivs: &[Vec<Complex64>]) -> DMatrix<f64> {
    let k = derivs.len();
    let overlaps: Vec<Complex64> = derivs.iter().map(|d| inner(d, psi)).collect();
    let mut f = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = (inner(&derivs[i], &derivs[j]) - overlaps[i] * overlaps[j].conj()).re;
            f[(i, j)] = v;
            f[(j, i)] = v;
        }
    }
    f
}

/// `F_ij = Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]`.
pub fn ansatz_metric(ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector) -> Result<DMatrix<f64>> {
    let (psi, derivs) = derivative_states(ansatz, pool, reference)?;
    Ok(metric_from_derivatives(psi.amplitudes(), &derivs))
}

/// Block partition of the ansatz parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BlockSpec {
    #[default]
    Singletons,
    Full,
    Explicit(Vec<Vec<usize>>),
}

impl BlockSpec {
    pub fn partition(&self, k: usize) -> Vec<Vec<usize>> {
        match self {
            BlockSpec::Singletons => (0..k).map(|i| vec![i]).collect(),
            BlockSpec::Full if k == 0 => Vec::new(),
            BlockSpec::Full => vec![(0..k).collect()],
            BlockSpec::Explicit(b) => b.clone(),
        }
    }
}

/// Zeroes every entry of `m` outside the blocks.
pub fn mask_blocks(m: &DMatrix<f64>, blocks: &[Vec<usize>]) -> Result<DMatrix<f64>> {
    let k = m.nrows();
    let mut owner = vec![usize::MAX; k];
    for (b, block) in blocks.iter().enumerate() {
        for &i in block {
            if i >= k {
                return Err(Error::InvalidPartition(format!("index {i} outside 0..{k}")));
            }
            if owner[i] != usize::MAX {
                return Err(Error::InvalidPartition(format!("index {i} appears in two blocks")));
            }
            owner[i] = b;
        }
    }
    if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::InvalidPartition(format!("index {i} not covered")));
    }
    Ok(DMatrix::from_fn(k, k, |i, j| if owner[i] == owner[j] { m[(i, j)] } else { 0.0 }))
}

pub fn block_diag_metric(
    ansatz: &Ansatz,
    pool: &OperatorPool,
    reference: &StateVector,
    blocks: &[Vec<usize>],
) -> Result<DMatrix<f64>> {
    mask_blocks(&ansatz_metric(ansatz, pool, reference)?, blocks)
}

/// Extreme eigenvalues of `F` and the diagonal-dominance margin of `row`.
pub fn spectral_diagnostics(f: &DMatrix<f64>, row: usize) -> Result<SpectralDiagnostics> {
    let m = f.nrows();
    if row >= m {
        return Err(Error::IndexOutOfRange { index: row, bound: m });
    }
    let eig = f.clone().symmetric_eigen().eigenvalues;
    let diag = f[(row, row)];
    let off: f64 = (0..m).filter(|&t| t != row).map(|t| f[(row, t)].abs()).sum();
    let rho_hat = if diag == 0.0 { RHO_UNDEFINED } else { 1.0 - off / diag };
    Ok(SpectralDiagnostics { mu_hat: eig.min(), lambda_hat: eig.max(), rho_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::fermion::PoolOperator;

    fn pool_of(letters: &[&str]) -> OperatorPool {
        OperatorPool::new(
            letters
                .iter()
                .map(|l| PoolOperator::custom(*l, PauliSum::from_letters(&[(1.0, l)]).unwrap()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn xz_metric_on_zero() {
        let f = pool_metric(&pool_of(&["X", "Z"]), &StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(f, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn eigenstate_gives_zero_metric() {
        let f = pool_metric(&pool_of(&["Z"]), &StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(f[(0, 0)], 0.0);
        let ng = natural_gradient(&f, &[0.0], DEFAULT_REG).unwrap();
        assert_eq!(ng.values, vec![0.0]);
    }

    #[test]
    fn identity_metric_reduces_to_gradient() {
        let g = [0.3, -0.4];
        let ng = natural_gradient(&DMatrix::identity(2, 2), &g, DEFAULT_REG).unwrap();
        for (a, b) in ng.values.iter().zip(&g) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((ng.fnorm - 0.5).abs() < 1e-8);
        let e = NaturalGradient::euclidean(&g);
        assert_eq!(e.values, g.to_vec());
        assert_eq!(e.fnorm, 0.5);
    }

    #[test]
    fn diagonal_scaling() {
        let ng = natural_gradient(&(DMatrix::identity(2, 2) * 2.0), &[1.0, 0.0], DEFAULT_REG).unwrap();
        assert!((ng.values[0] - 0.5).abs() < 1e-8);
        assert_eq!(ng.values[1], 0.0);
    }

    #[test]
    fn stopping_rule() {
        let mut ng = NaturalGradient::euclidean(&[0.0]);
        assert!(fnorm_stopping(&ng, 1e-12));
        ng.fnorm = 1e-3;
        assert!(!fnorm_stopping(&ng, 1e-4));
    }

    #[test]
    fn spectral_examples() {
        let d = spectral_diagnostics(&DMatrix::identity(3, 3), 1).unwrap();
        assert_eq!((d.mu_hat, d.lambda_hat, d.rho_hat), (1.0, 1.0, 1.0));
        let f = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let d = spectral_diagnostics(&f, 0).unwrap();
        assert!((d.mu_hat - 1.0).abs() < 1e-12 && (d.lambda_hat - 3.0).abs() < 1e-12);
        assert_eq!(d.rho_hat, 0.5);
        let z = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(spectral_diagnostics(&z, 0).unwrap().rho_hat, RHO_UNDEFINED);
        assert!(spectral_diagnostics(&z, 2).is_err());
    }

    #[test]
    fn block_masks() {
        let m = DMatrix::from_fn(3, 3, |i, j| (1 + i + 3 * j) as f64);
        assert_eq!(mask_blocks(&m, &BlockSpec::Full.partition(3)).unwrap(), m);
        assert_eq!(mask_blocks(&m, &BlockSpec::Singletons.partition(3)).unwrap(), DMatrix::from_diagonal(&m.diagonal()));
        let b = mask_blocks(&m, &[vec![0, 2], vec![1]]).unwrap();
        assert_eq!(b[(0, 2)], m[(0, 2)]);
        assert_eq!(b[(0, 1)], 0.0);
        assert!(mask_blocks(&m, &[vec![0, 1]]).is_err());
        assert!(mask_blocks(&m, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(mask_blocks(&m, &[vec![0, 1, 2, 3]]).is_err());
    }

    #[test]
    fn single_parameter_metric_is_variance() {
        let pool = pool_of(&["Y"]);
        let reference = StateVector::basis(1, 0).unwrap();
        let mut a = Ansatz::from_indices([0]);
        a.set_thetas(&[0.7]).unwrap();
        let f = ansatz_metric(&a, &pool, &reference).unwrap();
        assert!((f[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_is_stationary() {
        let h = PauliSum::from_letters(&[(0.5, "XX"), (0.5, "YY"), (0.5, "ZZ"), (0.2, "ZI")]).unwrap();
        let m = dense::sum_matrix(&h).unwrap();
        let eig = m.symmetric_eigen();
        let idx = eig.eigenvalues.imin();
        let v: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let s = StateVector::normalized(2, v).unwrap();
        let pool = pool_of(&["XY", "YX", "YI", "IY"]);
        let g = pool_gradient(&h, &pool, &s).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8));
    }
}
