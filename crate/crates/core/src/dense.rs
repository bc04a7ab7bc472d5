//! Dense reference matrices.
//!
//! Everything here is built from explicit 2x2 blocks and Kronecker products,
//! never from the bitmask algebra, so it can serve as an independent oracle
//! for the Pauli algebra, the Jordan-Wigner map and the state engine. Sizes
//! are capped; these are test and validation tools.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Cap for general dense operators.
pub const DENSE_CAP: usize = 10;
/// Cap for the fermionic ladder-operator oracle.
pub const FERMION_CAP: usize = 6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn letter_matrix(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match p {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// Kronecker product of per-qubit blocks, qubit 0 as the least significant
/// factor (rightmost in the product).
pub fn kron_qubits(blocks: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, c(1.0, 0.0));
    for b in blocks.iter() {
        out = b.kronecker(&out);
    }
    out
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCap { n, cap })
    } else {
        Ok(())
    }
}

pub fn string_matrix(s: &PauliString) -> Result<CMatrix> {
    check_cap(s.n_qubits(), DENSE_CAP)?;
    let blocks: Vec<CMatrix> = (0..s.n_qubits()).map(|q| letter_matrix(s.letter(q))).collect();
    Ok(kron_qubits(&blocks))
}

pub fn sum_matrix(sum: &PauliSum) -> Result<CMatrix> {
    check_cap(sum.n_qubits(), DENSE_CAP)?;
    let dim = 1usize << sum.n_qubits();
    let mut out = CMatrix::zeros(dim, dim);
    for t in sum.terms() {
        out += string_matrix(&t.string)? * t.coeff;
    }
    Ok(out)
}

/// JW ladder matrix: Z on qubits below `p`, `|1><0|` (create) or `|0><1|`
/// (annihilate) on `p`, identity above.
pub fn ladder_matrix(p: usize, dagger: bool, n: usize) -> Result<CMatrix> {
    check_cap(n, FERMION_CAP)?;
    if p >= n {
        return Err(Error::IndexOutOfRange { index: p, bound: n });
    }
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let local = if dagger {
        CMatrix::from_row_slice(2, 2, &[z, z, one, z])
    } else {
        CMatrix::from_row_slice(2, 2, &[z, one, z, z])
    };
    let blocks: Vec<CMatrix> = (0..n)
        .map(|q| {
            if q < p {
                letter_matrix(Pauli::Z)
            } else if q == p {
                local.clone()
            } else {
                letter_matrix(Pauli::I)
            }
        })
        .collect();
    Ok(kron_qubits(&blocks))
}

/// Dense matrix of a product of ladder operators, `(orbital, dagger)` applied
/// left to right as written (the leftmost factor acts last).
pub fn fermionic_matrix_oracle(ops: &[(usize, bool)], n: usize) -> Result<CMatrix> {
    check_cap(n, FERMION_CAP)?;
    let dim = 1usize << n;
    let mut out = CMatrix::identity(dim, dim);
    for &(p, dagger) in ops {
        out *= ladder_matrix(p, dagger, n)?;
    }
    Ok(out)
}

/// Linear combination of ladder-operator products.
pub fn fermionic_sum_oracle(terms: &[(Complex64, Vec<(usize, bool)>)], n: usize) -> Result<CMatrix> {
    check_cap(n, FERMION_CAP)?;
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for (coeff, ops) in terms {
        out += fermionic_matrix_oracle(ops, n)? * *coeff;
    }
    Ok(out)
}

/// `exp(-i t G)` by nalgebra's scaling-and-squaring Pade exponential.
pub fn expm_generator(g: &CMatrix, t: f64) -> CMatrix {
    (g * c(0.0, -t)).exp()
}

pub fn basis_vector(n: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(1 << n);
    v[index] = c(1.0, 0.0);
    v
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real symmetric minimum eigenvalue, used by metric checks.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigen().eigenvalues.min()
}
