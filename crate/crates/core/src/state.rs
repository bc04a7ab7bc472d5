//! Exact statevector simulation.
//!
//! Amplitude index bit `q` is qubit `q` (qubit 0 is least significant).
//! Generators are exponentiated exactly, one Pauli rotation per commuting
//! string: `exp(-i t c P) = cos(tc) I - i sin(tc) P`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::OperatorPool;
use crate::pauli::{CommutingGenerator, PauliSum};

/// Largest register the engine will allocate.
pub const MAX_STATE_QUBITS: usize = 24;

/// Tolerance on the unit norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-10;

const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(Error::SizeCap { n: n_qubits, cap: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, bound: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Takes ownership of amplitudes that must already be unit-norm.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(Error::SizeCap { n: n_qubits, cap: MAX_STATE_QUBITS });
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: n_qubits, got: amps.len().trailing_zeros() as usize });
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Logic(format!("state norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let nrm = norm(&amps);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::Logic("cannot normalize a zero or non-finite vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= nrm);
        Self::from_amplitudes(n_qubits, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.n_qubits });
        }
        Ok(())
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`, conjugating `a`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `O|v>` on raw amplitudes; `v.len()` must be `2^n` for the operator's width.
pub fn apply_sum_raw(op: &PauliSum, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for t in op.terms() {
        for (b, &amp) in v.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let (phase, target) = t.string.act_on_basis(b);
            out[target] += phase.apply(t.coeff * amp);
        }
    }
    out
}

/// `O|s>`, generally unnormalized.
pub fn apply_pauli_sum(op: &PauliSum, s: &StateVector) -> Result<Vec<Complex64>> {
    s.check(op.n_qubits())?;
    Ok(apply_sum_raw(op, &s.amps))
}

/// In-place `exp(-i theta G) v` for a mutually commuting generator.
pub fn rotate_in_place(v: &mut [Complex64], g: &CommutingGenerator, theta: f64) {
    if theta == 0.0 {
        return;
    }
    for &(string, c) in g.rotations() {
        let (sin, cos) = (theta * c).sin_cos();
        let x = string.x_mask() as usize;
        if x == 0 {
            // Diagonal string: P|b> = +-|b>, so each amplitude picks up cos -+ i sin.
            for (b, a) in v.iter_mut().enumerate() {
                let (phase, _) = string.act_on_basis(b);
                let pa = phase.apply(*a);
                *a = *a * cos + Complex64::new(pa.im, -pa.re) * sin;
            }
            continue;
        }
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for b in 0..v.len() {
            if b & pivot != 0 {
                continue;
            }
            let partner = b ^ x;
            let (ph_b, _) = string.act_on_basis(b); // P|b> = ph_b |partner>
            let (ph_p, _) = string.act_on_basis(partner); // P|partner> = ph_p |b>
            let vb = v[b];
            let vp = v[partner];
            // new[b] = cos v[b] - i sin (P v)[b], (P v)[b] = ph_p v[partner]
            let pvb = ph_p.apply(vp);
            let pvp = ph_b.apply(vb);
            v[b] = vb * cos + Complex64::new(pvb.im, -pvb.re) * sin;
            v[partner] = vp * cos + Complex64::new(pvp.im, -pvp.re) * sin;
        }
    }
}

/// Exact `exp(-i theta G)|s>`.
pub fn apply_exp_generator(s: &StateVector, g: &CommutingGenerator, theta: f64) -> Result<StateVector> {
    s.check(g.n_qubits())?;
    let mut amps = s.amps.clone();
    rotate_in_place(&mut amps, g, theta);
    Ok(StateVector { n_qubits: s.n_qubits, amps })
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzElement {
    pub pool_index: usize,
    pub theta: f64,
}

/// Ordered product `prod_t exp(-i theta_t O_{j_t})`, element 0 applied first.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Ansatz {
    elements: Vec<AnsatzElement>,
}

impl Ansatz {
    pub fn new(elements: Vec<AnsatzElement>) -> Self {
        Self { elements }
    }

    /// Zero-angle elements for the given pool indices.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self { elements: indices.into_iter().map(|pool_index| AnsatzElement { pool_index, theta: 0.0 }).collect() }
    }

    pub fn elements(&self) -> &[AnsatzElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.theta).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.pool_index).collect()
    }

    pub fn set_thetas(&mut self, thetas: &[f64]) -> Result<()> {
        if thetas.len() != self.elements.len() {
            return Err(Error::IndexOutOfRange { index: thetas.len(), bound: self.elements.len() });
        }
        for (e, &t) in self.elements.iter_mut().zip(thetas) {
            e.theta = t;
        }
        Ok(())
    }

    pub fn with_thetas(&self, thetas: &[f64]) -> Result<Ansatz> {
        let mut a = self.clone();
        a.set_thetas(thetas)?;
        Ok(a)
    }

    pub fn push(&mut self, pool_index: usize, theta: f64) {
        self.elements.push(AnsatzElement { pool_index, theta });
    }

    /// Inserts before the element currently at `position` (`position == len` appends).
    pub fn insert(&mut self, position: usize, pool_index: usize, theta: f64) -> Result<()> {
        if position > self.elements.len() {
            return Err(Error::IndexOutOfRange { index: position, bound: self.elements.len() + 1 });
        }
        self.elements.insert(position, AnsatzElement { pool_index, theta });
        Ok(())
    }

    pub fn validate(&self, pool: &OperatorPool) -> Result<()> {
        match self.elements.iter().find(|e| e.pool_index >= pool.len()) {
            Some(e) => Err(Error::IndexOutOfRange { index: e.pool_index, bound: pool.len() }),
            None => Ok(()),
        }
    }
}

fn check_circuit(ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector) -> Result<()> {
    ansatz.validate(pool)?;
    if let Some(op) = pool.operators().first() {
        reference.check(op.generator.n_qubits())?;
    }
    Ok(())
}

/// Applies the ansatz to `reference`.
pub fn prepare_state(ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector) -> Result<StateVector> {
    check_circuit(ansatz, pool, reference)?;
    let mut amps = reference.amps.clone();
    for e in ansatz.elements() {
        rotate_in_place(&mut amps, &pool.operators()[e.pool_index].generator, e.theta);
    }
    Ok(StateVector { n_qubits: reference.n_qubits, amps })
}

/// All intermediate states: entry `p` is the state after the first `p`
/// elements, so the result has `len + 1` entries and the last is the full state.
pub fn prefix_states(ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector) -> Result<Vec<Vec<Complex64>>> {
    check_circuit(ansatz, pool, reference)?;
    let mut out = Vec::with_capacity(ansatz.len() + 1);
    let mut amps = reference.amps.clone();
    out.push(amps.clone());
    for e in ansatz.elements() {
        rotate_in_place(&mut amps, &pool.operators()[e.pool_index].generator, e.theta);
        out.push(amps.clone());
    }
    Ok(out)
}

/// Back-propagated vectors: entry `p` is `(U_{>p})^dag v` where `U_{>p}` is
/// the product of elements `p..len` (0-based), so entry `len` is `v` itself.
pub fn suffix_adjoint_states(ansatz: &Ansatz, pool: &OperatorPool, v: &[Complex64]) -> Vec<Vec<Complex64>> {
    let k = ansatz.len();
    let mut out = vec![Vec::new(); k + 1];
    let mut cur = v.to_vec();
    out[k] = cur.clone();
    for p in (0..k).rev() {
        let e = ansatz.elements()[p];
        rotate_in_place(&mut cur, &pool.operators()[e.pool_index].generator, -e.theta);
        out[p] = cur.clone();
    }
    out
}

/// `<s|H|s>`; `H` must be Hermitian.
pub fn expectation(h: &PauliSum, s: &StateVector) -> Result<f64> {
    h.ensure_hermitian()?;
    let hs = apply_pauli_sum(h, s)?;
    let e = inner(&s.amps, &hs);
    if e.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::Logic(format!("expectation has imaginary residue {:.3e}", e.im)));
    }
    Ok(e.re)
}

/// `Cov(A,B) = Re<As|Bs> - <A><B>`, equal to `<{A,B}>/2 - <A><B>`.
pub fn covariance(a: &PauliSum, b: &PauliSum, s: &StateVector) -> Result<f64> {
    a.ensure_hermitian()?;
    b.ensure_hermitian()?;
    let as_ = apply_pauli_sum(a, s)?;
    let bs = apply_pauli_sum(b, s)?;
    let ea = inner(&s.amps, &as_).re;
    let eb = inner(&s.amps, &bs).re;
    Ok(inner(&as_, &bs).re - ea * eb)
}

/// `|d_i psi> = U_{>i} (-i G_{j_i}) U_{<=i} |ref>` for 0-based element `position`.
pub fn derivative_state(ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector, position: usize) -> Result<Vec<Complex64>> {
    if position >= ansatz.len() {
        return Err(Error::IndexOutOfRange { index: position, bound: ansatz.len() });
    }
    check_circuit(ansatz, pool, reference)?;
    let mut amps = reference.amps.clone();
    for (t, e) in ansatz.elements().iter().enumerate() {
        let g = &pool.operators()[e.pool_index].generator;
        rotate_in_place(&mut amps, g, e.theta);
        if t == position {
            amps = apply_sum_raw(g.sum(), &amps).into_iter().map(|z| Complex64::new(z.im, -z.re)).collect();
        }
    }
    Ok(amps)
}

/// Final state and every derivative state, sharing the prefix sweep.
pub fn derivative_states(
    ansatz: &Ansatz,
    pool: &OperatorPool,
    reference: &StateVector,
) -> Result<(StateVector, Vec<Vec<Complex64>>)> {
    let prefixes = prefix_states(ansatz, pool, reference)?;
    let els = ansatz.elements();
    let mut derivs = Vec::with_capacity(els.len());
    for i in 0..els.len() {
        let g = &pool.operators()[els[i].pool_index].generator;
        let mut v: Vec<Complex64> =
            apply_sum_raw(g.sum(), &prefixes[i + 1]).into_iter().map(|z| Complex64::new(z.im, -z.re)).collect();
        for e in &els[i + 1..] {
            rotate_in_place(&mut v, &pool.operators()[e.pool_index].generator, e.theta);
        }
        derivs.push(v);
    }
    let psi = StateVector { n_qubits: reference.n_qubits, amps: prefixes.into_iter().last().expect("non-empty") };
    Ok((psi, derivs))
}

/// `dE/dtheta_i = 2 Re <psi|H|d_i psi>`, evaluated with one forward and one
/// backward sweep: `2 Im <xi_i| G_i |chi_i>` where `chi_i` is the state after
/// element `i` and `xi_i` is `H|psi>` propagated back to the same cut.
pub fn energy_gradient(h: &PauliSum, ansatz: &Ansatz, pool: &OperatorPool, reference: &StateVector) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    reference.check(h.n_qubits())?;
    let prefixes = prefix_states(ansatz, pool, reference)?;
    let hpsi = apply_sum_raw(h, prefixes.last().expect("non-empty"));
    let suffixes = suffix_adjoint_states(ansatz, pool, &hpsi);
    Ok(ansatz
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let g = pool.operators()[e.pool_index].generator.sum();
            let gchi = apply_sum_raw(g, &prefixes[i + 1]);
            2.0 * inner(&suffixes[i + 1], &gchi).im
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::PoolOperator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_op_pool(letters: &str) -> OperatorPool {
        OperatorPool::new(vec![PoolOperator::custom(letters, PauliSum::from_letters(&[(1.0, letters)]).unwrap()).unwrap()])
            .unwrap()
    }

    #[test]
    fn identity_sum_keeps_state() {
        let s = StateVector::basis(2, 2).unwrap();
        let out = apply_pauli_sum(&PauliSum::identity(2, 1.0), &s).unwrap();
        assert_eq!(out, s.amplitudes());
    }

    #[test]
    fn x0_flips_qubit_zero() {
        let s = StateVector::basis(2, 0).unwrap();
        let out = apply_pauli_sum(&PauliSum::from_letters(&[(1.0, "XI")]).unwrap(), &s).unwrap();
        assert_eq!(out[1], c(1.0, 0.0));
    }

    #[test]
    fn zero_angle_is_identity() {
        let pool = one_op_pool("XY");
        let s = StateVector::basis(2, 1).unwrap();
        let out = apply_exp_generator(&s, &pool.operators()[0].generator, 0.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn x_rotation_quarter_and_half_period() {
        let pool = one_op_pool("X");
        let g = &pool.operators()[0].generator;
        let s = StateVector::from_amplitudes(1, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        // theta = pi/2: -i X s = -i (0.8i, 0.6) = (0.8, -0.6i)
        let out = apply_exp_generator(&s, g, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((out.amplitudes()[0] - c(0.8, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(0.0, -0.6)).norm() < 1e-15);
        // theta = pi: -s
        let out = apply_exp_generator(&s, g, std::f64::consts::PI).unwrap();
        assert!((out.amplitudes()[0] + s.amplitudes()[0]).norm() < 1e-15);
        assert!((out.amplitudes()[1] + s.amplitudes()[1]).norm() < 1e-15);
    }

    #[test]
    fn z_expectations() {
        let z = PauliSum::from_letters(&[(1.0, "Z")]).unwrap();
        assert_eq!(expectation(&z, &StateVector::basis(1, 0).unwrap()).unwrap(), 1.0);
        assert_eq!(expectation(&z, &StateVector::basis(1, 1).unwrap()).unwrap(), -1.0);
        let nonherm = z.scale(c(0.0, 1.0));
        assert!(matches!(expectation(&nonherm, &StateVector::basis(1, 0).unwrap()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn covariance_examples() {
        let s = StateVector::basis(2, 0).unwrap();
        let z0 = PauliSum::from_letters(&[(1.0, "ZI")]).unwrap();
        assert_eq!(covariance(&z0, &z0, &s).unwrap(), 0.0);
        let x = PauliSum::from_letters(&[(1.0, "X")]).unwrap();
        assert_eq!(covariance(&x, &x, &StateVector::basis(1, 0).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn empty_ansatz_prepares_reference() {
        let pool = one_op_pool("Y");
        let r = StateVector::basis(1, 0).unwrap();
        assert_eq!(prepare_state(&Ansatz::default(), &pool, &r).unwrap(), r);
        assert_eq!(prepare_state(&Ansatz::from_indices([0, 0]), &pool, &r).unwrap(), r);
        assert!(energy_gradient(&PauliSum::from_letters(&[(1.0, "Z")]).unwrap(), &Ansatz::default(), &pool, &r)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn derivative_at_identity() {
        let pool = one_op_pool("Y");
        let r = StateVector::basis(1, 0).unwrap();
        let d = derivative_state(&Ansatz::from_indices([0]), &pool, &r, 0).unwrap();
        // -i Y|0> = -i (i|1>) = |1>
        assert_eq!(d, vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(derivative_state(&Ansatz::from_indices([0]), &pool, &r, 1).is_err());
    }

    #[test]
    fn bad_pool_index_rejected() {
        let pool = one_op_pool("Y");
        let r = StateVector::basis(1, 0).unwrap();
        assert!(prepare_state(&Ansatz::from_indices([1]), &pool, &r).is_err());
    }

    #[test]
    fn insertion_positions() {
        let mut a = Ansatz::from_indices([0, 1]);
        a.insert(1, 5, 0.0).unwrap();
        a.insert(3, 7, 0.0).unwrap();
        assert_eq!(a.indices(), vec![0, 5, 1, 7]);
        assert!(a.insert(9, 0, 0.0).is_err());
    }
}
