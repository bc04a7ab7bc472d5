use crate::error::Result;
use crate::fermion::OperatorPool;
use crate::geometry::{mask_blocks, metric_from_derivatives, regularized_solve, BlockSpec};
use crate::pauli::PauliSum;
use crate::state::{derivative_states, energy_gradient, expectation, prepare_state, Ansatz, StateVector};

/// Metric preconditioning the inner update.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricMode {
    Full,
    BlockDiag(BlockSpec),
    /// Plain gradient descent; no solve is performed.
    Identity,
}

/// Gradient and preconditioned direction used by one update.
#[derive(Clone, Debug, PartialEq)]
pub struct StepInfo {
    pub gradient: Vec<f64>,
    pub direction: Vec<f64>,
}

/// One update `theta <- theta - eta M^{-1} grad E`.
pub fn inner_step(
    ansatz: &mut Ansatz,
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    eta: f64,
    reg: f64,
    mode: &MetricMode,
) -> Result<StepInfo> {
    let grad = energy_gradient(h, ansatz, pool, reference)?;
    let direction = match mode {
        MetricMode::Identity => grad.clone(),
        MetricMode::Full | MetricMode::BlockDiag(_) => {
            let (psi, derivs) = derivative_states(ansatz, pool, reference)?;
            let mut metric = metric_from_derivatives(psi.amplitudes(), &derivs);
            if let MetricMode::BlockDiag(spec) = mode {
                metric = mask_blocks(&metric, &spec.partition(ansatz.len()))?;
            }
            regularized_solve(&metric, &grad, reg)?.0
        }
    };
    let thetas: Vec<f64> = ansatz.thetas().iter().zip(&direction).map(|(t, d)| t - eta * d).collect();
    ansatz.set_thetas(&thetas)?;
    Ok(StepInfo { gradient: grad, direction })
}

/// `kappa` preconditioned steps; returns the energy after each step.
#[allow(clippy::too_many_arguments)]
pub fn inner_qngd(
    ansatz: &mut Ansatz,
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    eta: f64,
    kappa: usize,
    reg: f64,
    mode: &MetricMode,
) -> Result<Vec<f64>> {
    let mut energies = Vec::with_capacity(kappa);
    for _ in 0..kappa {
        inner_step(ansatz, h, pool, reference, eta, reg, mode)?;
        energies.push(expectation(h, &prepare_state(ansatz, pool, reference)?)?);
    }
    Ok(energies)
}

/// `kappa` plain gradient-descent steps.
pub fn inner_gd(
    ansatz: &mut Ansatz,
    h: &PauliSum,
    pool: &OperatorPool,
    reference: &StateVector,
    eta: f64,
    kappa: usize,
) -> Result<Vec<f64>> {
    inner_qngd(ansatz, h, pool, reference, eta, kappa, 0.0, &MetricMode::Identity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::PoolOperator;
    use crate::geometry::DEFAULT_REG;

    fn scalar() -> (PauliSum, OperatorPool, StateVector) {
        let h = PauliSum::from_letters(&[(1.0, "Z")]).unwrap();
        let pool = OperatorPool::new(vec![PoolOperator::custom("Y", PauliSum::from_letters(&[(1.0, "Y")]).unwrap()).unwrap()])
            .unwrap();
        (h, pool, StateVector::basis(1, 0).unwrap())
    }

    #[test]
    fn one_gd_step() {
        let (h, pool, r) = scalar();
        let mut a = Ansatz::from_indices([0]);
        a.set_thetas(&[0.3]).unwrap();
        let g = energy_gradient(&h, &a, &pool, &r).unwrap()[0];
        inner_gd(&mut a, &h, &pool, &r, 0.1, 1).unwrap();
        assert_eq!(a.thetas()[0], 0.3 - 0.1 * g);
    }

    #[test]
    fn scalar_qngd_step_and_descent() {
        // E(theta) = cos(2 theta), metric = Var(Y) = 1 on |0> rotated by Y.
        let (h, pool, r) = scalar();
        let mut a = Ansatz::from_indices([0]);
        a.set_thetas(&[0.3]).unwrap();
        let g = -2.0 * (0.6f64).sin();
        let lambda = DEFAULT_REG;
        inner_qngd(&mut a, &h, &pool, &r, 0.1, 1, DEFAULT_REG, &MetricMode::Full).unwrap();
        assert!((a.thetas()[0] - (0.3 - 0.1 * g / (1.0 + lambda))).abs() < 1e-14);

        let mut a = Ansatz::from_indices([0]);
        a.set_thetas(&[0.05]).unwrap();
        let e = inner_qngd(&mut a, &h, &pool, &r, 0.1, 5, DEFAULT_REG, &MetricMode::Full).unwrap();
        let mut prev = (0.1f64).cos();
        for v in e {
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn identity_mode_is_gd() {
        let (h, pool, r) = scalar();
        let mut a = Ansatz::from_indices([0]);
        a.set_thetas(&[0.3]).unwrap();
        let mut b = a.clone();
        let ea = inner_gd(&mut a, &h, &pool, &r, 0.1, 3).unwrap();
        let eb = inner_qngd(&mut b, &h, &pool, &r, 0.1, 3, DEFAULT_REG, &MetricMode::Identity).unwrap();
        assert_eq!(ea, eb);
        assert_eq!(a, b);
    }
}
