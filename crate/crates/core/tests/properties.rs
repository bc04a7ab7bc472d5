mod common;

use common::*;
use geoadapt::dense::sum_matrix;
use geoadapt::eigen::{dense_ground_state, lanczos_ground_energy};
use geoadapt::fermion::{build_pool, hf_reference, number_operator, MoleculeSpec, PoolOptions};
use geoadapt::geometry::{natural_gradient, pool_gradient, pool_metric, DEFAULT_REG};
use geoadapt::adapt::select_operator;
use geoadapt::pauli::{PauliString, PauliSum};
use geoadapt::state::{apply_exp_generator, StateVector};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use proptest::prelude::*;

fn letters(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

fn sum3() -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((letters(3), -2.0f64..2.0, -2.0f64..2.0), 1..6).prop_map(|terms| {
        let ts = terms
            .into_iter()
            .map(|(l, re, im)| geoadapt::pauli::PauliTerm {
                coeff: Complex64::new(re, im),
                string: PauliString::from_letters(&l).unwrap(),
            })
            .collect();
        PauliSum::from_terms(3, ts).unwrap()
    })
}

proptest! {
    #[test]
    fn product_is_associative(a in sum3(), b in sum3(), c in sum3()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(max_diff(&sum_matrix(&left).unwrap(), &sum_matrix(&right).unwrap()) < 1e-12);
    }

    #[test]
    fn adjoint_reverses_products(a in sum3(), b in sum3()) {
        let lhs = a.mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
        prop_assert!(max_diff(&sum_matrix(&lhs).unwrap(), &sum_matrix(&rhs).unwrap()) < 1e-12);
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn canonical_form_is_sorted_and_pruned(a in sum3(), b in sum3()) {
        let s = a.add(&b).unwrap();
        for w in s.terms().windows(2) {
            prop_assert!(w[0].string < w[1].string);
        }
        prop_assert!(s.terms().iter().all(|t| t.coeff.norm() > 1e-12));
        prop_assert!(a.sub(&a).unwrap().is_empty());
    }

    #[test]
    fn commutator_is_antisymmetric(a in sum3(), b in sum3()) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert!(ab.add(&ba).unwrap().terms().iter().all(|t| t.coeff.norm() < 1e-12));
    }

    #[test]
    fn string_product_phase_matches_dense(a in letters(3), b in letters(3)) {
        let (phase, s) = PauliString::from_letters(&a).unwrap().mul(&PauliString::from_letters(&b).unwrap()).unwrap();
        let got = letters_matrix(&s.to_string()) * phase.to_complex();
        prop_assert_eq!(got, letters_matrix(&a) * letters_matrix(&b));
    }

    #[test]
    fn rotations_preserve_norm(seed in 0u64..1000, theta in -10.0f64..10.0) {
        let spec = MoleculeSpec::new(6, 3, "").unwrap();
        let pool = build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap();
        let mut r = rng(seed);
        let mut s = random_state(&mut r, 6);
        for op in pool.iter().take(12) {
            s = apply_exp_generator(&s, &op.generator, theta).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pool_generators_conserve_particle_number() {
    for (n, ne) in [(4, 2), (6, 2), (6, 3), (8, 4)] {
        let spec = MoleculeSpec::new(n, ne, "").unwrap();
        let num = number_operator(n);
        for op in build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap().iter() {
            assert!(op.operator().commutator(&num).unwrap().is_empty(), "{}", op.label);
        }
        let hf = hf_reference(&spec).unwrap();
        let nhf = geoadapt::state::expectation(&num, &hf).unwrap();
        assert!((nhf - ne as f64).abs() < 1e-12);
    }
}

#[test]
fn gradient_and_metric_are_phase_invariant() {
    let mut r = rng(5);
    let (h, _) = random_hermitian(&mut r, 4, 8);
    let spec = MoleculeSpec::new(4, 2, "").unwrap();
    let pool = build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap();
    let s = random_state(&mut r, 4);
    let phase = Complex64::from_polar(1.0, 0.7);
    let t = StateVector::from_amplitudes(4, s.amplitudes().iter().map(|a| a * phase).collect()).unwrap();
    let (g1, g2) = (pool_gradient(&h, &pool, &s).unwrap(), pool_gradient(&h, &pool, &t).unwrap());
    let (f1, f2) = (pool_metric(&pool, &s).unwrap(), pool_metric(&pool, &t).unwrap());
    for (a, b) in g1.iter().zip(&g2) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!((f1 - f2).abs().max() < 1e-14);
}

#[test]
fn identity_metric_selects_gradient_argmax() {
    for seed in 0..20 {
        let mut r = rng(100 + seed);
        let (h, _) = random_hermitian(&mut r, 4, 8);
        let spec = MoleculeSpec::new(4, 2, "").unwrap();
        let pool = build_pool(&spec, &PoolOptions { spin_conserving: false }).unwrap();
        let s = random_state(&mut r, 4);
        let g = pool_gradient(&h, &pool, &s).unwrap();
        let dim = pool.len();
        let ng = natural_gradient(&nalgebra::DMatrix::identity(dim, dim), &g, 0.0).unwrap();
        let sel = select_operator(&ng.values, None).unwrap();
        let argmax = (0..dim).fold(0, |b, j| if g[j].abs() > g[b].abs() { j } else { b });
        assert_eq!(sel.index, argmax);
    }
}

#[test]
fn metric_is_psd_on_random_states() {
    let spec = MoleculeSpec::new(6, 2, "").unwrap();
    let pool = build_pool(&spec, &PoolOptions::default()).unwrap();
    for seed in 0..10 {
        let f = pool_metric(&pool, &random_state(&mut rng(seed), 6)).unwrap();
        assert_eq!(f, f.transpose());
        assert!(SymmetricEigen::new(f.clone()).eigenvalues.min() >= -1e-10);
        let g = vec![1.0; pool.len()];
        let ng = natural_gradient(&f, &g, DEFAULT_REG).unwrap();
        assert!(geoadapt::geometry::solve_residual(&f, &ng, &g) < 1e-8);
    }
}

#[test]
fn lanczos_matches_dense_diagonalization() {
    let mut r = rng(77);
    for case in 0..50 {
        let n = 3 + case % 4;
        let (h, dense) = random_hermitian(&mut r, n, 4 + case % 9);
        let expected = SymmetricEigen::new(dense).eigenvalues.min();
        let lz = lanczos_ground_energy(&h, 1e-10, 400, case as u64).unwrap();
        let de = dense_ground_state(&h).unwrap();
        assert!((lz.energy - expected).abs() < 1e-8, "case {case}: {} vs {expected}", lz.energy);
        assert!((de.energy - expected).abs() < 1e-10, "case {case}");
        assert!(lz.residual <= 1e-10);
    }
}
