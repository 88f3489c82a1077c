mod common;

use common::{brute_energy, fd_gradient, fd_jacobian, naive_fock, rel_err};
use grassmann_hf::fixtures::{random_integrals, random_matrix, random_orthogonal, random_pair};
use grassmann_hf::hf::{
    density, electronic_energy, energy, euclidean_gradient, euclidean_hessian, fock, IntegralSet, Spin,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn density_of_unit_vector() {
    let c = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
    let mut expected = DMatrix::zeros(3, 3);
    expected[(0, 0)] = 1.0;
    assert_eq!(density(&c), expected);
}

#[test]
fn density_is_idempotent_in_metric() {
    let ints = random_integrals(5, 3, 2, 11);
    let x = random_pair(&ints, 3);
    let p = density(&x.c_alpha);
    let s = ints.s();
    assert!((&p * s * &p - &p).amax() < 1e-9);
    assert!(((&p * s).trace() - 3.0).abs() < 1e-10);
}

#[test]
fn fock_matches_naive_loops() {
    for seed in 0..5 {
        let ints = random_integrals(4, 2, 1, seed);
        let a = random_matrix(4, 2, 1.0, seed + 100);
        let b = random_matrix(4, 1, 1.0, seed + 200);
        let (pa, pb) = (density(&a), density(&b));
        for spin in [Spin::Alpha, Spin::Beta] {
            let f = fock(&pa, &pb, spin, &ints);
            assert!((&f - naive_fock(&ints, &pa, &pb, spin)).amax() < 1e-12);
            assert!((&f - f.transpose()).amax() < 1e-10);
        }
    }
}

#[test]
fn one_orbital_fock_adds_self_coulomb() {
    let ints = random_integrals(1, 1, 1, 3);
    let one = DMatrix::from_element(1, 1, 1.0);
    let f = fock(&one, &one, Spin::Alpha, &ints);
    assert!((f[(0, 0)] - (ints.h()[(0, 0)] + ints.g().get(0, 0, 0, 0))).abs() < 1e-15);
}

#[test]
fn energy_matches_quartic_polynomial() {
    for seed in 0..5 {
        let ints = random_integrals(3, 2, 1, seed);
        let x = random_pair(&ints, seed);
        let e = energy(&ints, &x.c_alpha, &x.c_beta);
        assert!((e - brute_energy(&ints, &x.c_alpha, &x.c_beta)).abs() < 1e-11);
        // off the manifold too
        let a = random_matrix(3, 2, 1.0, seed + 7);
        let b = random_matrix(3, 1, 1.0, seed + 8);
        assert!((energy(&ints, &a, &b) - brute_energy(&ints, &a, &b)).abs() < 1e-11);
    }
}

#[test]
fn single_alpha_electron_has_no_self_interaction() {
    let ints = random_integrals(4, 1, 0, 21);
    let x = random_pair(&ints, 5);
    let c = &x.c_alpha;
    let expected = (c.transpose() * ints.h() * c)[(0, 0)];
    assert!((electronic_energy(&ints, c, &x.c_beta) - expected).abs() < 1e-12);
    assert!((energy(&ints, c, &x.c_beta) - brute_energy(&ints, c, &x.c_beta)).abs() < 1e-12);
}

#[test]
fn one_orbital_gradient_is_scalar_derivative() {
    // E(a, b) = h(a² + b²) + g a²b²
    let ints = random_integrals(1, 1, 1, 9);
    let (h, g) = (ints.h()[(0, 0)], ints.g().get(0, 0, 0, 0));
    let (a, b) = (0.7, -1.1);
    let (ga, gb) = euclidean_gradient(&ints, &DMatrix::from_element(1, 1, a), &DMatrix::from_element(1, 1, b));
    assert!((ga[(0, 0)] - (2.0 * h * a + 2.0 * g * a * b * b)).abs() < 1e-13);
    assert!((gb[(0, 0)] - (2.0 * h * b + 2.0 * g * a * a * b)).abs() < 1e-13);
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..4 {
        let ints = random_integrals(4, 2, 2, seed);
        let x = random_pair(&ints, seed + 40);
        let off = (random_matrix(4, 2, 1.0, seed), random_matrix(4, 2, 1.0, seed + 1));
        for (a, b) in [(x.c_alpha, x.c_beta), off] {
            let (ga, gb) = euclidean_gradient(&ints, &a, &b);
            let (fa, fb) = fd_gradient(|p, q| energy(&ints, p, q), &a, &b, 1e-5);
            assert!(rel_err(&ga, &fa) < 1e-6, "seed {seed}: {}", rel_err(&ga, &fa));
            assert!(rel_err(&gb, &fb) < 1e-6);
        }
    }
}

#[test]
fn hessian_matches_finite_differences_of_gradient() {
    for seed in 0..4 {
        let ints = random_integrals(4, 2, 2, seed + 10);
        let x = random_pair(&ints, seed);
        let off = (random_matrix(4, 2, 1.0, seed + 3), random_matrix(4, 2, 1.0, seed + 4));
        for (a, b) in [(x.c_alpha, x.c_beta), off] {
            let h = euclidean_hessian(&ints, &a, &b);
            let fd = fd_jacobian(|p, q| euclidean_gradient(&ints, p, q), &a, &b, 1e-5);
            assert!(rel_err(&h, &fd) < 1e-5, "seed {seed}: {}", rel_err(&h, &fd));
        }
    }
}

#[test]
fn hessian_with_unequal_spin_counts() {
    let ints = random_integrals(3, 2, 1, 77);
    let x = random_pair(&ints, 2);
    let h = euclidean_hessian(&ints, &x.c_alpha, &x.c_beta);
    assert_eq!(h.shape(), (9, 9));
    let fd = fd_jacobian(|p, q| euclidean_gradient(&ints, p, q), &x.c_alpha, &x.c_beta, 1e-5);
    assert!(rel_err(&h, &fd) < 1e-5);
}

fn spin_swapped(ints: &IntegralSet) -> IntegralSet {
    IntegralSet::new(
        ints.s().clone(),
        ints.h().clone(),
        ints.g().clone(),
        ints.e_nuc(),
        ints.n_beta(),
        ints.n_alpha(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_rotation_invariant(seed in 0u64..10_000) {
        let ints = random_integrals(4, 2, 2, seed);
        let x = random_pair(&ints, seed + 1);
        let ma = random_orthogonal(2, seed + 2);
        let mb = random_orthogonal(2, seed + 3);
        let e0 = energy(&ints, &x.c_alpha, &x.c_beta);
        let e1 = energy(&ints, &(&x.c_alpha * &ma), &(&x.c_beta * &mb));
        prop_assert!((e0 - e1).abs() < 1e-11);
    }

    #[test]
    fn gradient_is_rotation_equivariant(seed in 0u64..10_000) {
        let ints = random_integrals(4, 2, 2, seed);
        let x = random_pair(&ints, seed + 1);
        let m = random_orthogonal(2, seed + 2);
        let (ga, _) = euclidean_gradient(&ints, &x.c_alpha, &x.c_beta);
        let (gr, _) = euclidean_gradient(&ints, &(&x.c_alpha * &m), &x.c_beta);
        prop_assert!((gr - ga * &m).amax() < 1e-10);
    }

    #[test]
    fn energy_is_spin_symmetric(seed in 0u64..10_000) {
        let ints = random_integrals(4, 3, 1, seed);
        let x = random_pair(&ints, seed + 5);
        let swapped = spin_swapped(&ints);
        let e0 = energy(&ints, &x.c_alpha, &x.c_beta);
        let e1 = energy(&swapped, &x.c_beta, &x.c_alpha);
        prop_assert!((e0 - e1).abs() < 1e-12);
    }
}
