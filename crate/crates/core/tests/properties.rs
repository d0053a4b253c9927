mod common;

use common::*;
use proptest::prelude::*;
use specfact::harness::{factorization_error, random_spd, MatrixFamilySpec};
use specfact::msf::{factorize, normalize_at_zero, AlgoParams, Algorithm};
use specfact::numcore::linalg::hermitian_eigh;
use specfact::numcore::{dft_eval, idft_interpolate, ComplexMatrix, LaurentPolyMatrix};
use specfact::wavelet::DeltaSolver;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn determinant_is_multiplicative(r in 1usize..=6, n in 0usize..=10, seed in any::<u64>()) {
        let d = det_multiplicativity(r, n, seed);
        prop_assert!(d <= 1e-8, "relative residual {d:e}");
    }

    #[test]
    fn wavelet_matrices_are_unitary_and_causal(
        m in 2usize..=5,
        n in 1usize..=4,
        n_trunc in 4usize..=48,
        seed in any::<u64>(),
        displacement in any::<bool>(),
    ) {
        let solver = if displacement { DeltaSolver::Displacement } else { DeltaSolver::Dense };
        let [unit, det, causal] = wavelet_defects(m, n, n_trunc, seed, solver);
        prop_assert!(unit <= 1e-8, "unitary defect {unit:e}");
        prop_assert!(det <= 1e-8, "det defect {det:e}");
        prop_assert!(causal <= 1e-8, "causality defect {causal:e}");
    }

    #[test]
    fn delta_is_bounded_below_by_identity(m in 2usize..=5, n_trunc in 0usize..=40, seed in any::<u64>()) {
        let min = delta_min_eigenvalue(m, n_trunc, seed);
        prop_assert!(min >= 1.0 - 1e-10, "min eigenvalue {min}");
    }

    #[test]
    fn plus_half_splits_hermitian_densities_exactly(r in 1usize..=4, n in 0usize..=6, seed in any::<u64>()) {
        prop_assert_eq!(plus_half_defect(r, n, seed), 0.0);
    }

    #[test]
    fn cramer_and_node_solves_agree(m in 2usize..=5, n in 0usize..=5, seed in any::<u64>()) {
        let gap = zeta_paths_gap(m, n, seed);
        prop_assert!(gap <= 1e-8, "gap {gap:e}");
    }

    #[test]
    fn normalization_gives_hermitian_pd_constant_term(r in 1usize..=5, n in 0usize..=5, seed in any::<u64>()) {
        let c = normalize_check(r, n, seed);
        prop_assert!(c.hermitian_defect <= 1e-12, "asymmetry {:e}", c.hermitian_defect);
        prop_assert!(c.min_eigenvalue > 0.0);
        prop_assert!(c.err_change <= 1e-12, "err moved by {:e}", c.err_change);
    }

    #[test]
    fn displacement_solver_matches_dense(m in 2usize..=6, n_trunc in 0usize..=120, seed in any::<u64>()) {
        let gap = displacement_gap(m, n_trunc, seed);
        prop_assert!(gap <= 1e-10, "gap {gap:e}");
    }

    #[test]
    fn dft_round_trip(r in 1usize..=3, lo in -6i64..=0, len in 1i64..=12, extra in 0usize..=8, seed in any::<u64>()) {
        let mut d = Draw::new(seed);
        let p = random_matrix(&mut d, r, r, lo, lo + len - 1);
        let back = idft_interpolate(&dft_eval(&p, len as usize + extra), lo, lo + len - 1).unwrap();
        prop_assert!(back.sub(&p).sup_norm() <= 1e-12);
    }

    #[test]
    fn residual_is_invariant_under_constant_unitaries(seed in any::<u64>(), r in 1usize..=4) {
        let mut d = Draw::new(seed);
        let a = random_matrix(&mut d, r, r, 0, 3);
        let s = a.mul(&a.adjoint());
        let h = random_matrix(&mut d, r, r, 0, 0);
        let herm = h.coeff_or_zero(0);
        let (_, q) = hermitian_eigh(&(&herm + &herm.adjoint())).unwrap();
        let rotated = a.mul_const(&q);
        let (e0, e1) = (factorization_error(&s, &a), factorization_error(&s, &rotated));
        prop_assert!((e0 - e1).abs() <= 1e-12, "{e0:e} vs {e1:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn four_algorithms_agree_on_nonsingular_densities(seed in any::<u64>()) {
        let gap = algorithm_agreement(4, 8, seed, 1.0);
        prop_assert!(gap <= 1e-4, "gap {gap:e}");
    }

    #[test]
    fn reported_err_matches_recomputed_residual(seed in any::<u64>(), r in 1usize..=3, n in 1usize..=4, alg in 0usize..4) {
        let s = random_spd(&MatrixFamilySpec::new(r, n, seed)).unwrap();
        let res = factorize(Algorithm::ALL[alg], &s, &AlgoParams::default()).unwrap();
        let again = factorization_error(&s, &res.splus);
        prop_assert!((res.err - again).abs() <= 1e-14 * again.max(f64::MIN_POSITIVE));
        prop_assert_eq!(res.splus.lo(), 0);
        prop_assert_eq!(res.splus.hi(), n as i64);
        let c0 = res.splus.coeff_or_zero(0);
        prop_assert!((&c0 - &c0.adjoint()).max_abs() <= 1e-12 * c0.max_abs());
        // Already canonical: normalizing again changes nothing.
        let again = normalize_at_zero(&res.splus).unwrap();
        prop_assert!(again.sub(&res.splus).sup_norm() <= 1e-10 * res.splus.sup_norm());
    }
}

#[test]
fn jle1_steps_record_small_wavelet_defects() {
    for seed in 0..3 {
        let [unit, det] = recursion_wavelet_defects(4, 5, seed);
        assert!(unit <= 1e-8 && det <= 1e-8, "seed {seed}: {unit:e} {det:e}");
    }
}

#[test]
fn identity_density_factors_to_identity() {
    let s = LaurentPolyMatrix::identity(3);
    for alg in Algorithm::ALL {
        let res = factorize(alg, &s, &AlgoParams::default()).unwrap();
        let id = LaurentPolyMatrix::constant(ComplexMatrix::identity(3));
        assert!(res.splus.sub(&id).sup_norm() <= 1e-12, "{alg}");
    }
}
