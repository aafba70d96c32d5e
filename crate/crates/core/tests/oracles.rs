use proptest::prelude::*;
use specfact::circle_fourier::{lp_norm, sample, Norm};
use specfact::completion::{build_system, solve_completion, CompletionConfig};
use specfact::factorize::{factorize, FactorizeConfig};
use specfact::testkit::*;
use specfact::triangular::HermitianTrigMatrix;
use specfact::{AnalyticPoly, CircleGrid, LaurentPoly, C64};

#[test]
fn system_matrix_matches_sampled_products() {
    for n in 1..=4 {
        for seed in 0..5 {
            let (zeta, f) = random_completion_input(n, 100 * n as u64 + seed);
            let sys = build_system(&zeta, &f, n).unwrap();
            let oracle = brute_force_system(&zeta, &f, n);
            assert_eq!(sys.matrix.shape(), oracle.shape());
            assert!((&sys.matrix - &oracle).amax() < 1e-12, "n = {n}, seed = {seed}");
        }
    }
}

#[test]
fn completion_agrees_with_brute_force_n3() {
    let (zeta, f) = random_completion_input(3, 2024);
    let u = solve_completion(&build_system(&zeta, &f, 3).unwrap(), &CompletionConfig::default()).unwrap();
    let v = brute_force_completion(&zeta, &f, 3).unwrap();
    assert!(u.alpha.max_abs_diff(&v.alpha) <= 1e-9);
    assert!(u.beta.max_abs_diff(&v.beta) <= 1e-9);
    assert!(v.unitarity_residual <= 1e-12);
}

#[test]
fn zero_principal_part_completes_to_identity() {
    let f = AnalyticPoly::from_real(&[2.0, 0.3]);
    let v = brute_force_completion(&LaurentPoly::zero(), &f, 2).unwrap();
    assert!(v.alpha.max_abs_diff(&AnalyticPoly::from_real(&[1.0])) < 1e-14);
    assert!(v.beta.max_abs_diff(&AnalyticPoly::zero()) < 1e-14);
}

#[test]
fn generated_densities_are_positive_definite() {
    let grid = CircleGrid::new(1024).unwrap();
    for seed in 0..30 {
        let inst = gen_polynomial_instance(1 + seed as usize % 8, seed);
        let v = inst.density.sample(grid).unwrap();
        let det = &(&v[0][0] * &v[1][1]) - &(&v[0][1] * &v[1][0]);
        assert!(det.values().iter().all(|d| d.re > 0.0));
        let inv = det.map(|d| 1.0 / d);
        assert!(lp_norm(&inv, Norm::L1).is_finite());
        // The exact construction is coefficient-level: S = AA*.
        assert_eq!(HermitianTrigMatrix::from_factor(&inst.exact_factor), inst.density);
    }
}

#[test]
fn pq_instance_constants() {
    let (p, q) = pq_constants();
    assert!((p * p + q * q - 2.25).abs() < 1e-15 && (p * q - 0.5).abs() < 1e-15);
    // Commonly quoted rounded values.
    assert!((p - 1.460380).abs() < 5e-5 && (q - 0.342376).abs() < 1e-5);
    let grid = CircleGrid::new(64).unwrap();
    let a = pq_instance().density.entry(0, 0);
    let s = sample(&a, grid).unwrap();
    let w = sample(&LaurentPoly::new(0, vec![C64::new(p, 0.0), C64::new(q, 0.0)]), grid).unwrap();
    assert!(s.zip_with(&w, |s, w| s - w.norm_sqr()).unwrap().sup_abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn completion_matches_oracle(n in 1usize..=4, seed in any::<u64>()) {
        let (zeta, f) = random_completion_input(n, seed);
        let u = solve_completion(&build_system(&zeta, &f, n).unwrap(), &CompletionConfig::default()).unwrap();
        let v = brute_force_completion(&zeta, &f, n).unwrap();
        prop_assert!(u.alpha.max_abs_diff(&v.alpha) <= 1e-9);
        prop_assert!(u.beta.max_abs_diff(&v.beta) <= 1e-9);
    }

    #[test]
    fn factor_properties(degree in 0usize..=5, seed in any::<u64>(), n in 0usize..=24) {
        let inst = gen_polynomial_instance(degree, seed);
        let x = factorize(&inst.density, n, CircleGrid::new(1024).unwrap(), &FactorizeConfig::default()).unwrap();
        let d = x.diagnostics;
        prop_assert!(d.unitarity_residual <= 1e-9);
        prop_assert!(d.eq26_margin >= -1e-9);
        prop_assert!(d.det_residual <= 1e-8);
        prop_assert!(d.psi_leakage <= 1e-9);
        prop_assert!(d.eq17_margin >= -d.eq17_slack && d.eq32_margin >= -d.eq32_slack);
        let err = compare_factors(&x, &inst.exact_factor).unwrap();
        prop_assert!(err.lower() <= x.bound.value + d.rounding_floor, "{} > {}", err.value, x.bound.value);
        let a0 = x.at_origin();
        prop_assert!(a0[0][1].norm() == 0.0 && a0[0][0].im == 0.0 && a0[1][1].im == 0.0);
    }

    #[test]
    fn bound_is_monotone_in_n(degree in 1usize..=4, seed in any::<u64>()) {
        let inst = gen_polynomial_instance(degree, seed);
        let t = specfact::triangular::triangular_factorize(&inst.density, CircleGrid::new(512).unwrap(), &Default::default()).unwrap();
        let bounds: Vec<f64> = (0..12)
            .map(|n| specfact::factorize::error_bound(&t, &specfact::triangular::truncate_phi(&t, n).unwrap()).value)
            .collect();
        prop_assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
    }
}
