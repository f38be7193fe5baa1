//! Cross-module statistical properties.
//!
//! These tie independent code paths together: the finite-sample quantile
//! machinery against the Donsker limit simulator, the Monte-Carlo test
//! against the published critical-value surface, and the power harness
//! against its nominal size. Each would catch a normalization or
//! mean-correction mistake that the unit tests of a single module cannot.

use unitroot::{
    builtin_quantile, estimate_quantiles, gen_random_walk, get_power, mc_test,
    simulate_limit_quantiles, unit_root_stats, InnovationSpec, Resample, SeedSpec, StatKind,
    StatisticCase, TestName,
};

/// At n = 3000 the null quantiles of the mean-corrected coefficient statistic
/// are within simulation noise of the limit law; both estimates carry Monte
/// Carlo error well under the pinned gaps, so a failure means one of the two
/// machineries is mis-normalized, not that the seeds were unlucky.
#[test]
fn finite_sample_quantiles_converge_to_the_limit_law() {
    let alphas = [0.05, 0.10, 0.50];
    let tols = [0.5, 0.3, 0.1];
    let spec = InnovationSpec::standard_normal();
    let finite = estimate_quantiles(
        StatKind::DeltaMu,
        3000,
        &alphas,
        40_000,
        2,
        &spec,
        SeedSpec::new(5),
    )
    .unwrap();
    let limit =
        simulate_limit_quantiles(StatKind::DeltaMu, 80_000, 8_000, &alphas, SeedSpec::new(6))
            .unwrap();
    for ((point, (alpha, q_limit)), tol) in finite.iter().zip(&limit.quantiles).zip(tols) {
        assert_eq!(point.alpha, *alpha);
        let gap = (point.q_mean - q_limit).abs();
        assert!(
            gap <= tol,
            "alpha {alpha}: finite-sample {:.4} vs limit {q_limit:.4}, gap {gap:.4} > {tol}",
            point.q_mean
        );
    }
}

/// On null data the Monte-Carlo test (M = 999) and the published surface make
/// the same 5% decision except when the statistic lands within resampling
/// noise of the boundary, which happens for only a few percent of series.
#[test]
fn monte_carlo_and_surface_decisions_agree_on_null_data() {
    let n = 100usize;
    let runs = 1000u64;
    let spec = InnovationSpec::standard_normal();
    let cv = builtin_quantile(0.05, n).unwrap();
    let base = SeedSpec::new(7);
    let mut agree = 0usize;
    for i in 0..runs {
        let walk = gen_random_walk(n, &spec, base.child(0, i)).unwrap();
        let tau = unit_root_stats(&walk, StatisticCase::MeanCorrected)
            .unwrap()
            .tau;
        let mc = mc_test(
            &walk,
            StatKind::TauMu,
            999,
            base.child(1, i),
            Resample::GaussianNull,
        )
        .unwrap();
        if (mc.p_value <= 0.05) == (tau <= cv) {
            agree += 1;
        }
    }
    assert!(
        agree >= 970,
        "only {agree}/1000 decisions agree between Monte-Carlo and surface"
    );
}

/// Under the null (rho = 1, Gaussian) every test rejects at very nearly its
/// nominal 5% rate: the two simulated-critical-value tests by construction,
/// the surface-based test because the surface is accurate at n = 100.
#[test]
fn all_tests_hold_their_nominal_size_under_the_null() {
    let cells = get_power(
        &[100],
        &[1.0],
        &InnovationSpec::standard_normal(),
        &TestName::ALL,
        0.05,
        10_000,
        SeedSpec::new(8),
    )
    .unwrap();
    assert_eq!(cells.len(), 3);
    for cell in cells {
        assert!(
            (cell.power - 0.05).abs() <= 0.01,
            "{:?} size {:.4} strays from 0.05",
            cell.test,
            cell.power
        );
    }
}
