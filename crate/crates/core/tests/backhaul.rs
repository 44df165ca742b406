//! Backhaul-rate analysis: frozen reference values for a small library, the
//! conditional transmission law, and cross-checks between the merged-support
//! evaluation and a direct per-(file, hub-count) summation.

use lrfc_cache_core::analysis::{
    backhaul_pmf_given_cached, backhaul_upper_bound, cached_symbols_pmf, delta_u,
    expected_backhaul, mds_expected_backhaul, zipf_pmf, AnalysisError, NetworkConfig,
    OverheadLaw,
};
use proptest::prelude::*;

fn close(actual: f64, expected: f64, tol: f64) {
    assert!(
        (actual - expected).abs() <= tol,
        "got {actual:.17}, expected {expected:.17} (tol {tol:e})"
    );
}

/// The worked instance used throughout: 3 files with unit-exponent Zipf
/// popularity, hubs reached with probability (0.3, 0.7), k = 4 symbols per
/// file, placement (4, 2, 0).
fn instance() -> (Vec<f64>, Vec<f64>, Vec<u64>) {
    (zipf_pmf(3, 1.0).unwrap(), vec![0.3, 0.7], vec![4, 2, 0])
}

#[test]
fn cached_support_merges_and_sums_to_one() {
    let (p, gamma, x) = instance();
    let support = cached_symbols_pmf(&p, &gamma, &x).unwrap();
    // z values: file 0 gives 4 or 8, file 1 gives 2 or 4, file 2 gives 0.
    let zs: Vec<u64> = support.iter().map(|&(z, _)| z).collect();
    assert_eq!(zs, vec![0, 2, 4, 8]);
    let total: f64 = support.iter().map(|&(_, pr)| pr).sum();
    close(total, 1.0, 1e-12);
    // z = 4 merges file 0 at one hub with file 1 at two hubs.
    let merged = support.iter().find(|&&(z, _)| z == 4).unwrap().1;
    close(merged, p[0] * gamma[0] + p[1] * gamma[1], 1e-15);

    // Degenerate single-file case keeps the per-hub-count split.
    let single = cached_symbols_pmf(&[1.0], &[0.3, 0.7], &[5]).unwrap();
    assert_eq!(single, vec![(5, 0.3), (10, 0.7)]);
}

#[test]
fn conditional_transmission_law_frozen_values() {
    let law = OverheadLaw::new(10, 2).unwrap();
    // Surplus cache (z = 12): no transmission unless the 12 cached symbols
    // fail to span, i.e. with the overhead-2 failure probability.
    assert_eq!(backhaul_pmf_given_cached(&law, 12, 0), 0.7702896305857025);
    assert_eq!(backhaul_pmf_given_cached(&law, 12, 3), 0.03025583754603637);
    // Deficit cache (z < k): t < k - z is impossible.
    assert_eq!(backhaul_pmf_given_cached(&law, 7, 2), 0.0);
    assert_eq!(backhaul_pmf_given_cached(&law, 7, 3), law.pmf(0));
}

#[test]
fn conditional_transmission_law_is_a_distribution() {
    let k = 10u32;
    let law = OverheadLaw::new(k, 2).unwrap();
    for z in [0u64, 9, 10, 11, 30] {
        let t_end = (law.support_end() + i64::from(k) - z as i64).max(0) as u64;
        let total: f64 = (0..=t_end).map(|t| backhaul_pmf_given_cached(&law, z, t)).sum();
        close(total, 1.0, 1e-12);
    }
}

#[test]
fn expected_backhaul_frozen_instance() {
    let (p, gamma, x) = instance();

    let law2 = OverheadLaw::new(4, 2).unwrap();
    let report = expected_backhaul(&law2, &p, &gamma, &x).unwrap();
    close(report.expected, 1.8888789901477163, 1e-12);
    close(report.normalized, 0.4722197475369291, 1e-12);
    assert_eq!(report.upper_bound, None);
    assert_eq!(report.per_file.len(), 3);
    let per_file_total: f64 = report.per_file.iter().sum();
    close(per_file_total, report.expected, 1e-12);
    // File 2 is never cached: its contribution is p_2 * (k + E[overhead]).
    close(
        report.per_file[2],
        p[2] * (4.0 + law2.expected_overhead()),
        1e-12,
    );

    let law16 = OverheadLaw::new(4, 16).unwrap();
    let report16 = expected_backhaul(&law16, &p, &gamma, &x).unwrap();
    close(report16.expected, 0.9347062618391471, 1e-12);
    close(report16.upper_bound.unwrap(), 0.9629554875927645, 1e-12);
    assert!(report16.expected <= report16.upper_bound.unwrap());
    assert_eq!(
        backhaul_upper_bound(4, 16, &p, &gamma, &x).unwrap(),
        report16.upper_bound.unwrap()
    );

    let mds = mds_expected_backhaul(4, &p, &gamma, &x).unwrap();
    close(mds.expected, 0.890909090909091, 1e-12);
    assert_eq!(mds.upper_bound, None);
    // Ideal codes never cost more than rateless ones under the same placement.
    assert!(mds.expected <= report16.expected && report16.expected <= report.expected);
}

#[test]
fn empty_cache_costs_the_full_file_plus_overhead() {
    let (p, gamma, _) = instance();
    let law = OverheadLaw::new(4, 2).unwrap();
    let report = expected_backhaul(&law, &p, &gamma, &[0, 0, 0]).unwrap();
    close(report.expected, 4.0 + law.expected_overhead(), 1e-12);
    let mds = mds_expected_backhaul(4, &p, &gamma, &[0, 0, 0]).unwrap();
    close(mds.expected, 4.0, 1e-14);
}

/// Direct evaluation over every (file, hub-count) pair, conditioning on the
/// cached count z = placement[j] * h: a deficit costs the shortfall plus the
/// mean overhead, a surplus costs the partial expectation of the overhead
/// past z - k.
fn per_pair_backhaul(law: &OverheadLaw, p: &[f64], gamma: &[f64], x: &[u64]) -> f64 {
    let k = i64::from(law.k());
    let mut total = 0.0;
    for (j, &pj) in p.iter().enumerate() {
        for (i, &gh) in gamma.iter().enumerate() {
            let z = (x[j] * (i as u64 + 1)) as i64;
            let cost = if z <= k {
                (k - z) as f64 + law.expected_overhead()
            } else {
                law.tail_expectation(z - k)
            };
            total += pj * gh * cost;
        }
    }
    total
}

#[test]
fn merged_evaluation_matches_per_pair_summation() {
    let (p, gamma, x) = instance();
    for q in [2u16, 4, 16, 128] {
        let law = OverheadLaw::new(4, q).unwrap();
        let report = expected_backhaul(&law, &p, &gamma, &x).unwrap();
        close(report.expected, per_pair_backhaul(&law, &p, &gamma, &x), 1e-12);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let (p, gamma, x) = instance();
    let law = OverheadLaw::new(4, 2).unwrap();
    assert!(matches!(
        expected_backhaul(&law, &p, &gamma, &[1, 2]),
        Err(AnalysisError::PlacementLength { expected: 3, found: 2 })
    ));
    assert!(matches!(
        expected_backhaul(&law, &p, &[0.3, 0.3], &x),
        Err(AnalysisError::BadDistribution { .. })
    ));
    assert!(matches!(
        mds_expected_backhaul(4, &p, &gamma, &[5, 0, 0]),
        Err(AnalysisError::CapExceeded { file: 0, cached: 5, cap: 4 })
    ));
    assert!(matches!(
        backhaul_upper_bound(4, 2, &p, &gamma, &x),
        Err(AnalysisError::BoundUndefined { order: 2 })
    ));
}

#[test]
fn network_config_validation_and_accessors() {
    let config = NetworkConfig {
        library_size: 100,
        symbols_per_file: 10,
        cache_files: 50,
        order: 4,
        alpha: 0.8,
        gamma: vec![0.2907, 0.6591, 0.0430, 0.0072],
        seed: 7,
        trials: 1000,
    };
    config.validate().unwrap();
    assert_eq!(config.budget(), 500);
    let p = config.popularity().unwrap();
    assert_eq!(p.len(), 100);
    close(p[0], 0.12293414655658287, 1e-13);

    let mut bad = config.clone();
    bad.cache_files = 101;
    assert!(matches!(
        bad.validate(),
        Err(AnalysisError::CacheTooLarge { cache_files: 101, library_size: 100 })
    ));
    let mut bad = config.clone();
    bad.order = 3;
    assert!(matches!(bad.validate(), Err(AnalysisError::UnsupportedOrder(3))));
    let mut bad = config;
    bad.gamma = vec![0.5, 0.4];
    assert!(matches!(bad.validate(), Err(AnalysisError::BadDistribution { .. })));
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1.0e-3..1.0f64, len).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // The closed-form bound dominates the exact rate for every placement, and
    // ideal codes dominate from below.
    #[test]
    fn bound_and_mds_sandwich_the_exact_rate(
        seed_x in proptest::collection::vec(0u64..=6, 3),
        p in distribution(3),
        gamma in distribution(2),
        q in prop::sample::select(vec![4u16, 16, 128]),
    ) {
        let k = 6u32;
        let law = OverheadLaw::new(k, q).unwrap();
        let report = expected_backhaul(&law, &p, &gamma, &seed_x).unwrap();
        let bound = report.upper_bound.unwrap();
        prop_assert!(report.expected <= bound + 1e-9, "exact {} > bound {}", report.expected, bound);
        let mds = mds_expected_backhaul(k, &p, &gamma, &seed_x).unwrap();
        prop_assert!(mds.expected <= report.expected + 1e-12);
        // The bound decomposes as a constant plus the deterministic miss term.
        let miss = mds.expected;
        let du = delta_u(q).unwrap();
        prop_assert!((bound - (du + miss)).abs() < 1e-9);
        let per_file_total: f64 = report.per_file.iter().sum();
        prop_assert!((per_file_total - report.expected).abs() < 1e-9);
    }

    // Growing any placement entry never increases the exact expected rate.
    #[test]
    fn backhaul_is_monotone_in_placement(
        x in proptest::collection::vec(0u64..=5, 3),
        p in distribution(3),
        gamma in distribution(3),
        bump in 0usize..3,
    ) {
        let law = OverheadLaw::new(5, 4).unwrap();
        let base = expected_backhaul(&law, &p, &gamma, &x).unwrap().expected;
        let mut grown = x.clone();
        grown[bump] += 1;
        let after = expected_backhaul(&law, &p, &gamma, &grown).unwrap().expected;
        prop_assert!(after <= base + 1e-12, "placement growth raised rate: {base} -> {after}");
    }
}
