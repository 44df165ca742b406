//! Cache-placement solvers: budget accounting, ordering, agreement between
//! greedy and exhaustive search, and the guard rails.

use lrfc_cache_core::analysis::{
    delta_u, expected_backhaul, mds_expected_backhaul, AnalysisError, NetworkConfig, OverheadLaw,
};
use lrfc_cache_core::placement::{optimize_bound, optimize_exact, optimize_mds, PlacementError};

fn config(n: usize, k: u32, m: usize, q: u16, alpha: f64, gamma: Vec<f64>) -> NetworkConfig {
    NetworkConfig {
        library_size: n,
        symbols_per_file: k,
        cache_files: m,
        order: q,
        alpha,
        gamma,
        seed: 0,
        trials: 0,
    }
}

const PAPER_LIKE_GAMMA: [f64; 4] = [0.2907, 0.6591, 0.0430, 0.0072];

#[test]
fn greedy_spends_the_whole_budget() {
    for m in [0usize, 3, 10, 25, 50] {
        let cfg = config(50, 10, m, 4, 0.8, PAPER_LIKE_GAMMA.to_vec());
        let sol = optimize_bound(&cfg, 0).unwrap();
        assert_eq!(sol.placement.len(), 50);
        assert_eq!(sol.placement.iter().sum::<u64>(), cfg.budget());
        assert!(sol.placement.iter().all(|&x| x <= 10));
        let mds = optimize_mds(&cfg).unwrap();
        assert_eq!(mds.placement.iter().sum::<u64>(), cfg.budget());
    }
}

#[test]
fn skewed_popularity_gives_nonincreasing_allocations() {
    let cfg = config(30, 10, 7, 4, 1.2, PAPER_LIKE_GAMMA.to_vec());
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert!(
        sol.placement.windows(2).all(|w| w[0] >= w[1]),
        "allocation not sorted by popularity: {:?}",
        sol.placement
    );
    // The most popular file is fully cached long before the tail is touched.
    assert_eq!(sol.placement[0], 10);
    assert_eq!(*sol.placement.last().unwrap(), 0);
}

#[test]
fn objective_improves_with_cache_size_and_skew() {
    let mut last = f64::INFINITY;
    for m in 0..=20 {
        let cfg = config(20, 5, m, 16, 0.8, vec![0.3, 0.7]);
        let sol = optimize_bound(&cfg, 0).unwrap();
        assert!(sol.objective <= last + 1e-12, "M={m} worsened the objective");
        last = sol.objective;
    }
    // At full replication nothing is ever missed: only the decoding overhead
    // bound remains.
    assert_eq!(last, delta_u(16).unwrap());

    let mut last = f64::INFINITY;
    for alpha_tenths in 0..=20 {
        let alpha = f64::from(alpha_tenths) / 10.0;
        let cfg = config(20, 5, 4, 16, alpha, vec![0.3, 0.7]);
        let sol = optimize_bound(&cfg, 0).unwrap();
        assert!(sol.objective <= last + 1e-12, "alpha={alpha} worsened the objective");
        last = sol.objective;
    }
}

#[test]
fn mds_and_bound_solvers_place_identically() {
    // The greedy path only looks at the shortfall term, which both objectives
    // share; the reported objectives differ by the constant overhead bound.
    for q in [2u16, 4, 128] {
        let cfg = config(25, 8, 6, q, 0.9, PAPER_LIKE_GAMMA.to_vec());
        let bound = optimize_bound(&cfg, 0).unwrap();
        let mds = optimize_mds(&cfg).unwrap();
        assert_eq!(bound.placement, mds.placement);
        let shift = if q > 2 { delta_u(q).unwrap() } else { 0.0 };
        assert!((bound.objective - mds.objective - shift).abs() < 1e-12);
    }
}

#[test]
fn single_file_and_single_hub_degeneracies() {
    let cfg = config(1, 7, 1, 4, 0.0, vec![1.0]);
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(sol.placement, vec![7]);
    assert_eq!(sol.objective, delta_u(4).unwrap());

    let cfg = config(1, 7, 0, 4, 0.0, vec![1.0]);
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(sol.placement, vec![0]);
    assert!((sol.objective - (7.0 + delta_u(4).unwrap())).abs() < 1e-12);
}

#[test]
fn saturated_gains_spread_the_remainder_round_robin() {
    // Users always reach all four hubs, so one symbol per hub already covers
    // k = 3 and every further symbol has zero marginal effect on the
    // shortfall; the leftover budget spreads evenly.
    let gamma = vec![0.0, 0.0, 0.0, 1.0];
    let cfg = config(2, 3, 2, 4, 0.0, gamma);
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(sol.placement, vec![3, 3]);
    assert_eq!(sol.objective, delta_u(4).unwrap());

    // Three files, six symbols: one greedy symbol each, then the leftover
    // three go around once more.
    let gamma = vec![0.0, 0.0, 0.0, 1.0];
    let cfg = config(3, 3, 2, 4, 0.0, gamma);
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(sol.placement, vec![2, 2, 2]);

    // With an odd leftover the lower index gets the extra symbol.
    let gamma = vec![0.0, 0.0, 0.0, 1.0];
    let cfg = config(2, 3, 1, 4, 0.0, gamma);
    let sol = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(sol.placement, vec![2, 1]);
}

#[test]
fn extra_cap_only_raises_the_ceiling() {
    // Gains vanish at x = k, so the headroom is consumed by the round-robin
    // spread once everything else saturates.
    let cfg = config(2, 3, 2, 4, 0.0, vec![1.0]);
    let capped = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(capped.placement, vec![3, 3]);
    let roomy = optimize_bound(&cfg, 2).unwrap();
    assert_eq!(roomy.placement.iter().sum::<u64>(), 6);
    assert_eq!(roomy.objective, capped.objective);
}

#[test]
fn exhaustive_matches_greedy_when_users_reach_one_hub() {
    // With a single reachable hub the exact rate is the shortfall plus a
    // constant, exactly the greedy objective: both solvers must agree on the
    // objective (placements may differ across ties).
    for (n, k, m, alpha) in [(3usize, 3u32, 1usize, 0.0), (3, 3, 2, 1.0), (4, 2, 2, 0.5)] {
        let cfg = config(n, k, m, 4, alpha, vec![1.0]);
        let exact = optimize_exact(&cfg, 0, 1_000_000, 1e-12).unwrap();
        let greedy = optimize_bound(&cfg, 0).unwrap();
        let law = OverheadLaw::new(k, 4).unwrap();
        let p = cfg.popularity().unwrap();
        let greedy_exact_rate =
            expected_backhaul(&law, &p, &cfg.gamma, &greedy.placement).unwrap().expected;
        assert!(
            (exact.solution.objective - greedy_exact_rate).abs() < 1e-12,
            "n={n} k={k} m={m}: exhaustive {} vs greedy {}",
            exact.solution.objective,
            greedy_exact_rate
        );
    }
}

#[test]
fn exhaustive_never_loses_to_greedy() {
    for (alpha, gamma) in [(0.0, vec![0.3, 0.7]), (1.5, vec![0.2907, 0.6591, 0.0430, 0.0072])] {
        let cfg = config(4, 3, 2, 16, alpha, gamma);
        let exact = optimize_exact(&cfg, 0, 1_000_000, 1e-12).unwrap();
        let law = OverheadLaw::new(3, 16).unwrap();
        let p = cfg.popularity().unwrap();
        let greedy = optimize_bound(&cfg, 0).unwrap();
        let greedy_rate =
            expected_backhaul(&law, &p, &cfg.gamma, &greedy.placement).unwrap().expected;
        assert!(exact.solution.objective <= greedy_rate + 1e-12);
        // The exhaustive answer satisfies the same budget accounting.
        assert_eq!(exact.solution.placement.iter().sum::<u64>(), cfg.budget());
    }
}

#[test]
fn exhaustive_ties_resolve_to_the_lexicographically_smallest_vector() {
    // Uniform popularity and one reachable hub make (0,2), (1,1) and (2,0)
    // exact ties; greedy keeps its lowest-index habit, the exhaustive search
    // reports the lexicographically smallest optimum.
    let cfg = config(2, 2, 1, 4, 0.0, vec![1.0]);
    let exact = optimize_exact(&cfg, 0, 1_000, 1e-12).unwrap();
    assert_eq!(exact.solution.placement, vec![0, 2]);
    assert_eq!(exact.feasible_points, 3);
    let greedy = optimize_bound(&cfg, 0).unwrap();
    assert_eq!(greedy.placement, vec![2, 0]);
    assert!((exact.solution.objective
        - expected_backhaul(
            &OverheadLaw::new(2, 4).unwrap(),
            &cfg.popularity().unwrap(),
            &cfg.gamma,
            &greedy.placement
        )
        .unwrap()
        .expected)
        .abs()
        < 1e-12);
}

#[test]
fn exhaustive_search_guard_reports_the_feasible_count() {
    let cfg = config(100, 10, 50, 4, 0.8, PAPER_LIKE_GAMMA.to_vec());
    match optimize_exact(&cfg, 0, 1_000_000, 1e-12) {
        Err(PlacementError::SearchSpaceExceeded { feasible, limit: 1_000_000 }) => {
            assert!(feasible > 1_000_000);
        }
        other => panic!("expected the search guard to trip, got {other:?}"),
    }
}

#[test]
fn solver_inputs_are_validated() {
    let cfg = config(5, 10, 6, 4, 0.8, vec![1.0]);
    assert!(matches!(
        optimize_bound(&cfg, 0),
        Err(PlacementError::Analysis(AnalysisError::CacheTooLarge { .. }))
    ));
    let cfg = config(5, 10, 2, 6, 0.8, vec![1.0]);
    assert!(matches!(
        optimize_bound(&cfg, 0),
        Err(PlacementError::Analysis(AnalysisError::UnsupportedOrder(6)))
    ));
}

#[test]
fn placement_feeds_the_rate_formulas_consistently() {
    // End to end: optimize, then score the same placement with the exact,
    // bound and ideal-code formulas; the ordering must hold everywhere.
    let cfg = config(40, 10, 12, 16, 1.0, PAPER_LIKE_GAMMA.to_vec());
    let sol = optimize_bound(&cfg, 0).unwrap();
    let p = cfg.popularity().unwrap();
    let law = OverheadLaw::new(10, 16).unwrap();
    let exact = expected_backhaul(&law, &p, &cfg.gamma, &sol.placement).unwrap();
    let mds = mds_expected_backhaul(10, &p, &cfg.gamma, &sol.placement).unwrap();
    assert!(mds.expected <= exact.expected);
    assert!(exact.expected <= exact.upper_bound.unwrap());
    assert!((exact.upper_bound.unwrap() - sol.objective).abs() < 1e-12);
}
