//! Cache-placement optimization.
//!
//! Every hub stores `x[j]` coded symbols of file j under a shared budget of
//! `M * k` symbols. The objective minimized here is the expected
//! cached-symbol shortfall `sum_j p_j sum_h gamma_h (k - x_j h)^+` (plus, for
//! q >= 4, the constant overhead bound, which cannot change the argmin): the
//! placement-dependent part of the closed-form upper bound on the expected
//! backhaul rate. Each file's term is separable and convex in `x_j` with
//! non-increasing integer marginal gains, so granting one symbol at a time to
//! the file with the largest current gain is exactly optimal.
//!
//! An exhaustive search over all feasible placements, scoring the exact
//! expected backhaul rate instead of the bound, is provided as a
//! cross-validation oracle for small instances.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::{
    self, delta_u, expected_backhaul, miss_term, AnalysisError, NetworkConfig, OverheadLaw,
};

/// Coded symbols of each file stored per hub.
pub type PlacementVector = Vec<u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSolution {
    pub placement: PlacementVector,
    /// Objective value of `placement` under the solver's objective.
    pub objective: f64,
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveReport {
    pub solution: PlacementSolution,
    /// Number of feasible placements scored.
    pub feasible_points: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlacementError {
    Analysis(AnalysisError),
    /// The feasible set is larger than the configured enumeration limit.
    SearchSpaceExceeded { feasible: u128, limit: u64 },
}

impl From<AnalysisError> for PlacementError {
    fn from(e: AnalysisError) -> Self {
        PlacementError::Analysis(e)
    }
}

impl fmt::Display for PlacementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlacementError::Analysis(e) => e.fmt(f),
            PlacementError::SearchSpaceExceeded { feasible, limit } => {
                write!(f, "{feasible} feasible placements exceed the search limit {limit}")
            }
        }
    }
}

impl core::error::Error for PlacementError {}

/// Marginal shortfall reduction of granting file j its (x+1)-th symbol.
fn marginal_gain(k: u64, gamma: &[f64], pj: f64, x: u64) -> f64 {
    let mut s = 0.0;
    for (i, &gh) in gamma.iter().enumerate() {
        let h = i as u64 + 1;
        s += gh * (k.min((x + 1) * h) - k.min(x * h)) as f64;
    }
    pj * s
}

/// Greedy marginal allocation of `budget` symbols under a per-file cap.
/// Ties go to the lowest file index; once every marginal gain hits zero the
/// remaining budget is spread round-robin by index.
fn greedy_allocation(
    k: u64,
    popularity: &[f64],
    gamma: &[f64],
    budget: u64,
    cap: u64,
) -> PlacementVector {
    let n = popularity.len();
    let mut x = vec![0u64; n];
    let mut remaining = budget;
    while remaining > 0 {
        let mut best = usize::MAX;
        let mut best_gain = 0.0;
        for j in 0..n {
            if x[j] < cap {
                let g = marginal_gain(k, gamma, popularity[j], x[j]);
                if g > best_gain {
                    best_gain = g;
                    best = j;
                }
            }
        }
        if best == usize::MAX {
            // Nothing reduces the shortfall any further; spread the rest
            // evenly, low index first.
            let mut j = 0;
            while remaining > 0 {
                if x[j] < cap {
                    x[j] += 1;
                    remaining -= 1;
                }
                j = (j + 1) % n;
            }
            break;
        }
        x[best] += 1;
        remaining -= 1;
    }
    x
}

fn validated_inputs(config: &NetworkConfig) -> Result<Vec<f64>, PlacementError> {
    config.validate()?;
    Ok(config.popularity()?)
}

/// Minimize the closed-form upper bound on the expected backhaul rate.
///
/// The per-file cap is `k + extra_cap`; the default `extra_cap = 0` stops at
/// k, beyond which the bound objective is flat (the exact rate still improves
/// marginally, hence the configurable headroom). The reported objective
/// includes the constant overhead bound for q >= 4; at q = 2 that constant is
/// undefined and the objective is the shortfall term alone, which leaves the
/// minimizer unchanged.
pub fn optimize_bound(
    config: &NetworkConfig,
    extra_cap: u64,
) -> Result<PlacementSolution, PlacementError> {
    let popularity = validated_inputs(config)?;
    let k = u64::from(config.symbols_per_file);
    let placement =
        greedy_allocation(k, &popularity, &config.gamma, config.budget(), k + extra_cap);
    let mut objective =
        miss_term(config.symbols_per_file, &popularity, &config.gamma, &placement)?;
    if config.order > 2 {
        objective += delta_u(config.order)?;
    }
    Ok(PlacementSolution { placement, objective })
}

/// Same allocation for the MDS baseline: the objective is exactly its
/// expected backhaul rate (no overhead constant) and the cap is hard at k.
pub fn optimize_mds(config: &NetworkConfig) -> Result<PlacementSolution, PlacementError> {
    let popularity = validated_inputs(config)?;
    let k = u64::from(config.symbols_per_file);
    let placement = greedy_allocation(k, &popularity, &config.gamma, config.budget(), k);
    let objective = miss_term(config.symbols_per_file, &popularity, &config.gamma, &placement)?;
    Ok(PlacementSolution { placement, objective })
}

/// Number of ways to split `budget` over `n` files with entries in 0..=cap.
fn count_feasible(n: usize, budget: u64, cap: u64) -> u128 {
    if u128::from(budget) > n as u128 * u128::from(cap) {
        return 0;
    }
    let b = budget as usize;
    let c = cap.min(budget) as usize;
    let mut ways = vec![0u128; b + 1];
    ways[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; b + 1];
        for (used, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for t in 0..=c.min(b - used) {
                next[used + t] = next[used + t].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[b]
}

/// Exhaustively minimize the exact expected backhaul rate over every feasible
/// placement. Guarded by `limit` on the size of the feasible set; ties on the
/// objective resolve to the lexicographically smallest vector.
pub fn optimize_exact(
    config: &NetworkConfig,
    extra_cap: u64,
    limit: u64,
    tol: f64,
) -> Result<ExhaustiveReport, PlacementError> {
    let popularity = validated_inputs(config)?;
    let n = config.library_size;
    let k = u64::from(config.symbols_per_file);
    let cap = k + extra_cap;
    let budget = config.budget();

    let feasible = count_feasible(n, budget, cap);
    if feasible > u128::from(limit) {
        return Err(PlacementError::SearchSpaceExceeded { feasible, limit });
    }
    let law = OverheadLaw::with_tol(config.symbols_per_file, config.order, tol)?;

    let mut best: Option<PlacementSolution> = None;
    let mut scored = 0u64;
    let mut x = vec![0u64; n];
    enumerate(&mut x, 0, budget, cap, &mut |x| {
        let objective = expected_backhaul(&law, &popularity, &config.gamma, x)
            .expect("inputs validated")
            .expected;
        scored += 1;
        let better = match &best {
            None => true,
            Some(b) => {
                objective < b.objective
                    || (objective == b.objective && x < b.placement.as_slice())
            }
        };
        if better {
            best = Some(PlacementSolution { placement: x.to_vec(), objective });
        }
    });
    let solution = best.expect("budget <= n * cap, so the feasible set is never empty");
    debug_assert_eq!(u128::from(scored), feasible);
    Ok(ExhaustiveReport { solution, feasible_points: scored })
}

/// Visit every x with sum(x) == budget, entries in 0..=cap, in lexicographic
/// order.
fn enumerate(x: &mut [u64], j: usize, remaining: u64, cap: u64, visit: &mut impl FnMut(&[u64])) {
    if j + 1 == x.len() {
        if remaining <= cap {
            x[j] = remaining;
            visit(x);
        }
        return;
    }
    let tail_capacity = (x.len() - j - 1) as u64 * cap;
    let lo = remaining.saturating_sub(tail_capacity);
    for t in lo..=cap.min(remaining) {
        x[j] = t;
        enumerate(x, j + 1, remaining - t, cap, visit);
    }
}

/// Convenience for reporting: objective value the bound solver assigns to an
/// arbitrary placement (shortfall plus the q >= 4 constant).
pub fn bound_objective(config: &NetworkConfig, placement: &[u64]) -> Result<f64, PlacementError> {
    let popularity = validated_inputs(config)?;
    let mut objective =
        miss_term(config.symbols_per_file, &popularity, &config.gamma, placement)?;
    if config.order > 2 {
        objective += analysis::delta_u(config.order)?;
    }
    Ok(objective)
}
