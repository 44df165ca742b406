//! Closed-form performance analysis.
//!
//! Everything here is a pure function of its inputs. The central object is
//! the decoding overhead Δ of the rateless code: the number of coded symbols
//! beyond k that a decoder needs before its coefficient matrix reaches full
//! rank. From its law this module derives the expected number of symbols a
//! user must pull over the backhaul link, exactly and as a cheap upper bound,
//! for a network where every hub caches `x[j]` coded symbols of file j and a
//! user reaches a random number of hubs.
//!
//! Numerical conventions:
//!
//! * failure probabilities are evaluated with a complement-space recurrence
//!   (`p += x * (1 - p)`) whose first step is exactly `q^-(δ+1)`, the lower
//!   bound of the failure probability, and which never rounds below it;
//! * infinite sums over Δ are truncated once the failure probability drops
//!   below a tolerance (default [`OverheadLaw::DEFAULT_TOL`]); the lost tail
//!   mass is lumped into the last point of the truncated law so that pmfs
//!   still sum to one.

use alloc::vec::Vec;
use core::fmt;

/// Tolerance for validating that probability vectors sum to one.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

/// Errors from the analytic layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalysisError {
    /// Field order must be a power of two in `2..=256`.
    UnsupportedOrder(u16),
    /// The requested closed-form bound has a vanishing divisor at this order
    /// and is only defined for q >= 4; use the exact evaluator instead.
    BoundUndefined { order: u16 },
    /// k must be at least 1.
    ZeroSymbols,
    /// This quantity is only defined for nonnegative overheads.
    NegativeOverhead { delta: i64 },
    /// The file library must not be empty.
    EmptyLibrary,
    /// Popularity skew must be finite and nonnegative.
    BadExponent(f64),
    /// Series tolerance must lie strictly between 0 and 1.
    BadTolerance(f64),
    /// A probability vector has a negative/non-finite entry or does not sum
    /// to one within [`DISTRIBUTION_TOL`].
    BadDistribution { sum: f64 },
    /// Placement vector length differs from the library size.
    PlacementLength { expected: usize, found: usize },
    /// A placement entry exceeds the per-file cap.
    CapExceeded { file: usize, cached: u64, cap: u64 },
    /// Per-hub cache capacity (in files) exceeds the library size.
    CacheTooLarge { cache_files: usize, library_size: usize },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AnalysisError::UnsupportedOrder(q) => {
                write!(f, "field order {q} is not a power of two in 2..=256")
            }
            AnalysisError::BoundUndefined { order } => {
                write!(f, "closed-form bound undefined at order {order} (needs q >= 4)")
            }
            AnalysisError::ZeroSymbols => write!(f, "k must be at least 1"),
            AnalysisError::NegativeOverhead { delta } => {
                write!(f, "overhead must be nonnegative, got {delta}")
            }
            AnalysisError::EmptyLibrary => write!(f, "file library is empty"),
            AnalysisError::BadExponent(a) => write!(f, "invalid popularity exponent {a}"),
            AnalysisError::BadTolerance(t) => write!(f, "tolerance {t} not in (0, 1)"),
            AnalysisError::BadDistribution { sum } => {
                write!(f, "probability vector invalid (sum {sum})")
            }
            AnalysisError::PlacementLength { expected, found } => {
                write!(f, "placement has {found} entries, library has {expected}")
            }
            AnalysisError::CapExceeded { file, cached, cap } => {
                write!(f, "placement entry {cached} for file {file} exceeds cap {cap}")
            }
            AnalysisError::CacheTooLarge { cache_files, library_size } => {
                write!(f, "cache of {cache_files} files exceeds library of {library_size}")
            }
        }
    }
}

impl core::error::Error for AnalysisError {}

/// 2^e, exact, zero below the normal range.
#[inline]
fn pow2(e: i32) -> f64 {
    if e < -1022 {
        0.0
    } else if e > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((e + 1023) as u64) << 52)
    }
}

fn check_order(q: u16) -> Result<u32, AnalysisError> {
    if (2..=256).contains(&q) && q.is_power_of_two() {
        Ok(q.trailing_zeros())
    } else {
        Err(AnalysisError::UnsupportedOrder(q))
    }
}

/// Validate a probability vector: nonempty, finite, nonnegative entries
/// summing to one within [`DISTRIBUTION_TOL`].
pub fn check_distribution(weights: &[f64]) -> Result<(), AnalysisError> {
    if weights.is_empty() {
        return Err(AnalysisError::BadDistribution { sum: 0.0 });
    }
    let mut sum = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(AnalysisError::BadDistribution { sum: f64::NAN });
        }
        sum += w;
    }
    if (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(AnalysisError::BadDistribution { sum });
    }
    Ok(())
}

/// Probability that a random k x (k+δ) matrix with i.i.d. uniform GF(q)
/// entries has rank below k, i.e. that a decoder holding k+δ coded symbols
/// still cannot solve. Any δ < 0 gives 1: fewer than k equations never
/// determine k unknowns.
///
/// Evaluated as a complement-space recurrence over the k factors of
/// `1 - prod (1 - q^-j)`, j = δ+1..=δ+k. The first step sets the running
/// value to exactly `q^-(δ+1)` and later steps only add nonnegative
/// increments, so the result never falls below that lower bound.
pub fn failure_probability(k: u32, delta: i64, q: u16) -> Result<f64, AnalysisError> {
    let m = check_order(q)? as i64;
    if k == 0 {
        return Err(AnalysisError::ZeroSymbols);
    }
    if delta < 0 {
        return Ok(1.0);
    }
    let e0 = (-m * (delta + 1)).max(i64::from(i32::MIN)) as i32;
    let step = pow2(-(m as i32));
    let mut x = pow2(e0);
    let mut p = 0.0;
    for _ in 0..k {
        p += x * (1.0 - p);
        x *= step;
    }
    Ok(p)
}

/// Lower and upper bound `(q^-(δ+1), q^-δ / (q-1))` on the decoding-failure
/// probability at overhead δ; they hold for every k >= 1 and the upper one
/// strictly.
pub fn failure_bounds(delta: i64, q: u16) -> Result<(f64, f64), AnalysisError> {
    let m = check_order(q)? as i64;
    if delta < 0 {
        return Err(AnalysisError::NegativeOverhead { delta });
    }
    let lo = pow2((-m * (delta + 1)).max(i64::from(i32::MIN)) as i32);
    let hi = pow2((-m * delta).max(i64::from(i32::MIN)) as i32) / f64::from(q - 1);
    Ok((lo, hi))
}

/// Probability that decoding first succeeds exactly at overhead δ, given it
/// had not succeeded before: `1 - P_F(δ) / P_F(δ-1)` for δ >= 0, and 0 for
/// δ < 0 (success cannot happen below k symbols).
pub fn sigma(k: u32, delta: i64, q: u16) -> Result<f64, AnalysisError> {
    if delta < 0 {
        check_order(q)?;
        if k == 0 {
            return Err(AnalysisError::ZeroSymbols);
        }
        return Ok(0.0);
    }
    let at = failure_probability(k, delta, q)?;
    let before = failure_probability(k, delta - 1, q)?;
    Ok(1.0 - at / before)
}

/// The law of the decoding overhead Δ for a given (k, q): failure
/// probabilities, the pmf of Δ, its mean and partial-expectation tails, all
/// truncated at a configurable tolerance and cached in one lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadLaw {
    k: u32,
    q: u16,
    tol: f64,
    // failure[d] = P_F(k, d, q), d = 0..; construction stops once the value
    // drops below tol. Beyond the table P_F is treated as zero, which lumps
    // the remaining tail mass (< tol) into the point Δ = failure.len().
    failure: Vec<f64>,
    expected: f64,
}

impl OverheadLaw {
    /// Default series-truncation tolerance.
    pub const DEFAULT_TOL: f64 = 1e-12;

    pub fn new(k: u32, q: u16) -> Result<Self, AnalysisError> {
        Self::with_tol(k, q, Self::DEFAULT_TOL)
    }

    pub fn with_tol(k: u32, q: u16, tol: f64) -> Result<Self, AnalysisError> {
        check_order(q)?;
        if k == 0 {
            return Err(AnalysisError::ZeroSymbols);
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(AnalysisError::BadTolerance(tol));
        }
        let mut failure = Vec::new();
        let mut d = 0i64;
        loop {
            let pf = failure_probability(k, d, q)?;
            failure.push(pf);
            if pf < tol {
                break;
            }
            d += 1;
        }
        // Mean via the layer-cake sum of P(Δ > d) = P_F(d), smallest terms
        // first. The dropped tail is below 2 * tol (geometric with ratio
        // at most 1/q).
        let expected = failure.iter().rev().sum();
        Ok(OverheadLaw { k, q, tol, failure, expected })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u16 {
        self.q
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// First overhead with truncated (zero) stored failure probability; the
    /// pmf places its final, lumped point here.
    pub fn support_end(&self) -> i64 {
        self.failure.len() as i64
    }

    /// P(Δ > δ), from the table: 1 for δ < 0, 0 beyond the truncation point.
    pub fn failure_probability(&self, delta: i64) -> f64 {
        if delta < 0 {
            1.0
        } else if (delta as usize) < self.failure.len() {
            self.failure[delta as usize]
        } else {
            0.0
        }
    }

    /// P(Δ <= δ).
    pub fn success_probability(&self, delta: i64) -> f64 {
        1.0 - self.failure_probability(delta)
    }

    /// P(Δ = δ), as the telescoped difference of consecutive failure
    /// probabilities. Sums to exactly one over `0..=support_end()`.
    pub fn pmf(&self, delta: i64) -> f64 {
        if delta < 0 {
            0.0
        } else {
            self.failure_probability(delta - 1) - self.failure_probability(delta)
        }
    }

    /// Conditional stopping probability at overhead δ; delegates to the
    /// direct evaluation (the table's truncated zeros would corrupt the
    /// ratio past the truncation point).
    pub fn sigma(&self, delta: i64) -> f64 {
        sigma(self.k, delta, self.q).expect("law parameters already validated")
    }

    /// E[Δ].
    pub fn expected_overhead(&self) -> f64 {
        self.expected
    }

    /// E[(Δ - d0)^+], evaluated as the layer-cake tail
    /// `sum_{d >= d0} P(Δ > d)`. Negative d0 just adds |d0| deterministic
    /// symbols to the mean.
    pub fn tail_expectation(&self, d0: i64) -> f64 {
        if d0 <= 0 {
            self.expected + (-d0) as f64
        } else if (d0 as usize) >= self.failure.len() {
            0.0
        } else {
            self.failure[d0 as usize..].iter().rev().sum()
        }
    }
}

/// P(Δ = δ) without keeping a law around; prefer [`OverheadLaw`] when
/// evaluating more than a point or two.
pub fn overhead_pmf(k: u32, q: u16, delta: i64) -> Result<f64, AnalysisError> {
    if delta < 0 {
        check_order(q)?;
        if k == 0 {
            return Err(AnalysisError::ZeroSymbols);
        }
        return Ok(0.0);
    }
    let at = failure_probability(k, delta, q)?;
    let before = failure_probability(k, delta - 1, q)?;
    Ok(before - at)
}

/// E[Δ] truncated at `tol`; see [`OverheadLaw::expected_overhead`].
pub fn expected_overhead(k: u32, q: u16, tol: f64) -> Result<f64, AnalysisError> {
    Ok(OverheadLaw::with_tol(k, q, tol)?.expected_overhead())
}

/// Closed-form upper bound on E[Δ], independent of k:
/// `(q-1)/(q-2)^2 * (1 - (q-1)/q^2)`. The divisor vanishes at q = 2, so the
/// bound only exists from q = 4 up.
pub fn delta_u(q: u16) -> Result<f64, AnalysisError> {
    check_order(q)?;
    if q == 2 {
        return Err(AnalysisError::BoundUndefined { order: q });
    }
    let qf = f64::from(q);
    Ok((qf - 1.0) / ((qf - 2.0) * (qf - 2.0)) * (1.0 - (qf - 1.0) / (qf * qf)))
}

/// Zipf popularity over ranks 1..=n: p_j proportional to j^-α. α = 0 is
/// uniform; larger α concentrates mass on the first files.
pub fn zipf_pmf(n: usize, alpha: f64) -> Result<Vec<f64>, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::EmptyLibrary);
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(AnalysisError::BadExponent(alpha));
    }
    let mut w: Vec<f64> = (1..=n).map(|j| libm::pow(j as f64, -alpha)).collect();
    let norm: f64 = w.iter().rev().sum();
    for v in &mut w {
        *v /= norm;
    }
    Ok(w)
}

/// Network-wide experiment parameters shared by the analytic, placement and
/// simulation layers.
///
/// `gamma[i]` is the probability that a user reaches exactly `i + 1` hubs;
/// users outside every hub's coverage are not part of this model (the grid
/// geometry in [`crate::sim`] reports such mass separately).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Number of files in the library (n).
    pub library_size: usize,
    /// Input symbols per file (k).
    pub symbols_per_file: u32,
    /// Per-hub cache capacity in whole files (M); the symbol budget is M*k.
    pub cache_files: usize,
    /// Field order (q).
    pub order: u16,
    /// Zipf popularity exponent (α).
    pub alpha: f64,
    /// Hub-connectivity distribution, `gamma[i] = P(i + 1 hubs)`.
    pub gamma: Vec<f64>,
    /// Seed for every randomized run derived from this config.
    pub seed: u64,
    /// Monte Carlo trial count for simulation runs.
    pub trials: u64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.library_size == 0 {
            return Err(AnalysisError::EmptyLibrary);
        }
        if self.symbols_per_file == 0 {
            return Err(AnalysisError::ZeroSymbols);
        }
        check_order(self.order)?;
        if self.cache_files > self.library_size {
            return Err(AnalysisError::CacheTooLarge {
                cache_files: self.cache_files,
                library_size: self.library_size,
            });
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(AnalysisError::BadExponent(self.alpha));
        }
        check_distribution(&self.gamma)
    }

    /// Zipf popularity vector of this config.
    pub fn popularity(&self) -> Result<Vec<f64>, AnalysisError> {
        zipf_pmf(self.library_size, self.alpha)
    }

    /// Total coded symbols each hub stores (M*k).
    pub fn budget(&self) -> u64 {
        self.cache_files as u64 * u64::from(self.symbols_per_file)
    }
}

/// Distribution of the number of coded symbols of the requested file a user
/// finds cached: the request hits file j with probability `popularity[j]`,
/// the user reaches h hubs with probability `gamma[h-1]`, and each hub holds
/// `placement[j]` distinct-coefficient symbols of the file, for
/// `placement[j] * h` in total. Returns (value, mass) pairs sorted by value,
/// mass on colliding values merged.
pub fn cached_symbols_pmf(
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
) -> Result<Vec<(u64, f64)>, AnalysisError> {
    check_distribution(popularity)?;
    check_distribution(gamma)?;
    if placement.len() != popularity.len() {
        return Err(AnalysisError::PlacementLength {
            expected: popularity.len(),
            found: placement.len(),
        });
    }
    let mut points: Vec<(u64, f64)> = Vec::with_capacity(popularity.len() * gamma.len());
    for (j, &pj) in popularity.iter().enumerate() {
        for (i, &gh) in gamma.iter().enumerate() {
            let z = placement[j] * (i as u64 + 1);
            points.push((z, pj * gh));
        }
    }
    // Stable sort keeps the (j, h) iteration order within equal z, so the
    // merged masses accumulate in a deterministic order.
    points.sort_by_key(|&(z, _)| z);
    let mut merged: Vec<(u64, f64)> = Vec::new();
    for (z, mass) in points {
        match merged.last_mut() {
            Some((last, acc)) if *last == z => *acc += mass,
            _ => merged.push((z, mass)),
        }
    }
    Ok(merged)
}

/// P(T = t | Z = z): the probability that a user who found z cached symbols
/// needs exactly t more over the backhaul. For z <= k this is the overhead
/// pmf shifted by the z - k head start; for z > k the surplus means decoding
/// may already have succeeded, and all such events collapse onto t = 0.
pub fn backhaul_pmf_given_cached(law: &OverheadLaw, z: u64, t: u64) -> f64 {
    let k = i64::from(law.k());
    let z = z as i64;
    let t = t as i64;
    if z > k && t == 0 {
        law.success_probability(z - k)
    } else {
        law.pmf(z - k + t)
    }
}

/// Expected backhaul cost, exactly and per file.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// E[T]: expected coded symbols sent over the backhaul per request.
    pub expected: f64,
    /// E[T] / k, the cost in file units.
    pub normalized: f64,
    /// Closed-form upper bound on E[T]; absent at q = 2 where the overhead
    /// bound it builds on is undefined.
    pub upper_bound: Option<f64>,
    /// Per-file contributions; sums to `expected` up to rounding.
    pub per_file: Vec<f64>,
}

/// Mean of the truncated series `sum_{d >= d0} (d - d0) * pmf(d)` including
/// the lumped final point of the law.
fn pmf_series_mean(law: &OverheadLaw, d0: i64) -> f64 {
    let mut acc = 0.0;
    for d in d0.max(0)..=law.support_end() {
        acc += (d - d0) as f64 * law.pmf(d);
    }
    acc
}

/// Exact expected backhaul rate E[T] for one placement.
///
/// A user holding z cached symbols needs k - z + Δ more when z <= k, and,
/// when z > k, only the residual overhead of a decode that survived z - k
/// free symbols. Summed over the cached-symbol law Z:
///
/// `E[T] = (E[Δ] + k) P(Z <= k) - E[Z; Z <= k] + sum_{z > k} P(z) E[(Δ - (z-k))^+]`
///
/// with every Δ-series evaluated term-by-term from `law`'s truncated pmf.
pub fn expected_backhaul(
    law: &OverheadLaw,
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
) -> Result<RateReport, AnalysisError> {
    let k = i64::from(law.k());
    let kf = k as f64;
    let support = cached_symbols_pmf(popularity, gamma, placement)?;

    let e_delta = law.expected_overhead();
    let mut prob_le = 0.0;
    let mut mean_le = 0.0;
    let mut tail = 0.0;
    for &(z, mass) in &support {
        let z = z as i64;
        if z <= k {
            prob_le += mass;
            mean_le += mass * z as f64;
        } else {
            tail += mass * pmf_series_mean(law, z - k);
        }
    }
    let expected = (e_delta + kf) * prob_le - mean_le + tail;

    let per_file = per_file_contributions(popularity, gamma, placement, |z| {
        let z = z as i64;
        if z <= k {
            e_delta + (k - z) as f64
        } else {
            pmf_series_mean(law, z - k)
        }
    });

    let upper_bound = if law.order() > 2 {
        Some(backhaul_upper_bound(law.k(), law.order(), popularity, gamma, placement)?)
    } else {
        None
    };

    Ok(RateReport { expected, normalized: expected / kf, upper_bound, per_file })
}

fn per_file_contributions(
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
    cost: impl Fn(u64) -> f64,
) -> Vec<f64> {
    popularity
        .iter()
        .zip(placement)
        .map(|(&pj, &xj)| {
            let mut acc = 0.0;
            for (i, &gh) in gamma.iter().enumerate() {
                acc += gh * cost(xj * (i as u64 + 1));
            }
            pj * acc
        })
        .collect()
}

/// `sum_j p_j sum_h gamma_h * max(0, k - x_j * h)`: the expected shortfall of
/// cached symbols against k. This is both the upper bound's placement-
/// dependent term and the exact MDS backhaul cost.
pub(crate) fn miss_term(
    k: u32,
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
) -> Result<f64, AnalysisError> {
    check_distribution(popularity)?;
    check_distribution(gamma)?;
    if placement.len() != popularity.len() {
        return Err(AnalysisError::PlacementLength {
            expected: popularity.len(),
            found: placement.len(),
        });
    }
    let k = u64::from(k);
    Ok(popularity
        .iter()
        .zip(placement)
        .map(|(&pj, &xj)| {
            let mut acc = 0.0;
            for (i, &gh) in gamma.iter().enumerate() {
                let z = xj * (i as u64 + 1);
                acc += gh * k.saturating_sub(z) as f64;
            }
            pj * acc
        })
        .sum())
}

/// Upper bound on the exact E[T]: the overhead bound [`delta_u`] plus the
/// expected cached-symbol shortfall. Only defined for q >= 4.
pub fn backhaul_upper_bound(
    k: u32,
    q: u16,
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
) -> Result<f64, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroSymbols);
    }
    Ok(delta_u(q)? + miss_term(k, popularity, gamma, placement)?)
}

/// Expected backhaul rate for the ideal MDS baseline, where any k distinct
/// coded symbols decode with zero overhead: `E[T] = E[(k - Z)^+]`. Caching
/// more than k symbols of one file per hub is useless under MDS, so
/// placements above k are rejected.
pub fn mds_expected_backhaul(
    k: u32,
    popularity: &[f64],
    gamma: &[f64],
    placement: &[u64],
) -> Result<RateReport, AnalysisError> {
    if k == 0 {
        return Err(AnalysisError::ZeroSymbols);
    }
    if let Some((j, &xj)) = placement.iter().enumerate().find(|&(_, &xj)| xj > u64::from(k)) {
        return Err(AnalysisError::CapExceeded { file: j, cached: xj, cap: u64::from(k) });
    }
    check_distribution(popularity)?;
    check_distribution(gamma)?;
    if placement.len() != popularity.len() {
        return Err(AnalysisError::PlacementLength {
            expected: popularity.len(),
            found: placement.len(),
        });
    }
    let ku = u64::from(k);
    let per_file = per_file_contributions(popularity, gamma, placement, |z| {
        ku.saturating_sub(z) as f64
    });
    let expected: f64 = per_file.iter().sum();
    Ok(RateReport { expected, normalized: expected / f64::from(k), upper_bound: None, per_file })
}
