//! Monte Carlo ground truth.
//!
//! Two simulators live here: a geometric one that samples user positions on
//! a square hub grid to produce the hub-connectivity distribution, and the
//! delivery-phase simulator that replays the full request process (random
//! file, random hub count, cached symbols, then backhaul symbols until the
//! decoder completes) against a placement.
//!
//! Reproducibility contract: work is split into fixed-size chunks of
//! [`CHUNK_TRIALS`] trials. Chunk c runs on its own RNG stream derived from
//! `(seed, c)`, and per-chunk results accumulate in integer counters, so the
//! final statistics are bit-identical no matter how many workers processed
//! the chunks or in which order they finished.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::distributions::{Distribution, Uniform, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    backhaul_upper_bound, expected_backhaul, mds_expected_backhaul, AnalysisError, NetworkConfig,
    OverheadLaw,
};
use crate::gf::FieldContext;
use crate::lrfc::{CodecError, DecoderState};

/// Trials per deterministic work unit.
pub const CHUNK_TRIALS: u64 = 8192;

/// Which delivery scheme a run simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Rateless coding: cached symbols are random linear combinations, the
    /// backhaul sends more until the decoder reaches full rank.
    Lrfc,
    /// Ideal MDS baseline: any k distinct symbols decode, so the backhaul
    /// tops the cache up to exactly k.
    Mds,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Lrfc => "lrfc",
            Scheme::Mds => "mds",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Analysis(AnalysisError),
    Codec(CodecError),
    /// Grid spacing and coverage radius must be positive and finite.
    BadGeometry { spacing: f64, radius: f64 },
    /// At least one sample/trial is needed.
    NothingToRun,
}

impl From<AnalysisError> for SimError {
    fn from(e: AnalysisError) -> Self {
        SimError::Analysis(e)
    }
}

impl From<CodecError> for SimError {
    fn from(e: CodecError) -> Self {
        SimError::Codec(e)
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Analysis(e) => e.fmt(f),
            SimError::Codec(e) => e.fmt(f),
            SimError::BadGeometry { spacing, radius } => {
                write!(f, "invalid grid geometry (spacing {spacing}, radius {radius})")
            }
            SimError::NothingToRun => write!(f, "sample/trial count must be at least 1"),
        }
    }
}

impl core::error::Error for SimError {}

/// Square grid of hubs with spacing `d` and per-hub coverage radius `r`,
/// both in the same length unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub spacing: f64,
    pub radius: f64,
}

impl GridGeometry {
    fn validate(&self) -> Result<(), SimError> {
        if self.spacing > 0.0
            && self.radius > 0.0
            && self.spacing.is_finite()
            && self.radius.is_finite()
        {
            Ok(())
        } else {
            Err(SimError::BadGeometry { spacing: self.spacing, radius: self.radius })
        }
    }
}

/// Sampled hub-connectivity histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    /// `histogram[h]` = fraction of sampled positions covered by exactly h
    /// hubs (index 0 = uncovered).
    pub histogram: Vec<f64>,
    /// Mass at h = 0; nonzero when the coverage circles leave gaps.
    pub uncovered: f64,
    /// Average number of covering hubs (equals pi r^2 / d^2 in expectation).
    pub mean_hubs: f64,
    pub samples: u64,
}

/// Sample the hub-connectivity distribution of a square grid.
///
/// By translational symmetry only one d x d cell is sampled; the hub lattice
/// around it is unbounded, so there are no border effects. Deterministic for
/// a fixed `(seed, samples)` pair.
pub fn connectivity_distribution(
    geometry: &GridGeometry,
    samples: u64,
    seed: u64,
) -> Result<ConnectivityReport, SimError> {
    geometry.validate()?;
    if samples == 0 {
        return Err(SimError::NothingToRun);
    }
    let d = geometry.spacing;
    let r2 = geometry.radius * geometry.radius;
    // Hub indices whose circle could reach a point in [0, d)^2.
    let reach = (geometry.radius / d) as i64 + 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = Uniform::new(0.0, d);
    let mut counts: Vec<u64> = Vec::new();
    for _ in 0..samples {
        let u = cell.sample(&mut rng);
        let v = cell.sample(&mut rng);
        let mut h = 0usize;
        for i in -reach..=reach {
            let dx = u - i as f64 * d;
            for j in -reach..=reach {
                let dy = v - j as f64 * d;
                if dx * dx + dy * dy <= r2 {
                    h += 1;
                }
            }
        }
        if h >= counts.len() {
            counts.resize(h + 1, 0);
        }
        counts[h] += 1;
    }

    let total = samples as f64;
    let histogram: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let hub_sum: u64 = counts.iter().enumerate().map(|(h, &c)| h as u64 * c).sum();
    Ok(ConnectivityReport {
        uncovered: histogram[0],
        mean_hubs: hub_sum as f64 / total,
        histogram,
        samples,
    })
}

/// One simulated request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    /// Requested file index.
    pub file: usize,
    /// Hubs the user reached.
    pub hubs: u32,
    /// Cached symbols available: `placement[file] * hubs`.
    pub cached: u64,
    /// Symbols sent over the backhaul.
    pub backhaul: u64,
}

/// Integer accumulators for one or more chunks; merging is associative and
/// exact, which is what makes worker count irrelevant to the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChunkStats {
    pub trials: u64,
    pub sum: u64,
    pub sum_squares: u128,
}

impl ChunkStats {
    pub fn merge(&mut self, other: ChunkStats) {
        self.trials += other.trials;
        self.sum += other.sum;
        self.sum_squares += other.sum_squares;
    }

    fn push(&mut self, t: u64) {
        self.trials += 1;
        self.sum += t;
        self.sum_squares += u128::from(t) * u128::from(t);
    }
}

/// Empirical backhaul statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub scheme: Scheme,
    pub trials: u64,
    /// Sample mean of the backhaul symbol count per request.
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    /// `mean / k`, the rate in file units.
    pub normalized_mean: f64,
    /// `std_error / k`.
    pub normalized_std_error: f64,
}

impl SimReport {
    fn from_stats(scheme: Scheme, k: u32, stats: ChunkStats) -> SimReport {
        let n = stats.trials as f64;
        let sum = stats.sum as f64;
        let mean = sum / n;
        let var = if stats.trials > 1 {
            ((stats.sum_squares as f64 - sum * sum / n) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = libm::sqrt(var / n);
        let kf = f64::from(k);
        SimReport {
            scheme,
            trials: stats.trials,
            mean,
            std_error,
            normalized_mean: mean / kf,
            normalized_std_error: std_error / kf,
        }
    }
}

/// Number of chunks a run of `trials` trials splits into.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(CHUNK_TRIALS)
}

struct DeliveryRun<'a> {
    config: &'a NetworkConfig,
    placement: &'a [u64],
    scheme: Scheme,
    field: Option<FieldContext>,
    pick_file: WeightedIndex<f64>,
    pick_hubs: WeightedIndex<f64>,
}

impl<'a> DeliveryRun<'a> {
    fn new(
        config: &'a NetworkConfig,
        placement: &'a [u64],
        scheme: Scheme,
    ) -> Result<Self, SimError> {
        config.validate()?;
        if placement.len() != config.library_size {
            return Err(AnalysisError::PlacementLength {
                expected: config.library_size,
                found: placement.len(),
            }
            .into());
        }
        if scheme == Scheme::Mds {
            let cap = u64::from(config.symbols_per_file);
            if let Some((j, &xj)) = placement.iter().enumerate().find(|&(_, &xj)| xj > cap) {
                return Err(AnalysisError::CapExceeded { file: j, cached: xj, cap }.into());
            }
        }
        let field = match scheme {
            Scheme::Lrfc => Some(FieldContext::new(config.order).map_err(CodecError::Field)?),
            Scheme::Mds => None,
        };
        let popularity = config.popularity()?;
        let pick_file = WeightedIndex::new(&popularity)
            .map_err(|_| AnalysisError::BadDistribution { sum: f64::NAN })?;
        let pick_hubs = WeightedIndex::new(&config.gamma)
            .map_err(|_| AnalysisError::BadDistribution { sum: f64::NAN })?;
        Ok(DeliveryRun { config, placement, scheme, field, pick_file, pick_hubs })
    }

    fn chunk_rng(&self, chunk_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(chunk_index);
        rng
    }

    /// Trials covered by one chunk of the configured run.
    fn chunk_trials(&self, chunk_index: u64) -> u64 {
        let start = chunk_index.saturating_mul(CHUNK_TRIALS);
        self.config.trials.saturating_sub(start).min(CHUNK_TRIALS)
    }

    fn run_trial(&self, rng: &mut ChaCha8Rng, buf: &mut [u8]) -> (usize, u32, u64, u64) {
        let k = u64::from(self.config.symbols_per_file);
        let file = self.pick_file.sample(rng);
        let hubs = self.pick_hubs.sample(rng) as u32 + 1;
        let cached = self.placement[file] * u64::from(hubs);
        let backhaul = match self.scheme {
            Scheme::Mds => k - cached.min(k),
            Scheme::Lrfc => {
                let field = self.field.as_ref().expect("lrfc runs carry a field");
                let mut dec = DecoderState::rank_only(field, k as usize)
                    .expect("k validated nonzero");
                let mut left = cached;
                while left > 0 && !dec.is_complete() {
                    for b in buf.iter_mut() {
                        *b = field.raw_sample(rng);
                    }
                    let _ = dec.absorb_coefficients(field, buf).expect("matching shape");
                    left -= 1;
                }
                let mut extra = 0u64;
                while !dec.is_complete() {
                    for b in buf.iter_mut() {
                        *b = field.raw_sample(rng);
                    }
                    let _ = dec.absorb_coefficients(field, buf).expect("matching shape");
                    extra += 1;
                }
                extra
            }
        };
        (file, hubs, cached, backhaul)
    }

    fn run_chunk(&self, chunk_index: u64, mut record: Option<&mut Vec<TrialRecord>>) -> ChunkStats {
        let trials = self.chunk_trials(chunk_index);
        let mut rng = self.chunk_rng(chunk_index);
        let mut buf = vec![0u8; self.config.symbols_per_file as usize];
        let mut stats = ChunkStats::default();
        let base = chunk_index * CHUNK_TRIALS;
        for i in 0..trials {
            let (file, hubs, cached, backhaul) = self.run_trial(&mut rng, &mut buf);
            stats.push(backhaul);
            if let Some(rec) = record.as_deref_mut() {
                rec.push(TrialRecord { trial: base + i, file, hubs, cached, backhaul });
            }
        }
        stats
    }
}

/// Run one chunk of a delivery simulation. Parallel drivers fan out over
/// `0..chunk_count(config.trials)`, merge the [`ChunkStats`] and hand the
/// total to [`finalize`]; merging in any order gives results identical to
/// [`simulate_delivery`].
pub fn simulate_chunk(
    config: &NetworkConfig,
    placement: &[u64],
    scheme: Scheme,
    chunk_index: u64,
) -> Result<ChunkStats, SimError> {
    let run = DeliveryRun::new(config, placement, scheme)?;
    Ok(run.run_chunk(chunk_index, None))
}

/// Turn merged chunk statistics into a report. `stats.trials` must cover the
/// full run the chunks came from.
pub fn finalize(config: &NetworkConfig, scheme: Scheme, stats: ChunkStats) -> SimReport {
    SimReport::from_stats(scheme, config.symbols_per_file, stats)
}

/// Simulate the delivery phase for one placement: per trial draw the
/// requested file and the hub count, credit the cached symbols and count how
/// many more the backhaul must send.
pub fn simulate_delivery(
    config: &NetworkConfig,
    placement: &[u64],
    scheme: Scheme,
) -> Result<SimReport, SimError> {
    if config.trials == 0 {
        return Err(SimError::NothingToRun);
    }
    let run = DeliveryRun::new(config, placement, scheme)?;
    let mut stats = ChunkStats::default();
    for c in 0..chunk_count(config.trials) {
        stats.merge(run.run_chunk(c, None));
    }
    Ok(SimReport::from_stats(scheme, config.symbols_per_file, stats))
}

/// As [`simulate_delivery`], additionally returning every trial.
pub fn simulate_delivery_recorded(
    config: &NetworkConfig,
    placement: &[u64],
    scheme: Scheme,
) -> Result<(SimReport, Vec<TrialRecord>), SimError> {
    if config.trials == 0 {
        return Err(SimError::NothingToRun);
    }
    let run = DeliveryRun::new(config, placement, scheme)?;
    let mut stats = ChunkStats::default();
    let mut records = Vec::with_capacity(config.trials as usize);
    for c in 0..chunk_count(config.trials) {
        stats.merge(run.run_chunk(c, Some(&mut records)));
    }
    Ok((SimReport::from_stats(scheme, config.symbols_per_file, stats), records))
}

/// Side-by-side comparison of the analytic rate, its closed-form bound and
/// the simulated rate for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossvalReport {
    pub scheme: Scheme,
    /// Exact expected backhaul rate from the analytic model.
    pub analytic: f64,
    /// Closed-form upper bound; only for the rateless scheme at q >= 4.
    pub bound: Option<f64>,
    pub empirical: SimReport,
    /// (empirical mean - analytic) / standard error; 0 when both error and
    /// difference vanish.
    pub z_score: f64,
    /// Set when |z_score| > 3.
    pub flagged: bool,
}

/// Run the simulator against the analytic expectation and score the
/// difference in standard errors.
pub fn crossvalidate(
    config: &NetworkConfig,
    placement: &[u64],
    scheme: Scheme,
    tol: f64,
) -> Result<CrossvalReport, SimError> {
    config.validate()?;
    let popularity = config.popularity()?;
    let analytic = match scheme {
        Scheme::Lrfc => {
            let law = OverheadLaw::with_tol(config.symbols_per_file, config.order, tol)?;
            expected_backhaul(&law, &popularity, &config.gamma, placement)?.expected
        }
        Scheme::Mds => {
            mds_expected_backhaul(config.symbols_per_file, &popularity, &config.gamma, placement)?
                .expected
        }
    };
    let bound = if scheme == Scheme::Lrfc && config.order > 2 {
        Some(backhaul_upper_bound(
            config.symbols_per_file,
            config.order,
            &popularity,
            &config.gamma,
            placement,
        )?)
    } else {
        None
    };
    let empirical = simulate_delivery(config, placement, scheme)?;
    let diff = empirical.mean - analytic;
    let z_score = if empirical.std_error > 0.0 {
        diff / empirical.std_error
    } else if diff.abs() <= 64.0 * f64::EPSILON * analytic.abs().max(1.0) {
        // Degenerate runs (every trial costs the same) have zero standard
        // error; the analytic pipeline still carries summation round-off, so
        // agreement is judged at f64 resolution rather than bit equality.
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    Ok(CrossvalReport { scheme, analytic, bound, empirical, z_score, flagged: z_score.abs() > 3.0 })
}
