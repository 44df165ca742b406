//! Rate sweeps: re-optimize the placement and score every scheme at every
//! sweep point, one CSV row per (scheme, value).

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use lrfc_cache_core::analysis::{
    expected_backhaul, mds_expected_backhaul, NetworkConfig, OverheadLaw,
};
use lrfc_cache_core::placement::{optimize_bound, optimize_mds};
use lrfc_cache_core::sim::{simulate_delivery, Scheme};
use rayon::prelude::*;

use crate::config::ScenarioArgs;

pub const CSV_HEADER: &str = "scheme,q,n,k,M,alpha,rate_analytic,rate_bound,rate_sim,ci95";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Cache size in files
    #[value(name = "M", alias = "m")]
    CacheFiles,
    /// Popularity skew
    #[value(name = "alpha")]
    Alpha,
    /// Library size
    #[value(name = "n")]
    LibrarySize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Which scenario field the sweep varies
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated sweep values, strictly increasing
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Comma-separated schemes: `lrfc:<q>` entries and/or `mds`
    #[arg(long, value_delimiter = ',', default_value = "lrfc:2,mds")]
    pub schemes: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
enum SchemeSpec {
    Lrfc(u16),
    Mds,
}

fn parse_scheme(text: &str) -> Result<SchemeSpec> {
    if text == "mds" {
        return Ok(SchemeSpec::Mds);
    }
    if let Some(q) = text.strip_prefix("lrfc:") {
        let q: u16 = q.parse().with_context(|| format!("field order in `{text}`"))?;
        return Ok(SchemeSpec::Lrfc(q));
    }
    bail!("unknown scheme `{text}` (expected `lrfc:<q>` or `mds`)");
}

fn apply(param: SweepParam, value: f64, cfg: &mut NetworkConfig) -> Result<()> {
    let integer = |name: &str| -> Result<usize> {
        if value < 0.0 || value.fract() != 0.0 {
            bail!("{name} sweep values must be nonnegative integers, got {value}");
        }
        Ok(value as usize)
    };
    match param {
        SweepParam::CacheFiles => cfg.cache_files = integer("M")?,
        SweepParam::Alpha => cfg.alpha = value,
        SweepParam::LibrarySize => cfg.library_size = integer("n")?,
    }
    Ok(())
}

fn row(base: &NetworkConfig, param: SweepParam, value: f64, scheme: SchemeSpec, tol: f64) -> Result<String> {
    let mut cfg = base.clone();
    apply(param, value, &mut cfg)?;
    if let SchemeSpec::Lrfc(q) = scheme {
        cfg.order = q;
    }
    cfg.validate()?;
    let kf = f64::from(cfg.symbols_per_file);
    let popularity = cfg.popularity()?;

    let (name, q_cell, placement, analytic, bound) = match scheme {
        SchemeSpec::Lrfc(q) => {
            let placement = optimize_bound(&cfg, 0)?.placement;
            let law = OverheadLaw::with_tol(cfg.symbols_per_file, q, tol)?;
            let report = expected_backhaul(&law, &popularity, &cfg.gamma, &placement)?;
            let bound = report
                .upper_bound
                .map_or_else(|| "-".to_string(), |b| (b / kf).to_string());
            ("lrfc", q.to_string(), placement, report.normalized, bound)
        }
        SchemeSpec::Mds => {
            let placement = optimize_mds(&cfg)?.placement;
            let report =
                mds_expected_backhaul(cfg.symbols_per_file, &popularity, &cfg.gamma, &placement)?;
            ("mds", "-".to_string(), placement, report.normalized, "-".to_string())
        }
    };

    let (sim, ci95) = if cfg.trials > 0 {
        let mode = match scheme {
            SchemeSpec::Lrfc(_) => Scheme::Lrfc,
            SchemeSpec::Mds => Scheme::Mds,
        };
        let report = simulate_delivery(&cfg, &placement, mode)?;
        (
            report.normalized_mean.to_string(),
            (1.96 * report.normalized_std_error).to_string(),
        )
    } else {
        ("-".to_string(), "-".to_string())
    };

    Ok(format!(
        "{name},{q_cell},{n},{k},{m},{alpha},{analytic},{bound},{sim},{ci95}",
        n = cfg.library_size,
        k = cfg.symbols_per_file,
        m = cfg.cache_files,
        alpha = cfg.alpha,
    ))
}

pub fn run(args: &SweepArgs) -> Result<()> {
    if args.values.is_empty() {
        bail!("at least one sweep value is required");
    }
    if !args.values.windows(2).all(|w| w[0] < w[1]) {
        bail!("sweep values must be strictly increasing: {:?}", args.values);
    }
    if args.schemes.is_empty() {
        bail!("at least one scheme is required");
    }
    let schemes: Vec<SchemeSpec> =
        args.schemes.iter().map(|s| parse_scheme(s)).collect::<Result<_>>()?;
    let base = args.scenario.file_config()?.to_network();

    // One task per output row, in output order; the indexed parallel collect
    // keeps rows deterministic regardless of scheduling.
    let tasks: Vec<(SchemeSpec, f64)> = schemes
        .iter()
        .flat_map(|&s| args.values.iter().map(move |&v| (s, v)))
        .collect();
    let rows: Vec<String> = tasks
        .par_iter()
        .map(|&(scheme, value)| row(&base, args.param, value, scheme, args.scenario.tol))
        .collect::<Result<_>>()?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in rows {
        writeln!(csv, "{r}")?;
    }
    crate::config::emit(&args.scenario.out, &csv)
}
