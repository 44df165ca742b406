//! Hub-connectivity histogram for users dropped uniformly over a square hub
//! grid.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use lrfc_cache_core::sim::{connectivity_distribution, GridGeometry};

use crate::config::REFERENCE_GAMMA;

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Hub coverage radius
    #[arg(long, default_value_t = 60.0)]
    pub radius: f64,
    /// Grid spacing between hubs
    #[arg(long, default_value_t = 45.0)]
    pub spacing: f64,
    /// User positions to sample
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &GeometryArgs) -> Result<()> {
    let geometry = GridGeometry { spacing: args.spacing, radius: args.radius };
    let report = connectivity_distribution(&geometry, args.samples, args.seed)?;
    // The reference column carries the bundled distribution for the default
    // (radius 60, spacing 45) scenario so disagreements sit side by side.
    let with_reference = args.radius == 60.0 && args.spacing == 45.0;
    let mut csv = String::from("h,probability,reference\n");
    for (h, &p) in report.histogram.iter().enumerate() {
        let reference = match (with_reference, h) {
            (true, 1..=4) => REFERENCE_GAMMA[h - 1].to_string(),
            _ => "-".to_string(),
        };
        writeln!(csv, "{h},{p},{reference}")?;
    }
    crate::config::emit(&args.out, &csv)
}
