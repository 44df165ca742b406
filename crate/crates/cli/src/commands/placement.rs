//! Cache placement: greedy solvers for either objective, plus the guarded
//! exhaustive search.

use anyhow::Result;
use clap::{Args, ValueEnum};
use lrfc_cache_core::placement::{bound_objective, optimize_bound, optimize_exact, optimize_mds};
use serde::Serialize;

use crate::config::ScenarioArgs;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    /// Greedy minimization of the closed-form rate bound
    Bound,
    /// Greedy minimization of the ideal-code rate
    Mds,
    /// Exhaustive minimization of the exact expected rate
    Exact,
}

#[derive(Debug, Args)]
pub struct PlacementArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = Method::Bound)]
    pub method: Method,
    /// Per-file cap headroom above k (bound and exact methods)
    #[arg(long, default_value_t = 0)]
    pub extra_cap: u64,
    /// Largest feasible set the exact method will enumerate
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
}

#[derive(Serialize)]
struct PlacementOutput {
    method: &'static str,
    objective: f64,
    placement: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible_points: Option<u64>,
    /// Bound-solver objective of the same vector, for gauging how loose the
    /// bound is against the exact optimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_objective: Option<f64>,
}

pub fn run(args: &PlacementArgs) -> Result<()> {
    let cfg = args.scenario.network()?;
    let output = match args.method {
        Method::Bound => {
            let sol = optimize_bound(&cfg, args.extra_cap)?;
            PlacementOutput {
                method: "bound",
                objective: sol.objective,
                placement: sol.placement,
                feasible_points: None,
                bound_objective: None,
            }
        }
        Method::Mds => {
            let sol = optimize_mds(&cfg)?;
            PlacementOutput {
                method: "mds",
                objective: sol.objective,
                placement: sol.placement,
                feasible_points: None,
                bound_objective: None,
            }
        }
        Method::Exact => {
            let report = optimize_exact(&cfg, args.extra_cap, args.limit, args.scenario.tol)?;
            let bound = bound_objective(&cfg, &report.solution.placement)?;
            PlacementOutput {
                method: "exact",
                objective: report.solution.objective,
                placement: report.solution.placement,
                feasible_points: Some(report.feasible_points),
                bound_objective: Some(bound),
            }
        }
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    crate::config::emit(&args.scenario.out, &text)
}
