//! `region-rrt`: plan, benchmark, score and augment on occupancy-grid corpora.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 planning or augmentation failure.

mod augment;
mod bench;
mod generate;
mod io;
mod plan;
mod score;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use region_rrt_core::PlannerParams;

#[derive(Debug, Parser)]
#[command(name = "region-rrt", version, about = "RRT planning with promising-region guided sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a single query.
    Plan(plan::PlanArgs),
    /// Run seeded trials over a corpus directory.
    Bench(bench::BenchArgs),
    /// IoU and Dice between a predicted and a ground-truth region.
    Score(score::ScoreArgs),
    /// Write augmented copies of one corpus bundle.
    Augment(augment::AugmentArgs),
    /// Write synthetic benchmark bundles.
    Generate(generate::GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlannerFlags {
    /// Iteration budget.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// Goal region radius in cells.
    #[arg(long, default_value_t = 5.0)]
    pub goal_radius: f64,
    /// Steering step length in cells.
    #[arg(long, default_value_t = 10.0)]
    pub step: f64,
    /// Collision-check sample spacing in cells.
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
}

impl PlannerFlags {
    pub fn params(&self) -> PlannerParams {
        PlannerParams {
            step_length: self.step,
            max_iterations: self.max_iters,
            collision_resolution: self.resolution,
            goal_radius: self.goal_radius,
        }
    }
}

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Success,
    /// Planning or augmentation could not produce a result.
    Failure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Plan(a) => plan::run(&a),
        Command::Bench(a) => bench::run(&a),
        Command::Score(a) => score::run(&a),
        Command::Augment(a) => augment::run(&a),
        Command::Generate(a) => generate::run(&a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
