use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use region_rrt_core::corpus::{load_corpus, Bundle};
use region_rrt_core::metrics::{aggregate, write_summary_csv, write_trials_csv, TrialRecord};
use region_rrt_core::planner::plan;
use region_rrt_core::{PlannerParams, RandomSource, SamplingDistribution};

use crate::io::write_output;
use crate::{Outcome, PlannerFlags};

/// Caps the number of worker threads used for trials.
pub const THREADS_ENV: &str = "REGION_RRT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Algorithm {
    /// Uniform free-space sampling.
    Uniform,
    /// Lambda-mixture of the bundle's promising region and uniform sampling.
    Heuristic,
}

impl Algorithm {
    fn label(self) -> &'static str {
        match self {
            Algorithm::Uniform => "uniform",
            Algorithm::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory of `<name>.map.pgm` / `.query.ppm` / `.heur.pgm` / `.gt.pgm` bundles.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::Uniform, Algorithm::Heuristic])]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Trials per map and algorithm; trial `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub planner: PlannerFlags,
    /// Summary CSV destination (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial CSV destination.
    #[arg(long)]
    pub raw: Option<PathBuf>,
}

struct Arm<'a> {
    bundle: &'a Bundle,
    algorithm: Algorithm,
    dist: SamplingDistribution,
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be at least 1");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run_trial(arm: &Arm, params: &PlannerParams, seed: u64) -> Result<TrialRecord> {
    let b = arm.bundle;
    let r = plan(&b.map, &b.query, &arm.dist, params, &mut RandomSource::new(seed))
        .with_context(|| format!("bundle {}", b.name))?;
    Ok(TrialRecord {
        map_id: b.name.clone(),
        algorithm: arm.algorithm.label().to_string(),
        seed,
        success: r.success(),
        time_s: r.time_cost,
        node_count: r.node_count,
        iterations: r.iterations_used,
        path_cost: r.success().then_some(r.path_cost),
    })
}

pub fn run(args: &BenchArgs) -> Result<Outcome> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let mut algorithms = args.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();
    if algorithms.is_empty() {
        bail!("--algorithms must name at least one algorithm");
    }
    let params = args.planner.params();
    params.validate().context("planner flags")?;

    let corpus = load_corpus(&args.corpus, params.goal_radius)
        .with_context(|| format!("--corpus: {}", args.corpus.display()))?;
    if corpus.is_empty() {
        bail!("--corpus: no bundles in {}", args.corpus.display());
    }

    let mut arms = Vec::new();
    for bundle in &corpus {
        for &algorithm in &algorithms {
            let dist = match algorithm {
                Algorithm::Uniform => SamplingDistribution::uniform(&bundle.map)?,
                Algorithm::Heuristic => match bundle.guidance() {
                    Some(h) => SamplingDistribution::build(h, &bundle.map, args.lambda)
                        .with_context(|| format!("--lambda for bundle {}", bundle.name))?,
                    None => {
                        eprintln!("warning: {} has no heuristic or ground truth; skipping heuristic trials", bundle.name);
                        continue;
                    }
                },
            };
            arms.push(Arm {
                bundle,
                algorithm,
                dist,
            });
        }
    }

    let jobs: Vec<(usize, u64)> = (0..arms.len())
        .flat_map(|a| (0..args.trials as u64).map(move |t| (a, args.seed.wrapping_add(t))))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let records: Vec<TrialRecord> = pool
        .build()?
        .install(|| {
            jobs.par_iter()
                .map(|&(a, seed)| run_trial(&arms[a], &params, seed))
                .collect::<Result<_>>()
        })?;

    if let Some(path) = &args.raw {
        let mut csv = Vec::new();
        write_trials_csv(&mut csv, &records)?;
        write_output("--raw", Some(path), &csv)?;
    }
    let mut csv = Vec::new();
    write_summary_csv(&mut csv, &aggregate(&records)?)?;
    write_output("--out", args.out.as_ref(), &csv)?;
    Ok(Outcome::Success)
}
