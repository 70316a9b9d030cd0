use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use region_rrt_core::map_model::{decode_query_with_tolerance, render_overlay, RgbImage, BLUE, RED};
use region_rrt_core::metrics::{write_trials_csv, TrialRecord};
use region_rrt_core::planner::plan;
use region_rrt_core::{HeuristicMap, PlanningQuery, RandomSource, SamplingDistribution, State};

use crate::io::{heuristic_flag, map_flag, map_id, parse_state, read_flag, write_output};
use crate::{Outcome, PlannerFlags};

const TREE_COLOR: [u8; 3] = [150, 150, 150];

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Occupancy map (P5).
    #[arg(long)]
    pub map: PathBuf,
    /// Query image (P6) with a red start and a blue goal dot.
    #[arg(long, conflicts_with_all = ["start", "goal"])]
    pub query: Option<PathBuf>,
    /// Start state as X,Y.
    #[arg(long, value_parser = parse_state, requires = "goal")]
    pub start: Option<State>,
    /// Goal state as X,Y.
    #[arg(long, value_parser = parse_state, requires = "start")]
    pub goal: Option<State>,
    /// Promising-region heuristic (P5). Without it sampling is uniform.
    #[arg(long)]
    pub heuristic: Option<PathBuf>,
    /// Heuristic share of the sampling mixture.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-channel tolerance when matching the red/blue query dots.
    #[arg(long, default_value_t = 0)]
    pub color_tolerance: u8,
    #[command(flatten)]
    pub planner: PlannerFlags,
    /// CSV destination for the result row (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// P6 image of the map, tree and path.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

pub fn run(args: &PlanArgs) -> Result<Outcome> {
    let map = map_flag("--map", &args.map)?;
    let goal_radius = args.planner.goal_radius;
    let query = match (&args.query, args.start, args.goal) {
        (Some(path), _, _) => {
            let image = RgbImage::from_p6(&read_flag("--query", path)?)
                .with_context(|| format!("--query: {}", path.display()))?;
            decode_query_with_tolerance(&image, &map, goal_radius, args.color_tolerance)
                .context("--query")?
        }
        (None, Some(start), Some(goal)) => {
            PlanningQuery::new(&map, start, goal, goal_radius).context("--start/--goal")?
        }
        _ => bail!("--query or both --start and --goal are required"),
    };
    let heuristic = args
        .heuristic
        .as_ref()
        .map(|p| heuristic_flag("--heuristic", p, &map))
        .transpose()?;
    let (dist, algorithm) = match &heuristic {
        Some(h) => (
            SamplingDistribution::build(h, &map, args.lambda).context("--lambda")?,
            "heuristic",
        ),
        None => (SamplingDistribution::uniform(&map)?, "uniform"),
    };
    let params = args.planner.params();
    params.validate().context("planner flags")?;

    let result = plan(&map, &query, &dist, &params, &mut RandomSource::new(args.seed))?;
    let record = TrialRecord {
        map_id: map_id(&args.map),
        algorithm: algorithm.to_string(),
        seed: args.seed,
        success: result.success(),
        time_s: result.time_cost,
        node_count: result.node_count,
        iterations: result.iterations_used,
        path_cost: result.success().then_some(result.path_cost),
    };
    let mut csv = Vec::new();
    write_trials_csv(&mut csv, &[record])?;
    write_output("--out", args.out.as_ref(), &csv)?;

    if let Some(path) = &args.overlay {
        let zeros = HeuristicMap::zeros(map.width(), map.height());
        let mut img = render_overlay(&map, heuristic.as_ref().unwrap_or(&zeros), &query)?;
        for (a, b) in result.tree.edges() {
            img.draw_segment(&a, &b, TREE_COLOR);
        }
        for w in result.path.windows(2) {
            img.draw_segment(&w[0], &w[1], RED);
        }
        for (s, color) in [(&query.start, RED), (&query.goal, BLUE)] {
            if let Some((c, r)) = map.cell_of(s) {
                img.put(c, r, color);
            }
        }
        write_output("--overlay", Some(path), &img.to_p6())?;
    }

    Ok(if result.success() {
        Outcome::Success
    } else {
        Outcome::Failure
    })
}
