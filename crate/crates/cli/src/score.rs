use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use region_rrt_core::metrics::{binarize, dice, iou, DEFAULT_THRESHOLD};
use region_rrt_core::HeuristicMap;

use crate::io::{map_flag, read_flag, write_output};
use crate::Outcome;

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Predicted region (P5).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth region (P5).
    #[arg(long)]
    pub gt: PathBuf,
    /// Cells with weight >= threshold count as inside the region.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Optional occupancy map; obstacle cells are masked out of both regions.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// CSV destination (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn region(flag: &str, path: &Path) -> Result<HeuristicMap> {
    HeuristicMap::from_p5(&read_flag(flag, path)?).with_context(|| format!("{flag}: {}", path.display()))
}

pub fn run(args: &ScoreArgs) -> Result<Outcome> {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        bail!("--threshold must be in (0, 1), got {}", args.threshold);
    }
    let mut pred = region("--pred", &args.pred)?;
    let mut gt = region("--gt", &args.gt)?;
    if pred.dims() != gt.dims() {
        bail!(
            "--pred is {}x{} but --gt is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        );
    }
    if let Some(path) = &args.map {
        let map = map_flag("--map", path)?;
        pred = pred.masked(&map).context("--map")?;
        gt = gt.masked(&map).context("--map")?;
    }
    let (p, g) = (binarize(&pred, args.threshold), binarize(&gt, args.threshold));
    let text = format!("iou,dice\n{},{}\n", iou(&p, &g)?, dice(&p, &g)?);
    write_output("--out", args.out.as_ref(), text.as_bytes())?;
    Ok(Outcome::Success)
}
