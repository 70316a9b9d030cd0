use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Args;
use region_rrt_core::corpus::{generate, write_bundle, Layout};
use region_rrt_core::RandomSource;

use crate::Outcome;

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output corpus directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Layout names (comma separated), `benchmark` for the standard five, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "benchmark")]
    pub layouts: Vec<String>,
    /// Map side length in cells.
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Ground-truth band radius around the shortest grid path, in cells.
    #[arg(long, default_value_t = 6.0)]
    pub band: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub goal_radius: f64,
}

pub fn run(args: &GenerateArgs) -> Result<Outcome> {
    let mut layouts = Vec::new();
    for name in &args.layouts {
        if name == "benchmark" {
            layouts.extend(Layout::BENCHMARK);
        } else if name == "all" {
            layouts.extend(Layout::ALL);
        } else {
            layouts.push(Layout::from_name(name).ok_or_else(|| {
                let known: Vec<_> = Layout::ALL.iter().map(|l| l.name()).collect();
                anyhow!("--layouts: unknown layout {name:?} (known: {})", known.join(", "))
            })?);
        }
    }
    let mut rng = RandomSource::new(args.seed);
    for layout in layouts {
        let bundle = generate(layout, args.size, args.band, args.goal_radius, &mut rng)
            .with_context(|| format!("layout {}", layout.name()))?;
        write_bundle(&args.out, &bundle).with_context(|| format!("--out: {}", args.out.display()))?;
        println!("{}", bundle.name);
    }
    Ok(Outcome::Success)
}
