use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use region_rrt_core::augment::{augment_sample, write_manifest, AugmentParams, ManifestRow, Sample};
use region_rrt_core::corpus::{bundle_path, load_bundle, GROUND_TRUTH_SUFFIX, HEURISTIC_SUFFIX, MAP_SUFFIX, QUERY_SUFFIX};
use region_rrt_core::map_model::{save_heuristic, save_query};
use region_rrt_core::{Error, HeuristicMap, RandomSource};

use crate::Outcome;

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory holding the source bundle.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Source bundle name.
    #[arg(long)]
    pub name: String,
    /// Output directory for augmented bundles and `manifest.csv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub goal_radius: f64,
    #[arg(long, default_value_t = 2)]
    pub height_shift: usize,
    #[arg(long, default_value_t = 2)]
    pub width_shift: usize,
    #[arg(long, default_value_t = 1)]
    pub shift_step: usize,
    #[arg(long, default_value_t = 0.5)]
    pub rotation_probability: f64,
    /// Number of augmented bundles to write.
    #[arg(long, default_value_t = 10)]
    pub maps: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shear_min: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shear_max: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub brightness_min: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub brightness_max: f64,
}

impl AugmentArgs {
    fn params(&self) -> AugmentParams {
        AugmentParams {
            height_shift: self.height_shift,
            width_shift: self.width_shift,
            shift_step: self.shift_step,
            rotation_probability: self.rotation_probability,
            maps_to_generate: self.maps,
            shear_degrees: (self.shear_min, self.shear_max),
            brightness_range: (self.brightness_min, self.brightness_max),
        }
    }
}

pub fn run(args: &AugmentArgs) -> Result<Outcome> {
    let params = args.params();
    params.validate().context("augmentation flags")?;
    let bundle = load_bundle(&args.corpus, &args.name, args.goal_radius)
        .with_context(|| format!("--corpus/--name: {}", args.name))?;
    // ground truth is preferred; a predicted region is carried along otherwise
    let (region, suffix) = match (&bundle.ground_truth, &bundle.heuristic) {
        (Some(gt), _) => (Some(gt.clone()), GROUND_TRUTH_SUFFIX),
        (None, Some(h)) => (Some(h.clone()), HEURISTIC_SUFFIX),
        (None, None) => (None, GROUND_TRUTH_SUFFIX),
    };
    let has_region = region.is_some();
    let region = region.unwrap_or_else(|| HeuristicMap::zeros(bundle.map.width(), bundle.map.height()));
    let sample = Sample::new(bundle.map, region, bundle.query)?;

    let outputs = match augment_sample(&sample, &params, &mut RandomSource::new(args.seed)) {
        Ok(o) => o,
        Err(e @ Error::AugmentationInfeasible(_)) => {
            eprintln!("error: {e}");
            return Ok(Outcome::Failure);
        }
        Err(e) => return Err(e.into()),
    };

    fs::create_dir_all(&args.out).with_context(|| format!("--out: {}", args.out.display()))?;
    let mut manifest = Vec::with_capacity(outputs.len());
    for (k, a) in outputs.iter().enumerate() {
        let name = format!("{}_aug{k:03}", args.name);
        let write = |suffix: &str, bytes: Vec<u8>| {
            let p = bundle_path(&args.out, &name, suffix);
            fs::write(&p, bytes).with_context(|| format!("--out: cannot write {}", p.display()))
        };
        write(MAP_SUFFIX, a.map_p5())?;
        write(QUERY_SUFFIX, save_query(&a.sample.map, &a.sample.query))?;
        if has_region {
            write(suffix, save_heuristic(&a.sample.region))?;
        }
        manifest.push(ManifestRow::new(name, &args.name, &a.transform));
    }
    let mut csv = Vec::new();
    write_manifest(&mut csv, &manifest)?;
    let path = args.out.join("manifest.csv");
    fs::write(&path, csv).with_context(|| format!("--out: cannot write {}", path.display()))?;
    Ok(Outcome::Success)
}
