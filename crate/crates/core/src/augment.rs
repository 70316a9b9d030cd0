//! Joint augmentation of (map, promising region, query) samples.
//!
//! Geometric transforms (quarter-turn rotation, integer shift) act on the
//! occupancy grid, the region and the query together. Shear only resamples the
//! region and brightness only changes the rendered grayscale map; neither
//! touches the occupancy used for planning.

use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_model::{GridMap, HeuristicMap, PlanningQuery, State, OCCUPANCY_THRESHOLD};
use crate::netpbm::{self, Kind};
use crate::sampling::RandomSource;

/// Redraw budget for each output slot.
pub const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentParams {
    pub height_shift: usize,
    pub width_shift: usize,
    pub shift_step: usize,
    pub rotation_probability: f64,
    pub maps_to_generate: usize,
    /// Inclusive shear angle range in degrees.
    pub shear_degrees: (f64, f64),
    /// Inclusive additive brightness range, as a fraction of full scale.
    pub brightness_range: (f64, f64),
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            height_shift: 2,
            width_shift: 2,
            shift_step: 1,
            rotation_probability: 0.5,
            maps_to_generate: 10,
            shear_degrees: (0.0, 0.0),
            brightness_range: (0.0, 0.0),
        }
    }
}

impl AugmentParams {
    /// No shift, rotation, shear or brightness change.
    pub fn identity(maps_to_generate: usize) -> Self {
        AugmentParams {
            height_shift: 0,
            width_shift: 0,
            rotation_probability: 0.0,
            maps_to_generate,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..=1.0).contains(&self.rotation_probability) {
            return bad(format!(
                "rotation_probability must be in [0, 1], got {}",
                self.rotation_probability
            ));
        }
        if self.shift_step == 0 && (self.width_shift > 0 || self.height_shift > 0) {
            return bad("shift_step must be positive when shifting".into());
        }
        let (lo, hi) = self.shear_degrees;
        if !(lo <= hi && lo > -90.0 && hi < 90.0) {
            return bad(format!("shear range [{lo}, {hi}] must lie inside (-90, 90)"));
        }
        let (lo, hi) = self.brightness_range;
        if !(lo <= hi && lo >= -1.0 && hi <= 1.0) {
            return bad(format!("brightness range [{lo}, {hi}] must lie inside [-1, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub map: GridMap,
    pub region: HeuristicMap,
    pub query: PlanningQuery,
}

impl Sample {
    pub fn new(map: GridMap, region: HeuristicMap, query: PlanningQuery) -> Result<Self> {
        Error::check_dims(map.dims(), region.dims())?;
        query.validate(&map)?;
        Ok(Sample { map, region, query })
    }
}

/// A drawn transform. Rotation is applied first, then the shift.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Transform {
    pub dx: i64,
    pub dy: i64,
    /// Clockwise quarter turns in image coordinates (y down), 0..=3.
    pub quarter_turns: u8,
    pub shear_degrees: f64,
    pub brightness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSample {
    pub sample: Sample,
    /// Grayscale rendering of the map after brightness jitter.
    pub map_pixels: Vec<u8>,
    pub transform: Transform,
}

impl AugmentedSample {
    pub fn map_p5(&self) -> Vec<u8> {
        let (w, h) = self.sample.map.dims();
        netpbm::encode(w, h, &self.map_pixels, Kind::Gray)
    }
}

/// Divides each 8-bit value by 255.
pub fn rescale_pixels(image: &[u8]) -> Vec<f64> {
    image.iter().map(|&p| f64::from(p) / 255.0).collect()
}

fn transform_cell(col: usize, row: usize, w: usize, h: usize, t: &Transform) -> Option<(usize, usize)> {
    let (c, r) = (col as i64, row as i64);
    let (w, h) = (w as i64, h as i64);
    let (c, r) = match t.quarter_turns % 4 {
        0 => (c, r),
        1 => (h - 1 - r, c),
        2 => (w - 1 - c, h - 1 - r),
        _ => (r, w - 1 - c),
    };
    let (c, r) = (c + t.dx, r + t.dy);
    (c >= 0 && r >= 0 && c < w && r < h).then_some((c as usize, r as usize))
}

fn transform_state(s: &State, map: &GridMap, t: &Transform) -> Option<State> {
    let (col, row) = map.cell_of(s)?;
    let (fx, fy) = (s.x - col as f64, s.y - row as f64);
    let (c, r) = transform_cell(col, row, map.width(), map.height(), t)?;
    Some(State::new(c as f64 + fx, r as f64 + fy))
}

fn shear_region(region: &HeuristicMap, degrees: f64) -> HeuristicMap {
    let (w, h) = region.dims();
    let k = degrees.to_radians().tan();
    let cy = (h as f64 - 1.0) / 2.0;
    let weights = (0..h)
        .flat_map(|r| (0..w).map(move |c| (c, r)))
        .map(|(c, r)| {
            let src = (c as f64 - k * (r as f64 - cy)).round();
            if src >= 0.0 && src < w as f64 {
                region.weight(src as usize, r)
            } else {
                0.0
            }
        })
        .collect();
    HeuristicMap::new(w, h, weights).expect("sheared weights stay in [0, 1]")
}

fn render_gray(map: &GridMap, brightness: f64) -> Vec<u8> {
    let shift = brightness * 255.0;
    map.occupancy()
        .iter()
        .map(|&obstacle| {
            let (base, lo, hi) = if obstacle {
                (0.0, 0.0, f64::from(OCCUPANCY_THRESHOLD - 1))
            } else {
                (255.0, f64::from(OCCUPANCY_THRESHOLD), 255.0)
            };
            (base + shift).round().clamp(lo, hi) as u8
        })
        .collect()
}

/// Applies `t` to a sample. Returns `None` when the transformed query leaves
/// free space or the region loses all of its mass.
pub fn apply_transform(s: &Sample, t: &Transform) -> Option<AugmentedSample> {
    let (w, h) = s.map.dims();
    if t.quarter_turns % 2 == 1 && w != h {
        return None;
    }
    let mut occupancy = vec![false; w * h];
    let mut weights = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            if let Some((c, r)) = transform_cell(col, row, w, h, t) {
                occupancy[r * w + c] = s.map.is_obstacle(col, row);
                weights[r * w + c] = s.region.weight(col, row);
            }
        }
    }
    let map = GridMap::new(w, h, occupancy).ok()?;
    let mut region = HeuristicMap::new(w, h, weights).ok()?;
    if t.shear_degrees != 0.0 {
        region = shear_region(&region, t.shear_degrees);
    }
    let region = region.masked(&map).ok()?;
    if s.region.total() > 0.0 && region.total() <= 0.0 {
        return None;
    }
    let start = transform_state(&s.query.start, &s.map, t)?;
    let goal = transform_state(&s.query.goal, &s.map, t)?;
    let query = PlanningQuery::new(&map, start, goal, s.query.goal_radius).ok()?;
    Some(AugmentedSample {
        map_pixels: render_gray(&map, t.brightness),
        sample: Sample { map, region, query },
        transform: *t,
    })
}

fn draw_shift(max: usize, step: usize, rng: &mut RandomSource) -> i64 {
    if max == 0 || step == 0 {
        return 0;
    }
    let k = (max / step) as i64;
    (rng.below((2 * k + 1) as usize) as i64 - k) * step as i64
}

pub fn draw_transform(p: &AugmentParams, square: bool, rng: &mut RandomSource) -> Transform {
    let dx = draw_shift(p.width_shift, p.shift_step, rng);
    let dy = draw_shift(p.height_shift, p.shift_step, rng);
    let quarter_turns = if rng.bernoulli(p.rotation_probability) {
        if square {
            1 + rng.below(3) as u8
        } else {
            2
        }
    } else {
        0
    };
    let shear_degrees = rng.uniform(p.shear_degrees.0, p.shear_degrees.1);
    let brightness = rng.uniform(p.brightness_range.0, p.brightness_range.1);
    Transform {
        dx,
        dy,
        quarter_turns,
        shear_degrees,
        brightness,
    }
}

/// Produces exactly `p.maps_to_generate` augmented copies of `s`.
pub fn augment_sample(
    s: &Sample,
    p: &AugmentParams,
    rng: &mut RandomSource,
) -> Result<Vec<AugmentedSample>> {
    p.validate()?;
    let square = s.map.width() == s.map.height();
    let mut out = Vec::with_capacity(p.maps_to_generate);
    for slot in 0..p.maps_to_generate {
        let produced = (0..MAX_ATTEMPTS)
            .find_map(|_| apply_transform(s, &draw_transform(p, square, rng)))
            .ok_or_else(|| {
                Error::AugmentationInfeasible(format!(
                    "output {slot}: {MAX_ATTEMPTS} consecutive draws were rejected"
                ))
            })?;
        out.push(produced);
    }
    Ok(out)
}

/// One line of the augmentation manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub name: String,
    pub source: String,
    pub dx: i64,
    pub dy: i64,
    pub quarter_turns: u8,
    pub shear_deg: f64,
    pub brightness: f64,
}

impl ManifestRow {
    pub fn new(name: impl Into<String>, source: impl Into<String>, t: &Transform) -> Self {
        ManifestRow {
            name: name.into(),
            source: source.into(),
            dx: t.dx,
            dy: t.dy,
            quarter_turns: t.quarter_turns,
            shear_deg: t.shear_degrees,
            brightness: t.brightness,
        }
    }
}

pub fn write_manifest<W: io::Write>(out: W, rows: &[ManifestRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if rows.is_empty() {
        w.write_record(["name", "source", "dx", "dy", "quarter_turns", "shear_deg", "brightness"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
