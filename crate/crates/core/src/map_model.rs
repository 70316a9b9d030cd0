//! Occupancy grids, planning queries and promising-region heuristic maps.
//!
//! Coordinates: `x` is the column, `y` the row, origin at the top-left.
//! Cell `(i, j)` covers the half-open square `[i, i+1) x [j, j+1)`.

use crate::error::{Error, Result};
use crate::netpbm::{self, Kind};

/// Gray values below this are obstacles.
pub const OCCUPANCY_THRESHOLD: u8 = 128;

pub const RED: [u8; 3] = [255, 0, 0];
pub const GREEN: [u8; 3] = [0, 255, 0];
pub const BLUE: [u8; 3] = [0, 0, 255];
pub const WHITE: [u8; 3] = [255, 255, 255];
pub const BLACK: [u8; 3] = [0, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        State { x, y }
    }

    pub fn distance(&self, other: &State) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Row-major boolean occupancy grid, `true` = obstacle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    occupancy: Vec<bool>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, occupancy: Vec<bool>) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidMap(format!(
                "dimensions must be at least 2x2, got {width}x{height}"
            )));
        }
        if occupancy.len() != width * height {
            return Err(Error::InvalidMap(format!(
                "occupancy has {} cells, expected {}",
                occupancy.len(),
                width * height
            )));
        }
        Ok(GridMap {
            width,
            height,
            occupancy,
        })
    }

    /// All-free map.
    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    /// Builds a map by evaluating `is_obstacle(col, row)` for every cell.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut is_obstacle: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut occupancy = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                occupancy.push(is_obstacle(col, row));
            }
        }
        Self::new(width, height, occupancy)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    pub fn is_obstacle(&self, col: usize, row: usize) -> bool {
        self.occupancy[self.index(col, row)]
    }

    /// The cell containing `s`, or `None` when `s` is outside the map.
    pub fn cell_of(&self, s: &State) -> Option<(usize, usize)> {
        if !(s.x >= 0.0 && s.y >= 0.0) {
            return None;
        }
        let (col, row) = (s.x.floor(), s.y.floor());
        if col < self.width as f64 && row < self.height as f64 {
            Some((col as usize, row as usize))
        } else {
            None
        }
    }

    /// True when `s` lies inside the map on a free cell.
    pub fn is_free(&self, s: &State) -> bool {
        self.cell_of(s)
            .is_some_and(|(col, row)| !self.is_obstacle(col, row))
    }

    pub fn free_cell_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| !o).count()
    }

    pub fn obstacle_count(&self) -> usize {
        self.occupancy.len() - self.free_cell_count()
    }
}

/// Decodes a P5 occupancy map: gray < 128 is an obstacle.
pub fn load_grid_map(bytes: &[u8]) -> Result<GridMap> {
    let raster = netpbm::decode(bytes, Kind::Gray)?;
    let occupancy = raster
        .data
        .iter()
        .map(|&g| g < OCCUPANCY_THRESHOLD)
        .collect();
    GridMap::new(raster.width, raster.height, occupancy)
}

/// Encodes a map as P5 with free = 255 and obstacle = 0.
pub fn save_grid_map(map: &GridMap) -> Vec<u8> {
    let data: Vec<u8> = map
        .occupancy
        .iter()
        .map(|&o| if o { 0 } else { 255 })
        .collect();
    netpbm::encode(map.width, map.height, &data, Kind::Gray)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanningQuery {
    pub start: State,
    pub goal: State,
    pub goal_radius: f64,
}

impl PlanningQuery {
    /// Validates that start and goal lie in free cells of `map`.
    pub fn new(map: &GridMap, start: State, goal: State, goal_radius: f64) -> Result<Self> {
        let q = PlanningQuery {
            start,
            goal,
            goal_radius,
        };
        q.validate(map)?;
        Ok(q)
    }

    pub fn validate(&self, map: &GridMap) -> Result<()> {
        if !(self.goal_radius > 0.0 && self.goal_radius.is_finite()) {
            return Err(Error::Query(format!(
                "goal radius must be positive, got {}",
                self.goal_radius
            )));
        }
        for (name, s) in [("start", &self.start), ("goal", &self.goal)] {
            if !s.is_finite() {
                return Err(Error::Query(format!("{name} is not finite")));
            }
            if !map.is_free(s) {
                return Err(Error::InfeasibleQuery(format!(
                    "{name} ({}, {}) is outside free space",
                    s.x, s.y
                )));
            }
        }
        Ok(())
    }
}

/// Row-major RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let data = color
            .iter()
            .copied()
            .cycle()
            .take(width * height * 3)
            .collect();
        RgbImage {
            width,
            height,
            data,
        }
    }

    pub fn pixel(&self, col: usize, row: usize) -> [u8; 3] {
        let i = 3 * (row * self.width + col);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn put(&mut self, col: usize, row: usize, color: [u8; 3]) {
        let i = 3 * (row * self.width + col);
        self.data[i..i + 3].copy_from_slice(&color);
    }

    pub fn from_p6(bytes: &[u8]) -> Result<Self> {
        let r = netpbm::decode(bytes, Kind::Rgb)?;
        Ok(RgbImage {
            width: r.width,
            height: r.height,
            data: r.data,
        })
    }

    pub fn to_p6(&self) -> Vec<u8> {
        netpbm::encode(self.width, self.height, &self.data, Kind::Rgb)
    }

    /// Draws a straight segment between two states (integer DDA over pixel centres).
    pub fn draw_segment(&mut self, a: &State, b: &State, color: [u8; 3]) {
        let steps = (a.distance(b) * 2.0).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let x = a.x + t * (b.x - a.x);
            let y = a.y + t * (b.y - a.y);
            if x >= 0.0 && y >= 0.0 && (x as usize) < self.width && (y as usize) < self.height {
                self.put(x as usize, y as usize, color);
            }
        }
    }
}

fn color_matches(px: [u8; 3], target: [u8; 3], tolerance: u8) -> bool {
    px.iter()
        .zip(target)
        .all(|(&p, t)| p.abs_diff(t) <= tolerance)
}

/// Reads the start (red) and goal (blue) dots from a query image.
///
/// Each colour is treated as one dot; its state is the centroid of the
/// matching pixel indices. Exact colour match is required.
pub fn decode_query(image: &RgbImage, map: &GridMap, goal_radius: f64) -> Result<PlanningQuery> {
    decode_query_with_tolerance(image, map, goal_radius, 0)
}

/// As [`decode_query`], accepting pixels within `tolerance` of pure red/blue per channel.
pub fn decode_query_with_tolerance(
    image: &RgbImage,
    map: &GridMap,
    goal_radius: f64,
    tolerance: u8,
) -> Result<PlanningQuery> {
    Error::check_dims(map.dims(), (image.width, image.height))?;
    let centroid = |target: [u8; 3], name: &str| -> Result<State> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for row in 0..image.height {
            for col in 0..image.width {
                if color_matches(image.pixel(col, row), target, tolerance) {
                    sx += col as f64;
                    sy += row as f64;
                    n += 1;
                }
            }
        }
        if n == 0 {
            return Err(Error::Query(format!("no {name} pixels in query image")));
        }
        Ok(State::new(sx / n as f64, sy / n as f64))
    };
    let start = centroid(RED, "red (start)")?;
    let goal = centroid(BLUE, "blue (goal)")?;
    PlanningQuery::new(map, start, goal, goal_radius)
}

/// Renders a query image: the map in black/white with a single red pixel at
/// the start cell and a blue pixel at the goal cell.
pub fn save_query(map: &GridMap, q: &PlanningQuery) -> Vec<u8> {
    let mut img = render_map(map);
    for (s, color) in [(&q.start, RED), (&q.goal, BLUE)] {
        if let Some((c, r)) = map.cell_of(s) {
            img.put(c, r, color);
        }
    }
    img.to_p6()
}

pub fn render_map(map: &GridMap) -> RgbImage {
    let mut img = RgbImage::filled(map.width, map.height, WHITE);
    for row in 0..map.height {
        for col in 0..map.width {
            if map.is_obstacle(col, row) {
                img.put(col, row, BLACK);
            }
        }
    }
    img
}

/// Per-cell promising-region weights in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicMap {
    width: usize,
    height: usize,
    weight: Vec<f64>,
}

impl HeuristicMap {
    pub fn new(width: usize, height: usize, weight: Vec<f64>) -> Result<Self> {
        if weight.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "heuristic has {} weights, expected {}",
                weight.len(),
                width * height
            )));
        }
        if let Some(bad) = weight.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidParameter(format!(
                "heuristic weight {bad} outside [0, 1]"
            )));
        }
        Ok(HeuristicMap {
            width,
            height,
            weight,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        HeuristicMap {
            width,
            height,
            weight: vec![0.0; width * height],
        }
    }

    /// Decodes a P5 image as weights `gray / 255` without masking.
    pub fn from_p5(bytes: &[u8]) -> Result<Self> {
        let r = netpbm::decode(bytes, Kind::Gray)?;
        let weight = r.data.iter().map(|&g| f64::from(g) / 255.0).collect();
        Ok(HeuristicMap {
            width: r.width,
            height: r.height,
            weight,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn weight(&self, col: usize, row: usize) -> f64 {
        self.weight[row * self.width + col]
    }

    /// Copy with every obstacle cell of `map` forced to zero.
    pub fn masked(&self, map: &GridMap) -> Result<Self> {
        Error::check_dims(map.dims(), self.dims())?;
        let weight = self
            .weight
            .iter()
            .zip(map.occupancy())
            .map(|(&w, &obstacle)| if obstacle { 0.0 } else { w })
            .collect();
        Ok(HeuristicMap {
            width: self.width,
            height: self.height,
            weight,
        })
    }

    pub fn total(&self) -> f64 {
        self.weight.iter().sum()
    }
}

/// Decodes a P5 heuristic for `map`: weights are `gray / 255`, masked to free space.
pub fn load_heuristic(bytes: &[u8], map: &GridMap) -> Result<HeuristicMap> {
    let raw = HeuristicMap::from_p5(bytes)?;
    let h = raw.masked(map)?;
    if h.weight.iter().all(|&w| w == 0.0) {
        return Err(Error::DegenerateHeuristic(
            "all weights are zero over free space".into(),
        ));
    }
    Ok(h)
}

/// Quantizes a weight to 8 bits, rounding half up.
pub fn weight_to_gray(w: f64) -> u8 {
    (w * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn save_heuristic(h: &HeuristicMap) -> Vec<u8> {
    let data: Vec<u8> = h.weight.iter().map(|&w| weight_to_gray(w)).collect();
    netpbm::encode(h.width, h.height, &data, Kind::Gray)
}

/// Map, promising region (weight > 0.5 in green) and query dots as an RGB image.
pub fn render_overlay(map: &GridMap, h: &HeuristicMap, q: &PlanningQuery) -> Result<RgbImage> {
    Error::check_dims(map.dims(), h.dims())?;
    let mut img = render_map(map);
    for row in 0..map.height {
        for col in 0..map.width {
            if !map.is_obstacle(col, row) && h.weight(col, row) > 0.5 {
                img.put(col, row, GREEN);
            }
        }
    }
    for (s, color) in [(&q.start, RED), (&q.goal, BLUE)] {
        if let Some((c, r)) = map.cell_of(s) {
            img.put(c, r, color);
        }
    }
    Ok(img)
}

pub fn save_overlay(map: &GridMap, h: &HeuristicMap, q: &PlanningQuery) -> Result<Vec<u8>> {
    Ok(render_overlay(map, h, q)?.to_p6())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5(w: usize, h: usize, px: &[u8]) -> Vec<u8> {
        netpbm::encode(w, h, px, Kind::Gray)
    }

    #[test]
    fn load_all_white() {
        let m = load_grid_map(&p5(2, 2, &[255; 4])).unwrap();
        assert_eq!(m.dims(), (2, 2));
        assert_eq!(m.obstacle_count(), 0);
    }

    #[test]
    fn load_single_black_pixel() {
        let m = load_grid_map(&p5(2, 2, &[255, 0, 255, 255])).unwrap();
        assert!(m.is_obstacle(1, 0));
        assert_eq!(m.obstacle_count(), 1);
    }

    #[test]
    fn threshold_is_128() {
        let m = load_grid_map(&p5(2, 2, &[127, 128, 0, 255])).unwrap();
        assert_eq!(m.occupancy(), &[true, false, true, false]);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let err = load_grid_map(b"P6\n2 2\n255\n").unwrap_err();
        assert!(err.to_string().contains("expected P5"), "{err}");
    }

    #[test]
    fn tiny_maps_are_rejected() {
        assert!(matches!(GridMap::empty(1, 5), Err(Error::InvalidMap(_))));
        assert!(load_grid_map(&p5(1, 1, &[255])).is_err());
    }

    #[test]
    fn cell_of_is_half_open() {
        let m = GridMap::empty(4, 3).unwrap();
        assert_eq!(m.cell_of(&State::new(0.0, 0.0)), Some((0, 0)));
        assert_eq!(m.cell_of(&State::new(3.999, 2.5)), Some((3, 2)));
        assert_eq!(m.cell_of(&State::new(4.0, 0.0)), None);
        assert_eq!(m.cell_of(&State::new(-0.001, 0.0)), None);
        assert_eq!(m.cell_of(&State::new(f64::NAN, 0.0)), None);
    }

    fn query_image(w: usize, h: usize, red: &[(usize, usize)], blue: &[(usize, usize)]) -> RgbImage {
        let mut img = RgbImage::filled(w, h, WHITE);
        for &(c, r) in red {
            img.put(c, r, RED);
        }
        for &(c, r) in blue {
            img.put(c, r, BLUE);
        }
        img
    }

    #[test]
    fn decode_single_pixel_dots() {
        let map = GridMap::empty(128, 128).unwrap();
        let img = query_image(128, 128, &[(10, 20)], &[(100, 120)]);
        let q = decode_query(&img, &map, 5.0).unwrap();
        assert_eq!(q.start, State::new(10.0, 20.0));
        assert_eq!(q.goal, State::new(100.0, 120.0));
        assert_eq!(q.goal_radius, 5.0);
    }

    #[test]
    fn decode_block_centroid() {
        let map = GridMap::empty(64, 64).unwrap();
        let img = query_image(64, 64, &[(10, 20), (11, 20), (10, 21), (11, 21)], &[(40, 40)]);
        let q = decode_query(&img, &map, 5.0).unwrap();
        assert_eq!(q.start, State::new(10.5, 20.5));
    }

    #[test]
    fn decode_missing_goal() {
        let map = GridMap::empty(16, 16).unwrap();
        let img = query_image(16, 16, &[(1, 1)], &[]);
        assert!(matches!(decode_query(&img, &map, 5.0), Err(Error::Query(_))));
    }

    #[test]
    fn decode_goal_on_obstacle() {
        let map = GridMap::from_fn(16, 16, |c, r| c == 8 && r == 8).unwrap();
        let img = query_image(16, 16, &[(1, 1)], &[(8, 8)]);
        assert!(matches!(
            decode_query(&img, &map, 5.0),
            Err(Error::InfeasibleQuery(_))
        ));
    }

    #[test]
    fn decode_dimension_mismatch() {
        let map = GridMap::empty(16, 16).unwrap();
        let img = query_image(8, 8, &[(1, 1)], &[(2, 2)]);
        assert!(matches!(
            decode_query(&img, &map, 5.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn decode_tolerance() {
        let map = GridMap::empty(16, 16).unwrap();
        let mut img = RgbImage::filled(16, 16, WHITE);
        img.put(2, 3, [250, 4, 0]);
        img.put(9, 9, [3, 0, 251]);
        assert!(decode_query(&img, &map, 5.0).is_err());
        let q = decode_query_with_tolerance(&img, &map, 5.0, 5).unwrap();
        assert_eq!(q.start, State::new(2.0, 3.0));
        assert_eq!(q.goal, State::new(9.0, 9.0));
    }

    #[test]
    fn save_query_decodes_back() {
        let map = GridMap::empty(32, 32).unwrap();
        let q = PlanningQuery::new(&map, State::new(3.0, 4.0), State::new(30.0, 1.0), 5.0).unwrap();
        let img = RgbImage::from_p6(&save_query(&map, &q)).unwrap();
        assert_eq!(decode_query(&img, &map, 5.0).unwrap(), q);
    }

    #[test]
    fn query_rejects_nonpositive_radius() {
        let map = GridMap::empty(4, 4).unwrap();
        let r = PlanningQuery::new(&map, State::new(0.5, 0.5), State::new(3.5, 3.5), 0.0);
        assert!(matches!(r, Err(Error::Query(_))));
    }

    #[test]
    fn heuristic_constant_gray() {
        let map = GridMap::empty(4, 4).unwrap();
        let h = load_heuristic(&p5(4, 4, &[128; 16]), &map).unwrap();
        assert!(h.weights().iter().all(|&w| w == 128.0 / 255.0));
    }

    #[test]
    fn heuristic_one_hot() {
        let map = GridMap::empty(4, 4).unwrap();
        let mut px = [0u8; 16];
        px[5] = 255;
        let h = load_heuristic(&p5(4, 4, &px), &map).unwrap();
        assert_eq!(h.weight(1, 1), 1.0);
        assert_eq!(h.total(), 1.0);
    }

    #[test]
    fn heuristic_fully_masked_is_degenerate() {
        let map = GridMap::from_fn(4, 4, |c, _| c == 0).unwrap();
        let px: Vec<u8> = (0..16).map(|i| if i % 4 == 0 { 255 } else { 0 }).collect();
        assert!(matches!(
            load_heuristic(&p5(4, 4, &px), &map),
            Err(Error::DegenerateHeuristic(_))
        ));
    }

    #[test]
    fn heuristic_dimension_mismatch() {
        let map = GridMap::empty(4, 4).unwrap();
        assert!(matches!(
            load_heuristic(&p5(2, 2, &[255; 4]), &map),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn heuristic_masks_obstacles() {
        let map = GridMap::from_fn(4, 4, |c, r| c == r).unwrap();
        let h = load_heuristic(&p5(4, 4, &[200; 16]), &map).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(h.weight(c, r) == 0.0, c == r);
            }
        }
    }

    #[test]
    fn save_heuristic_quantization() {
        let ones = HeuristicMap::new(2, 2, vec![1.0; 4]).unwrap();
        assert_eq!(&save_heuristic(&ones)[11..], &[255; 4]);
        let halves = HeuristicMap::new(2, 2, vec![0.5; 4]).unwrap();
        assert_eq!(&save_heuristic(&halves)[11..], &[128; 4]);
    }

    #[test]
    fn heuristic_rejects_out_of_range() {
        assert!(HeuristicMap::new(2, 2, vec![0.0, 1.5, 0.0, 0.0]).is_err());
        assert!(HeuristicMap::new(2, 2, vec![f64::NAN; 4]).is_err());
    }

    #[test]
    fn overlay_colors() {
        let map = GridMap::from_fn(8, 8, |c, r| c == 7 && r == 7).unwrap();
        let q = PlanningQuery::new(&map, State::new(0.5, 0.5), State::new(6.5, 6.5), 2.0).unwrap();

        let zero = HeuristicMap::zeros(8, 8);
        let img = render_overlay(&map, &zero, &q).unwrap();
        assert!(!img.data.chunks(3).any(|p| p == GREEN));
        assert_eq!(img.pixel(7, 7), BLACK);
        assert_eq!(img.pixel(3, 3), WHITE);

        let mut w = vec![0.0; 64];
        w[2 * 8 + 3] = 1.0;
        w[0] = 1.0;
        let h = HeuristicMap::new(8, 8, w).unwrap();
        let img = render_overlay(&map, &h, &q).unwrap();
        assert_eq!(img.pixel(3, 2), GREEN);
        assert_eq!(img.pixel(0, 0), RED);
        assert_eq!(img.pixel(6, 6), BLUE);

        let bytes = save_overlay(&map, &h, &q).unwrap();
        assert_eq!(RgbImage::from_p6(&bytes).unwrap(), img);
    }
}
