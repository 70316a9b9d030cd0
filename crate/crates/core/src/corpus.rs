//! Benchmark bundles on disk and a small synthetic map generator.
//!
//! A bundle named `n` is a set of files in one directory:
//!
//! | file          | content                                   |
//! |---------------|-------------------------------------------|
//! | `n.map.pgm`   | occupancy map (P5)                        |
//! | `n.query.ppm` | start (red) and goal (blue) dots (P6)     |
//! | `n.heur.pgm`  | predicted promising region (P5, optional) |
//! | `n.gt.pgm`    | ground-truth promising region (P5, optional) |

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::map_model::{
    decode_query, load_grid_map, load_heuristic, save_grid_map, save_heuristic, save_query,
    GridMap, HeuristicMap, PlanningQuery, RgbImage, State,
};
use crate::sampling::RandomSource;

pub const MAP_SUFFIX: &str = ".map.pgm";
pub const QUERY_SUFFIX: &str = ".query.ppm";
pub const HEURISTIC_SUFFIX: &str = ".heur.pgm";
pub const GROUND_TRUTH_SUFFIX: &str = ".gt.pgm";

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub name: String,
    pub map: GridMap,
    pub query: PlanningQuery,
    pub heuristic: Option<HeuristicMap>,
    pub ground_truth: Option<HeuristicMap>,
}

impl Bundle {
    /// The region used for biased sampling: the prediction if present,
    /// otherwise the ground truth.
    pub fn guidance(&self) -> Option<&HeuristicMap> {
        self.heuristic.as_ref().or(self.ground_truth.as_ref())
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn bundle_path(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}{suffix}"))
}

/// Names of every bundle in `dir` (files ending in `.map.pgm`), sorted.
pub fn list_bundles(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|n| n.strip_suffix(MAP_SUFFIX))
                .map(str::to_owned)
        })
        .collect();
    names.sort();
    Ok(names)
}

pub fn load_bundle(dir: &Path, name: &str, goal_radius: f64) -> Result<Bundle> {
    let map = load_grid_map(&read(&bundle_path(dir, name, MAP_SUFFIX))?)?;
    let image = RgbImage::from_p6(&read(&bundle_path(dir, name, QUERY_SUFFIX))?)?;
    let query = decode_query(&image, &map, goal_radius)?;
    let optional = |suffix: &str| -> Result<Option<HeuristicMap>> {
        let p = bundle_path(dir, name, suffix);
        if p.exists() {
            Ok(Some(load_heuristic(&read(&p)?, &map)?))
        } else {
            Ok(None)
        }
    };
    Ok(Bundle {
        name: name.to_string(),
        heuristic: optional(HEURISTIC_SUFFIX)?,
        ground_truth: optional(GROUND_TRUTH_SUFFIX)?,
        map,
        query,
    })
}

pub fn load_corpus(dir: &Path, goal_radius: f64) -> Result<Vec<Bundle>> {
    list_bundles(dir)?
        .iter()
        .map(|n| load_bundle(dir, n, goal_radius))
        .collect()
}

pub fn write_bundle(dir: &Path, b: &Bundle) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(bundle_path(dir, &b.name, MAP_SUFFIX), save_grid_map(&b.map))?;
    fs::write(bundle_path(dir, &b.name, QUERY_SUFFIX), save_query(&b.map, &b.query))?;
    if let Some(h) = &b.heuristic {
        fs::write(bundle_path(dir, &b.name, HEURISTIC_SUFFIX), save_heuristic(h))?;
    }
    if let Some(h) = &b.ground_truth {
        fs::write(bundle_path(dir, &b.name, GROUND_TRUTH_SUFFIX), save_heuristic(h))?;
    }
    Ok(())
}

/// Cells of a shortest 8-connected free path from `from` to `to`
/// (axis steps cost 10, diagonal steps 14; no corner cutting).
pub fn grid_path(map: &GridMap, from: (usize, usize), to: (usize, usize)) -> Option<Vec<(usize, usize)>> {
    let (w, h) = map.dims();
    let idx = |c: usize, r: usize| r * w + c;
    if map.is_obstacle(from.0, from.1) || map.is_obstacle(to.0, to.1) {
        return None;
    }
    let mut dist = vec![u64::MAX; w * h];
    let mut prev = vec![usize::MAX; w * h];
    let mut heap = BinaryHeap::new();
    dist[idx(from.0, from.1)] = 0;
    heap.push(Reverse((0u64, idx(from.0, from.1))));
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        if i == idx(to.0, to.1) {
            break;
        }
        let (c, r) = ((i % w) as i64, (i / w) as i64);
        for (dc, dr) in [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)] {
            let (nc, nr) = (c + dc, r + dr);
            if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                continue;
            }
            let (nc, nr) = (nc as usize, nr as usize);
            if map.is_obstacle(nc, nr) {
                continue;
            }
            let diagonal = dc != 0 && dr != 0;
            if diagonal
                && (map.is_obstacle(c as usize, nr) || map.is_obstacle(nc, r as usize))
            {
                continue;
            }
            let nd = d + if diagonal { 14 } else { 10 };
            let j = idx(nc, nr);
            if nd < dist[j] {
                dist[j] = nd;
                prev[j] = i;
                heap.push(Reverse((nd, j)));
            }
        }
    }
    let target = idx(to.0, to.1);
    if dist[target] == u64::MAX {
        return None;
    }
    let mut cells = vec![to];
    let mut i = target;
    while prev[i] != usize::MAX {
        i = prev[i];
        cells.push((i % w, i / w));
    }
    cells.reverse();
    Some(cells)
}

/// Ground-truth promising region: free cells within `band` cells of a
/// shortest grid path between the query endpoints.
pub fn path_band_region(map: &GridMap, q: &PlanningQuery, band: f64) -> Option<HeuristicMap> {
    let from = map.cell_of(&q.start)?;
    let to = map.cell_of(&q.goal)?;
    let path = grid_path(map, from, to)?;
    let (w, h) = map.dims();
    let mut weights = vec![0.0; w * h];
    let reach = band.ceil() as i64;
    for &(c, r) in &path {
        for dr in -reach..=reach {
            for dc in -reach..=reach {
                if ((dc * dc + dr * dr) as f64).sqrt() > band {
                    continue;
                }
                let (nc, nr) = (c as i64 + dc, r as i64 + dr);
                if nc >= 0 && nr >= 0 && nc < w as i64 && nr < h as i64 {
                    let (nc, nr) = (nc as usize, nr as usize);
                    if !map.is_obstacle(nc, nr) {
                        weights[nr * w + nc] = 1.0;
                    }
                }
            }
        }
    }
    HeuristicMap::new(w, h, weights).ok()
}

fn fill_rect(occ: &mut [bool], w: usize, x0: usize, y0: usize, x1: usize, y1: usize) {
    for r in y0..y1 {
        for c in x0..x1 {
            occ[r * w + c] = true;
        }
    }
}

/// Map family used for planning benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// No obstacles.
    Empty,
    /// Horizontal walls with gaps on alternating sides.
    Zigzag,
    /// A single wall with a narrow gap far from the straight line.
    NarrowGap,
    /// An L-shaped corridor carved out of solid rock.
    LCorridor,
    /// Start and goal on either side of a long wall; the path has to go around it.
    UTurn,
    /// Two offset walls forming an S-shaped route.
    STurn,
    /// A 3x3 grid of rooms joined by doors; the route crosses three rooms.
    Rooms,
    /// A spine corridor with dead-end teeth hanging off it.
    Comb,
    /// A corridor that forks; one branch is a dead end.
    Fork,
    /// Random axis-aligned rectangles.
    Rectangles,
}

impl Layout {
    /// Corridor and turn maps with dead-end space off the route.
    pub const BENCHMARK: [Layout; 5] = [
        Layout::LCorridor,
        Layout::STurn,
        Layout::Rooms,
        Layout::Comb,
        Layout::Fork,
    ];

    pub const ALL: [Layout; 10] = [
        Layout::Empty,
        Layout::Zigzag,
        Layout::NarrowGap,
        Layout::LCorridor,
        Layout::UTurn,
        Layout::STurn,
        Layout::Rooms,
        Layout::Comb,
        Layout::Fork,
        Layout::Rectangles,
    ];

    pub fn from_name(name: &str) -> Option<Layout> {
        Layout::ALL.into_iter().find(|l| l.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Layout::Empty => "empty",
            Layout::Zigzag => "zigzag",
            Layout::NarrowGap => "narrow_gap",
            Layout::LCorridor => "l_corridor",
            Layout::UTurn => "u_turn",
            Layout::STurn => "s_turn",
            Layout::Rooms => "rooms",
            Layout::Comb => "comb",
            Layout::Fork => "fork",
            Layout::Rectangles => "rectangles",
        }
    }
}

/// Builds a `size`x`size` bundle for `layout`. The ground-truth region is the
/// `band`-cell neighbourhood of a shortest grid path. `rng` is only consulted
/// by [`Layout::Rectangles`] and for `Empty` endpoints.
pub fn generate(layout: Layout, size: usize, band: f64, goal_radius: f64, rng: &mut RandomSource) -> Result<Bundle> {
    let n = size;
    if n < 32 {
        return Err(Error::InvalidParameter(format!("synthetic maps need size >= 32, got {n}")));
    }
    let f = |num: usize, den: usize| n * num / den;
    let mut occ = vec![false; n * n];
    let (start, goal) = match layout {
        Layout::Empty => {
            let a = State::new(rng.uniform(1.0, n as f64 - 1.0), rng.uniform(1.0, n as f64 - 1.0));
            let b = State::new(rng.uniform(1.0, n as f64 - 1.0), rng.uniform(1.0, n as f64 - 1.0));
            (a, b)
        }
        Layout::Zigzag => {
            let t = f(1, 16).max(2);
            fill_rect(&mut occ, n, 0, f(1, 3), f(3, 4), f(1, 3) + t);
            fill_rect(&mut occ, n, f(1, 4), f(2, 3), n, f(2, 3) + t);
            (State::new(f(1, 8) as f64, f(1, 8) as f64), State::new(f(7, 8) as f64, f(7, 8) as f64))
        }
        Layout::NarrowGap => {
            let t = f(1, 16).max(2);
            let gap = f(1, 16).max(3);
            fill_rect(&mut occ, n, f(1, 2) - t / 2, 0, f(1, 2) + t / 2, n - gap - 2);
            fill_rect(&mut occ, n, f(1, 2) - t / 2, n - 2, f(1, 2) + t / 2, n);
            (State::new(f(1, 8) as f64, f(1, 8) as f64), State::new(f(7, 8) as f64, f(1, 8) as f64))
        }
        Layout::LCorridor => {
            let wdt = f(1, 8).max(4);
            fill_rect(&mut occ, n, 0, 0, n, n);
            // vertical leg on the left, horizontal leg along the bottom
            fill_rect_free(&mut occ, n, 1, 1, 1 + wdt, n - 1);
            fill_rect_free(&mut occ, n, 1, n - 1 - wdt, n - 1, n - 1);
            // a dead-end room opening off the vertical leg
            fill_rect_free(&mut occ, n, 1 + wdt, f(1, 8), f(7, 8), f(5, 8));
            (
                State::new(1.0 + (wdt / 2) as f64, 2.0),
                State::new((n - 3) as f64, (n - 1 - wdt / 2) as f64),
            )
        }
        Layout::UTurn => {
            let t = f(1, 16).max(2);
            fill_rect(&mut occ, n, f(1, 2) - t / 2, f(1, 8), f(1, 2) + t / 2, n);
            (State::new(f(3, 8) as f64, f(7, 8) as f64), State::new(f(5, 8) as f64, f(7, 8) as f64))
        }
        Layout::STurn => {
            let t = f(1, 16).max(2);
            fill_rect(&mut occ, n, f(1, 3), 0, f(1, 3) + t, f(3, 4));
            fill_rect(&mut occ, n, f(2, 3), f(1, 4), f(2, 3) + t, n);
            (State::new(f(1, 8) as f64, f(7, 8) as f64), State::new(f(7, 8) as f64, f(1, 8) as f64))
        }
        Layout::Rooms => {
            let t = f(1, 32).max(2);
            let door = f(1, 10).max(4);
            for k in [f(1, 3), f(2, 3)] {
                fill_rect(&mut occ, n, k - t / 2, 0, k - t / 2 + t, n);
                fill_rect(&mut occ, n, 0, k - t / 2, n, k - t / 2 + t);
            }
            // one door in the middle of every wall segment between neighbouring rooms
            let centres = [f(1, 6), f(1, 2), f(5, 6)];
            for k in [f(1, 3), f(2, 3)] {
                for &c in &centres {
                    fill_rect_free(&mut occ, n, k - t / 2, c - door / 2, k - t / 2 + t, c - door / 2 + door);
                    fill_rect_free(&mut occ, n, c - door / 2, k - t / 2, c - door / 2 + door, k - t / 2 + t);
                }
            }
            (State::new(f(1, 6) as f64, f(1, 6) as f64), State::new(f(5, 6) as f64, f(1, 6) as f64))
        }
        Layout::Comb => {
            let t = f(1, 16).max(2);
            let spine = f(1, 5);
            // teeth: walls hanging down from the spine
            let mut x = f(1, 8);
            while x + t < n {
                fill_rect(&mut occ, n, x, spine, x + t, n - f(1, 16));
                x += f(1, 6);
            }
            fill_rect(&mut occ, n, 0, spine, f(1, 8), spine + t);
            (State::new(2.0, f(1, 10) as f64), State::new((n - 3) as f64, f(1, 10) as f64))
        }
        Layout::Fork => {
            let t = f(1, 16).max(2);
            // stem up the middle, arms to the left and right at the top
            fill_rect(&mut occ, n, 0, f(1, 4), f(3, 8), n);
            fill_rect(&mut occ, n, f(5, 8), f(1, 4), n, n);
            fill_rect(&mut occ, n, f(3, 8), f(1, 4), f(3, 8) + t, f(3, 4));
            fill_rect(&mut occ, n, f(5, 8) - t, f(1, 4), f(5, 8), f(3, 4));
            fill_rect(&mut occ, n, f(1, 8), 0, f(1, 8) + t, f(1, 4) - f(1, 16));
            (State::new(f(1, 2) as f64, (n - 3) as f64), State::new(f(1, 16) as f64, f(1, 16) as f64))
        }
        Layout::Rectangles => {
            for _ in 0..8 {
                let (x0, y0) = (rng.below(n), rng.below(n));
                let (rw, rh) = (2 + rng.below(n / 5), 2 + rng.below(n / 5));
                fill_rect(&mut occ, n, x0, y0, (x0 + rw).min(n), (y0 + rh).min(n));
            }
            let free: Vec<usize> = (0..n * n).filter(|&i| !occ[i]).collect();
            if free.len() < 2 {
                return Err(Error::DegenerateMap("rectangles covered the map".into()));
            }
            let a = free[rng.below(free.len())];
            let b = free[rng.below(free.len())];
            (
                State::new((a % n) as f64, (a / n) as f64),
                State::new((b % n) as f64, (b / n) as f64),
            )
        }
    };
    let map = GridMap::new(n, n, occ)?;
    let query = PlanningQuery::new(&map, start, goal, goal_radius)?;
    let ground_truth = path_band_region(&map, &query, band);
    Ok(Bundle {
        name: format!("{}_{n}", layout.name()),
        map,
        query,
        heuristic: None,
        ground_truth,
    })
}

fn fill_rect_free(occ: &mut [bool], w: usize, x0: usize, y0: usize, x1: usize, y1: usize) {
    for r in y0..y1 {
        for c in x0..x1 {
            occ[r * w + c] = false;
        }
    }
}
