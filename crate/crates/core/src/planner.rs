//! Rapidly-exploring Random Tree over a [`GridMap`].
//!
//! Each iteration draws a state from the sampling distribution, steers the
//! nearest tree vertex toward it by at most `step_length`, and keeps the new
//! vertex when the connecting segment is collision free. Planning stops once a
//! new vertex lies within the goal radius and sees the goal directly.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::map_model::{GridMap, PlanningQuery, State};
use crate::sampling::{RandomSource, SamplingDistribution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    pub step_length: f64,
    pub max_iterations: usize,
    pub collision_resolution: f64,
    pub goal_radius: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            step_length: 10.0,
            max_iterations: 5000,
            collision_resolution: 1.0,
            goal_radius: 5.0,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.step_length) {
            return Err(Error::InvalidParameter(format!(
                "step_length must be positive, got {}",
                self.step_length
            )));
        }
        if !positive(self.collision_resolution) {
            return Err(Error::InvalidParameter(format!(
                "collision_resolution must be positive, got {}",
                self.collision_resolution
            )));
        }
        if !positive(self.goal_radius) {
            return Err(Error::InvalidParameter(format!(
                "goal_radius must be positive, got {}",
                self.goal_radius
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Vertices in insertion order; `parent[0] == 0` marks the root.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tree {
    pub vertices: Vec<State>,
    pub parent: Vec<usize>,
}

impl Tree {
    pub fn with_root(root: State) -> Self {
        Tree {
            vertices: vec![root],
            parent: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn push(&mut self, state: State, parent: usize) -> usize {
        debug_assert!(parent < self.vertices.len());
        self.vertices.push(state);
        self.parent.push(parent);
        self.vertices.len() - 1
    }

    /// Root-to-`index` vertex sequence.
    pub fn branch(&self, mut index: usize) -> Vec<State> {
        let mut out = vec![self.vertices[index]];
        while index != 0 {
            index = self.parent[index];
            out.push(self.vertices[index]);
        }
        out.reverse();
        out
    }

    /// `(parent, child)` state pairs for every non-root vertex.
    pub fn edges(&self) -> impl Iterator<Item = (State, State)> + '_ {
        (1..self.vertices.len()).map(|i| (self.vertices[self.parent[i]], self.vertices[i]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub tree: Tree,
    /// Start to goal; empty when planning failed.
    pub path: Vec<State>,
    pub node_count: usize,
    pub iterations_used: usize,
    /// Wall-clock seconds spent in the planning loop.
    pub time_cost: f64,
    pub path_cost: f64,
}

impl PlanResult {
    pub fn success(&self) -> bool {
        !self.path.is_empty()
    }
}

/// Index of the vertex closest to `q`; ties go to the smallest index.
///
/// Panics on an empty tree.
pub fn nearest(tree: &Tree, q: &State) -> usize {
    assert!(!tree.is_empty(), "nearest() on an empty tree");
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (i, v) in tree.vertices.iter().enumerate() {
        let (dx, dy) = (v.x - q.x, v.y - q.y);
        let d2 = dx * dx + dy * dy;
        if d2 < best_d2 {
            best = i;
            best_d2 = d2;
        }
    }
    best
}

/// Moves from `from` toward `to` by at most `step_length`.
///
/// Panics if `step_length` is not positive.
pub fn steer(from: &State, to: &State, step_length: f64) -> State {
    assert!(step_length > 0.0, "step_length must be positive");
    let d = from.distance(to);
    if d <= step_length {
        return *to;
    }
    let s = step_length / d;
    State::new(from.x + s * (to.x - from.x), from.y + s * (to.y - from.y))
}

/// True iff every point on `a`-`b` at spacing at most `resolution`, endpoints
/// included, lies in a free cell.
pub fn collision_free(a: &State, b: &State, map: &GridMap, resolution: f64) -> bool {
    let len = a.distance(b);
    let n = (len / resolution).ceil() as usize;
    if n == 0 {
        return map.is_free(a) && map.is_free(b);
    }
    (0..=n).all(|k| {
        let t = k as f64 / n as f64;
        map.is_free(&State::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    })
}

/// Sum of consecutive Euclidean distances. Panics on an empty path.
pub fn path_cost(path: &[State]) -> f64 {
    assert!(!path.is_empty(), "path_cost() of an empty path");
    path.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Runs RRT from `query.start` until the goal region is reached or the
/// iteration budget runs out. On failure the partial tree is returned with an
/// empty path.
pub fn plan(
    map: &GridMap,
    query: &PlanningQuery,
    dist: &SamplingDistribution,
    params: &PlannerParams,
    rng: &mut RandomSource,
) -> Result<PlanResult> {
    params.validate()?;
    query.validate(map)?;
    Error::check_dims(map.dims(), dist.dims())?;

    let clock = Instant::now();
    let goal = query.goal;
    let reaches_goal = |s: &State| {
        s.distance(&goal) <= query.goal_radius
            && collision_free(s, &goal, map, params.collision_resolution)
    };
    let mut tree = Tree::with_root(query.start);

    let mut reached = reaches_goal(&query.start).then_some(0);
    let mut iterations = 0;
    while reached.is_none() && iterations < params.max_iterations {
        iterations += 1;
        let q_rand = dist.sample_state(rng);
        let near = nearest(&tree, &q_rand);
        let q_near = tree.vertices[near];
        let q_new = steer(&q_near, &q_rand, params.step_length);
        if !collision_free(&q_near, &q_new, map, params.collision_resolution) {
            continue;
        }
        let idx = tree.push(q_new, near);
        if reaches_goal(&q_new) {
            reached = Some(idx);
        }
    }

    let path = match reached {
        Some(idx) => {
            let mut p = tree.branch(idx);
            if p.last() != Some(&goal) {
                p.push(goal);
            }
            p
        }
        None => Vec::new(),
    };
    let time_cost = clock.elapsed().as_secs_f64();
    let cost = if path.is_empty() { 0.0 } else { path_cost(&path) };
    Ok(PlanResult {
        node_count: tree.len(),
        tree,
        path,
        iterations_used: iterations,
        time_cost,
        path_cost: cost,
    })
}
