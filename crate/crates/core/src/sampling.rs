//! Seeded randomness and the lambda-mixture sampling distribution.
//!
//! A free cell `c` receives mass
//!
//! ```text
//! lambda * h(c) / sum(h) + (1 - lambda) / |free cells|
//! ```
//!
//! and obstacle cells receive none. Sampling picks a cell by inverse CDF over
//! the prefix sums of the positive-mass cells, then a uniform point inside it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::map_model::{GridMap, HeuristicMap, State};

/// Deterministic generator: the same seed yields the same stream on every platform.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent source for sub-stream `index`, seeded with `seed + index`.
    pub fn derive(&self, index: u64) -> RandomSource {
        RandomSource::new(self.seed.wrapping_add(index))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in `[0, 1)` on a 2^-32 grid. Adding this to a cell index below
    /// 2^21 is exact, so the result never rounds up into the next cell.
    pub fn cell_offset(&mut self) -> f64 {
        f64::from(self.rng.random::<u32>()) / 4_294_967_296.0
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform in `[lo, hi]`; returns `lo` when the interval is empty or a point.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi > lo {
            lo + (hi - lo) * self.unit()
        } else {
            lo
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDistribution {
    width: usize,
    height: usize,
    lambda: f64,
    mass: Vec<f64>,
    support: Vec<usize>,
    cumulative: Vec<f64>,
}

impl SamplingDistribution {
    /// Builds the lambda-mixture of the (masked) heuristic and uniform free-space mass.
    pub fn build(h: &HeuristicMap, map: &GridMap, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be in [0, 1], got {lambda}"
            )));
        }
        let h = h.masked(map)?;
        let free = map.free_cell_count();
        if free == 0 {
            return Err(Error::DegenerateMap("map has no free cells".into()));
        }
        let total = h.total();
        if lambda > 0.0 && total <= 0.0 {
            return Err(Error::DegenerateHeuristic(format!(
                "heuristic has no mass over free space but lambda = {lambda}"
            )));
        }
        let uniform_part = (1.0 - lambda) / free as f64;
        let mass: Vec<f64> = h
            .weights()
            .iter()
            .zip(map.occupancy())
            .map(|(&w, &obstacle)| {
                if obstacle {
                    0.0
                } else if lambda > 0.0 {
                    lambda * w / total + uniform_part
                } else {
                    uniform_part
                }
            })
            .collect();
        Ok(Self::from_mass(map.width(), map.height(), lambda, mass))
    }

    /// Uniform over free cells (lambda = 0).
    pub fn uniform(map: &GridMap) -> Result<Self> {
        Self::build(&HeuristicMap::zeros(map.width(), map.height()), map, 0.0)
    }

    fn from_mass(width: usize, height: usize, lambda: f64, mass: Vec<f64>) -> Self {
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (i, &m) in mass.iter().enumerate() {
            if m > 0.0 {
                acc += m;
                support.push(i);
                cumulative.push(acc);
            }
        }
        SamplingDistribution {
            width,
            height,
            lambda,
            mass,
            support,
            cumulative,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Row-major probability mass per cell.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Cells with positive mass, in row-major order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Prefix sums of `mass` over [`support`](Self::support).
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Draws a row-major cell index by inverse CDF.
    pub fn sample_cell(&self, rng: &mut RandomSource) -> usize {
        let total = *self.cumulative.last().expect("distribution has empty support");
        let u = rng.unit() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.support[k.min(self.support.len() - 1)]
    }

    /// Draws a cell, then a uniform point inside it.
    pub fn sample_state(&self, rng: &mut RandomSource) -> State {
        let cell = self.sample_cell(rng);
        let (col, row) = (cell % self.width, cell / self.width);
        let x = col as f64 + rng.cell_offset();
        let y = row as f64 + rng.cell_offset();
        State::new(x, y)
    }
}

/// Uniform free-space sample; same stream as sampling the lambda = 0 distribution.
pub fn sample_uniform(map: &GridMap, rng: &mut RandomSource) -> Result<State> {
    Ok(SamplingDistribution::uniform(map)?.sample_state(rng))
}
