//! Path planning on 2-D occupancy grids with a Rapidly-exploring Random Tree
//! whose sampling can be biased toward a "promising region" heuristic map.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`map_model`] - grids, queries, heuristic maps and their netpbm encodings
//! * [`sampling`] - the lambda-mixture sampling distribution and seeded RNG
//! * [`planner`] - the RRT loop and its geometric primitives
//! * [`metrics`] - IoU / Dice and per-trial aggregation
//! * [`augment`] - joint map/region/query augmentation
//! * [`corpus`] - synthetic benchmark maps and the on-disk bundle layout

pub mod augment;
pub mod corpus;
pub mod error;
pub mod map_model;
pub mod metrics;
pub mod netpbm;
pub mod planner;
pub mod sampling;

pub use error::{Error, Result};
pub use map_model::{GridMap, HeuristicMap, PlanningQuery, RgbImage, State};
pub use metrics::{BinaryMask, SummaryRow, TrialRecord};
pub use planner::{PlanResult, PlannerParams, Tree};
pub use sampling::{RandomSource, SamplingDistribution};
