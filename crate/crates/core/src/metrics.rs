//! Region overlap metrics and benchmark trial aggregation.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_model::HeuristicMap;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "mask of {} bits does not fit {width}x{height}",
                bits.len()
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// `weight >= threshold` per cell.
pub fn binarize(h: &HeuristicMap, threshold: f64) -> BinaryMask {
    BinaryMask {
        width: h.width(),
        height: h.height(),
        bits: h.weights().iter().map(|&w| w >= threshold).collect(),
    }
}

/// True positive, false positive and false negative pixel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<Confusion> {
    Error::check_dims(gt.dims(), pred.dims())?;
    let mut c = Confusion { tp: 0, fp: 0, fn_: 0 };
    for (&p, &g) in pred.bits.iter().zip(&gt.bits) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(c)
}

/// TP / (TP + FN + FP); 1.0 when both masks are empty.
pub fn iou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    let c = confusion(pred, gt)?;
    let denom = c.tp + c.fn_ + c.fp;
    Ok(if denom == 0 { 1.0 } else { c.tp as f64 / denom as f64 })
}

/// 2TP / (2TP + FN + FP); 1.0 when both masks are empty.
pub fn dice(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    let c = confusion(pred, gt)?;
    let denom = 2 * c.tp + c.fn_ + c.fp;
    Ok(if denom == 0 {
        1.0
    } else {
        (2 * c.tp) as f64 / denom as f64
    })
}

/// One planner run in a benchmark. `path_cost` is `None` for failed runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub map_id: String,
    pub algorithm: String,
    pub seed: u64,
    pub success: bool,
    pub time_s: f64,
    pub node_count: usize,
    pub iterations: usize,
    pub path_cost: Option<f64>,
}

/// Per (map, algorithm) summary. Time and node statistics cover every trial;
/// `median_path_cost` covers successful trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub map_id: String,
    pub algorithm: String,
    pub trials: usize,
    pub success_rate: f64,
    pub median_time_s: f64,
    pub mean_time_s: f64,
    pub median_nodes: f64,
    pub mean_nodes: f64,
    pub median_path_cost: Option<f64>,
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Groups records by (map id, algorithm), ordered lexicographically.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no trial records to aggregate".into()));
    }
    let mut groups: BTreeMap<(&str, &str), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.map_id.as_str(), r.algorithm.as_str()))
            .or_default()
            .push(r);
    }
    Ok(groups
        .into_iter()
        .map(|((map_id, algorithm), rs)| {
            let times: Vec<f64> = rs.iter().map(|r| r.time_s).collect();
            let nodes: Vec<f64> = rs.iter().map(|r| r.node_count as f64).collect();
            let costs: Vec<f64> = rs
                .iter()
                .filter(|r| r.success)
                .filter_map(|r| r.path_cost)
                .collect();
            let successes = rs.iter().filter(|r| r.success).count();
            SummaryRow {
                map_id: map_id.to_string(),
                algorithm: algorithm.to_string(),
                trials: rs.len(),
                success_rate: successes as f64 / rs.len() as f64,
                median_time_s: median(&times),
                mean_time_s: mean(&times),
                median_nodes: median(&nodes),
                mean_nodes: mean(&nodes),
                median_path_cost: (!costs.is_empty()).then(|| median(&costs)),
            }
        })
        .collect())
}

fn write_rows<W: io::Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: io::Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Raw trial CSV:
/// `map_id,algorithm,seed,success,time_s,node_count,iterations,path_cost`.
pub fn write_trials_csv<W: io::Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    write_rows(out, records)
}

pub fn read_trials_csv<R: io::Read>(input: R) -> Result<Vec<TrialRecord>> {
    read_rows(input)
}

/// Summary CSV: `map_id,algorithm,trials,success_rate,median_time_s,mean_time_s,median_nodes,mean_nodes,median_path_cost`.
pub fn write_summary_csv<W: io::Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn read_summary_csv<R: io::Read>(input: R) -> Result<Vec<SummaryRow>> {
    read_rows(input)
}
