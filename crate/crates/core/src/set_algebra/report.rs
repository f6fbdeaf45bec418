use serde::Serialize;

use super::{CheckpointSchedule, IntSet};
use crate::error::{Error, Result};
use crate::Rational;

/// One sample of the counting function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub count: u64,
    pub ratio: f64,
    /// `c/n` for a set with modulus constant `c`; bounds `|ratio − d(A)|`.
    pub error_bound: Option<f64>,
}

/// Checkpoint table for `A(n)/n` with tail extremes standing in for
/// `d_L` and `d_U`.
///
/// The tail extremes are a proxy over finitely many samples. They are never
/// the true liminf and limsup.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub label: String,
    pub checkpoints: Vec<Checkpoint>,
    pub empirical_lower: f64,
    pub empirical_upper: f64,
    pub horizon: u64,
    pub exact_density: Option<Rational>,
    pub certified: bool,
}

impl DensityReport {
    pub fn last_ratio(&self) -> f64 {
        self.checkpoints.last().map_or(f64::NAN, |c| c.ratio)
    }

    /// The tail window: checkpoints in the upper half `[horizon/2, horizon]` of the range.
    pub fn tail(&self) -> &[Checkpoint] {
        tail_window(&self.checkpoints, self.horizon)
    }

    pub fn tail_spread(&self) -> f64 {
        self.empirical_upper - self.empirical_lower
    }
}

// The horizon is always a checkpoint, so the window is never empty.
fn tail_window(checkpoints: &[Checkpoint], horizon: u64) -> &[Checkpoint] {
    let start = checkpoints.partition_point(|c| c.n < horizon / 2);
    &checkpoints[start..]
}

/// Evaluates `A(n)/n` at every scheduled checkpoint up to `horizon` in a single pass.
pub fn estimate_densities(
    set: &IntSet,
    schedule: &CheckpointSchedule,
    horizon: u64,
) -> Result<DensityReport> {
    if horizon < schedule.first() {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} precedes the first checkpoint {}",
            schedule.first()
        )));
    }
    let points = schedule.points(horizon);
    let counts = set.count_many(&points);
    let constant = set.modulus().map(|m| m.constant());
    let checkpoints: Vec<Checkpoint> = points
        .iter()
        .zip(counts)
        .map(|(&n, count)| Checkpoint {
            n,
            count,
            ratio: count as f64 / n as f64,
            error_bound: constant.map(|c| c as f64 / n as f64),
        })
        .collect();
    let tail = tail_window(&checkpoints, horizon);
    let empirical_lower = tail.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
    let empirical_upper = tail
        .iter()
        .map(|c| c.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DensityReport {
        label: set.label().to_string(),
        checkpoints,
        empirical_lower,
        empirical_upper,
        horizon,
        exact_density: set.exact_density().cloned(),
        certified: set.modulus().is_some_and(|m| m.is_certified()),
    })
}
