use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind {
    /// `n₀, ⌈θ·n₀⌉, …`, always advancing by at least 1.
    Geometric {
        ratio: f64,
        start: u64,
    },
    Explicit(Vec<u64>),
}

/// Where counting functions get sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointSchedule {
    kind: ScheduleKind,
    mandatory: Vec<u64>,
}

impl Default for CheckpointSchedule {
    fn default() -> Self {
        Self::geometric(1.1, 10).expect("valid defaults")
    }
}

impl CheckpointSchedule {
    pub fn geometric(ratio: f64, start: u64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric ratio must exceed 1, got {ratio}"
            )));
        }
        if start < 1 {
            return Err(Error::InvalidArgument("geometric start must be ≥ 1".into()));
        }
        Ok(Self {
            kind: ScheduleKind::Geometric { ratio, start },
            mandatory: Vec::new(),
        })
    }

    pub fn explicit(mut points: Vec<u64>) -> Result<Self> {
        if points.is_empty() || points.contains(&0) {
            return Err(Error::InvalidArgument(
                "explicit checkpoints must be non-empty and ≥ 1".into(),
            ));
        }
        points.sort_unstable();
        points.dedup();
        Ok(Self {
            kind: ScheduleKind::Explicit(points),
            mandatory: Vec::new(),
        })
    }

    /// Adds points that are always sampled when they fall under the horizon.
    pub fn with_mandatory(mut self, points: impl IntoIterator<Item = u64>) -> Self {
        self.mandatory
            .extend(points.into_iter().filter(|&n| n >= 1));
        self
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn first(&self) -> u64 {
        match &self.kind {
            ScheduleKind::Geometric { start, .. } => *start,
            ScheduleKind::Explicit(points) => points[0],
        }
    }

    /// Strictly increasing checkpoints in `[1, horizon]`, ending at `horizon`.
    pub fn points(&self, horizon: u64) -> Vec<u64> {
        let mut out = match &self.kind {
            ScheduleKind::Geometric { ratio, start } => {
                let mut v = Vec::new();
                let mut n = *start;
                while n <= horizon {
                    v.push(n);
                    let next = (n as f64 * ratio).ceil() as u64;
                    n = next.max(n + 1);
                }
                v
            }
            ScheduleKind::Explicit(points) => {
                points.iter().copied().filter(|&n| n <= horizon).collect()
            }
        };
        out.extend(self.mandatory.iter().copied().filter(|&n| n <= horizon));
        out.push(horizon);
        out.sort_unstable();
        out.dedup();
        out
    }
}
