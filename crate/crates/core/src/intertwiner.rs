//! Splicing two sets of equal density along a threshold sequence.
//!
//! Given `A`, `B` with `d(A) = d(B) = γ > 0`, a decreasing schedule `ε_k → 0`
//! and thresholds `M_k` past which both ratios stay within `ε_k` of `γ`, any
//! `N_k` with `M_{k−1} ≤ N_{k−1} ≤ ε_{k−1}·N_k` yields
//!
//! ```text
//! C = ⋃ A ∩ (N_{2k−1}, N_{2k}]  ∪  ⋃ B ∩ (N_{2k}, N_{2k+1}]
//! ```
//!
//! with `|C(n)/n − γ| < 5ε_{k−1}` for `N_k < n ≤ N_{k+1}`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ceil_u64, int, to_f64};
use crate::set_algebra::{CheckpointSchedule, IntSet, SetRepr};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum EpsilonKind {
    Geometric { scale: Rational, ratio: Rational },
    Explicit(Vec<Rational>),
}

/// A strictly decreasing sequence `ε_1 > ε_2 > …` in `(0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonSchedule {
    kind: EpsilonKind,
}

impl Default for EpsilonSchedule {
    /// `ε_k = 2^{−(k+1)}`.
    fn default() -> Self {
        let half = Rational::new(1.into(), 2.into());
        Self::geometric(half.clone(), half).expect("valid default")
    }
}

impl EpsilonSchedule {
    /// `ε_k = scale·ratio^k`; needs `scale > 0`, `0 < ratio < 1` and `scale·ratio < 1`.
    pub fn geometric(scale: Rational, ratio: Rational) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidSchedule(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(Error::InvalidSchedule(format!(
                "ratio must lie in (0, 1) for a strictly decreasing schedule, got {ratio}"
            )));
        }
        if &scale * &ratio >= Rational::one() {
            return Err(Error::InvalidSchedule(format!(
                "ε_1 = {} must be < 1",
                &scale * &ratio
            )));
        }
        Ok(Self {
            kind: EpsilonKind::Geometric { scale, ratio },
        })
    }

    /// A finite explicit schedule; usable up to its length.
    pub fn explicit(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule("explicit schedule is empty".into()));
        }
        for (i, e) in values.iter().enumerate() {
            if !e.is_positive() || *e >= Rational::one() {
                return Err(Error::InvalidSchedule(format!(
                    "ε_{} = {e} is outside (0, 1)",
                    i + 1
                )));
            }
        }
        if let Some(i) = values.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSchedule(format!(
                "not strictly decreasing at k = {}",
                i + 2
            )));
        }
        Ok(Self {
            kind: EpsilonKind::Explicit(values),
        })
    }

    /// How many terms are available, `None` if unbounded.
    pub fn len_limit(&self) -> Option<usize> {
        match &self.kind {
            EpsilonKind::Geometric { .. } => None,
            EpsilonKind::Explicit(v) => Some(v.len()),
        }
    }

    pub(crate) fn check_depth(&self, depth: usize) -> Result<()> {
        match self.len_limit() {
            Some(len) if len < depth => Err(Error::InvalidSchedule(format!(
                "schedule has {len} terms but depth {depth} was requested"
            ))),
            _ => Ok(()),
        }
    }

    /// `ε_k` for `k ≥ 1`.
    ///
    /// Panics when `k = 0` or `k` exceeds an explicit schedule.
    pub fn epsilon(&self, k: usize) -> Rational {
        assert!(k >= 1, "ε is indexed from 1");
        match &self.kind {
            EpsilonKind::Geometric { scale, ratio } => scale * num_traits::pow(ratio.clone(), k),
            EpsilonKind::Explicit(v) => v[k - 1].clone(),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            EpsilonKind::Geometric { scale, ratio } => format!("geo({scale},{ratio})"),
            EpsilonKind::Explicit(v) => {
                let items: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                format!("list({})", items.join(","))
            }
        }
    }
}

/// Thresholds `M_1, M_2, …` past which every tracked ratio is within `ε_k` of its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdSequence {
    m: Vec<u64>,
    gamma: Rational,
    certified: bool,
}

impl ThresholdSequence {
    pub fn new(m: Vec<u64>, gamma: Rational) -> Self {
        Self {
            m,
            gamma,
            certified: true,
        }
    }

    /// `M_k`, indexed from 1.
    pub fn get(&self, k: usize) -> u64 {
        self.m[k - 1]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.m
    }

    pub fn depth(&self) -> usize {
        self.m.len()
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    /// False when any contributing modulus was caller-supplied.
    pub fn certified(&self) -> bool {
        self.certified
    }
}

/// `M_k = max` over `sets` of their modulus threshold at `ε_k`.
pub(crate) fn joint_thresholds(
    sets: &[&IntSet],
    gamma: Rational,
    eps: &EpsilonSchedule,
    depth: usize,
) -> Result<ThresholdSequence> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
    }
    eps.check_depth(depth)?;
    let mut moduli = Vec::with_capacity(sets.len());
    for set in sets {
        moduli.push(
            set.modulus()
                .ok_or_else(|| Error::MissingModulus(set.label().to_string()))?,
        );
    }
    let m = (1..=depth)
        .map(|k| {
            let e = eps.epsilon(k);
            moduli.iter().map(|md| md.threshold(&e)).max().unwrap_or(1)
        })
        .collect();
    Ok(ThresholdSequence {
        m,
        gamma,
        certified: moduli.iter().all(|md| md.is_certified()),
    })
}

/// `M_k = max(modulus_A(ε_k), modulus_B(ε_k))` for `k = 1..=depth`.
pub fn compute_thresholds(
    a: &IntSet,
    b: &IntSet,
    gamma: &Rational,
    eps: &EpsilonSchedule,
    depth: usize,
) -> Result<ThresholdSequence> {
    if gamma.is_zero() {
        return Err(Error::ZeroDensity);
    }
    for set in [a, b] {
        let d = set
            .exact_density()
            .ok_or_else(|| Error::MissingModulus(set.label().to_string()))?;
        if d != gamma {
            return Err(Error::DensityMismatch(
                Box::new(gamma.clone()),
                Box::new(d.clone()),
            ));
        }
    }
    joint_thresholds(&[a, b], gamma.clone(), eps, depth)
}

/// Thresholds `N_1 < N_2 < …` for a splice.
#[derive(Clone, Debug, PartialEq)]
pub struct InterleavePlan {
    n: Vec<u64>,
    thresholds: ThresholdSequence,
    eps: EpsilonSchedule,
}

/// Which set governs membership at a given `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Source {
    /// `n ≤ N_1`: not in the splice.
    Below,
    A,
    B,
}

/// Location of `n` relative to the plan: `N_k < n ≤ N_{k+1}`, or past `N_depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Located {
    pub k: usize,
    pub source: Source,
    pub truncated: bool,
}

impl InterleavePlan {
    /// Validates `M_k ≤ N_k` for every `k` and `N_{k−1} ≤ ε_{k−1}·N_k` for `k ≥ 2`.
    pub fn new(n: Vec<u64>, thresholds: ThresholdSequence, eps: EpsilonSchedule) -> Result<Self> {
        if n.len() != thresholds.depth() {
            return Err(Error::InvalidArgument(format!(
                "{} thresholds N_k for {} thresholds M_k",
                n.len(),
                thresholds.depth()
            )));
        }
        eps.check_depth(n.len())?;
        for k in 1..=n.len() {
            if thresholds.get(k) > n[k - 1] {
                return Err(Error::PlanInvariant {
                    k,
                    msg: format!("M_{k} = {} exceeds N_{k} = {}", thresholds.get(k), n[k - 1]),
                });
            }
            if k >= 2 && int(n[k - 2]) > eps.epsilon(k - 1) * int(n[k - 1]) {
                return Err(Error::PlanInvariant {
                    k,
                    msg: format!(
                        "N_{} = {} exceeds ε_{}·N_{k} = {}·{}",
                        k - 1,
                        n[k - 2],
                        k - 1,
                        eps.epsilon(k - 1),
                        n[k - 1]
                    ),
                });
            }
        }
        Ok(Self { n, thresholds, eps })
    }

    /// `N_k`, indexed from 1.
    pub fn get(&self, k: usize) -> u64 {
        self.n[k - 1]
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.n
    }

    pub fn threshold_sequence(&self) -> &ThresholdSequence {
        &self.thresholds
    }

    pub fn depth(&self) -> usize {
        self.n.len()
    }

    pub fn gamma(&self) -> &Rational {
        self.thresholds.gamma()
    }

    pub fn epsilons(&self) -> &EpsilonSchedule {
        &self.eps
    }

    pub fn last(&self) -> u64 {
        *self.n.last().expect("depth ≥ 1")
    }

    /// Window `k` uses `A` when `k` is odd and `B` when even. Past `N_depth`
    /// the last window's source continues and the location is marked truncated.
    pub fn locate(&self, n: u64) -> Located {
        let above = self.n.partition_point(|&t| t < n);
        if above == 0 {
            return Located {
                k: 0,
                source: Source::Below,
                truncated: false,
            };
        }
        let truncated = above == self.n.len();
        let k = if truncated {
            self.n.len().max(2) - 1
        } else {
            above
        };
        let source = if k % 2 == 1 { Source::A } else { Source::B };
        Located {
            k: above,
            source,
            truncated,
        }
    }

    /// As [`InterleavePlan::locate`], but refuses points past both `N_depth` and `horizon`.
    pub fn try_locate(&self, n: u64, horizon: u64) -> Result<Located> {
        if n > self.last() && n > horizon {
            return Err(Error::PlanExhausted { n });
        }
        Ok(self.locate(n))
    }
}

/// `N_1 = M_1`, `N_k = max(M_k, ⌈N_{k−1}/ε_{k−1}⌉)`: the smallest thresholds
/// meeting both plan constraints.
pub fn build_plan(m: &ThresholdSequence, eps: &EpsilonSchedule) -> Result<InterleavePlan> {
    if m.depth() < 2 {
        return Err(Error::InvalidArgument("plan depth must be ≥ 2".into()));
    }
    eps.check_depth(m.depth())?;
    let mut n = vec![m.get(1)];
    for k in 2..=m.depth() {
        let prev = n[k - 2];
        n.push(m.get(k).max(ceil_u64(&(int(prev) / eps.epsilon(k - 1)))));
    }
    InterleavePlan::new(n, m.clone(), eps.clone())
}

struct Splice {
    a: IntSet,
    b: IntSet,
    plan: InterleavePlan,
}

impl Splice {
    fn source(&self, s: Source) -> Option<&IntSet> {
        match s {
            Source::Below => None,
            Source::A => Some(&self.a),
            Source::B => Some(&self.b),
        }
    }
}

impl SetRepr for Splice {
    fn contains(&self, n: u64) -> bool {
        self.source(self.plan.locate(n).source)
            .is_some_and(|s| s.contains(n))
    }

    fn count_closed(&self, n: u64) -> Option<u64> {
        let t = &self.plan.n;
        let mut total = 0;
        for k in 1..t.len() {
            if n <= t[k - 1] {
                return Some(total);
            }
            let src = if k % 2 == 1 { &self.a } else { &self.b };
            let top = n.min(t[k]);
            total += src.count_closed(top)? - src.count_closed(t[k - 1])?;
        }
        let last = *t.last().expect("depth ≥ 1");
        if n > last {
            let src = self.source(self.plan.locate(n).source)?;
            total += src.count_closed(n)? - src.count_closed(last)?;
        }
        Some(total)
    }

    fn truncated_beyond(&self) -> Option<u64> {
        Some(self.plan.last())
    }
}

/// The splice `C` of `a` and `b` along `plan`. `C ∩ [1, N_1]` is empty.
pub fn intertwine(a: &IntSet, b: &IntSet, plan: &InterleavePlan) -> IntSet {
    let label = format!("splice({},{})", a.label(), b.label());
    IntSet::from_repr(
        Splice {
            a: a.clone(),
            b: b.clone(),
            plan: plan.clone(),
        },
        label,
    )
}

/// Outcome of checking `|C(n)/n − γ| < 5ε_{k−1}` on one window `(N_k, N_{k+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowCheck {
    pub k: usize,
    pub lower: u64,
    /// `N_{k+1}`; `None` for the truncated tail past `N_depth`.
    pub upper: Option<u64>,
    pub bound: f64,
    pub max_deviation: f64,
    pub slack: f64,
    pub checkpoints: usize,
    /// The whole window lies within the horizon.
    pub complete: bool,
    pub truncated: bool,
    pub passed: bool,
    /// First checkpoint violating the bound.
    pub witness: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub gamma: Rational,
    pub plan: Vec<u64>,
    pub windows: Vec<WindowCheck>,
    pub horizon: u64,
    pub certified: bool,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.windows.iter().all(|w| w.passed)
    }

    pub fn violations(&self) -> usize {
        self.windows.iter().filter(|w| !w.passed).count()
    }
}

/// Checks the splice bound at every checkpoint past `N_2`.
///
/// The schedule is augmented with every `N_k` and `N_k + 1`.
pub fn verify_bound(
    c: &IntSet,
    plan: &InterleavePlan,
    schedule: &CheckpointSchedule,
    horizon: u64,
) -> Result<BoundReport> {
    let depth = plan.depth();
    if horizon < plan.get(2) {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is below N_2 = {}",
            plan.get(2)
        )));
    }
    let schedule = schedule
        .clone()
        .with_mandatory(plan.thresholds().iter().flat_map(|&t| [t, t + 1]));
    let points = schedule.points(horizon);
    let counts = c.count_many(&points);
    let gamma = plan.gamma().clone();

    let mut windows = Vec::new();
    for k in 2..=depth {
        let lower = plan.get(k);
        if lower >= horizon {
            break;
        }
        let upper = (k < depth).then(|| plan.get(k + 1));
        let five_eps = int(5) * plan.epsilons().epsilon(k - 1);
        let mut check = WindowCheck {
            k,
            lower,
            upper,
            bound: to_f64(&five_eps),
            max_deviation: 0.0,
            slack: 0.0,
            checkpoints: 0,
            complete: upper.is_some_and(|u| u <= horizon),
            truncated: upper.is_none(),
            passed: true,
            witness: None,
        };
        let mut worst = Rational::zero();
        for (&n, &count) in points.iter().zip(&counts) {
            if n <= lower || upper.is_some_and(|u| n > u) {
                continue;
            }
            check.checkpoints += 1;
            let deviation = (int(count) - &gamma * int(n)).abs() / int(n);
            if deviation >= five_eps && check.witness.is_none() {
                check.passed = false;
                check.witness = Some(n);
            }
            if deviation > worst {
                worst = deviation;
            }
        }
        check.max_deviation = to_f64(&worst);
        check.slack = to_f64(&(five_eps - worst));
        windows.push(check);
    }
    Ok(BoundReport {
        gamma,
        plan: plan.thresholds().to_vec(),
        windows,
        horizon,
        certified: plan.threshold_sequence().certified(),
    })
}
