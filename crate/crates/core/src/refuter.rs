//! The oscillating-witness construction.
//!
//! Suppose an injective `f` sends `A` and `B`, both of density `γ`, to sets
//! of densities `α < β`. Alternating thresholds `L_k` (where image counts are
//! read) and `N_k = max(L_k + 1, B_f(L_k))` (where the splice switches
//! source) produce a set `C` of density `γ` with
//!
//! ```text
//! f(C)(L_{2k})   / L_{2k}   < α + 2ε_{2k−1}
//! f(C)(L_{2k+1}) / L_{2k+1} > β − 2ε_{2k}
//! ```
//!
//! so `f(C)` has no density. No map sending every set with density to a set
//! with density can admit such a pair; the construction is exhibited on maps
//! outside that class, such as `interleave3`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intertwiner::{
    intertwine, joint_thresholds, verify_bound, BoundReport, EpsilonSchedule, InterleavePlan,
    ThresholdSequence,
};
use crate::maps::InjectiveMap;
use crate::rational::{floor_u64, int, to_f64};
use crate::set_algebra::{CheckpointSchedule, IntSet};
use crate::Rational;

pub const FRAMING_NOTE: &str = "the oscillation shows this map does not send every set with density \
to a set with density; maps that do always satisfy d(f(A)) = λ·d(A), so no such map admits a witness";

#[derive(Clone, Debug)]
pub struct RefutationInstance {
    map: InjectiveMap,
    a: IntSet,
    b: IntSet,
    image_a: IntSet,
    image_b: IntSet,
    gamma: Rational,
    alpha: Rational,
    beta: Rational,
    eps: EpsilonSchedule,
}

fn density_of(set: &IntSet) -> Result<Rational> {
    set.exact_density()
        .cloned()
        .ok_or_else(|| Error::MissingModulus(set.label().to_string()))
}

impl RefutationInstance {
    /// Derives `γ`, `α = d(f(A))` and `β = d(f(B))` from certified densities.
    /// Fails unless `d(A) = d(B)` and `α < β`.
    pub fn new(map: InjectiveMap, a: IntSet, b: IntSet, eps: EpsilonSchedule) -> Result<Self> {
        let gamma = density_of(&a)?;
        let gamma_b = density_of(&b)?;
        if gamma != gamma_b {
            return Err(Error::DensityMismatch(Box::new(gamma), Box::new(gamma_b)));
        }
        let image_a = map.image_set(&a);
        let image_b = map.image_set(&b);
        let alpha = density_of(&image_a)?;
        let beta = density_of(&image_b)?;
        if alpha == beta {
            return Err(Error::NoRefutation {
                alpha: Box::new(alpha),
                beta: Box::new(beta),
            });
        }
        if alpha > beta {
            return Err(Error::RefutationOrder {
                alpha: Box::new(alpha),
                beta: Box::new(beta),
            });
        }
        Ok(Self {
            map,
            a,
            b,
            image_a,
            image_b,
            gamma,
            alpha,
            beta,
            eps,
        })
    }

    pub fn map(&self) -> &InjectiveMap {
        &self.map
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn epsilons(&self) -> &EpsilonSchedule {
        &self.eps
    }

    pub fn image_a(&self) -> &IntSet {
        &self.image_a
    }

    pub fn image_b(&self) -> &IntSet {
        &self.image_b
    }

    /// `M_k`: the largest modulus threshold at `ε_k` among `A`, `B`, `f(A)`, `f(B)`.
    pub fn compute_joint_thresholds(&self, depth: usize) -> Result<ThresholdSequence> {
        joint_thresholds(
            &[&self.a, &self.b, &self.image_a, &self.image_b],
            self.gamma.clone(),
            &self.eps,
            depth,
        )
    }

    /// `L_1 = N_1 = M_1`; then the least `L_k > max(L_{k−1}, M_k)` with
    /// `ε_{k−1}·L_k > N_{k−1}`, and `N_k = max(L_k + 1, B_f(L_k))`.
    pub fn build_paired_plan(&self, m: &ThresholdSequence) -> Result<PairedPlan> {
        let depth = m.depth();
        if depth < 3 {
            return Err(Error::InvalidArgument(
                "paired plan depth must be ≥ 3".into(),
            ));
        }
        self.eps.check_depth(depth)?;
        let mut l = vec![m.get(1)];
        let mut n = vec![m.get(1)];
        for k in 2..=depth {
            let floor_past = l[k - 2].max(m.get(k)) + 1;
            let eps_past = floor_u64(&(int(n[k - 2]) / self.eps.epsilon(k - 1))) + 1;
            let lk = floor_past.max(eps_past);
            l.push(lk);
            n.push((lk + 1).max(self.map.preimage_bound(lk)));
        }
        let splice = InterleavePlan::new(n.clone(), m.clone(), self.eps.clone())?;
        let plan = PairedPlan { l, n, splice };
        plan.validate(&self.map)?;
        Ok(plan)
    }

    pub fn build_witness(&self, plan: &PairedPlan) -> IntSet {
        intertwine(&self.a, &self.b, &plan.splice)
    }

    /// Reads `f(C)(L_k)` at every `L_k ≤ horizon` for `k ≥ 2` and checks the
    /// inequality for its parity, together with the counting sandwich.
    pub fn evaluate_oscillation(
        &self,
        plan: &PairedPlan,
        witness: &IntSet,
        schedule: &CheckpointSchedule,
        horizon: u64,
    ) -> Result<OscillationReport> {
        if horizon < plan.l(3) {
            return Err(Error::InvalidArgument(format!(
                "horizon {horizon} is below L_3 = {}",
                plan.l(3)
            )));
        }
        let image_c = self.map.image_set(witness);
        let reads: Vec<(usize, u64)> = (2..=plan.depth())
            .map(|k| (k, plan.l(k)))
            .filter(|&(_, l)| l <= horizon)
            .collect();
        let points: Vec<u64> = reads.iter().map(|&(_, l)| l).collect();
        let image_counts = image_c.count_many(&points);

        let mut rows = Vec::new();
        for (&(k, l), &count) in reads.iter().zip(&image_counts) {
            let even = k % 2 == 0;
            let two_eps = int(2) * self.eps.epsilon(k - 1);
            let earlier = plan.n(k - 1);
            let (bound, sandwich, passes, sandwich_ok) = if even {
                let bound = &self.alpha + two_eps;
                let sandwich = self.image_a.count(l) + earlier;
                (
                    bound.clone(),
                    sandwich,
                    int(count) < bound * int(l),
                    count <= sandwich,
                )
            } else {
                let bound = &self.beta - two_eps;
                let sandwich = self.image_b.count(l).saturating_sub(earlier);
                (
                    bound.clone(),
                    sandwich,
                    int(count) > bound * int(l),
                    count >= sandwich,
                )
            };
            rows.push(OscillationRow {
                k,
                side: if even { Side::Lower } else { Side::Upper },
                l_k: l,
                image_count: count,
                ratio: count as f64 / l as f64,
                bound: to_f64(&bound),
                sandwich,
                pass: passes && sandwich_ok,
            });
        }

        let lower: Vec<f64> = rows
            .iter()
            .filter(|r| r.side == Side::Lower)
            .map(|r| r.ratio)
            .collect();
        let upper: Vec<f64> = rows
            .iter()
            .filter(|r| r.side == Side::Upper)
            .map(|r| r.ratio)
            .collect();
        let min_lower = lower.iter().copied().fold(f64::INFINITY, f64::min);
        let max_upper = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let witness_density = verify_bound(witness, &plan.splice, schedule, horizon)?;
        Ok(OscillationReport {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            gamma: self.gamma.clone(),
            l: plan.l.clone(),
            n: plan.n.clone(),
            rows,
            min_lower_ratio: min_lower,
            max_upper_ratio: max_upper,
            gap: max_upper - min_lower,
            target_gap: to_f64(&((&self.beta - &self.alpha) / int(2))),
            witness_density,
            horizon,
        })
    }
}

/// Thresholds `L_k` and `N_k` for the oscillating witness.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedPlan {
    l: Vec<u64>,
    n: Vec<u64>,
    splice: InterleavePlan,
}

impl PairedPlan {
    pub fn depth(&self) -> usize {
        self.l.len()
    }

    /// `L_k`, indexed from 1.
    pub fn l(&self, k: usize) -> u64 {
        self.l[k - 1]
    }

    /// `N_k`, indexed from 1.
    pub fn n(&self, k: usize) -> u64 {
        self.n[k - 1]
    }

    pub fn l_values(&self) -> &[u64] {
        &self.l
    }

    pub fn n_values(&self) -> &[u64] {
        &self.n
    }

    pub fn splice_plan(&self) -> &InterleavePlan {
        &self.splice
    }

    /// Checks every plan constraint, including `f(n) > L_k` past `N_k` via the
    /// map's certified preimage bound.
    pub fn validate(&self, map: &InjectiveMap) -> Result<()> {
        let m = self.splice.threshold_sequence();
        let eps = self.splice.epsilons();
        let fail = |k: usize, msg: String| Err(Error::PlanInvariant { k, msg });
        for k in 2..=self.depth() {
            let (lk, nk) = (self.l(k), self.n(k));
            if lk <= self.l(k - 1).max(m.get(k)) {
                return fail(
                    k,
                    format!("L_{k} = {lk} must exceed max(L_{}, M_{k})", k - 1),
                );
            }
            if eps.epsilon(k - 1) * int(lk) <= int(self.n(k - 1)) {
                return fail(k, format!("ε_{}·L_{k} must exceed N_{}", k - 1, k - 1));
            }
            if nk <= lk {
                return fail(k, format!("N_{k} = {nk} must exceed L_{k} = {lk}"));
            }
            if map.preimage_bound(lk) > nk {
                return fail(k, format!("some n > N_{k} has f(n) ≤ L_{k}"));
            }
            if eps.epsilon(k - 1) * int(nk) <= int(self.n(k - 1)) {
                return fail(k, format!("ε_{}·N_{k} must exceed N_{}", k - 1, k - 1));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Even `k`: pushes the lower density down towards `α`.
    Lower,
    /// Odd `k`: pushes the upper density up towards `β`.
    Upper,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationRow {
    pub k: usize,
    pub side: Side,
    pub l_k: u64,
    pub image_count: u64,
    pub ratio: f64,
    pub bound: f64,
    /// `f(A)(L_k) + N_{k−1}` (lower side) or `f(B)(L_k) − N_{k−1}` (upper side).
    pub sandwich: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillationReport {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub l: Vec<u64>,
    pub n: Vec<u64>,
    pub rows: Vec<OscillationRow>,
    pub min_lower_ratio: f64,
    pub max_upper_ratio: f64,
    /// `max_upper_ratio − min_lower_ratio`.
    pub gap: f64,
    /// `(β − α)/2`.
    pub target_gap: f64,
    pub witness_density: BoundReport,
    pub horizon: u64,
}

impl OscillationReport {
    pub fn lower_passes(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.side == Side::Lower && r.pass)
            .count()
    }

    pub fn upper_passes(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.side == Side::Upper && r.pass)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.witness_density.passed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn interleave_instance() -> RefutationInstance {
        RefutationInstance::new(
            InjectiveMap::interleave3(),
            IntSet::odds(),
            IntSet::evens(),
            EpsilonSchedule::default(),
        )
        .unwrap()
    }

    #[test]
    fn instance_densities() {
        let inst = interleave_instance();
        assert_eq!(
            (inst.gamma(), inst.alpha(), inst.beta()),
            (&ratio(1, 2), &ratio(1, 3), &ratio(2, 3))
        );
    }

    #[test]
    fn degenerate_instances_are_rejected() {
        let eps = EpsilonSchedule::default();
        let err = RefutationInstance::new(
            InjectiveMap::identity(),
            IntSet::evens(),
            IntSet::evens(),
            eps.clone(),
        );
        assert!(matches!(err, Err(Error::NoRefutation { .. })));
        let err = RefutationInstance::new(
            InjectiveMap::identity(),
            IntSet::evens(),
            IntSet::odds(),
            eps.clone(),
        );
        assert!(matches!(err, Err(Error::NoRefutation { .. })));
        let err = RefutationInstance::new(
            InjectiveMap::dilate(2).unwrap(),
            IntSet::evens(),
            IntSet::odds(),
            eps.clone(),
        );
        assert_eq!(
            err.unwrap_err(),
            Error::NoRefutation {
                alpha: Box::new(ratio(1, 4)),
                beta: Box::new(ratio(1, 4))
            }
        );
        let err = RefutationInstance::new(
            InjectiveMap::interleave3(),
            IntSet::evens(),
            IntSet::odds(),
            eps.clone(),
        );
        assert!(matches!(err, Err(Error::RefutationOrder { .. })));
        let err = RefutationInstance::new(
            InjectiveMap::interleave3(),
            IntSet::evens(),
            IntSet::progression(0, 3).unwrap(),
            eps,
        );
        assert!(matches!(err, Err(Error::DensityMismatch(..))));
    }

    #[test]
    fn joint_thresholds_use_the_image_moduli() {
        let inst = interleave_instance();
        let m = inst.compute_joint_thresholds(6).unwrap();
        let expected: Vec<u64> = (1..=6).map(|k| 3 << (k + 1)).collect();
        assert_eq!(m.as_slice(), expected.as_slice());
        assert!(inst.compute_joint_thresholds(0).is_err());
    }

    #[test]
    fn paired_plan_values() {
        let inst = interleave_instance();
        let plan = inst
            .build_paired_plan(&inst.compute_joint_thresholds(6).unwrap())
            .unwrap();
        assert_eq!(&plan.l_values()[..5], &[12, 49, 529, 11_297, 482_049]);
        assert_eq!(&plan.n_values()[..5], &[12, 66, 706, 15_064, 642_732]);
        let short = inst.compute_joint_thresholds(2).unwrap();
        assert!(inst.build_paired_plan(&short).is_err());
    }

    #[test]
    fn paired_plan_is_minimal() {
        let inst = interleave_instance();
        let m = inst.compute_joint_thresholds(6).unwrap();
        let plan = inst.build_paired_plan(&m).unwrap();
        for k in 2..=6 {
            let mut lowered = plan.clone();
            lowered.l[k - 1] -= 1;
            assert!(lowered.validate(inst.map()).is_err(), "L_{k} − 1 accepted");
            let mut lowered = plan.clone();
            lowered.n[k - 1] -= 1;
            assert!(lowered.validate(inst.map()).is_err(), "N_{k} − 1 accepted");
        }
    }

    #[test]
    fn dilation_plans_take_the_successor() {
        // dilate(2) preimage bound is ⌊L/2⌋ < L + 1
        let f = InjectiveMap::dilate(2).unwrap();
        let a = IntSet::evens();
        let b = IntSet::odds();
        let m = joint_thresholds(&[&a, &b], ratio(1, 2), &EpsilonSchedule::default(), 5).unwrap();
        let inst = RefutationInstance {
            map: f.clone(),
            image_a: f.image_set(&a),
            image_b: f.image_set(&b),
            a,
            b,
            gamma: ratio(1, 2),
            alpha: ratio(1, 4),
            beta: ratio(1, 4),
            eps: EpsilonSchedule::default(),
        };
        let plan = inst.build_paired_plan(&m).unwrap();
        for k in 2..=5 {
            assert_eq!(plan.n(k), plan.l(k) + 1);
        }
    }

    #[test]
    fn interleave3_oscillates() {
        let inst = interleave_instance();
        let plan = inst
            .build_paired_plan(&inst.compute_joint_thresholds(6).unwrap())
            .unwrap();
        let c = inst.build_witness(&plan);
        assert_eq!(c.truncated_beyond(), Some(plan.n(6)));
        let report = inst
            .evaluate_oscillation(&plan, &c, &CheckpointSchedule::default(), 1_000_000)
            .unwrap();
        assert!(report.passed(), "{:?}", report.rows);
        assert_eq!((report.lower_passes(), report.upper_passes()), (2, 2));
        assert!(report.min_lower_ratio < 0.5 && 0.5 < report.max_upper_ratio);
        assert!(report.gap > report.target_gap);
        // sandwich cross-check by brute force over the preimage window
        for row in &report.rows {
            let bound = inst.map().preimage_bound(row.l_k);
            let direct = (1..=bound)
                .filter(|&x| c.contains(x) && inst.map().apply(x) <= row.l_k)
                .count() as u64;
            assert_eq!(direct, row.image_count);
        }
        assert!(inst
            .evaluate_oscillation(&plan, &c, &CheckpointSchedule::default(), 100)
            .is_err());
    }
}
