//! Shared fixtures for the benchmarks.

use natdensity::intertwiner::{build_plan, compute_thresholds, intertwine, InterleavePlan};
use natdensity::{EpsilonSchedule, InjectiveMap, IntSet, RefutationInstance};

/// The evens/odds splice with the default tolerance schedule.
pub fn evens_odds_splice(depth: usize) -> (IntSet, InterleavePlan) {
    let eps = EpsilonSchedule::default();
    let (a, b) = (IntSet::evens(), IntSet::odds());
    let gamma = a.exact_density().cloned().expect("evens has density 1/2");
    let m = compute_thresholds(&a, &b, &gamma, &eps, depth).expect("equal densities");
    let plan = build_plan(&m, &eps).expect("valid plan");
    (intertwine(&a, &b, &plan), plan)
}

/// `interleave3` sends odds to density 1/3 and evens to density 2/3.
pub fn interleave3_instance() -> RefutationInstance {
    RefutationInstance::new(
        InjectiveMap::interleave3(),
        IntSet::odds(),
        IntSet::evens(),
        EpsilonSchedule::default(),
    )
    .expect("alpha < beta")
}
