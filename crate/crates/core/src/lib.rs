//! Asymptotic density of sets of positive integers.
//!
//! The crate computes counting functions and densities exactly for
//! ultimately periodic sets and estimates them at checkpoints for everything
//! else. On top of that it builds the two splicing constructions used to
//! study injective maps `f: ℕ → ℕ` that send sets with density to sets with
//! density:
//!
//! * [`intertwiner`] splices two sets of equal density `γ` along a threshold
//!   sequence so that the result still has density `γ`, and checks the
//!   explicit rate `|C(n)/n − γ| < 5ε_{k−1}`.
//! * [`refuter`] uses the same splice, with thresholds chosen through the
//!   map's preimage bound, to make `f(C)` oscillate whenever `f` sends two
//!   sets of equal density to images of different density.
//! * [`transfer`] probes `d(f(A)) = λ·d(A)` on unions of residue classes.

pub mod error;
pub mod expr;
pub mod intertwiner;
pub mod maps;
pub mod output;
pub mod rational;
pub mod refuter;
pub mod set_algebra;
pub mod transfer;

/// Exact density values.
pub type Rational = num_rational::BigRational;

pub use error::{Error, Result};
pub use intertwiner::{EpsilonSchedule, InterleavePlan, ThresholdSequence};
pub use maps::{InjectiveMap, MapFamily};
pub use refuter::{PairedPlan, RefutationInstance};
pub use set_algebra::{
    estimate_densities, CheckpointSchedule, DensityCert, DensityReport, IntSet, Modulus,
    UltimatelyPeriodicSet,
};
pub use transfer::{FHatTable, ResidueDecomposition, Verdict};
