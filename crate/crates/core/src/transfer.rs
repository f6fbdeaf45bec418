//! Density transfer on unions of residue classes.
//!
//! For an injective `f` with `λ = d(f(ℕ)) > 0`, write `d(f(A)) = λ·f̂(d(A))`.
//! Taking `A` to be the first `r` residue classes mod `s` gives `d(A) = r/s`,
//! and the classes partition ℕ, so their images partition `f(ℕ)`. Maps that
//! scale all densities uniformly have `f̂(r/s) = r/s`; this module measures
//! `f̂` on those sets and reports whether it is the identity.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::InjectiveMap;
use crate::rational::{ratio, to_f64};
use crate::set_algebra::{estimate_densities, CheckpointSchedule, IntSet, UltimatelyPeriodicSet};
use crate::Rational;

/// `A_i = {n : n ≡ i (mod s)}` for `i = 1..=s`.
#[derive(Clone, Debug)]
pub struct ResidueDecomposition {
    modulus: u64,
    classes: Vec<IntSet>,
}

impl ResidueDecomposition {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidArgument(format!(
                "residue modulus must be ≥ 1, got {modulus}"
            )));
        }
        let classes = (1..=modulus)
            .map(|i| {
                let up = UltimatelyPeriodicSet::residue_class(i, modulus).expect("modulus ≥ 1");
                IntSet::periodic(up, format!("ap({i},{modulus})"))
            })
            .collect();
        Ok(Self { modulus, classes })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `A_i`, indexed from 1.
    pub fn class(&self, i: u64) -> &IntSet {
        &self.classes[(i - 1) as usize]
    }

    pub fn classes(&self) -> &[IntSet] {
        &self.classes
    }

    /// `A_1 ∪ … ∪ A_r`; empty when `r = 0`.
    pub fn first(&self, r: u64) -> Result<IntSet> {
        if r > self.modulus {
            return Err(Error::InvalidArgument(format!(
                "need r ≤ s, got r = {r}, s = {}",
                self.modulus
            )));
        }
        let up = self.classes[..r as usize]
            .iter()
            .filter_map(|c| c.as_periodic())
            .fold(UltimatelyPeriodicSet::empty(), |acc, c| acc.union(c));
        Ok(IntSet::periodic(up, format!("first({r},{})", self.modulus)))
    }
}

pub fn residue_classes(s: u64) -> Result<ResidueDecomposition> {
    ResidueDecomposition::new(s)
}

/// `λ` from the family's closed form, or from the periodic image of ℕ.
fn certified_lambda(f: &InjectiveMap) -> Option<Rational> {
    f.image_density().or_else(|| {
        let image = f.image_set(&IntSet::all());
        image.modulus().filter(|m| m.is_certified())?;
        image.exact_density().cloned()
    })
}

/// How far `f(A)(n)/n` may sit from its limit at `n = horizon`.
struct Tolerance {
    value: f64,
    certified: bool,
}

fn tolerance(f: &InjectiveMap, image: &IntSet, s: u64, horizon: u64) -> Result<Tolerance> {
    if let Some(c) = f.transfer_constant() {
        return Ok(Tolerance {
            value: (c + s) as f64 / horizon as f64,
            certified: true,
        });
    }
    if let Some(m) = image.modulus().filter(|m| m.is_certified()) {
        return Ok(Tolerance {
            value: m.constant() as f64 / horizon as f64,
            certified: true,
        });
    }
    let report = estimate_densities(image, &CheckpointSchedule::default(), horizon)?;
    Ok(Tolerance {
        value: 10.0 * report.tail_spread(),
        certified: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferCheck {
    pub s: u64,
    pub r: u64,
    pub lambda: f64,
    /// `λ·r/s`
    pub expected: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub certified: bool,
    pub additivity: bool,
    pub pass: bool,
}

/// Estimates `d(f(A))` for `A` the first `r` classes mod `s` and compares it
/// with `λ·r/s`; also checks `Σ_i f(A_i)(n) = f(ℕ)(n)` at every checkpoint.
///
/// When `λ = 0` the estimate is only required to vanish within tolerance.
pub fn transfer_check(f: &InjectiveMap, s: u64, r: u64, horizon: u64) -> Result<TransferCheck> {
    if r < 1 || r > s {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ r ≤ s, got r = {r}, s = {s}"
        )));
    }
    let lambda = certified_lambda(f).ok_or_else(|| Error::MissingDensity(format!("{f}[all]")))?;
    let classes = residue_classes(s)?;
    let image = f.image_set(&classes.first(r)?);
    let estimate = image.count(horizon) as f64 / horizon as f64;
    let tol = tolerance(f, &image, s, horizon)?;
    let expected = &lambda * ratio(r, s);

    let points = CheckpointSchedule::default().points(horizon);
    let total = f.image_set(&IntSet::all()).count_many(&points);
    let mut parts = vec![0u64; points.len()];
    for class in classes.classes() {
        for (acc, c) in parts.iter_mut().zip(f.image_set(class).count_many(&points)) {
            *acc += c;
        }
    }
    let additivity = parts == total;
    let within = if lambda.is_zero() {
        estimate <= tol.value
    } else {
        (estimate - to_f64(&expected)).abs() <= tol.value
    };
    Ok(TransferCheck {
        s,
        r,
        lambda: to_f64(&lambda),
        expected: to_f64(&expected),
        estimate,
        tolerance: tol.value,
        certified: tol.certified,
        additivity,
        pass: within && additivity,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "IDENTITY")]
    Identity,
    #[serde(rename = "NON-IDENTITY")]
    NonIdentity,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
    /// `λ = 0`: `f̂` is not defined.
    #[serde(rename = "UNDEFINED")]
    Undefined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Identity => "IDENTITY",
            Verdict::NonIdentity => "NON-IDENTITY",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::Undefined => "UNDEFINED",
        })
    }
}

/// One sample of `f̂`, columns in output order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FHatRow {
    pub alpha_num: u64,
    pub alpha_den: u64,
    pub fhat_estimate: f64,
    pub error_bound: f64,
    pub certified: bool,
    pub verdict: Verdict,
}

impl FHatRow {
    pub fn alpha(&self) -> f64 {
        self.alpha_num as f64 / self.alpha_den as f64
    }
}

fn verdict(estimate: f64, alpha: f64, bound: f64, certified: bool) -> Verdict {
    match ((estimate - alpha).abs() <= bound, certified) {
        (true, true) => Verdict::Identity,
        (true, false) => Verdict::Inconclusive,
        (false, _) => Verdict::NonIdentity,
    }
}

/// `f̂(r/s) ≈ (f(A)(h)/h)/λ` for `A` the first `r` classes mod `s`, `0 ≤ r ≤ s`.
pub fn fhat_estimate(f: &InjectiveMap, r: u64, s: u64, horizon: u64) -> Result<FHatRow> {
    if s < 1 || r > s {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ r ≤ s and s ≥ 1, got r = {r}, s = {s}"
        )));
    }
    let lambda = certified_lambda(f);
    let Some(lambda) = lambda.filter(|l| !l.is_zero()) else {
        return Ok(FHatRow {
            alpha_num: r,
            alpha_den: s,
            fhat_estimate: f64::NAN,
            error_bound: f64::NAN,
            certified: false,
            verdict: Verdict::Undefined,
        });
    };
    let image = f.image_set(&residue_classes(s)?.first(r)?);
    let lam = to_f64(&lambda);
    let estimate = image.count(horizon) as f64 / horizon as f64 / lam;
    let tol = tolerance(f, &image, s, horizon)?;
    let bound = tol.value / lam;
    Ok(FHatRow {
        alpha_num: r,
        alpha_den: s,
        fhat_estimate: estimate,
        error_bound: bound,
        certified: tol.certified,
        verdict: verdict(estimate, r as f64 / s as f64, bound, tol.certified),
    })
}

/// Samples of `f̂` at every reduced `r/s` with `s ≤ max_s`, in increasing `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct FHatTable {
    pub map: String,
    pub horizon: u64,
    pub rows: Vec<FHatRow>,
}

impl FHatTable {
    pub fn build(f: &InjectiveMap, max_s: u64, horizon: u64) -> Result<Self> {
        if max_s < 1 {
            return Err(Error::InvalidArgument("max denominator must be ≥ 1".into()));
        }
        let mut alphas: Vec<(u64, u64)> = (1..=max_s)
            .flat_map(|s| (0..=s).map(move |r| (r, s)))
            .filter(|&(r, s)| num_integer::gcd(r, s) == 1)
            .collect();
        alphas.sort_by_key(|x| ratio(x.0, x.1));
        let rows = alphas
            .into_iter()
            .map(|(r, s)| fhat_estimate(f, r, s, horizon))
            .collect::<Result<_>>()?;
        Ok(Self {
            map: f.to_string(),
            horizon,
            rows,
        })
    }

    /// Consecutive estimates never drop by more than twice the larger error bound.
    pub fn is_monotone_within_error(&self) -> bool {
        self.rows
            .windows(2)
            .filter(|w| w.iter().all(|r| r.verdict != Verdict::Undefined))
            .all(|w| {
                w[1].fhat_estimate
                    >= w[0].fhat_estimate - 2.0 * w[0].error_bound.max(w[1].error_bound)
            })
    }

    pub fn all_identity(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Identity)
    }
}

/// The residue-union set behind a table row, for callers that want to inspect it.
pub fn residue_union(r: u64, s: u64) -> Result<IntSet> {
    residue_classes(s)?.first(r)
}

/// `λ·r/s` as an exact rational, when `λ` is certified.
pub fn predicted_image_density(f: &InjectiveMap, r: u64, s: u64) -> Option<Rational> {
    Some(certified_lambda(f)? * ratio(r, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_class_examples() {
        let two = residue_classes(2).unwrap();
        assert_eq!(two.class(2).as_periodic(), IntSet::evens().as_periodic());
        assert_eq!(two.class(1).as_periodic(), IntSet::odds().as_periodic());
        assert!(two
            .classes()
            .iter()
            .all(|c| c.exact_density() == Some(&ratio(1, 2))));
        let one = residue_classes(1).unwrap();
        assert_eq!(one.class(1).exact_density(), Some(&ratio(1, 1)));
        let five = residue_classes(5).unwrap();
        for n in 1..=10_000 {
            assert_eq!(five.classes().iter().map(|c| c.count(n)).sum::<u64>(), n);
        }
        assert!(residue_classes(0).is_err());
    }

    #[test]
    fn dilation_transfers_by_lambda() {
        let f = InjectiveMap::dilate(2).unwrap();
        let check = transfer_check(&f, 2, 1, 100_000).unwrap();
        assert!(check.pass && check.additivity && check.certified);
        assert_eq!(check.expected, 0.25);
        // A = first class mod 2 = odds; f(odds) = 2 mod 4, count ⌊(n+2)/4⌋
        let image = f.image_set(&residue_union(1, 2).unwrap());
        for n in 1..=10_000 {
            assert_eq!(image.count(n), (n + 2) / 4);
        }
        let evens = f.image_set(&IntSet::evens());
        for n in 1..=10_000 {
            assert_eq!(evens.count(n), n / 4);
        }
    }

    #[test]
    fn identity_transfers_exactly() {
        for (r, s) in [(1, 1), (3, 4), (2, 7)] {
            let check = transfer_check(&InjectiveMap::identity(), s, r, 10_000).unwrap();
            assert!(check.pass, "{check:?}");
        }
        assert!(transfer_check(&InjectiveMap::identity(), 3, 0, 100).is_err());
        assert!(transfer_check(&InjectiveMap::identity(), 3, 4, 100).is_err());
    }

    #[test]
    fn block_permutation_within_bound() {
        let f = InjectiveMap::block_permutation(vec![16]).unwrap();
        let check = transfer_check(&f, 4, 3, 1_000_000).unwrap();
        assert!(check.pass);
        assert!((check.estimate - 0.75).abs() <= 64.0 / 1e6);
    }

    #[test]
    fn fhat_endpoints() {
        for f in [
            InjectiveMap::interleave3(),
            InjectiveMap::dilate(3).unwrap(),
        ] {
            let zero = fhat_estimate(&f, 0, 1, 10_000).unwrap();
            assert_eq!(zero.fhat_estimate, 0.0);
            let one = fhat_estimate(&f, 1, 1, 9_999).unwrap();
            assert!((one.fhat_estimate - 1.0).abs() <= one.error_bound);
        }
    }

    #[test]
    fn interleave3_is_not_the_identity() {
        let row = fhat_estimate(&InjectiveMap::interleave3(), 1, 2, 1_000_000).unwrap();
        assert!((row.fhat_estimate - 1.0 / 3.0).abs() < 1e-5);
        assert_eq!(row.verdict, Verdict::NonIdentity);
        assert!(row.certified);
        let check = transfer_check(&InjectiveMap::interleave3(), 2, 1, 100_000).unwrap();
        assert!(!check.pass && check.additivity);
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(verdict(0.5, 0.5, 0.0, true), Verdict::Identity);
        assert_eq!(verdict(0.5, 0.5, 0.1, false), Verdict::Inconclusive);
        assert_eq!(verdict(0.3, 0.5, 0.1, false), Verdict::NonIdentity);
    }

    #[test]
    fn tables_are_monotone() {
        let t = FHatTable::build(
            &InjectiveMap::finite_permutation(vec![3, 1, 2]).unwrap(),
            6,
            100_000,
        )
        .unwrap();
        assert!(t.is_monotone_within_error());
        assert!(t.all_identity());
        assert_eq!(t.rows.first().unwrap().alpha(), 0.0);
        assert_eq!(t.rows.last().unwrap().alpha(), 1.0);
        let t = FHatTable::build(&InjectiveMap::interleave3(), 4, 100_000).unwrap();
        assert!(!t.all_identity());
    }

    #[test]
    fn composed_maps_get_lambda_from_the_periodic_image() {
        let f = InjectiveMap::compose(
            &InjectiveMap::interleave3(),
            &InjectiveMap::dilate(2).unwrap(),
        );
        assert_eq!(predicted_image_density(&f, 1, 1), Some(ratio(2, 3)));
    }
}
