//! Ultimately periodic subsets of ℕ: a finite preperiod word followed by a
//! repeating period word. These form a Boolean algebra on which density is
//! an exact rational.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{lcm, ratio};
use crate::Rational;

/// Characteristic word `preperiod · period^ω`, indexed from 1.
///
/// `n ≤ q` is a member iff `preperiod[n]`; larger `n` is a member iff
/// `period[((n - q - 1) mod p) + 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UltimatelyPeriodicSet {
    preperiod: Vec<bool>,
    period: Vec<bool>,
    // prefix_pre[i] = ones in preperiod[..i]
    prefix_pre: Vec<u64>,
    prefix_period: Vec<u64>,
}

fn prefix_counts(bits: &[bool]) -> Vec<u64> {
    let mut out = Vec::with_capacity(bits.len() + 1);
    let mut acc = 0;
    out.push(0);
    for &b in bits {
        acc += u64::from(b);
        out.push(acc);
    }
    out
}

fn parse_bits(word: &str) -> Result<Vec<bool>> {
    word.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidArgument(format!(
                "bit word may only contain 0 and 1, found `{other}`"
            ))),
        })
        .collect()
}

impl UltimatelyPeriodicSet {
    pub fn new(preperiod: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must have length ≥ 1".into()));
        }
        Ok(Self {
            prefix_pre: prefix_counts(&preperiod),
            prefix_period: prefix_counts(&period),
            preperiod,
            period,
        })
    }

    /// Builds a set from two `0`/`1` strings, e.g. `from_words("", "01")` for the evens.
    pub fn from_words(preperiod: &str, period: &str) -> Result<Self> {
        Self::new(parse_bits(preperiod)?, parse_bits(period)?)
    }

    /// Samples `member` on `[1, q + p]`. The caller guarantees the result is
    /// periodic with period `p` beyond `q`.
    pub fn from_membership(q: usize, p: usize, member: impl Fn(u64) -> bool) -> Result<Self> {
        let preperiod = (1..=q as u64).map(&member).collect();
        let period = (q as u64 + 1..=(q + p) as u64).map(&member).collect();
        Self::new(preperiod, period)
    }

    pub fn all() -> Self {
        Self::new(Vec::new(), vec![true]).expect("non-empty period")
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), vec![false]).expect("non-empty period")
    }

    /// `{n ≥ 1 : n ≡ residue (mod modulus)}`.
    pub fn residue_class(residue: u64, modulus: u64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidArgument(format!(
                "modulus must be ≥ 1, got {modulus}"
            )));
        }
        let r = residue % modulus;
        let period = (1..=modulus).map(|n| n % modulus == r).collect();
        Self::new(Vec::new(), period)
    }

    /// The finite set of `elements`, stored as a preperiod ending at the largest one.
    pub fn finite(elements: &[u64]) -> Result<Self> {
        let max = elements.iter().copied().max().unwrap_or(0);
        if elements.contains(&0) {
            return Err(Error::InvalidArgument("0 is not a positive integer".into()));
        }
        let mut pre = vec![false; max as usize];
        for &e in elements {
            pre[e as usize - 1] = true;
        }
        Self::new(pre, vec![false])
    }

    pub fn preperiod(&self) -> &[bool] {
        &self.preperiod
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn period_ones(&self) -> u64 {
        *self.prefix_period.last().expect("prefix has p + 1 entries")
    }

    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        let q = self.preperiod.len() as u64;
        if n <= q {
            self.preperiod[(n - 1) as usize]
        } else {
            let p = self.period.len() as u64;
            self.period[((n - q - 1) % p) as usize]
        }
    }

    /// `|A ∩ [1, n]|` in O(1).
    pub fn count(&self, n: u64) -> u64 {
        let q = self.preperiod.len() as u64;
        if n <= q {
            return self.prefix_pre[n as usize];
        }
        let p = self.period.len() as u64;
        let t = n - q;
        // 32-bit division is markedly cheaper and covers every realistic horizon.
        let (cycles, rest) = match (u32::try_from(t), u32::try_from(p)) {
            (Ok(t), Ok(p)) => ((t / p) as u64, (t % p) as u64),
            _ => (t / p, t % p),
        };
        self.prefix_pre[q as usize]
            + cycles * self.period_ones()
            + self.prefix_period[rest as usize]
    }

    /// `A(n)` at each of the ascending `points`. A point less than one period
    /// past its predecessor is reached by advancing the phase through the
    /// prefix sums, so dense sweeps do no division.
    pub fn count_ascending(&self, points: &[u64]) -> Vec<u64> {
        let q = self.preperiod.len() as u64;
        let p = self.period.len() as u64;
        let ones = self.period_ones();
        let mut out = Vec::with_capacity(points.len());
        // (last point, its count, its phase in the period) once past the preperiod.
        let mut state: Option<(u64, u64, u64)> = None;
        for &n in points {
            let next = match state {
                Some((prev, count, phase)) if n >= prev && n - prev < p => {
                    let stepped = phase + (n - prev);
                    if stepped >= p {
                        let wrapped = stepped - p;
                        let add = ones - self.prefix_period[phase as usize]
                            + self.prefix_period[wrapped as usize];
                        (count + add, wrapped)
                    } else {
                        (
                            count + self.prefix_period[stepped as usize]
                                - self.prefix_period[phase as usize],
                            stepped,
                        )
                    }
                }
                _ => (self.count(n), if n > q { (n - q) % p } else { 0 }),
            };
            out.push(next.0);
            state = (n > q).then_some((n, next.0, next.1));
        }
        out
    }

    /// Ones in the period over its length.
    pub fn density(&self) -> Rational {
        ratio(self.period_ones(), self.period.len() as u64)
    }

    /// `p + q`; strictly bounds `|A(n) − d(A)·n|` for every `n`.
    pub fn modulus_constant(&self) -> u64 {
        (self.preperiod.len() + self.period.len()) as u64
    }

    pub fn is_finite(&self) -> bool {
        self.period_ones() == 0
    }

    /// Shrinks the period to its primitive root and drops preperiod bits
    /// absorbed by rotating the period.
    pub fn normalized(&self) -> Self {
        let p = self.period.len();
        let d = (1..=p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (d..p).all(|i| self.period[i] == self.period[i % d]))
            .unwrap_or(p);
        let mut period: Vec<bool> = self.period[..d].to_vec();
        let mut pre = self.preperiod.clone();
        while let Some(&last) = pre.last() {
            if last != *period.last().expect("non-empty") {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Self::new(pre, period).expect("non-empty period")
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let q = self.preperiod.len().max(other.preperiod.len());
        let p = lcm(self.period.len() as u64, other.period.len() as u64) as usize;
        Self::from_membership(q, p, |n| op(self.contains(n), other.contains(n)))
            .expect("lcm of periods is ≥ 1")
            .normalized()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self::new(
            self.preperiod.iter().map(|b| !b).collect(),
            self.period.iter().map(|b| !b).collect(),
        )
        .expect("non-empty period")
    }

    /// `A ∩ [lo, hi]` as a finite set.
    pub fn window(&self, lo: u64, hi: u64) -> Self {
        let pre = (1..=hi).map(|n| n >= lo && self.contains(n)).collect();
        Self::new(pre, vec![false])
            .expect("non-empty period")
            .normalized()
    }
}

impl fmt::Debug for UltimatelyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |bits: &[bool]| {
            bits.iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>()
        };
        write!(
            f,
            "UP({}·({})^ω)",
            word(&self.preperiod),
            word(&self.period)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn evens() -> UltimatelyPeriodicSet {
        UltimatelyPeriodicSet::from_words("", "01").unwrap()
    }

    #[test]
    fn counts_evens_and_progressions() {
        assert_eq!(evens().count(10), 5);
        let ap = UltimatelyPeriodicSet::residue_class(1, 3).unwrap();
        assert_eq!(ap.count(10), 4);
        assert!(ap.contains(1) && ap.contains(4) && ap.contains(10) && !ap.contains(2));
        assert_eq!(UltimatelyPeriodicSet::residue_class(2, 2).unwrap(), evens());
    }

    #[test]
    fn exact_densities() {
        assert_eq!(evens().density(), ratio(1, 2));
        let finite = UltimatelyPeriodicSet::from_words("111", "0").unwrap();
        assert_eq!(finite.density(), ratio(0, 1));
        assert_eq!(finite.count(100), 3);
        assert!(finite.is_finite());
        let w = UltimatelyPeriodicSet::from_words("", "110100").unwrap();
        assert_eq!(w.density(), ratio(1, 2));
    }

    #[test]
    fn empty_period_rejected() {
        assert!(UltimatelyPeriodicSet::from_words("1", "").is_err());
        assert!(UltimatelyPeriodicSet::from_words("", "012").is_err());
        assert!(UltimatelyPeriodicSet::residue_class(0, 0).is_err());
    }

    #[test]
    fn boolean_examples() {
        let odds = evens().complement();
        assert_eq!(odds, UltimatelyPeriodicSet::from_words("", "10").unwrap());
        let all = evens().union(&odds);
        assert_eq!(all, UltimatelyPeriodicSet::all());
        assert_eq!(all.density(), ratio(1, 1));
        let threes = UltimatelyPeriodicSet::residue_class(0, 3).unwrap();
        let sixes = evens().intersect(&threes);
        assert_eq!(sixes, UltimatelyPeriodicSet::residue_class(0, 6).unwrap());
        assert_eq!(sixes.density(), ratio(1, 6));
        assert_eq!(all.difference(&evens()), odds);
    }

    #[test]
    fn normalization_rotates_preperiod_into_period() {
        let up = UltimatelyPeriodicSet::from_words("0101", "0101").unwrap();
        assert_eq!(up.normalized(), evens());
        let with_head = evens().union(&UltimatelyPeriodicSet::all().window(1, 100));
        assert_eq!(with_head.preperiod_len(), 99);
        assert_eq!(with_head.period_len(), 2);
        assert_eq!(with_head.density(), ratio(1, 2));
    }

    fn up_strategy() -> impl Strategy<Value = UltimatelyPeriodicSet> {
        (
            proptest::collection::vec(any::<bool>(), 0..=32),
            proptest::collection::vec(any::<bool>(), 1..=32),
        )
            .prop_map(|(pre, per)| UltimatelyPeriodicSet::new(pre, per).unwrap())
    }

    proptest! {
        #[test]
        fn ascending_sweep_matches_closed_form(
            pre in proptest::collection::vec(any::<bool>(), 0..12),
            period in proptest::collection::vec(any::<bool>(), 1..12),
            mut points in proptest::collection::vec(0u64..400, 0..80),
            dense_to in 0u64..200,
        ) {
            let up = UltimatelyPeriodicSet::new(pre, period).unwrap();
            points.sort_unstable();
            points.extend(400..400 + dense_to);
            let expected: Vec<u64> = points.iter().map(|&n| up.count(n)).collect();
            prop_assert_eq!(up.count_ascending(&points), expected);
        }
    }

    proptest! {
        #[test]
        fn closed_form_count_matches_scan(a in up_strategy()) {
            let mut acc = 0;
            for n in 1..=2_000u64 {
                acc += u64::from(a.contains(n));
                prop_assert_eq!(a.count(n), acc);
            }
        }

        #[test]
        fn modulus_constant_bounds_discrepancy(a in up_strategy()) {
            let d = a.density();
            let c = ratio(a.modulus_constant(), 1);
            for n in 1..=10_000u64 {
                let dev = ratio(a.count(n), 1) - &d * ratio(n, 1);
                let dev = if dev < ratio(0, 1) { -dev } else { dev };
                prop_assert!(dev < c, "n = {}", n);
            }
        }

        #[test]
        fn boolean_ops_are_pointwise(a in up_strategy(), b in up_strategy()) {
            let (u, i, d, c) = (a.union(&b), a.intersect(&b), a.difference(&b), a.complement());
            let l = lcm(a.period_len() as u64, b.period_len() as u64) as usize;
            prop_assert_eq!(l % u.period_len(), 0);
            prop_assert_eq!(l % i.period_len(), 0);
            for n in 1..=10_000u64 {
                let (x, y) = (a.contains(n), b.contains(n));
                prop_assert_eq!(u.contains(n), x || y);
                prop_assert_eq!(i.contains(n), x && y);
                prop_assert_eq!(d.contains(n), x && !y);
                prop_assert_eq!(c.contains(n), !x);
            }
        }

        #[test]
        fn disjoint_union_adds_density(a in up_strategy(), b in up_strategy()) {
            let b = b.difference(&a);
            prop_assert_eq!(a.union(&b).density(), a.density() + b.density());
        }

        #[test]
        fn normalization_preserves_membership(a in up_strategy()) {
            let n = a.normalized();
            prop_assert!(n.modulus_constant() <= a.modulus_constant());
            prop_assert_eq!(n.density(), a.density());
            for k in 1..=3_000u64 {
                prop_assert_eq!(n.contains(k), a.contains(k));
            }
        }
    }
}
