//! Finitely described injective maps `f: ℕ → ℕ`, their image sets and
//! preimage bounds.
//!
//! Every built-in family has a closed-form inverse and a closed-form
//! preimage bound `B(L) = max{n : f(n) ≤ L}`, so `f(C) ∩ [1, L]` is always
//! determined by `C ∩ [1, B(L)]`.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::{int, ratio};
use crate::set_algebra::{
    estimate_densities, CheckpointSchedule, DensityReport, IntSet, SetRepr, UltimatelyPeriodicSet,
};
use crate::Rational;

// Largest q + p materialised when transporting a periodic set.
const MAX_PERIODIC_IMAGE: usize = 1 << 22;

/// Consecutive blocks whose sizes cycle through `sizes`; each block is reversed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPermutation {
    sizes: Vec<u64>,
    // prefix[i] = sizes[..i].sum()
    prefix: Vec<u64>,
}

impl BlockPermutation {
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidArgument(
                "block sizes must be a non-empty list of positive integers".into(),
            ));
        }
        let mut prefix = vec![0];
        for s in &sizes {
            prefix.push(prefix.last().unwrap() + s);
        }
        Ok(Self { sizes, prefix })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    /// Length of one full cycle of block sizes.
    pub fn pattern_len(&self) -> u64 {
        *self.prefix.last().expect("non-empty")
    }

    pub fn max_block(&self) -> u64 {
        self.sizes.iter().copied().max().expect("non-empty")
    }

    /// `[start, end]` of the block holding `n ≥ 1`.
    pub fn block_of(&self, n: u64) -> (u64, u64) {
        let total = self.pattern_len();
        let offset = (n - 1) % total;
        let base = n - 1 - offset;
        let i = self.prefix.partition_point(|&p| p <= offset) - 1;
        (base + self.prefix[i] + 1, base + self.prefix[i + 1])
    }

    fn apply(&self, n: u64) -> u64 {
        let (start, end) = self.block_of(n);
        start + end - n
    }
}

/// A permutation of `[1, T]` given as its table, extended by the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePermutation {
    table: Vec<u64>,
    inverse: Vec<u64>,
}

impl FinitePermutation {
    pub fn new(table: Vec<u64>) -> Result<Self> {
        let t = table.len() as u64;
        if t == 0 {
            return Err(Error::InvalidArgument(
                "finite permutation table must be non-empty".into(),
            ));
        }
        let mut inverse = vec![0; table.len()];
        for (i, &v) in table.iter().enumerate() {
            if v < 1 || v > t || inverse[(v - 1) as usize] != 0 {
                return Err(Error::InvalidArgument(format!(
                    "{table:?} is not a permutation of 1..={t}"
                )));
            }
            inverse[(v - 1) as usize] = i as u64 + 1;
        }
        Ok(Self { table, inverse })
    }

    pub fn len(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapFamily {
    Identity,
    /// `n ↦ m·n`
    Dilate(u64),
    /// `2k − 1 ↦ 3k`, `2k ↦` the k-th positive non-multiple of 3.
    Interleave3,
    BlockPermutation(BlockPermutation),
    FinitePermutation(FinitePermutation),
    /// `outer ∘ inner`
    Composed(InjectiveMap, InjectiveMap),
}

#[derive(Clone, PartialEq, Eq)]
pub struct InjectiveMap {
    family: Arc<MapFamily>,
}

impl fmt::Debug for InjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InjectiveMap({self})")
    }
}

impl fmt::Display for InjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self.family() {
            MapFamily::Identity => write!(f, "id"),
            MapFamily::Dilate(m) => write!(f, "dilate({m})"),
            MapFamily::Interleave3 => write!(f, "interleave3"),
            MapFamily::BlockPermutation(b) => write!(f, "blockperm({})", list(&b.sizes)),
            MapFamily::FinitePermutation(p) => write!(f, "finperm({})", list(&p.table)),
            MapFamily::Composed(outer, inner) => write!(f, "compose({outer},{inner})"),
        }
    }
}

impl InjectiveMap {
    fn from_family(family: MapFamily) -> Self {
        Self {
            family: Arc::new(family),
        }
    }

    pub fn identity() -> Self {
        Self::from_family(MapFamily::Identity)
    }

    pub fn dilate(m: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("dilation factor must be ≥ 1".into()));
        }
        Ok(Self::from_family(MapFamily::Dilate(m)))
    }

    pub fn interleave3() -> Self {
        Self::from_family(MapFamily::Interleave3)
    }

    pub fn block_permutation(sizes: Vec<u64>) -> Result<Self> {
        Ok(Self::from_family(MapFamily::BlockPermutation(
            BlockPermutation::new(sizes)?,
        )))
    }

    pub fn finite_permutation(table: Vec<u64>) -> Result<Self> {
        Ok(Self::from_family(MapFamily::FinitePermutation(
            FinitePermutation::new(table)?,
        )))
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &InjectiveMap, inner: &InjectiveMap) -> Self {
        Self::from_family(MapFamily::Composed(outer.clone(), inner.clone()))
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn family_tag(&self) -> &'static str {
        match self.family() {
            MapFamily::Identity => "identity",
            MapFamily::Dilate(_) => "dilate",
            MapFamily::Interleave3 => "interleave3",
            MapFamily::BlockPermutation(_) => "block_permutation",
            MapFamily::FinitePermutation(_) => "finite_permutation",
            MapFamily::Composed(..) => "composed",
        }
    }

    /// `f(n)` for `n ≥ 1`.
    ///
    /// Panics if the result overflows `u64`.
    pub fn apply(&self, n: u64) -> u64 {
        debug_assert!(n >= 1);
        match self.family() {
            MapFamily::Identity => n,
            MapFamily::Dilate(m) => n.checked_mul(*m).expect("dilation overflows u64"),
            MapFamily::Interleave3 => {
                if n % 2 == 1 {
                    3 * n.div_ceil(2)
                } else {
                    let k = n / 2;
                    k + (k - 1) / 2
                }
            }
            MapFamily::BlockPermutation(b) => b.apply(n),
            MapFamily::FinitePermutation(p) => {
                if n <= p.len() {
                    p.table[(n - 1) as usize]
                } else {
                    n
                }
            }
            MapFamily::Composed(outer, inner) => outer.apply(inner.apply(n)),
        }
    }

    /// `f⁻¹(m)`, defined exactly on the image.
    pub fn inverse(&self, m: u64) -> Option<u64> {
        if m == 0 {
            return None;
        }
        match self.family() {
            MapFamily::Identity => Some(m),
            MapFamily::Dilate(d) => m.is_multiple_of(*d).then(|| m / d),
            MapFamily::Interleave3 => Some(if m.is_multiple_of(3) {
                2 * (m / 3) - 1
            } else {
                2 * (m - m / 3)
            }),
            MapFamily::BlockPermutation(b) => Some(b.apply(m)),
            MapFamily::FinitePermutation(p) => Some(if m <= p.len() {
                p.inverse[(m - 1) as usize]
            } else {
                m
            }),
            MapFamily::Composed(outer, inner) => outer.inverse(m).and_then(|x| inner.inverse(x)),
        }
    }

    /// An `N` with `f(n) ≤ L ⇒ n ≤ N`.
    ///
    /// Exact (`max{n : f(n) ≤ L}`, 0 if none) for every primitive family;
    /// composed maps chain `B_{f∘g}(L) = B_g(B_f(L))`, which is a certified
    /// upper bound but may exceed the maximum.
    pub fn preimage_bound(&self, limit: u64) -> u64 {
        if limit == 0 {
            return 0;
        }
        match self.family() {
            MapFamily::Identity => limit,
            MapFamily::Dilate(m) => limit / m,
            MapFamily::Interleave3 => {
                let thirds = limit / 3;
                let from_odds = if thirds >= 1 { 2 * thirds - 1 } else { 0 };
                let from_evens = 2 * (limit - thirds);
                from_odds.max(from_evens)
            }
            MapFamily::BlockPermutation(b) => b.block_of(limit).1,
            MapFamily::FinitePermutation(p) => {
                if limit >= p.len() {
                    limit
                } else {
                    p.table
                        .iter()
                        .rposition(|&v| v <= limit)
                        .map_or(0, |i| i as u64 + 1)
                }
            }
            MapFamily::Composed(outer, inner) => inner.preimage_bound(outer.preimage_bound(limit)),
        }
    }

    pub fn is_permutation(&self) -> bool {
        match self.family() {
            MapFamily::Identity
            | MapFamily::Interleave3
            | MapFamily::BlockPermutation(_)
            | MapFamily::FinitePermutation(_) => true,
            MapFamily::Dilate(m) => *m == 1,
            MapFamily::Composed(outer, inner) => outer.is_permutation() && inner.is_permutation(),
        }
    }

    /// A constant `c` with `|f(A)(n) − λ·(r/s)·n| ≤ c + s` whenever `A` is a
    /// union of `r` residue classes mod `s`. `None` for maps that do not
    /// scale densities uniformly.
    pub fn transfer_constant(&self) -> Option<u64> {
        match self.family() {
            MapFamily::Identity => Some(0),
            MapFamily::Dilate(_) => Some(1),
            MapFamily::Interleave3 => None,
            MapFamily::BlockPermutation(b) => Some(b.max_block()),
            MapFamily::FinitePermutation(p) => Some(p.len()),
            MapFamily::Composed(outer, inner) => {
                Some(outer.transfer_constant()? + inner.transfer_constant()?)
            }
        }
    }

    /// `λ = d(f(ℕ))` in closed form.
    pub fn image_density(&self) -> Option<Rational> {
        if self.is_permutation() {
            return Some(int(1));
        }
        match self.family() {
            MapFamily::Dilate(m) => Some(ratio(1, *m)),
            MapFamily::Composed(outer, inner) => {
                outer.transfer_constant()?;
                Some(outer.image_density()? * inner.image_density()?)
            }
            _ => None,
        }
    }

    /// For a periodic set with preperiod `q` and period `p`, a preperiod and
    /// period its image is guaranteed to respect.
    pub fn image_shape(&self, q: u64, p: u64) -> (u64, u64) {
        match self.family() {
            MapFamily::Identity => (q, p),
            MapFamily::Dilate(m) => (m * q, m * p),
            MapFamily::Interleave3 => (2 * q + 3, 3 * p),
            MapFamily::BlockPermutation(b) => {
                let total = b.pattern_len();
                (q.div_ceil(total) * total, crate::rational::lcm(p, total))
            }
            MapFamily::FinitePermutation(t) => (q.max(t.len()), p),
            MapFamily::Composed(outer, inner) => {
                let (q1, p1) = inner.image_shape(q, p);
                outer.image_shape(q1, p1)
            }
        }
    }

    /// `f(A)`. Periodic sets map to periodic sets with an exact density;
    /// anything else becomes a lazily evaluated image.
    pub fn image_set(&self, set: &IntSet) -> IntSet {
        let label = format!("{self}[{}]", set.label());
        if let Some(up) = set.as_periodic() {
            let (q, p) = self.image_shape(up.preperiod_len() as u64, up.period_len() as u64);
            if ((q + p) as usize) <= MAX_PERIODIC_IMAGE {
                let image = UltimatelyPeriodicSet::from_membership(q as usize, p as usize, |m| {
                    self.inverse(m).is_some_and(|a| up.contains(a))
                })
                .expect("period ≥ 1")
                .normalized();
                return IntSet::periodic(image, label);
            }
        }
        IntSet::from_repr(
            ImageRepr {
                map: self.clone(),
                source: set.clone(),
            },
            label,
        )
    }

    /// Checkpoint table for `f(ℕ)`, with the closed-form `λ` attached when known.
    pub fn lambda_estimate(
        &self,
        schedule: &CheckpointSchedule,
        horizon: u64,
    ) -> Result<DensityReport> {
        if horizon < 10 {
            return Err(Error::InvalidArgument(
                "lambda estimation needs horizon ≥ 10".into(),
            ));
        }
        let image = self.image_set(&IntSet::all());
        let mut report = estimate_densities(&image, schedule, horizon)?;
        if let Some(lambda) = self.image_density() {
            report.exact_density = Some(lambda);
        }
        Ok(report)
    }

    pub fn verify_injective_prefix(&self, n: u64) -> InjectivityCheck {
        verify_injective_prefix_with(|k| self.apply(k), n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjectivityCheck {
    Pass {
        checked: u64,
    },
    /// `f(first) = f(second) = value` with `first < second`.
    Collision {
        first: u64,
        second: u64,
        value: u64,
    },
}

impl InjectivityCheck {
    pub fn passed(&self) -> bool {
        matches!(self, InjectivityCheck::Pass { .. })
    }
}

/// Checks `f(1), …, f(n)` are pairwise distinct.
pub fn verify_injective_prefix_with(f: impl Fn(u64) -> u64, n: u64) -> InjectivityCheck {
    let mut seen: HashMap<u64, u64> = HashMap::with_capacity(n as usize);
    for k in 1..=n {
        let v = f(k);
        match seen.entry(v) {
            Entry::Occupied(e) => {
                return InjectivityCheck::Collision {
                    first: *e.get(),
                    second: k,
                    value: v,
                }
            }
            Entry::Vacant(e) => {
                e.insert(k);
            }
        }
    }
    InjectivityCheck::Pass { checked: n }
}

struct ImageRepr {
    map: InjectiveMap,
    source: IntSet,
}

impl SetRepr for ImageRepr {
    fn contains(&self, m: u64) -> bool {
        self.map.inverse(m).is_some_and(|a| self.source.contains(a))
    }

    fn elements(&self, upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        // Only sources in [1, B(upto)] can land in [1, upto].
        let source_top = self.map.preimage_bound(upto);
        Some(Box::new(
            ImageElements {
                map: &self.map,
                source: self.source.iter_upto(source_top).peekable(),
                pending: BinaryHeap::new(),
            }
            .take_while(move |&m| m <= upto),
        ))
    }
}

/// Merges `f` over an ascending enumerator. An image value `m` is released
/// once the source has moved past `B(m)`, since nothing later can map below it.
struct ImageElements<'a> {
    map: &'a InjectiveMap,
    source: std::iter::Peekable<Box<dyn Iterator<Item = u64> + 'a>>,
    pending: BinaryHeap<Reverse<u64>>,
}

impl Iterator for ImageElements<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(&Reverse(m)) = self.pending.peek() {
                let bound = self.map.preimage_bound(m);
                if self.source.peek().is_none_or(|&a| a > bound) {
                    self.pending.pop();
                    return Some(m);
                }
            }
            let a = self.source.next()?;
            self.pending.push(Reverse(self.map.apply(a)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_bound(f: &InjectiveMap, limit: u64, scan: u64) -> u64 {
        (1..=scan)
            .filter(|&n| f.apply(n) <= limit)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(InjectiveMap::identity().apply(7), 7);
        assert_eq!(InjectiveMap::dilate(2).unwrap().apply(5), 10);
        let f = InjectiveMap::interleave3();
        assert_eq!((f.apply(1), f.apply(2), f.apply(6)), (3, 1, 4));
        // oracle: k-th non-multiple of 3 by enumeration
        let non_multiples: Vec<u64> = (1..).filter(|n| n % 3 != 0).take(500).collect();
        for k in 1..=500u64 {
            assert_eq!(f.apply(2 * k), non_multiples[(k - 1) as usize]);
            assert_eq!(f.apply(2 * k - 1), 3 * k);
        }
    }

    #[test]
    fn preimage_bound_examples() {
        assert_eq!(InjectiveMap::dilate(2).unwrap().preimage_bound(10), 5);
        assert_eq!(InjectiveMap::identity().preimage_bound(7), 7);
        assert_eq!(InjectiveMap::interleave3().preimage_bound(10), 14);
        assert_eq!(InjectiveMap::interleave3().preimage_bound(0), 0);
        assert_eq!(InjectiveMap::dilate(5).unwrap().preimage_bound(4), 0);
    }

    #[test]
    fn preimage_bounds_are_exact_for_primitive_families() {
        let maps = [
            InjectiveMap::identity(),
            InjectiveMap::dilate(3).unwrap(),
            InjectiveMap::interleave3(),
            InjectiveMap::block_permutation(vec![3, 1, 5]).unwrap(),
            InjectiveMap::finite_permutation(vec![4, 1, 3, 2, 6, 5]).unwrap(),
        ];
        for f in &maps {
            for limit in 1..=300 {
                assert_eq!(
                    f.preimage_bound(limit),
                    brute_bound(f, limit, 2_000),
                    "{f} at {limit}"
                );
            }
        }
    }

    #[test]
    fn composed_bound_is_an_upper_bound() {
        let f = InjectiveMap::compose(
            &InjectiveMap::interleave3(),
            &InjectiveMap::dilate(2).unwrap(),
        );
        for limit in 1..=300 {
            assert!(f.preimage_bound(limit) >= brute_bound(&f, limit, 2_000));
        }
    }

    #[test]
    fn image_examples() {
        let four = InjectiveMap::dilate(2).unwrap().image_set(&IntSet::evens());
        assert_eq!(four.count(100), 25);
        assert_eq!(four.exact_density(), Some(&ratio(1, 4)));
        let thirds = InjectiveMap::interleave3().image_set(&IntSet::odds());
        assert_eq!(thirds.count(30), 10);
        assert_eq!(thirds.exact_density(), Some(&ratio(1, 3)));
        let rest = InjectiveMap::interleave3().image_set(&IntSet::evens());
        assert_eq!(rest.exact_density(), Some(&ratio(2, 3)));
        let same = InjectiveMap::identity().image_set(&IntSet::squares());
        for n in 1..=10_000 {
            assert_eq!(same.contains(n), IntSet::squares().contains(n));
        }
    }

    #[test]
    fn lazy_image_enumerates_in_order() {
        let f = InjectiveMap::interleave3();
        let img = f.image_set(&IntSet::squares());
        let listed: Vec<u64> = img.iter_upto(5_000).collect();
        let mut brute: Vec<u64> = (1..=10_000u64)
            .filter(|n| IntSet::squares().contains(*n))
            .map(|a| f.apply(a))
            .filter(|&m| m <= 5_000)
            .collect();
        brute.sort_unstable();
        assert_eq!(listed, brute);
    }

    #[test]
    fn lambda_closed_forms() {
        let s = CheckpointSchedule::default();
        let r = InjectiveMap::dilate(2)
            .unwrap()
            .lambda_estimate(&s, 10_000)
            .unwrap();
        assert_eq!(r.exact_density, Some(ratio(1, 2)));
        for c in &r.checkpoints {
            assert_eq!(c.count, c.n / 2);
        }
        let r = InjectiveMap::dilate(3)
            .unwrap()
            .lambda_estimate(&s, 100_000)
            .unwrap();
        assert!((r.last_ratio() - 1.0 / 3.0).abs() <= 1e-5);
        for f in [
            InjectiveMap::interleave3(),
            InjectiveMap::block_permutation(vec![16]).unwrap(),
        ] {
            let r = f.lambda_estimate(&s, 10_000).unwrap();
            assert_eq!(r.exact_density, Some(int(1)));
            assert!(r.checkpoints.iter().all(|c| c.count == c.n));
        }
        assert!(InjectiveMap::identity().lambda_estimate(&s, 9).is_err());
    }

    #[test]
    fn composition_examples() {
        let f = InjectiveMap::interleave3();
        let id = InjectiveMap::identity();
        let six = InjectiveMap::compose(
            &InjectiveMap::dilate(2).unwrap(),
            &InjectiveMap::dilate(3).unwrap(),
        );
        for n in 1..=10_000 {
            assert_eq!(InjectiveMap::compose(&id, &f).apply(n), f.apply(n));
            assert_eq!(six.apply(n), 6 * n);
        }
        assert_eq!(six.image_density(), Some(ratio(1, 6)));
        assert_eq!(six.family_tag(), "composed");
        // inverse table of interleave3 built by scanning
        let table: Vec<u64> = (1..=1_000u64)
            .map(|m| (1..=2_000).find(|&n| f.apply(n) == m).unwrap())
            .collect();
        for n in 1..=1_000u64 {
            assert_eq!(f.apply(table[(n - 1) as usize]), n);
        }
        // interleave3 does not scale densities, so neither does a composition with it outside
        let g = InjectiveMap::compose(&f, &InjectiveMap::dilate(2).unwrap());
        assert_eq!(g.image_density(), None);
    }

    #[test]
    fn injectivity_checks() {
        assert!(InjectiveMap::dilate(2)
            .unwrap()
            .verify_injective_prefix(10_000)
            .passed());
        assert!(InjectiveMap::interleave3()
            .verify_injective_prefix(100_000)
            .passed());
        assert_eq!(
            verify_injective_prefix_with(|n| n.min(5), 100),
            InjectivityCheck::Collision {
                first: 5,
                second: 6,
                value: 5
            }
        );
    }

    #[test]
    fn invalid_descriptions_rejected() {
        assert!(InjectiveMap::dilate(0).is_err());
        assert!(InjectiveMap::block_permutation(vec![]).is_err());
        assert!(InjectiveMap::block_permutation(vec![2, 0]).is_err());
        assert!(InjectiveMap::finite_permutation(vec![1, 1]).is_err());
        assert!(InjectiveMap::finite_permutation(vec![3, 1]).is_err());
    }

    #[test]
    fn display_round_trips_through_the_grammar() {
        let f = InjectiveMap::compose(
            &InjectiveMap::block_permutation(vec![4, 2]).unwrap(),
            &InjectiveMap::finite_permutation(vec![2, 1]).unwrap(),
        );
        assert_eq!(f.to_string(), "compose(blockperm(4,2),finperm(2,1))");
        assert_eq!(crate::expr::parse_map_expr(&f.to_string()).unwrap(), f);
    }

    fn map_strategy() -> impl Strategy<Value = InjectiveMap> {
        let leaf = prop_oneof![
            Just(InjectiveMap::identity()),
            (1u64..=6).prop_map(|m| InjectiveMap::dilate(m).unwrap()),
            Just(InjectiveMap::interleave3()),
            proptest::collection::vec(1u64..=8, 1..=3)
                .prop_map(|s| InjectiveMap::block_permutation(s).unwrap()),
            Just(Vec::from_iter(1u64..=7))
                .prop_shuffle()
                .prop_map(|t| InjectiveMap::finite_permutation(t).unwrap()),
        ];
        leaf.prop_recursive(2, 4, 2, |inner| {
            (inner.clone(), inner).prop_map(|(a, b)| InjectiveMap::compose(&a, &b))
        })
    }

    fn set_strategy() -> impl Strategy<Value = IntSet> {
        (
            proptest::collection::vec(any::<bool>(), 0..=8),
            proptest::collection::vec(any::<bool>(), 1..=8),
        )
            .prop_map(|(a, b)| IntSet::from(UltimatelyPeriodicSet::new(a, b).unwrap()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_undoes_forward(f in map_strategy()) {
            prop_assert!(f.verify_injective_prefix(2_000).passed());
            for n in 1..=2_000u64 {
                prop_assert_eq!(f.inverse(f.apply(n)), Some(n));
            }
        }

        #[test]
        fn periodic_images_match_forward_mapping(f in map_strategy(), a in set_strategy()) {
            let image = f.image_set(&a);
            let lazy = IntSet::from_repr(ImageRepr { map: f.clone(), source: a.clone() }, "lazy");
            let limit = 3_000u64;
            let bound = f.preimage_bound(limit);
            let mut brute = vec![false; limit as usize + 1];
            for x in (1..=bound).filter(|&x| a.contains(x)) {
                let m = f.apply(x);
                if m <= limit {
                    brute[m as usize] = true;
                }
            }
            for m in 1..=limit {
                prop_assert_eq!(image.contains(m), brute[m as usize], "m = {}", m);
            }
            let listed: Vec<u64> = lazy.iter_upto(limit).collect();
            let expected: Vec<u64> = (1..=limit).filter(|&m| brute[m as usize]).collect();
            prop_assert_eq!(listed, expected);
        }

        #[test]
        fn image_counting_identity(f in map_strategy(), a in set_strategy()) {
            let image = f.image_set(&a);
            for limit in (1..=10_000u64).step_by(97) {
                let bound = f.preimage_bound(limit);
                let direct = (1..=bound).filter(|&x| a.contains(x) && f.apply(x) <= limit).count() as u64;
                prop_assert_eq!(image.count(limit), direct);
            }
        }
    }
}
