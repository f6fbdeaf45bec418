//! Subsets of ℕ = {1, 2, …}: counting functions and densities.
//!
//! An [`IntSet`] is a lazily evaluated set with a membership test and an
//! ordered enumerator. Sets whose density is known exactly carry a
//! [`DensityCert`], which always bundles the density with a convergence
//! [`Modulus`].

mod periodic;
mod report;
mod schedule;

use std::fmt;
use std::sync::Arc;

use num_integer::Roots;

use crate::error::{Error, Result};
use crate::rational::{ceil_u64, int};
use crate::Rational;

pub use periodic::UltimatelyPeriodicSet;
pub use report::{estimate_densities, Checkpoint, DensityReport};
pub use schedule::CheckpointSchedule;

/// Convergence modulus of the form `ε ↦ ⌈c/ε⌉`.
///
/// `constant` is a strict bound on `|A(n) − d(A)·n|` over all `n`, so the
/// threshold guarantees `|A(n)/n − d(A)| < ε` from there on. Moduli supplied
/// by the caller rather than derived are marked uncertified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modulus {
    constant: u64,
    certified: bool,
}

impl Modulus {
    pub fn certified(constant: u64) -> Self {
        Self {
            constant,
            certified: true,
        }
    }

    pub fn heuristic(constant: u64) -> Self {
        Self {
            constant,
            certified: false,
        }
    }

    pub fn constant(&self) -> u64 {
        self.constant
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Smallest `n₀ ≥ 1` this modulus vouches for at tolerance `eps`.
    pub fn threshold(&self, eps: &Rational) -> u64 {
        ceil_u64(&(int(self.constant) / eps)).max(1)
    }
}

/// An exact density together with the modulus that certifies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityCert {
    pub value: Rational,
    pub modulus: Modulus,
}

/// Backing representation of an [`IntSet`].
pub trait SetRepr: Send + Sync {
    fn contains(&self, n: u64) -> bool;

    /// `|A ∩ [1, n]|` without scanning, when a closed form exists.
    fn count_closed(&self, _n: u64) -> Option<u64> {
        None
    }

    /// A specialised ascending enumerator of `A ∩ [1, upto]`; `None` falls back
    /// to a membership scan. The bound matters: a lazily filtered set may be
    /// empty beyond some point, and an unbounded search would never return.
    fn elements(&self, _upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        None
    }

    fn as_periodic(&self) -> Option<&UltimatelyPeriodicSet> {
        None
    }

    /// Largest `n` for which membership is fully specified, if bounded.
    fn truncated_beyond(&self) -> Option<u64> {
        None
    }
}

#[derive(Clone)]
pub struct IntSet {
    repr: Arc<dyn SetRepr>,
    density: Option<DensityCert>,
    label: String,
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntSet")
            .field("label", &self.label)
            .field("density", &self.density)
            .finish()
    }
}

impl SetRepr for UltimatelyPeriodicSet {
    fn contains(&self, n: u64) -> bool {
        UltimatelyPeriodicSet::contains(self, n)
    }

    fn count_closed(&self, n: u64) -> Option<u64> {
        Some(self.count(n))
    }

    fn elements(&self, upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        let top = if self.is_finite() {
            upto.min(self.preperiod_len() as u64)
        } else {
            upto
        };
        Some(Box::new(
            (1..=top).filter(move |&n| UltimatelyPeriodicSet::contains(self, n)),
        ))
    }

    fn as_periodic(&self) -> Option<&UltimatelyPeriodicSet> {
        Some(self)
    }
}

struct Squares;

impl SetRepr for Squares {
    fn contains(&self, n: u64) -> bool {
        let r = n.sqrt();
        n > 0 && r * r == n
    }

    fn count_closed(&self, n: u64) -> Option<u64> {
        Some(n.sqrt())
    }

    fn elements(&self, upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        Some(Box::new((1..=upto.sqrt()).map(|k| k * k)))
    }
}

struct Predicate<F>(F);

impl<F: Fn(u64) -> bool + Send + Sync> SetRepr for Predicate<F> {
    fn contains(&self, n: u64) -> bool {
        n > 0 && (self.0)(n)
    }
}

struct Window {
    inner: IntSet,
    lo: u64,
    hi: Option<u64>,
}

impl SetRepr for Window {
    fn contains(&self, n: u64) -> bool {
        n >= self.lo && self.hi.is_none_or(|h| n <= h) && self.inner.contains(n)
    }

    fn count_closed(&self, n: u64) -> Option<u64> {
        let top = self.hi.map_or(n, |h| n.min(h));
        if top < self.lo {
            return Some(0);
        }
        Some(self.inner.count_closed(top)? - self.inner.count_closed(self.lo - 1)?)
    }

    fn elements(&self, upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        let hi = self.hi.map_or(upto, |h| h.min(upto));
        Some(Box::new(
            self.inner.iter_upto(hi).skip_while(move |&n| n < self.lo),
        ))
    }
}

#[derive(Clone, Copy)]
enum BoolOp {
    Union,
    Intersect,
    Difference,
}

struct Combined {
    op: BoolOp,
    left: IntSet,
    right: IntSet,
}

impl SetRepr for Combined {
    fn contains(&self, n: u64) -> bool {
        let (a, b) = (self.left.contains(n), self.right.contains(n));
        match self.op {
            BoolOp::Union => a || b,
            BoolOp::Intersect => a && b,
            BoolOp::Difference => a && !b,
        }
    }

    fn elements(&self, upto: u64) -> Option<Box<dyn Iterator<Item = u64> + '_>> {
        match self.op {
            BoolOp::Union => Some(Box::new(MergeUnion {
                left: self.left.iter_upto(upto).peekable(),
                right: self.right.iter_upto(upto).peekable(),
            })),
            BoolOp::Intersect | BoolOp::Difference => Some(Box::new(
                self.left
                    .iter_upto(upto)
                    .filter(move |&n| SetRepr::contains(self, n)),
            )),
        }
    }
}

struct MergeUnion<'a> {
    left: std::iter::Peekable<Box<dyn Iterator<Item = u64> + 'a>>,
    right: std::iter::Peekable<Box<dyn Iterator<Item = u64> + 'a>>,
}

impl Iterator for MergeUnion<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match (self.left.peek().copied(), self.right.peek().copied()) {
            (Some(a), Some(b)) if a == b => {
                self.left.next();
                self.right.next()
            }
            (Some(a), Some(b)) if a < b => self.left.next(),
            (Some(_), Some(_)) => self.right.next(),
            (Some(_), None) => self.left.next(),
            (None, _) => self.right.next(),
        }
    }
}

impl From<UltimatelyPeriodicSet> for IntSet {
    fn from(up: UltimatelyPeriodicSet) -> Self {
        let label = format!("{up:?}");
        IntSet::periodic(up, label)
    }
}

impl IntSet {
    /// Wraps an arbitrary representation. No density is attached.
    pub fn from_repr(repr: impl SetRepr + 'static, label: impl Into<String>) -> Self {
        Self {
            repr: Arc::new(repr),
            density: None,
            label: label.into(),
        }
    }

    pub fn periodic(up: UltimatelyPeriodicSet, label: impl Into<String>) -> Self {
        let density = Some(DensityCert {
            value: up.density(),
            modulus: Modulus::certified(up.modulus_constant()),
        });
        Self {
            repr: Arc::new(up),
            density,
            label: label.into(),
        }
    }

    pub fn all() -> Self {
        Self::periodic(UltimatelyPeriodicSet::all(), "all")
    }

    pub fn empty() -> Self {
        Self::periodic(UltimatelyPeriodicSet::empty(), "empty")
    }

    pub fn evens() -> Self {
        Self::periodic(
            UltimatelyPeriodicSet::residue_class(0, 2).expect("m = 2"),
            "evens",
        )
    }

    pub fn odds() -> Self {
        Self::periodic(
            UltimatelyPeriodicSet::residue_class(1, 2).expect("m = 2"),
            "odds",
        )
    }

    /// `{n ≥ 1 : n ≡ a (mod m)}`.
    pub fn progression(a: u64, m: u64) -> Result<Self> {
        Ok(Self::periodic(
            UltimatelyPeriodicSet::residue_class(a, m)?,
            format!("ap({a},{m})"),
        ))
    }

    /// The perfect squares. Generator-only: no modulus is attached.
    pub fn squares() -> Self {
        Self::from_repr(Squares, "squares")
    }

    /// A set given only by a membership predicate.
    pub fn from_predicate(
        label: impl Into<String>,
        member: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self::from_repr(Predicate(member), label)
    }

    /// Attaches a caller-supplied density and modulus constant. The modulus is
    /// flagged uncertified in every downstream report.
    pub fn with_heuristic_density(mut self, value: Rational, constant: u64) -> Self {
        self.density = Some(DensityCert {
            value,
            modulus: Modulus::heuristic(constant),
        });
        self
    }

    pub(crate) fn with_density(mut self, cert: Option<DensityCert>) -> Self {
        self.density = cert;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn contains(&self, n: u64) -> bool {
        self.repr.contains(n)
    }

    pub fn as_periodic(&self) -> Option<&UltimatelyPeriodicSet> {
        self.repr.as_periodic()
    }

    pub fn density(&self) -> Option<&DensityCert> {
        self.density.as_ref()
    }

    pub fn exact_density(&self) -> Option<&Rational> {
        self.density.as_ref().map(|d| &d.value)
    }

    pub fn modulus(&self) -> Option<&Modulus> {
        self.density.as_ref().map(|d| &d.modulus)
    }

    pub fn truncated_beyond(&self) -> Option<u64> {
        self.repr.truncated_beyond()
    }

    pub(crate) fn count_closed(&self, n: u64) -> Option<u64> {
        self.repr.count_closed(n)
    }

    /// Elements in increasing order. May not terminate past the last element
    /// of a finite set built by generic combinators; see [`IntSet::iter_upto`].
    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        self.iter_upto(u64::MAX)
    }

    /// Elements in `[1, n]`, in increasing order.
    pub fn iter_upto(&self, n: u64) -> Box<dyn Iterator<Item = u64> + '_> {
        self.repr
            .elements(n)
            .unwrap_or_else(|| Box::new((1..=n).filter(move |&x| self.repr.contains(x))))
    }

    /// The counting function `A(n) = |A ∩ [1, n]|`.
    pub fn count(&self, n: u64) -> u64 {
        self.count_closed(n)
            .unwrap_or_else(|| self.iter_upto(n).count() as u64)
    }

    /// `A(n)` at every point, in one streaming pass when no closed form exists.
    pub fn count_many(&self, points: &[u64]) -> Vec<u64> {
        if let Some(up) = self.as_periodic() {
            if points.windows(2).all(|w| w[0] <= w[1]) {
                return up.count_ascending(points);
            }
        }
        if let Some(first) = points.first() {
            if self.count_closed(*first).is_some() {
                return points.iter().map(|&n| self.count(n)).collect();
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by_key(|&i| points[i]);
        let mut out = vec![0; points.len()];
        let max = points.iter().copied().max().unwrap_or(0);
        let mut elements = self.iter_upto(max).peekable();
        let mut acc = 0u64;
        for i in order {
            while elements.next_if(|&x| x <= points[i]).is_some() {
                acc += 1;
            }
            out[i] = acc;
        }
        out
    }

    fn combine(&self, other: &IntSet, op: BoolOp) -> IntSet {
        let name = match op {
            BoolOp::Union => "union",
            BoolOp::Intersect => "inter",
            BoolOp::Difference => "diff",
        };
        let label = format!("{name}({},{})", self.label, other.label);
        if let (Some(a), Some(b)) = (self.as_periodic(), other.as_periodic()) {
            let up = match op {
                BoolOp::Union => a.union(b),
                BoolOp::Intersect => a.intersect(b),
                BoolOp::Difference => a.difference(b),
            };
            return IntSet::periodic(up, label);
        }
        IntSet::from_repr(
            Combined {
                op,
                left: self.clone(),
                right: other.clone(),
            },
            label,
        )
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        self.combine(other, BoolOp::Union)
    }

    pub fn intersect(&self, other: &IntSet) -> IntSet {
        self.combine(other, BoolOp::Intersect)
    }

    pub fn difference(&self, other: &IntSet) -> IntSet {
        self.combine(other, BoolOp::Difference)
    }

    /// `A ∩ [lo, hi]`, or `A ∩ [lo, ∞)` when `hi` is `None`.
    ///
    /// A finite window has density 0 with modulus constant `hi + 1`; an
    /// infinite one inherits the density of `A` with the constant grown by `lo − 1`.
    pub fn window(&self, lo: u64, hi: Option<u64>) -> Result<IntSet> {
        if lo < 1 {
            return Err(Error::InvalidArgument(
                "window lower end must be ≥ 1".into(),
            ));
        }
        if let Some(h) = hi {
            if lo > h {
                return Err(Error::EmptyRange { lo, hi: h });
            }
        }
        let label = match hi {
            Some(h) => format!("window({},{lo},{h})", self.label),
            None => format!("window({},{lo},inf)", self.label),
        };
        if let Some(up) = self.as_periodic() {
            let restricted = match hi {
                Some(h) => up.window(lo, h),
                None => {
                    let q = up.preperiod_len().max(lo as usize - 1);
                    let p = up.period_len();
                    UltimatelyPeriodicSet::from_membership(q, p, |n| n >= lo && up.contains(n))
                        .expect("p ≥ 1")
                        .normalized()
                }
            };
            return Ok(IntSet::periodic(restricted, label));
        }
        let density = match (hi, &self.density) {
            (Some(h), _) => Some(DensityCert {
                value: Rational::from_integer(0.into()),
                modulus: Modulus::certified(h + 1),
            }),
            (None, Some(cert)) => Some(DensityCert {
                value: cert.value.clone(),
                modulus: Modulus {
                    constant: cert.modulus.constant + lo - 1,
                    certified: cert.modulus.certified,
                },
            }),
            (None, None) => None,
        };
        Ok(IntSet::from_repr(
            Window {
                inner: self.clone(),
                lo,
                hi,
            },
            label,
        )
        .with_density(density))
    }
}
