//! Exact interval-union arithmetic, the middle-third removal sets `A_n`, and
//! covariograms of interval pairs.

use std::fmt;

use num::traits::{Signed, Zero};
use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default depth cap for Cantor generation (`2^23` parts at depth 24).
pub const DEFAULT_CANTOR_DEPTH_CAP: u32 = 24;

/// Open interval `(lo, hi)` with exact rational endpoints, `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    #[serde(with = "rational::serde_str")]
    lo: Rational,
    #[serde(with = "rational::serde_str")]
    hi: Rational,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.hi)
    }
}

impl From<Interval> for RawInterval {
    fn from(i: Interval) -> Self {
        RawInterval { lo: i.lo, hi: i.hi }
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInterval {
                lo: rational::format(&lo),
                hi: rational::format(&hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Convenience constructor from `n/d` pairs.
    pub fn from_ratios(lo: (i64, i64), hi: (i64, i64)) -> Result<Self> {
        Self::new(rational::ratio(lo.0, lo.1), rational::ratio(hi.0, hi.1))
    }

    pub fn from_ints(lo: i64, hi: i64) -> Result<Self> {
        Self::new(rational::int(lo), rational::int(hi))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn len(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn lo_f64(&self) -> f64 {
        rational::to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational::to_f64(&self.hi)
    }

    /// Open membership.
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Membership in the closure `[lo, hi]`.
    pub fn closure_contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = rational::max(&self.lo, &other.lo);
        let hi = rational::min(&self.hi, &other.hi);
        Interval::new(lo, hi).ok()
    }

    /// Image under `x -> scale * x + shift` (orientation restored for
    /// negative scales). `None` when `scale == 0`.
    pub fn affine_image(&self, scale: &Rational, shift: &Rational) -> Option<Interval> {
        if scale.is_zero() {
            return None;
        }
        let a = scale * &self.lo + shift;
        let b = scale * &self.hi + shift;
        if a < b {
            Interval::new(a, b).ok()
        } else {
            Interval::new(b, a).ok()
        }
    }

    /// Exact `inf |x - y|` over the two intervals.
    pub fn distance(&self, other: &Interval) -> Rational {
        if self.hi <= other.lo {
            &other.lo - &self.hi
        } else if other.hi <= self.lo {
            &self.lo - &other.hi
        } else {
            Rational::zero()
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            rational::format(&self.lo),
            rational::format(&self.hi)
        )
    }
}

/// Finite union of disjoint, non-touching open intervals sorted by `lo`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalUnion {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        Ok(make_union(v))
    }
}

impl From<IntervalUnion> for Vec<Interval> {
    fn from(u: IntervalUnion) -> Self {
        u.parts
    }
}

/// Normalizes a list of intervals: sorts and merges overlapping or touching
/// parts. Empty intervals cannot be represented, so the only rejection
/// happens at `Interval::new`.
pub fn make_union(mut intervals: Vec<Interval>) -> IntervalUnion {
    intervals.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut parts: Vec<Interval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match parts.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => parts.push(iv),
        }
    }
    IntervalUnion { parts }
}

/// Like [`make_union`], but from raw endpoint pairs, rejecting `lo >= hi`.
pub fn make_union_from_pairs(pairs: Vec<(Rational, Rational)>) -> Result<IntervalUnion> {
    let ivs = pairs
        .into_iter()
        .map(|(lo, hi)| Interval::new(lo, hi))
        .collect::<Result<Vec<_>>>()?;
    Ok(make_union(ivs))
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.parts
            .iter()
            .fold(Rational::zero(), |acc, p| acc + p.len())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.find_part(x).is_some()
    }

    /// Index of the part containing `x` (open membership).
    pub fn find_part(&self, x: &Rational) -> Option<usize> {
        let idx = self.parts.partition_point(|p| &p.lo < x);
        if idx == 0 {
            return None;
        }
        self.parts[idx - 1].contains(x).then_some(idx - 1)
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        make_union(self.parts.iter().chain(other.parts.iter()).cloned().collect())
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        // intersections of normalized unions may touch at shared endpoints
        make_union(out)
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalUnion {
        self.intersect(&IntervalUnion {
            parts: vec![iv.clone()],
        })
    }

    /// Maps every part through `x -> scale * x + shift`.
    pub fn affine_map(&self, scale: &Rational, shift: &Rational) -> IntervalUnion {
        make_union(
            self.parts
                .iter()
                .filter_map(|p| p.affine_image(scale, shift))
                .collect(),
        )
    }

    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Interval::new(first.lo.clone(), last.hi.clone()).ok()
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Exact `inf |x - y|` over `x ∈ u`, `y ∈ v`; zero on overlap or contact.
pub fn union_distance(u: &IntervalUnion, v: &IntervalUnion) -> Result<Rational> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::Precondition(
            "union_distance needs nonempty unions".into(),
        ));
    }
    // Merge by lo; only neighbours from different sets can realize the minimum.
    let mut best: Option<Rational> = None;
    let mut last_u: Option<&Interval> = None;
    let mut last_v: Option<&Interval> = None;
    let (mut i, mut j) = (0, 0);
    while i < u.parts.len() || j < v.parts.len() {
        let take_u = j >= v.parts.len() || (i < u.parts.len() && u.parts[i].lo <= v.parts[j].lo);
        let (cur, other_last) = if take_u {
            let c = &u.parts[i];
            i += 1;
            last_u = Some(c);
            (c, last_v)
        } else {
            let c = &v.parts[j];
            j += 1;
            last_v = Some(c);
            (c, last_u)
        };
        if let Some(o) = other_last {
            let d = o.distance(cur);
            if d.is_zero() {
                return Ok(d);
            }
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
    }
    // each set has a predecessor from the other at least once unless all of
    // one set precedes the other, in which case the first cross step covers it
    Ok(best.expect("two nonempty unions always produce a cross pair"))
}

/// Left-endpoint numerators of the parts of `A_n` over the common
/// denominator `3^n`, in increasing order. Part `k` is
/// `(a_k / 3^n, (a_k + 1) / 3^n)`.
pub fn cantor_numerators(n: u32, cap: u32) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Precondition("Cantor depth starts at 1".into()));
    }
    if n > cap || n > 40 {
        return Err(Error::ResourceCap {
            what: "Cantor depth",
            needed: n as u64,
            cap: cap.min(40) as u64,
        });
    }
    let mut nums = vec![1u64];
    let mut pow = 3u64; // 3^m for the current level m
    for _ in 1..n {
        let shift = 2 * pow;
        let mut next = Vec::with_capacity(nums.len() * 2);
        next.extend(nums.iter().copied());
        next.extend(nums.iter().map(|a| a + shift));
        nums = next;
        pow *= 3;
    }
    Ok(nums)
}

/// The open set `A_n` removed at step `n` of the middle-third construction:
/// `2^(n-1)` intervals of length `3^-n`.
pub fn cantor_removed(n: u32) -> Result<IntervalUnion> {
    cantor_removed_capped(n, DEFAULT_CANTOR_DEPTH_CAP)
}

pub fn cantor_removed_capped(n: u32, cap: u32) -> Result<IntervalUnion> {
    let nums = cantor_numerators(n, cap)?;
    let den = rational::pow3(n);
    let parts = nums
        .into_iter()
        .map(|a| {
            let a = BigInt::from(a);
            Interval {
                lo: Rational::new(a.clone(), den.clone()),
                hi: Rational::new(a + 1, den.clone()),
            }
        })
        .collect();
    Ok(IntervalUnion { parts })
}

/// `λ(t) = |{x ∈ I : x + t ∈ J}|` as a piecewise-linear trapezoid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Covariogram {
    /// `(t, λ(t))`; λ is linear between consecutive entries and zero
    /// outside the first and last abscissa.
    #[serde(serialize_with = "ser_breakpoints")]
    breakpoints: Vec<(Rational, Rational)>,
}

fn ser_breakpoints<S: serde::Serializer>(
    b: &[(Rational, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for (t, l) in b {
        seq.serialize_element(&(rational::format(t), rational::format(l)))?;
    }
    seq.end()
}

/// One linear stretch of a covariogram, in floats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TentSegment {
    pub t0: f64,
    pub t1: f64,
    pub l0: f64,
    pub l1: f64,
}

impl TentSegment {
    pub fn eval(&self, t: f64) -> f64 {
        if self.t1 == self.t0 {
            return self.l0;
        }
        let w = (t - self.t0) / (self.t1 - self.t0);
        self.l0 + w * (self.l1 - self.l0)
    }
}

/// Covariogram of `(I, J)`. Support is `[J.lo - I.hi, J.hi - I.lo]`.
pub fn covariogram(i: &Interval, j: &Interval) -> Covariogram {
    let li = i.len();
    let lj = j.len();
    let short = rational::min(&li, &lj);
    let long = rational::max(&li, &lj);
    let t0 = &j.lo - &i.hi;
    let t1 = &t0 + &short;
    let t2 = &t0 + &long;
    let t3 = &j.hi - &i.lo;
    let mut breakpoints = vec![(t0, Rational::zero()), (t1, short.clone())];
    if t2 != breakpoints[1].0 {
        breakpoints.push((t2, short));
    }
    breakpoints.push((t3, Rational::zero()));
    Covariogram { breakpoints }
}

/// Float tent for the hot loops: `I = (a, b)`, `J = (c, d)`.
pub fn tent_segments_f64(a: f64, b: f64, c: f64, d: f64) -> [TentSegment; 3] {
    let li = b - a;
    let lj = d - c;
    let (short, long) = if li <= lj { (li, lj) } else { (lj, li) };
    let t0 = c - b;
    let t3 = d - a;
    let t1 = t0 + short;
    let t2 = t3 - short;
    let t2 = t2.max(t1);
    let _ = long;
    [
        TentSegment {
            t0,
            t1,
            l0: 0.0,
            l1: short,
        },
        TentSegment {
            t0: t1,
            t1: t2,
            l0: short,
            l1: short,
        },
        TentSegment {
            t0: t2,
            t1: t3,
            l0: short,
            l1: 0.0,
        },
    ]
}

impl Covariogram {
    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    pub fn support(&self) -> (Rational, Rational) {
        (
            self.breakpoints[0].0.clone(),
            self.breakpoints.last().unwrap().0.clone(),
        )
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let b = &self.breakpoints;
        if t <= &b[0].0 || t >= &b[b.len() - 1].0 {
            return Rational::zero();
        }
        for w in b.windows(2) {
            let (t0, l0) = &w[0];
            let (t1, l1) = &w[1];
            if t <= t1 {
                return l0 + (l1 - l0) * (t - t0) / (t1 - t0);
            }
        }
        Rational::zero()
    }

    /// `∫ λ(t) dt`, exactly.
    pub fn mass(&self) -> Rational {
        self.breakpoints.windows(2).fold(Rational::zero(), |acc, w| {
            acc + (&w[1].0 - &w[0].0) * (&w[0].1 + &w[1].1) / rational::int(2)
        })
    }

    pub fn segments(&self) -> Vec<TentSegment> {
        self.breakpoints
            .windows(2)
            .map(|w| TentSegment {
                t0: rational::to_f64(&w[0].0),
                t1: rational::to_f64(&w[1].0),
                l0: rational::to_f64(&w[0].1),
                l1: rational::to_f64(&w[1].1),
            })
            .collect()
    }

    /// `∫ λ(t)/t dt` in closed form; requires support in `[0, ∞)`.
    pub fn integral_inv_t(&self) -> Result<f64> {
        self.require_nonnegative_support()?;
        Ok(self
            .segments()
            .iter()
            .map(|s| {
                let (alpha, beta) = linear_coeffs(s);
                let log_term = if alpha == 0.0 { 0.0 } else { alpha * (s.t1 / s.t0).ln() };
                beta * (s.t1 - s.t0) + log_term
            })
            .sum())
    }

    /// `∫ λ(t)/t² dt` in closed form; infinite when the support touches 0.
    pub fn integral_inv_t2(&self) -> Result<f64> {
        self.require_nonnegative_support()?;
        if self.breakpoints[0].0.is_zero() {
            return Ok(f64::INFINITY);
        }
        Ok(self
            .segments()
            .iter()
            .map(|s| {
                let (alpha, beta) = linear_coeffs(s);
                alpha * (1.0 / s.t0 - 1.0 / s.t1) + beta * (s.t1 / s.t0).ln()
            })
            .sum())
    }

    fn require_nonnegative_support(&self) -> Result<()> {
        if self.breakpoints[0].0.is_negative() {
            return Err(Error::Precondition(
                "kernel integrals need J to the right of I".into(),
            ));
        }
        Ok(())
    }
}

/// `λ = alpha + beta * t` on the segment.
fn linear_coeffs(s: &TentSegment) -> (f64, f64) {
    if s.t1 == s.t0 {
        return (s.l0, 0.0);
    }
    let beta = (s.l1 - s.l0) / (s.t1 - s.t0);
    (s.l0 - beta * s.t0, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::from_ratios(a, b).unwrap()
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(Interval::from_ints(1, 1).is_err());
        assert!(Interval::from_ints(2, 1).is_err());
    }

    #[test]
    fn union_disjoint_and_merge() {
        let u = make_union(vec![
            Interval::from_ints(2, 3).unwrap(),
            Interval::from_ints(0, 1).unwrap(),
        ]);
        assert_eq!(u.len(), 2);
        assert_eq!(u.measure(), int(2));

        let u = make_union(vec![
            Interval::from_ints(0, 1).unwrap(),
            iv((1, 2), (2, 1)),
        ]);
        assert_eq!(u.parts(), &[Interval::from_ints(0, 2).unwrap()]);
        assert_eq!(u.measure(), int(2));

        // touching parts merge
        let u = make_union(vec![
            Interval::from_ints(0, 1).unwrap(),
            Interval::from_ints(1, 2).unwrap(),
        ]);
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn make_union_from_pairs_rejects_reversed() {
        assert!(make_union_from_pairs(vec![(int(1), int(0))]).is_err());
    }

    #[test]
    fn first_removed_sets() {
        let a1 = cantor_removed(1).unwrap();
        assert_eq!(a1, make_union(vec![iv((1, 3), (2, 3))]));
        let a2 = cantor_removed(2).unwrap();
        assert_eq!(a2.parts(), &[iv((1, 9), (2, 9)), iv((7, 9), (8, 9))]);
    }

    #[test]
    fn removed_set_measure() {
        for n in 1..=20u32 {
            let a = cantor_removed(n).unwrap();
            assert_eq!(a.len(), 1usize << (n - 1));
            let expected = ratio(1, 2) * Rational::new(num::pow(BigInt::from(2), n as usize), rational::pow3(n));
            assert_eq!(a.measure(), expected, "n = {n}");
        }
    }

    #[test]
    fn depth_cap() {
        assert!(matches!(
            cantor_removed_capped(5, 4),
            Err(Error::ResourceCap { .. })
        ));
        assert!(cantor_removed(0).is_err());
    }

    #[test]
    fn cumulative_removed_measure() {
        let mut total = Rational::zero();
        for n in 1..=14u32 {
            total += cantor_removed(n).unwrap().measure();
            let expected = int(1) - Rational::new(num::pow(BigInt::from(2), n as usize), rational::pow3(n));
            assert_eq!(total, expected);
        }
    }

    #[test]
    fn removed_sets_are_disjoint() {
        for i in 1..=7u32 {
            for j in (i + 1)..=8 {
                let x = cantor_removed(i).unwrap().intersect(&cantor_removed(j).unwrap());
                assert!(x.is_empty(), "A_{i} ∩ A_{j}");
            }
        }
    }

    #[test]
    fn distances_between_removed_sets() {
        let a1 = cantor_removed(1).unwrap();
        let a2 = cantor_removed(2).unwrap();
        assert_eq!(union_distance(&a1, &a2).unwrap(), ratio(1, 9));
        assert_eq!(union_distance(&a1, &a1).unwrap(), int(0));
        for i in 1..=10u32 {
            for j in (i + 1)..=10 {
                let ai = cantor_removed(i).unwrap();
                let aj = cantor_removed(j).unwrap();
                let expected = Rational::new(1.into(), rational::pow3(j));
                assert_eq!(union_distance(&ai, &aj).unwrap(), expected);
                assert_eq!(union_distance(&aj, &ai).unwrap(), expected);
            }
        }
    }

    #[test]
    fn distance_rejects_empty() {
        assert!(union_distance(&IntervalUnion::empty(), &cantor_removed(1).unwrap()).is_err());
    }

    #[test]
    fn unit_covariogram() {
        let c = covariogram(
            &Interval::from_ints(0, 1).unwrap(),
            &Interval::from_ints(2, 3).unwrap(),
        );
        assert_eq!(c.support(), (int(1), int(3)));
        assert_eq!(c.eval(&int(2)), int(1));
        assert_eq!(c.eval(&ratio(3, 2)), ratio(1, 2));
        assert_eq!(c.mass(), int(1));
        // 3 ln 3 - 4 ln 2, worked out by hand from (t-1)/t and (3-t)/t
        let expected = 3.0 * 3f64.ln() - 4.0 * 2f64.ln();
        assert!((c.integral_inv_t().unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.52325).abs() < 1e-5);
        assert!((c.integral_inv_t2().unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn touching_covariogram_kernel_integrals() {
        let c = covariogram(
            &Interval::from_ints(-1, 0).unwrap(),
            &Interval::from_ints(0, 1).unwrap(),
        );
        // ∫_0^1 1 dt + ∫_1^2 (2-t)/t dt = 1 + 2 ln 2 - 1
        assert!((c.integral_inv_t().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!(c.integral_inv_t2().unwrap().is_infinite());
    }

    #[test]
    fn kernel_integral_requires_order() {
        let c = covariogram(
            &Interval::from_ints(2, 3).unwrap(),
            &Interval::from_ints(0, 1).unwrap(),
        );
        assert!(c.integral_inv_t().is_err());
    }

    #[test]
    fn float_tent_matches_exact() {
        let i = iv((1, 3), (2, 3));
        let j = iv((7, 9), (8, 9));
        let exact = covariogram(&i, &j);
        let segs = tent_segments_f64(i.lo_f64(), i.hi_f64(), j.lo_f64(), j.hi_f64());
        for k in 1..40 {
            let t = ratio(1, 9) + ratio(k, 40) * (ratio(5, 9) - ratio(1, 9));
            let tf = rational::to_f64(&t);
            let v = segs
                .iter()
                .find(|s| tf >= s.t0 && tf <= s.t1)
                .map(|s| s.eval(tf))
                .unwrap();
            assert!((v - rational::to_f64(&exact.eval(&t))).abs() < 1e-15);
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-60i64..60, 1i64..13).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn covariogram_mass_is_product_of_lengths(
            a in small_rational(), la in small_rational(),
            b in small_rational(), lb in small_rational(),
        ) {
            let la = la.abs() + ratio(1, 17);
            let lb = lb.abs() + ratio(1, 19);
            let i = Interval::new(a.clone(), &a + &la).unwrap();
            let j = Interval::new(b.clone(), &b + &lb).unwrap();
            let c = covariogram(&i, &j);
            prop_assert_eq!(c.mass(), &la * &lb);
            prop_assert!(c.breakpoints().iter().all(|(_, l)| !l.is_negative()));
        }

        #[test]
        fn union_measure_never_exceeds_sum(parts in proptest::collection::vec((small_rational(), 1i64..20), 1..8)) {
            let ivs: Vec<Interval> = parts
                .iter()
                .map(|(lo, w)| Interval::new(lo.clone(), lo + ratio(*w, 7)).unwrap())
                .collect();
            let sum = ivs.iter().fold(Rational::zero(), |acc, i| acc + i.len());
            let u = make_union(ivs);
            prop_assert!(u.measure() <= sum);
            for w in u.parts().windows(2) {
                prop_assert!(w[0].hi() < w[1].lo());
            }
        }
    }
}
