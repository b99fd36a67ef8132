//! Weight functions ω and the step-value sequences `k_n`, `μ_n` behind the
//! Cantor counterexample.

use std::f64::consts::LN_10;

use num::traits::{ToPrimitive, Zero};
use num::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logscalar::LogScalar;
use crate::quadrature::{self, Estimate, QuadratureConfig};
use crate::rational::{self, Rational};

const LN_3: f64 = 1.098_612_288_668_109_8;

/// Exact big integers are kept for indices up to this bound.
pub const EXACT_INDEX_LIMIT: u32 = 64;

/// Ratio window used to certify the geometric tail of the series.
const TAIL_WINDOW: u32 = 4096;

/// Slack on log-domain comparisons.
const LOG_SLACK: f64 = 1e-12;

/// `exp((ln μ)^{1/4})` from `ln μ`.
pub fn exp_quarter(ln_mu: f64) -> f64 {
    ln_mu.sqrt().sqrt().exp()
}

/// `a n² + b n + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadratic(pub [i64; 3]);

impl Quadratic {
    pub fn at(&self, n: u32) -> i64 {
        let n = n as i64;
        self.0[0] * n * n + self.0[1] * n + self.0[2]
    }
}

/// How `k_n = 10^{p(n)}` and `μ_n = 3^n · 10^{q(n)}` are generated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `p(n) = q(n) = n²`.
    Standard,
    /// `p(n) = q(n) = n`; breaks the gap condition from `n = 2` on.
    Small,
    Exponents {
        k_exponent: Quadratic,
        mu_exponent: Quadratic,
    },
}

impl SequenceKind {
    fn exponents(&self) -> (Quadratic, Quadratic) {
        match self {
            SequenceKind::Standard => (Quadratic([1, 0, 0]), Quadratic([1, 0, 0])),
            SequenceKind::Small => (Quadratic([0, 1, 0]), Quadratic([0, 1, 0])),
            SequenceKind::Exponents {
                k_exponent,
                mu_exponent,
            } => (*k_exponent, *mu_exponent),
        }
    }

    pub fn from_preset(name: &str) -> Result<Self> {
        match name {
            "standard" | "default" => Ok(SequenceKind::Standard),
            "small" => Ok(SequenceKind::Small),
            other => Err(Error::Parse(format!("unknown sequence preset {other:?}"))),
        }
    }
}

/// The pair `(k_n, μ_n)` with exact values for small indices and log
/// values for all indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePair {
    kind: SequenceKind,
    n_max: u32,
    p: Quadratic,
    q: Quadratic,
    /// index 0 holds `k_0 = μ_0 = 0` placeholders
    k_exact: Vec<BigInt>,
    mu_exact: Vec<BigInt>,
}

impl SequencePair {
    pub fn new(kind: SequenceKind, n_max: u32) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Precondition("n_max must be positive".into()));
        }
        let (p, q) = kind.exponents();
        let limit = EXACT_INDEX_LIMIT.max(n_max.min(EXACT_INDEX_LIMIT));
        let mut k_exact = vec![BigInt::zero()];
        let mut mu_exact = vec![BigInt::zero()];
        for n in 1..=limit {
            let (pn, qn) = (p.at(n), q.at(n));
            if pn < 0 || qn < 0 {
                return Err(Error::Precondition(format!(
                    "exponents must be nonnegative, got p({n}) = {pn}, q({n}) = {qn}"
                )));
            }
            k_exact.push(rational::pow10(pn as u64));
            mu_exact.push(rational::pow3(n) * rational::pow10(qn as u64));
        }
        Ok(SequencePair {
            kind,
            n_max,
            p,
            q,
            k_exact,
            mu_exact,
        })
    }

    pub fn standard(n_max: u32) -> Self {
        Self::new(SequenceKind::Standard, n_max).expect("standard exponents are valid")
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn k_exact(&self, n: u32) -> Option<&BigInt> {
        self.k_exact.get(n as usize).filter(|_| n >= 1)
    }

    pub fn mu_exact(&self, n: u32) -> Option<&BigInt> {
        self.mu_exact.get(n as usize).filter(|_| n >= 1)
    }

    /// `ln k_n` for any `n ≥ 1`.
    pub fn ln_k(&self, n: u32) -> f64 {
        self.p.at(n) as f64 * LN_10
    }

    /// `ln μ_n`; `-∞` for the `μ_0 = 0` anchor.
    pub fn ln_mu(&self, n: u32) -> f64 {
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        n as f64 * LN_3 + self.q.at(n) as f64 * LN_10
    }

    pub fn k(&self, n: u32) -> LogScalar {
        match self.k_exact(n) {
            Some(v) => LogScalar::from_bigint(v),
            None => LogScalar::from_log(1, self.ln_k(n)),
        }
    }

    pub fn mu(&self, n: u32) -> LogScalar {
        if n == 0 {
            return LogScalar::ZERO;
        }
        match self.mu_exact(n) {
            Some(v) => LogScalar::from_bigint(v),
            None => LogScalar::from_log(1, self.ln_mu(n)),
        }
    }

    /// `μ_n` as a float; infinite past the float range.
    pub fn mu_f64(&self, n: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self.mu_exact(n) {
            Some(v) => v.to_f64().unwrap_or(f64::INFINITY),
            None => f64::INFINITY,
        }
    }

    /// Largest `n ≥ 0` with `ln μ_n ≤ ln_mu` (assumes `μ_n` increasing).
    pub fn index_below_log(&self, ln_mu: f64) -> u32 {
        if !(ln_mu >= self.ln_mu(1)) {
            return 0;
        }
        let (mut lo, mut hi) = (1u32, 2u32);
        while self.ln_mu(hi) <= ln_mu {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi == u32::MAX {
                break;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.ln_mu(mid) <= ln_mu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `ln` of the series term `n² (2/3)ⁿ exp((ln μ_n)^{1/4})`.
    pub fn ln_series_term(&self, n: u32) -> f64 {
        let nf = n as f64;
        2.0 * nf.ln() + nf * (2.0f64 / 3.0).ln() + self.ln_mu(n).sqrt().sqrt()
    }

    pub fn series_term(&self, n: u32) -> f64 {
        self.ln_series_term(n).exp()
    }
}

/// Pieces of the counterexample weight, keyed by anchor index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Zone {
    /// `[0, μ₁+1]`, the initial affine ramp.
    Ramp0,
    /// `[μ_i, μ_i+1]`, `i ≥ 2`: affine, rising to the square zone.
    Up(u32),
    /// `[μ_i+1, μ_i+2]`: `ω = μ²`.
    Square(u32),
    /// `[μ_i+2, μ_i+3]`: affine, falling to the slow zone.
    Down(u32),
    /// `[μ_i+3, μ_{i+1}]`: `ω = exp((ln μ)^{1/4})`.
    Slow(u32),
}

/// A point on the μ axis. `Anchor` addresses `μ_index + offset` exactly even
/// when `μ_index` is far beyond float resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MuPoint {
    Value(f64),
    Log(f64),
    Anchor { index: u32, offset: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightSpec {
    PowerLaw { theta: f64 },
    Linear,
    Counterexample {
        #[serde(default = "default_sequence")]
        sequence: SequenceKind,
    },
    Table { points: Vec<(f64, f64)> },
}

fn default_sequence() -> SequenceKind {
    SequenceKind::Standard
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        match self {
            WeightSpec::PowerLaw { theta } => Weight::power_law(*theta),
            WeightSpec::Linear => Ok(Weight::Linear),
            WeightSpec::Counterexample { sequence } => {
                Weight::counterexample(SequencePair::new(sequence.clone(), EXACT_INDEX_LIMIT)?)
            }
            WeightSpec::Table { points } => Weight::table(points.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    PowerLaw { theta: f64 },
    Linear,
    Counterexample(Box<SequencePair>),
    /// Linear interpolation through `(0,0)` and the points, constant after
    /// the last point.
    Table(Vec<(f64, f64)>),
}

/// Resolved position of a point on the counterexample axis.
#[derive(Clone, Copy, Debug)]
struct Located {
    zone: Zone,
    ln_mu: f64,
    /// `μ - μ_i` for the zone's anchor `i`; finite only near the anchor.
    offset: f64,
}

impl Weight {
    pub fn power_law(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Precondition(format!("power-law exponent must be positive, got {theta}")));
        }
        Ok(Weight::PowerLaw { theta })
    }

    pub fn counterexample(seq: SequencePair) -> Result<Self> {
        for n in 1..EXACT_INDEX_LIMIT {
            let (a, b) = (seq.mu_exact(n).unwrap(), seq.mu_exact(n + 1).unwrap());
            if *b <= a + BigInt::from(3) {
                return Err(Error::Precondition(format!(
                    "the weight needs μ_(n+1) > μ_n + 3, violated at n = {n}"
                )));
            }
        }
        Ok(Weight::Counterexample(Box::new(seq)))
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("table needs at least one point".into()));
        }
        let mut prev = 0.0;
        for &(m, w) in &points {
            if !(m > prev && w > 0.0 && m.is_finite() && w.is_finite()) {
                return Err(Error::Precondition(
                    "table abscissae must increase from 0 and values must be positive".into(),
                ));
            }
            prev = m;
        }
        Ok(Weight::Table(points))
    }

    pub fn sequence(&self) -> Option<&SequencePair> {
        match self {
            Weight::Counterexample(s) => Some(s),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Weight::PowerLaw { theta } => format!("power_law(theta={theta})"),
            Weight::Linear => "linear".into(),
            Weight::Counterexample(_) => "counterexample".into(),
            Weight::Table(_) => "table".into(),
        }
    }

    /// ω(μ) in floating point.
    pub fn eval(&self, mu: f64) -> Result<f64> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::Domain(format!("ω is defined on [0, ∞), got {mu}")));
        }
        if mu == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Weight::PowerLaw { theta } => mu.powf(*theta),
            Weight::Linear => mu,
            Weight::Table(pts) => table_eval(pts, mu),
            Weight::Counterexample(seq) => {
                let mut i = 0;
                while seq.mu_f64(i + 1) <= mu {
                    i += 1;
                }
                let d = mu - seq.mu_f64(i);
                let zone = zone_at_offset(i, d);
                let loc = Located {
                    zone,
                    ln_mu: mu.ln(),
                    offset: d,
                };
                match zone {
                    Zone::Ramp0 => mu * (seq.mu_f64(1) + 1.0),
                    Zone::Square(_) => mu * mu,
                    Zone::Slow(_) => exp_quarter(mu.ln()),
                    _ => self.zone_value(seq, &loc).to_f64(),
                }
            }
        })
    }

    /// ln-domain evaluation from `ln μ`; never forms μ.
    pub fn eval_log(&self, ln_mu: f64) -> LogScalar {
        if ln_mu == f64::NEG_INFINITY {
            return LogScalar::ZERO;
        }
        match self {
            Weight::PowerLaw { theta } => LogScalar::from_log(1, theta * ln_mu),
            Weight::Linear => LogScalar::from_log(1, ln_mu),
            Weight::Table(pts) => LogScalar::from_f64(table_eval(pts, ln_mu.exp())),
            Weight::Counterexample(seq) => {
                let loc = locate(seq, MuPoint::Log(ln_mu));
                self.zone_value(seq, &loc)
            }
        }
    }

    pub fn eval_point(&self, p: MuPoint) -> Result<LogScalar> {
        match (self, p) {
            (_, MuPoint::Value(v)) => self.eval(v).map(LogScalar::from_f64),
            (_, MuPoint::Log(l)) => Ok(self.eval_log(l)),
            (Weight::Counterexample(seq), a @ MuPoint::Anchor { .. }) => {
                Ok(self.zone_value(seq, &locate(seq, a)))
            }
            (_, MuPoint::Anchor { index: 0, offset }) => self.eval(offset).map(LogScalar::from_f64),
            _ => Err(Error::Precondition(
                "anchored points need the counterexample weight".into(),
            )),
        }
    }

    /// Value of a zone's own formula at a point (also at its endpoints,
    /// which is what the continuity checks compare).
    fn zone_value(&self, seq: &SequencePair, loc: &Located) -> LogScalar {
        let ln_e = |ln_mu: f64| LogScalar::from_log(1, ln_mu.sqrt().sqrt());
        match loc.zone {
            Zone::Ramp0 => LogScalar::from_log(1, loc.ln_mu + ln_plus(seq, 1, 1.0)),
            Zone::Square(_) => LogScalar::from_log(1, 2.0 * loc.ln_mu),
            Zone::Slow(_) => ln_e(loc.ln_mu),
            Zone::Up(i) => {
                let v0 = ln_e(seq.ln_mu(i));
                let v1 = LogScalar::from_log(1, 2.0 * ln_plus(seq, i, 1.0));
                affine_mix(v0, v1, loc.offset)
            }
            Zone::Down(i) => {
                let v0 = LogScalar::from_log(1, 2.0 * ln_plus(seq, i, 2.0));
                let v1 = ln_e(ln_plus(seq, i, 3.0));
                affine_mix(v0, v1, loc.offset - 2.0)
            }
        }
    }

    /// Left and right formula values at every joint of the counterexample
    /// weight with anchor index `≤ n`: `(index, offset, left, right)`.
    pub fn joint_values(&self, n: u32) -> Vec<(u32, f64, LogScalar, LogScalar)> {
        let Weight::Counterexample(seq) = self else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let at = |zone: Zone, i: u32, offset: f64| {
            self.zone_value(
                seq,
                &Located {
                    zone,
                    ln_mu: ln_plus(seq, i, offset),
                    offset,
                },
            )
        };
        for i in 1..=n {
            // left of μ_i+1
            let left = if i == 1 { at(Zone::Ramp0, 1, 1.0) } else { at(Zone::Up(i), i, 1.0) };
            out.push((i, 1.0, left, at(Zone::Square(i), i, 1.0)));
            out.push((i, 2.0, at(Zone::Square(i), i, 2.0), at(Zone::Down(i), i, 2.0)));
            out.push((i, 3.0, at(Zone::Down(i), i, 3.0), at(Zone::Slow(i), i, 3.0)));
            if i >= 2 {
                let slow = self.zone_value(
                    seq,
                    &Located {
                        zone: Zone::Slow(i - 1),
                        ln_mu: seq.ln_mu(i),
                        offset: 0.0,
                    },
                );
                out.push((i, 0.0, slow, at(Zone::Up(i), i, 0.0)));
            }
        }
        out
    }

    /// `ln μ` of the kinks of ω strictly inside `(ln_lo, ln_hi)`.
    pub fn ln_joints_between(&self, ln_lo: f64, ln_hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match self {
            Weight::Table(pts) => out.extend(pts.iter().map(|p| p.0.ln())),
            Weight::Counterexample(seq) => {
                let first = seq.index_below_log(ln_lo).max(1);
                let last = seq.index_below_log(ln_hi) + 1;
                for i in first..=last {
                    for d in [0.0, 1.0, 2.0, 3.0] {
                        if i == 1 && d == 0.0 {
                            continue;
                        }
                        out.push(ln_plus(seq, i, d));
                    }
                }
            }
            _ => {}
        }
        out.retain(|&l| ln_lo < l && l < ln_hi);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Index `i` such that `[lo, hi] ⊂ [μ_i+3, μ_{i+1}]`, decided exactly.
    pub fn slow_zone_containing(&self, lo: &Rational, hi: &Rational) -> Option<u32> {
        let Weight::Counterexample(seq) = self else {
            return None;
        };
        if lo > hi || !rational::is_positive(lo) {
            return None;
        }
        let guess = seq.index_below_log(LogScalar::from_rational(lo).log_mag());
        for i in guess.saturating_sub(1).max(1)..=guess + 1 {
            let (Some(a), Some(b)) = (seq.mu_exact(i), seq.mu_exact(i + 1)) else {
                continue;
            };
            let start = Rational::from_integer(a + BigInt::from(3));
            let end = Rational::from_integer(b.clone());
            if &start <= lo && hi <= &end {
                return Some(i);
            }
        }
        None
    }

    /// Minimum and maximum of ω on `[lo, hi]`. Every piece of every family
    /// is monotone, so endpoints plus interior joints suffice.
    pub fn extrema_on(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        if !(lo <= hi) {
            return Err(Error::Precondition("extrema_on needs lo ≤ hi".into()));
        }
        let mut cands = vec![self.eval(lo)?, self.eval(hi)?];
        match self {
            Weight::Table(pts) => {
                for &(m, w) in pts {
                    if lo < m && m < hi {
                        cands.push(w);
                    }
                }
            }
            Weight::Counterexample(seq) => {
                let mut i = 1;
                while seq.mu_f64(i) <= hi {
                    for d in [0.0, 1.0, 2.0, 3.0] {
                        let m = seq.mu_f64(i) + d;
                        if lo < m && m < hi {
                            cands.push(self.eval(m)?);
                        }
                    }
                    i += 1;
                }
            }
            _ => {}
        }
        let min = cands.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok((min, max))
    }
}

fn table_eval(pts: &[(f64, f64)], mu: f64) -> f64 {
    let mut prev = (0.0, 0.0);
    for &(m, w) in pts {
        if mu <= m {
            let t = (mu - prev.0) / (m - prev.0);
            return prev.1 + t * (w - prev.1);
        }
        prev = (m, w);
    }
    prev.1
}

/// `ln(μ_i + d)` for `d ≥ 0`.
fn ln_plus(seq: &SequencePair, i: u32, d: f64) -> f64 {
    if i == 0 {
        return d.ln();
    }
    let l = seq.ln_mu(i);
    l + (d.ln() - l).exp().ln_1p()
}

/// `v0 (1-w) + v1 w` for `w ∈ [0,1]`, in the log domain.
fn affine_mix(v0: LogScalar, v1: LogScalar, w: f64) -> LogScalar {
    let w = w.clamp(0.0, 1.0);
    let a = v0 * LogScalar::from_f64(1.0 - w);
    let b = v1 * LogScalar::from_f64(w);
    a.add(&b)
}

fn zone_at_offset(i: u32, d: f64) -> Zone {
    if i == 0 || (i == 1 && d <= 1.0) {
        return Zone::Ramp0;
    }
    if d < 1.0 {
        Zone::Up(i)
    } else if d <= 2.0 {
        Zone::Square(i)
    } else if d < 3.0 {
        Zone::Down(i)
    } else {
        Zone::Slow(i)
    }
}

fn locate(seq: &SequencePair, p: MuPoint) -> Located {
    match p {
        MuPoint::Value(v) => {
            let ln_mu = v.ln();
            let mut i = 0;
            while seq.mu_f64(i + 1) <= v {
                i += 1;
            }
            let d = v - seq.mu_f64(i);
            Located {
                zone: zone_at_offset(i, d),
                ln_mu,
                offset: d,
            }
        }
        MuPoint::Anchor { index, offset } => Located {
            zone: zone_at_offset(index, offset),
            ln_mu: ln_plus(seq, index, offset),
            offset,
        },
        MuPoint::Log(ln_mu) => {
            let i = seq.index_below_log(ln_mu);
            if i == 0 {
                return Located {
                    zone: Zone::Ramp0,
                    ln_mu,
                    offset: ln_mu.exp(),
                };
            }
            // μ - μ_i = μ_i · expm1(ln μ - ln μ_i)
            let ln_d = seq.ln_mu(i) + (ln_mu - seq.ln_mu(i)).exp_m1().ln();
            let d = if ln_d < 3f64.ln() { ln_d.exp() } else { f64::INFINITY };
            Located {
                zone: zone_at_offset(i, d),
                ln_mu,
                offset: d,
            }
        }
    }
}

/// `∫ ω(μ)/μ² dμ` between two points, with an absolute error estimate.
pub fn integral_condition_partial(
    w: &Weight,
    lo: MuPoint,
    hi: MuPoint,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    match w {
        Weight::Counterexample(seq) => counterexample_integral(w, seq, lo, hi, cfg),
        _ => {
            let ln_of = |p: MuPoint| -> Result<f64> {
                match p {
                    MuPoint::Value(v) => Ok(v.ln()),
                    MuPoint::Log(l) => Ok(l),
                    MuPoint::Anchor { index: 0, offset } => Ok(offset.ln()),
                    MuPoint::Anchor { .. } => Err(Error::Precondition(
                        "anchored points need the counterexample weight".into(),
                    )),
                }
            };
            let (la, lb) = (ln_of(lo)?, ln_of(hi)?);
            check_range(la, lb)?;
            Ok(Estimate::exact(match w {
                Weight::Linear => lb - la,
                Weight::PowerLaw { theta } => power_integral(*theta, la, lb),
                Weight::Table(pts) => table_integral(pts, la.exp(), lb.exp()),
                Weight::Counterexample(_) => unreachable!(),
            }))
        }
    }
}

fn check_range(la: f64, lb: f64) -> Result<()> {
    if !(la >= -1e-15 && la < lb) {
        return Err(Error::Precondition(
            "integral condition needs 1 ≤ mu_lo < mu_hi".into(),
        ));
    }
    Ok(())
}

/// `∫_a^b μ^{θ-2} dμ` from `ln a`, `ln b`.
fn power_integral(theta: f64, la: f64, lb: f64) -> f64 {
    let e = theta - 1.0;
    if e == 0.0 {
        lb - la
    } else {
        (e * la).exp() * (e * (lb - la)).exp_m1() / e
    }
}

fn table_integral(pts: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let mut knots = vec![(0.0, 0.0)];
    knots.extend_from_slice(pts);
    let mut total = 0.0;
    for k in 0..knots.len() {
        let (m0, w0) = knots[k];
        let (m1, slope, icpt) = match knots.get(k + 1) {
            Some(&(m1, w1)) => {
                let s = (w1 - w0) / (m1 - m0);
                (m1, s, w0 - s * m0)
            }
            None => (f64::INFINITY, 0.0, w0),
        };
        let (x0, x1) = (a.max(m0), b.min(m1));
        if x0 < x1 {
            total += icpt * (1.0 / x0 - 1.0 / x1) + slope * (x1 / x0).ln();
        }
    }
    total
}

fn zone_end(zone: Zone) -> MuPoint {
    match zone {
        Zone::Ramp0 => MuPoint::Anchor { index: 1, offset: 1.0 },
        Zone::Up(i) => MuPoint::Anchor { index: i, offset: 1.0 },
        Zone::Square(i) => MuPoint::Anchor { index: i, offset: 2.0 },
        Zone::Down(i) => MuPoint::Anchor { index: i, offset: 3.0 },
        Zone::Slow(i) => MuPoint::Anchor { index: i + 1, offset: 0.0 },
    }
}

fn next_zone(zone: Zone) -> Zone {
    match zone {
        Zone::Ramp0 => Zone::Square(1),
        Zone::Up(i) => Zone::Square(i),
        Zone::Square(i) => Zone::Down(i),
        Zone::Down(i) => Zone::Slow(i),
        Zone::Slow(i) => Zone::Up(i + 1),
    }
}

/// Strict order of two located points. Offsets decide within one anchor,
/// where logs would not resolve the difference.
fn precedes(a: &Located, b: &Located) -> bool {
    let anchor = |z: Zone| match z {
        Zone::Ramp0 => None,
        Zone::Up(i) | Zone::Square(i) | Zone::Down(i) => Some(i),
        Zone::Slow(_) => None,
    };
    match (anchor(a.zone), anchor(b.zone)) {
        (Some(i), Some(j)) if i == j => a.offset < b.offset,
        _ if zone_key(a.zone) != zone_key(b.zone) => zone_key(a.zone) < zone_key(b.zone),
        _ => a.ln_mu < b.ln_mu,
    }
}

fn zone_key(z: Zone) -> (u32, u8) {
    match z {
        Zone::Ramp0 => (0, 0),
        Zone::Up(i) => (i, 0),
        Zone::Square(i) => (i, 1),
        Zone::Down(i) => (i, 2),
        Zone::Slow(i) => (i, 3),
    }
}

fn counterexample_integral(
    w: &Weight,
    seq: &SequencePair,
    lo: MuPoint,
    hi: MuPoint,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let a = locate(seq, lo);
    let b = locate(seq, hi);
    if !(a.ln_mu >= -1e-15 && precedes(&a, &b)) {
        return Err(Error::Precondition(
            "integral condition needs 1 ≤ mu_lo < mu_hi".into(),
        ));
    }
    let mut total = Estimate::default();
    let mut cur = a;
    loop {
        let last = zone_key(cur.zone) >= zone_key(b.zone);
        let end = if last {
            b
        } else {
            let mut e = locate(seq, zone_end(cur.zone));
            e.zone = cur.zone;
            e
        };
        total = total + zone_integral(w, seq, &cur, &end, cfg)?;
        if last {
            return Ok(total);
        }
        let z = next_zone(cur.zone);
        let mut start = locate(seq, zone_end(cur.zone));
        start.zone = z;
        cur = start;
    }
}

/// Integral of ω/μ² between two points in the same zone.
fn zone_integral(w: &Weight, seq: &SequencePair, a: &Located, b: &Located, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !precedes(a, b) {
        return Ok(Estimate::default());
    }
    match a.zone {
        // c·μ/μ² with c = μ₁+1
        Zone::Ramp0 => Ok(Estimate::exact(ln_plus(seq, 1, 1.0).exp() * (b.ln_mu - a.ln_mu))),
        // μ²/μ² = 1
        Zone::Square(_) => Ok(Estimate::exact(b.offset - a.offset)),
        Zone::Up(i) | Zone::Down(i) => {
            let zone = a.zone;
            let f = |d: f64| {
                let loc = Located {
                    zone,
                    ln_mu: ln_plus(seq, i, d),
                    offset: d,
                };
                let v = w.zone_value(seq, &loc);
                (v.log_mag() - 2.0 * loc.ln_mu).exp()
            };
            quadrature::integrate(f, a.offset, b.offset, cfg)
        }
        Zone::Slow(_) => {
            // s = ln μ: ∫ exp(s^{1/4} - s) ds
            let f = |s: f64| (s.sqrt().sqrt() - s).exp();
            let (sa, sb) = (a.ln_mu, b.ln_mu);
            let mut breaks = vec![sa];
            let mut x = sa + 1.0;
            while x < sb && x < sa + 64.0 {
                breaks.push(x);
                x += 4.0;
            }
            breaks.push(sb);
            quadrature::integrate_with_breaks(f, &breaks, cfg)
        }
    }
}

/// Samples of `ln ω(μ) - θ·ln ln μ` along a grid of `ln μ` values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub theta: f64,
    pub points: Vec<GrowthPoint>,
    pub strictly_increasing: bool,
    /// Increments grow along the grid.
    pub accelerating: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub ln_mu: f64,
    pub ln_omega: f64,
    pub ratio: f64,
}

pub fn growth_check(w: &Weight, theta: f64, ln_mu_grid: &[f64]) -> Result<GrowthReport> {
    if ln_mu_grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Precondition("grid must be increasing".into()));
    }
    if ln_mu_grid.iter().any(|&l| l <= 0.0) {
        return Err(Error::Precondition("grid needs ln μ > 0".into()));
    }
    let points: Vec<GrowthPoint> = ln_mu_grid
        .iter()
        .map(|&l| {
            let ln_omega = w.eval_log(l).log_mag();
            GrowthPoint {
                ln_mu: l,
                ln_omega,
                ratio: ln_omega - theta * l.ln(),
            }
        })
        .collect();
    let inc: Vec<f64> = points.windows(2).map(|p| p[1].ratio - p[0].ratio).collect();
    Ok(GrowthReport {
        theta,
        strictly_increasing: inc.iter().all(|&d| d > 0.0),
        accelerating: inc.windows(2).all(|d| d[1] > d[0]),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceRow {
    pub n: u32,
    /// `μ_n ≥ 3ⁿ k_n`, log domain.
    pub mu_dominates_log: bool,
    /// `k_{n+1} ≥ k_n + μ_n + 3`, log domain.
    pub gap_log: bool,
    /// Same conditions in exact integers, where available.
    pub mu_dominates_exact: Option<bool>,
    pub gap_exact: Option<bool>,
    pub series_term: f64,
    pub partial_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceReport {
    pub rows: Vec<SequenceRow>,
    pub all_hold: bool,
    /// Largest term ratio `t_{m+1}/t_m` over `m ≥ n_max` within the window.
    pub ratio_sup: f64,
    /// Ratios are non-increasing across the window, so the sup is attained
    /// at its start and the window bound extends to the full tail.
    pub ratio_monotone: bool,
    /// `t_{n_max} r/(1-r)` with `r = ratio_sup`; `None` when `r ≥ 1`.
    pub tail_bound: Option<f64>,
}

impl SequenceReport {
    pub fn partial_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.partial_sum)
    }
}

pub fn check_sequence_conditions(seq: &SequencePair, n_max: u32) -> Result<SequenceReport> {
    if n_max == 0 || n_max > seq.n_max() {
        return Err(Error::Precondition(format!(
            "n_max must lie in 1..={}",
            seq.n_max()
        )));
    }
    let three = LogScalar::from_f64(3.0);
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut sum = 0.0;
    for n in 1..=n_max {
        let pow3n = LogScalar::from_log(1, n as f64 * LN_3);
        let mu_dominates_log = seq.ln_mu(n) >= (pow3n * seq.k(n)).log_mag() - LOG_SLACK;
        let rhs = seq.k(n).add(&seq.mu(n)).add(&three);
        let gap_log = seq.ln_k(n + 1) >= rhs.log_mag() - LOG_SLACK;
        let exact = |n: u32| Some((seq.k_exact(n)?, seq.mu_exact(n)?));
        let (mu_dominates_exact, gap_exact) = match (exact(n), seq.k_exact(n + 1)) {
            (Some((k, mu)), Some(k1)) => (
                Some(*mu >= rational::pow3(n) * k),
                Some(*k1 >= k + mu + BigInt::from(3)),
            ),
            (Some((k, mu)), None) => (Some(*mu >= rational::pow3(n) * k), None),
            _ => (None, None),
        };
        let t = seq.series_term(n);
        sum += t;
        rows.push(SequenceRow {
            n,
            mu_dominates_log,
            gap_log,
            mu_dominates_exact,
            gap_exact,
            series_term: t,
            partial_sum: sum,
        });
    }
    let ratios: Vec<f64> = (n_max..n_max + TAIL_WINDOW)
        .map(|m| (seq.ln_series_term(m + 1) - seq.ln_series_term(m)).exp())
        .collect();
    let ratio_sup = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ratio_monotone = ratios.windows(2).all(|r| r[1] <= r[0]);
    let tail_bound = (ratio_sup < 1.0 && ratio_monotone)
        .then(|| seq.series_term(n_max) * ratio_sup / (1.0 - ratio_sup));
    let all_hold = rows.iter().all(|r| {
        r.mu_dominates_log
            && r.gap_log
            && r.mu_dominates_exact != Some(false)
            && r.gap_exact != Some(false)
    });
    Ok(SequenceReport {
        rows,
        all_hold,
        ratio_sup,
        ratio_monotone,
        tail_bound,
    })
}

/// Bound on `Σ_{m>n} t_m`: exact terms up to the first index `N ≥ n` from
/// which the geometric ratio bound holds, plus that bound.
pub fn series_tail_bound(seq: &SequencePair, n: u32) -> Result<Option<f64>> {
    let mut explicit = 0.0;
    for start in n..=seq.n_max() {
        if start > n {
            explicit += seq.series_term(start);
        }
        if let Some(t) = check_sequence_conditions(seq, start)?.tail_bound {
            return Ok(Some(explicit + t));
        }
    }
    Ok(None)
}
