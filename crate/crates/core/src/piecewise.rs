//! Piecewise-constant and piecewise-affine functions on an interval, their
//! difference quotients, and the shifted maps `x - u(x)/μ`.

use num::traits::{Signed, Zero};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{self, Interval};
use crate::logscalar::LogScalar;
use crate::rational::{self, Rational};
use crate::weight::SequencePair;

/// A constant value: always in log form, exact when known.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub log: LogScalar,
    pub exact: Option<Rational>,
}

impl Level {
    pub fn exact(q: Rational) -> Self {
        Level {
            log: LogScalar::from_rational(&q),
            exact: Some(q),
        }
    }

    pub fn approx(log: LogScalar) -> Self {
        Level { log, exact: None }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.exact {
            Some(q) => rational::to_f64(q),
            None => self.log.to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PieceSpec {
    Constant(Level),
    Affine { slope: f64, intercept: f64 },
}

impl PieceSpec {
    pub fn constant(q: Rational) -> Self {
        PieceSpec::Constant(Level::exact(q))
    }

    /// Slope of the piece (0 for constants).
    pub fn slope(&self) -> f64 {
        match self {
            PieceSpec::Constant(_) => 0.0,
            PieceSpec::Affine { slope, .. } => *slope,
        }
    }

    /// Exact value at `x`: constants when their level is exact, affine
    /// pieces from the exact rational value of their float coefficients.
    pub fn eval_exact(&self, x: &Rational) -> Option<Rational> {
        match self {
            PieceSpec::Constant(l) => l.exact.clone(),
            PieceSpec::Affine { slope, intercept } => {
                Some(rational::from_f64(*slope).ok()? * x + rational::from_f64(*intercept).ok()?)
            }
        }
    }

    pub fn eval_log(&self, x: &Rational) -> LogScalar {
        match self {
            PieceSpec::Constant(l) => l.log,
            PieceSpec::Affine { .. } => LogScalar::from_rational(&self.eval_exact(x).expect("finite coefficients")),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            PieceSpec::Constant(l) => l.to_f64(),
            PieceSpec::Affine { slope, intercept } => slope * x + intercept,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub interval: Interval,
    pub spec: PieceSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    domain: Interval,
    pieces: Vec<Piece>,
    null_budget: Rational,
}

/// `(u(y) - u(x)) / (y - x)` for `x < y`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceQuotient {
    pub value: LogScalar,
    pub exact: Option<Rational>,
    pub x: Rational,
    pub y: Rational,
}

impl PiecewiseFunction {
    /// Pieces must lie in the closure of `domain` and be pairwise disjoint.
    pub fn new(domain: Interval, mut pieces: Vec<Piece>) -> Result<Self> {
        pieces.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
        for p in &pieces {
            if p.interval.lo() < domain.lo() || p.interval.hi() > domain.hi() {
                return Err(Error::Precondition(format!("piece {} leaves the domain {domain}", p.interval)));
            }
            if let PieceSpec::Affine { slope, intercept } = p.spec {
                if !(slope.is_finite() && intercept.is_finite()) {
                    return Err(Error::Domain("affine coefficients must be finite".into()));
                }
            }
        }
        for w in pieces.windows(2) {
            if w[0].interval.hi() > w[1].interval.lo() {
                return Err(Error::Precondition(format!(
                    "pieces {} and {} overlap",
                    w[0].interval, w[1].interval
                )));
            }
        }
        let covered = pieces.iter().fold(Rational::zero(), |a, p| a + p.interval.len());
        let null_budget = domain.len() - covered;
        Ok(PiecewiseFunction {
            domain,
            pieces,
            null_budget,
        })
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Measure of the domain left uncovered by pieces.
    pub fn null_budget(&self) -> &Rational {
        &self.null_budget
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.pieces.iter().all(|p| matches!(p.spec, PieceSpec::Constant(_)))
    }

    pub fn piece_index(&self, x: &Rational) -> Result<usize> {
        let idx = self.pieces.partition_point(|p| p.interval.lo() < x);
        if idx > 0 && self.pieces[idx - 1].interval.contains(x) {
            Ok(idx - 1)
        } else {
            Err(Error::UnassignedPoint(rational::format(x)))
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<LogScalar> {
        let i = self.piece_index(x)?;
        Ok(self.pieces[i].spec.eval_log(x))
    }

    pub fn eval_exact(&self, x: &Rational) -> Result<Option<Rational>> {
        let i = self.piece_index(x)?;
        Ok(self.pieces[i].spec.eval_exact(x))
    }

    pub fn difference_quotient(&self, x: &Rational, y: &Rational) -> Result<DifferenceQuotient> {
        if x >= y {
            return Err(Error::Ordering {
                x: rational::format(x),
                y: rational::format(y),
            });
        }
        let (ix, iy) = (self.piece_index(x)?, self.piece_index(y)?);
        let gap = y - x;
        let exact = match (self.pieces[ix].spec.eval_exact(x), self.pieces[iy].spec.eval_exact(y)) {
            (Some(ux), Some(uy)) => Some((uy - ux) / &gap),
            _ => None,
        };
        let value = match &exact {
            Some(q) => LogScalar::from_rational(q),
            None => self.quotient_log(ix, iy, x, y),
        };
        Ok(DifferenceQuotient {
            value,
            exact,
            x: x.clone(),
            y: y.clone(),
        })
    }

    /// Log-domain quotient, never using exact levels.
    pub fn difference_quotient_log(&self, x: &Rational, y: &Rational) -> Result<LogScalar> {
        if x >= y {
            return Err(Error::Ordering {
                x: rational::format(x),
                y: rational::format(y),
            });
        }
        let (ix, iy) = (self.piece_index(x)?, self.piece_index(y)?);
        Ok(self.quotient_log(ix, iy, x, y))
    }

    fn quotient_log(&self, ix: usize, iy: usize, x: &Rational, y: &Rational) -> LogScalar {
        let (ux, uy) = (self.pieces[ix].spec.eval_log(x), self.pieces[iy].spec.eval_log(y));
        uy.sub(&ux) / LogScalar::from_rational(&(y - x))
    }

    /// `sup |u|` over the pieces, as a float.
    pub fn sup_abs(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match &p.spec {
                PieceSpec::Constant(l) => l.to_f64().abs(),
                PieceSpec::Affine { slope, intercept } => {
                    let a = slope * p.interval.lo_f64() + intercept;
                    let b = slope * p.interval.hi_f64() + intercept;
                    a.abs().max(b.abs())
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `u = k_n` on every part of `A_n`, `n ≤ n_max`; the Cantor set is left
/// unassigned.
///
/// Equivalently `n` is the position of the first ternary digit 1 of `x`.
/// Only the interval description is implemented.
pub fn build_cantor_function(seq: &SequencePair, n_max: u32) -> Result<PiecewiseFunction> {
    build_cantor_function_capped(seq, n_max, interval::DEFAULT_CANTOR_DEPTH_CAP)
}

pub fn build_cantor_function_capped(seq: &SequencePair, n_max: u32, cap: u32) -> Result<PiecewiseFunction> {
    let mut pieces = Vec::new();
    for n in 1..=n_max {
        let level = match seq.k_exact(n) {
            Some(k) => Level::exact(Rational::from_integer(k.clone())),
            None => Level::approx(seq.k(n)),
        };
        for part in interval::cantor_removed_capped(n, cap)?.parts() {
            pieces.push(Piece {
                interval: part.clone(),
                spec: PieceSpec::Constant(level.clone()),
            });
        }
    }
    PiecewiseFunction::new(Interval::from_ints(0, 1)?, pieces)
}

/// Step function with the given interior breakpoints and one exact value
/// per step; breakpoints themselves are unassigned.
pub fn step_function(domain: Interval, breaks: &[Rational], values: &[Rational]) -> Result<PiecewiseFunction> {
    if values.len() != breaks.len() + 1 {
        return Err(Error::Precondition("need one more value than breakpoints".into()));
    }
    let mut edges = vec![domain.lo().clone()];
    edges.extend(breaks.iter().cloned());
    edges.push(domain.hi().clone());
    let pieces = edges
        .windows(2)
        .zip(values)
        .map(|(w, v)| {
            Ok(Piece {
                interval: Interval::new(w[0].clone(), w[1].clone())?,
                spec: PieceSpec::constant(v.clone()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseFunction::new(domain, pieces)
}

/// 0 on `(a, 0)`, 1 on `(0, b)`.
pub fn heaviside(a: Rational, b: Rational) -> Result<PiecewiseFunction> {
    step_function(Interval::new(a, b)?, &[rational::int(0)], &[rational::int(0), rational::int(1)])
}

/// Values `∓1/2` on `(a, 0)` and `(0, b)`.
pub fn centered_heaviside(a: Rational, b: Rational) -> Result<PiecewiseFunction> {
    step_function(
        Interval::new(a, b)?,
        &[rational::int(0)],
        &[rational::ratio(-1, 2), rational::ratio(1, 2)],
    )
}

/// Piecewise-affine function from `(lo, hi, slope, intercept)` rows.
pub fn affine_function(domain: Interval, rows: &[(Rational, Rational, f64, f64)]) -> Result<PiecewiseFunction> {
    let pieces = rows
        .iter()
        .map(|(lo, hi, m, c)| {
            Ok(Piece {
                interval: Interval::new(lo.clone(), hi.clone())?,
                spec: PieceSpec::Affine {
                    slope: *m,
                    intercept: *c,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseFunction::new(domain, pieces)
}

/// `φ_μ(x) = x - u(x)/μ`, piece by piece.
pub fn build_phi_mu(u: &PiecewiseFunction, mu: f64) -> Result<PiecewiseFunction> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Precondition(format!("μ must be positive, got {mu}")));
    }
    let pieces = u
        .pieces()
        .iter()
        .map(|p| {
            let spec = match &p.spec {
                PieceSpec::Constant(l) => {
                    let c = l.to_f64();
                    if !c.is_finite() {
                        return Err(Error::Domain("level too large for an affine map".into()));
                    }
                    PieceSpec::Affine {
                        slope: 1.0,
                        intercept: -c / mu,
                    }
                }
                PieceSpec::Affine { slope, intercept } => PieceSpec::Affine {
                    slope: 1.0 - slope / mu,
                    intercept: -intercept / mu,
                },
            };
            Ok(Piece {
                interval: p.interval.clone(),
                spec,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseFunction::new(u.domain().clone(), pieces)
}

/// Outcome of checking `μ_{j-1}+3 ≤ |u(y)-u(x)|/|y-x| ≤ μ_j` on `A_i × A_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientBoundsReport {
    pub i: u32,
    pub j: u32,
    pub endpoint_pairs: u64,
    pub interior_pairs: u64,
    pub violations: u64,
    /// `min q / (μ_{j-1}+3)`; at least 1 when the lower bound holds.
    pub lower_ratio: f64,
    /// `max q / μ_j`; at most 1 when the upper bound holds.
    pub upper_ratio: f64,
    /// `k_j - k_{j-1} ≥ μ_{j-1} + 3`.
    pub lower_witness: bool,
    /// `3^j k_j ≤ μ_j`.
    pub upper_witness: bool,
}

impl QuotientBoundsReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.lower_witness && self.upper_witness
    }
}

/// Exhaustive endpoint pairs plus `samples` seeded dyadic interior pairs,
/// all in exact rational arithmetic.
pub fn quotient_bounds_check(seq: &SequencePair, i: u32, j: u32, samples: u64, seed: u64) -> Result<QuotientBoundsReport> {
    let exact = |n: u32| -> Result<Rational> {
        seq.k_exact(n)
            .map(|k| Rational::from_integer(k.clone()))
            .ok_or(Error::ResourceCap {
                what: "exact sequence index",
                needed: n as u64,
                cap: crate::weight::EXACT_INDEX_LIMIT as u64,
            })
    };
    if !(1 <= i && i < j) {
        return Err(Error::Precondition(format!("need 1 ≤ i < j, got i = {i}, j = {j}")));
    }
    let (ki, kj, kj1) = (exact(i)?, exact(j)?, exact(j - 1)?);
    let mu = |n: u32| Rational::from_integer(seq.mu_exact(n).expect("index checked above").clone());
    let lo_bound = mu(j - 1) + rational::int(3);
    let hi_bound = mu(j);
    let jump = (&kj - &ki).abs();

    let ai = interval::cantor_removed(i)?;
    let aj = interval::cantor_removed(j)?;

    let mut report = QuotientBoundsReport {
        i,
        j,
        endpoint_pairs: 0,
        interior_pairs: 0,
        violations: 0,
        lower_ratio: f64::INFINITY,
        upper_ratio: 0.0,
        lower_witness: &kj - &kj1 >= lo_bound,
        upper_witness: Rational::from_integer(rational::pow3(j)) * &kj <= hi_bound,
    };
    let check = |x: &Rational, y: &Rational, report: &mut QuotientBoundsReport| {
        let q = &jump / (y - x).abs();
        if q < lo_bound || q > hi_bound {
            report.violations += 1;
        }
        report.lower_ratio = report.lower_ratio.min(rational::to_f64(&(&q / &lo_bound)));
        report.upper_ratio = report.upper_ratio.max(rational::to_f64(&(&q / &hi_bound)));
    };
    for p in ai.parts() {
        for r in aj.parts() {
            for x in [p.lo(), p.hi()] {
                for y in [r.lo(), r.hi()] {
                    check(x, y, &mut report);
                    report.endpoint_pairs += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let p = &ai.parts()[rng.gen_range(0..ai.len())];
        let r = &aj.parts()[rng.gen_range(0..aj.len())];
        let (x, y) = (dyadic_interior(p, &mut rng), dyadic_interior(r, &mut rng));
        check(&x, &y, &mut report);
        report.interior_pairs += 1;
    }
    Ok(report)
}

/// Uniform dyadic point `lo + (hi-lo)·m/2^30` with `0 < m < 2^30`.
pub fn dyadic_interior(iv: &Interval, rng: &mut ChaCha8Rng) -> Rational {
    const BITS: u32 = 30;
    let m: u64 = rng.gen_range(1..(1u64 << BITS));
    let t = Rational::new(BigInt::from(m), BigInt::from(1u64 << BITS));
    iv.lo() + iv.len() * t
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawSpec {
    Constant {
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    ConstantLog {
        sign: i8,
        log_mag: f64,
    },
    Affine {
        slope: f64,
        intercept: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct RawPiece {
    interval: Interval,
    #[serde(flatten)]
    spec: RawSpec,
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    domain: Interval,
    pieces: Vec<RawPiece>,
}

impl Serialize for PiecewiseFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawFunction {
            domain: self.domain.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| RawPiece {
                    interval: p.interval.clone(),
                    spec: match &p.spec {
                        PieceSpec::Constant(Level { exact: Some(q), .. }) => RawSpec::Constant { value: q.clone() },
                        PieceSpec::Constant(Level { log, exact: None }) => RawSpec::ConstantLog {
                            sign: log.sign(),
                            log_mag: log.log_mag(),
                        },
                        PieceSpec::Affine { slope, intercept } => RawSpec::Affine {
                            slope: *slope,
                            intercept: *intercept,
                        },
                    },
                })
                .collect(),
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFunction::deserialize(d)?;
        let pieces = raw
            .pieces
            .into_iter()
            .map(|p| Piece {
                interval: p.interval,
                spec: match p.spec {
                    RawSpec::Constant { value } => PieceSpec::constant(value),
                    RawSpec::ConstantLog { sign, log_mag } => {
                        PieceSpec::Constant(Level::approx(LogScalar::from_log(sign, log_mag)))
                    }
                    RawSpec::Affine { slope, intercept } => PieceSpec::Affine { slope, intercept },
                },
            })
            .collect();
        PiecewiseFunction::new(raw.domain, pieces).map_err(serde::de::Error::custom)
    }
}
