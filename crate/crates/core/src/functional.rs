//! Truncated evaluation of `∬ ω(|u(y)-u(x)|/|y-x|) / |y-x|` for piecewise
//! functions on an interval, divergence classification, and the Cantor
//! partial sums.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{self, covariogram, Interval};
use crate::logscalar::{LogScalar, DEFAULT_CANCELLATION_THRESHOLD};
use crate::piecewise::{Piece, PieceSpec, PiecewiseFunction};
use crate::quadrature::{self, Estimate, QuadratureConfig};
use crate::rational::{self, Rational};
use crate::weight::{self, SequencePair, Weight};

/// Admissible range of `t = y - x` for a cell integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const ALL: Window = Window {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn from(lo: f64) -> Self {
        Window { lo, hi: f64::INFINITY }
    }
}

/// Widest step in `s = ln t` between forced breakpoints.
const S_STEP: f64 = 2.0;

/// `∬_{X×Y, y-x ∈ window} ω(|u(y)-u(x)|/|y-x|)/|y-x|` for two distinct,
/// disjoint pieces. The value is symmetric in the two pieces.
pub fn pair_contribution(px: &Piece, py: &Piece, w: &Weight, cfg: &QuadratureConfig) -> Result<Estimate> {
    pair_contribution_window(px, py, w, Window::ALL, cfg)
}

pub fn pair_contribution_window(
    px: &Piece,
    py: &Piece,
    w: &Weight,
    window: Window,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let (left, right) = if px.interval.hi() <= py.interval.lo() {
        (px, py)
    } else if py.interval.hi() <= px.interval.lo() {
        (py, px)
    } else {
        return Err(Error::Precondition(format!(
            "cells must be disjoint: {} and {}",
            px.interval, py.interval
        )));
    };
    match (&left.spec, &right.spec) {
        (PieceSpec::Constant(a), PieceSpec::Constant(b)) => {
            let jump = match (&a.exact, &b.exact) {
                (Some(x), Some(y)) => LogScalar::from_rational(&rational::abs(&(y - x))),
                _ => b.log.sub_checked(&a.log, DEFAULT_CANCELLATION_THRESHOLD).0.abs(),
            };
            if jump.is_zero() {
                return Ok(Estimate::default());
            }
            let tent = covariogram(&left.interval, &right.interval);
            tent_integral(jump.log_mag(), &tent.segments(), w, window, cfg)
        }
        _ => affine_cell(left, right, w, window, cfg),
    }
}

/// `∫ ω(Δ/t) λ(t)/t dt` over the window, in `s = ln t`, where `ln_jump = ln Δ`.
pub fn tent_integral(
    ln_jump: f64,
    segments: &[interval::TentSegment],
    w: &Weight,
    window: Window,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let mut total = Estimate::default();
    for seg in segments {
        let ta = seg.t0.max(window.lo);
        let tb = seg.t1.min(window.hi);
        if !(ta < tb) {
            continue;
        }
        if ta <= 0.0 {
            return Err(Error::Precondition(
                "cell touches the diagonal; use a positive truncation".into(),
            ));
        }
        let (sa, sb) = (ta.ln(), tb.ln());
        let mut breaks = vec![sa];
        // kinks of ω(Δ e^{-s}) sit at s = ln Δ - ln μ_joint
        let mut joints: Vec<f64> = w
            .ln_joints_between(ln_jump - sb, ln_jump - sa)
            .into_iter()
            .map(|l| ln_jump - l)
            .collect();
        joints.sort_by(f64::total_cmp);
        let mut x = sa + S_STEP;
        for j in joints {
            while x < j {
                breaks.push(x);
                x += S_STEP;
            }
            breaks.push(j);
        }
        while x < sb {
            breaks.push(x);
            x += S_STEP;
        }
        breaks.push(sb);
        breaks.dedup();
        let seg = *seg;
        let f = |s: f64| w.eval_log(ln_jump - s).to_f64() * seg.eval(s.exp());
        total = total + quadrature::integrate_with_breaks(f, &breaks, cfg)?;
    }
    Ok(total)
}

fn affine_cell(left: &Piece, right: &Piece, w: &Weight, window: Window, cfg: &QuadratureConfig) -> Result<Estimate> {
    let (x0, x1) = (left.interval.lo_f64(), left.interval.hi_f64());
    let (y0, y1) = (right.interval.lo_f64(), right.interval.hi_f64());
    let mut xb = vec![x0, x1];
    for c in [y0 - window.lo, y1 - window.lo, y0 - window.hi, y1 - window.hi] {
        if x0 < c && c < x1 {
            xb.push(c);
        }
    }
    xb.sort_by(f64::total_cmp);
    let ybreaks = |x: f64| {
        let lo = y0.max(x + window.lo);
        let hi = y1.min(x + window.hi);
        if lo < hi {
            vec![lo, hi]
        } else {
            Vec::new()
        }
    };
    let (lu, ru) = (&left.spec, &right.spec);
    let f = |x: f64, y: f64| {
        let t = y - x;
        let q = (ru.eval_f64(y) - lu.eval_f64(x)).abs() / t;
        w.eval(q).unwrap_or(f64::NAN) / t
    };
    quadrature::integrate_2d(f, &xb, ybreaks, cfg)
}

/// Both triangles of a single piece: `2·ω(|m|)·∫ (L-t)/t dt` over the
/// window. Infinite when the window reaches 0 and `ω(|m|) > 0`.
pub fn same_piece_contribution(p: &Piece, w: &Weight, window: Window) -> Result<Estimate> {
    let m = p.spec.slope();
    if m == 0.0 {
        return Ok(Estimate::default());
    }
    let wm = w.eval(m.abs())?;
    if wm == 0.0 {
        return Ok(Estimate::default());
    }
    let len = p.interval.hi_f64() - p.interval.lo_f64();
    let (a, b) = (window.lo, window.hi.min(len));
    if !(a < b) {
        return Ok(Estimate::default());
    }
    if a == 0.0 {
        return Ok(Estimate::exact(f64::INFINITY));
    }
    Ok(Estimate::exact(2.0 * wm * (len * (b / a).ln() - (b - a))))
}

/// Pieces of `u` clipped to `domain`.
fn clipped_pieces(u: &PiecewiseFunction, domain: &Interval) -> Vec<Piece> {
    u.pieces()
        .iter()
        .filter_map(|p| {
            p.interval.intersect(domain).map(|iv| Piece {
                interval: iv,
                spec: p.spec.clone(),
            })
        })
        .collect()
}

/// Value over `Ω×Ω` restricted to `|y-x| ∈ window`: twice the ordered sum.
/// Returns the estimate and the number of cells evaluated.
pub fn evaluate_window(
    u: &PiecewiseFunction,
    w: &Weight,
    domain: &Interval,
    window: Window,
    cfg: &QuadratureConfig,
) -> Result<(Estimate, u64)> {
    let pieces = clipped_pieces(u, domain);
    let n = pieces.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let parts: Vec<Result<Estimate>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            if a == b {
                // already counts both triangles
                same_piece_contribution(&pieces[a], w, window).map(|e| Estimate {
                    value: 0.5 * e.value,
                    error: 0.5 * e.error,
                })
            } else {
                pair_contribution_window(&pieces[a], &pieces[b], w, window, cfg)
            }
        })
        .collect();
    let mut total = Estimate::default();
    for p in parts {
        total = total + p?;
    }
    Ok((
        Estimate {
            value: 2.0 * total.value,
            error: 2.0 * total.error,
        },
        pairs.len() as u64,
    ))
}

/// `F^ε`: the functional with pairs closer than `eps` removed.
pub fn evaluate_truncated(
    u: &PiecewiseFunction,
    w: &Weight,
    domain: &Interval,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let width = domain.hi_f64() - domain.lo_f64();
    if !(eps > 0.0 && eps < width) {
        return Err(Error::Precondition(format!("need 0 < ε < |domain|, got ε = {eps}")));
    }
    Ok(evaluate_window(u, w, domain, Window::from(eps), cfg)?.0)
}

/// `F^ε` by plain 2-D quadrature over every ordered rectangle of the full
/// square, without the factor-2 reduction.
pub fn evaluate_truncated_full_square(
    u: &PiecewiseFunction,
    w: &Weight,
    domain: &Interval,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let pieces = clipped_pieces(u, domain);
    let mut total = Estimate::default();
    for px in &pieces {
        for py in &pieces {
            let (x0, x1) = (px.interval.lo_f64(), px.interval.hi_f64());
            let (y0, y1) = (py.interval.lo_f64(), py.interval.hi_f64());
            let mut xb = vec![x0, x1];
            for c in [y0 - eps, y1 - eps, y0 + eps, y1 + eps] {
                if x0 < c && c < x1 {
                    xb.push(c);
                }
            }
            xb.sort_by(f64::total_cmp);
            let ybreaks = |x: f64| {
                let mut v = vec![y0];
                for c in [x - eps, x + eps] {
                    if y0 < c && c < y1 {
                        v.push(c);
                    }
                }
                v.push(y1);
                v
            };
            let (su, sv) = (&px.spec, &py.spec);
            let f = |x: f64, y: f64| {
                let t = (y - x).abs();
                if t < eps {
                    return 0.0;
                }
                let q = (sv.eval_f64(y) - su.eval_f64(x)).abs() / t;
                w.eval(q).unwrap_or(f64::NAN) / t
            };
            total = total + quadrature::integrate_2d(f, &xb, ybreaks, cfg)?;
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateModel {
    Logarithmic,
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Finite { value: f64, error_bound: f64 },
    Divergent { rate_model: RateModel, slope: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalResult {
    #[serde(flatten)]
    pub kind: Classification,
    /// `(ε, F^ε)` along the schedule.
    pub epsilon_trace: Vec<(f64, f64)>,
    pub cells_evaluated: u64,
}

/// Local-slope ratio at or below which a trace counts as converging.
const DECAY_RATIO: f64 = 0.98;
/// Ratio at or above which a trace counts as growing like a power.
const GROWTH_RATIO: f64 = 1.05;
const MIN_SLOPE: f64 = 1e-3;

/// Geometric schedule `2^{-k}`, `k = k_from..=k_to`.
pub fn dyadic_schedule(k_from: i32, k_to: i32) -> Vec<f64> {
    (k_from..=k_to).map(|k| 2f64.powi(-k)).collect()
}

/// Computes `F^ε` along a decreasing schedule and classifies the trace.
///
/// Slopes are taken against `ln(1/ε)`. Let `σ_k` be the local slopes and
/// look at the later half of them:
/// - all below `max(1e-3, 10·rel_tol·F)`: finite, value `F^{ε_min}`;
/// - successive ratios all `≤ 0.98`: finite, Aitken-extrapolated;
/// - successive ratios all `≥ 1.05`: power-law divergence;
/// - otherwise: logarithmic divergence with the least-squares slope.
///
/// The trace is built from nonnegative slices `ε_k ≤ y-x < ε_{k-1}`, so it is
/// nondecreasing by construction.
pub fn classify(
    u: &PiecewiseFunction,
    w: &Weight,
    domain: &Interval,
    schedule: &[f64],
    cfg: &QuadratureConfig,
) -> Result<FunctionalResult> {
    if schedule.len() < 4 {
        return Err(Error::Precondition("schedule needs at least 4 points".into()));
    }
    if schedule.windows(2).any(|p| p[1] >= p[0]) || schedule[schedule.len() - 1] <= 0.0 {
        return Err(Error::Precondition("schedule must be positive and strictly decreasing".into()));
    }
    let width = domain.hi_f64() - domain.lo_f64();
    if schedule[0] >= width {
        return Err(Error::Precondition("largest ε must be below |domain|".into()));
    }
    let mut trace = Vec::with_capacity(schedule.len());
    let mut cells = 0;
    let mut acc = Estimate::default();
    for (k, &eps) in schedule.iter().enumerate() {
        let window = if k == 0 {
            Window::from(eps)
        } else {
            Window {
                lo: eps,
                hi: schedule[k - 1],
            }
        };
        match evaluate_window(u, w, domain, window, cfg) {
            Ok((e, c)) => {
                acc = acc + e;
                cells += c;
                trace.push((eps, acc.value));
            }
            Err(err @ Error::DidNotConverge { .. }) => {
                return Ok(FunctionalResult {
                    kind: Classification::Inconclusive { reason: err.to_string() },
                    epsilon_trace: trace,
                    cells_evaluated: cells,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FunctionalResult {
        kind: classify_trace(&trace, acc.error, cfg.rel_tol),
        epsilon_trace: trace,
        cells_evaluated: cells,
    })
}

/// Classification of an `(ε, F^ε)` trace; see [`classify`].
pub fn classify_trace(trace: &[(f64, f64)], quad_error: f64, rel_tol: f64) -> Classification {
    let xs: Vec<f64> = trace.iter().map(|p| (1.0 / p.0).ln()).collect();
    let fs: Vec<f64> = trace.iter().map(|p| p.1).collect();
    if fs.iter().any(|f| !f.is_finite()) {
        return Classification::Divergent {
            rate_model: RateModel::Logarithmic,
            slope: f64::INFINITY,
        };
    }
    let slopes: Vec<f64> = (1..fs.len()).map(|k| (fs[k] - fs[k - 1]) / (xs[k] - xs[k - 1])).collect();
    let tail_start = slopes.len() / 2;
    let tail = &slopes[tail_start..];
    let f_last = *fs.last().unwrap();
    let threshold = MIN_SLOPE.max(10.0 * rel_tol * f_last);

    if tail.iter().all(|&s| s <= threshold) {
        let err = quad_error + tail.last().unwrap() * (xs[1] - xs[0]);
        return Classification::Finite {
            value: f_last,
            error_bound: err,
        };
    }
    let ratios: Vec<f64> = tail.windows(2).map(|p| p[1] / p[0]).collect();
    if ratios.iter().all(|&r| r > 0.0 && r <= DECAY_RATIO) {
        let n = fs.len();
        let aitken = |k: usize| {
            let (d1, d2) = (fs[k] - fs[k - 1], fs[k - 1] - fs[k - 2]);
            let denom = d1 - d2;
            if denom == 0.0 {
                fs[k]
            } else {
                fs[k] - d1 * d1 / denom
            }
        };
        let value = aitken(n - 1);
        let error_bound = (value - aitken(n - 2)).abs() + quad_error;
        return Classification::Finite { value, error_bound };
    }
    if ratios.iter().all(|&r| r >= GROWTH_RATIO) {
        let r = *ratios.last().unwrap();
        let dx = xs[xs.len() - 1] - xs[xs.len() - 2];
        return Classification::Divergent {
            rate_model: RateModel::Power,
            slope: r.ln() / dx,
        };
    }
    let (x_tail, f_tail) = (&xs[tail_start..], &fs[tail_start..]);
    Classification::Divergent {
        rate_model: RateModel::Logarithmic,
        slope: least_squares_slope(x_tail, f_tail),
    }
}

pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Ordered-block totals for the Cantor function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockRow {
    pub i: u32,
    pub j: u32,
    /// `∬_{A_i×A_j}` (one ordering).
    pub value: f64,
    /// `exp((ln μ_j)^{1/4}) · ℒ(A_j) · 2j ln 3`.
    pub bound: f64,
    pub cells: u64,
    /// Largest cell value over its own bound `exp((ln μ_j)^{1/4})·|Y|·2j ln 3`.
    pub max_cell_ratio: f64,
    /// The block's quotients were certified to lie in one slow zone of ω.
    pub slow_zone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialSumRow {
    pub j: u32,
    pub s_j: f64,
    pub b_j: f64,
    /// Bound on `4·Σ_{n>j} n²(2/3)ⁿ exp((ln μ_n)^{1/4})`: explicit terms up
    /// to the index where the term ratio settles below 1, then geometric.
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub j_max: u32,
    pub rows: Vec<PartialSumRow>,
    pub blocks: Vec<BlockRow>,
    pub cells_evaluated: u64,
    pub cell_bound_violations: u64,
    pub monotone: bool,
    pub bounded: bool,
    /// Cells inside a single `A_i` contribute nothing.
    pub same_set_zero: bool,
}

/// `S_J = 2 Σ_{j=2}^{J} Σ_{i<j} ∬_{A_i×A_j} ω(|u(y)-u(x)|/|y-x|)/|y-x|`
/// per interval pair, alongside `B_J` and the tail bound.
pub fn counterexample_partial_sum(
    seq: &SequencePair,
    w: &Weight,
    j_max: u32,
    cfg: &QuadratureConfig,
) -> Result<CounterexampleReport> {
    if j_max < 2 {
        return Err(Error::Precondition("J_max must be at least 2".into()));
    }
    let cap = interval::DEFAULT_CANTOR_DEPTH_CAP.min(weight::EXACT_INDEX_LIMIT - 1);
    if j_max > cap || j_max >= seq.n_max() {
        return Err(Error::ResourceCap {
            what: "counterexample depth J_max",
            needed: j_max as u64,
            cap: cap.min(seq.n_max().saturating_sub(1)) as u64,
        });
    }
    let blocks_ij: Vec<(u32, u32)> = (2..=j_max).flat_map(|j| (1..j).map(move |i| (i, j))).collect();
    let blocks = blocks_ij
        .par_iter()
        .map(|&(i, j)| cantor_block(seq, w, i, j, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let (mut s, mut b) = (0.0, 0.0);
    b += 4.0 * seq.series_term(1);
    for j in 2..=j_max {
        s += 2.0 * blocks.iter().filter(|r| r.j == j).map(|r| r.value).sum::<f64>();
        b += 4.0 * seq.series_term(j);
        let tail = weight::series_tail_bound(seq, j)?.map(|t| 4.0 * t);
        rows.push(PartialSumRow {
            j,
            s_j: s,
            b_j: b,
            tail_bound: tail,
        });
    }
    let monotone = rows.windows(2).all(|r| r[1].s_j >= r[0].s_j);
    let bounded = rows
        .iter()
        .all(|r| r.tail_bound.is_some_and(|t| r.s_j <= r.b_j + t));
    let cell_bound_violations = blocks.iter().filter(|r| r.max_cell_ratio > 1.0).count() as u64;
    let same_set_zero = same_set_cells_vanish(seq, w, j_max.min(6), cfg)?;
    Ok(CounterexampleReport {
        j_max,
        cells_evaluated: blocks.iter().map(|r| r.cells).sum(),
        cell_bound_violations,
        rows,
        blocks,
        monotone,
        bounded,
        same_set_zero,
    })
}

fn same_set_cells_vanish(seq: &SequencePair, w: &Weight, n: u32, cfg: &QuadratureConfig) -> Result<bool> {
    for i in 2..=n {
        let parts = interval::cantor_removed(i)?;
        let level = PieceSpec::constant(Rational::from_integer(seq.k_exact(i).expect("small index").clone()));
        let a = Piece {
            interval: parts.parts()[0].clone(),
            spec: level.clone(),
        };
        let b = Piece {
            interval: parts.parts()[parts.len() - 1].clone(),
            spec: level,
        };
        if pair_contribution(&a, &b, w, cfg)?.value != 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One block `A_i × A_j`, `i < j`, cell by cell in a fixed order.
pub fn cantor_block(seq: &SequencePair, w: &Weight, i: u32, j: u32, cfg: &QuadratureConfig) -> Result<BlockRow> {
    let cap = interval::DEFAULT_CANTOR_DEPTH_CAP;
    let ki = seq.k_exact(i).ok_or(Error::Precondition("index beyond exact range".into()))?;
    let kj = seq.k_exact(j).ok_or(Error::Precondition("index beyond exact range".into()))?;
    let jump = rational::abs(&Rational::from_integer(kj - ki));
    // log(k_j - k_i) through the log domain; exact jump only certifies zones
    let (jump_log, _) = seq.k(j).sub_checked(&seq.k(i), DEFAULT_CANCELLATION_THRESHOLD);
    let ln_jump = jump_log.abs().log_mag();

    // all quotients lie in [Δ, 3^j Δ]
    let q_hi = &jump * Rational::from_integer(rational::pow3(j));
    let slow = w.slow_zone_containing(&jump, &q_hi).is_some();

    let ni = interval::cantor_numerators(i, cap)?;
    let nj = interval::cantor_numerators(j, cap)?;
    let scale = 3u64.pow(j - i);
    let den = 3f64.powi(j as i32);
    let long = scale as f64 / den;
    let short = 1.0 / den;
    let e_mu_j = weight::exp_quarter(seq.ln_mu(j));
    let per_cell_bound = e_mu_j * short * 2.0 * j as f64 * 3f64.ln();
    let block_bound = e_mu_j * rational::to_f64(&interval::cantor_removed(j)?.measure()) * 2.0 * j as f64 * 3f64.ln();

    let mut value = 0.0;
    let mut max_ratio: f64 = 0.0;
    for &a in &ni {
        let (x0, x1) = (a * scale, (a + 1) * scale);
        for &c in &nj {
            let (y0, y1) = (c, c + 1);
            // tent breakpoints as integers over 3^j
            let (t0, t3) = if y0 >= x1 { (y0 - x1, y1 - x0) } else { (x0 - y1, x1 - y0) };
            let t = [
                t0 as f64 / den,
                t0 as f64 / den + short,
                t0 as f64 / den + long,
                t3 as f64 / den,
            ];
            let cell = if slow {
                slow_zone_cell(ln_jump, t, short)
            } else {
                let segs = [
                    interval::TentSegment { t0: t[0], t1: t[1], l0: 0.0, l1: short },
                    interval::TentSegment { t0: t[1], t1: t[2], l0: short, l1: short },
                    interval::TentSegment { t0: t[2], t1: t[3], l0: short, l1: 0.0 },
                ];
                tent_integral(ln_jump, &segs, w, Window::ALL, cfg)?.value
            };
            max_ratio = max_ratio.max(cell / per_cell_bound);
            value += cell;
        }
    }
    Ok(BlockRow {
        i,
        j,
        value,
        bound: block_bound,
        cells: (ni.len() * nj.len()) as u64,
        max_cell_ratio: max_ratio,
        slow_zone: slow,
    })
}

/// Panel width in `s = ln t` for the fixed Gauss rule.
const SLOW_PANEL: f64 = 0.5;

/// Cell integral `∫ exp((L - s)^{1/4}) λ(e^s) ds` over the tent with
/// breakpoints `t` and plateau `short`, where `ω = exp((ln μ)^{1/4})` on
/// the whole quotient range.
fn slow_zone_cell(ln_jump: f64, t: [f64; 4], short: f64) -> f64 {
    let g = |s: f64| (ln_jump - s).sqrt().sqrt().exp();
    let mut total = 0.0;
    let pieces: [(f64, f64, f64, f64); 3] = [
        (t[0], t[1], -t[0], 1.0),  // λ = t - t0
        (t[1], t[2], short, 0.0),  // λ = short
        (t[2], t[3], t[3], -1.0),  // λ = t3 - t
    ];
    for (ta, tb, alpha, beta) in pieces {
        if !(ta < tb) {
            continue;
        }
        let (sa, sb) = (ta.ln(), tb.ln());
        let n = ((sb - sa) / SLOW_PANEL).ceil().max(1.0) as usize;
        let h = (sb - sa) / n as f64;
        for k in 0..n {
            let a = sa + k as f64 * h;
            let b = if k + 1 == n { sb } else { a + h };
            total += quadrature::gauss7(|s| (alpha + beta * s.exp()).max(0.0) * g(s), a, b);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{affine_function, heaviside, step_function};
    use crate::rational::int;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn constant_piece(lo: i64, hi: i64, v: i64) -> Piece {
        Piece {
            interval: Interval::from_ints(lo, hi).unwrap(),
            spec: PieceSpec::constant(int(v)),
        }
    }

    #[test]
    fn zero_jump_cells_vanish() {
        let e = pair_contribution(&constant_piece(0, 1, 3), &constant_piece(2, 3, 3), &Weight::Linear, &cfg()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn linear_weight_unit_cell() {
        let e = pair_contribution(&constant_piece(0, 1, 0), &constant_piece(2, 3, 1), &Weight::Linear, &cfg()).unwrap();
        assert!((e.value - (4.0f64 / 3.0).ln()).abs() < 1e-10, "{e:?}");
        // symmetric in the arguments
        let f = pair_contribution(&constant_piece(2, 3, 1), &constant_piece(0, 1, 0), &Weight::Linear, &cfg()).unwrap();
        assert_eq!(e.value, f.value);
    }

    #[test]
    fn overlapping_cells_rejected() {
        assert!(pair_contribution(&constant_piece(0, 2, 0), &constant_piece(1, 3, 1), &Weight::Linear, &cfg()).is_err());
    }

    #[test]
    fn affine_cell_matches_constant_cell() {
        // slope-0 affine pieces take the 2-D path
        let a = Piece {
            interval: Interval::from_ints(0, 1).unwrap(),
            spec: PieceSpec::Affine { slope: 0.0, intercept: 0.0 },
        };
        let b = Piece {
            interval: Interval::from_ints(2, 3).unwrap(),
            spec: PieceSpec::Affine { slope: 0.0, intercept: 1.0 },
        };
        let e = pair_contribution(&a, &b, &Weight::Linear, &cfg()).unwrap();
        assert!((e.value - (4.0f64 / 3.0).ln()).abs() < 1e-9);
    }

    #[test]
    fn constant_function_gives_zero() {
        let u = step_function(Interval::from_ints(0, 2).unwrap(), &[int(1)], &[int(4), int(4)]).unwrap();
        for eps in [0.5, 0.1, 1e-4] {
            let e = evaluate_truncated(&u, &Weight::Linear, u.domain(), eps, &cfg()).unwrap();
            assert_eq!(e.value, 0.0);
        }
    }

    #[test]
    fn heaviside_sqrt_truncated_closed_form() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let w = Weight::power_law(0.5).unwrap();
        for eps in [0.5, 0.1, 1e-3, 1e-6] {
            let e = evaluate_truncated(&h, &w, h.domain(), eps, &cfg()).unwrap();
            let oracle = 16.0 - 8.0 * 2f64.sqrt() - 4.0 * f64::sqrt(eps);
            assert!((e.value - oracle).abs() < 1e-8, "ε = {eps}: {} vs {oracle}", e.value);
        }
    }

    #[test]
    fn heaviside_linear_truncated_closed_form() {
        let h = heaviside(int(-1), int(1)).unwrap();
        for eps in [0.5, 1e-2, 1e-5] {
            let e = evaluate_truncated(&h, &Weight::Linear, h.domain(), eps, &cfg()).unwrap();
            let oracle = 2.0 * ((1.0 / eps).ln() + 1.0 - 2f64.ln());
            assert!((e.value - oracle).abs() < 1e-8, "ε = {eps}");
        }
    }

    #[test]
    fn general_power_truncation_limit() {
        // 2[1/(1-θ) + 2(1-2^{-θ})/θ - (2^{1-θ}-1)/(1-θ)] is the ε → 0 limit
        let h = heaviside(int(-1), int(1)).unwrap();
        for theta in [0.25, 0.75] {
            let w = Weight::power_law(theta).unwrap();
            let eps = 1e-9;
            let e = evaluate_truncated(&h, &w, h.domain(), eps, &cfg()).unwrap();
            let limit = 2.0
                * (1.0 / (1.0 - theta) + 2.0 * (1.0 - 2f64.powf(-theta)) / theta
                    - (2f64.powf(1.0 - theta) - 1.0) / (1.0 - theta));
            // missing piece 2∫_0^ε t^{-θ} dt
            let missing = 2.0 * eps.powf(1.0 - theta) / (1.0 - theta);
            assert!((e.value + missing - limit).abs() < 1e-8, "θ = {theta}");
        }
    }

    #[test]
    fn truncation_rejects_bad_eps() {
        let h = heaviside(int(-1), int(1)).unwrap();
        assert!(evaluate_truncated(&h, &Weight::Linear, h.domain(), 0.0, &cfg()).is_err());
        assert!(evaluate_truncated(&h, &Weight::Linear, h.domain(), 3.0, &cfg()).is_err());
    }

    #[test]
    fn same_piece_affine_formula() {
        let p = Piece {
            interval: Interval::from_ints(0, 1).unwrap(),
            spec: PieceSpec::Affine { slope: 2.0, intercept: 0.0 },
        };
        let e = same_piece_contribution(&p, &Weight::Linear, Window::from(0.01)).unwrap();
        assert!((e.value - 4.0 * ((100f64).ln() - 0.99)).abs() < 1e-12);
        assert!(same_piece_contribution(&p, &Weight::Linear, Window::ALL).unwrap().value.is_infinite());
    }

    #[test]
    fn ordered_sum_matches_full_square() {
        let fixtures = vec![
            (heaviside(int(-1), int(1)).unwrap(), Weight::power_law(0.5).unwrap(), 0.05),
            (
                step_function(Interval::from_ints(0, 3).unwrap(), &[int(1), int(2)], &[int(0), int(2), int(-1)]).unwrap(),
                Weight::Linear,
                0.1,
            ),
            (
                affine_function(
                    Interval::from_ints(0, 2).unwrap(),
                    &[(int(0), int(1), 1.0, 0.0), (int(1), int(2), -1.0, 3.0)],
                )
                .unwrap(),
                Weight::power_law(1.5).unwrap(),
                0.2,
            ),
        ];
        let tight = QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_subdivisions: 20_000,
            ..Default::default()
        };
        for (u, w, eps) in fixtures {
            let a = evaluate_truncated(&u, &w, u.domain(), eps, &tight).unwrap().value;
            let b = evaluate_truncated_full_square(&u, &w, u.domain(), eps, &tight).unwrap().value;
            assert!((a - b).abs() <= 1e-10 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn classify_sqrt_finite() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let r = classify(&h, &Weight::power_law(0.5).unwrap(), h.domain(), &dyadic_schedule(6, 20), &cfg()).unwrap();
        match r.kind {
            Classification::Finite { value, .. } => {
                assert!((value - (16.0 - 8.0 * 2f64.sqrt())).abs() < 1e-4, "{value}")
            }
            other => panic!("{other:?}"),
        }
        assert!(r.epsilon_trace.windows(2).all(|p| p[1].1 >= p[0].1));
    }

    #[test]
    fn classify_linear_divergent() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let r = classify(&h, &Weight::Linear, h.domain(), &dyadic_schedule(6, 20), &cfg()).unwrap();
        match r.kind {
            Classification::Divergent { rate_model: RateModel::Logarithmic, slope } => {
                assert!((slope - 2.0).abs() < 0.1, "{slope}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_power_divergent() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let r = classify(&h, &Weight::power_law(2.0).unwrap(), h.domain(), &dyadic_schedule(6, 20), &cfg()).unwrap();
        assert!(matches!(r.kind, Classification::Divergent { rate_model: RateModel::Power, .. }), "{:?}", r.kind);
    }

    #[test]
    fn classify_lipschitz_divergent() {
        let u = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 1.0, 0.0)]).unwrap();
        let r = classify(&u, &Weight::power_law(0.5).unwrap(), u.domain(), &dyadic_schedule(6, 20), &cfg()).unwrap();
        match r.kind {
            // 2ω(1)(ln(1/ε) - 1 + ε)
            Classification::Divergent { slope, .. } => assert!((slope - 2.0).abs() < 0.01, "{slope}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_counterexample_weight_divergent() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let w = Weight::counterexample(SequencePair::standard(64)).unwrap();
        let r = classify(&h, &w, h.domain(), &dyadic_schedule(6, 20), &cfg()).unwrap();
        assert!(matches!(r.kind, Classification::Divergent { .. }), "{:?}", r.kind);
    }

    #[test]
    fn classify_schedule_validation() {
        let h = heaviside(int(-1), int(1)).unwrap();
        assert!(classify(&h, &Weight::Linear, h.domain(), &[0.1, 0.05, 0.01], &cfg()).is_err());
        assert!(classify(&h, &Weight::Linear, h.domain(), &[0.1, 0.2, 0.01, 0.001], &cfg()).is_err());
    }

    #[test]
    fn slow_cell_matches_adaptive_quadrature() {
        let seq = SequencePair::standard(64);
        let w = Weight::counterexample(seq.clone()).unwrap();
        let (i, j) = (2u32, 4u32);
        let ln_jump = seq.k(j).sub(&seq.k(i)).log_mag();
        let den = 81.0;
        let t = [1.0 / den, 2.0 / den, 1.0 / den + 9.0 / den, 11.0 / den];
        let fast = slow_zone_cell(ln_jump, t, 1.0 / den);
        let segs = [
            interval::TentSegment { t0: t[0], t1: t[1], l0: 0.0, l1: 1.0 / den },
            interval::TentSegment { t0: t[1], t1: t[2], l0: 1.0 / den, l1: 1.0 / den },
            interval::TentSegment { t0: t[2], t1: t[3], l0: 1.0 / den, l1: 0.0 },
        ];
        let slow = tent_integral(ln_jump, &segs, &w, Window::ALL, &cfg()).unwrap().value;
        assert!((fast - slow).abs() < 1e-12 * slow, "{fast} vs {slow}");
    }

    #[test]
    fn cantor_block_fast_path_matches_exact_cells() {
        let seq = SequencePair::standard(64);
        let w = Weight::counterexample(seq.clone()).unwrap();
        let block = cantor_block(&seq, &w, 2, 3, &cfg()).unwrap();
        assert!(block.slow_zone);
        let a2 = interval::cantor_removed(2).unwrap();
        let a3 = interval::cantor_removed(3).unwrap();
        let k = |n: u32| PieceSpec::constant(Rational::from_integer(seq.k_exact(n).unwrap().clone()));
        let mut total = 0.0;
        for p in a2.parts() {
            for q in a3.parts() {
                let a = Piece { interval: p.clone(), spec: k(2) };
                let b = Piece { interval: q.clone(), spec: k(3) };
                total += pair_contribution(&a, &b, &w, &cfg()).unwrap().value;
            }
        }
        assert!((block.value - total).abs() < 1e-10 * total);
        assert!(block.value <= block.bound);
    }

    #[test]
    fn partial_sums_small_depth() {
        let seq = SequencePair::standard(64);
        let w = Weight::counterexample(seq.clone()).unwrap();
        let r = counterexample_partial_sum(&seq, &w, 6, &cfg()).unwrap();
        assert!(r.monotone && r.bounded && r.same_set_zero, "{:?}", (r.monotone, r.bounded, r.same_set_zero, &r.rows));
        assert_eq!(r.cell_bound_violations, 0);
        assert_eq!(r.rows.len(), 5);
        assert!(r.blocks.iter().all(|b| b.slow_zone && b.value <= b.bound));
    }

    #[test]
    fn partial_sum_depth_cap() {
        let seq = SequencePair::standard(64);
        let w = Weight::counterexample(seq.clone()).unwrap();
        assert!(matches!(
            counterexample_partial_sum(&seq, &w, 30, &cfg()),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn non_slow_sequences_take_the_general_path() {
        let seq = SequencePair::new(crate::weight::SequenceKind::Small, 64).unwrap();
        let w = Weight::counterexample(seq.clone()).unwrap();
        let r = counterexample_partial_sum(&seq, &w, 4, &cfg()).unwrap();
        assert!(r.blocks.iter().any(|b| !b.slow_zone));
        assert!(r.monotone);
    }

    #[test]
    fn least_squares_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        assert!((least_squares_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}
