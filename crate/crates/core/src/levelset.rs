//! Difference-quotient regions `Z(φ, A, E)`, level sets and cumulative
//! distributions of piecewise-affine maps, and the band density `γ(μ)`.

use num::traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{make_union, Interval, IntervalUnion};
use crate::piecewise::{build_phi_mu, PieceSpec, PiecewiseFunction};
use crate::quadrature::{self, Estimate, QuadratureConfig};
use crate::rational::{self, Rational};
use crate::weight::Weight;

/// Quotient band `E = [q_lo, q_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZBand {
    q_lo: Rational,
    q_hi: Rational,
}

impl ZBand {
    pub fn new(q_lo: Rational, q_hi: Rational) -> Result<Self> {
        if q_lo > q_hi {
            return Err(Error::Precondition(format!(
                "band [{}, {}] is reversed",
                rational::format(&q_lo),
                rational::format(&q_hi)
            )));
        }
        Ok(ZBand { q_lo, q_hi })
    }

    pub fn from_f64(q_lo: f64, q_hi: f64) -> Result<Self> {
        Self::new(rational::from_f64(q_lo)?, rational::from_f64(q_hi)?)
    }

    pub fn q_lo(&self) -> &Rational {
        &self.q_lo
    }

    pub fn q_hi(&self) -> &Rational {
        &self.q_hi
    }

    fn contains(&self, q: &Rational) -> bool {
        &self.q_lo <= q && q <= &self.q_hi
    }
}

type Point = (Rational, Rational);

/// Convex polygon in the `(x, y)` plane, counterclockwise, on or above the
/// diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCell {
    vertices: Vec<Point>,
}

/// Half-plane `a·x + b·y + c ≥ 0`.
#[derive(Clone, Debug)]
struct HalfPlane {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl HalfPlane {
    fn value(&self, p: &Point) -> Rational {
        &self.a * &p.0 + &self.b * &p.1 + &self.c
    }
}

impl ConvexCell {
    /// Closed rectangle `[x0, x1] × [y0, y1]`.
    fn rectangle(x: &Interval, y: &Interval) -> Self {
        ConvexCell {
            vertices: vec![
                (x.lo().clone(), y.lo().clone()),
                (x.hi().clone(), y.lo().clone()),
                (x.hi().clone(), y.hi().clone()),
                (x.lo().clone(), y.hi().clone()),
            ],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Sutherland–Hodgman step with exact sign tests. `None` once the
    /// polygon has no interior.
    fn clip(self, h: &HalfPlane) -> Option<Self> {
        let n = self.vertices.len();
        let vals: Vec<Rational> = self.vertices.iter().map(|p| h.value(p)).collect();
        let mut out: Vec<Point> = Vec::with_capacity(n + 1);
        for k in 0..n {
            let (p, q) = (&self.vertices[k], &self.vertices[(k + 1) % n]);
            let (fp, fq) = (&vals[k], &vals[(k + 1) % n]);
            if !fp.is_negative() {
                out.push(p.clone());
            }
            if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
                let s = fp / (fp - fq);
                out.push((&p.0 + &s * (&q.0 - &p.0), &p.1 + &s * (&q.1 - &p.1)));
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        let cell = ConvexCell { vertices: out };
        (cell.vertices.len() >= 3 && cell.twice_area().is_positive()).then_some(cell)
    }

    fn twice_area(&self) -> Rational {
        let n = self.vertices.len();
        (0..n)
            .map(|k| {
                let (p, q) = (&self.vertices[k], &self.vertices[(k + 1) % n]);
                &p.0 * &q.1 - &q.0 * &p.1
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn area(&self) -> Rational {
        self.twice_area() / rational::int(2)
    }

    /// `∬ 1/(y-x)` over the cell, slab by slab: on each vertical slab the
    /// cell is `l(x) ≤ y ≤ h(x)` with affine ends, and the inner integral
    /// is `ln(h(x)-x) - ln(l(x)-x)`, integrated in closed form.
    pub fn integral_inv_gap(&self) -> f64 {
        let mut xs: Vec<&Rational> = self.vertices.iter().map(|p| &p.0).collect();
        xs.sort();
        xs.dedup();
        let mut total = 0.0;
        for w in xs.windows(2) {
            let (xa, xb) = (w[0], w[1]);
            let (lo_a, hi_a) = self.section(xa, xb, true);
            let (lo_b, hi_b) = self.section(xa, xb, false);
            let width = rational::to_f64(&(xb - xa));
            let gap = |y: &Rational, x: &Rational| rational::to_f64(&(y - x));
            total += width
                * (mean_log(gap(&hi_a, xa), gap(&hi_b, xb)) - mean_log(gap(&lo_a, xa), gap(&lo_b, xb)));
        }
        total
    }

    /// Lower and upper `y` on the slab `[xa, xb]`, at its left end when
    /// `left`, from the edges spanning the whole slab.
    fn section(&self, xa: &Rational, xb: &Rational, left: bool) -> (Rational, Rational) {
        let at = if left { xa } else { xb };
        let n = self.vertices.len();
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for k in 0..n {
            let (p, q) = (&self.vertices[k], &self.vertices[(k + 1) % n]);
            let (l, r) = if p.0 <= q.0 { (p, q) } else { (q, p) };
            if l.0 == r.0 || &l.0 > xa || &r.0 < xb {
                continue;
            }
            let y = &l.1 + (&r.1 - &l.1) * ((at - &l.0) / (&r.0 - &l.0));
            lo = Some(match lo {
                Some(v) if v <= y => v,
                _ => y.clone(),
            });
            hi = Some(match hi {
                Some(v) if v >= y => v,
                _ => y,
            });
        }
        (lo.expect("convex slab has two edges"), hi.expect("convex slab has two edges"))
    }

    /// Same integral by adaptive 2-D quadrature.
    pub fn integral_inv_gap_quadrature(&self, cfg: &QuadratureConfig) -> Result<Estimate> {
        let mut xs: Vec<f64> = self.vertices.iter().map(|p| rational::to_f64(&p.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let verts: Vec<(f64, f64)> = self
            .vertices
            .iter()
            .map(|p| (rational::to_f64(&p.0), rational::to_f64(&p.1)))
            .collect();
        let n = verts.len();
        let ybreaks = |x: f64| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..n {
                let (p, q) = (verts[k], verts[(k + 1) % n]);
                let (l, r) = if p.0 <= q.0 { (p, q) } else { (q, p) };
                if l.0 <= x && x <= r.0 && r.0 > l.0 {
                    let y = l.1 + (r.1 - l.1) * (x - l.0) / (r.0 - l.0);
                    lo = lo.min(y);
                    hi = hi.max(y);
                }
            }
            if lo < hi {
                vec![lo, hi]
            } else {
                Vec::new()
            }
        };
        quadrature::integrate_2d(|x, y| 1.0 / (y - x), &xs, ybreaks, cfg)
    }
}

/// `∫_0^1 ln(a + (b-a)s) ds` for `a, b ≥ 0`.
fn mean_log(a: f64, b: f64) -> f64 {
    let xlx = |v: f64| if v == 0.0 { 0.0 } else { v * v.ln() };
    if (b - a).abs() <= 1e-3 * a.max(b) {
        return quadrature::gauss7(|s| (a + (b - a) * s).ln(), 0.0, 1.0);
    }
    (xlx(b) - b - xlx(a) + a) / (b - a)
}

/// Exact slope and intercept of a piece.
fn exact_coefficients(spec: &PieceSpec) -> Result<(Rational, Rational)> {
    match spec {
        PieceSpec::Constant(l) => l
            .exact
            .clone()
            .map(|c| (Rational::zero(), c))
            .ok_or_else(|| Error::Precondition("piece level has no exact value".into())),
        PieceSpec::Affine { slope, intercept } => Ok((rational::from_f64(*slope)?, rational::from_f64(*intercept)?)),
    }
}

/// A piece of `φ` clipped to one part of `A`.
#[derive(Clone, Debug)]
struct Cell {
    interval: Interval,
    slope: Rational,
    intercept: Rational,
    piece: usize,
}

fn cells_on(phi: &PiecewiseFunction, a: &IntervalUnion) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for (k, p) in phi.pieces().iter().enumerate() {
        for part in a.parts() {
            if let Some(iv) = p.interval.intersect(part) {
                let (slope, intercept) = exact_coefficients(&p.spec)?;
                cells.push(Cell {
                    interval: iv,
                    slope,
                    intercept,
                    piece: k,
                });
            }
        }
    }
    cells.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    Ok(cells)
}

/// Part of `Z(φ, A, band)` over `X × Y` with `X` left of `Y`.
fn pair_region(x: &Cell, y: &Cell, band: &ZBand) -> Option<ConvexCell> {
    // φ(y) - φ(x) - q(y - x) = (m_y - q) y - (m_x - q) x + (b_y - b_x)
    let db = &y.intercept - &x.intercept;
    let lower = HalfPlane {
        a: -(&x.slope - &band.q_lo),
        b: &y.slope - &band.q_lo,
        c: db.clone(),
    };
    let upper = HalfPlane {
        a: &x.slope - &band.q_hi,
        b: -(&y.slope - &band.q_hi),
        c: -db,
    };
    ConvexCell::rectangle(&x.interval, &y.interval).clip(&lower)?.clip(&upper)
}

/// Convex pieces of `Z(φ, A, band)`, one per ordered cell pair.
pub fn z_region_cells(phi: &PiecewiseFunction, a: &IntervalUnion, band: &ZBand) -> Result<Vec<ConvexCell>> {
    let cells = cells_on(phi, a)?;
    for c in &cells {
        if band.contains(&c.slope) {
            return Err(Error::DiagonalContact {
                piece: c.piece,
                slope: rational::to_f64(&c.slope),
                q_lo: rational::to_f64(&band.q_lo),
                q_hi: rational::to_f64(&band.q_hi),
            });
        }
    }
    let pairs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|i| (i + 1..cells.len()).map(move |j| (i, j)))
        .collect();
    Ok(pairs
        .par_iter()
        .filter_map(|&(i, j)| pair_region(&cells[i], &cells[j], band))
        .collect())
}

/// `∬_{Z(φ, A, band)} 1/(y-x)`.
pub fn z_region_integral(phi: &PiecewiseFunction, a: &IntervalUnion, band: &ZBand) -> Result<f64> {
    Ok(z_region_cells(phi, a, band)?.iter().map(ConvexCell::integral_inv_gap).sum())
}

/// Cross-check of [`z_region_integral`] by 2-D quadrature on each cell.
pub fn z_region_integral_quadrature(
    phi: &PiecewiseFunction,
    a: &IntervalUnion,
    band: &ZBand,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    z_region_cells(phi, a, band)?
        .iter()
        .map(|c| c.integral_inv_gap_quadrature(cfg))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiminfEstimate {
    /// `(δ, (1/δ)∬_{Z(φ,A,[0,δ])} 1/(y-x))`.
    pub trace: Vec<(f64, f64)>,
    /// Minimum over the final third of the trace.
    pub value: f64,
}

/// Finite-δ surrogate for `liminf_{δ→0} (1/δ)∬_{Z(φ,A,[0,δ])} 1/(y-x)`.
pub fn liminf_estimate(phi: &PiecewiseFunction, a: &IntervalUnion, schedule: &[f64]) -> Result<LiminfEstimate> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|&d| d <= 0.0) {
        return Err(Error::Precondition("δ schedule must be positive and strictly decreasing".into()));
    }
    let trace = schedule
        .iter()
        .map(|&d| Ok((d, z_region_integral(phi, a, &ZBand::from_f64(0.0, d)?)? / d)))
        .collect::<Result<Vec<_>>>()?;
    let start = trace.len() - trace.len().div_ceil(3);
    let value = trace[start..].iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(LiminfEstimate { trace, value })
}

/// Default δ schedule `2^{-k}`, `k = 8..=20`.
pub fn default_delta_schedule() -> Vec<f64> {
    (8..=20).map(|k| 2f64.powi(-k)).collect()
}

/// Image of `φ` restricted to `A`, as an exact union.
pub fn image(phi: &PiecewiseFunction, a: &IntervalUnion) -> Result<IntervalUnion> {
    let mut parts = Vec::new();
    for c in cells_on(phi, a)? {
        if c.slope.is_zero() {
            continue;
        }
        let f = |x: &Rational| &c.slope * x + &c.intercept;
        let (u, v) = (f(c.interval.lo()), f(c.interval.hi()));
        parts.push(if u < v { Interval::new(u, v)? } else { Interval::new(v, u)? });
    }
    Ok(make_union(parts))
}

/// Inner measure of `φ(A)`. Images of finitely many affine pieces are
/// finite unions, so this is their measure.
pub fn image_inner_measure(phi: &PiecewiseFunction, a: &IntervalUnion) -> Result<Rational> {
    Ok(image(phi, a)?.measure())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocVsGlobReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub trace: Vec<(f64, f64)>,
}

/// Compares the liminf surrogate with `ℒ(A) - ℒ_*(φ(A))`; passes when
/// `lhs ≥ rhs - rel_tol·|rhs|`.
pub fn loc_vs_glob_check(
    phi: &PiecewiseFunction,
    a: &IntervalUnion,
    schedule: &[f64],
    rel_tol: f64,
) -> Result<LocVsGlobReport> {
    for c in cells_on(phi, a)? {
        if c.slope.abs() < rational::int(1) {
            return Err(Error::Precondition(format!(
                "slope {} on piece {} is below 1 in magnitude",
                rational::format(&c.slope),
                c.piece
            )));
        }
    }
    let est = liminf_estimate(phi, a, schedule)?;
    let rhs = rational::to_f64(&(a.measure() - image_inner_measure(phi, a)?));
    let tolerance = rel_tol * rhs.abs();
    Ok(LocVsGlobReport {
        lhs: est.value,
        rhs,
        margin: est.value - rhs,
        tolerance,
        pass: est.value >= rhs - tolerance,
        trace: est.trace,
    })
}

/// `M(I, z) = ℒ{x ∈ I ∩ K : g(x) ≤ z}` for a piecewise-affine `g`.
#[derive(Clone, Debug)]
pub struct CumulativeDistribution {
    g: PiecewiseFunction,
    k: IntervalUnion,
    i: Interval,
    cells: Vec<Cell>,
}

impl CumulativeDistribution {
    /// `g` must have nonzero exact slopes on every piece meeting `K`.
    pub fn new(g: PiecewiseFunction, k: IntervalUnion, i: Interval) -> Result<Self> {
        let cells = cells_on(&g, &k)?;
        if let Some(c) = cells.iter().find(|c| c.slope.is_zero()) {
            return Err(Error::Precondition(format!("g is flat on piece {} inside K", c.piece)));
        }
        Ok(CumulativeDistribution { g, k, i, cells })
    }

    pub fn g(&self) -> &PiecewiseFunction {
        &self.g
    }

    pub fn k(&self) -> &IntervalUnion {
        &self.k
    }

    pub fn i(&self) -> &Interval {
        &self.i
    }

    /// Cells of `g` on `K ∩ I`.
    fn cells_in_i(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().filter_map(|c| {
            c.interval.intersect(&self.i).map(|iv| Cell {
                interval: iv,
                ..c.clone()
            })
        })
    }

    /// Limit of `M(I, z)` as `z → +∞`.
    pub fn total_mass(&self) -> Rational {
        self.cells_in_i().map(|c| c.interval.len()).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn value(&self, z: &Rational) -> Rational {
        let mut total = Rational::zero();
        for c in self.cells_in_i() {
            let root = (z - &c.intercept) / &c.slope;
            let (lo, hi) = (c.interval.lo(), c.interval.hi());
            // sublevel set is (lo, root] for increasing pieces, [root, hi) otherwise
            let part = if c.slope.is_positive() {
                rational::min(&root, hi) - lo
            } else {
                hi - rational::max(&root, lo)
            };
            if part.is_positive() {
                total += part;
            }
        }
        total
    }

    /// Images of the endpoints of every cell of `g` on `K ∩ I`, sorted.
    pub fn exceptional_values(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .cells_in_i()
            .flat_map(|c| {
                let f = |x: &Rational| &c.slope * x + &c.intercept;
                [f(c.interval.lo()), f(c.interval.hi())]
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_regular(&self, z: &Rational) -> bool {
        self.exceptional_values().binary_search(z).is_err()
    }

    /// Points of `K ∩ I` where `g = z`, with `|g'|` there.
    fn level_points_in_i(&self, z: &Rational) -> Vec<(Rational, Rational)> {
        let mut pts: Vec<(Rational, Rational)> = self
            .cells_in_i()
            .filter_map(|c| {
                let x = (z - &c.intercept) / &c.slope;
                (c.interval.lo() <= &x && &x <= c.interval.hi()).then(|| (x, c.slope.abs()))
            })
            .collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        pts
    }
}

/// Exact solutions of `g(x) = z` in the closure of `K`.
pub fn level_set(g: &PiecewiseFunction, k: &IntervalUnion, z: &Rational) -> Result<Vec<Rational>> {
    let mut pts = Vec::new();
    for c in cells_on(g, k)? {
        if c.slope.is_zero() {
            return Err(Error::Precondition(format!("g is flat on piece {} inside K", c.piece)));
        }
        let x = (z - &c.intercept) / &c.slope;
        if c.interval.closure_contains(&x) {
            pts.push(x);
        }
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

pub fn cumulative_value(cd: &CumulativeDistribution, z: &Rational) -> Rational {
    cd.value(z)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub z: f64,
    /// `(h, (M(z+h) - M(z-h)) / 2h)`, exact quotients rounded at the end.
    pub finite_differences: Vec<(f64, f64)>,
    /// `Σ 1/|g'(x_i)|` over the level set inside `I`.
    pub formula: f64,
    pub gap: f64,
}

/// Centered finite differences of `M(I, ·)` at a regular `z` against the
/// level-set formula.
pub fn cumulative_derivative(cd: &CumulativeDistribution, z: &Rational, h_schedule: &[Rational]) -> Result<DerivativeReport> {
    if !cd.is_regular(z) {
        return Err(Error::ExceptionalValue(rational::format(z)));
    }
    if h_schedule.is_empty() || h_schedule.iter().any(|h| !h.is_positive()) {
        return Err(Error::Precondition("finite-difference steps must be positive".into()));
    }
    let formula: Rational = cd
        .level_points_in_i(z)
        .iter()
        .map(|(_, m)| m.recip())
        .fold(Rational::zero(), |a, b| a + b);
    let finite_differences: Vec<(f64, f64)> = h_schedule
        .iter()
        .map(|h| {
            let fd = (cd.value(&(z + h)) - cd.value(&(z - h))) / (rational::int(2) * h);
            (rational::to_f64(h), rational::to_f64(&fd))
        })
        .collect();
    let formula = rational::to_f64(&formula);
    let gap = (finite_differences.last().expect("nonempty").1 - formula).abs();
    Ok(DerivativeReport {
        z: rational::to_f64(z),
        finite_differences,
        formula,
        gap,
    })
}

/// `Σ_{i<j} 1/(|g'(x_i)||g'(x_j)|)` over the level set; 0 with fewer than two
/// points.
pub fn p_of_z(g: &PiecewiseFunction, k: &IntervalUnion, z: &Rational) -> Result<Rational> {
    let cd = CumulativeDistribution::new(g.clone(), k.clone(), k.hull().ok_or(Error::Precondition("K is empty".into()))?)?;
    let r: Vec<Rational> = cd.level_points_in_i(z).into_iter().map(|(_, m)| m.recip()).collect();
    Ok(pairwise_products(&r))
}

fn pairwise_products(r: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    let mut prefix = Rational::zero();
    for v in r {
        total += &prefix * v;
        prefix += v;
    }
    total
}

/// `P(z) - [M'(I, z) - 1]₊` at a regular `z`, exact. Requires `|g'| ≥ 1`.
pub fn p_dominates_m_margin(cd: &CumulativeDistribution, z: &Rational) -> Result<Rational> {
    if !cd.is_regular(z) {
        return Err(Error::ExceptionalValue(rational::format(z)));
    }
    let pts = cd.level_points_in_i(z);
    if pts.iter().any(|(_, m)| m < &rational::int(1)) {
        return Err(Error::Precondition("needs |g'| ≥ 1 at the level set".into()));
    }
    let r: Vec<Rational> = pts.iter().map(|(_, m)| m.recip()).collect();
    let m_prime = r.iter().fold(Rational::zero(), |a, b| a + b);
    let excess = rational::max(&(m_prime - rational::int(1)), &Rational::zero());
    Ok(pairwise_products(&r) - excess)
}

/// `Σ_{i<j} r_i r_j - (S - 1)` for `r ∈ [0,1]^m`, `m ≥ 2`, `S ≥ 1`.
pub fn olimpico_check(r: &[f64]) -> Result<f64> {
    if r.len() < 2 {
        return Err(Error::Precondition("need at least two numbers".into()));
    }
    if r.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::Precondition("entries must lie in [0, 1]".into()));
    }
    let s: f64 = r.iter().sum();
    if s < 1.0 {
        return Err(Error::Precondition(format!("sum {s} is below 1")));
    }
    let (mut pairs, mut prefix) = (0.0, 0.0);
    for v in r {
        pairs += prefix * v;
        prefix += v;
    }
    Ok(pairs - (s - 1.0))
}

/// Exact variant of [`olimpico_check`].
pub fn olimpico_check_exact(r: &[Rational]) -> Result<Rational> {
    if r.len() < 2 {
        return Err(Error::Precondition("need at least two numbers".into()));
    }
    let one = rational::int(1);
    if r.iter().any(|v| v.is_negative() || v > &one) {
        return Err(Error::Precondition("entries must lie in [0, 1]".into()));
    }
    let s = r.iter().fold(Rational::zero(), |a, b| a + b);
    if s < one {
        return Err(Error::Precondition("sum is below 1".into()));
    }
    Ok(pairwise_products(r) - (s - one))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub mu: f64,
    pub delta: f64,
    /// `∬_{Z(u, Ω, [μ-δ, μ])} 1/(y-x)`.
    pub region_integral: f64,
    /// `ω(μ - δ/2)` times the region integral, over `δ`.
    pub value: f64,
    /// Same with `min ω` and `max ω` over the band.
    pub lower: f64,
    pub upper: f64,
}

/// `(1/δ)∬_{Z(u, Ω, [μ-δ, μ])} ω(Ru)/(y-x)` for piecewise-constant `u`.
pub fn gamma_estimate(u: &PiecewiseFunction, domain: &Interval, w: &Weight, mu: f64, delta: f64) -> Result<GammaEstimate> {
    if !(mu > delta && delta > 0.0) {
        return Err(Error::Precondition(format!("need μ > δ > 0, got μ = {mu}, δ = {delta}")));
    }
    if !u.is_piecewise_constant() {
        return Err(Error::Precondition("u must be piecewise constant".into()));
    }
    let band = ZBand::from_f64(mu - delta, mu)?;
    let region = z_region_integral(u, &make_union(vec![domain.clone()]), &band)?;
    let (w_min, w_max) = w.extrema_on(mu - delta, mu)?;
    let w_mid = w.eval(mu - 0.5 * delta)?;
    Ok(GammaEstimate {
        mu,
        delta,
        region_integral: region,
        value: w_mid * region / delta,
        lower: w_min * region / delta,
        upper: w_max * region / delta,
    })
}

/// `S(η) = {x ∈ (a, a+η) : u(x) > -J} ∪ {x ∈ (b-η, b) : u(x) < J}`.
pub fn boundary_defect_set(u: &PiecewiseFunction, j: &Rational, eta: &Rational) -> Result<IntervalUnion> {
    let d = u.domain();
    let left = Interval::new(d.lo().clone(), d.lo() + eta)?;
    let right = Interval::new(d.hi() - eta, d.hi().clone())?;
    let mut parts = Vec::new();
    for p in u.pieces() {
        let (_, c) = exact_coefficients(&p.spec)?;
        if c > -j {
            parts.extend(p.interval.intersect(&left));
        }
        if &c < j {
            parts.extend(p.interval.intersect(&right));
        }
    }
    Ok(make_union(parts))
}

/// Constants `(M, η₀, μ₀)` for a piecewise-constant `u` with left values
/// below `-J` and right values above `J`. `η₀` is the largest value in
/// `(0, |Ω|/2]` with `ℒ(S(η)) ≤ J/(M+J)·η` on `(0, η₀)`; `μ₀ = (M+J)/η₀`.
pub fn gamma_constants(u: &PiecewiseFunction, j: &Rational) -> Result<(Rational, Rational, Rational)> {
    if !j.is_positive() {
        return Err(Error::Precondition("J must be positive".into()));
    }
    let d = u.domain();
    let levels = u
        .pieces()
        .iter()
        .map(|p| exact_coefficients(&p.spec).map(|(_, c)| (p.interval.clone(), c)))
        .collect::<Result<Vec<_>>>()?;
    let first = levels.first().ok_or(Error::Precondition("u has no pieces".into()))?;
    let last = levels.last().expect("nonempty");
    if first.0.lo() != d.lo() || last.0.hi() != d.hi() {
        return Err(Error::Precondition("u must be assigned next to both endpoints".into()));
    }
    if !(first.1 < -j && last.1 > *j) {
        return Err(Error::Precondition(format!(
            "boundary values {} and {} do not straddle ±{}",
            rational::format(&first.1),
            rational::format(&last.1),
            rational::format(j)
        )));
    }
    let m = levels
        .iter()
        .map(|(_, c)| c.abs())
        .max()
        .expect("nonempty");
    let c = j / (&m + j);
    let half = d.len() / rational::int(2);
    // ℒ(S(η)) - cη is piecewise linear with kinks at distances of piece
    // endpoints from either end
    let mut etas: Vec<Rational> = levels
        .iter()
        .flat_map(|(iv, _)| [iv.lo() - d.lo(), iv.hi() - d.lo(), d.hi() - iv.lo(), d.hi() - iv.hi()])
        .filter(|e| e.is_positive() && e < &half)
        .collect();
    etas.push(half.clone());
    etas.sort();
    etas.dedup();
    let f = |eta: &Rational| -> Result<Rational> { Ok(boundary_defect_set(u, j, eta)?.measure() - &c * eta) };
    let (mut prev_eta, mut prev_f) = (Rational::zero(), Rational::zero());
    let mut eta0 = half.clone();
    for e in etas {
        let fe = f(&e)?;
        if fe.is_positive() {
            eta0 = &prev_eta + (-&prev_f) / (&fe - &prev_f) * (&e - &prev_eta);
            break;
        }
        prev_eta = e;
        prev_f = fe;
    }
    let mu0 = (&m + j) / &eta0;
    Ok((m, eta0, mu0))
}

/// `A_μ = Ω \ S((M+J)/μ)`.
pub fn shifted_domain(u: &PiecewiseFunction, j: &Rational, mu: &Rational) -> Result<IntervalUnion> {
    let (m, _, _) = gamma_constants(u, j)?;
    let eta = (m + j) / mu;
    let s = boundary_defect_set(u, j, &eta)?;
    let whole = make_union(vec![u.domain().clone()]);
    Ok(difference(&whole, &s))
}

fn difference(a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    let mut out = Vec::new();
    for part in a.parts() {
        let mut cursor = part.lo().clone();
        for cut in b.parts() {
            if cut.hi() <= &cursor || cut.lo() >= part.hi() {
                continue;
            }
            if cut.lo() > &cursor {
                out.extend(Interval::new(cursor.clone(), cut.lo().clone()).ok());
            }
            cursor = rational::max(&cursor, cut.hi());
        }
        out.extend(Interval::new(cursor, part.hi().clone()).ok());
    }
    make_union(out)
}

/// `x - u(x)/μ` restricted to `A_μ`, with its image measure.
pub fn phi_mu_image_measure(u: &PiecewiseFunction, j: &Rational, mu: f64) -> Result<Rational> {
    let a_mu = shifted_domain(u, j, &rational::from_f64(mu)?)?;
    image_inner_measure(&build_phi_mu(u, mu)?, &a_mu)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaRow {
    pub mu: f64,
    pub skipped: bool,
    pub estimate: Option<GammaEstimate>,
    /// `J·ω(μ)/μ²`.
    pub bound: f64,
    pub margin: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    pub j: f64,
    pub m: f64,
    pub eta0: f64,
    pub mu0: f64,
    pub delta: f64,
    pub rows: Vec<GammaRow>,
    pub pass: bool,
    pub note: &'static str,
}

pub const FINITE_DELTA_NOTE: &str = "validated at the tested δ only; the δ → 0 liminf is not certified";

/// Checks `γ̂(μ) ≥ J·ω(μ)/μ²` for every `μ > μ₀`, using the lower end of
/// the ω bracket.
pub fn gamma_lower_bound_check(
    u: &PiecewiseFunction,
    domain: &Interval,
    w: &Weight,
    mu_list: &[f64],
    j: f64,
    delta: f64,
) -> Result<GammaReport> {
    let jr = rational::from_f64(j)?;
    let (m, eta0, mu0) = gamma_constants(u, &jr)?;
    let mu0 = rational::to_f64(&mu0);
    let rows = mu_list
        .iter()
        .map(|&mu| {
            let bound = j * w.eval(mu)? / (mu * mu);
            if mu <= mu0 {
                return Ok(GammaRow {
                    mu,
                    skipped: true,
                    estimate: None,
                    bound,
                    margin: None,
                    pass: None,
                });
            }
            let est = gamma_estimate(u, domain, w, mu, delta)?;
            let margin = est.lower - bound;
            Ok(GammaRow {
                mu,
                skipped: false,
                estimate: Some(est),
                bound,
                margin: Some(margin),
                pass: Some(margin >= -1e-12 * bound),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaReport {
        j,
        m: rational::to_f64(&m),
        eta0: rational::to_f64(&eta0),
        mu0,
        delta,
        pass: rows.iter().all(|r| r.pass != Some(false)),
        rows,
        note: FINITE_DELTA_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::{affine_function, centered_heaviside, heaviside, step_function};
    use crate::rational::{int, ratio};
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};

    fn toy(ell: Rational) -> (PiecewiseFunction, IntervalUnion) {
        let end = int(1) + &ell;
        let phi = affine_function(
            Interval::new(int(0), end.clone()).unwrap(),
            &[(int(0), int(1), 1.0, 0.0), (int(1), end.clone(), 1.0, -1.0)],
        )
        .unwrap();
        (phi, make_union(vec![Interval::new(int(0), end).unwrap()]))
    }

    fn union_of(lo: Rational, hi: Rational) -> IntervalUnion {
        make_union(vec![Interval::new(lo, hi).unwrap()])
    }

    #[test]
    fn clipping_keeps_triangle() {
        // y ≥ x + 1 inside [0,2]×[0,2]
        let sq = Interval::from_ints(0, 2).unwrap();
        let h = HalfPlane {
            a: int(-1),
            b: int(1),
            c: int(-1),
        };
        let tri = ConvexCell::rectangle(&sq, &sq).clip(&h).unwrap();
        assert_eq!(tri.area(), ratio(1, 2));
        // ∫_0^1 ∫_{x+1}^2 1/(y-x) = ∫_0^1 ln(2-x) dx = 2 ln 2 - 1
        assert!((tri.integral_inv_gap() - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn clipping_to_nothing() {
        let sq = Interval::from_ints(0, 1).unwrap();
        let h = HalfPlane {
            a: int(0),
            b: int(0),
            c: int(-1),
        };
        assert!(ConvexCell::rectangle(&sq, &sq).clip(&h).is_none());
    }

    #[test]
    fn empty_band_intersection_is_zero() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let band = ZBand::from_f64(0.1, 0.2).unwrap();
        assert_eq!(z_region_integral(&h, &union_of(int(-1), int(1)), &band).unwrap(), 0.0);
    }

    #[test]
    fn heaviside_band_exact() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let (mu, d) = (10.0, 1e-3);
        let band = ZBand::from_f64(mu - d, mu).unwrap();
        let v = z_region_integral(&h, &union_of(int(-1), int(1)), &band).unwrap();
        let oracle = d / (mu * (mu - d));
        // relative width of the band is 1e-4, so rounding μ - δ costs ~1e-12
        assert!((v - oracle).abs() < 1e-10 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn toy_thin_band() {
        let (phi, a) = toy(ratio(1, 2));
        let d = 1e-3;
        let v = z_region_integral(&phi, &a, &ZBand::from_f64(0.0, d).unwrap()).unwrap();
        assert!((v / d - 0.5).abs() < 0.01 * 0.5, "{}", v / d);
    }

    #[test]
    fn diagonal_contact_detected() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let err = z_region_integral(&h, &union_of(int(-1), int(1)), &ZBand::from_f64(0.0, 0.1).unwrap());
        assert!(matches!(err, Err(Error::DiagonalContact { .. })));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let (phi, a) = toy(ratio(1, 4));
        let cfg = QuadratureConfig::default();
        for d in [0.5, 0.1, 1e-3] {
            let band = ZBand::from_f64(0.0, d).unwrap();
            for cell in z_region_cells(&phi, &a, &band).unwrap() {
                let exact = cell.integral_inv_gap();
                let quad = cell.integral_inv_gap_quadrature(&cfg).unwrap().value;
                assert!((exact - quad).abs() <= 1e-6 * exact.abs(), "{exact} vs {quad}");
            }
        }
    }

    #[test]
    fn band_additivity() {
        let phi = affine_function(
            Interval::from_ints(0, 3).unwrap(),
            &[(int(0), int(1), 2.0, 0.0), (int(1), int(2), -1.5, 1.0), (int(2), int(3), 3.0, -4.0)],
        )
        .unwrap();
        let a = union_of(int(0), int(3));
        let whole = z_region_integral(&phi, &a, &ZBand::from_f64(-0.5, 0.9).unwrap()).unwrap();
        let left = z_region_integral(&phi, &a, &ZBand::from_f64(-0.5, 0.2).unwrap()).unwrap();
        let right = z_region_integral(&phi, &a, &ZBand::from_f64(0.2, 0.9).unwrap()).unwrap();
        assert!(whole > 0.0);
        assert!((whole - left - right).abs() < 1e-10);
    }

    #[test]
    fn liminf_toy_family() {
        for (n, d) in [(1, 10), (1, 4), (1, 2), (9, 10)] {
            let (phi, a) = toy(ratio(n, d));
            let ell = n as f64 / d as f64;
            let est = liminf_estimate(&phi, &a, &default_delta_schedule()).unwrap();
            assert!((est.value - ell).abs() <= 0.02 * ell, "ℓ = {ell}: {}", est.value);
        }
    }

    #[test]
    fn liminf_injective_is_zero() {
        let phi = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 1.0, 0.0)]).unwrap();
        let est = liminf_estimate(&phi, &union_of(int(0), int(1)), &default_delta_schedule());
        // slope 1 is outside [0, δ] for δ < 1
        assert_eq!(est.unwrap().value, 0.0);
    }

    #[test]
    fn liminf_rejects_increasing_schedule() {
        let (phi, a) = toy(ratio(1, 2));
        assert!(liminf_estimate(&phi, &a, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn image_measures() {
        let (phi, a) = toy(ratio(1, 2));
        assert_eq!(image_inner_measure(&phi, &a).unwrap(), int(1));
        let id = affine_function(Interval::from_ints(0, 2).unwrap(), &[(int(0), int(2), 1.0, 0.0)]).unwrap();
        assert_eq!(image_inner_measure(&id, &union_of(int(0), int(2))).unwrap(), int(2));
    }

    #[test]
    fn loc_vs_glob_toy_equality() {
        let (phi, a) = toy(ratio(1, 2));
        let r = loc_vs_glob_check(&phi, &a, &default_delta_schedule(), 0.02).unwrap();
        assert!(r.pass);
        assert!((r.rhs - 0.5).abs() < 1e-15);
        assert!(r.margin.abs() < 0.01);
    }

    #[test]
    fn loc_vs_glob_injective_trivial() {
        let id = affine_function(Interval::from_ints(0, 2).unwrap(), &[(int(0), int(2), 1.0, 0.0)]).unwrap();
        let r = loc_vs_glob_check(&id, &union_of(int(0), int(2)), &default_delta_schedule(), 0.02).unwrap();
        assert!(r.rhs <= 0.0 && r.pass);
    }

    #[test]
    fn loc_vs_glob_rejects_contracting_piece() {
        let phi = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 0.5, 0.0)]).unwrap();
        assert!(matches!(
            loc_vs_glob_check(&phi, &union_of(int(0), int(1)), &default_delta_schedule(), 0.02),
            Err(Error::Precondition(_))
        ));
    }

    fn toy_with_k() -> CumulativeDistribution {
        let (phi, _) = toy(ratio(1, 2));
        let k = make_union(vec![
            Interval::from_ratios((1, 10), (9, 10)).unwrap(),
            Interval::from_ratios((11, 10), (14, 10)).unwrap(),
        ]);
        CumulativeDistribution::new(phi, k, Interval::from_ints(0, 2).unwrap()).unwrap()
    }

    #[test]
    fn level_sets() {
        let g = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 2.0, 0.0)]).unwrap();
        let k = union_of(int(0), int(1));
        assert_eq!(level_set(&g, &k, &int(1)).unwrap(), vec![ratio(1, 2)]);
        assert!(level_set(&g, &k, &int(5)).unwrap().is_empty());
        let cd = toy_with_k();
        assert_eq!(level_set(cd.g(), cd.k(), &ratio(1, 5)).unwrap(), vec![ratio(1, 5), ratio(6, 5)]);
    }

    #[test]
    fn cumulative_values() {
        let g = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 2.0, 0.0)]).unwrap();
        let cd = CumulativeDistribution::new(g, union_of(int(0), int(1)), Interval::from_ints(-1, 2).unwrap()).unwrap();
        assert_eq!(cumulative_value(&cd, &int(1)), ratio(1, 2));
        assert_eq!(cumulative_value(&cd, &int(1000)), int(1));
        assert_eq!(cumulative_value(&cd, &int(-1000)), int(0));
        assert_eq!(cd.total_mass(), int(1));
    }

    #[test]
    fn decreasing_pieces_count_upper_part() {
        let g = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), -1.0, 1.0)]).unwrap();
        let cd = CumulativeDistribution::new(g, union_of(int(0), int(1)), Interval::from_ints(0, 1).unwrap()).unwrap();
        assert_eq!(cd.value(&ratio(1, 4)), ratio(1, 4));
    }

    #[test]
    fn cumulative_is_nondecreasing() {
        let cd = toy_with_k();
        let values: Vec<Rational> = (0..1000).map(|k| cd.value(&ratio(k - 100, 800))).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(values[999], cd.total_mass());
    }

    #[test]
    fn derivative_matches_formula() {
        let g = affine_function(Interval::from_ints(0, 1).unwrap(), &[(int(0), int(1), 2.0, 0.0)]).unwrap();
        let cd = CumulativeDistribution::new(g, union_of(int(0), int(1)), Interval::from_ints(0, 1).unwrap()).unwrap();
        let r = cumulative_derivative(&cd, &int(1), &[ratio(1, 10_000_000)]).unwrap();
        assert_eq!(r.formula, 0.5);
        assert!(r.gap < 1e-6);
        let r = cumulative_derivative(&toy_with_k(), &ratio(1, 5), &[ratio(1, 10_000_000)]).unwrap();
        assert_eq!(r.formula, 2.0);
        assert!(r.gap < 1e-6);
    }

    #[test]
    fn derivative_zero_away_from_interval() {
        let (phi, _) = toy(ratio(1, 2));
        let k = make_union(vec![Interval::from_ratios((1, 10), (9, 10)).unwrap()]);
        let cd = CumulativeDistribution::new(phi, k, Interval::from_ratios((1, 2), (9, 10)).unwrap()).unwrap();
        let r = cumulative_derivative(&cd, &ratio(1, 5), &[ratio(1, 1000)]).unwrap();
        assert_eq!(r.formula, 0.0);
        assert_eq!(r.finite_differences[0].1, 0.0);
    }

    #[test]
    fn exceptional_values_rejected() {
        let cd = toy_with_k();
        assert!(matches!(
            cumulative_derivative(&cd, &ratio(1, 10), &[ratio(1, 1000)]),
            Err(Error::ExceptionalValue(_))
        ));
    }

    #[test]
    fn flat_pieces_rejected() {
        let g = step_function(Interval::from_ints(0, 2).unwrap(), &[int(1)], &[int(0), int(1)]).unwrap();
        assert!(CumulativeDistribution::new(g.clone(), union_of(int(0), int(2)), Interval::from_ints(0, 2).unwrap()).is_err());
        assert!(level_set(&g, &union_of(int(0), int(2)), &int(0)).is_err());
    }

    #[test]
    fn p_of_z_values() {
        let cd = toy_with_k();
        assert_eq!(p_of_z(cd.g(), cd.k(), &ratio(1, 5)).unwrap(), int(1));
        assert_eq!(p_of_z(cd.g(), cd.k(), &ratio(1, 2)).unwrap(), int(0));
        assert!(p_dominates_m_margin(&cd, &ratio(1, 5)).unwrap() >= Rational::zero());
    }

    #[test]
    fn olimpico_examples() {
        assert_eq!(olimpico_check(&[1.0, 1.0]).unwrap(), 0.0);
        for s in [0.0, 0.3, 1.0] {
            assert!(olimpico_check(&[1.0, s]).unwrap().abs() < 1e-15);
        }
        assert!((olimpico_check(&[0.5, 0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        assert!(olimpico_check(&[0.2, 0.3]).is_err());
        assert!(olimpico_check(&[1.5, 0.3]).is_err());
        assert!(olimpico_check(&[1.0]).is_err());
        assert_eq!(olimpico_check_exact(&[int(1), ratio(1, 3)]).unwrap(), int(0));
    }

    #[test]
    fn gamma_heaviside() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let w = Weight::Linear;
        let (mu, d) = (10.0, 1e-3);
        let g = gamma_estimate(&h, h.domain(), &w, mu, d).unwrap();
        // ∫_{1/μ}^{1/(μ-δ)} ω(1/t) dt / δ with ω(q) = q
        let exact = (mu / (mu - d)).ln() / d;
        assert!(g.lower <= exact && exact <= g.upper);
        assert!((g.value - 1.0 / mu).abs() < 1e-4 / mu);
    }

    #[test]
    fn gamma_constant_is_zero() {
        let u = step_function(Interval::from_ints(0, 1).unwrap(), &[], &[int(2)]).unwrap();
        let g = gamma_estimate(&u, u.domain(), &Weight::Linear, 10.0, 1e-3).unwrap();
        assert_eq!(g.value, 0.0);
    }

    #[test]
    fn gamma_band_additivity() {
        let h = heaviside(int(-1), int(1)).unwrap();
        let a = union_of(int(-1), int(1));
        let (mu, d) = (10.0, 1e-3);
        let whole = z_region_integral(&h, &a, &ZBand::from_f64(mu - d, mu).unwrap()).unwrap();
        let lo = z_region_integral(&h, &a, &ZBand::from_f64(mu - d, mu - d / 2.0).unwrap()).unwrap();
        let hi = z_region_integral(&h, &a, &ZBand::from_f64(mu - d / 2.0, mu).unwrap()).unwrap();
        assert!((whole - lo - hi).abs() < 1e-15);
    }

    #[test]
    fn gamma_bound_centered_heaviside() {
        let u = centered_heaviside(int(-1), int(1)).unwrap();
        let w = Weight::power_law(0.5).unwrap();
        let r = gamma_lower_bound_check(&u, u.domain(), &w, &[10.0, 100.0], 0.4, 1e-3).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| !row.skipped));
        assert_eq!(r.eta0, 1.0);
        assert!(matches!(
            gamma_lower_bound_check(&u, u.domain(), &w, &[10.0], 0.6, 1e-3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gamma_bound_staircase() {
        let u = step_function(Interval::from_ints(0, 3).unwrap(), &[int(1), int(2)], &[int(-1), int(0), int(1)]).unwrap();
        let (m, eta0, mu0) = gamma_constants(&u, &ratio(1, 2)).unwrap();
        // 2(η - 1) = η/3 on the second kink interval
        assert_eq!((m, eta0.clone(), mu0), (int(1), ratio(6, 5), ratio(5, 4)));
        let r = gamma_lower_bound_check(&u, u.domain(), &Weight::Linear, &[1.0, 50.0], 0.5, 1e-3).unwrap();
        assert!(r.rows[0].skipped);
        assert!(r.pass);
    }

    #[test]
    fn phi_mu_image_bound() {
        let u = centered_heaviside(int(-1), int(1)).unwrap();
        let j = ratio(2, 5);
        for mu in [10.0, 100.0] {
            let measure = rational::to_f64(&phi_mu_image_measure(&u, &j, mu).unwrap());
            assert!(measure <= 2.0 - 2.0 * 0.4 / mu + 1e-12, "{measure}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn olimpico_nonnegative(r in proptest::collection::vec(0.0f64..=1.0, 2..=10)) {
            let s: f64 = r.iter().sum();
            if s >= 1.0 {
                prop_assert!(olimpico_check(&r).unwrap() >= -1e-12);
            }
        }

        #[test]
        fn unit_slope_shuffles(b1 in 1u32..9, b2 in 1u32..9, s in proptest::collection::vec(0u32..7, 3)) {
            let (lo, hi) = (b1.min(b2), b1.max(b2) + 1);
            let edges = [int(0), ratio(lo as i64, 10), ratio(hi as i64, 10), int(1)];
            let rows: Vec<_> = (0..3)
                .map(|k| (edges[k].clone(), edges[k + 1].clone(), 1.0, -(s[k] as f64) / 8.0))
                .collect();
            let phi = affine_function(Interval::from_ints(0, 1).unwrap(), &rows).unwrap();
            let r = loc_vs_glob_check(&phi, &union_of(int(0), int(1)), &default_delta_schedule(), 0.02).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
