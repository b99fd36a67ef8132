//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one and two
//! dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Sample count used by Monte Carlo oracles.
    pub monte_carlo_samples: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 4000,
            monte_carlo_samples: 10_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 || self.monte_carlo_samples == 0 {
            return Err(Error::Precondition("caps must be positive".into()));
        }
        Ok(())
    }

    /// Same caps, tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

/// Integral value with an absolute error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[k] * s;
        if k % 2 == 1 {
            rg += WG[k / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Fixed 7-point Gauss–Legendre rule on `[a, b]`, for smooth integrands on
/// short panels.
#[inline]
pub fn gauss7<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut r = WG[3] * f(c);
    for k in 0..3 {
        let dx = h * XGK[2 * k + 1];
        r += WG[k] * (f(c - dx) + f(c + dx));
    }
    r * h
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// `∫_a^b f` with global adaptive bisection.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Adaptive integration seeded with the given breakpoints (sorted, at
/// least two). Kinks and singularities should sit at breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if breaks.len() < 2 {
        return Err(Error::Precondition("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut settled = Estimate::default();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::Domain(format!("bad integration range [{a}, {b}]")));
        }
        if a == b {
            continue;
        }
        let (value, error) = gk15(&f, a, b);
        heap.push(Panel { a, b, value, error });
    }
    let mut subdivisions = 0usize;
    loop {
        let (value, error) = heap
            .iter()
            .fold((settled.value, settled.error), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() {
            return Err(Error::Domain("integrand produced a non-finite value".into()));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target || heap.is_empty() {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::DidNotConverge {
                subdivisions,
                lower: value - error,
                upper: value + error,
            });
        }
        let p = heap.pop().expect("heap checked nonempty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b || (p.b - p.a) <= 1e-15 * p.a.abs().max(p.b.abs()) {
            // panel at float resolution: accept it as is
            settled.value += p.value;
            settled.error += p.error;
            continue;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        subdivisions += 1;
    }
}

/// `∫_{x0}^{x1} ∫_{y_lo(x)}^{y_hi(x)} f(x, y) dy dx` by nested adaptive
/// quadrature. `x_breaks` must include `x0` and `x1`; `y_breaks(x)` returns
/// the inner breakpoints including the limits (empty for an empty slice).
pub fn integrate_2d<F, Y>(f: F, x_breaks: &[f64], y_breaks: Y, cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    Y: Fn(f64) -> Vec<f64>,
{
    let inner_cfg = cfg.tightened(0.1);
    let failure = std::cell::RefCell::new(None);
    let inner_err = std::cell::Cell::new(0.0f64);
    let outer = |x: f64| -> f64 {
        let ys = y_breaks(x);
        if ys.len() < 2 {
            return 0.0;
        }
        match integrate_with_breaks(|y| f(x, y), &ys, &inner_cfg) {
            Ok(e) => {
                inner_err.set(inner_err.get().max(e.error));
                e.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let est = integrate_with_breaks(outer, x_breaks, cfg)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let width = x_breaks.last().unwrap() - x_breaks[0];
    Ok(Estimate {
        value: est.value,
        error: est.error + inner_err.get() * width,
    })
}
