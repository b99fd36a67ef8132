//! Sign plus log-magnitude scalars for values such as `10^(n^2)` that leave
//! the `f64` range long before the constructions stop being interesting.
//!
//! The magnitude is stored as `exp2 * ln 2 + frac` with an integer binary
//! exponent and `frac` in `[0, ln 2)`. Splitting off the exponent keeps the
//! logarithm accurate to a few ulps of `frac` regardless of size, so a round
//! trip through `f64` is exact to about `1e-16` relative, which a single
//! `f64` logarithm of a `1e300` value could not deliver.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num::bigint::Sign;
use num::traits::{ToPrimitive, Zero};
use num::BigInt;
use serde::{Serialize, Serializer};

use crate::rational::Rational;

const LN2_HI: f64 = std::f64::consts::LN_2;
const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;

/// Relative cancellation below which a subtraction is reported as lossy.
pub const DEFAULT_CANCELLATION_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct LogScalar {
    sign: i8,
    exp2: i64,
    frac: f64,
}

/// Emitted when a subtraction cancels more than the configured threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionLoss {
    /// `|a - b| / max(|a|, |b|)`.
    pub relative_magnitude: f64,
    pub threshold: f64,
}

fn normalize(mut exp2: i64, mut frac: f64) -> (i64, f64) {
    if !(0.0..LN2_HI).contains(&frac) {
        let k = (frac / LN2_HI).floor();
        frac = (frac - k * LN2_HI) - k * LN2_LO;
        exp2 += k as i64;
        // one correction step for the rounding at the boundary
        if frac < 0.0 {
            frac += LN2_HI;
            exp2 -= 1;
        } else if frac >= LN2_HI {
            frac -= LN2_HI;
            exp2 += 1;
        }
    }
    (exp2, frac)
}

fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if e > 2100 {
        return f64::INFINITY * x.signum();
    }
    if e < -2200 {
        return 0.0;
    }
    let mut v = x;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        exp2: 0,
        frac: 0.0,
    };

    pub const ONE: LogScalar = LogScalar {
        sign: 1,
        exp2: 0,
        frac: 0.0,
    };

    /// Builds `sign * exp(log_mag)`. `sign == 0` yields zero.
    pub fn from_log(sign: i8, log_mag: f64) -> Self {
        if sign == 0 {
            return Self::ZERO;
        }
        assert!(log_mag.is_finite(), "log magnitude must be finite");
        let k = (log_mag / LN2_HI).floor();
        let frac = (log_mag - k * LN2_HI) - k * LN2_LO;
        let (exp2, frac) = normalize(k as i64, frac);
        LogScalar {
            sign: sign.signum(),
            exp2,
            frac,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "LogScalar::from_f64 needs a finite input");
        if v == 0.0 {
            return Self::ZERO;
        }
        let sign = if v > 0.0 { 1 } else { -1 };
        let a = v.abs();
        // a = m * 2^e with m in [1, 2)
        let bits = a.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let (m, e) = if raw_exp == 0 {
            // subnormal: rescale first
            let scaled = a * 2f64.powi(64);
            let b = scaled.to_bits();
            let re = ((b >> 52) & 0x7ff) as i64;
            let m = f64::from_bits((b & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
            (m, re - 1023 - 64)
        } else {
            let m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
            (m, raw_exp - 1023)
        };
        let (exp2, frac) = normalize(e, m.ln());
        LogScalar { sign, exp2, frac }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let sign = match n.sign() {
            Sign::NoSign => return Self::ZERO,
            Sign::Plus => 1,
            Sign::Minus => -1,
        };
        let mag = n.magnitude();
        let bits = mag.bits();
        if bits <= 1000 {
            let v = mag.to_f64().expect("fits in f64");
            let mut l = Self::from_f64(v);
            l.sign = sign;
            return l;
        }
        let shift = bits - 64;
        let top = (mag >> shift).to_f64().expect("64-bit head");
        let mut l = Self::from_f64(top);
        l.exp2 += shift as i64;
        l.sign = sign;
        l
    }

    pub fn from_rational(q: &Rational) -> Self {
        if q.is_zero() {
            return Self::ZERO;
        }
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of `|self|`; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        if self.sign == 0 {
            return f64::NEG_INFINITY;
        }
        self.exp2 as f64 * LN2_HI + (self.frac + self.exp2 as f64 * LN2_LO)
    }

    /// Natural log of a positive value.
    pub fn ln(&self) -> Option<f64> {
        (self.sign > 0).then(|| self.log_mag())
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        self.sign as f64 * ldexp(self.frac.exp(), self.exp2)
    }

    pub fn abs(&self) -> Self {
        LogScalar {
            sign: self.sign.abs(),
            ..*self
        }
    }

    /// `ln|self| - ln|other|`, without losing the bits a plain `f64`
    /// subtraction of two huge logs would.
    pub fn log_ratio(&self, other: &Self) -> f64 {
        (self.exp2 - other.exp2) as f64 * LN2_HI
            + ((self.frac - other.frac) + (self.exp2 - other.exp2) as f64 * LN2_LO)
    }

    pub fn powf(&self, p: f64) -> Self {
        if self.sign == 0 {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        assert!(self.sign > 0 || p.fract() == 0.0, "fractional power of a negative value");
        let sign = if self.sign < 0 && (p as i64) % 2 != 0 { -1 } else { 1 };
        let e = self.exp2 as f64 * p;
        let ei = e.floor();
        let frac = (e - ei) * LN2_HI + self.frac * p;
        let (exp2, frac) = normalize(ei as i64, frac);
        LogScalar { sign, exp2, frac }
    }

    /// `self + rhs`, log-sum-exp for equal signs.
    pub fn add(&self, rhs: &Self) -> Self {
        self.add_checked(rhs, DEFAULT_CANCELLATION_THRESHOLD).0
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&-*rhs)
    }

    /// `self - rhs` together with a cancellation report.
    pub fn sub_checked(&self, rhs: &Self, threshold: f64) -> (Self, Option<PrecisionLoss>) {
        self.add_checked(&-*rhs, threshold)
    }

    fn add_checked(&self, rhs: &Self, threshold: f64) -> (Self, Option<PrecisionLoss>) {
        if self.sign == 0 {
            return (*rhs, None);
        }
        if rhs.sign == 0 {
            return (*self, None);
        }
        let (big, small) = if self.cmp_abs(rhs) != Ordering::Less {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.log_ratio(big); // <= 0
        if big.sign == small.sign {
            let (exp2, frac) = normalize(big.exp2, big.frac + d.exp().ln_1p());
            return (
                LogScalar {
                    sign: big.sign,
                    exp2,
                    frac,
                },
                None,
            );
        }
        // opposite signs: |big| * (1 - e^d)
        let rel = -d.exp_m1();
        if rel <= 0.0 {
            let loss = PrecisionLoss {
                relative_magnitude: 0.0,
                threshold,
            };
            return (Self::ZERO, Some(loss));
        }
        let (exp2, frac) = normalize(big.exp2, big.frac + rel.ln());
        let out = LogScalar {
            sign: big.sign,
            exp2,
            frac,
        };
        let loss = (rel < threshold).then_some(PrecisionLoss {
            relative_magnitude: rel,
            threshold,
        });
        if let Some(l) = &loss {
            log::warn!(
                "LogScalar subtraction cancelled to {:e} of the operands (threshold {:e})",
                l.relative_magnitude,
                l.threshold
            );
        }
        (out, loss)
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exp2
                .cmp(&other.exp2)
                .then(self.frac.partial_cmp(&other.frac).unwrap_or(Ordering::Equal)),
        }
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogScalar {}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {
                let c = self.cmp_abs(other);
                if self.sign < 0 {
                    c.reverse()
                } else {
                    c
                }
            }
            o => o,
        }
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> Self {
        LogScalar {
            sign: -self.sign,
            ..self
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        let (exp2, frac) = normalize(self.exp2 + rhs.exp2, self.frac + rhs.frac);
        LogScalar {
            sign: self.sign * rhs.sign,
            exp2,
            frac,
        }
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "LogScalar division by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        let (exp2, frac) = normalize(self.exp2 - rhs.exp2, self.frac - rhs.frac);
        LogScalar {
            sign: self.sign * rhs.sign,
            exp2,
            frac,
        }
    }
}

impl From<f64> for LogScalar {
    fn from(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let l10 = self.log_mag() / std::f64::consts::LN_10;
                if l10.abs() < 300.0 {
                    write!(f, "{:e}", self.to_f64())
                } else {
                    let e = l10.floor();
                    let m = 10f64.powf(l10 - e);
                    write!(f, "{}{}e{}", if s < 0 { "-" } else { "" }, m, e as i64)
                }
            }
        }
    }
}

impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogScalar", 2)?;
        st.serialize_field("sign", &self.sign)?;
        st.serialize_field(
            "log_mag",
            &if self.sign == 0 { None } else { Some(self.log_mag()) },
        )?;
        st.end()
    }
}
