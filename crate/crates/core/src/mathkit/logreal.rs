//! Signed reals stored as `(sign, ln|x|)`.
//!
//! Security parameters routinely sit far below `f64::MIN_POSITIVE`
//! (`2^-128` is fine, `exp(-N D)` for `N ~ 10^9` is not), so every bound in
//! the crate is carried in this form and only collapsed to `f64` for display.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    fn from_i8(v: i8) -> Sign {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

/// A real number in log-magnitude form.
///
/// Invariant: `sign == Zero` iff `ln_abs == -inf`. `ln_abs` is never NaN and
/// never `+inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogReal {
    sign: Sign,
    ln_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { sign: Sign::Zero, ln_abs: f64::NEG_INFINITY };
    pub const ONE: LogReal = LogReal { sign: Sign::Positive, ln_abs: 0.0 };

    /// `exp(ln_value)`; `-inf` maps to zero.
    ///
    /// Panics on NaN or `+inf`: those indicate an upstream bug, not a value.
    pub fn from_ln(ln_value: f64) -> LogReal {
        assert!(!ln_value.is_nan(), "LogReal::from_ln(NaN)");
        assert!(ln_value != f64::INFINITY, "LogReal::from_ln(+inf)");
        if ln_value == f64::NEG_INFINITY {
            LogReal::ZERO
        } else {
            LogReal { sign: Sign::Positive, ln_abs: ln_value }
        }
    }

    pub fn from_parts(sign: Sign, ln_abs: f64) -> LogReal {
        match sign {
            Sign::Zero => LogReal::ZERO,
            _ if ln_abs == f64::NEG_INFINITY => LogReal::ZERO,
            _ => {
                assert!(ln_abs.is_finite(), "LogReal::from_parts with ln_abs = {ln_abs}");
                LogReal { sign, ln_abs }
            }
        }
    }

    pub fn from_f64(x: f64) -> LogReal {
        assert!(x.is_finite(), "LogReal::from_f64({x})");
        if x == 0.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { Sign::Positive } else { Sign::Negative },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(self) -> f64 {
        self.ln_abs
    }

    /// Natural log; only meaningful for positive values.
    pub fn ln(self) -> f64 {
        debug_assert!(self.sign != Sign::Negative, "ln of a negative LogReal");
        self.ln_abs
    }

    pub fn log2(self) -> f64 {
        self.ln() / std::f64::consts::LN_2
    }

    pub fn log10(self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    /// Collapse to `f64`; underflows to 0 and overflows to `±inf`.
    pub fn value(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => self.ln_abs.exp(),
            Sign::Negative => -self.ln_abs.exp(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn abs(self) -> LogReal {
        match self.sign {
            Sign::Negative => LogReal { sign: Sign::Positive, ..self },
            _ => self,
        }
    }

    pub fn powf(self, exponent: f64) -> LogReal {
        assert!(self.sign != Sign::Negative, "powf of a negative LogReal");
        if self.is_zero() {
            return if exponent == 0.0 { LogReal::ONE } else { LogReal::ZERO };
        }
        LogReal::from_ln(self.ln_abs * exponent)
    }

    pub fn scale(self, factor: f64) -> LogReal {
        self * LogReal::from_f64(factor)
    }

    pub fn max(self, other: LogReal) -> LogReal {
        if self >= other { self } else { other }
    }

    pub fn min(self, other: LogReal) -> LogReal {
        if self <= other { self } else { other }
    }
}

/// `ln(e^a + e^b)` for `a >= b`.
fn ln_add_sorted(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        a
    } else {
        a + (b - a).exp().ln_1p()
    }
}

/// `ln(e^a - e^b)` for `a >= b`; `-inf` when equal.
fn ln_sub_sorted(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        a
    } else if a == b {
        f64::NEG_INFINITY
    } else {
        a + (-(b - a).exp_m1()).ln()
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs { (self, rhs) } else { (rhs, self) };
        if big.sign == small.sign {
            LogReal::from_parts(big.sign, ln_add_sorted(big.ln_abs, small.ln_abs))
        } else {
            LogReal::from_parts(big.sign, ln_sub_sorted(big.ln_abs, small.ln_abs))
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;

    fn neg(self) -> LogReal {
        LogReal { sign: Sign::from_i8(-self.sign.as_i8()), ..self }
    }
}

impl Sub for LogReal {
    type Output = LogReal;

    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return LogReal::ZERO;
        }
        LogReal::from_parts(
            Sign::from_i8(self.sign.as_i8() * rhs.sign.as_i8()),
            self.ln_abs + rhs.ln_abs,
        )
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        if self.is_zero() {
            return LogReal::ZERO;
        }
        LogReal::from_parts(
            Sign::from_i8(self.sign.as_i8() * rhs.sign.as_i8()),
            self.ln_abs - rhs.ln_abs,
        )
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &LogReal) -> Option<Ordering> {
        let by_sign = self.sign.cmp(&other.sign);
        if by_sign != Ordering::Equal {
            return Some(by_sign);
        }
        match self.sign {
            Sign::Zero => Some(Ordering::Equal),
            Sign::Positive => self.ln_abs.partial_cmp(&other.ln_abs),
            Sign::Negative => other.ln_abs.partial_cmp(&self.ln_abs),
        }
    }
}

impl From<f64> for LogReal {
    fn from(x: f64) -> LogReal {
        LogReal::from_f64(x)
    }
}

impl fmt::Debug for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogReal({:?}, ln={})", self.sign, self.ln_abs)
    }
}

impl fmt::Display for LogReal {
    /// Scientific notation that survives underflow: `1.234e-4000`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let log10 = self.ln_abs / std::f64::consts::LN_10;
        let mut exponent = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exponent);
        if mantissa >= 9.9995 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        let sign = if self.sign == Sign::Negative { "-" } else { "" };
        write!(f, "{sign}{mantissa:.4}e{exponent}")
    }
}

/// Wire form: `{"value": f64, "sign": -1|0|1, "ln_abs": f64|null}`.
///
/// `value` may underflow to 0 or overflow (serialized as null); `ln_abs` is
/// null only for zero.
impl Serialize for LogReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("LogReal", 3)?;
        s.serialize_field("value", &self.value())?;
        s.serialize_field("sign", &self.sign.as_i8())?;
        let ln_abs = if self.is_zero() { None } else { Some(self.ln_abs) };
        s.serialize_field("ln_abs", &ln_abs)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for LogReal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<LogReal, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            sign: i8,
            ln_abs: Option<f64>,
        }
        let w = Wire::deserialize(deserializer)?;
        match (Sign::from_i8(w.sign), w.ln_abs) {
            (Sign::Zero, _) | (_, None) => Ok(LogReal::ZERO),
            (sign, Some(l)) if l.is_finite() => Ok(LogReal::from_parts(sign, l)),
            _ => Err(serde::de::Error::custom("non-finite ln_abs")),
        }
    }
}
