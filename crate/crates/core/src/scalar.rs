//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! [`Scalar`] is an ordered field with enough extra structure to state and
//! check coefficient bounds: exact backends (`BigRational`) and floating
//! backends (`f32`, `f64`, [`Mpf`](crate::Mpf)) both implement it. [`Real`]
//! adds transcendental functions and precision control; only floating
//! backends implement it.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision, stored in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precision(u32);

impl Precision {
    pub const DOUBLE: Precision = Precision(53);

    pub const fn from_bits(bits: u32) -> Self {
        Precision(if bits < 2 { 2 } else { bits })
    }

    /// Enough bits to carry `digits` significant decimal digits.
    pub fn from_digits(digits: u32) -> Self {
        Precision::from_bits((digits as f64 * LOG2_10).ceil() as u32 + 4)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn digits(self) -> u32 {
        (self.0 as f64 / LOG2_10).floor() as u32
    }

    pub fn plus_bits(self, extra: u32) -> Self {
        Precision(self.0.saturating_add(extra))
    }

    pub fn doubled(self) -> Self {
        Precision(self.0.saturating_mul(2))
    }

    /// Relative accuracy 2^(1-bits).
    pub fn epsilon(self) -> f64 {
        (1.0 - self.0 as f64).exp2()
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::from_digits(50)
    }
}

/// Ordered field used for coefficients, weight sequences and certificates.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// Integer at a given working precision (exact backends ignore `prec`).
    fn from_i64_prec(n: i64, _prec: Precision) -> Self {
        Self::from_i64(n)
    }

    /// self^a for a real exponent. Exact backends only support integral `a`.
    fn pow_f64(&self, a: f64, prec: Precision) -> Option<Self>;

    /// Conversion from a binary double; exact for every backend except `f32`.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Natural logarithm of |self| as a double, finite even when `to_f64` overflows.
    fn ln_abs_f64(&self) -> f64;

    fn powi(&self, n: i64) -> Self;

    /// An upper bound y for self^(1/n) with y^n >= self checked in the backend's own arithmetic.
    fn root_up(&self, n: u32) -> Self;

    /// A value at least as large as `self` plus a few units of rounding.
    fn up(&self) -> Self;

    /// Unit roundoff at the precision of `self`; zero for exact backends.
    fn unit_roundoff(&self) -> f64;

    fn to_decimal(&self) -> String;

    fn parse_decimal(s: &str) -> Result<Self>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn from_usize(n: usize) -> Self {
        Self::from_i64(n as i64)
    }
}

/// Floating backend with transcendental functions and explicit precision.
pub trait Real: Scalar {
    fn with_prec(x: f64, prec: Precision) -> Self;

    fn int_prec(n: i64, prec: Precision) -> Self {
        Self::from_i64_prec(n, prec)
    }

    fn ratio_prec(num: i64, den: i64, prec: Precision) -> Self {
        Self::int_prec(num, prec) / Self::int_prec(den, prec)
    }

    fn precision(&self) -> Precision;

    fn to_prec(&self, prec: Precision) -> Self;

    fn pi(prec: Precision) -> Self;

    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn hypot(&self, other: &Self) -> Self;
    fn gamma(&self) -> Self;
    fn ln_gamma(&self) -> Self;
    fn floor(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Machine epsilon 2^(1-bits) at the precision of `self`.
    fn epsilon(&self) -> Self {
        Self::with_prec(self.precision().epsilon(), self.precision())
    }
}

// ---------------------------------------------------------------------------
// complex helpers

/// Modulus of a complex value.
pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    z.re.hypot(&z.im)
}

/// Principal argument in (-pi, pi].
pub fn carg<T: Real>(z: &Complex<T>) -> T {
    z.im.atan2(&z.re)
}

pub fn cexp<T: Real>(z: &Complex<T>) -> Complex<T> {
    let m = z.re.exp();
    Complex::new(m.clone() * z.im.cos(), m * z.im.sin())
}

/// Principal logarithm.
pub fn cln<T: Real>(z: &Complex<T>) -> Complex<T> {
    Complex::new(cabs(z).ln(), carg(z))
}

pub fn from_polar<T: Real>(r: &T, theta: &T) -> Complex<T> {
    Complex::new(r.clone() * theta.cos(), r.clone() * theta.sin())
}

/// |z|^2, exact for exact backends.
pub fn norm_sqr<T: Scalar>(z: &Complex<T>) -> T {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

pub fn cscale<T: Scalar>(z: &Complex<T>, s: &T) -> Complex<T> {
    Complex::new(z.re.clone() * s.clone(), z.im.clone() * s.clone())
}

pub fn creal<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Modulus as a double, without requiring transcendental functions.
pub fn cabs_f64<T: Scalar>(z: &Complex<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// ln|z| as a double, robust against overflow of the backend's values.
pub fn ln_cabs_f64<T: Scalar>(z: &Complex<T>) -> f64 {
    let a = z.re.ln_abs_f64();
    let b = z.im.ln_abs_f64();
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + 0.5 * (2.0 * (lo - hi)).exp().ln_1p()
}

// ---------------------------------------------------------------------------
// f64 / f32

macro_rules! impl_native {
    ($t:ty, $bits:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_i64(n: i64) -> Self {
                n as $t
            }

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn ln_abs_f64(&self) -> f64 {
                (*self as f64).abs().ln()
            }

            fn powi(&self, n: i64) -> Self {
                (*self).powi(n as i32)
            }

            fn pow_f64(&self, a: f64, _prec: Precision) -> Option<Self> {
                Some(<$t>::powf(*self, a as $t))
            }

            fn root_up(&self, n: u32) -> Self {
                if *self <= 0.0 {
                    return 0.0;
                }
                if n == 1 || *self == 1.0 {
                    return *self;
                }
                let mut y = <$t>::powf(*self, 1.0 / n as $t);
                while y.powi(n as i32) < *self {
                    y = y.next_up();
                }
                y
            }

            fn up(&self) -> Self {
                self.next_up().next_up()
            }

            fn unit_roundoff(&self) -> f64 {
                (-($bits as f64)).exp2()
            }

            fn to_decimal(&self) -> String {
                format!("{:e}", self)
            }

            fn parse_decimal(s: &str) -> Result<Self> {
                if let Some((n, d)) = s.split_once('/') {
                    let n: $t = n.trim().parse().map_err(|_| Error::parse("decimal", s))?;
                    let d: $t = d.trim().parse().map_err(|_| Error::parse("decimal", s))?;
                    return Ok(n / d);
                }
                s.trim().parse().map_err(|_| Error::parse("decimal", s))
            }
        }

        impl Real for $t {
            fn with_prec(x: f64, _prec: Precision) -> Self {
                x as $t
            }

            fn precision(&self) -> Precision {
                Precision::from_bits($bits)
            }

            fn to_prec(&self, _prec: Precision) -> Self {
                *self
            }

            fn pi(_prec: Precision) -> Self {
                std::f64::consts::PI as $t
            }

            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan2(&self, x: &Self) -> Self {
                <$t>::atan2(*self, *x)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
            fn hypot(&self, other: &Self) -> Self {
                <$t>::hypot(*self, *other)
            }
            fn gamma(&self) -> Self {
                statrs::function::gamma::gamma(*self as f64) as $t
            }
            fn ln_gamma(&self) -> Self {
                statrs::function::gamma::ln_gamma(*self as f64) as $t
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
        }
    };
}

impl_native!(f64, 53);
impl_native!(f32, 24);

// ---------------------------------------------------------------------------
// exact rationals

/// Exact rational backend.
pub type Rational = BigRational;

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).abs().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let ln = self.ln_abs_f64();
            let mag = ln.exp();
            if self.is_negative() {
                -mag
            } else {
                mag
            }
        })
    }

    fn ln_abs_f64(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    fn powi(&self, n: i64) -> Self {
        num_traits::Pow::pow(self, n as i32)
    }

    fn pow_f64(&self, a: f64, _prec: Precision) -> Option<Self> {
        if a.fract() != 0.0 || a.abs() > i32::MAX as f64 {
            return None;
        }
        if self.is_zero() && a < 0.0 {
            return None;
        }
        Some(self.powi(a as i64))
    }

    fn root_up(&self, n: u32) -> Self {
        if *self <= Self::zero() {
            return Self::zero();
        }
        if n == 1 || self.is_one() {
            return self.clone();
        }
        let root = (self.ln_abs_f64() / n as f64).exp();
        // Perfect powers of small rationals come back exactly.
        let nearest = Self::from_f64(root.round());
        if !nearest.is_zero() && nearest.powi(n as i64) == *self {
            return nearest;
        }
        // Otherwise start from a binary double slightly above the real root and walk up.
        let mut y = Self::from_f64(root * (1.0 + 1e-12));
        let step = Self::from_f64(1.0 + 1e-9);
        while y.powi(n as i64) < *self {
            y *= step.clone();
        }
        y
    }

    fn up(&self) -> Self {
        self.clone()
    }

    fn unit_roundoff(&self) -> f64 {
        0.0
    }

    fn to_decimal(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        parse_rational(s).ok_or_else(|| Error::parse("rational", s))
    }
}

/// Parses "p/q", integers, and decimal strings with optional exponent into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::Pow::pow(&ten, scale as u32);
    } else {
        value /= num_traits::Pow::pow(&ten, (-scale) as u32);
    }
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_digit_conversion() {
        let p = Precision::from_digits(50);
        assert!(p.bits() >= 167);
        assert!(p.digits() >= 50);
        assert_eq!(Precision::DOUBLE.bits(), 53);
    }

    #[test]
    fn rational_parsing() {
        let q = parse_rational("1/27").unwrap();
        assert_eq!(q, BigRational::new(1.into(), 27.into()));
        assert_eq!(parse_rational("-1.25e2").unwrap(), Rational::from_i64(-125));
        assert_eq!(
            parse_rational("0.001").unwrap(),
            BigRational::new(1.into(), 1000.into())
        );
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn root_up_is_an_upper_bound() {
        let x = Rational::from_i64(10);
        let y = x.root_up(3);
        assert!(y.powi(3) >= x);
        assert!(Scalar::to_f64(&y) < 2.1545);
        assert_eq!(Rational::one().root_up(7), Rational::one());

        let z = 10.0f64.root_up(3);
        assert!(z.powi(3) >= 10.0);
    }

    #[test]
    fn huge_rational_logs() {
        let big = Rational::from_i64(10).powi(400);
        assert!((big.ln_abs_f64() - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!(Scalar::to_f64(&big).is_infinite());
    }
}
