//! Arbitrary-precision binary floating point backed by MPFR.
//!
//! Every value carries its own precision. Binary operations produce a result
//! at the larger of the two operand precisions, so constants created by
//! `Zero`/`One`/`from_i64` (53 or 64 bits, exact) never degrade a computation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_traits::{Num, One, Zero};
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::scalar::{Precision, Real, Scalar};

const SMALL_BITS: u32 = 64;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Clone, Debug)]
pub struct Mpf(Float);

impl Mpf {
    pub fn from_float(f: Float) -> Self {
        Mpf(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// The exact rational value of a finite float.
    pub fn to_rational(&self) -> Option<crate::Rational> {
        let q = self.0.to_rational()?;
        let num = BigInt::parse_bytes(q.numer().to_string_radix(16).as_bytes(), 16)?;
        let den = BigInt::parse_bytes(q.denom().to_string_radix(16).as_bytes(), 16)?;
        Some(crate::Rational::new(num, den))
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    /// Parses a decimal string at the given precision.
    pub fn parse_with_prec(s: &str, prec: Precision) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = Self::parse_with_prec(n, prec)?;
            let d = Self::parse_with_prec(d, prec)?;
            return Ok(n / d);
        }
        let parsed = Float::parse(s).map_err(|_| Error::parse("decimal", s))?;
        Ok(Mpf(Float::with_val(prec.bits(), parsed)))
    }

    fn bits(&self) -> u32 {
        self.0.prec()
    }

    fn digits_for(s: &str) -> Precision {
        let sig = s.chars().filter(|c| c.is_ascii_digit()).count() as f64;
        Precision::from_bits(((sig * LOG2_10) as u32 + 16).max(SMALL_BITS))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Mpf {
            type Output = Mpf;
            fn $m(self, rhs: Mpf) -> Mpf {
                let p = self.bits().max(rhs.bits());
                Mpf(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl<'a> $tr<&'a Mpf> for &'a Mpf {
            type Output = Mpf;
            fn $m(self, rhs: &'a Mpf) -> Mpf {
                let p = self.bits().max(rhs.bits());
                Mpf(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);
binop!(Rem, rem, %);

impl Neg for Mpf {
    type Output = Mpf;
    fn neg(self) -> Mpf {
        Mpf(-self.0)
    }
}

impl PartialEq for Mpf {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Mpf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Display for Mpf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, None))
    }
}

impl Zero for Mpf {
    fn zero() -> Self {
        Mpf(Float::with_val(SMALL_BITS, 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mpf {
    fn one() -> Self {
        Mpf(Float::with_val(SMALL_BITS, 1))
    }
}

impl Num for Mpf {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        let parsed = Float::parse_radix(s, radix as i32).map_err(|_| Error::parse("float", s))?;
        Ok(Mpf(Float::with_val(Self::digits_for(s).bits(), parsed)))
    }
}

impl Scalar for Mpf {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Mpf(Float::with_val(SMALL_BITS, n))
    }

    fn from_i64_prec(n: i64, prec: Precision) -> Self {
        Mpf(Float::with_val(prec.bits(), n))
    }

    fn pow_f64(&self, a: f64, prec: Precision) -> Option<Self> {
        let base = self.to_prec(prec.max(self.precision()));
        if a.fract() == 0.0 && a.abs() < 1e9 {
            return Some(base.powi(a as i64));
        }
        Some(Mpf(Float::with_val(base.bits(), (&base.0).pow(a))))
    }

    fn from_f64(x: f64) -> Self {
        Mpf(Float::with_val(53, x))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn ln_abs_f64(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        // mantissa in [0.5, 1) times 2^exp, robust for any exponent range
        let (m, e) = self.0.to_f64_exp();
        m.abs().ln() + e as f64 * std::f64::consts::LN_2
    }

    fn powi(&self, n: i64) -> Self {
        Mpf(Float::with_val(self.bits(), (&self.0).pow(n)))
    }

    fn root_up(&self, n: u32) -> Self {
        if self.0 <= 0 {
            return Mpf::zero();
        }
        if n == 1 || self.0 == 1 {
            return self.clone();
        }
        let p = self.bits();
        let mut y = Float::with_val(p, self.0.root_ref(n));
        loop {
            let back = Float::with_val(p + 32, (&y).pow(n));
            if back >= self.0 {
                return Mpf(y);
            }
            y.next_up();
        }
    }

    fn up(&self) -> Self {
        let mut y = self.0.clone();
        y.next_up();
        y.next_up();
        Mpf(y)
    }

    fn unit_roundoff(&self) -> f64 {
        (-(self.bits() as f64)).exp2()
    }

    /// Exact decimal expansion of the binary value (always terminates).
    fn to_decimal(&self) -> String {
        exact_decimal(&self.0)
    }

    fn parse_decimal(s: &str) -> Result<Self> {
        Self::parse_with_prec(s, Self::digits_for(s))
    }

    fn abs(&self) -> Self {
        Mpf(self.0.clone().abs())
    }
}

impl Real for Mpf {
    fn with_prec(x: f64, prec: Precision) -> Self {
        Mpf(Float::with_val(prec.bits(), x))
    }

    fn precision(&self) -> Precision {
        Precision::from_bits(self.bits())
    }

    fn to_prec(&self, prec: Precision) -> Self {
        Mpf(Float::with_val(prec.bits(), &self.0))
    }

    fn pi(prec: Precision) -> Self {
        Mpf(Float::with_val(prec.bits(), Constant::Pi))
    }

    fn ln(&self) -> Self {
        Mpf(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Mpf(self.0.clone().exp())
    }
    fn sqrt(&self) -> Self {
        Mpf(self.0.clone().sqrt())
    }
    fn sin(&self) -> Self {
        Mpf(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mpf(self.0.clone().cos())
    }
    fn atan2(&self, x: &Self) -> Self {
        let p = self.bits().max(x.bits());
        Mpf(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }
    fn powf(&self, e: &Self) -> Self {
        let p = self.bits().max(e.bits());
        Mpf(Float::with_val(p, (&self.0).pow(&e.0)))
    }
    fn hypot(&self, other: &Self) -> Self {
        let p = self.bits().max(other.bits());
        Mpf(Float::with_val(p, self.0.hypot_ref(&other.0)))
    }
    fn gamma(&self) -> Self {
        Mpf(self.0.clone().gamma())
    }
    fn ln_gamma(&self) -> Self {
        Mpf(self.0.clone().ln_abs_gamma().0)
    }
    fn floor(&self) -> Self {
        Mpf(self.0.clone().floor())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

fn exact_decimal(x: &Float) -> String {
    let Some(q) = x.to_rational() else {
        return x.to_string_radix(10, None);
    };
    let (num, den) = q.into_numer_denom();
    // den is a power of two: num/2^k = num*5^k / 10^k
    let k = den.significant_bits() - 1;
    let scaled = num * rug::Integer::from(5).pow(k);
    let negative = scaled < 0;
    let digits = scaled.abs().to_string();
    let k = k as usize;
    let body = if k == 0 {
        digits
    } else if digits.len() > k {
        let (i, f) = digits.split_at(digits.len() - k);
        format!("{i}.{}", f.trim_end_matches('0'))
    } else {
        let f = format!("{}{}", "0".repeat(k - digits.len()), digits);
        format!("0.{}", f.trim_end_matches('0'))
    };
    let body = body.trim_end_matches('.').to_string();
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Rounds `x` upward onto a `bits`-bit grid.
pub fn round_up_to(x: &Mpf, bits: u32) -> Mpf {
    let (f, _) = Float::with_val_round(bits, &x.0, Round::Up);
    Mpf(f)
}
