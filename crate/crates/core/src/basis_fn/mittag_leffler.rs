//! Two-parameter Mittag-Leffler function by its power series.
//!
//! Cancellation for large |z| is paid for with precision: the starting
//! precision adds the bit size of the largest term, and every value is
//! confirmed by a second evaluation at twice the precision.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, ln_cabs_f64, Precision, Real};

/// Precision ceiling for the escalation loop.
pub const ML_CAP_BITS: u32 = 4096;

/// Consecutive negligible terms required before the series is cut.
const QUIET_TERMS: usize = 40;

/// `ln` of the largest series term `|z|^j / Gamma(a j + b)`, scanned in doubles.
fn ln_max_term(a: f64, b: f64, ln_z: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut quiet = 0;
    for j in 0..1_000_000usize {
        let x = a * j as f64 + b;
        let lg = if x > 0.0 { statrs::function::gamma::ln_gamma(x) } else { 0.0 };
        let t = j as f64 * ln_z - lg;
        if t > best {
            best = t;
            quiet = 0;
        } else {
            quiet += 1;
            if quiet > 8 && t < best - 60.0 {
                break;
            }
        }
    }
    best
}

fn series<T: Real>(a: f64, b: f64, z: &Complex<T>, bits: u32) -> Complex<T> {
    let p = Precision::from_bits(bits);
    let z = Complex::new(z.re.to_prec(p), z.im.to_prec(p));
    let a_t = T::with_prec(a, p);
    let b_t = T::with_prec(b, p);
    let cut = -((bits + 34) as f64) * std::f64::consts::LN_2;
    let mut sum: Complex<T> = Complex::zero();
    let mut zpow = creal(T::with_prec(1.0, p));
    let mut max_ln = f64::NEG_INFINITY;
    let mut quiet = 0usize;
    let mut j = 0i64;
    loop {
        let g = (a_t.clone() * T::int_prec(j, p) + b_t.clone()).gamma();
        let term = if g.is_finite() {
            Complex::new(zpow.re.clone() / g.clone(), zpow.im.clone() / g)
        } else {
            Complex::zero()
        };
        let ln_t = ln_cabs_f64(&term);
        if ln_t > max_ln {
            max_ln = ln_t;
        }
        if ln_t - max_ln < cut || ln_t == f64::NEG_INFINITY {
            quiet += 1;
        } else {
            quiet = 0;
        }
        sum = sum + term;
        if quiet >= QUIET_TERMS && max_ln > f64::NEG_INFINITY {
            return sum;
        }
        zpow = zpow * z.clone();
        j += 1;
    }
}

/// `E_{a,b}(z) = sum_j z^j / Gamma(a j + b)` with relative accuracy `2^-prec`.
pub fn mittag_leffler<T: Real>(a: f64, b: f64, z: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("Mittag-Leffler needs a > 0, got {a}")));
    }
    let target = prec.bits();
    let ln_z = ln_cabs_f64(z);
    let guard = if ln_z == f64::NEG_INFINITY {
        0
    } else {
        (ln_max_term(a, b, ln_z).max(0.0) / std::f64::consts::LN_2).ceil() as u32
    };
    let mut bits = target + guard + 16;
    let tol = T::with_prec((-(target as f64 + 4.0)).exp2(), prec);
    loop {
        if 2 * bits > ML_CAP_BITS {
            return Err(Error::BudgetExceeded {
                cap_bits: ML_CAP_BITS,
                context: format!("E_({a},{b}) at |z| = {:e}", ln_z.exp()),
            });
        }
        let v1 = series(a, b, z, bits);
        let v2 = series(a, b, z, 2 * bits);
        let diff = cabs(&(v1 - v2.clone()));
        let size = cabs(&v2);
        if diff <= tol.clone() * size.clone() || (size.is_zero() && diff.is_zero()) {
            return Ok(v2);
        }
        bits *= 2;
    }
}
