//! Evaluators built from other evaluators: products, compositions and `c_0 - f`.

use num_complex::Complex;
use num_traits::Zero;

use super::{Evaluable, SharedFn};
use crate::error::{Error, Result};
use crate::scalar::{cabs_f64, creal, Precision, Real};
use crate::sector::{LogPoint, Sector};
use crate::series;

/// Constant terms below this modulus count as zero.
pub const TAU_ZERO: f64 = 1e-30;

/// Common subsector of two sectors sharing a bisector.
fn intersect(a: &Sector, b: &Sector) -> Result<Sector> {
    if a.bisector != b.bisector {
        return Err(Error::SectorMismatch);
    }
    let radius = match (a.radius, b.radius) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    Ok(Sector {
        bisector: a.bisector,
        half_opening: a.half_opening.min(b.half_opening),
        radius,
    })
}

/// Pointwise product `f * g` on the common domain.
pub struct ProductFn<T> {
    f: SharedFn<T>,
    g: SharedFn<T>,
    domain: Sector,
}

impl<T: Real> ProductFn<T> {
    pub fn new(f: SharedFn<T>, g: SharedFn<T>) -> Result<Self> {
        let domain = intersect(&f.domain(), &g.domain())?;
        Ok(ProductFn { f, g, domain })
    }
}

impl<T: Real> Evaluable<T> for ProductFn<T> {
    fn kind(&self) -> String {
        format!("product({},{})", self.f.kind(), self.g.kind())
    }

    fn domain(&self) -> Sector {
        self.domain
    }

    fn uniform_bound(&self) -> f64 {
        self.f.uniform_bound() * self.g.uniform_bound()
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        self.check_domain(p)?;
        Ok(self.f.evaluate(p, prec)? * self.g.evaluate(p, prec)?)
    }

    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        Ok(self.f.evaluate_plane(w, prec)? * self.g.evaluate_plane(w, prec)?)
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(self.coefficients(j + 1, prec)?.pop().unwrap_or_else(Complex::zero))
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let a = self.f.coefficients(n, prec)?;
        let b = self.g.coefficients(n, prec)?;
        Ok(series::convolve(&a, &b, n))
    }

    /// `r_h(z,n) = r_f(z,n) g(z) + sum_{k<n} c^f_k z^k r_g(z,n-k)`.
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        self.check_domain(p)?;
        let rf = self.f.remainders(p, nmax, prec)?;
        let rg = self.g.remainders(p, nmax, prec)?;
        let cf = self.f.coefficients(nmax, prec)?;
        Ok(product_remainders(&rf, &rg, &cf, &p.to_complex(prec.plus_bits(16)), nmax))
    }
}

/// The product remainder formula evaluated for every `n <= nmax` from the
/// factors' remainders (`rg[0]` is `g(z)`) and the first factor's coefficients.
pub fn product_remainders<T: Real>(
    rf: &[Complex<T>],
    rg: &[Complex<T>],
    cf: &[Complex<T>],
    z: &Complex<T>,
    nmax: usize,
) -> Vec<Complex<T>> {
    let one = creal(T::with_prec(1.0, z.re.precision()));
    let mut zpow = Vec::with_capacity(nmax);
    let mut acc = one;
    for _ in 0..nmax {
        zpow.push(acc.clone());
        acc = acc * z.clone();
    }
    (0..=nmax)
        .map(|n| {
            let mut s = rf[n].clone() * rg[0].clone();
            for k in 0..n {
                if !cf[k].is_zero() {
                    s = s + cf[k].clone() * zpow[k].clone() * rg[n - k].clone();
                }
            }
            s
        })
        .collect()
}

/// `g o f` with `f(0) = 0`; the caller guarantees that `f` maps its domain into `g`'s.
pub struct ComposedFn<T> {
    outer: SharedFn<T>,
    inner: SharedFn<T>,
}

impl<T: Real> ComposedFn<T> {
    pub fn new(outer: SharedFn<T>, inner: SharedFn<T>) -> Result<Self> {
        let c0 = inner.coefficient(0, Precision::default())?;
        if cabs_f64(&c0) > TAU_ZERO {
            return Err(Error::NonzeroConstantTerm {
                value: c0.re.to_decimal(),
                tolerance: TAU_ZERO,
            });
        }
        Ok(ComposedFn { outer, inner })
    }
}

impl<T: Real> Evaluable<T> for ComposedFn<T> {
    fn kind(&self) -> String {
        format!("compose({},{})", self.outer.kind(), self.inner.kind())
    }

    fn domain(&self) -> Sector {
        self.inner.domain()
    }

    fn uniform_bound(&self) -> f64 {
        self.outer.uniform_bound()
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        self.check_domain(p)?;
        let wp = prec.plus_bits(16);
        let w = self.inner.evaluate(p, wp)?;
        self.outer.evaluate_plane(&w, prec)
    }

    fn evaluate_plane(&self, z: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        let w = self.inner.evaluate_plane(z, prec.plus_bits(16))?;
        self.outer.evaluate_plane(&w, prec)
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(self.coefficients(j + 1, prec)?.pop().unwrap_or_else(Complex::zero))
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let g = self.outer.coefficients(n, prec)?;
        let mut f = self.inner.coefficients(n, prec)?;
        if let Some(c0) = f.first_mut() {
            *c0 = Complex::zero();
        }
        Ok(series::compose(&g, &f, n))
    }
}

/// `f_0(z) = c_0 - f(z)`, whose expansion is `(0, -c_1, -c_2, ...)`.
pub struct ShiftSubtractFn<T> {
    f: SharedFn<T>,
}

impl<T: Real> ShiftSubtractFn<T> {
    pub fn new(f: SharedFn<T>) -> Self {
        ShiftSubtractFn { f }
    }
}

impl<T: Real> Evaluable<T> for ShiftSubtractFn<T> {
    fn kind(&self) -> String {
        format!("shift_subtract({})", self.f.kind())
    }

    fn domain(&self) -> Sector {
        self.f.domain()
    }

    fn uniform_bound(&self) -> f64 {
        let c0 = self.f.coefficient(0, Precision::from_bits(64)).map(|c| cabs_f64(&c));
        c0.unwrap_or(f64::INFINITY) + self.f.uniform_bound()
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Ok(self.f.coefficient(0, prec)? - self.f.evaluate(p, prec)?)
    }

    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        Ok(self.f.coefficient(0, prec)? - self.f.evaluate_plane(w, prec)?)
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        if j == 0 {
            return Ok(Complex::zero());
        }
        Ok(-self.f.coefficient(j, prec)?)
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let mut c: Vec<Complex<T>> = self.f.coefficients(n, prec)?.into_iter().map(|x| -x).collect();
        if let Some(c0) = c.first_mut() {
            *c0 = Complex::zero();
        }
        Ok(c)
    }

    /// `r(z, 0) = f_0(z)` and `r(z, n) = -r_f(z, n)` for `n >= 1`.
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let rf = self.f.remainders(p, nmax, prec)?;
        let c0 = self.f.coefficient(0, prec)?;
        let mut out: Vec<Complex<T>> = rf.into_iter().map(|r| -r).collect();
        out[0] = c0 + out[0].clone();
        Ok(out)
    }
}
