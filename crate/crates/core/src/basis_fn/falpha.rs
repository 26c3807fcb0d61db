//! `f_{alpha, alpha'}(z) = int_0^{inf(-phi)} K(z v^{alpha'-2}) e^{-v} dv` on `S_alpha`, `alpha > 2`.

use std::f64::consts::PI;

use num_complex::Complex;

use super::krs::{k_rs_plane, KRS_CONSTANT};
use super::quadrature::{integrate, QuadratureSpec, PANEL_POINTS};
use super::{CoeffCache, Evaluable};
use crate::error::{Error, Result};
use crate::scalar::{cexp, creal, from_polar, Precision, Real};
use crate::sector::{LogPoint, Sector};

/// Safety fraction kept away from both side conditions on the ray angle.
pub const RAY_DELTA: f64 = 0.05;

const GUARD_BITS: u32 = 24;

#[derive(Debug)]
pub struct FAlpha<T> {
    alpha: f64,
    alphaprime: f64,
    cache: CoeffCache<T>,
}

impl<T: Real> FAlpha<T> {
    pub fn new(alpha: f64, alphaprime: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(alphaprime > alpha) || !alphaprime.is_finite() {
            return Err(Error::AlphaprimeMissing);
        }
        Ok(FAlpha {
            alpha,
            alphaprime,
            cache: CoeffCache::new(),
        })
    }

    /// `alpha' - 2`, the exponent applied to `v`.
    fn s(&self) -> f64 {
        self.alphaprime - 2.0
    }

    /// Half-width of the admissible ray angles: `(alpha-2)/(alpha'-2) * pi/2`.
    fn gamma(&self) -> f64 {
        (self.alpha - 2.0) / self.s() * PI / 2.0
    }

    /// Ray angle for argument `theta`, clamped into `(1-delta)` of both constraints.
    pub fn ray_angle(&self, theta: f64) -> Result<f64> {
        let limit = (1.0 - RAY_DELTA) * self.gamma();
        let phi = (theta / self.s()).clamp(-limit, limit);
        if (theta - self.s() * phi).abs() < (1.0 - RAY_DELTA) * PI {
            Ok(phi)
        } else {
            Err(Error::RayAngleInfeasible(theta))
        }
    }

    /// Ray angle and truncation for a target absolute tolerance of `2^-(bits+4)`.
    pub fn quadrature_spec(&self, theta: f64, prec: Precision) -> Result<QuadratureSpec> {
        let phi = self.ray_angle(theta)?;
        let tol = (-(prec.bits() as f64 + 4.0)).exp2();
        let c = phi.cos();
        // KRS_CONSTANT * e^{-T cos phi} / cos phi <= tol / 2
        let truncation = (2.0 * KRS_CONSTANT / (tol * c)).ln() / c;
        Ok(QuadratureSpec {
            phi,
            panel_points: PANEL_POINTS,
            truncation,
            tolerance: tol,
        })
    }

    /// Evaluates with an explicit panel layout; `breaks` must start at 0.
    pub fn evaluate_with(&self, p: &LogPoint, spec: &QuadratureSpec, breaks: &[f64], prec: Precision) -> Result<Complex<T>> {
        let wp = prec.plus_bits(GUARD_BITS);
        let s = T::with_prec(self.s(), wp);
        let phi = T::with_prec(spec.phi, wp);
        // z e^{-i s phi}: the K argument lies on the ray of angle theta - s phi
        let rotated = from_polar(&T::with_prec(p.r, wp), &T::with_prec(p.theta - self.s() * spec.phi, wp));
        let (cphi, sphi) = (phi.cos(), phi.sin());
        let integrand = |t: &T| -> Result<Complex<T>> {
            let ts = t.powf(&s);
            let w = Complex::new(rotated.re.clone() * ts.clone(), rotated.im.clone() * ts);
            let k = k_rs_plane(&w, wp);
            let decay = cexp(&Complex::new(-(t.clone() * cphi.clone()), t.clone() * sphi.clone()));
            Ok(k * decay)
        };
        let res = integrate(integrand, breaks, spec.tolerance, wp)?;
        let ray = Complex::new(cphi, -sphi);
        Ok(res.value * ray)
    }

    /// Panel breakpoints: dyadic near 0, then width 4 up to the truncation point.
    pub fn default_breaks(truncation: f64) -> Vec<f64> {
        let mut b = vec![0.0, 0.125, 0.25, 0.5, 1.0, 2.0];
        let mut t = 4.0;
        while t < truncation {
            b.push(t);
            t += 4.0;
        }
        b.push(truncation);
        b
    }

    fn coefficient_value(&self, j: usize, prec: Precision) -> T {
        let g = (T::with_prec(self.s(), prec) * T::int_prec(j as i64, prec) + T::int_prec(1, prec)).gamma();
        let c = g / T::int_prec(((j + 1) * (j + 2)) as i64, prec);
        if j.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }
}

impl<T: Real> Evaluable<T> for FAlpha<T> {
    fn kind(&self) -> String {
        format!("falpha:{}:{}", self.alpha, self.alphaprime)
    }

    fn domain(&self) -> Sector {
        Sector::s_alpha(self.alpha).expect("alpha > 2")
    }

    /// `|K| <= 4` on S_2 and `int_0^inf e^{-t cos phi} dt = 1 / cos phi`.
    fn uniform_bound(&self) -> f64 {
        KRS_CONSTANT / ((1.0 - RAY_DELTA) * self.gamma()).cos()
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        self.check_domain(p)?;
        let spec = self.quadrature_spec(p.theta, prec)?;
        self.evaluate_with(p, &spec, &Self::default_breaks(spec.truncation), prec)
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(creal(self.coefficient_value(j, prec)))
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let v = self
            .cache
            .prefix(prec.bits(), n, |j| Ok(self.coefficient_value(j, prec)))?;
        Ok(v.into_iter().map(creal).collect())
    }
}
