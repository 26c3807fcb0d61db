//! `E~_alpha(z) = E_{2-alpha, 4-alpha}(-z)` on `S_alpha`, `0 < alpha < 2`.

use num_complex::Complex;

use super::{guarded_remainders, mittag_leffler, plane_point, suffix_sums, CoeffCache, Evaluable};
use crate::error::{Error, Result};
use crate::scalar::{cexp, creal, ln_cabs_f64, Precision, Real};
use crate::sector::{GridSpec, LogPoint, Sector};

/// Up to this modulus remainders come from the convergent series directly.
const SERIES_RADIUS: f64 = 1.0;

const GUARD_BITS: u32 = 24;

#[derive(Debug)]
pub struct ETilde<T> {
    alpha: f64,
    bound: f64,
    cache: CoeffCache<T>,
}

impl<T: Real> ETilde<T> {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        let mut f = ETilde {
            alpha,
            bound: f64::INFINITY,
            cache: CoeffCache::new(),
        };
        f.bound = f.scan_bound()?;
        Ok(f)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn a(&self) -> f64 {
        2.0 - self.alpha
    }

    fn b(&self) -> f64 {
        4.0 - self.alpha
    }

    /// For alpha = 1, `|E~_1(w)| = |int_0^1 (1-t) e^{-tw} dt| <= 1/2` on `Re w >= 0`.
    /// Otherwise twice the largest modulus seen on a coarse scan of the sector,
    /// over radii where the series stays affordable.
    fn scan_bound(&self) -> Result<f64> {
        if self.alpha == 1.0 {
            return Ok(0.5);
        }
        let r_max = 200f64.powf(self.a()).min(1e3);
        let spec = GridSpec {
            n_r: 16,
            n_theta: 9,
            r_min: 1e-3,
            r_max,
            margin: 0.02,
        };
        let prec = Precision::from_bits(64);
        let mut best = (1.0 / statrs::function::gamma::gamma(self.b())).ln();
        for p in self.domain().sample_grid(&spec)? {
            let v: Complex<T> = self.evaluate(&p, prec)?;
            best = best.max(ln_cabs_f64(&v));
        }
        Ok(2.0 * best.exp())
    }

    fn coefficient_value(&self, j: usize, prec: Precision) -> T {
        let x = T::with_prec(self.a(), prec) * T::int_prec(j as i64 + 1, prec) + T::int_prec(2, prec);
        let c = T::int_prec(1, prec) / x.gamma();
        if j.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    fn series_terms(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let z: Complex<T> = p.to_complex(prec);
        let mut zpow = creal(T::with_prec(1.0, prec));
        let cut = (prec.bits() as f64 + 8.0) * std::f64::consts::LN_2;
        let mut out = Vec::new();
        let mut ln_ref = f64::INFINITY;
        for k in 0.. {
            let c = self.coefficient_value(k, prec);
            let t = Complex::new(zpow.re.clone() * c.clone(), zpow.im.clone() * c);
            let ln_t = ln_cabs_f64(&t);
            if k == nmax {
                ln_ref = ln_t;
            }
            out.push(t);
            if k > nmax + 2 && ln_t < ln_ref - cut {
                break;
            }
            zpow = zpow * z.clone();
        }
        Ok(out)
    }
}

impl<T: Real> Evaluable<T> for ETilde<T> {
    fn kind(&self) -> String {
        format!("etilde:{}", self.alpha)
    }

    fn domain(&self) -> Sector {
        Sector::s_alpha(self.alpha).expect("0 < alpha < 2")
    }

    fn uniform_bound(&self) -> f64 {
        self.bound
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        self.check_domain(p)?;
        let wp = prec.plus_bits(GUARD_BITS);
        self.evaluate_plane(&p.to_complex(wp), prec)
    }

    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        let p = plane_point(w)?;
        self.check_domain(&p)?;
        let wp = prec.plus_bits(GUARD_BITS);
        let w = w.to_owned();
        if self.alpha == 1.0 && p.r > 1.0 {
            // E_{1,3}(-w) = (e^{-w} - 1 + w) / w^2, free of cancellation for |w| > 1
            let one = creal(T::with_prec(1.0, wp));
            let num = cexp(&(-w.clone())) - one + w.clone();
            return Ok(num / (w.clone() * w));
        }
        mittag_leffler(self.a(), self.b(), &(-w), wp)
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

    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        self.check_domain(p)?;
        if p.r <= SERIES_RADIUS {
            let terms = self.series_terms(p, nmax, prec.plus_bits(GUARD_BITS))?;
            return Ok(suffix_sums(&terms, nmax));
        }
        guarded_remainders(self, p, nmax, prec)
    }
}
