//! The Rodriguez-Salinas function `K(z) = ((1+z) log(1+z) - z) / z^2` on S_2.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::Zero;

use super::{guarded_remainders, plane_point, suffix_sums, CoeffCache, Evaluable};
use crate::error::{Error, Result};
use crate::scalar::{cabs_f64, cln, creal, Precision, Real};
use crate::sector::{LogPoint, Sector};

/// Below this modulus the Taylor series is used.
pub const SERIES_RADIUS: f64 = 0.5;

/// Remainder constant on S_2 for the constant weight sequence.
pub const KRS_CONSTANT: f64 = 4.0;

const GUARD_BITS: u32 = 24;

/// Evaluates `K(z)` at a point of S_2, identified with the slit plane.
pub fn k_rs<T: Real>(p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
    if p.theta.abs() >= PI {
        return Err(Error::OutsideS2(p.theta));
    }
    let wp = prec.plus_bits(GUARD_BITS);
    Ok(k_rs_plane(&p.to_complex(wp), wp))
}

/// `K(z)` for a plane value off `(-inf, -1]`, principal branch of the logarithm.
pub fn k_rs_plane<T: Real>(z: &Complex<T>, prec: Precision) -> Complex<T> {
    let r = cabs_f64(z);
    if r < SERIES_RADIUS {
        let terms = series_terms::<T>(z, r, 0, prec);
        let mut acc: Complex<T> = Complex::zero();
        for t in terms.into_iter().rev() {
            acc = acc + t;
        }
        return acc;
    }
    let one = creal(T::with_prec(1.0, prec));
    let w = one + z.clone();
    let num = w.clone() * cln(&w) - z.clone();
    num / (z.clone() * z.clone())
}

fn coefficient_value<T: Real>(j: usize, prec: Precision) -> T {
    let d = T::int_prec(((j + 1) * (j + 2)) as i64, prec);
    let c = T::int_prec(1, prec) / d;
    if j.is_multiple_of(2) {
        c
    } else {
        -c
    }
}

/// Terms `c_k z^k` for `k >= 0` until the tail bound
/// `r^J / ((J+1)(J+2)(1-r))` drops below `2^-bits` relative to the term at `nmax`.
fn series_terms<T: Real>(z: &Complex<T>, r: f64, nmax: usize, prec: Precision) -> Vec<Complex<T>> {
    let ln_ref = nmax as f64 * r.ln() - (((nmax + 1) * (nmax + 2)) as f64).ln();
    let cut = ln_ref - (prec.bits() as f64 + 8.0) * std::f64::consts::LN_2;
    let mut zpow = creal(T::with_prec(1.0, prec));
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let jk = k as f64;
        let tail = jk * r.ln() - ((jk + 1.0) * (jk + 2.0) * (1.0 - r)).ln();
        if k > nmax && tail < cut {
            return out;
        }
        let c = coefficient_value::<T>(k, prec);
        out.push(Complex::new(zpow.re.clone() * c.clone(), zpow.im.clone() * c));
        zpow = zpow * z.clone();
        k += 1;
    }
}

#[derive(Debug)]
pub struct KRs<T> {
    cache: CoeffCache<T>,
}

impl<T: Real> KRs<T> {
    pub fn new() -> Self {
        KRs {
            cache: CoeffCache::new(),
        }
    }
}

impl<T: Real> Default for KRs<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Evaluable<T> for KRs<T> {
    fn kind(&self) -> String {
        "krs".into()
    }

    fn domain(&self) -> Sector {
        Sector::s_alpha(2.0).expect("S_2 is a valid sector")
    }

    fn uniform_bound(&self) -> f64 {
        KRS_CONSTANT
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        k_rs(p, prec)
    }

    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        let p = plane_point(w)?;
        if p.theta.abs() >= PI {
            return Err(Error::OutsideS2(p.theta));
        }
        Ok(k_rs_plane(w, prec.plus_bits(GUARD_BITS)))
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(creal(coefficient_value(j, prec)))
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let v = self
            .cache
            .prefix(prec.bits(), n, |j| Ok(coefficient_value::<T>(j, prec)))?;
        Ok(v.into_iter().map(creal).collect())
    }

    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        if p.theta.abs() >= PI {
            return Err(Error::OutsideS2(p.theta));
        }
        if p.r < SERIES_RADIUS {
            let wp = prec.plus_bits(GUARD_BITS);
            let terms = series_terms::<T>(&p.to_complex(wp), p.r, nmax, wp);
            return Ok(suffix_sums(&terms, nmax));
        }
        guarded_remainders(self, p, nmax, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cabs, ln_cabs_f64, Scalar};
    use crate::sector::GridSpec;
    use crate::Mpf;

    const P: Precision = Precision::from_bits(170);

    #[test]
    fn coefficients_match_closed_form() {
        let k = KRs::<Mpf>::new();
        let c = k.coefficients(3, P).unwrap();
        assert_eq!(c[0].re.to_f64(), 0.5);
        assert!((c[1].re.to_f64() + 1.0 / 6.0).abs() < 1e-17);
        assert!((c[2].re.to_f64() - 1.0 / 12.0).abs() < 1e-17);
    }

    #[test]
    fn value_at_one() {
        let v = k_rs::<Mpf>(&LogPoint::on_bisector(1.0), P).unwrap();
        let two = Mpf::with_prec(2.0, P);
        let expected = two.clone() * two.ln() - <Mpf as num_traits::One>::one();
        assert!((v.re - expected).abs().to_f64() < 1e-48);
    }

    #[test]
    fn limit_at_zero() {
        let v = k_rs::<Mpf>(&LogPoint::on_bisector(1e-12), P).unwrap();
        assert!((v.re.to_f64() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn series_and_closed_form_agree_on_overlap() {
        for &r in &[0.4, 0.45, 0.5] {
            for i in 0..=10 {
                let theta = -0.95 * PI + 1.9 * PI * i as f64 / 10.0;
                let p = LogPoint::new(r, theta).unwrap();
                let wp = P.plus_bits(GUARD_BITS);
                let z: Complex<Mpf> = p.to_complex(wp);
                let terms = series_terms::<Mpf>(&z, r, 0, wp);
                let mut series: Complex<Mpf> = Complex::zero();
                for t in terms.into_iter().rev() {
                    series = series + t;
                }
                let w = creal(Mpf::with_prec(1.0, wp)) + z.clone();
                let closed = (w.clone() * cln(&w) - z.clone()) / (z.clone() * z);
                let diff = cabs(&(series - closed)).to_f64();
                assert!(diff < 1e-40, "r = {r}, theta = {theta}: {diff:e}");
            }
        }
    }

    #[test]
    fn remainder_constant_on_a_coarse_grid() {
        let k = KRs::<Mpf>::new();
        let s2 = k.domain();
        let grid = s2.sample_grid(&GridSpec::default().with_counts(24, 9)).unwrap();
        for p in &grid {
            let rems = k.remainders(p, 12, P).unwrap();
            for (n, r) in rems.iter().enumerate() {
                let w = ln_cabs_f64(r) - n as f64 * p.r.ln();
                assert!(w.exp() <= KRS_CONSTANT, "n = {n} at {p:?}");
            }
        }
    }

    #[test]
    fn outside_s2_is_rejected() {
        let p = LogPoint::new(1.0, PI).unwrap();
        assert_eq!(k_rs::<Mpf>(&p, P).unwrap_err(), Error::OutsideS2(PI));
    }
}
