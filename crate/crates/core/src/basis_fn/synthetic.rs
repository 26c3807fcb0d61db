//! Elementary evaluators with known expansions, used as test inputs.
//!
//! `1/(1+z)`, `e^{-z}` and `z/(1+z)` all satisfy `|r(z, n)| <= n! |z|^n` on
//! `S_1`, i.e. they carry the certificate `(A, h) = (1, 1)` over `G^1`.

use num_complex::Complex;
use num_traits::Zero;

use super::{guarded_remainders, plane_point, suffix_sums, Evaluable};
use crate::error::Result;
use crate::scalar::{cexp, creal, ln_cabs_f64, Precision, Real};
use crate::sector::{LogPoint, Sector};

const GUARD_BITS: u32 = 16;

fn s1() -> Sector {
    Sector::s_alpha(1.0).expect("S_1 is a valid sector")
}

fn signed_one<T: Real>(j: usize, prec: Precision) -> T {
    let one = T::int_prec(1, prec);
    if j.is_multiple_of(2) {
        one
    } else {
        -one
    }
}

/// `(-z)^n / (1 + z)` for `0 <= n <= nmax`.
fn geometric_remainders<T: Real>(p: &LogPoint, nmax: usize, prec: Precision) -> Vec<Complex<T>> {
    let wp = prec.plus_bits(GUARD_BITS);
    let z: Complex<T> = p.to_complex(wp);
    let base = creal(T::int_prec(1, wp)) / (creal(T::int_prec(1, wp)) + z.clone());
    let mz = -z;
    let mut out = Vec::with_capacity(nmax + 1);
    let mut acc = base;
    for _ in 0..=nmax {
        out.push(acc.clone());
        acc = acc * mz.clone();
    }
    out
}

/// `1 / (1 + z)` on `S_1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Recip1p;

impl<T: Real> Evaluable<T> for Recip1p {
    fn kind(&self) -> String {
        "recip1p".into()
    }
    fn domain(&self) -> Sector {
        s1()
    }
    fn uniform_bound(&self) -> f64 {
        1.0
    }
    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, p)?;
        let z: Complex<T> = p.to_complex(prec.plus_bits(GUARD_BITS));
        let one = creal(T::int_prec(1, prec));
        Ok(one.clone() / (one + z))
    }
    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, &plane_point(w)?)?;
        let one = creal(T::int_prec(1, prec));
        Ok(one.clone() / (one + w.clone()))
    }
    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(creal(signed_one(j, prec)))
    }
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        Evaluable::<T>::check_domain(self, p)?;
        Ok(geometric_remainders(p, nmax, prec))
    }
}

/// `z / (1 + z)` on `S_1`; maps `S_1` into the disc `|w - 1/2| < 1/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZOver1pz;

impl<T: Real> Evaluable<T> for ZOver1pz {
    fn kind(&self) -> String {
        "zover1pz".into()
    }
    fn domain(&self) -> Sector {
        s1()
    }
    fn uniform_bound(&self) -> f64 {
        1.0
    }
    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, p)?;
        let z: Complex<T> = p.to_complex(prec.plus_bits(GUARD_BITS));
        let one = creal(T::int_prec(1, prec));
        Ok(z.clone() / (one + z))
    }
    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, &plane_point(w)?)?;
        let one = creal(T::int_prec(1, prec));
        Ok(w.clone() / (one + w.clone()))
    }
    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(if j == 0 {
            Complex::zero()
        } else {
            creal(-signed_one::<T>(j, prec))
        })
    }
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let value = self.evaluate(p, prec)?;
        let mut out: Vec<Complex<T>> = geometric_remainders(p, nmax, prec).into_iter().map(|r| -r).collect();
        out[0] = value;
        Ok(out)
    }
}

/// `e^{-z}` on `S_1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpNeg;

impl ExpNeg {
    const SERIES_RADIUS: f64 = 2.0;
}

impl<T: Real> Evaluable<T> for ExpNeg {
    fn kind(&self) -> String {
        "expneg".into()
    }
    fn domain(&self) -> Sector {
        s1()
    }
    fn uniform_bound(&self) -> f64 {
        1.0
    }
    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, p)?;
        let z: Complex<T> = p.to_complex(prec.plus_bits(GUARD_BITS));
        Ok(cexp(&(-z)))
    }
    fn evaluate_plane(&self, w: &Complex<T>, _prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, &plane_point(w)?)?;
        Ok(cexp(&(-w.clone())))
    }
    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        let mut fact = T::int_prec(1, prec);
        for k in 2..=j {
            fact = fact * T::int_prec(k as i64, prec);
        }
        Ok(creal(signed_one::<T>(j, prec) / fact))
    }
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        Evaluable::<T>::check_domain(self, p)?;
        if p.r > Self::SERIES_RADIUS {
            return guarded_remainders(self, p, nmax, prec);
        }
        let wp = prec.plus_bits(GUARD_BITS);
        let mz = -p.to_complex::<T>(wp);
        let cut = (wp.bits() as f64 + 8.0) * std::f64::consts::LN_2;
        let mut terms = Vec::new();
        let mut t = creal(T::int_prec(1, wp));
        let mut ln_ref = f64::INFINITY;
        for k in 0.. {
            let ln_t = ln_cabs_f64(&t);
            if k == nmax {
                ln_ref = ln_t;
            }
            terms.push(t.clone());
            if k > nmax + 2 && ln_t < ln_ref - cut {
                break;
            }
            t = t * mz.clone() / creal(T::int_prec(k as i64 + 1, wp));
        }
        Ok(suffix_sums(&terms, nmax))
    }
}

/// The constant function `c` on a given sector.
#[derive(Clone, Copy, Debug)]
pub struct Constant {
    pub value: f64,
    pub sector: Sector,
}

impl<T: Real> Evaluable<T> for Constant {
    fn kind(&self) -> String {
        format!("constant:{}", self.value)
    }
    fn domain(&self) -> Sector {
        self.sector
    }
    fn uniform_bound(&self) -> f64 {
        self.value.abs()
    }
    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, p)?;
        Ok(creal(T::with_prec(self.value, prec)))
    }
    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        self.evaluate(&plane_point(w)?, prec)
    }
    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(if j == 0 {
            creal(T::with_prec(self.value, prec))
        } else {
            Complex::zero()
        })
    }
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let mut out = vec![Complex::zero(); nmax + 1];
        out[0] = self.evaluate(p, prec)?;
        Ok(out)
    }
}

/// A polynomial `sum_j c_j z^j` restricted to a sector; remainders are exact suffix sums.
#[derive(Clone, Debug)]
pub struct Polynomial {
    pub coeffs: Vec<Complex<f64>>,
    pub sector: Sector,
}

impl Polynomial {
    fn terms<T: Real>(&self, p: &LogPoint, prec: Precision) -> Vec<Complex<T>> {
        let z: Complex<T> = p.to_complex(prec);
        let mut zpow = creal(T::int_prec(1, prec));
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let c = Complex::new(T::with_prec(c.re, prec), T::with_prec(c.im, prec));
            out.push(c * zpow.clone());
            zpow = zpow * z.clone();
        }
        out
    }
}

impl<T: Real> Evaluable<T> for Polynomial {
    fn kind(&self) -> String {
        format!("polynomial:{}", self.coeffs.len())
    }
    fn domain(&self) -> Sector {
        self.sector
    }
    fn uniform_bound(&self) -> f64 {
        let r = self.sector.radius();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * r.powi(j as i32))
            .sum()
    }
    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        Evaluable::<T>::check_domain(self, p)?;
        Ok(self.terms::<T>(p, prec.plus_bits(GUARD_BITS)).into_iter().fold(Complex::zero(), |a, t| a + t))
    }
    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        Ok(self
            .coeffs
            .get(j)
            .map(|c| Complex::new(T::with_prec(c.re, prec), T::with_prec(c.im, prec)))
            .unwrap_or_else(Complex::zero))
    }
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        Evaluable::<T>::check_domain(self, p)?;
        let mut terms = self.terms::<T>(p, prec.plus_bits(GUARD_BITS));
        if terms.len() < nmax + 1 {
            terms.resize(nmax + 1, Complex::zero());
        }
        Ok(suffix_sums(&terms, nmax))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cabs, Scalar};
    use crate::Mpf;

    const P: Precision = Precision::from_bits(120);

    fn check_certificate(f: &dyn Evaluable<Mpf>) {
        let grid = f
            .domain()
            .sample_grid(&crate::sector::GridSpec::default().with_counts(20, 9))
            .unwrap();
        for p in &grid {
            let rems = f.remainders(p, 10, P).unwrap();
            let mut fact = 1f64;
            for (n, r) in rems.iter().enumerate() {
                if n > 0 {
                    fact *= n as f64;
                }
                let w = (ln_cabs_f64(r) - n as f64 * p.r.ln()).exp() / fact;
                assert!(w <= 1.0 + 1e-12, "{} n = {n} at {p:?}: {w}", f.kind());
            }
        }
    }

    #[test]
    fn certificates_over_gevrey() {
        check_certificate(&Recip1p);
        check_certificate(&ExpNeg);
        check_certificate(&ZOver1pz);
    }

    #[test]
    fn structural_remainders_match_subtraction() {
        let p = LogPoint::new(0.7, 0.4).unwrap();
        for f in [&Recip1p as &dyn Evaluable<Mpf>, &ExpNeg, &ZOver1pz] {
            let fast = f.remainders(&p, 8, P).unwrap();
            let slow = guarded_remainders(f, &p, 8, P).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!(cabs(&(a.clone() - b.clone())).to_f64() <= 1e-30 * cabs(b).to_f64());
            }
        }
    }

    #[test]
    fn polynomial_remainders_vanish_past_degree() {
        let poly = Polynomial {
            coeffs: vec![Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0), Complex::new(0.5, 0.0)],
            sector: Sector::bounded(1.0, 3.0).unwrap(),
        };
        let rems = Evaluable::<Mpf>::remainders(&poly, &LogPoint::new(2.0, 0.3).unwrap(), 5, P).unwrap();
        for r in &rems[3..] {
            assert!(r.is_zero());
        }
        assert!(!rems[2].is_zero());
    }

    #[test]
    fn constant_function() {
        let c = Constant {
            value: 2.5,
            sector: Sector::s_alpha(2.0).unwrap(),
        };
        let v: Complex<Mpf> = c.evaluate(&LogPoint::on_bisector(40.0), P).unwrap();
        assert_eq!(v.re.to_f64(), 2.5);
    }
}
