//! Truncated asymptotic expansions carrying a remainder certificate.
//!
//! A [`CertifiedExpansion`] stores `c_0, ..., c_{N-1}` together with constants
//! `(A, h)` and a weight sequence `M` such that
//! `|r(z, n)| <= A h^n M_n |z|^n` on the sector for `0 <= n <= N`.
//! Products, powers and compositions propagate the certificate with the
//! closure constants of the class, always rounding upward.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basis_fn::{remainders_against, Evaluable};
use crate::error::{Error, Result};
use crate::scalar::{norm_sqr, Precision, Rational, Real, Scalar};
use crate::sector::{LogPoint, Sector};
use crate::series;
use crate::weight_seq::WeightSequence;
use crate::Mpf;

/// Tolerance for the `c_0 = 0` precondition in floating arithmetic.
pub const TAU_ZERO: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedExpansion<T> {
    coeffs: Vec<Complex<T>>,
    seq: WeightSequence<T>,
    a: T,
    h: T,
    sector: Sector,
}

/// `|c| <= bound`, decided on squares so that exact backends stay exact.
fn modulus_at_most<T: Scalar>(c: &Complex<T>, bound: &T) -> bool {
    norm_sqr(c) <= bound.clone() * bound.clone()
}

/// `|re| + |im|`, an upper bound for `|c|` that needs no square root.
fn l1_norm<T: Scalar>(c: &Complex<T>) -> T {
    c.re.abs() + c.im.abs()
}

fn is_zero_within<T: Scalar>(c: &Complex<T>) -> bool {
    if T::EXACT {
        c.is_zero()
    } else {
        c.re.to_f64().hypot(c.im.to_f64()) <= TAU_ZERO
    }
}

/// `h' = C (h_1 + h_2)`, the step constant of a product certificate.
pub fn product_step<T: Scalar>(alg_c: &T, h1: &T, h2: &T) -> T {
    (alg_c.clone() * (h1.clone() + h2.clone())).up()
}

/// `h_3 = B h_1 (1 + A_1 h_2)`, the step constant of a composition certificate.
pub fn compose_step<T: Scalar>(fdb_b: &T, h1: &T, a1: &T, h2: &T) -> T {
    (fdb_b.clone() * h1.clone() * (T::one() + a1.clone() * h2.clone())).up()
}

impl<T: Scalar> CertifiedExpansion<T> {
    /// Validates `A, h > 0`, `M_N` available and `|c_n| <= A h^n M_n` for every stored `n`.
    pub fn new(coeffs: Vec<Complex<T>>, seq: WeightSequence<T>, a: T, h: T, sector: Sector) -> Result<Self> {
        if !(a > T::zero()) || !(h > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "certificate constants must be positive, got A = {a}, h = {h}"
            )));
        }
        if seq.depth() < coeffs.len() {
            return Err(Error::InsufficientDepth {
                requested: coeffs.len(),
                available: seq.depth() + 1,
            });
        }
        let e = CertifiedExpansion {
            coeffs,
            seq,
            a,
            h,
            sector,
        };
        if let Some(n) = e.first_coefficient_violation() {
            return Err(Error::InvalidArgument(format!(
                "|c_{n}| exceeds A h^n M_n for the stated certificate"
            )));
        }
        Ok(e)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn seq(&self) -> &WeightSequence<T> {
        &self.seq
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn h(&self) -> &T {
        &self.h
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Number of stored coefficients `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `A h^n M_n` for `0 <= n <= N`.
    pub fn bounds(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.order() + 1);
        let mut hn = T::one();
        for n in 0..=self.order() {
            out.push(self.a.clone() * hn.clone() * self.seq.values()[n].clone());
            hn = hn * self.h.clone();
        }
        out
    }

    fn first_coefficient_violation(&self) -> Option<usize> {
        let b = self.bounds();
        self.coeffs.iter().zip(&b).position(|(c, b)| !modulus_at_most(c, b))
    }

    pub fn coefficient_bound_holds(&self) -> bool {
        self.first_coefficient_violation().is_none()
    }

    fn check_same_sequence(&self, other: &Self, n: usize) -> Result<()> {
        if self.seq.generator() != other.seq.generator() || self.seq.values()[..=n] != other.seq.values()[..=n] {
            return Err(Error::SequenceMismatch);
        }
        Ok(())
    }

    /// Cauchy product with certificate `(2 A_1 A_2, C (h_1 + h_2))`.
    pub fn product(&self, other: &Self, alg_c: &T) -> Result<Self> {
        let n = self.order().min(other.order());
        self.check_same_sequence(other, n)?;
        if self.sector != other.sector {
            return Err(Error::SectorMismatch);
        }
        let a = (T::from_i64(2) * self.a.clone() * other.a.clone()).up();
        let h = product_step(alg_c, &self.h, &other.h);
        let coeffs = series::convolve(&self.coeffs, &other.coeffs, n);
        Self::new(coeffs, self.seq.clone(), a, h, self.sector)
    }

    /// Coefficients of `f^k` up to the stored order.
    pub fn power_coeffs(&self, k: usize) -> Vec<Complex<T>> {
        series::power_coeffs(&self.coeffs, k, self.order())
    }

    /// Remainder bounds for `f^j` with `c_0 = 0`: `b(n) = A^j h^n S(j, n)` for `j <= n <= N`.
    pub fn power_certificate(&self, j: usize) -> Result<PowerBoundTable<T>> {
        if j == 0 {
            return Err(Error::InvalidArgument("power index must be at least 1".into()));
        }
        self.require_zero_constant()?;
        let n = self.order();
        if n < j {
            return Ok(PowerBoundTable {
                j,
                bounds: Vec::new(),
            });
        }
        let table = self.seq.composition_sum_table(j, n)?;
        let aj = self.a.powi(j as i64);
        let mut hn = self.h.powi(j as i64);
        let mut bounds = Vec::with_capacity(n - j + 1);
        for m in j..=n {
            bounds.push((aj.clone() * hn.clone() * table[j][m].clone()).up());
            hn = hn * self.h.clone();
        }
        Ok(PowerBoundTable { j, bounds })
    }

    fn require_zero_constant(&self) -> Result<()> {
        match self.coeffs.first() {
            Some(c0) if !is_zero_within(c0) => Err(Error::NonzeroConstantTerm {
                value: c0.re.to_decimal(),
                tolerance: if T::EXACT { 0.0 } else { TAU_ZERO },
            }),
            _ => Ok(()),
        }
    }

    /// `g o f` for `g = self`, `f = inner` with `c^f_0 = 0`; certificate
    /// `(C A_g, B h_f (1 + A_f h_g))` from the (FdB) witnesses `C, B`.
    pub fn compose(&self, inner: &Self, fdb_c: &T, fdb_b: &T) -> Result<Self> {
        inner.require_zero_constant()?;
        let n = self.order().min(inner.order());
        self.check_same_sequence(inner, n)?;
        let mut f = inner.coeffs[..n].to_vec();
        if let Some(c0) = f.first_mut() {
            *c0 = Complex::zero();
        }
        let coeffs = series::compose(&self.coeffs, &f, n);
        let a = (fdb_c.clone() * self.a.clone()).up();
        let h = compose_step(fdb_b, &inner.h, &inner.a, &self.h);
        Self::new(coeffs, inner.seq.clone(), a, h, inner.sector)
    }

    /// Expansion of `c_0 - f`: coefficients `(0, -c_1, ...)`, `A_0 = max(A, |c_0| + A)`.
    pub fn shift_subtract(&self) -> Self {
        let mut coeffs: Vec<Complex<T>> = self.coeffs.iter().map(|c| -c.clone()).collect();
        let c0 = match coeffs.first_mut() {
            Some(c) => std::mem::replace(c, Complex::zero()),
            None => Complex::zero(),
        };
        let a = self.a.clone().max_of((l1_norm(&c0) + self.a.clone()).up());
        CertifiedExpansion {
            coeffs,
            seq: self.seq.clone(),
            a,
            h: self.h.clone(),
            sector: self.sector,
        }
    }

    /// Same data with every scalar mapped through `f`; the certificate is
    /// mapped through `up` so it stays an over-approximation.
    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U, up: impl Fn(&T) -> U) -> Result<CertifiedExpansion<U>> {
        let coeffs = self.coeffs.iter().map(|c| Complex::new(f(&c.re), f(&c.im))).collect();
        let values = self.seq.values().iter().map(&f).collect();
        let seq = WeightSequence::custom(values)?.with_generator(self.seq.generator().clone());
        CertifiedExpansion::new(coeffs, seq, up(&self.a), up(&self.h), self.sector)
    }

    pub fn to_record(&self) -> ExpansionRecord {
        ExpansionRecord {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.re.to_decimal(), c.im.to_decimal()])
                .collect(),
            seq_id: self.seq.generator().tag(),
            a: self.a.to_decimal(),
            h: self.h.to_decimal(),
            sector: self.sector,
            order: self.order(),
        }
    }
}

impl CertifiedExpansion<Mpf> {
    /// Exact rational image: coefficients and sequence are converted exactly,
    /// the certificate is unchanged in value.
    pub fn to_rational(&self) -> Result<CertifiedExpansion<Rational>> {
        let conv = |x: &Mpf| x.to_rational().expect("finite value");
        self.map_scalar(conv, conv)
    }
}

/// Bounds `|r_{f^j}(z, n)| <= b(n) |z|^n` for `j <= n <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerBoundTable<T> {
    pub j: usize,
    /// `bounds[i]` belongs to `n = j + i`.
    pub bounds: Vec<T>,
}

impl<T> PowerBoundTable<T> {
    pub fn get(&self, n: usize) -> Option<&T> {
        n.checked_sub(self.j).and_then(|i| self.bounds.get(i))
    }
}

/// JSON form of an expansion; every number is a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub coeffs: Vec<[String; 2]>,
    pub seq_id: String,
    #[serde(rename = "A")]
    pub a: String,
    pub h: String,
    pub sector: Sector,
    pub order: usize,
}

/// Right-hand side of the product remainder formula at one point:
/// `r_f(z,n) g(z) + sum_{k<n} c^f_k z^k r_g(z, n-k)`, with remainders taken
/// against the expansions' stored coefficients.
pub fn product_remainder_formula<T: Real>(
    e1: &CertifiedExpansion<T>,
    e2: &CertifiedExpansion<T>,
    f: &dyn Evaluable<T>,
    g: &dyn Evaluable<T>,
    z: &LogPoint,
    n: usize,
    prec: Precision,
) -> Result<Complex<T>> {
    if n > e1.order() || n > e2.order() {
        return Err(Error::InsufficientDepth {
            requested: n,
            available: e1.order().min(e2.order()),
        });
    }
    let rf = remainders_against(f, z, &e1.coeffs[..n], n, prec)?;
    let rg = remainders_against(g, z, &e2.coeffs[..n], n, prec)?;
    let zc: Complex<T> = z.to_complex(prec.plus_bits(16));
    Ok(crate::basis_fn::combinators::product_remainders(&rf, &rg, &e1.coeffs, &zc, n)[n].clone())
}

/// Polynomial remainder `r_p(., n)`: the coefficients of `p` from degree `n` on, in place.
pub fn poly_remainder<T: Scalar>(p: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    p.iter()
        .enumerate()
        .map(|(k, c)| if k < n { Complex::zero() } else { c.clone() })
        .collect()
}

fn poly_mul<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    series::convolve(a, b, a.len() + b.len() - 1)
}

fn poly_add<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); a.len().max(b.len())];
    for (k, c) in a.iter().enumerate() {
        out[k] = out[k].clone() + c.clone();
    }
    for (k, c) in b.iter().enumerate() {
        out[k] = out[k].clone() + c.clone();
    }
    out
}

fn shift<T: Scalar>(a: &[Complex<T>], k: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); k];
    out.extend_from_slice(a);
    out
}

/// Product remainder formula for polynomials, as a polynomial in `z`.
pub fn product_remainder_poly<T: Scalar>(f: &[Complex<T>], g: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = poly_mul(&poly_remainder(f, n), g);
    for k in 0..n.min(f.len()) {
        let term: Vec<Complex<T>> = poly_remainder(g, n - k).iter().map(|c| c.clone() * f[k].clone()).collect();
        out = poly_add(&out, &shift(&term, k));
    }
    out
}

/// `r_{f^j}(., n)` for a polynomial `f` with `f(0) = 0`, by the recursion
/// `r_{f^j}(z,n) = sum_{i=1}^{n-j} c_i z^i r_{f^{j-1}}(z,n-i) + r_f(z,n-j+1) f(z)^{j-1}`.
pub fn power_remainder_poly<T: Scalar>(f: &[Complex<T>], j: usize, n: usize) -> Vec<Complex<T>> {
    assert!(j >= 1 && n >= j, "recursion needs 1 <= j <= n");
    if j == 1 {
        return poly_remainder(f, n);
    }
    let mut fpow = vec![Complex::new(T::one(), T::zero())];
    for _ in 1..j {
        fpow = poly_mul(&fpow, f);
    }
    let mut out = poly_mul(&poly_remainder(f, n - j + 1), &fpow);
    for i in 1..=(n - j) {
        if let Some(ci) = f.get(i) {
            if ci.is_zero() {
                continue;
            }
            let inner: Vec<Complex<T>> = power_remainder_poly(f, j - 1, n - i)
                .into_iter()
                .map(|c| c * ci.clone())
                .collect();
            out = poly_add(&out, &shift(&inner, i));
        }
    }
    out
}
