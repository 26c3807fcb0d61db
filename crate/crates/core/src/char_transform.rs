//! The characteristic transform
//! `T_M(f)(z) = sum_n 2^{-n} (M_n / m_n^n) f(m_n z)` and the construction of
//! characteristic functions from the basic functions.
//!
//! For log-convex `M` every weight `M_n / m_n^n` is at most one, so the
//! transform of a bounded function converges geometrically, and it multiplies
//! the expansion coefficients by `R_j = sum_n 2^{-n} (M_n / m_n^n) m_n^j`,
//! which lies in `[2^{-j} M_j, 2 M_j]`.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::basis_fn::{ETilde, Evaluable, FAlpha, KRs, SharedFn};
use crate::error::{Error, Result};
use crate::expansion::{CertifiedExpansion, ExpansionRecord};
use crate::scalar::{cscale, ln_cabs_f64, Precision, Real, Scalar};
use crate::sector::{GridSpec, LogPoint, Sector};
use crate::verify::{measure_remainders, Grid};
use crate::weight_seq::{equivalence_fit, WeightSequence};

/// Number of transform terms kept by [`TransformedFn`] and the expansions built for it.
pub const DEFAULT_TRANSFORM_TERMS: usize = 96;

/// Window used to accept an lc witness for `L`.
pub const WITNESS_DEPTH: usize = 40;

/// Largest drift of the witness window logs between half and full window.
const WITNESS_DRIFT: f64 = 0.0953; // ln 1.1

/// A partial sum of `R_j` and an upper bound for its distance to `R_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RValue<T> {
    pub value: T,
    pub err: T,
    pub terms: usize,
}

impl<T: Scalar> RValue<T> {
    pub fn lower(&self) -> T {
        self.value.clone() - self.err.clone()
    }

    pub fn upper(&self) -> T {
        self.value.clone() + self.err.clone()
    }

    pub fn to_record(&self) -> RValueRecord {
        RValueRecord {
            value: self.value.to_decimal(),
            err: self.err.to_decimal(),
            terms: self.terms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RValueRecord {
    pub value: String,
    pub err: String,
    pub terms: usize,
}

fn require_lc<T: Scalar>(m: &WeightSequence<T>) -> Result<()> {
    match m.is_log_convex().first_violation {
        Some(j) => Err(Error::NotLogConvex(j)),
        None => Ok(()),
    }
}

fn pow2_neg<T: Scalar>(k: usize) -> T {
    T::from_f64((-(k as f64)).exp2())
}

/// `2^{-k} M_k / m_k^k` and `m_k` for `k < terms`.
fn weights_and_quotients<T: Scalar>(m: &WeightSequence<T>, terms: usize) -> Result<(Vec<T>, Vec<T>)> {
    if m.depth() < terms {
        return Err(Error::InsufficientDepth {
            requested: terms,
            available: m.depth() + 1,
        });
    }
    let vals = m.values();
    let mut weights = Vec::with_capacity(terms);
    let mut quotients = Vec::with_capacity(terms);
    for k in 0..terms {
        let q = vals[k + 1].clone() / vals[k].clone();
        weights.push(vals[k].clone() / q.powi(k as i64) * pow2_neg::<T>(k));
        quotients.push(q);
    }
    Ok((weights, quotients))
}

fn r_partial<T: Scalar>(weights: &[T], quotients: &[T], j: usize) -> T {
    weights
        .iter()
        .zip(quotients)
        .fold(T::zero(), |acc, (w, q)| acc + w.clone() * q.powi(j as i64))
}

/// `R_j` summed over its first `terms` terms, with the tail bound
/// `2^{-terms+1} M_j` plus a rounding allowance for inexact scalars.
pub fn r_seq_terms<T: Scalar>(m: &WeightSequence<T>, j: usize, terms: usize) -> Result<RValue<T>> {
    require_lc(m)?;
    if terms == 0 {
        return Err(Error::InvalidArgument("R_j needs at least one term".into()));
    }
    let (weights, quotients) = weights_and_quotients(m, terms)?;
    let mj = m.get(j)?.clone();
    let value = r_partial(&weights, &quotients, j);
    let tail = mj * pow2_neg::<T>(terms - 1);
    let rounding = if T::EXACT {
        T::zero()
    } else {
        let u = value.unit_roundoff().max(m.get(j)?.unit_roundoff());
        (value.clone() * T::from_f64(u * (4 * terms + 4 * (j + 16)) as f64)).up()
    };
    Ok(RValue {
        value,
        err: (tail + rounding).up(),
        terms,
    })
}

/// `R_j` with the truncation tail below `tol`.
pub fn r_seq<T: Scalar>(m: &WeightSequence<T>, j: usize, tol: &T) -> Result<RValue<T>> {
    if !(*tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mj = m.get(j)?;
    let ln2 = std::f64::consts::LN_2;
    let est = (ln2 + mj.ln_abs_f64() - tol.ln_abs_f64()) / ln2;
    let mut terms = (est.ceil().max(0.0) as usize + 1).max(1);
    while mj.clone() * pow2_neg::<T>(terms - 1) > *tol {
        terms += 1;
    }
    while terms > 1 && mj.clone() * pow2_neg::<T>(terms - 2) <= *tol {
        terms -= 1;
    }
    r_seq_terms(m, j, terms)
}

/// `T_M(f)(z)` with the tail below `tol`, using `sup |f| * 2^{-N+1} <= tol`.
pub fn transform_eval<T: Real>(
    m: &WeightSequence<T>,
    f: &dyn Evaluable<T>,
    p: &LogPoint,
    tol: f64,
    prec: Precision,
) -> Result<Complex<T>> {
    if !f.domain().is_unbounded() {
        return Err(Error::DomainNotUnbounded);
    }
    require_lc(m)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    f.check_domain(p)?;
    let bound = f.uniform_bound();
    if !bound.is_finite() {
        return Err(Error::InvalidArgument(format!("{} has no finite uniform bound", f.kind())));
    }
    let terms = ((2.0 * bound / tol).log2().ceil().max(0.0) as usize).max(1);
    let (weights, quotients) = weights_and_quotients(m, terms)?;
    let mut acc: Complex<T> = Complex::zero();
    for (w, q) in weights.iter().zip(&quotients) {
        let v = f.evaluate(&p.scaled(q.to_f64()), prec)?;
        acc = acc + cscale(&v, &w.to_prec(prec));
    }
    Ok(acc)
}

/// The first `terms` terms of `T_L(f)`, an evaluator in its own right.
///
/// Coefficients are `R^{(K)}_j c_j` with the `K`-term partial sums of `R_j`,
/// which makes them the exact coefficients of the truncated transform.
pub struct TransformedFn<T> {
    base: SharedFn<T>,
    seq: WeightSequence<T>,
    weights: Vec<T>,
    quotients: Vec<T>,
    scales: Vec<f64>,
}

impl<T: Real> TransformedFn<T> {
    pub fn new(base: SharedFn<T>, seq: WeightSequence<T>, terms: usize) -> Result<Self> {
        if !base.domain().is_unbounded() {
            return Err(Error::DomainNotUnbounded);
        }
        require_lc(&seq)?;
        let (weights, quotients) = weights_and_quotients(&seq, terms)?;
        let scales = quotients.iter().map(Scalar::to_f64).collect();
        Ok(TransformedFn {
            base,
            seq,
            weights,
            quotients,
            scales,
        })
    }

    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    pub fn seq(&self) -> &WeightSequence<T> {
        &self.seq
    }

    pub fn base(&self) -> &SharedFn<T> {
        &self.base
    }

    pub fn r_partial(&self, j: usize) -> T {
        r_partial(&self.weights, &self.quotients, j)
    }
}

impl<T: Real> Evaluable<T> for TransformedFn<T> {
    fn kind(&self) -> String {
        format!("transform({},{})", self.seq.generator().tag(), self.base.kind())
    }

    fn domain(&self) -> Sector {
        self.base.domain()
    }

    fn uniform_bound(&self) -> f64 {
        2.0 * self.base.uniform_bound()
    }

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>> {
        self.check_domain(p)?;
        let mut acc: Complex<T> = Complex::zero();
        for (w, s) in self.weights.iter().zip(&self.scales) {
            let v = self.base.evaluate(&p.scaled(*s), prec)?;
            acc = acc + cscale(&v, w);
        }
        Ok(acc)
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>> {
        let c = self.base.coefficient(j, prec)?;
        Ok(cscale(&c, &self.r_partial(j)))
    }

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        let c = self.base.coefficients(n, prec)?;
        Ok(c.iter().enumerate().map(|(j, c)| cscale(c, &self.r_partial(j))).collect())
    }

    /// `r(z, n) = sum_k 2^{-k} (L_k / m_k^k) r_f(m_k z, n)`.
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        self.check_domain(p)?;
        let mut acc: Vec<Complex<T>> = vec![Complex::zero(); nmax + 1];
        for (w, s) in self.weights.iter().zip(&self.scales) {
            let r = self.base.remainders(&p.scaled(*s), nmax, prec)?;
            for (a, r) in acc.iter_mut().zip(&r) {
                *a = a.clone() + cscale(r, w);
            }
        }
        Ok(acc)
    }
}

/// Coefficients `R_j c_j` over `L M` with certificate `(2A, h)`, using the
/// `terms`-term partial sums of `R_j` (the expansion of [`TransformedFn`]).
pub fn transform_expansion_terms<T: Scalar>(
    m: &WeightSequence<T>,
    e: &CertifiedExpansion<T>,
    terms: usize,
) -> Result<(CertifiedExpansion<T>, Vec<RValue<T>>)> {
    require_lc(m)?;
    let depth = e.seq().depth().min(m.depth());
    if depth < e.order() {
        return Err(Error::InsufficientDepth {
            requested: e.order(),
            available: depth + 1,
        });
    }
    let seq = e.seq().truncated(depth)?.pointwise_product(&m.truncated(depth)?)?;
    let r: Vec<RValue<T>> = (0..e.order())
        .map(|j| r_seq_terms(m, j, terms))
        .collect::<Result<_>>()?;
    let coeffs = e
        .coeffs()
        .iter()
        .zip(&r)
        .map(|(c, r)| cscale(c, &r.value))
        .collect();
    let a = (e.a().clone() * T::from_i64(2)).up();
    let out = CertifiedExpansion::new(coeffs, seq, a, e.h().clone(), e.sector())?;
    Ok((out, r))
}

/// [`transform_expansion_terms`] with [`DEFAULT_TRANSFORM_TERMS`].
pub fn transform_expansion<T: Scalar>(
    m: &WeightSequence<T>,
    e: &CertifiedExpansion<T>,
) -> Result<CertifiedExpansion<T>> {
    Ok(transform_expansion_terms(m, e, DEFAULT_TRANSFORM_TERMS)?.0)
}

/// Where the remainder certificate of the base function comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    /// The constant stated for the function in the literature.
    Paper,
    /// A closed-form estimate of the Taylor remainder.
    Analytic,
    /// FR1 fit of measured grid sups; evidence, not a proof.
    Fitted,
}

#[derive(Clone, Debug)]
pub struct CharacteristicOptions {
    /// Number of expansion coefficients kept.
    pub order: usize,
    pub terms: usize,
    pub precision: Precision,
    /// Grid used when the base certificate has to be fitted.
    pub fit_grid: GridSpec,
    pub fit_nmax: usize,
}

impl Default for CharacteristicOptions {
    fn default() -> Self {
        CharacteristicOptions {
            order: 30,
            terms: DEFAULT_TRANSFORM_TERMS,
            precision: Precision::default(),
            fit_grid: GridSpec {
                n_r: 10,
                n_theta: 5,
                r_min: 1e-3,
                r_max: 10.0,
                margin: 0.05,
            },
            fit_nmax: 12,
        }
    }
}

pub struct TransformResult<T> {
    pub base: SharedFn<T>,
    pub lc_seq: WeightSequence<T>,
    pub r_values: Vec<RValue<T>>,
    pub result: SharedFn<T>,
    pub expansion: CertifiedExpansion<T>,
    pub base_expansion: CertifiedExpansion<T>,
    pub certificate_source: CertificateSource,
}

impl<T: Real> std::fmt::Debug for TransformResult<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformResult")
            .field("base", &self.base.kind())
            .field("lc_seq", &self.lc_seq.generator().tag())
            .field("order", &self.expansion.order())
            .field("certificate_source", &self.certificate_source)
            .finish()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformRecord {
    pub base: String,
    pub lc_seq: String,
    pub r_values: Vec<RValueRecord>,
    pub expansion: ExpansionRecord,
    pub certificate_source: CertificateSource,
}

impl<T: Real> TransformResult<T> {
    pub fn to_record(&self) -> TransformRecord {
        TransformRecord {
            base: self.base.kind(),
            lc_seq: self.lc_seq.generator().tag(),
            r_values: self.r_values.iter().map(RValue::to_record).collect(),
            expansion: self.expansion.to_record(),
            certificate_source: self.certificate_source,
        }
    }
}

fn witness_accepted<T: Scalar>(l: &WeightSequence<T>, w: &WeightSequence<T>) -> Result<bool> {
    if !w.is_log_convex().flag {
        return Ok(false);
    }
    let full = equivalence_fit(l, w, WITNESS_DEPTH)?;
    let half = equivalence_fit(l, w, WITNESS_DEPTH / 2)?;
    let finite = full.log_low.is_finite() && full.log_high.is_finite();
    let stable = (full.log_low - half.log_low).abs() <= WITNESS_DRIFT
        && (full.log_high - half.log_high).abs() <= WITNESS_DRIFT;
    Ok(finite && stable)
}

/// Measured certificate `(A, h)` of `f` over `seq`, also dominating the
/// coefficient ratios `|c_n| / M_n` for `n < order`.
pub fn fitted_certificate<T: Real>(
    f: &dyn Evaluable<T>,
    coeffs: &[Complex<T>],
    seq: &WeightSequence<T>,
    opts: &CharacteristicOptions,
) -> Result<(T, T)> {
    let nmax = opts.fit_nmax.min(coeffs.len());
    let grid = Grid {
        sector: f.domain(),
        spec: opts.fit_grid,
    };
    let report = measure_remainders(f, &coeffs[..nmax], seq, &grid, nmax, opts.precision)?;
    let mut ratios = report.w.clone();
    for (n, c) in coeffs.iter().enumerate() {
        let r = (ln_cabs_f64(c) - seq.get(n)?.ln_abs_f64()).exp();
        if n < ratios.len() {
            ratios[n] = ratios[n].max(r);
        } else {
            ratios.push(r);
        }
    }
    let fit = crate::TwoParamFit::<f64>::fr1(ratios);
    let pad = 1.0 + 1e-9;
    Ok((
        T::with_prec(fit.a_fit * pad, opts.precision),
        T::with_prec(fit.h_fit * pad, opts.precision),
    ))
}

/// A characteristic function for the class of `M` on `S_alpha`: the
/// transform `T_L` of `E~_alpha`, `K_RS` or `f_{alpha, alpha'}` with
/// `L = Gbar^{2-alpha} M`, `M` or `Gbar^{2-alpha'} M`.
pub fn characteristic_for<T: Real>(
    m: &WeightSequence<T>,
    alpha: f64,
    alphaprime: Option<f64>,
    lc_witness: Option<&WeightSequence<T>>,
    opts: &CharacteristicOptions,
) -> Result<TransformResult<T>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let prec = opts.precision;
    let depth = opts.terms.max(opts.order) + 1;
    let m = if m.depth() < depth { m.with_depth(depth)? } else { m.truncated(depth)? };
    let (base, base_seq, shift): (SharedFn<T>, WeightSequence<T>, Option<f64>) = if alpha < 2.0 {
        let seq = WeightSequence::power_gevrey(alpha - 2.0, depth, prec)?;
        (Arc::new(ETilde::<T>::new(alpha)?), seq, Some(2.0 - alpha))
    } else if alpha == 2.0 {
        (Arc::new(KRs::<T>::new()), WeightSequence::constant_one(depth), None)
    } else {
        let ap = match alphaprime {
            Some(ap) if ap > alpha => ap,
            _ => return Err(Error::AlphaprimeMissing),
        };
        let seq = WeightSequence::power_gevrey(ap - 2.0, depth, prec)?;
        (Arc::new(FAlpha::<T>::new(alpha, ap)?), seq, Some(2.0 - ap))
    };
    let l = match shift {
        Some(a) => WeightSequence::power_gevrey(a, depth, prec)?.pointwise_product(&m)?,
        None => m.clone(),
    };
    let l = match l.is_log_convex().first_violation {
        None => l,
        Some(j) => match lc_witness {
            Some(w) if w.depth() >= depth && witness_accepted(&l, w)? => w.truncated(depth)?,
            Some(_) => {
                return Err(Error::NoLcWitness(format!(
                    "L fails log-convexity at j = {j} and the witness is not window-equivalent"
                )))
            }
            None => return Err(Error::NoLcWitness(format!("L fails log-convexity at j = {j}"))),
        },
    };

    let coeffs = base.coefficients(opts.order, prec)?;
    let (a, h, source) = if alpha == 2.0 {
        (T::with_prec(4.0, prec), T::with_prec(1.0, prec), CertificateSource::Paper)
    } else if alpha == 1.0 {
        let e = T::with_prec(1.0, prec).exp().up();
        (T::with_prec(0.5, prec), e, CertificateSource::Analytic)
    } else {
        let (a, h) = fitted_certificate(base.as_ref(), &coeffs, &base_seq, opts)?;
        (a, h, CertificateSource::Fitted)
    };
    let base_expansion = CertifiedExpansion::new(coeffs, base_seq, a, h, base.domain())?;
    let (expansion, r_values) = transform_expansion_terms(&l, &base_expansion, opts.terms)?;
    let result: SharedFn<T> = Arc::new(TransformedFn::new(base.clone(), l.clone(), opts.terms)?);
    Ok(TransformResult {
        base,
        lc_seq: l,
        r_values,
        result,
        expansion,
        base_expansion,
        certificate_source: source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_fn::Constant;
    use crate::scalar::{cabs_f64, creal};
    use crate::Scalar;
    use crate::{Mpf, Rational};
    use num_traits::One;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn mp(bits: u32) -> Precision {
        Precision::from_bits(bits)
    }

    #[test]
    fn constant_sequence_gives_two() {
        let one = WeightSequence::<Rational>::constant_one(80);
        for j in [0, 3, 10] {
            let r = r_seq(&one, j, &Rational::new(1.into(), (1i64 << 40).into())).unwrap();
            // partial sum 2 - 2^{-N+1}, tail exactly the rest
            assert_eq!(r.value.clone() + r.err.clone(), q(2));
            assert!(r.err <= Rational::new(1.into(), (1i64 << 40).into()));
        }
    }

    #[test]
    fn lemma_bounds_hold_for_gevrey() {
        let g1 = WeightSequence::<Rational>::gevrey(1.0, 90, Precision::DOUBLE).unwrap();
        for j in 0..=20 {
            let mj = g1.get(j).unwrap().clone();
            let tol = mj.clone() / Rational::from_integer(num_bigint::BigInt::from(1u8) << (j + 20));
            let r = r_seq(&g1, j, &tol).unwrap();
            let low = mj.clone() / Rational::from_integer(num_bigint::BigInt::from(1u8) << j);
            assert!(r.lower() >= low, "j = {j}");
            assert!(r.upper() <= mj * q(2), "j = {j}");
        }
    }

    #[test]
    fn r0_for_gevrey_by_direct_summation() {
        // R_0 = sum 2^{-n} n! / (n+1)^n
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 200, mp(128)).unwrap();
        let r = r_seq(&g1, 0, &Mpf::with_prec(1e-30, mp(128))).unwrap();
        let mut direct = 0f64;
        let mut fact = 1f64;
        for n in 0..60 {
            if n > 0 {
                fact *= n as f64;
            }
            direct += fact / ((n + 1) as f64).powi(n) / 2f64.powi(n);
        }
        assert!((r.value.to_f64() - direct).abs() < 1e-14);
        assert!(r.value.to_f64() >= 1.0 && r.value.to_f64() <= 2.0);
    }

    #[test]
    fn non_lc_is_rejected() {
        let bad = WeightSequence::custom(vec![q(1), q(3), q(4), q(5)]).unwrap();
        assert_eq!(r_seq(&bad, 1, &q(1)).unwrap_err(), Error::NotLogConvex(1));
    }

    #[test]
    fn constant_function_doubles() {
        let c = Constant {
            value: 0.75,
            sector: Sector::s_alpha(2.0).unwrap(),
        };
        let one = WeightSequence::<Mpf>::constant_one(80);
        let p = LogPoint::new(0.3, 0.4).unwrap();
        let v = transform_eval(&one, &c, &p, 1e-18, mp(96)).unwrap();
        assert!((v.re.to_f64() - 1.5).abs() < 1e-17);
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 80, mp(96)).unwrap();
        let bounded = Constant {
            value: 1.0,
            sector: Sector::bounded(1.0, 2.0).unwrap(),
        };
        assert_eq!(
            transform_eval(&g1, &bounded, &LogPoint::on_bisector(0.1), 1e-6, mp(64)).unwrap_err(),
            Error::DomainNotUnbounded
        );
    }

    #[test]
    fn krs_transform_matches_its_expansion() {
        let prec = mp(96);
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, prec).unwrap();
        let krs: SharedFn<Mpf> = Arc::new(KRs::<Mpf>::new());
        let p = LogPoint::on_bisector(0.01);
        let v = transform_eval(&g1, krs.as_ref(), &p, 1e-25, prec).unwrap();
        let r0 = r_seq(&g1, 0, &Mpf::with_prec(1e-25, prec)).unwrap().value;
        let r1 = r_seq(&g1, 1, &Mpf::with_prec(1e-25, prec)).unwrap().value;
        let pred = r0.to_f64() * 0.5 - r1.to_f64() * 0.01 / 6.0;
        // next term R_2 c_2 z^2 with |R_2| <= 2 * 2
        assert!((v.re.to_f64() - pred).abs() <= 2.0 * 4.0 * 1e-4 / 12.0 + 1e-20);
    }

    #[test]
    fn transformed_fn_is_consistent() {
        let prec = mp(96);
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 100, prec).unwrap();
        let krs: SharedFn<Mpf> = Arc::new(KRs::<Mpf>::new());
        let t = TransformedFn::new(krs.clone(), g1.clone(), 64).unwrap();
        let p = LogPoint::new(0.7, 1.0).unwrap();
        let direct = t.evaluate(&p, prec).unwrap();
        let viaeval = transform_eval(&g1, krs.as_ref(), &p, 1e-17, prec).unwrap();
        assert!(cabs_f64(&(direct.clone() - viaeval)) < 1e-16);
        let rems = t.remainders(&p, 6, prec).unwrap();
        let c = t.coefficients(6, prec).unwrap();
        let z: Complex<Mpf> = p.to_complex(prec);
        let mut partial: Complex<Mpf> = Complex::zero();
        let mut zp = creal(Mpf::with_prec(1.0, prec));
        for n in 0..=6 {
            let diff = cabs_f64(&(direct.clone() - partial.clone() - rems[n].clone()));
            assert!(diff < 1e-14, "n = {n}: {diff}");
            if n < 6 {
                partial = partial + c[n].clone() * zp.clone();
                zp = zp * z.clone();
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let one = WeightSequence::<Rational>::constant_one(100);
        let coeffs = vec![creal(q(1)), creal(Rational::new((-1).into(), 6.into()))];
        let e = CertifiedExpansion::new(coeffs, one.clone(), q(4), q(1), Sector::s_alpha(2.0).unwrap()).unwrap();
        let (t, r) = transform_expansion_terms(&one, &e, 60).unwrap();
        assert_eq!(*t.a(), q(8));
        assert_eq!(*t.h(), q(1));
        for (j, (c, r)) in t.coeffs().iter().zip(&r).enumerate() {
            let doubled = e.coeffs()[j].re.clone() * q(2);
            let dist = (c.re.clone() - doubled).abs();
            assert!(dist <= r.err.clone() * e.coeffs()[j].re.abs());
        }
        let zero = CertifiedExpansion::new(vec![creal(q(0)); 3], one.clone(), q(1), q(1), Sector::s_alpha(2.0).unwrap()).unwrap();
        assert!(transform_expansion(&one, &zero).unwrap().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn krs_characteristic_for_gevrey() {
        let prec = mp(128);
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 40, prec).unwrap();
        let opts = CharacteristicOptions {
            order: 12,
            precision: prec,
            ..Default::default()
        };
        let res = characteristic_for(&g1, 2.0, None, None, &opts).unwrap();
        assert_eq!(res.base.kind(), "krs");
        assert_eq!(res.certificate_source, CertificateSource::Paper);
        assert_eq!(res.lc_seq.get(5).unwrap().to_f64(), 120.0);
        for (j, c) in res.expansion.coeffs().iter().enumerate() {
            let want = res.r_values[j].value.to_f64() * if j % 2 == 0 { 1.0 } else { -1.0 }
                / ((j + 1) * (j + 2)) as f64;
            assert!((c.re.to_f64() / want - 1.0).abs() < 1e-14, "j = {j}");
            let mj = res.lc_seq.get(j).unwrap().to_f64();
            let rj = res.r_values[j].value.to_f64();
            assert!(rj >= mj / 2f64.powi(j as i32) && rj <= 2.0 * mj);
        }
        let e = res.expansion.clone();
        assert_eq!(e.a().to_f64(), 8.0);
    }

    #[test]
    fn constant_sequence_characteristic_doubles_krs() {
        let opts = CharacteristicOptions {
            order: 8,
            precision: mp(96),
            ..Default::default()
        };
        let one = WeightSequence::<Mpf>::constant_one(200);
        let res = characteristic_for(&one, 2.0, None, None, &opts).unwrap();
        for (j, c) in res.expansion.coeffs().iter().enumerate() {
            let want = 2.0 * if j % 2 == 0 { 1.0 } else { -1.0 } / ((j + 1) * (j + 2)) as f64;
            assert!((c.re.to_f64() - want).abs() < 1e-20);
        }
    }

    #[test]
    fn alpha_one_uses_an_lc_product() {
        let prec = mp(96);
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, prec).unwrap();
        let opts = CharacteristicOptions {
            order: 10,
            precision: prec,
            ..Default::default()
        };
        let res = characteristic_for(&g1, 1.0, None, None, &opts).unwrap();
        assert_eq!(res.base.kind(), "etilde:1");
        assert!(res.lc_seq.truncated(50).unwrap().is_log_convex().flag);
        assert_eq!(res.certificate_source, CertificateSource::Analytic);
        // L = Gbar^1 G^1: L_3 = 27 * 6
        assert!((res.lc_seq.get(3).unwrap().to_f64() - 162.0).abs() < 1e-20);
    }

    #[test]
    fn alphaprime_and_witness_errors() {
        let opts = CharacteristicOptions {
            order: 6,
            precision: mp(64),
            ..Default::default()
        };
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, mp(64)).unwrap();
        assert_eq!(
            characteristic_for(&g1, 3.0, None, None, &opts).unwrap_err(),
            Error::AlphaprimeMissing
        );
        assert_eq!(
            characteristic_for(&g1, 3.0, Some(2.5), None, &opts).unwrap_err(),
            Error::AlphaprimeMissing
        );
        // Gbar^{-2} G^1 is not lc
        assert!(matches!(
            characteristic_for(&g1, 3.0, Some(4.0), None, &opts).unwrap_err(),
            Error::NoLcWitness(_)
        ));
    }

    #[test]
    fn sign_is_preserved() {
        let g1 = WeightSequence::<Rational>::gevrey(1.0, 100, Precision::DOUBLE).unwrap();
        let coeffs: Vec<Complex<Rational>> = (0..8)
            .map(|j| creal(Rational::new(if j % 2 == 0 { 1 } else { -1 }.into(), ((j + 1) * (j + 2)).into())))
            .collect();
        let e = CertifiedExpansion::new(coeffs, WeightSequence::constant_one(100), q(4), Rational::one(), Sector::s_alpha(2.0).unwrap()).unwrap();
        let t = transform_expansion(&g1, &e).unwrap();
        for (j, c) in t.coeffs().iter().enumerate() {
            assert_eq!(c.re > q(0), j % 2 == 0);
        }
    }
}
