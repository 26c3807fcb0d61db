//! Precision-aware evaluators for the basic functions and their expansions.
//!
//! Every evaluator implements [`Evaluable`]: a value at a point of the
//! Riemann surface, exact coefficient access, a uniform bound on its domain,
//! and the remainders `r(z, n) = f(z) - sum_{j<n} c_j z^j`. The default
//! remainder computation subtracts partial sums and raises the working
//! precision until the cancellation has been paid for; evaluators with a
//! convergent series or a structural formula override it.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{cabs_f64, creal, ln_cabs_f64, Precision, Real};
use crate::sector::{LogPoint, Sector};

pub mod combinators;
pub mod etilde;
pub mod falpha;
pub mod gamma;
pub mod krs;
pub mod mittag_leffler;
pub mod quadrature;
pub mod registry;
pub mod synthetic;

pub use combinators::{ComposedFn, ProductFn, ShiftSubtractFn};
pub use etilde::ETilde;
pub use falpha::FAlpha;
pub use gamma::gamma_real;
pub use krs::{k_rs, KRs};
pub use mittag_leffler::mittag_leffler;
pub use registry::FnSpec;
pub use synthetic::{Constant, ExpNeg, Polynomial, Recip1p, ZOver1pz};

/// Bits of relative accuracy guaranteed for each returned remainder.
pub const REMAINDER_BITS: u32 = 64;

/// Hard cap on the precision used while paying for cancellation.
pub const REMAINDER_CAP_BITS: u32 = 16384;

pub trait Evaluable<T: Real>: Send + Sync {
    /// Registry tag, e.g. `krs` or `etilde:1`.
    fn kind(&self) -> String;

    fn domain(&self) -> Sector;

    /// Finite upper bound for `|f|` on the domain.
    fn uniform_bound(&self) -> f64;

    fn evaluate(&self, p: &LogPoint, prec: Precision) -> Result<Complex<T>>;

    /// Value at a plane point on the principal sheet, without rounding the
    /// point to `f64` polar form. Needed when `f` is the outer function of a
    /// composition; evaluators that cannot do this report an error.
    fn evaluate_plane(&self, w: &Complex<T>, prec: Precision) -> Result<Complex<T>> {
        let _ = (w, prec);
        Err(Error::InvalidArgument(format!("{} has no plane evaluation", self.kind())))
    }

    fn coefficient(&self, j: usize, prec: Precision) -> Result<Complex<T>>;

    fn coefficients(&self, n: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        (0..n).map(|j| self.coefficient(j, prec)).collect()
    }

    /// `r(z, n)` for `0 <= n <= nmax` against the evaluator's own coefficients.
    fn remainders(&self, p: &LogPoint, nmax: usize, prec: Precision) -> Result<Vec<Complex<T>>> {
        guarded_remainders(self, p, nmax, prec)
    }

    fn check_domain(&self, p: &LogPoint) -> Result<()> {
        if self.domain().contains(p) {
            Ok(())
        } else {
            Err(Error::EvaluationDomain {
                function: self.kind(),
                r: p.r,
                theta: p.theta,
            })
        }
    }
}

/// Surface point of a plane value on the principal sheet.
pub fn plane_point<T: Real>(w: &Complex<T>) -> Result<LogPoint> {
    LogPoint::new(cabs_f64(w), w.im.to_f64().atan2(w.re.to_f64()))
}

pub type SharedFn<T> = Arc<dyn Evaluable<T>>;

/// Remainders against arbitrary coefficients: the evaluator's own remainders
/// corrected by `sum_{j<n} (own_j - c_j) z^j`, which involves no cancellation.
pub fn remainders_against<T: Real>(
    f: &dyn Evaluable<T>,
    p: &LogPoint,
    coeffs: &[Complex<T>],
    nmax: usize,
    prec: Precision,
) -> Result<Vec<Complex<T>>> {
    if coeffs.len() < nmax {
        return Err(Error::InsufficientDepth {
            requested: nmax,
            available: coeffs.len(),
        });
    }
    let mut rems = f.remainders(p, nmax, prec)?;
    let own = f.coefficients(nmax, prec)?;
    if own.iter().zip(coeffs).all(|(a, b)| a == b) {
        return Ok(rems);
    }
    let wp = prec.plus_bits(32);
    let z: Complex<T> = p.to_complex(wp);
    let mut zpow = creal(T::with_prec(1.0, wp));
    let mut corr: Complex<T> = Complex::zero();
    for n in 0..=nmax {
        rems[n] = rems[n].clone() + corr.clone();
        if n < nmax {
            let d = own[n].clone() - coeffs[n].clone();
            corr = corr + d * zpow.clone();
            zpow = zpow * z.clone();
        }
    }
    Ok(rems)
}

fn can_escalate<T: Real>(prec: Precision) -> bool {
    T::with_prec(1.0, prec).precision() >= prec
}

/// Remainders by direct subtraction, raising precision until each `r(z, n)`
/// keeps at least [`REMAINDER_BITS`] significant bits.
pub fn guarded_remainders<T: Real, F: Evaluable<T> + ?Sized>(
    f: &F,
    p: &LogPoint,
    nmax: usize,
    prec: Precision,
) -> Result<Vec<Complex<T>>> {
    let mut bits = prec.bits();
    let mut zero_before = vec![false; nmax + 1];
    loop {
        let wp = Precision::from_bits(bits);
        let value = f.evaluate(p, wp)?;
        let coeffs = f.coefficients(nmax, wp)?;
        let z: Complex<T> = p.to_complex(wp);
        let ln2 = std::f64::consts::LN_2;
        let mut rems = Vec::with_capacity(nmax + 1);
        let mut partial: Complex<T> = Complex::zero();
        let mut zpow = creal(T::with_prec(1.0, wp));
        let mut scale = ln_cabs_f64(&value);
        let mut deficit = 0f64;
        let mut zero_now = vec![false; nmax + 1];
        for n in 0..=nmax {
            let r = value.clone() - partial.clone();
            let ln_r = ln_cabs_f64(&r);
            if ln_r == f64::NEG_INFINITY {
                zero_now[n] = true;
                if scale != f64::NEG_INFINITY && !zero_before[n] {
                    deficit = deficit.max(REMAINDER_BITS as f64);
                }
            } else {
                let lost = ((scale - ln_r) / ln2).max(0.0);
                let kept = bits as f64 - lost - 8.0;
                deficit = deficit.max(REMAINDER_BITS as f64 - kept);
            }
            rems.push(r);
            if n < nmax {
                let t = coeffs[n].clone() * zpow.clone();
                scale = scale.max(ln_cabs_f64(&t));
                partial = partial + t;
                zpow = zpow * z.clone();
            }
        }
        if deficit <= 0.0 || !can_escalate::<T>(wp) {
            return Ok(rems);
        }
        zero_before = zero_now;
        bits = bits + deficit.ceil() as u32 + 32;
        if bits > REMAINDER_CAP_BITS {
            return Err(Error::BudgetExceeded {
                cap_bits: REMAINDER_CAP_BITS,
                context: format!("remainders of {} at r = {}, theta = {}", f.kind(), p.r, p.theta),
            });
        }
    }
}

/// Suffix sums `r_n = sum_{k>=n} t_k` for `n <= nmax`, summed from the small end.
pub(crate) fn suffix_sums<T: Real>(terms: &[Complex<T>], nmax: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); nmax + 1];
    let mut acc: Complex<T> = Complex::zero();
    for k in (0..terms.len()).rev() {
        acc = acc + terms[k].clone();
        if k <= nmax {
            out[k] = acc.clone();
        }
    }
    out
}

/// Read-mostly cache of real coefficient lists keyed by precision in bits.
pub(crate) struct CoeffCache<T> {
    inner: RwLock<HashMap<u32, Vec<T>>>,
}

impl<T: Clone> CoeffCache<T> {
    pub(crate) fn new() -> Self {
        CoeffCache {
            inner: RwLock::new(HashMap::new()),
        }
    }

    /// The first `n` coefficients at precision `bits`, generating missing ones.
    pub(crate) fn prefix(
        &self,
        bits: u32,
        n: usize,
        generate: impl Fn(usize) -> Result<T>,
    ) -> Result<Vec<T>> {
        if let Some(v) = self.inner.read().expect("coefficient cache poisoned").get(&bits) {
            if v.len() >= n {
                return Ok(v[..n].to_vec());
            }
        }
        let mut guard = self.inner.write().expect("coefficient cache poisoned");
        let list = guard.entry(bits).or_default();
        while list.len() < n {
            let j = list.len();
            list.push(generate(j)?);
        }
        Ok(list[..n].to_vec())
    }
}

impl<T> std::fmt::Debug for CoeffCache<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CoeffCache")
    }
}
