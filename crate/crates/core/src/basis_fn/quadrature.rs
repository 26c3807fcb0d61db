//! Adaptive composite Gauss-Legendre quadrature at arbitrary precision.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cabs, Precision, Real};

/// Points per panel.
pub const PANEL_POINTS: usize = 16;

/// Deepest bisection level before giving up.
pub const MAX_DEPTH: u32 = 400;

/// Ray integration parameters chosen for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Ray angle `phi`; the ray is `v = t e^{-i phi}`.
    pub phi: f64,
    pub panel_points: usize,
    /// Truncation point of the `t` range.
    pub truncation: f64,
    pub tolerance: f64,
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on `P_n` from the classical cosine guesses.
    pub fn new(n: usize, prec: Precision) -> Self {
        let wp = prec.plus_bits(16);
        let one = T::int_prec(1, wp);
        let stop = T::with_prec(prec.epsilon(), wp);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 1..=n {
            let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut x = T::with_prec(guess, wp);
            let mut dp = one.clone();
            for _ in 0..200 {
                let (p, d) = legendre(n, &x, wp);
                dp = d.clone();
                let step = p / d;
                x = x - step.clone();
                if step.abs() <= stop.clone() * x.abs().max_of(one.clone()) {
                    let (_, d) = legendre(n, &x, wp);
                    dp = d;
                    break;
                }
            }
            let w = T::int_prec(2, wp) / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    /// Rule applied to `[a, b]`.
    pub fn panel<F>(&self, f: &F, a: &T, b: &T) -> Result<Complex<T>>
    where
        F: Fn(&T) -> Result<Complex<T>>,
    {
        let two = T::int_prec(2, a.precision());
        let half = (b.clone() - a.clone()) / two.clone();
        let mid = (b.clone() + a.clone()) / two;
        let mut acc: Complex<T> = Complex::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid.clone() + half.clone() * x.clone();
            let v = f(&t)?;
            acc = acc + Complex::new(v.re * w.clone(), v.im * w.clone());
        }
        Ok(Complex::new(acc.re * half.clone(), acc.im * half))
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: &T, prec: Precision) -> (T, T) {
    let mut p0 = T::int_prec(1, prec);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kk = T::int_prec(k as i64, prec);
        let p2 = (T::int_prec(2 * k as i64 - 1, prec) * x.clone() * p1.clone()
            - T::int_prec(k as i64 - 1, prec) * p0.clone())
            / kk;
        p0 = p1;
        p1 = p2;
    }
    let one = T::int_prec(1, prec);
    let d = T::int_prec(n as i64, prec) * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - one);
    (p1, d)
}

#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    pub panels: usize,
    /// Sum of the accepted panel differences.
    pub error_estimate: f64,
}

/// Integrates over `[breaks[0], breaks.last()]`, bisecting panels until the
/// one-panel and two-panel estimates differ by at most `tol * width / total`.
pub fn integrate<T, F>(
    f: F,
    breaks: &[f64],
    tol: f64,
    prec: Precision,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: Fn(&T) -> Result<Complex<T>>,
{
    if breaks.len() < 2 {
        return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
    }
    let rule = GaussLegendre::<T>::new(PANEL_POINTS, prec);
    let total = breaks[breaks.len() - 1] - breaks[0];
    let mut out = QuadResult {
        value: Complex::zero(),
        panels: 0,
        error_estimate: 0.0,
    };
    for w in breaks.windows(2) {
        let whole = rule.panel(&f, &T::with_prec(w[0], prec), &T::with_prec(w[1], prec))?;
        refine(&rule, &f, w[0], w[1], whole, tol / total, prec, 0, &mut out)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(
    rule: &GaussLegendre<T>,
    f: &F,
    a: f64,
    b: f64,
    whole: Complex<T>,
    density: f64,
    prec: Precision,
    depth: u32,
    out: &mut QuadResult<T>,
) -> Result<()>
where
    T: Real,
    F: Fn(&T) -> Result<Complex<T>>,
{
    let m = 0.5 * (a + b);
    let (ta, tm, tb) = (T::with_prec(a, prec), T::with_prec(m, prec), T::with_prec(b, prec));
    let left = rule.panel(f, &ta, &tm)?;
    let right = rule.panel(f, &tm, &tb)?;
    let split = left.clone() + right.clone();
    let diff = cabs(&(split.clone() - whole)).to_f64();
    if diff <= density * (b - a) || m <= a || m >= b {
        out.value = out.value.clone() + split;
        out.panels += 2;
        out.error_estimate += diff;
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::BudgetExceeded {
            cap_bits: prec.bits(),
            context: format!("quadrature did not settle on [{a:e}, {b:e}]"),
        });
    }
    refine(rule, f, a, m, left, density, prec, depth + 1, out)?;
    refine(rule, f, m, b, right, density, prec, depth + 1, out)
}
