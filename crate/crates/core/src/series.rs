//! Truncated power series arithmetic on coefficient lists.
//!
//! All routines work over `Complex<T>` for any [`Scalar`], so the same code
//! runs exactly on rationals and with rounding on floats.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Scalar;

/// Cauchy product `c_j = sum_{k<=j} a_k b_{j-k}` for `j < n`.
pub fn convolve<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); n];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc: Complex<T> = Complex::zero();
        for k in 0..=j {
            if let (Some(x), Some(y)) = (a.get(k), b.get(j - k)) {
                if !x.is_zero() && !y.is_zero() {
                    acc = acc + x.clone() * y.clone();
                }
            }
        }
        *slot = acc;
    }
    out
}

/// Coefficients of `f^k` below order `n`, by `k - 1` convolutions.
pub fn power_coeffs<T: Scalar>(f: &[Complex<T>], k: usize, n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); n];
    if k == 0 {
        if n > 0 {
            out[0] = Complex::new(T::one(), T::zero());
        }
        return out;
    }
    let mut acc: Vec<Complex<T>> = f.iter().take(n).cloned().collect();
    acc.resize(n, Complex::zero());
    for _ in 1..k {
        acc = convolve(&acc, f, n);
    }
    acc
}

/// `table[j - 1]` holds the coefficients of `f^j` below order `n`, for `1 <= j <= jmax`.
pub fn power_table<T: Scalar>(f: &[Complex<T>], jmax: usize, n: usize) -> Vec<Vec<Complex<T>>> {
    let mut table = Vec::with_capacity(jmax);
    if jmax == 0 {
        return table;
    }
    let mut acc: Vec<Complex<T>> = f.iter().take(n).cloned().collect();
    acc.resize(n, Complex::zero());
    table.push(acc.clone());
    for _ in 1..jmax {
        acc = convolve(&acc, f, n);
        table.push(acc.clone());
    }
    table
}

/// Formal composition `g o f` below order `n`; `f` must have zero constant term.
/// `c_0 = g_0`, `c_n = sum_{j=1}^{n} g_j (f^j)_n`.
pub fn compose<T: Scalar>(g: &[Complex<T>], f: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); n];
    if n == 0 {
        return out;
    }
    if let Some(g0) = g.first() {
        out[0] = g0.clone();
    }
    let jmax = (n - 1).min(g.len().saturating_sub(1));
    let powers = power_table(f, jmax, n);
    for (j, pow) in powers.iter().enumerate() {
        let gj = &g[j + 1];
        if gj.is_zero() {
            continue;
        }
        for m in 1..n {
            if !pow[m].is_zero() {
                out[m] = out[m].clone() + gj.clone() * pow[m].clone();
            }
        }
    }
    out
}
