//! Measurement harness: grid sups of remainders, certificate fits,
//! coefficient windows, and the product and composition experiments.
//!
//! Grid sups only bound the true sups from below. Reports therefore test
//! known constants as upper bounds and use fitted constants as evidence.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis_fn::{remainders_against, Evaluable, SharedFn, ShiftSubtractFn};
use crate::char_transform::{characteristic_for, CharacteristicOptions, TransformRecord};
use crate::combinatorics::Partitions;
use crate::error::{Error, Result};
use crate::scalar::{cabs_f64, ln_cabs_f64, Precision, Rational, Real, Scalar};
use crate::sector::{GridSpec, LogPoint, Sector};
use crate::series;
use crate::weight_seq::{TwoParamFit, WeightSequence};
use crate::Mpf;

/// Relative slack used when comparing quantities that went through `f64`.
const F64_SLACK: f64 = 1e-9;

/// A sample grid on a sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub sector: Sector,
    pub spec: GridSpec,
}

impl Grid {
    pub fn new(sector: Sector, spec: GridSpec) -> Self {
        Grid { sector, spec }
    }

    pub fn points(&self) -> Result<Vec<LogPoint>> {
        self.sector.sample_grid(&self.spec)
    }

    pub fn refined(&self) -> Self {
        Grid {
            sector: self.sector,
            spec: self.spec.refined(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    #[serde(rename = "A")]
    pub a: f64,
    pub h: f64,
    /// The same fit on the first half of the indices.
    pub half: Option<(f64, f64)>,
}

impl FitSummary {
    fn of(fit: &TwoParamFit<f64>) -> Self {
        FitSummary {
            a: fit.a_fit,
            h: fit.h_fit,
            half: fit.half_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderReport {
    /// `W_n = sup |r(z, n)| / (M_n |z|^n)` over the grid, `0 <= n <= nmax`.
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    /// A grid point attaining each `W_n`.
    pub argmax: Vec<Option<LogPoint>>,
    pub fit: FitSummary,
    pub grid: Grid,
    pub points: usize,
    pub precision_bits: u32,
}

impl RemainderReport {
    /// `W_n <= A h^n` for every measured `n`.
    pub fn within(&self, a: f64, h: f64) -> bool {
        self.first_excess(a, h).is_none()
    }

    pub fn first_excess(&self, a: f64, h: f64) -> Option<usize> {
        self.w
            .iter()
            .enumerate()
            .position(|(n, w)| *w > a * h.powi(n as i32))
    }

    pub fn max_w(&self) -> f64 {
        self.w.iter().cloned().fold(0.0, f64::max)
    }

    /// `n, W_n, r, theta` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,W,r,theta\n");
        for (n, (w, p)) in self.w.iter().zip(&self.argmax).enumerate() {
            match p {
                Some(p) => out.push_str(&format!("{n},{w:e},{:e},{}\n", p.r, p.theta)),
                None => out.push_str(&format!("{n},{w:e},,\n")),
            }
        }
        out
    }
}

fn check_points_in_domain<T: Real>(f: &dyn Evaluable<T>, points: &[LogPoint]) -> Result<()> {
    points.iter().try_for_each(|p| f.check_domain(p))
}

/// Evaluates `per_point` on every grid point in parallel and returns the
/// results in grid order; the first failing point in grid order wins.
fn sweep<R: Send>(points: &[LogPoint], per_point: impl Fn(&LogPoint) -> Result<R> + Sync) -> Result<Vec<R>> {
    points
        .par_iter()
        .map(&per_point)
        .collect::<Vec<Result<R>>>()
        .into_iter()
        .collect()
}

/// Column-wise max of `logs[p][n]`, with the first point attaining it.
fn column_max(points: &[LogPoint], logs: &[Vec<f64>], width: usize) -> (Vec<f64>, Vec<Option<LogPoint>>) {
    let mut best = vec![f64::NEG_INFINITY; width];
    let mut at = vec![None; width];
    for (p, row) in points.iter().zip(logs) {
        for (n, v) in row.iter().enumerate() {
            if *v > best[n] {
                best[n] = *v;
                at[n] = Some(*p);
            }
        }
    }
    (best.into_iter().map(f64::exp).collect(), at)
}

/// Grid sups `W_n` of the remainders of `f` against `coeffs`, fitted by FR1.
pub fn measure_remainders<T: Real>(
    f: &dyn Evaluable<T>,
    coeffs: &[Complex<T>],
    m: &WeightSequence<T>,
    grid: &Grid,
    nmax: usize,
    prec: Precision,
) -> Result<RemainderReport> {
    if m.depth() < nmax {
        return Err(Error::InsufficientDepth {
            requested: nmax,
            available: m.depth() + 1,
        });
    }
    let points = grid.points()?;
    check_points_in_domain(f, &points)?;
    let ln_m: Vec<f64> = m.values()[..=nmax].iter().map(Scalar::ln_abs_f64).collect();
    let logs = sweep(&points, |p| {
        let rems = remainders_against(f, p, coeffs, nmax, prec)?;
        let ln_r = p.r.ln();
        Ok(rems
            .iter()
            .enumerate()
            .map(|(n, r)| ln_cabs_f64(r) - ln_m[n] - n as f64 * ln_r)
            .collect::<Vec<f64>>())
    })?;
    let (w, argmax) = column_max(&points, &logs, nmax + 1);
    let fit = TwoParamFit::<f64>::fr1(w.clone());
    Ok(RemainderReport {
        w,
        argmax,
        fit: FitSummary::of(&fit),
        grid: *grid,
        points: points.len(),
        precision_bits: prec.bits(),
    })
}

/// Grid estimate of `C~_n(f) = sup |z^{-n} r(z, n)|`.
pub fn ctilde_estimate<T: Real>(
    f: &dyn Evaluable<T>,
    coeffs: &[Complex<T>],
    grid: &Grid,
    n: usize,
    prec: Precision,
) -> Result<f64> {
    let points = grid.points()?;
    check_points_in_domain(f, &points)?;
    let vals = sweep(&points, |p| {
        let rems = remainders_against(f, p, coeffs, n, prec)?;
        Ok(ln_cabs_f64(&rems[n]) - n as f64 * p.r.ln())
    })?;
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max).exp())
}

/// `(min, max)` of `(|c_j| / M_j)^(1/j)` over `j0 <= j <= j1`.
pub fn coefficient_equivalence<T: Scalar>(
    coeffs: &[Complex<T>],
    m: &WeightSequence<T>,
    j0: usize,
    j1: usize,
) -> Result<(f64, f64)> {
    if j0 == 0 || j0 > j1 {
        return Err(Error::InvalidArgument(format!(
            "window must satisfy 1 <= j0 <= j1, got [{j0}, {j1}]"
        )));
    }
    if coeffs.len() <= j1 {
        return Err(Error::InsufficientDepth {
            requested: j1,
            available: coeffs.len(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in j0..=j1 {
        let c = &coeffs[j];
        if c.is_zero() {
            return Err(Error::ZeroCoefficient(j));
        }
        let d = (ln_cabs_f64(c) - m.get(j)?.ln_abs_f64()) / j as f64;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo.exp(), hi.exp()))
}

fn is_real<T: Scalar>(c: &Complex<T>) -> bool {
    if T::EXACT {
        c.im.is_zero()
    } else {
        c.im.to_f64().abs() <= crate::expansion::TAU_ZERO * c.re.to_f64().abs().max(1.0)
    }
}

/// True iff `c_j = (-1)^j |c_j|` with every `c_j` nonzero.
pub fn sign_pattern<T: Scalar>(coeffs: &[Complex<T>]) -> Result<bool> {
    if let Some(j) = coeffs.iter().position(|c| !is_real(c)) {
        return Err(Error::NonrealCoefficient(j));
    }
    Ok(first_sign_failure(coeffs).is_none())
}

fn first_sign_failure<T: Scalar>(coeffs: &[Complex<T>]) -> Option<usize> {
    coeffs.iter().enumerate().position(|(j, c)| {
        if j % 2 == 0 {
            !(c.re > T::zero())
        } else {
            !(c.re < T::zero())
        }
    })
}

fn exact_coeffs(c: &[Complex<Mpf>]) -> Result<Vec<Complex<Rational>>> {
    c.iter()
        .enumerate()
        .map(|(j, c)| match (c.re.to_rational(), c.im.to_rational()) {
            (Some(re), Some(im)) => Ok(Complex::new(re, im)),
            _ => Err(Error::InvalidArgument(format!("coefficient {j} is not finite"))),
        })
        .collect()
}

/// Exact image of `M_0..=M_depth`.
fn exact_seq(m: &WeightSequence<Mpf>, depth: usize) -> Result<WeightSequence<Rational>> {
    m.get(depth)?;
    let values = m.values()[..=depth]
        .iter()
        .map(|v| v.to_rational().ok_or_else(|| Error::InvalidArgument("non-finite weight".into())))
        .collect::<Result<Vec<_>>>()?;
    WeightSequence::custom(values)
}

fn characteristic(
    m: &WeightSequence<Mpf>,
    alpha: f64,
    alphaprime: Option<f64>,
    order: usize,
    opts: &CharacteristicOptions,
) -> Result<crate::char_transform::TransformResult<Mpf>> {
    let opts = CharacteristicOptions {
        order,
        ..opts.clone()
    };
    characteristic_for(m, alpha, alphaprime, None, &opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductNecessityReport {
    pub alpha: f64,
    pub depth: usize,
    pub characteristic: TransformRecord,
    /// `c^h_n = (-1)^n |c^h_n|` for `h = f * f`.
    pub sign_ok: bool,
    pub first_sign_failure: Option<usize>,
    /// `|c^h_0| = |c^f_0|^2`.
    pub head_identity: bool,
    pub inequalities_checked: usize,
    pub inequality_failures: usize,
    pub first_inequality_failure: Option<(usize, usize)>,
    /// `min_j (|c^f_j| / M_j)^(1/j)` on `[1, depth]`.
    pub b_low_f: f64,
    /// `max_n (|c^h_n| / M_n)^(1/n)` on `[1, depth]`.
    pub b_high_h: f64,
    /// `C` with `M_j M_k <= C^{j+k} M_{j+k}` obtained from the chain.
    pub c_chain: f64,
    pub c_alg: f64,
    pub alg_consistent: bool,
    pub pass: bool,
}

/// Squares the characteristic function `f` of `M` exactly and checks the
/// lower-bound chain `|c^{f f}_{j+k}| >= |c^f_j| |c^f_k|` that forces (alg).
pub fn product_necessity_experiment(
    m: &WeightSequence<Mpf>,
    alpha: f64,
    alphaprime: Option<f64>,
    depth: usize,
    opts: &CharacteristicOptions,
) -> Result<ProductNecessityReport> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    let res = characteristic(m, alpha, alphaprime, depth + 1, opts)?;
    let cf = exact_coeffs(res.expansion.coeffs())?;
    if let Some(j) = cf.iter().position(|c| !c.im.is_zero()) {
        return Err(Error::NonrealCoefficient(j));
    }
    let ch = series::convolve(&cf, &cf, depth + 1);
    let first_sign = first_sign_failure(&ch);
    let head = ch[0].re.abs() == cf[0].re.clone() * cf[0].re.clone();
    let mut checked = 0;
    let mut failures = 0;
    let mut first_fail = None;
    for n in 0..=depth {
        let lhs = ch[n].re.abs();
        for j in 0..=n {
            checked += 1;
            if lhs < cf[j].re.abs() * cf[n - j].re.abs() {
                failures += 1;
                first_fail.get_or_insert((j, n - j));
            }
        }
    }
    let mq = exact_seq(m, depth)?;
    let (b_low_f, _) = coefficient_equivalence(&cf, &mq, 1, depth)?;
    let (_, b_high_h) = coefficient_equivalence(&ch, &mq, 1, depth)?;
    let c_chain = b_high_h / b_low_f;
    let c_alg = mq.check_alg(depth)?.constant().to_f64();
    let alg_consistent = c_alg <= c_chain * (1.0 + F64_SLACK);
    let pass = first_sign.is_none() && head && failures == 0 && alg_consistent;
    Ok(ProductNecessityReport {
        alpha,
        depth,
        characteristic: res.to_record(),
        sign_ok: first_sign.is_none(),
        first_sign_failure: first_sign,
        head_identity: head,
        inequalities_checked: checked,
        inequality_failures: failures,
        first_inequality_failure: first_fail,
        b_low_f,
        b_high_h,
        c_chain,
        c_alg,
        alg_consistent,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorImageReport {
    pub beta: f64,
    pub alpha: f64,
    pub r: f64,
    pub epsilon: f64,
    pub points: usize,
    /// `max |arg f0(z) - arg z|` over the grid.
    pub max_deviation: f64,
    pub worst_point: Option<LogPoint>,
    /// Every image lies in `S_alpha` (continuing the argument from `arg z`).
    pub contained: bool,
    pub pass: bool,
}

fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Defaults `beta = alpha / 2` and `epsilon = (pi / 4) (alpha - beta)`.
pub fn default_image_parameters(alpha: f64) -> (f64, f64) {
    let beta = alpha / 2.0;
    (beta, PI / 4.0 * (alpha - beta))
}

/// Argument deviation of `f0` on a grid of `S_{beta, r}`. The radial range of
/// `grid` is rescaled so that its top sits at `r`.
pub fn sector_image_check<T: Real>(
    f0: &dyn Evaluable<T>,
    beta: f64,
    r: f64,
    alpha: f64,
    epsilon: f64,
    grid: &GridSpec,
    prec: Precision,
) -> Result<SectorImageReport> {
    if !(beta > 0.0 && beta < alpha) {
        return Err(Error::InvalidArgument(format!("need 0 < beta < alpha, got beta = {beta}, alpha = {alpha}")));
    }
    if !(epsilon > 0.0 && epsilon < PI / 2.0 * (alpha - beta)) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < epsilon < (pi/2)(alpha - beta), got {epsilon}"
        )));
    }
    let sector = Sector::bounded(beta, r)?;
    let spec = GridSpec {
        r_min: r * grid.r_min / grid.r_max,
        r_max: r,
        ..*grid
    };
    let points = sector.sample_grid(&spec)?;
    let devs = sweep(&points, |p| {
        let v = f0.evaluate(p, prec)?;
        if v.is_zero() {
            return Ok(f64::INFINITY);
        }
        let arg = v.im.to_f64().atan2(v.re.to_f64());
        Ok(wrap_angle(arg - p.theta))
    })?;
    let half = alpha * PI / 2.0;
    let mut max_dev = 0f64;
    let mut worst = None;
    let mut contained = true;
    for (p, d) in points.iter().zip(&devs) {
        if !(d.abs() <= max_dev) {
            max_dev = d.abs();
            worst = Some(*p);
        }
        if !((p.theta + d).abs() < half) {
            contained = false;
        }
    }
    Ok(SectorImageReport {
        beta,
        alpha,
        r,
        epsilon,
        points: points.len(),
        max_deviation: max_dev,
        worst_point: worst,
        contained,
        pass: contained && max_dev <= epsilon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorImageSearch {
    pub found: bool,
    /// Largest radius found to pass, after the bisection sweep.
    pub r: f64,
    /// `(r, max_deviation, pass)` for every radius tried.
    pub tried: Vec<(f64, f64, bool)>,
    pub report: SectorImageReport,
}

/// Number of bisection steps after the first passing radius is found.
pub const IMAGE_BISECTION_STEPS: usize = 8;

/// Largest number of tenfold shrink steps before giving up.
pub const IMAGE_SHRINK_STEPS: usize = 16;

/// Shrinks `r` tenfold from `r_start` until the check passes, then bisects
/// between the passing radius and the last failing one.
pub fn find_image_radius<T: Real>(
    f0: &dyn Evaluable<T>,
    beta: f64,
    alpha: f64,
    epsilon: f64,
    grid: &GridSpec,
    r_start: f64,
    prec: Precision,
) -> Result<SectorImageSearch> {
    let mut tried = Vec::new();
    let run = |r: f64, tried: &mut Vec<(f64, f64, bool)>| -> Result<SectorImageReport> {
        let rep = sector_image_check(f0, beta, r, alpha, epsilon, grid, prec)?;
        tried.push((r, rep.max_deviation, rep.pass));
        Ok(rep)
    };
    let mut r = r_start;
    let mut rep = run(r, &mut tried)?;
    let mut steps = 0;
    while !rep.pass && steps < IMAGE_SHRINK_STEPS {
        r /= 10.0;
        rep = run(r, &mut tried)?;
        steps += 1;
    }
    if !rep.pass {
        return Ok(SectorImageSearch {
            found: false,
            r,
            tried,
            report: rep,
        });
    }
    if steps > 0 {
        let (mut lo, mut hi) = (r, 10.0 * r);
        let mut best = rep;
        for _ in 0..IMAGE_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            let m = run(mid, &mut tried)?;
            if m.pass {
                lo = mid;
                best = m;
            } else {
                hi = mid;
            }
        }
        r = lo;
        rep = best;
    }
    Ok(SectorImageSearch {
        found: true,
        r,
        tried,
        report: rep,
    })
}

#[derive(Clone, Debug)]
pub struct ImageOptions {
    pub beta: f64,
    pub epsilon: f64,
    pub grid: GridSpec,
    pub r_start: f64,
    pub precision: Precision,
}

impl ImageOptions {
    pub fn defaults_for(alpha: f64) -> Self {
        let (beta, epsilon) = default_image_parameters(alpha);
        ImageOptions {
            beta,
            epsilon,
            grid: GridSpec {
                n_r: 12,
                n_theta: 7,
                r_min: 1e-6,
                r_max: 1.0,
                margin: 0.02,
            },
            r_start: 1.0,
            precision: Precision::from_bits(128),
        }
    }
}

/// `f0 = c_0 - f` for the characteristic function `f` of `M`.
pub fn shifted_characteristic(res: &crate::char_transform::TransformResult<Mpf>) -> SharedFn<Mpf> {
    std::sync::Arc::new(ShiftSubtractFn::new(res.result.clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub alpha: f64,
    pub depth: usize,
    pub characteristic: TransformRecord,
    pub image: Option<SectorImageSearch>,
    /// `c^phi_n = (-1)^n |c^phi_n|` for `phi = f o f0`.
    pub sign_ok: bool,
    pub first_sign_failure: Option<usize>,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// `B` if `A2 B >= 1`, else `A2 B^2`.
    pub b_eff: f64,
    /// `|c^f_j| >= A2 B^j M_j` for `j <= depth`, checked exactly.
    pub hypothesis_ok: bool,
    /// `|c^phi_n| >= A2 B_eff^n max_partitions M_l prod M_{m_i}`, checked exactly.
    pub lower_bound_ok: bool,
    pub first_lower_bound_failure: Option<usize>,
    pub fdb_c_fit: f64,
    pub fdb_h_fit: f64,
    pub fdb_c_check: f64,
    pub fdb_h_check: f64,
    /// The (FdB) ratios of `M` lie below `C_fit h_fit^n`.
    pub fdb_consistent: bool,
    pub pass: bool,
}

/// Lower bound `max over partitions of n` of `M_l prod M_{m_i}`.
fn partition_max(m: &WeightSequence<Rational>, n: usize) -> Rational {
    let v = m.values();
    Partitions::new(n)
        .map(|p| p.iter().fold(v[p.len()].clone(), |acc, &k| acc * v[k].clone()))
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Composes the characteristic function `f` with `f0 = c_0 - f` on the
/// coefficient side and checks the chain that forces (FdB).
pub fn composition_closure_experiment(
    m: &WeightSequence<Mpf>,
    alpha: f64,
    alphaprime: Option<f64>,
    depth: usize,
    image: Option<&ImageOptions>,
    opts: &CharacteristicOptions,
) -> Result<CompositionReport> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    let res = characteristic(m, alpha, alphaprime, depth + 1, opts)?;
    let image = match image {
        Some(io) => {
            let f0 = shifted_characteristic(&res);
            Some(find_image_radius(
                f0.as_ref(),
                io.beta,
                alpha,
                io.epsilon,
                &io.grid,
                io.r_start,
                io.precision,
            )?)
        }
        None => None,
    };
    let cf = exact_coeffs(res.expansion.coeffs())?;
    if let Some(j) = cf.iter().position(|c| !c.im.is_zero()) {
        return Err(Error::NonrealCoefficient(j));
    }
    let inner: Vec<Complex<Rational>> = cf
        .iter()
        .enumerate()
        .map(|(j, c)| if j == 0 { Complex::zero() } else { -c.clone() })
        .collect();
    let phi = series::compose(&cf, &inner, depth + 1);
    let first_sign = first_sign_failure(&phi);

    let mq = exact_seq(m, depth)?;
    let (b_f64, _) = coefficient_equivalence(&cf, &mq, 1, depth)?;
    let b = Rational::from_f64(b_f64 * (1.0 - F64_SLACK));
    let one = Rational::from_i64(1);
    let c0 = cf[0].re.abs();
    let a2 = if c0 < one { c0 } else { one };
    let vals = mq.values();
    let hypothesis_ok = (0..=depth).all(|j| cf[j].re.abs() >= a2.clone() * b.powi(j as i64) * vals[j].clone());
    let b_eff = if a2.clone() * b.clone() >= Rational::from_i64(1) {
        b.clone()
    } else {
        a2.clone() * b.clone() * b.clone()
    };
    let mut first_lower = None;
    for n in 1..=depth {
        let bound = a2.clone() * b_eff.powi(n as i64) * partition_max(&mq, n);
        if phi[n].re.abs() < bound {
            first_lower = Some(n);
            break;
        }
    }

    let ratios: Vec<f64> = (0..=depth)
        .map(|n| (ln_cabs_f64(&phi[n]) - vals[n].ln_abs_f64()).exp())
        .collect();
    let fit = TwoParamFit::<f64>::fr1(ratios);
    let a2f = a2.to_f64();
    let b_eff_f = b_eff.to_f64();
    let fdb_c_fit = fit.a_fit / a2f;
    let fdb_h_fit = fit.h_fit / b_eff_f;
    let fdb = mq.check_fdb(depth)?;
    let fdb_consistent = fdb
        .ratios
        .iter()
        .enumerate()
        .all(|(n, r)| r.to_f64() <= fdb_c_fit * fdb_h_fit.powi(n as i32) * (1.0 + F64_SLACK));
    let image_ok = image.as_ref().is_none_or(|s| s.found);
    let pass = first_sign.is_none() && hypothesis_ok && first_lower.is_none() && fdb_consistent && image_ok;
    Ok(CompositionReport {
        alpha,
        depth,
        characteristic: res.to_record(),
        image,
        sign_ok: first_sign.is_none(),
        first_sign_failure: first_sign,
        a2: a2f,
        b: b.to_f64(),
        b_eff: b_eff_f,
        hypothesis_ok,
        lower_bound_ok: first_lower.is_none(),
        first_lower_bound_failure: first_lower,
        fdb_c_fit,
        fdb_h_fit,
        fdb_c_check: fdb.a_fit.to_f64(),
        fdb_h_check: fdb.h_fit.to_f64(),
        fdb_consistent,
        pass,
    })
}

/// Sup modulus of `f` over a grid, for quick sanity checks of evaluators.
pub fn grid_sup<T: Real>(f: &dyn Evaluable<T>, grid: &Grid, prec: Precision) -> Result<f64> {
    let points = grid.points()?;
    check_points_in_domain(f, &points)?;
    let vals = sweep(&points, |p| Ok(cabs_f64(&f.evaluate(p, prec)?)))?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_fn::{ETilde, KRs, Polynomial, Recip1p};
    use crate::scalar::creal;
    use std::sync::Arc;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn s2_grid(n_r: usize, n_theta: usize) -> Grid {
        Grid::new(Sector::s_alpha(2.0).unwrap(), GridSpec::default().with_counts(n_r, n_theta))
    }

    #[test]
    fn polynomial_remainders_vanish_beyond_degree() {
        let p = Polynomial {
            coeffs: vec![Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0), Complex::new(0.5, 0.0)],
            sector: Sector::s_alpha(1.0).unwrap(),
        };
        let prec = Precision::from_bits(64);
        let c: Vec<Complex<Mpf>> = Evaluable::<Mpf>::coefficients(&p, 6, prec).unwrap();
        let grid = Grid::new(p.sector, GridSpec::default().with_counts(6, 3));
        let m = WeightSequence::<Mpf>::constant_one(8);
        let rep = measure_remainders(&p, &c, &m, &grid, 6, prec).unwrap();
        assert!(rep.w[0] > 0.0 && rep.w[2] > 0.0);
        assert!(rep.w[3..].iter().all(|w| *w == 0.0));
        assert!(rep.within(rep.fit.a, rep.fit.h));
    }

    #[test]
    fn krs_small_grid_within_four() {
        let f = KRs::<Mpf>::new();
        let prec = Precision::from_digits(30);
        let c = f.coefficients(12, prec).unwrap();
        let m = WeightSequence::<Mpf>::constant_one(12);
        let rep = measure_remainders(&f, &c, &m, &s2_grid(12, 5), 12, prec).unwrap();
        assert!(rep.max_w() <= 4.0, "{:?}", rep.w);
        let c1 = ctilde_estimate(&f, &c, &s2_grid(12, 5), 1, prec).unwrap();
        assert!((1.0 / 6.0..=4.0).contains(&c1));
    }

    #[test]
    fn refinement_never_decreases_sups() {
        let f = Recip1p;
        let prec = Precision::from_bits(64);
        let c: Vec<Complex<Mpf>> = Evaluable::<Mpf>::coefficients(&f, 5, prec).unwrap();
        let m = WeightSequence::<Mpf>::gevrey(1.0, 6, prec).unwrap();
        let g = Grid::new(Sector::s_alpha(1.0).unwrap(), GridSpec::default().with_counts(7, 3));
        let a = measure_remainders(&f, &c, &m, &g, 5, prec).unwrap();
        let b = measure_remainders(&f, &c, &m, &g.refined(), 5, prec).unwrap();
        assert!(a.w.iter().zip(&b.w).all(|(x, y)| y >= x));
    }

    #[test]
    fn domain_violations_are_reported() {
        let f = ETilde::<Mpf>::new(1.0).unwrap();
        let prec = Precision::from_bits(64);
        let c = f.coefficients(3, prec).unwrap();
        let m = WeightSequence::<Mpf>::constant_one(4);
        let err = measure_remainders(&f, &c, &m, &s2_grid(3, 3), 3, prec).unwrap_err();
        assert!(matches!(err, Error::EvaluationDomain { .. }));
    }

    #[test]
    fn equivalence_examples() {
        let g1 = WeightSequence::<Rational>::gevrey(1.0, 12, Precision::DOUBLE).unwrap();
        let same: Vec<Complex<Rational>> = g1.values().iter().cloned().map(creal).collect();
        let (lo, hi) = coefficient_equivalence(&same, &g1, 1, 10).unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        let scaled: Vec<Complex<Rational>> = g1
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| creal(v.clone() * q(3).powi(j as i64)))
            .collect();
        let (lo, hi) = coefficient_equivalence(&scaled, &g1, 1, 10).unwrap();
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
        let mut holes = same.clone();
        holes[4] = creal(q(0));
        assert_eq!(coefficient_equivalence(&holes, &g1, 1, 10).unwrap_err(), Error::ZeroCoefficient(4));
    }

    #[test]
    fn krs_coefficient_window() {
        let c: Vec<Complex<Rational>> = (0..=40)
            .map(|j: i64| creal(Rational::new(if j % 2 == 0 { 1 } else { -1 }.into(), ((j + 1) * (j + 2)).into())))
            .collect();
        let one = WeightSequence::<Rational>::constant_one(40);
        let (lo, hi) = coefficient_equivalence(&c, &one, 1, 40).unwrap();
        // (1 / ((j+1)(j+2)))^{1/j}: smallest at j = 1, largest at j = 40
        let oracle = |j: f64| (1.0 / ((j + 1.0) * (j + 2.0))).powf(1.0 / j);
        assert!((lo - oracle(1.0)).abs() < 1e-12);
        assert!((hi - oracle(40.0)).abs() < 1e-12);
        assert!(hi <= 1.0);
        assert_eq!(sign_pattern(&c[..3]), Ok(true));
        assert_eq!(sign_pattern(&[creal(q(1)), creal(q(1))]), Ok(false));
        assert_eq!(
            sign_pattern(&[creal(q(1)), Complex::new(q(1), q(1))]),
            Err(Error::NonrealCoefficient(1))
        );
    }

    #[test]
    fn identity_image_has_no_deviation() {
        let id = Polynomial {
            coeffs: vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
            sector: Sector::s_alpha(2.0).unwrap(),
        };
        let grid = GridSpec::default().with_counts(5, 5);
        let rep = sector_image_check::<Mpf>(&id, 0.5, 1.0, 1.0, 0.3, &grid, Precision::from_bits(64)).unwrap();
        assert!(rep.max_deviation < 1e-15 && rep.contained && rep.pass);
        let neg = Polynomial {
            coeffs: vec![Complex::new(0.0, 0.0), Complex::new(2.5, 0.0)],
            sector: Sector::s_alpha(2.0).unwrap(),
        };
        let rep = sector_image_check::<Mpf>(&neg, 0.5, 3.0, 1.0, 0.3, &grid, Precision::from_bits(64)).unwrap();
        assert!(rep.max_deviation < 1e-15);
        assert!(sector_image_check::<Mpf>(&id, 0.5, 1.0, 1.0, 1.0, &grid, Precision::from_bits(64)).is_err());
    }

    #[test]
    fn image_search_shrinks_radius() {
        // z + z^2 turns arguments by about |z| sin(theta)
        let f = Polynomial {
            coeffs: vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)],
            sector: Sector::s_alpha(2.0).unwrap(),
        };
        let grid = GridSpec::default().with_counts(8, 5);
        let s = find_image_radius::<Mpf>(&f, 0.5, 1.0, 0.05, &grid, 10.0, Precision::from_bits(64)).unwrap();
        assert!(s.found && s.r < 10.0 && s.r > 0.01);
        assert!(s.report.max_deviation <= 0.05);
    }

    #[test]
    fn product_experiment_for_gevrey() {
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, Precision::from_bits(192)).unwrap();
        let opts = CharacteristicOptions {
            precision: Precision::from_bits(192),
            ..Default::default()
        };
        let rep = product_necessity_experiment(&g1, 2.0, None, 12, &opts).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.inequality_failures, 0);
        assert!(rep.head_identity);
        assert!((rep.c_alg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_experiment_for_gevrey() {
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, Precision::from_bits(192)).unwrap();
        let opts = CharacteristicOptions {
            precision: Precision::from_bits(192),
            ..Default::default()
        };
        let rep = composition_closure_experiment(&g1, 2.0, None, 10, None, &opts).unwrap();
        assert!(rep.sign_ok && rep.hypothesis_ok && rep.lower_bound_ok, "{rep:?}");
        assert!(rep.fdb_consistent);
        assert!((rep.fdb_c_check - 1.0).abs() < 1e-12 && (rep.fdb_h_check - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_transform_image_near_zero() {
        let g1 = WeightSequence::<Mpf>::gevrey(1.0, 120, Precision::from_bits(128)).unwrap();
        let opts = CharacteristicOptions {
            order: 4,
            precision: Precision::from_bits(128),
            ..Default::default()
        };
        let res = characteristic_for(&g1, 2.0, None, None, &opts).unwrap();
        let f0 = shifted_characteristic(&res);
        let grid = GridSpec::default().with_counts(4, 3);
        let rep = sector_image_check(f0.as_ref(), 1.0, 1e-3, 2.0, 0.5, &grid, Precision::from_bits(128)).unwrap();
        assert!(rep.contained && rep.max_deviation < 0.05, "{rep:?}");
        let _ = Arc::clone(&res.result);
    }
}
