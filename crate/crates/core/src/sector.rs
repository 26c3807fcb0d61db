//! Points and sectors on the Riemann surface of the logarithm.
//!
//! Points are kept as `(r, theta)` with unbounded `theta`; conversion to a
//! complex number is left to the consumer, which knows its branch rule.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_polar, Precision, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogPoint {
    pub r: f64,
    pub theta: f64,
}

impl LogPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "a surface point needs finite r > 0, got (r = {r}, theta = {theta})"
            )));
        }
        Ok(LogPoint { r, theta })
    }

    pub fn on_bisector(r: f64) -> Self {
        LogPoint { r, theta: 0.0 }
    }

    /// The point with modulus multiplied by `s > 0` and the same argument.
    pub fn scaled(&self, s: f64) -> Self {
        LogPoint {
            r: self.r * s,
            theta: self.theta,
        }
    }

    /// Projection to the plane. Callers must only use this when the branch
    /// they evaluate is determined by the projected value.
    pub fn to_complex<T: Real>(&self, prec: Precision) -> Complex<T> {
        from_polar(&T::with_prec(self.r, prec), &T::with_prec(self.theta, prec))
    }
}

/// Sector `{ |theta - bisector| < half_opening, r < radius }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub bisector: f64,
    pub half_opening: f64,
    /// `None` for an unbounded sector.
    pub radius: Option<f64>,
}

impl Sector {
    /// `S_alpha`: bisector 0, half-opening `alpha * pi / 2`, unbounded.
    pub fn s_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(Sector {
            bisector: 0.0,
            half_opening: alpha * PI / 2.0,
            radius: None,
        })
    }

    /// `S_{alpha, r}`, the part of `S_alpha` with modulus below `r`.
    pub fn bounded(alpha: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(Sector {
            radius: radius.is_finite().then_some(radius),
            ..Sector::s_alpha(alpha)?
        })
    }

    /// Opening in units of `pi`.
    pub fn alpha(&self) -> f64 {
        2.0 * self.half_opening / PI
    }

    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or(f64::INFINITY)
    }

    pub fn is_unbounded(&self) -> bool {
        self.radius.is_none()
    }

    pub fn contains(&self, p: &LogPoint) -> bool {
        (p.theta - self.bisector).abs() < self.half_opening && p.r < self.radius()
    }

    /// True when the closure of `self` (vertex excluded) lies inside `outer`.
    pub fn is_proper_subsector(&self, outer: &Sector) -> bool {
        let lo = self.bisector - self.half_opening;
        let hi = self.bisector + self.half_opening;
        let olo = outer.bisector - outer.half_opening;
        let ohi = outer.bisector + outer.half_opening;
        let angles_inside = lo > olo && hi < ohi;
        let radius_inside = match (self.radius, outer.radius) {
            (_, None) => true,
            (Some(r), Some(or)) => r < or,
            (None, Some(_)) => false,
        };
        angles_inside && radius_inside
    }

    /// Deterministic grid; see [`GridSpec`].
    pub fn sample_grid(&self, spec: &GridSpec) -> Result<Vec<LogPoint>> {
        spec.validate()?;
        let r_max = spec.r_max.min(self.radius() * (1.0 - spec.margin));
        if !(spec.r_min < r_max) {
            return Err(Error::InvalidArgument(format!(
                "radial window [{}, {}] is empty inside radius {}",
                spec.r_min,
                r_max,
                self.radius()
            )));
        }
        let radii = log_spaced(spec.r_min, r_max, spec.n_r);
        let half = (1.0 - spec.margin) * self.half_opening;
        let thetas: Vec<f64> = if spec.n_theta == 1 {
            vec![self.bisector]
        } else {
            (0..spec.n_theta)
                .map(|i| {
                    let t = i as f64 / (spec.n_theta - 1) as f64;
                    self.bisector - half + 2.0 * half * t
                })
                .collect()
        };
        Ok(radii
            .iter()
            .flat_map(|&r| thetas.iter().map(move |&theta| LogPoint { r, theta }))
            .collect())
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo * hi).sqrt()];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * (i as f64 / (n - 1) as f64)).exp()
            }
        })
        .collect()
}

/// Grid parameters: `n_r` log-spaced radii on `[r_min, r_max]` and `n_theta`
/// equispaced arguments on the opening shrunk by `margin * half_opening` per side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_r: 120,
            n_theta: 33,
            r_min: 1e-6,
            r_max: 1e2,
            margin: 0.02,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_theta == 0 {
            return Err(Error::InvalidArgument("grid counts must be positive".into()));
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r_min < r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "margin must lie in (0, 1), got {}",
                self.margin
            )));
        }
        Ok(())
    }

    /// Twice the resolution in both directions; the refined grid contains every
    /// node of the original one.
    pub fn refined(&self) -> Self {
        GridSpec {
            n_r: if self.n_r > 1 { 2 * self.n_r - 1 } else { 1 },
            n_theta: if self.n_theta > 1 { 2 * self.n_theta - 1 } else { 1 },
            ..*self
        }
    }

    pub fn with_r_max(self, r_max: f64) -> Self {
        GridSpec { r_max, ..self }
    }

    pub fn with_counts(self, n_r: usize, n_theta: usize) -> Self {
        GridSpec { n_r, n_theta, ..self }
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
