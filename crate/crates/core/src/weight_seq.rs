//! Weight sequences and finite-depth evidence for their growth conditions.
//!
//! A [`WeightSequence`] holds `M_0 = 1, M_1, ..., M_N` together with the
//! generator that produced it, so generated sequences can be re-evaluated at
//! larger depth. The condition checks (`check_alg`, `check_fdb`, `check_dc`,
//! `check_mg`) return per-index worst ratios and constants fitted by rule FR1;
//! they are evidence at depth `N`, never proofs.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{compositions, Partitions};
use crate::error::{Error, Result};
use crate::scalar::{Precision, Scalar};

/// Relative tolerance used when comparing consecutive quotients.
pub const LC_TOLERANCE: f64 = 1e-12;

/// Largest `k` for which `check_fdb` enumerates partitions by default.
pub const DEFAULT_PARTITION_BUDGET: usize = 40;

/// Floor applied to the fitted constant `A` by FR1.
const FIT_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `(j!)^a`
    Gevrey { a: f64 },
    /// `j^(j a)` with `0^0 = 1`
    PowerGevrey { a: f64 },
    PointwiseProduct {
        left: Box<Generator>,
        right: Box<Generator>,
    },
    Custom,
}

impl Generator {
    /// Short textual tag, e.g. `gevrey:1`, `power_gevrey:-1`.
    pub fn tag(&self) -> String {
        match self {
            Generator::Gevrey { a } => format!("gevrey:{a}"),
            Generator::PowerGevrey { a } => format!("power_gevrey:{a}"),
            Generator::PointwiseProduct { left, right } => {
                format!("product({},{})", left.tag(), right.tag())
            }
            Generator::Custom => "custom".to_string(),
        }
    }

    /// Parses `gevrey:a`, `power_gevrey:a` and `constant`.
    pub fn parse(s: &str) -> Result<Generator> {
        let s = s.trim();
        if s == "constant" || s == "one" {
            return Ok(Generator::Gevrey { a: 0.0 });
        }
        let (kind, a) = s
            .split_once(':')
            .ok_or_else(|| Error::parse("sequence spec", s))?;
        let a: f64 = crate::io::parse_real_literal(a).ok_or_else(|| Error::parse("sequence exponent", s))?;
        match kind {
            "gevrey" | "G" => Ok(Generator::Gevrey { a }),
            "power_gevrey" | "Gbar" => Ok(Generator::PowerGevrey { a }),
            _ => Err(Error::parse("sequence spec", s)),
        }
    }

    fn generate<T: Scalar>(&self, depth: usize, prec: Precision) -> Result<Vec<T>> {
        let nonexact = |a: f64| {
            Error::InvalidArgument(format!(
                "exponent {a} is not representable in exact arithmetic"
            ))
        };
        match self {
            Generator::Gevrey { a } => {
                let mut out = Vec::with_capacity(depth + 1);
                let mut fact = T::from_i64_prec(1, prec);
                for j in 0..=depth {
                    if j > 0 {
                        fact = fact * T::from_i64_prec(j as i64, prec);
                    }
                    out.push(fact.pow_f64(*a, prec).ok_or_else(|| nonexact(*a))?);
                }
                Ok(out)
            }
            Generator::PowerGevrey { a } => (0..=depth)
                .map(|j| {
                    if j == 0 {
                        return Ok(T::from_i64_prec(1, prec));
                    }
                    let base = T::from_i64_prec(j as i64, prec);
                    if T::EXACT {
                        base.powi(j as i64)
                            .pow_f64(*a, prec)
                            .ok_or_else(|| nonexact(*a))
                    } else {
                        base.pow_f64(j as f64 * a, prec).ok_or_else(|| nonexact(*a))
                    }
                })
                .collect(),
            Generator::PointwiseProduct { left, right } => {
                let l = left.generate::<T>(depth, prec)?;
                let r = right.generate::<T>(depth, prec)?;
                Ok(l.into_iter().zip(r).map(|(x, y)| x * y).collect())
            }
            Generator::Custom => Err(Error::InvalidArgument(
                "custom sequences cannot be regenerated".into(),
            )),
        }
    }
}

/// Positive sequence `M_0 = 1, ..., M_N` with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence<T> {
    values: Vec<T>,
    generator: Generator,
    precision: Precision,
}

/// Quotients `m_j = M_{j+1} / M_j` for `0 <= j < N`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientSequence<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> QuotientSequence<T> {
    /// Partial products `prod_{k<j} m_k`, reconstructing `M_j`.
    pub fn partial_products(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        let mut acc = T::one();
        out.push(acc.clone());
        for m in &self.values {
            acc = acc * m.clone();
            out.push(acc.clone());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogConvexity {
    pub flag: bool,
    /// Smallest `j >= 1` with `M_j^2 > M_{j-1} M_{j+1}` (beyond tolerance).
    pub first_violation: Option<usize>,
}

/// Per-index worst ratios with constants `A`, `h` such that `ratios[n] <= A h^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoParamFit<T> {
    pub ratios: Vec<T>,
    pub a_fit: T,
    pub h_fit: T,
    pub depth: usize,
    /// The same fit restricted to indices `<= depth / 2`, to expose the trend.
    pub half_depth: Option<(T, T)>,
}

impl<T: Scalar> TwoParamFit<T> {
    /// Fit rule FR1: `A = max(r_0, r_1, 1e-300)`, `h = max_{n>=1} (r_n / A)^(1/n)`.
    pub fn fr1(ratios: Vec<T>) -> Self {
        let (a, h) = fr1_constants(&ratios);
        let depth = ratios.len().saturating_sub(1);
        let half_depth = (depth >= 2).then(|| fr1_constants(&ratios[..=depth / 2]));
        TwoParamFit {
            ratios,
            a_fit: a,
            h_fit: h,
            depth,
            half_depth,
        }
    }

    /// Single-parameter fit `C = max_{n >= first} r_n^(1/(n + shift))`, reported as `A = h = C`.
    fn single(ratios: Vec<T>, first: usize, shift: usize) -> Self {
        let c = single_constant(&ratios, first, shift);
        let depth = ratios.len().saturating_sub(1);
        let half_depth = (depth >= 2).then(|| {
            let c = single_constant(&ratios[..=depth / 2], first, shift);
            (c.clone(), c)
        });
        TwoParamFit {
            ratios,
            a_fit: c.clone(),
            h_fit: c,
            depth,
            half_depth,
        }
    }

    /// Checks `ratios[n] <= A h^n` for every stored index.
    pub fn holds(&self) -> bool {
        let mut bound = self.a_fit.clone();
        for r in &self.ratios {
            if *r > bound {
                return false;
            }
            bound = bound * self.h_fit.clone();
        }
        true
    }

    /// The constant `C` of a single-parameter fit (alg, dc, mg).
    pub fn constant(&self) -> &T {
        &self.h_fit
    }
}

fn fr1_constants<T: Scalar>(ratios: &[T]) -> (T, T) {
    let mut a = T::from_f64(FIT_FLOOR);
    for r in ratios.iter().take(2) {
        a = a.max_of(r.clone());
    }
    let mut h = T::from_f64(FIT_FLOOR);
    for (n, r) in ratios.iter().enumerate().skip(1) {
        h = h.max_of((r.clone() / a.clone()).root_up(n as u32));
    }
    // h^n computed in floating arithmetic may round below the root; nudge until
    // every ratio is dominated.
    while !dominated(ratios, &a, &h) {
        h = h.up();
    }
    (a, h)
}

fn dominated<T: Scalar>(ratios: &[T], a: &T, h: &T) -> bool {
    let mut bound = a.clone();
    for r in ratios {
        if *r > bound {
            return false;
        }
        bound = bound * h.clone();
    }
    true
}

fn single_constant<T: Scalar>(ratios: &[T], first: usize, shift: usize) -> T {
    let mut c = T::from_f64(FIT_FLOOR);
    for (n, r) in ratios.iter().enumerate().skip(first) {
        let e = (n + shift) as u32;
        if e == 0 {
            continue;
        }
        c = c.max_of(r.root_up(e));
    }
    c
}

/// Window evidence for `B^j M_j <= L_j <= C^j M_j`, kept in log form so that
/// swapping the arguments negates the logs exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceFit {
    pub log_low: f64,
    pub log_high: f64,
}

impl EquivalenceFit {
    pub fn b_low(&self) -> f64 {
        self.log_low.exp()
    }
    pub fn b_high(&self) -> f64 {
        self.log_high.exp()
    }
}

impl<T: Scalar> WeightSequence<T> {
    /// Gevrey sequence `(j!)^a`, `0 <= j <= depth`.
    pub fn gevrey(a: f64, depth: usize, prec: Precision) -> Result<Self> {
        Self::from_generator(Generator::Gevrey { a }, depth, prec)
    }

    /// Sequence `j^(j a)`, `0 <= j <= depth`.
    pub fn power_gevrey(a: f64, depth: usize, prec: Precision) -> Result<Self> {
        Self::from_generator(Generator::PowerGevrey { a }, depth, prec)
    }

    /// The constant sequence `1`.
    pub fn constant_one(depth: usize) -> Self {
        WeightSequence {
            values: vec![T::one(); depth + 1],
            generator: Generator::Gevrey { a: 0.0 },
            precision: Precision::DOUBLE,
        }
    }

    pub fn from_generator(generator: Generator, depth: usize, prec: Precision) -> Result<Self> {
        if depth < 1 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let values = generator.generate(depth, prec)?;
        Ok(WeightSequence {
            values,
            generator,
            precision: prec,
        })
    }

    /// A custom sequence; requires `M_0 = 1`, positivity and at least two entries.
    pub fn custom(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "a weight sequence needs at least M_0 and M_1".into(),
            ));
        }
        if !values[0].is_one() {
            return Err(Error::InvalidArgument(format!(
                "M_0 must equal 1, got {}",
                values[0]
            )));
        }
        if let Some(j) = values.iter().position(|v| *v <= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "M_{j} = {} is not positive",
                values[j]
            )));
        }
        Ok(WeightSequence {
            values,
            generator: Generator::Custom,
            precision: Precision::DOUBLE,
        })
    }

    pub(crate) fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = generator;
        self
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, j: usize) -> Result<&T> {
        self.values.get(j).ok_or(Error::InsufficientDepth {
            requested: j,
            available: self.values.len(),
        })
    }

    /// Largest stored index `N`.
    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// The same sequence at a larger depth (regenerated), or truncated.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        if depth <= self.depth() {
            let mut out = self.clone();
            out.values.truncate(depth + 1);
            return Ok(out);
        }
        match self.generator {
            Generator::Custom => Err(Error::InsufficientDepth {
                requested: depth,
                available: self.values.len(),
            }),
            _ => Self::from_generator(self.generator.clone(), depth, self.precision),
        }
    }

    /// The entries `M_0..=M_depth`, keeping the generator tag.
    pub fn truncated(&self, depth: usize) -> Result<Self> {
        self.require_depth(depth)?;
        Ok(WeightSequence {
            values: self.values[..=depth].to_vec(),
            generator: self.generator.clone(),
            precision: self.precision,
        })
    }

    pub fn quotients(&self) -> QuotientSequence<T> {
        QuotientSequence {
            values: self
                .values
                .windows(2)
                .map(|w| w[1].clone() / w[0].clone())
                .collect(),
        }
    }

    /// Log-convexity via monotonicity of the quotients.
    pub fn is_log_convex(&self) -> LogConvexity {
        let m = self.quotients().values;
        let slack = T::one() + T::from_f64(LC_TOLERANCE);
        let first_violation = m
            .windows(2)
            .position(|w| w[0] > w[1].clone() * slack.clone())
            .map(|j| j + 1);
        LogConvexity {
            flag: first_violation.is_none(),
            first_violation,
        }
    }

    fn require_depth(&self, depth: usize) -> Result<()> {
        if depth > self.depth() {
            return Err(Error::InsufficientDepth {
                requested: depth,
                available: self.values.len(),
            });
        }
        Ok(())
    }

    /// Condition (alg): `ratios[n] = max_{j+k=n} M_j M_k / M_n`, single-parameter fit.
    pub fn check_alg(&self, depth: usize) -> Result<TwoParamFit<T>> {
        self.require_depth(depth)?;
        let m = &self.values;
        let ratios = (0..=depth)
            .map(|n| {
                (0..=n)
                    .map(|j| m[j].clone() * m[n - j].clone() / m[n].clone())
                    .fold(T::zero(), T::max_of)
            })
            .collect();
        Ok(TwoParamFit::single(ratios, 1, 0))
    }

    /// Condition (FdB) over integer partitions of each `k <= depth`, fitted by FR1.
    pub fn check_fdb(&self, depth: usize) -> Result<TwoParamFit<T>> {
        self.check_fdb_with_budget(depth, DEFAULT_PARTITION_BUDGET)
    }

    pub fn check_fdb_with_budget(&self, depth: usize, budget: usize) -> Result<TwoParamFit<T>> {
        if depth > budget {
            return Err(Error::DepthTooLarge { k: depth, budget });
        }
        self.require_depth(depth)?;
        let m = &self.values;
        let mut ratios = Vec::with_capacity(depth + 1);
        ratios.push(T::one());
        for k in 1..=depth {
            let worst = Partitions::new(k)
                .map(|p| self.fdb_term(&p) / m[k].clone())
                .fold(T::zero(), T::max_of);
            ratios.push(worst);
        }
        Ok(TwoParamFit::fr1(ratios))
    }

    /// The (FdB) ratios recomputed over ordered compositions instead of partitions.
    pub fn fdb_ratios_over_compositions(&self, depth: usize) -> Result<Vec<T>> {
        self.require_depth(depth)?;
        let m = &self.values;
        let mut ratios = vec![T::one()];
        for k in 1..=depth {
            let worst = (1..=k)
                .flat_map(|l| compositions(k, l))
                .map(|c| self.fdb_term(&c) / m[k].clone())
                .fold(T::zero(), T::max_of);
            ratios.push(worst);
        }
        Ok(ratios)
    }

    /// `M_l * M_{j_1} ... M_{j_l}` for the parts `j_1..j_l`.
    fn fdb_term(&self, parts: &[usize]) -> T {
        parts
            .iter()
            .fold(self.values[parts.len()].clone(), |acc, &j| acc * self.values[j].clone())
    }

    /// Derivation closedness: `D = max_{j<=depth} m_j^(1/(j+1))`.
    pub fn check_dc(&self, depth: usize) -> Result<TwoParamFit<T>> {
        self.require_depth(depth + 1)?;
        let ratios = self.quotients().values[..=depth].to_vec();
        Ok(TwoParamFit::single(ratios, 0, 1))
    }

    /// Moderate growth: `A = max_{1<=j+k<=depth} (M_{j+k} / (M_j M_k))^(1/(j+k))`.
    pub fn check_mg(&self, depth: usize) -> Result<TwoParamFit<T>> {
        self.require_depth(depth)?;
        let m = &self.values;
        let ratios = (0..=depth)
            .map(|n| {
                (0..=n)
                    .map(|j| m[n].clone() / (m[j].clone() * m[n - j].clone()))
                    .fold(T::zero(), T::max_of)
            })
            .collect();
        Ok(TwoParamFit::single(ratios, 1, 0))
    }

    /// Entrywise product; both sequences must have equal length.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        if self.values.len() != other.values.len() {
            return Err(Error::InvalidArgument(format!(
                "lengths differ: {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(WeightSequence {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
            generator: Generator::PointwiseProduct {
                left: Box::new(self.generator.clone()),
                right: Box::new(other.generator.clone()),
            },
            precision: self.precision.max(other.precision),
        })
    }

    /// `S(j, n)`: sum over compositions of `n` into `j` positive parts of `prod M_{m_i}`.
    pub fn composition_sum(&self, j: usize, n: usize) -> Result<T> {
        if j == 0 || n < j {
            return Err(Error::InvalidArgument(format!(
                "composition sum needs 1 <= j <= n, got j = {j}, n = {n}"
            )));
        }
        Ok(self.composition_sum_table(j, n)?[j][n].clone())
    }

    /// Table `S[i][m]` for `1 <= i <= jmax`, `i <= m <= n` (zero elsewhere), by
    /// `S(1, m) = M_m`, `S(i, m) = sum_{k=1}^{m-i+1} M_k S(i-1, m-k)`.
    pub fn composition_sum_table(&self, jmax: usize, n: usize) -> Result<Vec<Vec<T>>> {
        self.require_depth(n)?;
        let m = &self.values;
        let mut table = vec![vec![T::zero(); n + 1]; jmax + 1];
        if jmax >= 1 {
            table[1][1..=n].clone_from_slice(&m[1..=n]);
        }
        for i in 2..=jmax {
            for len in i..=n {
                let mut acc = T::zero();
                for k in 1..=(len - i + 1) {
                    acc = acc + m[k].clone() * table[i - 1][len - k].clone();
                }
                table[i][len] = acc;
            }
        }
        Ok(table)
    }
}

/// Exchange form of a sequence: the generator tag and exact decimal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub generator: Generator,
    pub values: Vec<String>,
}

impl<T: Scalar> WeightSequence<T> {
    pub fn to_record(&self) -> SequenceRecord {
        SequenceRecord {
            generator: self.generator.clone(),
            values: self.values.iter().map(Scalar::to_decimal).collect(),
        }
    }

    /// Rebuilds a sequence from its record; the values are validated as for [`WeightSequence::custom`].
    pub fn from_record(rec: &SequenceRecord) -> Result<Self> {
        Ok(Self::from_decimal_strings(&rec.values)?.with_generator(rec.generator.clone()))
    }

    pub fn from_decimal_strings(values: &[String]) -> Result<Self> {
        Self::custom(values.iter().map(|s| T::parse_decimal(s)).collect::<Result<_>>()?)
    }

    /// `index,value` rows with exact decimal values.
    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| vec![j.to_string(), v.to_decimal()])
            .collect();
        crate::io::csv_table(&["index", "value"], &rows)
    }

    /// Reads `index,value` rows; the header is optional and indices must run `0, 1, ...`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (idx, value) = line
                .split_once(',')
                .ok_or_else(|| Error::parse("sequence csv row", line))?;
            if idx.trim() == "index" {
                continue;
            }
            if idx.trim().parse::<usize>().ok() != Some(values.len()) {
                return Err(Error::parse("sequence csv index", line));
            }
            values.push(T::parse_decimal(value.trim())?);
        }
        Self::custom(values)
    }
}

/// Window evidence for the equivalence of `M` and `L` over `1 <= j <= depth`.
pub fn equivalence_fit<T: Scalar>(
    m: &WeightSequence<T>,
    l: &WeightSequence<T>,
    depth: usize,
) -> Result<EquivalenceFit> {
    m.require_depth(depth)?;
    l.require_depth(depth)?;
    if depth < 1 {
        return Err(Error::InvalidArgument("window must contain j >= 1".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 1..=depth {
        let d = (l.values[j].ln_abs_f64() - m.values[j].ln_abs_f64()) / j as f64;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok(EquivalenceFit {
        log_low: lo,
        log_high: hi,
    })
}
