//! Run configuration shared by every subcommand.
//!
//! Values are resolved in the order: command-line flag, config file,
//! environment (precision only), built-in default.

use std::path::{Path, PathBuf};

use carleman::basis_fn::FnSpec;
use carleman::sector::GridSpec;
use carleman::Precision;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Overrides the default working precision (decimal digits).
pub const PRECISION_ENV: &str = "CARLEMAN_PRECISION";

pub const DEFAULT_PRECISION: u32 = 50;
pub const MIN_PRECISION: u32 = 30;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Working precision in decimal digits.
    pub precision: u32,
    /// Depth `N` of weight sequences and experiments.
    pub depth: usize,
    /// Number of expansion coefficients.
    pub order: usize,
    /// Largest remainder index measured by `verify`.
    pub nmax: usize,
    /// Partial sums kept by the characteristic transform.
    pub terms: usize,
    pub partition_budget: usize,
    /// Grid override; each command has its own default grid.
    pub grid: Option<GridSpec>,
    /// Sector radius; absent means unbounded.
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub alphaprime: Option<f64>,
    /// Generator tag such as `gevrey:1`, `power_gevrey:-1` or `constant`.
    pub sequence: Option<String>,
    /// Custom sequence file (JSON array, sequence record, or `index,value` CSV).
    pub custom_sequence: Option<PathBuf>,
    pub witness: Option<String>,
    /// Reference sequences for the equivalence table of `seq-check`.
    pub compare: Vec<String>,
    pub functions: Vec<FnSpec>,
    /// Evaluation point of `basis-eval` and `transform`.
    pub point: Option<Point>,
    /// Number of Taylor coefficients printed by `basis-eval`.
    pub coefficients: usize,
    pub shift_inner: bool,
    /// Re-measure products and compositions against their numeric source.
    pub check: bool,
    pub paper_bound: Option<f64>,
    pub paper_h: f64,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub r_start: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Additional CSV export of the `W_n` table.
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: env_precision().ok().flatten().unwrap_or(DEFAULT_PRECISION),
            depth: 20,
            order: 12,
            nmax: 30,
            terms: carleman::char_transform::DEFAULT_TRANSFORM_TERMS,
            partition_budget: carleman::weight_seq::DEFAULT_PARTITION_BUDGET,
            grid: None,
            radius: None,
            alpha: None,
            alphaprime: None,
            sequence: None,
            custom_sequence: None,
            witness: None,
            compare: Vec::new(),
            functions: Vec::new(),
            point: None,
            coefficients: 0,
            shift_inner: false,
            check: false,
            paper_bound: None,
            paper_h: 1.0,
            beta: None,
            epsilon: None,
            r_start: None,
            output: None,
            format: Format::Json,
            csv: None,
        }
    }
}

/// The precision named by the environment, if set.
pub fn env_precision() -> Result<Option<u32>, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{PRECISION_ENV} must be a positive integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{PRECISION_ENV}: {e}"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.precision < MIN_PRECISION {
            return usage(format!("precision must be at least {MIN_PRECISION} digits, got {}", self.precision));
        }
        if self.depth < 2 {
            return usage(format!("depth must be at least 2, got {}", self.depth));
        }
        if self.order < 1 || self.nmax < 1 || self.terms < 1 {
            return usage("order, nmax and terms must be positive".into());
        }
        if let Some(r) = self.radius {
            if r.is_nan() || r <= 0.0 {
                return usage(format!("sector radius must be positive, got {r}"));
            }
        }
        match &self.grid {
            Some(g) => g.validate().map_err(|e| CliError::Usage(e.to_string())),
            None => Ok(()),
        }
    }

    /// The configured grid, or `default` when none is set.
    pub fn grid_or(&self, default: GridSpec) -> GridSpec {
        self.grid.unwrap_or(default)
    }

    pub fn prec(&self) -> Precision {
        Precision::from_digits(self.precision)
    }
}

/// `inf` or a positive number.
pub fn parse_radius(s: &str) -> Result<Option<f64>, String> {
    match s.trim() {
        "inf" | "infinity" => Ok(None),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|r| *r > 0.0 && r.is_finite())
            .map(Some)
            .ok_or_else(|| format!("expected a positive radius or \"inf\", got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_json() {
        let mut c = RunConfig {
            precision: 64,
            depth: 25,
            radius: Some(3.5),
            alpha: Some(1.5),
            sequence: Some("power_gevrey:-1".into()),
            functions: vec!["etilde:1".parse().unwrap(), FnSpec::Krs],
            compare: vec!["gevrey:1".into()],
            paper_bound: Some(4.0),
            format: Format::Table,
            csv: Some("w.csv".into()),
            ..RunConfig::default()
        };
        c.grid = Some(GridSpec::default().with_counts(7, 3));
        c.point = Some(Point { r: 0.25, theta: -0.5 });
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn missing_fields_take_defaults() {
        let c = RunConfig::from_json(r#"{"depth": 9}"#).unwrap();
        assert_eq!(c.depth, 9);
        assert_eq!(c.order, RunConfig::default().order);
        assert!(RunConfig::from_json(r#"{"depht": 9}"#).is_err());
    }

    #[test]
    fn invariants() {
        let ok = RunConfig {
            precision: 50,
            ..RunConfig::default()
        };
        assert!(ok.validate().is_ok());
        assert!(RunConfig { precision: 29, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { depth: 1, ..ok }.validate().is_err());
    }

    #[test]
    fn radius_literals() {
        assert_eq!(parse_radius("inf"), Ok(None));
        assert_eq!(parse_radius("2"), Ok(Some(2.0)));
        assert!(parse_radius("-1").is_err());
    }
}
