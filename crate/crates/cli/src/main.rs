//! `carleman`: command-line front end for weight-sequence checks, basis
//! function evaluation, certified expansions and the verification harness.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a usage
//! or input error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use carleman::basis_fn::FnSpec;
use carleman::sector::GridSpec;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use commands::Outcome;
use config::{parse_radius, Format, Point, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or arguments (exit 2).
    Usage(String),
    /// A check could not be carried out or failed outright (exit 1).
    Check(String),
}

impl From<carleman::Error> for CliError {
    fn from(e: carleman::Error) -> Self {
        use carleman::Error as E;
        match e {
            E::DepthTooLarge { .. }
            | E::NotLogConvex(_)
            | E::NoLcWitness(_)
            | E::BudgetExceeded { .. }
            | E::RayAngleInfeasible(_)
            | E::ZeroCoefficient(_)
            | E::NonrealCoefficient(_) => CliError::Check(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "carleman", version, about = "Certified asymptotic expansions in Carleman classes")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in decimal digits (at least 30).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Output file; `-` or absent writes to stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Writes the resolved configuration to this file before running.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SeqArgs {
    /// Gevrey sequence `(j!)^a`.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["power_gevrey", "seq", "custom"])]
    gevrey: Option<f64>,
    /// Sequence `j^(j a)`.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["seq", "custom"])]
    power_gevrey: Option<f64>,
    /// Generator tag: `gevrey:a`, `power_gevrey:a` or `constant`.
    #[arg(long, conflicts_with = "custom")]
    seq: Option<String>,
    /// Custom sequence file (JSON array of decimal strings, sequence record, or CSV).
    #[arg(long)]
    custom: Option<PathBuf>,
}

impl SeqArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let tag = self
            .gevrey
            .map(|a| format!("gevrey:{a}"))
            .or(self.power_gevrey.map(|a| format!("power_gevrey:{a}")))
            .or(self.seq);
        if let Some(t) = tag {
            cfg.sequence = Some(t);
            cfg.custom_sequence = None;
        }
        if let Some(p) = self.custom {
            cfg.custom_sequence = Some(p);
            cfg.sequence = None;
        }
    }
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
}

impl GridArgs {
    fn is_empty(&self) -> bool {
        self.n_r.is_none() && self.n_theta.is_none() && self.r_min.is_none() && self.r_max.is_none() && self.margin.is_none()
    }

    /// Applies the overrides on top of the configured grid, or of `default`.
    fn apply(self, cfg: &mut RunConfig, default: GridSpec) {
        if self.is_empty() {
            return;
        }
        let g = cfg.grid.get_or_insert(default);
        g.n_r = self.n_r.unwrap_or(g.n_r);
        g.n_theta = self.n_theta.unwrap_or(g.n_theta);
        g.r_min = self.r_min.unwrap_or(g.r_min);
        g.r_max = self.r_max.unwrap_or(g.r_max);
        g.margin = self.margin.unwrap_or(g.margin);
    }
}

#[derive(Args, Debug, Default)]
struct PointArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
}

impl PointArgs {
    fn apply(self, cfg: &mut RunConfig) {
        if self.r.is_some() || self.theta.is_some() {
            let p = cfg.point.get_or_insert(Point { r: 1.0, theta: 0.0 });
            p.r = self.r.unwrap_or(p.r);
            p.theta = self.theta.unwrap_or(p.theta);
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Log-convexity and the (alg), (FdB), (dc), (mg) fits of a weight sequence.
    SeqCheck {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        depth: Option<usize>,
        /// Largest k enumerated over integer partitions.
        #[arg(long)]
        budget: Option<usize>,
        /// Reference sequence tags for the equivalence table (repeatable).
        #[arg(long)]
        compare: Vec<String>,
    },
    /// Evaluates a basis function at a point and lists its coefficients.
    BasisEval {
        #[arg(long = "fn")]
        function: Option<FnSpec>,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        coeffs: Option<usize>,
    },
    /// Builds the characteristic function of a sequence on `S_alpha`.
    Transform {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        alphaprime: Option<f64>,
        /// Log-convex sequence tag equivalent to the transform sequence.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        terms: Option<usize>,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Product of two certified expansions.
    ExpandProduct {
        #[arg(long = "f")]
        f: Option<FnSpec>,
        #[arg(long = "g")]
        g: Option<FnSpec>,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Re-measures the product against its numeric source.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Composition `outer o inner` of two certified expansions.
    ExpandCompose {
        #[arg(long)]
        outer: Option<FnSpec>,
        #[arg(long)]
        inner: Option<FnSpec>,
        /// Uses `c_0 - inner` so that the inner constant term vanishes.
        #[arg(long)]
        shift_inner: bool,
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Measures `W_n` of a basis function and checks stated constants.
    Verify {
        #[arg(long = "fn")]
        function: Option<FnSpec>,
        #[command(flatten)]
        seq: SeqArgs,
        /// Sector opening over pi; defaults to the function's domain.
        #[arg(long)]
        alpha: Option<f64>,
        /// Sector radius, a number or `inf`.
        #[arg(long, value_parser = parse_radius)]
        radius: Option<Option<f64>>,
        #[arg(long)]
        nmax: Option<usize>,
        /// Requires `W_n <= B h^n` for every measured n.
        #[arg(long)]
        paper_bound: Option<f64>,
        #[arg(long)]
        paper_h: Option<f64>,
        /// Also writes the `W_n` table as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Necessity experiments and the sector image check.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    seq: SeqArgs,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alphaprime: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct ImageArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    r_start: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Subcommand, Debug)]
enum Experiment {
    /// Coefficient inequalities of `f * f` for the characteristic function `f`.
    ProductNecessity {
        #[command(flatten)]
        common: ExperimentArgs,
    },
    /// Coefficient chain of `f o (c_0 - f)` that forces (FdB).
    ComposeNecessity {
        #[command(flatten)]
        common: ExperimentArgs,
        #[command(flatten)]
        image: ImageArgs,
    },
    /// Searches a radius on which `c_0 - f` maps `S_beta` near the positive axis.
    SectorImage {
        #[command(flatten)]
        common: ExperimentArgs,
        #[command(flatten)]
        image: ImageArgs,
    },
}

enum Action {
    SeqCheck,
    BasisEval,
    Transform,
    ExpandProduct,
    ExpandCompose,
    Verify,
    ProductNecessity,
    ComposeNecessity,
    SectorImage,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl ExperimentArgs {
    fn apply(self, cfg: &mut RunConfig) {
        self.seq.apply(cfg);
        set_opt(&mut cfg.alpha, self.alpha);
        set_opt(&mut cfg.alphaprime, self.alphaprime);
        set(&mut cfg.depth, self.depth);
    }
}

impl ImageArgs {
    fn apply(self, cfg: &mut RunConfig) {
        set_opt(&mut cfg.beta, self.beta);
        set_opt(&mut cfg.epsilon, self.epsilon);
        set_opt(&mut cfg.r_start, self.r_start);
        let alpha = cfg.alpha.unwrap_or(1.0);
        self.grid.apply(cfg, carleman::verify::ImageOptions::defaults_for(alpha).grid);
    }
}

/// Folds the subcommand flags into `cfg`.
fn merge(command: Command, cfg: &mut RunConfig) -> Action {
    match command {
        Command::SeqCheck {
            seq,
            depth,
            budget,
            compare,
        } => {
            seq.apply(cfg);
            set(&mut cfg.depth, depth);
            set(&mut cfg.partition_budget, budget);
            if !compare.is_empty() {
                cfg.compare = compare;
            }
            Action::SeqCheck
        }
        Command::BasisEval { function, point, coeffs } => {
            if let Some(f) = function {
                cfg.functions = vec![f];
            }
            point.apply(cfg);
            set(&mut cfg.coefficients, coeffs);
            Action::BasisEval
        }
        Command::Transform {
            seq,
            alpha,
            alphaprime,
            witness,
            order,
            terms,
            point,
        } => {
            seq.apply(cfg);
            set_opt(&mut cfg.alpha, alpha);
            set_opt(&mut cfg.alphaprime, alphaprime);
            set_opt(&mut cfg.witness, witness);
            set(&mut cfg.order, order);
            set(&mut cfg.terms, terms);
            point.apply(cfg);
            Action::Transform
        }
        Command::ExpandProduct {
            f,
            g,
            seq,
            order,
            check,
            grid,
        } => {
            set_functions(cfg, f, g);
            seq.apply(cfg);
            set(&mut cfg.order, order);
            cfg.check |= check;
            grid.apply(cfg, carleman::char_transform::CharacteristicOptions::default().fit_grid);
            Action::ExpandProduct
        }
        Command::ExpandCompose {
            outer,
            inner,
            shift_inner,
            seq,
            order,
            check,
            grid,
        } => {
            set_functions(cfg, outer, inner);
            cfg.shift_inner |= shift_inner;
            seq.apply(cfg);
            set(&mut cfg.order, order);
            cfg.check |= check;
            grid.apply(cfg, carleman::char_transform::CharacteristicOptions::default().fit_grid);
            Action::ExpandCompose
        }
        Command::Verify {
            function,
            seq,
            alpha,
            radius,
            nmax,
            paper_bound,
            paper_h,
            csv,
            grid,
        } => {
            if let Some(f) = function {
                cfg.functions = vec![f];
            }
            seq.apply(cfg);
            set_opt(&mut cfg.alpha, alpha);
            set(&mut cfg.radius, radius);
            set(&mut cfg.nmax, nmax);
            set_opt(&mut cfg.paper_bound, paper_bound);
            set(&mut cfg.paper_h, paper_h);
            set_opt(&mut cfg.csv, csv);
            grid.apply(cfg, GridSpec::default());
            Action::Verify
        }
        Command::Experiment(e) => match e {
            Experiment::ProductNecessity { common } => {
                common.apply(cfg);
                Action::ProductNecessity
            }
            Experiment::ComposeNecessity { common, image } => {
                common.apply(cfg);
                image.apply(cfg);
                Action::ComposeNecessity
            }
            Experiment::SectorImage { common, image } => {
                common.apply(cfg);
                image.apply(cfg);
                Action::SectorImage
            }
        },
    }
}

/// Replaces the first two function slots with whichever of `a`, `b` are given.
fn set_functions(cfg: &mut RunConfig, a: Option<FnSpec>, b: Option<FnSpec>) {
    for (i, f) in [a, b].into_iter().enumerate() {
        if let Some(f) = f {
            if cfg.functions.len() <= i {
                cfg.functions.resize(i + 1, f);
            }
            cfg.functions[i] = f;
        }
    }
}

fn dispatch(action: Action, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match action {
        Action::SeqCheck => commands::seq_check(cfg),
        Action::BasisEval => commands::basis_eval(cfg),
        Action::Transform => commands::transform(cfg),
        Action::ExpandProduct => commands::expand_product(cfg),
        Action::ExpandCompose => commands::expand_compose(cfg),
        Action::Verify => commands::verify(cfg),
        Action::ProductNecessity => commands::product_necessity(cfg),
        Action::ComposeNecessity => commands::compose_necessity(cfg),
        Action::SectorImage => commands::sector_image(cfg),
    }
}

/// `key.path: value` lines of a report whose numbers are already strings.
fn table(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                table(x, &key, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                table(x, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn render(outcome: &Outcome, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(carleman::io::to_decimal_json(&outcome.report)?),
        Format::Csv => outcome
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("this command has no CSV view; use --format json or table".into())),
        Format::Table => {
            let mut out = String::new();
            table(&carleman::io::stringify_numbers(outcome.report.clone()), "", &mut out);
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    config::env_precision()?;
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.precision, cli.precision);
    set_opt(&mut cfg.output, cli.output);
    set(&mut cfg.format, cli.format);
    let action = merge(cli.command, &mut cfg);
    cfg.validate()?;
    if let Some(p) = &cli.save_config {
        std::fs::write(p, cfg.to_json())
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?;
    }
    let outcome = dispatch(action, &cfg)?;
    let text = render(&outcome, cfg.format)?;
    carleman::io::emit(&text, cfg.output.as_deref()).map_err(|e| CliError::Usage(e.to_string()))?;
    if let (Some(path), Some(csv)) = (&cfg.csv, &outcome.csv) {
        carleman::io::emit(csv, Some(path)).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    // clap reports its own usage errors with exit code 2
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Check(m)) => {
            eprintln!("carleman: check failed: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("carleman: {m}");
            ExitCode::from(2)
        }
    }
}
