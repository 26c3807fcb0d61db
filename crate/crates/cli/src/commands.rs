//! Subcommand implementations. Each one reads only the resolved [`RunConfig`]
//! and returns a report; rendering and exit codes are handled by the caller.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use carleman::basis_fn::{ComposedFn, Evaluable, FnSpec, ProductFn, SharedFn, ShiftSubtractFn};
use carleman::char_transform::{characteristic_for, fitted_certificate, CharacteristicOptions};
use carleman::expansion::CertifiedExpansion;
use carleman::sector::{GridSpec, LogPoint, Sector};
use carleman::verify::{
    composition_closure_experiment, find_image_radius, measure_remainders, product_necessity_experiment,
    shifted_characteristic, Grid, ImageOptions,
};
use carleman::weight_seq::{equivalence_fit, SequenceRecord};
use carleman::{Generator, Mpf, Rational, Scalar, TwoParamFit, WeightSequence};
use num_complex::Complex;
use serde_json::{json, Value};

use crate::config::{Point, RunConfig};
use crate::CliError;

/// A finished command: the JSON report, an optional CSV view, and whether
/// every check passed.
pub struct Outcome {
    pub report: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

impl Outcome {
    fn passed(report: Value) -> Self {
        Outcome {
            report,
            csv: None,
            pass: true,
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

const DEFAULT_COMPARE: [&str; 2] = ["gevrey:1", "power_gevrey:1"];

// ---------------------------------------------------------------------------
// shared inputs

fn function(cfg: &RunConfig, index: usize, what: &str) -> Result<FnSpec, CliError> {
    cfg.functions
        .get(index)
        .copied()
        .ok_or_else(|| CliError::Usage(format!("missing {what} function tag")))
}

fn alpha(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.alpha.ok_or_else(|| CliError::Usage("--alpha is required".into()))
}

fn sector(alpha: f64, radius: Option<f64>) -> Result<Sector, CliError> {
    Ok(match radius {
        Some(r) => Sector::bounded(alpha, r)?,
        None => Sector::s_alpha(alpha)?,
    })
}

fn sequence_tag<'a>(cfg: &'a RunConfig, default: &'a str) -> &'a str {
    cfg.sequence.as_deref().unwrap_or(default)
}

fn read_custom<T: Scalar>(path: &Path) -> Result<WeightSequence<T>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read sequence {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return Ok(WeightSequence::from_csv(&text)?);
    }
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("sequence {}: {e}", path.display())))?;
    match value {
        Value::Array(items) => {
            let values = items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    Value::Number(n) => Ok(n.to_string()),
                    other => Err(CliError::Usage(format!("sequence entries must be numbers, got {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(WeightSequence::from_decimal_strings(&values)?)
        }
        obj @ Value::Object(_) => {
            let rec: SequenceRecord = serde_json::from_value(obj)
                .map_err(|e| CliError::Usage(format!("sequence {}: {e}", path.display())))?;
            Ok(WeightSequence::from_record(&rec)?)
        }
        _ => Err(CliError::Usage("a sequence file holds an array or a sequence record".into())),
    }
}

/// The configured sequence in MPFR at `depth`; custom sequences are truncated.
fn mp_sequence(cfg: &RunConfig, depth: usize, default: &str) -> Result<WeightSequence<Mpf>, CliError> {
    match &cfg.custom_sequence {
        Some(path) => {
            let m: WeightSequence<Mpf> = read_custom(path)?;
            Ok(if m.depth() > depth { m.truncated(depth)? } else { m })
        }
        None => Ok(WeightSequence::from_generator(
            Generator::parse(sequence_tag(cfg, default))?,
            depth,
            cfg.prec(),
        )?),
    }
}

/// The configured sequence in exact arithmetic, when it has an exact form.
fn exact_sequence(cfg: &RunConfig, depth: usize, default: &str) -> Result<Option<WeightSequence<Rational>>, CliError> {
    match &cfg.custom_sequence {
        Some(path) => Ok(Some(read_custom(path)?)),
        None => {
            let g = Generator::parse(sequence_tag(cfg, default))?;
            Ok(WeightSequence::from_generator(g, depth, cfg.prec()).ok())
        }
    }
}

fn to_mp(m: &WeightSequence<Rational>, cfg: &RunConfig) -> Result<WeightSequence<Mpf>, CliError> {
    let values = m
        .values()
        .iter()
        .map(|v| Mpf::parse_with_prec(&v.to_decimal(), cfg.prec()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightSequence::custom(values)?)
}

fn characteristic_options(cfg: &RunConfig) -> CharacteristicOptions {
    CharacteristicOptions {
        order: cfg.order,
        terms: cfg.terms,
        precision: cfg.prec(),
        ..CharacteristicOptions::default()
    }
}

fn complex_json(z: &Complex<Mpf>, digits: usize) -> Value {
    json!({ "re": z.re.to_digits(digits), "im": z.im.to_digits(digits) })
}

fn point_json(p: &LogPoint) -> Value {
    json!({ "r": p.r, "theta": p.theta })
}

fn single_fit_json<T: Scalar>(fit: &TwoParamFit<T>) -> Value {
    json!({
        "ratios": fit.ratios.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
        "C": fit.constant().to_f64(),
        "depth": fit.depth,
        "half_depth_C": fit.half_depth.as_ref().map(|(_, c)| c.to_f64()),
    })
}

fn pair_fit_json<T: Scalar>(fit: &TwoParamFit<T>) -> Value {
    json!({
        "ratios": fit.ratios.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
        "A": fit.a_fit.to_f64(),
        "h": fit.h_fit.to_f64(),
        "depth": fit.depth,
        "half_depth": fit.half_depth.as_ref().map(|(a, h)| [a.to_f64(), h.to_f64()]),
    })
}

// ---------------------------------------------------------------------------
// seq-check

pub fn seq_check(cfg: &RunConfig) -> CmdResult {
    let depth = cfg.depth;
    if depth > cfg.partition_budget {
        return Err(carleman::Error::DepthTooLarge {
            k: depth,
            budget: cfg.partition_budget,
        }
        .into());
    }
    let (body, mp, csv) = match exact_sequence(cfg, depth, "gevrey:1")? {
        Some(m) => {
            let mp = to_mp(&m, cfg)?;
            (sequence_report(&m, depth, cfg, "exact")?, mp, m.to_csv())
        }
        None => {
            let m = mp_sequence(cfg, depth, "gevrey:1")?;
            (sequence_report(&m, depth, cfg, "mpfr")?, m.clone(), m.to_csv())
        }
    };
    let compare: Vec<String> = if cfg.compare.is_empty() {
        DEFAULT_COMPARE.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.compare.clone()
    };
    let window = depth.min(mp.depth());
    let equivalence = compare
        .iter()
        .map(|tag| {
            let l = WeightSequence::<Mpf>::from_generator(Generator::parse(tag)?, window, cfg.prec())?;
            let fit = equivalence_fit(&mp, &l, window)?;
            let half = equivalence_fit(&mp, &l, (window / 2).max(1))?;
            Ok(json!({
                "against": tag,
                "window": window,
                "b_low": fit.b_low(),
                "b_high": fit.b_high(),
                "half_window": { "b_low": half.b_low(), "b_high": half.b_high() },
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let pass = body["log_convex"]["flag"].as_bool().unwrap_or(false);
    let mut report = body;
    report["equivalence"] = Value::Array(equivalence);
    Ok(Outcome {
        report,
        csv: Some(csv),
        pass,
    })
}

fn sequence_report<T: Scalar>(m: &WeightSequence<T>, depth: usize, cfg: &RunConfig, backend: &str) -> Result<Value, CliError> {
    if m.depth() < depth {
        return Err(CliError::Usage(format!(
            "sequence has depth {}, requested {depth}",
            m.depth()
        )));
    }
    let lc = m.is_log_convex();
    Ok(json!({
        "sequence": m.generator().tag(),
        "backend": backend,
        "depth": depth,
        "values": m.values()[..=depth].iter().map(Scalar::to_f64).collect::<Vec<_>>(),
        "log_convex": { "flag": lc.flag, "first_violation": lc.first_violation },
        "alg": single_fit_json(&m.check_alg(depth)?),
        "fdb": pair_fit_json(&m.check_fdb_with_budget(depth, cfg.partition_budget)?),
        "dc": single_fit_json(&m.check_dc(depth - 1)?),
        "mg": single_fit_json(&m.check_mg(depth)?),
    }))
}

// ---------------------------------------------------------------------------
// basis-eval

pub fn basis_eval(cfg: &RunConfig) -> CmdResult {
    let spec = function(cfg, 0, "a")?;
    let prec = cfg.prec();
    let digits = cfg.precision as usize;
    let f: SharedFn<Mpf> = spec.build()?;
    let pt = cfg.point.unwrap_or(Point { r: 1.0, theta: 0.0 });
    let p = LogPoint::new(pt.r, pt.theta)?;
    let value = f.evaluate(&p, prec)?;
    let coeffs = f.coefficients(cfg.coefficients, prec)?;
    Ok(Outcome::passed(json!({
        "function": spec.to_string(),
        "domain": f.domain(),
        "uniform_bound": f.uniform_bound(),
        "precision_digits": cfg.precision,
        "point": point_json(&p),
        "value": complex_json(&value, digits),
        "coefficients": coeffs.iter().map(|c| complex_json(c, digits)).collect::<Vec<_>>(),
    })))
}

// ---------------------------------------------------------------------------
// transform

pub fn transform(cfg: &RunConfig) -> CmdResult {
    let alpha = alpha(cfg)?;
    let opts = characteristic_options(cfg);
    let depth = opts.terms.max(opts.order) + 1;
    let m = mp_sequence(cfg, depth, "gevrey:1")?;
    let witness = match &cfg.witness {
        Some(tag) => Some(WeightSequence::<Mpf>::from_generator(Generator::parse(tag)?, depth, cfg.prec())?),
        None => None,
    };
    let res = characteristic_for(&m, alpha, cfg.alphaprime, witness.as_ref(), &opts)?;
    let mut report = serde_json::to_value(res.to_record())?;
    report["alpha"] = json!(alpha);
    report["sequence"] = json!(m.generator().tag());
    report["coefficient_bound_holds"] = json!(res.expansion.coefficient_bound_holds());
    if let Some(pt) = cfg.point {
        let p = LogPoint::new(pt.r, pt.theta)?;
        let v = res.result.evaluate(&p, cfg.prec())?;
        report["evaluation"] = json!({ "point": point_json(&p), "value": complex_json(&v, cfg.precision as usize) });
    }
    Ok(Outcome {
        pass: res.expansion.coefficient_bound_holds(),
        report,
        csv: None,
    })
}

// ---------------------------------------------------------------------------
// expand-product, expand-compose

/// Fit grid used when a certificate is measured rather than known.
fn fit_grid() -> GridSpec {
    CharacteristicOptions::default().fit_grid
}

fn fitted_expansion(
    f: &dyn Evaluable<Mpf>,
    seq: &WeightSequence<Mpf>,
    cfg: &RunConfig,
) -> Result<CertifiedExpansion<Mpf>, CliError> {
    let prec = cfg.prec();
    let coeffs = f.coefficients(cfg.order, prec)?;
    let opts = CharacteristicOptions {
        precision: prec,
        fit_grid: cfg.grid_or(fit_grid()),
        fit_nmax: cfg.order,
        ..CharacteristicOptions::default()
    };
    let (a, h) = fitted_certificate(f, &coeffs, seq, &opts)?;
    Ok(CertifiedExpansion::new(coeffs, seq.clone(), a, h, f.domain())?)
}

fn remeasure(source: &dyn Evaluable<Mpf>, e: &CertifiedExpansion<Mpf>, cfg: &RunConfig) -> Result<(Value, bool), CliError> {
    let grid = Grid::new(e.sector(), cfg.grid_or(fit_grid()));
    let rep = measure_remainders(source, e.coeffs(), e.seq(), &grid, e.order(), cfg.prec())?;
    let (a, h) = (e.a().to_f64(), e.h().to_f64());
    let within = rep.within(a, h);
    Ok((
        json!({ "report": rep, "within_certificate": within, "first_excess": rep.first_excess(a, h) }),
        within,
    ))
}

pub fn expand_product(cfg: &RunConfig) -> CmdResult {
    let (fs, gs) = (function(cfg, 0, "first")?, function(cfg, 1, "second")?);
    let f: SharedFn<Mpf> = fs.build()?;
    let g: SharedFn<Mpf> = gs.build()?;
    let seq = mp_sequence(cfg, cfg.order + 1, "gevrey:1")?;
    let ef = fitted_expansion(f.as_ref(), &seq, cfg)?;
    let eg = fitted_expansion(g.as_ref(), &seq, cfg)?;
    let alg = seq.check_alg(cfg.order)?.constant().clone();
    let prod = ef.product(&eg, &alg)?;
    let mut report = json!({
        "f": fs.to_string(),
        "g": gs.to_string(),
        "sequence": seq.generator().tag(),
        "alg_C": alg.to_f64(),
        "f_expansion": ef.to_record(),
        "g_expansion": eg.to_record(),
        "product": prod.to_record(),
        "coefficient_bound_holds": prod.coefficient_bound_holds(),
    });
    let mut pass = prod.coefficient_bound_holds();
    if cfg.check {
        let h = ProductFn::new(f, g)?;
        let (v, ok) = remeasure(&h, &prod, cfg)?;
        report["check"] = v;
        pass &= ok;
    }
    Ok(Outcome {
        report,
        csv: None,
        pass,
    })
}

pub fn expand_compose(cfg: &RunConfig) -> CmdResult {
    let (gs, fs) = (function(cfg, 0, "outer")?, function(cfg, 1, "inner")?);
    let outer: SharedFn<Mpf> = gs.build()?;
    let base: SharedFn<Mpf> = fs.build()?;
    let seq = mp_sequence(cfg, cfg.order + 1, "gevrey:1")?;
    let eg = fitted_expansion(outer.as_ref(), &seq, cfg)?;
    let (inner, ef): (SharedFn<Mpf>, _) = if cfg.shift_inner {
        let e = fitted_expansion(base.as_ref(), &seq, cfg)?.shift_subtract();
        (Arc::new(ShiftSubtractFn::new(base)), e)
    } else {
        (base.clone(), fitted_expansion(base.as_ref(), &seq, cfg)?)
    };
    let fdb = seq.check_fdb_with_budget(cfg.order, cfg.partition_budget)?;
    let comp = eg.compose(&ef, &fdb.a_fit, &fdb.h_fit)?;
    let mut report = json!({
        "outer": gs.to_string(),
        "inner": inner.kind(),
        "sequence": seq.generator().tag(),
        "fdb": { "C": fdb.a_fit.to_f64(), "h": fdb.h_fit.to_f64() },
        "outer_expansion": eg.to_record(),
        "inner_expansion": ef.to_record(),
        "composition": comp.to_record(),
        "coefficient_bound_holds": comp.coefficient_bound_holds(),
    });
    let mut pass = comp.coefficient_bound_holds();
    if cfg.check {
        let h = ComposedFn::new(outer, inner)?;
        let (v, ok) = remeasure(&h, &comp, cfg)?;
        report["check"] = v;
        pass &= ok;
    }
    Ok(Outcome {
        report,
        csv: None,
        pass,
    })
}

// ---------------------------------------------------------------------------
// verify

pub fn verify(cfg: &RunConfig) -> CmdResult {
    let spec = function(cfg, 0, "a")?;
    let prec = cfg.prec();
    let f: SharedFn<Mpf> = spec.build()?;
    let s = match cfg.alpha {
        Some(a) => sector(a, cfg.radius)?,
        None => f.domain(),
    };
    let seq = mp_sequence(cfg, cfg.nmax, "constant")?;
    if seq.depth() < cfg.nmax {
        return Err(CliError::Usage(format!("sequence depth {} is below nmax = {}", seq.depth(), cfg.nmax)));
    }
    let coeffs = f.coefficients(cfg.nmax, prec)?;
    let grid = Grid::new(s, cfg.grid_or(GridSpec::default()));
    let rep = measure_remainders(f.as_ref(), &coeffs, &seq, &grid, cfg.nmax, prec)?;
    let fit_finite = rep.fit.a.is_finite() && rep.fit.h.is_finite();
    let paper = cfg.paper_bound.map(|b| rep.within(b, cfg.paper_h));
    let pass = fit_finite && paper.unwrap_or(true);
    let csv = rep.to_csv();
    let report = json!({
        "function": spec.to_string(),
        "sequence": seq.generator().tag(),
        "W": rep.w,
        "argmax": rep.argmax,
        "fit": rep.fit,
        "grid": rep.grid,
        "points": rep.points,
        "precision": { "digits": cfg.precision, "bits": rep.precision_bits },
        "paper_bound": cfg.paper_bound.map(|b| json!({ "A": b, "h": cfg.paper_h, "first_excess": rep.first_excess(b, cfg.paper_h) })),
        "pass_flags": { "fit_finite": fit_finite, "paper_bound": paper },
        "pass": pass,
    });
    Ok(Outcome {
        report,
        csv: Some(csv),
        pass,
    })
}

// ---------------------------------------------------------------------------
// experiment

pub fn product_necessity(cfg: &RunConfig) -> CmdResult {
    let alpha = alpha(cfg)?;
    let m = mp_sequence(cfg, cfg.depth, "gevrey:1")?;
    let rep = product_necessity_experiment(&m, alpha, cfg.alphaprime, cfg.depth, &characteristic_options(cfg))?;
    Ok(Outcome {
        pass: rep.pass,
        report: serde_json::to_value(&rep)?,
        csv: None,
    })
}

fn image_options(cfg: &RunConfig, alpha: f64) -> ImageOptions {
    let mut io = ImageOptions::defaults_for(alpha);
    if let Some(b) = cfg.beta {
        io.beta = b;
        // keep the default epsilon admissible for the chosen beta
        io.epsilon = PI / 4.0 * (alpha - b);
    }
    if let Some(e) = cfg.epsilon {
        io.epsilon = e;
    }
    if let Some(r) = cfg.r_start {
        io.r_start = r;
    }
    io.grid = cfg.grid_or(io.grid);
    io.precision = cfg.prec();
    io
}

pub fn compose_necessity(cfg: &RunConfig) -> CmdResult {
    let alpha = alpha(cfg)?;
    let m = mp_sequence(cfg, cfg.depth, "gevrey:1")?;
    let image = image_options(cfg, alpha);
    let rep = composition_closure_experiment(&m, alpha, cfg.alphaprime, cfg.depth, Some(&image), &characteristic_options(cfg))?;
    Ok(Outcome {
        pass: rep.pass,
        report: serde_json::to_value(&rep)?,
        csv: None,
    })
}

pub fn sector_image(cfg: &RunConfig) -> CmdResult {
    let alpha = alpha(cfg)?;
    let opts = characteristic_options(cfg);
    let m = mp_sequence(cfg, cfg.depth, "gevrey:1")?;
    let res = characteristic_for(&m, alpha, cfg.alphaprime, None, &opts)?;
    let f0 = shifted_characteristic(&res);
    let io = image_options(cfg, alpha);
    let search = find_image_radius(f0.as_ref(), io.beta, alpha, io.epsilon, &io.grid, io.r_start, io.precision)?;
    let table: Vec<Value> = search
        .tried
        .iter()
        .map(|(r, dev, pass)| json!({ "r": r, "max_deviation": dev, "pass": pass }))
        .collect();
    let csv = {
        let rows: Vec<Vec<String>> = search
            .tried
            .iter()
            .map(|(r, dev, pass)| vec![format!("{r:e}"), format!("{dev:e}"), pass.to_string()])
            .collect();
        carleman::io::csv_table(&["r", "max_deviation", "pass"], &rows)
    };
    let report = json!({
        "alpha": alpha,
        "beta": io.beta,
        "epsilon": io.epsilon,
        "sequence": m.generator().tag(),
        "function": f0.kind(),
        "found": search.found,
        "r": search.r,
        "deviation_table": table,
        "report": search.report,
    });
    Ok(Outcome {
        pass: search.found,
        report,
        csv: Some(csv),
    })
}
