//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or IO error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use transasym_core::experiments;
use transasym_core::normal_form::parse_label;
use transasym_core::normal_form::BuiltinLabel;
use transasym_core::singularities::{
    abel_oracle, continue_f0, predict_array, radius_estimate, AbelGeometry, AbelOracle, ContinuationOptions,
};
use transasym_core::transasymptotics::{build_expansion, eval_two_scale, TwoScaleExpansion};
use transasym_core::{builtin, stokes_directions, validate_system, NormalSystem, C64};

use crate::config::{Precision, RunConfig};
use crate::criteria;
use crate::error::CliError;
use crate::schema::{from_pair, to_pair, ArrayJson, ExpansionJson, PathJson, ReportJson, SystemJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{s}` is not `re,im`"));
    match s.split_once(',') {
        Some((a, b)) => Ok(C64::new(num(a)?, num(b)?)),
        None => Ok(C64::new(num(s)?, 0.0)),
    }
}

/// Inclusive `a..b`.
pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("`{s}` is not `a..b`"))?;
    let num = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("`{s}` is not `a..b`"));
    let (a, b) = (num(a)?, num(b)?);
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("`{s}` is not `a..b`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{s}` is not `a..b`"));
    Ok((num(a)?, num(b)?))
}

#[derive(Debug, Parser)]
#[command(name = "transasym", version, about = "Two-scale transasymptotic expansions and singularity arrays")]
pub struct Cli {
    /// Reserved; no command is stochastic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a builtin normal form.
    #[command(subcommand)]
    System(SystemCmd),
    /// Build F_0..F_M and write them as JSON.
    Expand(ExpandArgs),
    /// Evaluate a stored expansion at ξ or at x.
    Eval(EvalArgs),
    /// Predict the singularity array for a constant C.
    Predict(PredictArgs),
    /// Continue F_0 along a polygon in the ξ-plane.
    Continue(ContinueArgs),
    /// Integrate seeded solutions, locate their singularities and compare with the prediction.
    Validate(ValidateArgs),
    /// Acceptance measurements and plot data.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Debug, Subcommand)]
pub enum SystemCmd {
    Show { label: String },
    Validate {
        label: String,
        #[arg(long = "kmax", default_value_t = 3)]
        k_max: u32,
    },
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    pub label: String,
    #[arg(long = "M", default_value_t = 8)]
    pub m: usize,
    #[arg(long = "K", default_value_t = 64)]
    pub k: usize,
    #[arg(long, default_value = "exp.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(default_value = "exp.json")]
    pub expansion: PathBuf,
    /// Evaluate the observable of F_m at this ξ.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with_all = ["c", "x"])]
    pub xi: Option<C64>,
    #[arg(long, default_value_t = 0, requires = "xi")]
    pub m: usize,
    /// Evaluate the two-scale sum at x for this C.
    #[arg(long = "C", value_parser = parse_complex, allow_hyphen_values = true, requires = "x")]
    pub c: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, requires = "c")]
    pub x: Option<C64>,
    /// Number of levels used instead of least-term truncation.
    #[arg(long = "levels")]
    pub levels: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub label: String,
    #[arg(long = "C", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c: C64,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub n: (i64, i64),
    /// Singular point of F_0; defaults per label.
    #[arg(long = "xi-s", value_parser = parse_complex, allow_hyphen_values = true)]
    pub xi_s: Option<C64>,
    #[arg(long, default_value = "array.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContinueArgs {
    pub label: String,
    /// JSON `{"waypoints": [[re, im], ...]}` starting near ξ = 0.
    #[arg(long)]
    pub path: PathBuf,
    #[arg(long, default_value = "continuation.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub label: Option<String>,
    #[arg(long = "C", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c: Option<C64>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub n: Option<(i64, i64)>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "xi-s", value_parser = parse_complex, allow_hyphen_values = true)]
    pub xi_s: Option<C64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Start from a saved configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the resolved configuration.
    #[arg(long = "save-config")]
    pub save_config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ReportCmd {
    /// Measurements behind one acceptance criterion, as JSON on stdout.
    Criterion {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=10))]
        number: u8,
    },
    /// Sup norms of F_m on |ξ| = ρ against the fitted envelope.
    Gevrey {
        label: String,
        #[arg(long = "M", default_value_t = 8)]
        m: usize,
        #[arg(long = "K", default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 6.0)]
        rho: f64,
        #[arg(long, default_value = "gevrey.csv")]
        out: PathBuf,
    },
    /// Direction field of the F_0 flow for the abel example on a grid.
    Phase {
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true, default_value = "-1.5..0.5")]
        re: (f64, f64),
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true, default_value = "-1..1")]
        im: (f64, f64),
        #[arg(long, default_value_t = 41)]
        steps: usize,
        #[arg(long, default_value = "phase.csv")]
        out: PathBuf,
    },
}

/// Parses `argv` (program name first) and runs it.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let precision = match Precision::from_env() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, precision) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn dispatch(cmd: Command, precision: Precision) -> Result<(), CliError> {
    match cmd {
        Command::System(SystemCmd::Show { label }) => system_show(&label),
        Command::System(SystemCmd::Validate { label, k_max }) => system_validate(&label, k_max),
        Command::Expand(a) => expand(&a),
        Command::Eval(a) => eval(&a),
        Command::Predict(a) => predict(&a),
        Command::Continue(a) => continue_cmd(&a),
        Command::Validate(a) => validate(&a, precision),
        Command::Report(ReportCmd::Criterion { number }) => print_json(&criteria::measure(number)?),
        Command::Report(ReportCmd::Gevrey { label, m, k, rho, out }) => gevrey(&label, m, k, rho, &out),
        Command::Report(ReportCmd::Phase { re, im, steps, out }) => phase(re, im, steps, &out),
    }
}

/// A closed stdout (e.g. `| head`) is not an error.
fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable")) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io(Path::new("<stdout>"), e)),
        _ => Ok(()),
    }
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
}

fn system(label: &str) -> Result<NormalSystem, CliError> {
    Ok(builtin(label)?.0)
}

/// Known singular point of `F₀` for the builtins, Domb–Sykes otherwise.
pub fn default_xi_s(label: &str, e: Option<&TwoScaleExpansion>) -> Result<C64, CliError> {
    match parse_label(label)? {
        BuiltinLabel::P1 => Ok(C64::new(12.0, 0.0)),
        BuiltinLabel::Abel => Ok(C64::new(AbelGeometry::default().xi0, 0.0)),
        _ => {
            let owned;
            let e = match e {
                Some(e) => e,
                None => {
                    owned = build_expansion(&system(label)?, 0, 64)?;
                    &owned
                }
            };
            Ok(radius_estimate(&e.observable(0))?.xi_s)
        }
    }
}

fn system_show(label: &str) -> Result<(), CliError> {
    let s = system(label)?;
    let d = stokes_directions(&s, 2);
    print_json(&json!({
        "system": SystemJson::from(&s),
        "stokes": d.stokes,
        "antistokes": d.antistokes,
    }))
}

fn system_validate(label: &str, k_max: u32) -> Result<(), CliError> {
    let s = system(label)?;
    let r = validate_system(&s, k_max);
    print_json(&json!({
        "label": s.label(),
        "k_max": k_max,
        "clean": r.is_clean(),
        "order_violations": r.order_violations.iter().map(|(j, m)| json!({"j": j, "i": m.i, "k": m.k})).collect::<Vec<_>>(),
        "resonances": r.resonances.iter().map(|x| json!({"j": x.j, "k": x.k, "gap": x.gap})).collect::<Vec<_>>(),
        "z_dependencies": r.z_dependencies,
        "duplicate_args": r.duplicate_args,
        "zero_lambdas": r.zero_lambdas,
        "lambda1_normalized": r.lambda1_normalized,
    }))
}

fn expand(a: &ExpandArgs) -> Result<(), CliError> {
    let e = build_expansion(&system(&a.label)?, a.m, a.k)?;
    write_json(&a.out, &ExpansionJson::from(&e))
}

fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let e = read_json::<ExpansionJson>(&a.expansion)?.to_expansion()?;
    if let Some(xi) = a.xi {
        if a.m > e.m_max {
            return Err(CliError::Schema(format!("level {} not stored (M = {})", a.m, e.m_max)));
        }
        let comps: Vec<_> = e.fm[a.m].iter().map(|f| to_pair(f.eval(xi))).collect();
        return print_json(&json!({
            "xi": to_pair(xi),
            "m": a.m,
            "value": to_pair(e.observable(a.m).eval(xi)),
            "components": comps,
        }));
    }
    let (Some(c), Some(x)) = (a.c, a.x) else {
        return Err(CliError::Config("eval needs --xi, or --C with --x".into()));
    };
    let v = eval_two_scale(&e, c, x, a.levels)?;
    print_json(&json!({
        "x": to_pair(x),
        "C": to_pair(c),
        "xi": to_pair(v.xi),
        "m_star": v.m_star,
        "error_bound": v.error_bound,
        "value": to_pair(e.system.observe(&v.value)),
        "components": v.value.iter().copied().map(to_pair).collect::<Vec<_>>(),
    }))
}

fn predict(a: &PredictArgs) -> Result<(), CliError> {
    let s = system(&a.label)?;
    let xi_s = match a.xi_s {
        Some(v) => v,
        None => default_xi_s(&a.label, None)?,
    };
    let arr = predict_array(xi_s, a.c, s.alpha1(), a.n)?;
    write_json(&a.out, &ArrayJson::from(&arr))
}

fn continue_cmd(a: &ContinueArgs) -> Result<(), CliError> {
    let s = system(&a.label)?;
    let path = read_json::<PathJson>(&a.path)?.points();
    let t = continue_f0(&s, &path, &ContinuationOptions::default())?;
    let mut w = csv::Writer::from_path(&a.out)?;
    let mut header = vec!["xi_re".to_string(), "xi_im".to_string()];
    for j in 1..=s.n() {
        header.push(format!("y{j}_re"));
        header.push(format!("y{j}_im"));
    }
    w.write_record(&header)?;
    for p in &t.samples {
        let mut row = vec![p.x.re.to_string(), p.x.im.to_string()];
        for v in &p.y {
            row.push(v.re.to_string());
            row.push(v.im.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(&a.out, e))?;
    let end = t.last();
    print_json(&json!({
        "samples": t.samples.len(),
        "end": to_pair(end.x),
        "value": to_pair(s.observe(&end.y)),
    }))
}

fn resolve(a: &ValidateArgs, precision: Precision) -> Result<RunConfig, CliError> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_json(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => {
            let label = a.label.as_deref().ok_or_else(|| CliError::Config("validate needs a label or --config".into()))?;
            RunConfig::new(label, precision)
        }
    };
    if let Some(l) = &a.label {
        cfg.label = l.clone();
    }
    if let Some(c) = a.c {
        cfg.c = to_pair(c);
    }
    if let Some((lo, hi)) = a.n {
        cfg.n_range = [lo, hi];
    }
    if let Some(m) = a.m {
        cfg.m = m;
    }
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(p) = &a.report {
        cfg.outputs.report = Some(p.display().to_string());
    }
    if let Some(p) = &a.trajectory {
        cfg.outputs.trajectory = Some(p.display().to_string());
    }
    if a.config.is_none() || std::env::var_os(crate::config::PRECISION_VAR).is_some() {
        cfg.precision = precision;
        cfg.tolerances = precision.tolerances();
    }
    Ok(cfg)
}

fn validate(a: &ValidateArgs, precision: Precision) -> Result<(), CliError> {
    let cfg = resolve(a, precision)?;
    if let Some(p) = &a.save_config {
        fs::write(p, cfg.to_json()).map_err(|e| CliError::io(p, e))?;
    }
    let e = build_expansion(&system(&cfg.label)?, cfg.m, cfg.k)?;
    let xi_s = match a.xi_s {
        Some(v) => v,
        None => default_xi_s(&cfg.label, Some(&e))?,
    };
    let c = from_pair(cfg.c);
    let opts = cfg.approach_options();
    let v = experiments::validate_poles(&e, xi_s, c, (cfg.n_range[0], cfg.n_range[1]), &opts)?;
    let report = ReportJson::new(&v.report, &v.observations);
    match &cfg.outputs.report {
        Some(p) => write_json(Path::new(p), &report)?,
        None => print_json(&report)?,
    }
    if let Some(p) = &cfg.outputs.trajectory {
        let p = Path::new(p);
        let mut w = csv::Writer::from_path(p)?;
        let mut header = vec!["n".to_string(), "x_re".to_string(), "x_im".to_string()];
        for j in 1..=e.system.n() {
            header.push(format!("y{j}_re"));
            header.push(format!("y{j}_im"));
        }
        w.write_record(&header)?;
        for (entry, run) in v.array.entries.iter().zip(&v.runs) {
            for s in &run.trajectory.samples {
                let mut row = vec![entry.n.to_string(), s.x.re.to_string(), s.x.im.to_string()];
                for y in &s.y {
                    row.push(y.re.to_string());
                    row.push(y.im.to_string());
                }
                w.write_record(&row)?;
            }
        }
        w.flush().map_err(|e| CliError::io(p, e))?;
    }
    Ok(())
}

fn gevrey(label: &str, m: usize, k: usize, rho: f64, out: &Path) -> Result<(), CliError> {
    let e = build_expansion(&system(label)?, m, k)?;
    let g = transasym_core::transasymptotics::gevrey_fit(&e, rho);
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["m", "s_m", "envelope", "log_s_over_factorial"])?;
    let mut fact = 1.0f64;
    for (j, s) in g.sup_norms.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        w.write_record([j.to_string(), s.to_string(), g.envelope(j).to_string(), (s / fact).ln().to_string()])?;
    }
    w.flush().map_err(|e| CliError::io(out, e))?;
    print_json(&json!({"rho": rho, "K_g": g.k_g, "B_g": g.b_g, "r_squared": g.r_squared.is_finite().then_some(g.r_squared), "valid": g.is_valid()}))
}

fn phase(re: (f64, f64), im: (f64, f64), steps: usize, out: &Path) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Config("--steps must be at least 2".into()));
    }
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["X", "Y", "dX", "dY"])?;
    let at = |(a, b): (f64, f64), i: usize| a + (b - a) * i as f64 / (steps - 1) as f64;
    for i in 0..steps {
        for j in 0..steps {
            let (x, y) = (at(re, i), at(im, j));
            let d = abel_oracle(AbelOracle::PhaseField { x, y })?;
            w.write_record([x.to_string(), y.to_string(), d.re.to_string(), d.im.to_string()])?;
        }
    }
    w.flush().map_err(|e| CliError::io(out, e))
}
