//! Batch front end: `catalog`, `delta`, `validate`, `integrate`, `sweep`,
//! `calibrate`.
//!
//! Options come from flags or from a JSON config file (`--config`); flags
//! given on the command line override the file. Every report embeds the
//! resolved [`RunConfig`], so rerunning it reproduces the report.
//!
//! Exit status: 0 on success, 2 when a validate/integrate comparison
//! misses its threshold, 1 on usage or runtime errors.

pub mod registry;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::actions::{action_by_id, catalog, PolarAction};
use crate::error::{Error, Result};
use crate::jacobians::{closed_form_scale, cross_validate, delta_closed, delta_numeric};
use crate::quadrature::{
    calibrate_c, mc_integrate_full, reduced_integrate, reduced_integrate_general,
    riemannian_orbit_constant, section_rule, DeltaMethod, Estimate,
};
use crate::rng::DEFAULT_SEED;
use registry::{function_by_id, registry_listing};

pub use registry::{test_function_registry, TestFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Catalog,
    Delta,
    Validate,
    Integrate,
    Sweep,
    Calibrate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DeltaChoice {
    #[default]
    Numeric,
    ClosedForm,
}

impl From<DeltaChoice> for DeltaMethod {
    fn from(c: DeltaChoice) -> Self {
        match c {
            DeltaChoice::Numeric => DeltaMethod::Numeric,
            DeltaChoice::ClosedForm => DeltaMethod::ClosedForm,
        }
    }
}

pub const DEFAULT_ORDER: usize = 64;
pub const DEFAULT_MARGIN: f64 = 0.1;
pub const DEFAULT_GRID: usize = 256;
/// Default `n`: section points for `validate`, samples otherwise.
pub const DEFAULT_VALIDATE_POINTS: usize = 100;
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Default thresholds: maximum relative error for `validate`, standard
/// errors for `integrate`.
pub const DEFAULT_VALIDATE_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_INTEGRATE_THRESHOLD: f64 = 4.0;

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub action: Option<String>,
    pub function: Option<String>,
    pub order: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub margin: f64,
    pub threshold: f64,
    pub grid: usize,
    pub coords: Option<Vec<f64>>,
    pub delta: DeltaChoice,
    pub roots: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        let (n_samples, threshold) = match subcommand {
            Subcommand::Validate => (DEFAULT_VALIDATE_POINTS, DEFAULT_VALIDATE_THRESHOLD),
            _ => (DEFAULT_SAMPLES, DEFAULT_INTEGRATE_THRESHOLD),
        };
        RunConfig {
            subcommand,
            action: None,
            function: None,
            order: DEFAULT_ORDER,
            n_samples,
            seed: DEFAULT_SEED,
            margin: DEFAULT_MARGIN,
            threshold,
            grid: DEFAULT_GRID,
            coords: None,
            delta: DeltaChoice::default(),
            roots: false,
            output: None,
            format: Format::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvariantViolation(m.to_string()));
        if self.n_samples == 0 {
            return bad("--n must be at least 1");
        }
        if self.order == 0 {
            return bad("--order must be at least 1");
        }
        if self.grid < 2 {
            return bad("--grid must be at least 2");
        }
        if !(self.margin >= 0.0) || !self.threshold.is_finite() || self.threshold < 0.0 {
            return bad("--margin and --threshold must be finite and non-negative");
        }
        Ok(())
    }
}

/// Partial configuration as read from a config file; absent fields take
/// their defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    subcommand: Option<Subcommand>,
    action: Option<String>,
    function: Option<String>,
    order: Option<usize>,
    n_samples: Option<usize>,
    seed: Option<u64>,
    margin: Option<f64>,
    threshold: Option<f64>,
    grid: Option<usize>,
    coords: Option<Vec<f64>>,
    delta: Option<DeltaChoice>,
    roots: Option<bool>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

/// Verify the generalized Weyl integration formula on cataloged polar actions.
#[derive(Debug, Parser)]
#[command(name = "weylreduce", version)]
pub struct Cli {
    /// What to run; may instead come from the config file.
    #[arg(value_enum)]
    pub subcommand: Option<Subcommand>,
    /// Action id (see `catalog`).
    #[arg(long)]
    pub action: Option<String>,
    /// Test function id (see `catalog`).
    #[arg(long)]
    pub function: Option<String>,
    /// Quadrature order (nodes per circle or per panel).
    #[arg(long)]
    pub order: Option<usize>,
    /// Section points for `validate`, Monte Carlo samples otherwise.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random seed; falls back to the config file, then `WEYLREDUCE_SEED`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum regularity margin of validation points.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Failure threshold: relative error (`validate`) or standard errors (`integrate`).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Number of sweep points over one period.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Section coordinates for `delta`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coords: Option<Vec<f64>>,
    /// Delta engine for reduced integrals.
    #[arg(long, value_enum)]
    pub delta: Option<DeltaChoice>,
    /// Include root data in the catalog.
    #[arg(long)]
    pub roots: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the fields of a report's `config` object.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    /// Merges the config file (if any) with flags; flags win.
    pub fn resolve(self) -> Result<RunConfig> {
        let file: ConfigFile = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => ConfigFile::default(),
        };
        let subcommand = self.subcommand.or(file.subcommand).ok_or_else(|| {
            Error::InvariantViolation("no subcommand given on the command line or in the config".into())
        })?;
        let mut cfg = RunConfig::new(subcommand);
        macro_rules! pick {
            ($field:ident, $flag:expr) => {
                if let Some(v) = $flag.or(file.$field) {
                    cfg.$field = v;
                }
            };
        }
        cfg.action = self.action.or(file.action);
        cfg.function = self.function.or(file.function);
        cfg.coords = self.coords.or(file.coords);
        cfg.output = self.out.or(file.output);
        pick!(order, self.order);
        pick!(n_samples, self.n);
        pick!(seed, self.seed.or(file.seed).or(env_seed()?));
        pick!(margin, self.margin);
        pick!(threshold, self.threshold);
        pick!(grid, self.grid);
        pick!(delta, self.delta);
        pick!(format, self.format);
        cfg.roots = self.roots || file.roots.unwrap_or(false);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Name of the environment variable used when no seed is given.
pub const SEED_ENV: &str = "WEYLREDUCE_SEED";

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Error::InvariantViolation(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
        }),
        Err(_) => Ok(None),
    }
}

/// Result of a run: exit status and the report text.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub report: String,
}

fn require_action(cfg: &RunConfig) -> Result<PolarAction> {
    let id = cfg.action.as_deref().ok_or_else(|| Error::UnknownId {
        what: "action",
        id: String::new(),
        available: crate::actions::CATALOG_IDS.iter().map(|s| s.to_string()).collect(),
    })?;
    action_by_id(id)
}

fn require_function(cfg: &RunConfig) -> Result<TestFunction> {
    let id = cfg.function.as_deref().ok_or_else(|| Error::UnknownId {
        what: "function",
        id: String::new(),
        available: test_function_registry().iter().map(|f| f.id.to_string()).collect(),
    })?;
    function_by_id(id)
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn json_report(cfg: &RunConfig, body: Value) -> Result<String> {
    let mut obj = json!({ "config": cfg });
    if let (Value::Object(o), Value::Object(b)) = (&mut obj, body) {
        o.extend(b);
    }
    Ok(serde_json::to_string_pretty(&obj)? + "\n")
}

/// Executes a resolved configuration.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.subcommand {
        Subcommand::Catalog => run_catalog(cfg),
        Subcommand::Delta => run_delta(cfg),
        Subcommand::Validate => run_validate(cfg),
        Subcommand::Integrate => run_integrate(cfg),
        Subcommand::Sweep => run_sweep(cfg),
        Subcommand::Calibrate => run_calibrate(cfg),
    }
}

fn ok(report: String) -> Result<Outcome> {
    Ok(Outcome { status: 0, report })
}

fn run_catalog(cfg: &RunConfig) -> Result<Outcome> {
    let actions = catalog();
    match cfg.format {
        Format::Csv => ok(csv(
            "id,kind,group,section_dim,orbit_dim,ambient_dim,weyl_order,closed_form",
            actions.iter().map(|a| {
                format!(
                    "{},{},{},{},{},{},{},{}",
                    a.id,
                    serde_json::to_value(a.kind).unwrap().as_str().unwrap(),
                    a.group,
                    a.section_dim,
                    a.orbit_dim(),
                    a.ambient_dim,
                    a.weyl_order,
                    a.has_closed_form()
                )
            }),
        )),
        Format::Json => {
            let list: Vec<Value> = actions
                .iter()
                .map(|a| {
                    let mut v = json!({
                        "id": a.id,
                        "kind": a.kind,
                        "group": a.group.to_string(),
                        "space": a.space.map(|s| s.label()),
                        "section_dim": a.section_dim,
                        "orbit_dim": a.orbit_dim(),
                        "ambient_dim": a.ambient_dim,
                        "weyl_order": a.weyl_order,
                        "closed_form": a.has_closed_form(),
                    });
                    if cfg.roots {
                        v["roots"] = json!(a.roots);
                    }
                    v
                })
                .collect();
            ok(json_report(
                cfg,
                json!({ "actions": list, "functions": registry_listing(&actions) }),
            )?)
        }
    }
}

fn run_delta(cfg: &RunConfig) -> Result<Outcome> {
    let action = require_action(cfg)?;
    let s = cfg.coords.clone().ok_or_else(|| {
        Error::InvariantViolation("delta needs --coords".into())
    })?;
    let numeric = delta_numeric(&action, &s)?;
    let closed = delta_closed(&action, &s)?;
    let kappa = closed_form_scale(&action)?;
    let regularity = action.is_regular(&s)?;
    match cfg.format {
        Format::Csv => ok(csv(
            "coord,delta_numeric,delta_closed",
            [format!(
                "{},{:e},{}",
                s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                numeric / kappa,
                fmt_opt(closed)
            )],
        )),
        Format::Json => ok(json_report(
            cfg,
            json!({
                "action": action.id,
                "coords": s,
                "delta_numeric": numeric,
                "calibration_scale": kappa,
                "delta_calibrated": numeric / kappa,
                "delta_closed": closed,
                "regularity": regularity,
            }),
        )?),
    }
}

fn run_validate(cfg: &RunConfig) -> Result<Outcome> {
    let action = require_action(cfg)?;
    let report = cross_validate(&action, cfg.n_samples, cfg.margin, cfg.seed)?;
    let passed = report
        .max_abs_rel_error
        .is_none_or(|e| e < cfg.threshold);
    let status = if passed { 0 } else { 2 };
    let text = match cfg.format {
        Format::Csv => csv(
            "coord,delta_numeric,delta_closed",
            report.sample_points.iter().enumerate().map(|(i, s)| {
                format!(
                    "{},{:e},{}",
                    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                    report.numeric[i] / report.calibration_scale,
                    fmt_opt(report.closed_form.get(i).copied())
                )
            }),
        ),
        Format::Json => json_report(
            cfg,
            json!({ "report": report, "threshold": cfg.threshold, "passed": passed }),
        )?,
    };
    Ok(Outcome {
        status,
        report: text,
    })
}

/// One row of an integration report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub action: String,
    pub function: String,
    pub method: String,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    pub order: usize,
    pub c: f64,
    pub weyl_order: usize,
}

/// Absolute slack added to the `integrate` comparison so that exact
/// agreement with zero standard error is not reported as a failure.
const INTEGRATE_ABS_SLACK: f64 = 1e-10;

fn run_integrate(cfg: &RunConfig) -> Result<Outcome> {
    let action = require_action(cfg)?;
    let function = require_function(cfg)?;
    let f = function.bind(&action)?;
    let cal = calibrate_c(&action, cfg.order)?;
    let method: DeltaMethod = cfg.delta.into();
    let row = |method: &str, e: Estimate| IntegrationResult {
        action: action.id.clone(),
        function: function.id.to_string(),
        method: method.to_string(),
        value: e.value,
        stderr: e.stderr,
        n: e.n_samples,
        seed: cfg.seed,
        order: cfg.order,
        c: cal.c,
        weyl_order: action.weyl_order,
    };
    let full = mc_integrate_full(&action, &f, cfg.n_samples, cfg.seed)?;
    let reduced = if function.is_invariant_for(&action) {
        let fs = function.bind_section(&action)?;
        let v = reduced_integrate(&action, &cal, &fs, cfg.order, method)?;
        row("reduced", Estimate::exact(v))
    } else {
        let nodes = section_rule(&action, cfg.order)?.len();
        let n_orbit = (cfg.n_samples / nodes).max(1);
        let e = reduced_integrate_general(&action, &cal, &f, cfg.order, n_orbit, cfg.seed, method)?;
        row("reduced_general", e)
    };
    let full = row("mc_full", full);
    let diff = (full.value - reduced.value).abs();
    let se = full.stderr.hypot(reduced.stderr);
    let passed = diff <= cfg.threshold * se + INTEGRATE_ABS_SLACK * (1.0 + full.value.abs());
    let text = match cfg.format {
        Format::Csv => csv(
            "action,function,method,value,stderr,n,seed,order,c,weyl_order",
            [&full, &reduced].iter().map(|r| {
                format!(
                    "{},{},{},{:e},{:e},{},{},{},{:e},{}",
                    r.action, r.function, r.method, r.value, r.stderr, r.n, r.seed, r.order, r.c, r.weyl_order
                )
            }),
        ),
        Format::Json => json_report(
            cfg,
            json!({
                "results": [full, reduced],
                "abs_difference": diff,
                "combined_stderr": se,
                "threshold": cfg.threshold,
                "passed": passed,
            }),
        )?,
    };
    Ok(Outcome {
        status: if passed { 0 } else { 2 },
        report: text,
    })
}

/// Sweep points: `grid` values of the first section coordinate across one
/// period (or the sampling box), other coordinates zero.
pub fn sweep_points(action: &PolarAction, grid: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = action.sampling_box()[0];
    let periodic = action.section_period().is_some();
    let denom = if periodic { grid } else { grid - 1 } as f64;
    (0..grid)
        .map(|k| {
            let mut s = vec![0.0; action.section_dim];
            s[0] = lo + (hi - lo) * k as f64 / denom;
            s
        })
        .collect()
}

fn run_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let action = require_action(cfg)?;
    let kappa = closed_form_scale(&action)?;
    let rows = sweep_points(&action, cfg.grid)
        .into_iter()
        .map(|s| Ok((s[0], delta_numeric(&action, &s)? / kappa, delta_closed(&action, &s)?)))
        .collect::<Result<Vec<_>>>()?;
    match cfg.format {
        Format::Csv => ok(csv(
            "coord,delta_numeric,delta_closed",
            rows.iter().map(|(t, n, c)| format!("{t},{n:e},{}", fmt_opt(*c))),
        )),
        Format::Json => {
            let pts: Vec<Value> = rows
                .iter()
                .map(|(t, n, c)| json!({ "coord": t, "delta_numeric": n, "delta_closed": c }))
                .collect();
            ok(json_report(
                cfg,
                json!({ "action": action.id, "calibration_scale": kappa, "points": pts }),
            )?)
        }
    }
}

fn run_calibrate(cfg: &RunConfig) -> Result<Outcome> {
    let action = require_action(cfg)?;
    let cal = calibrate_c(&action, cfg.order)?;
    let c_riem = riemannian_orbit_constant(&action, &cal)?;
    match cfg.format {
        Format::Csv => ok(csv(
            "action,order,c,kappa,weyl_order,reference,riemannian_c",
            [format!(
                "{},{},{:e},{:e},{},{:e},{:e}",
                cal.action, cal.order, cal.c, cal.kappa, cal.weyl_order, cal.reference, c_riem
            )],
        )),
        Format::Json => ok(json_report(
            cfg,
            json!({ "calibration": cal, "riemannian_c": c_riem }),
        )?),
    }
}

/// Parses `args`, runs, and writes the report to `--out` or `stdout`.
/// Diagnostics go to `stderr`. Returns the exit status.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => 1,
            };
        }
    };
    let result = cli.resolve().and_then(|cfg| {
        let outcome = run(&cfg)?;
        match &cfg.output {
            Some(path) => std::fs::write(path, &outcome.report)?,
            None => stdout.write_all(outcome.report.as_bytes())?,
        }
        Ok(outcome.status)
    });
    match result {
        Ok(status) => {
            if status != 0 {
                let _ = writeln!(stderr, "threshold check failed");
            }
            status
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
