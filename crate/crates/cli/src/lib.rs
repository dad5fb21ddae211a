//! Command-line front end for `coisocap`.
//!
//! Bodies are read from JSON files:
//!
//! ```json
//! {"type": "ball", "r": 1.0}
//! {"type": "ellipsoid", "radii": [1.0, 2.0]}
//! {"type": "lp_ball", "p": 4, "radii": [1.0, 1.0]}
//! {"type": "product", "factors": [{"type": "ball", "r": 1.0}, {"type": "ball", "r": 1.2}]}
//! {"type": "translate", "shift": [0.5, 0.0, 0.0, 0.0], "base": {"type": "ball", "r": 1.0}}
//! ```
//!
//! Radii are per symplectic plane `(q_i, p_i)`. A ball takes its dimension
//! from `--n`, or from an explicit `"n"` field; inside a product it is a disc.
//!
//! `capacity` prints
//!
//! ```json
//! {"capacity": 1.5707963268, "method": "clarke_dual", "n": 2, "k": 1,
//!  "chord": {"action": ..., "residuals": {"ode": ..., "boundary": ..., "gauge": ...}, "certified": true},
//!  "diagnostics": {...}}
//! ```
//!
//! with `method` either `clarke_dual` or `closed_form`. All floating point
//! output carries 12 significant digits.
//!
//! Exit codes: 0 success, 1 failed verification, 2 bad input, 3 solver failure.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coiso_core::calculus::{axiom_harness_with, closed_form_capacity, AxiomCheck};
use coiso_core::dual::{
    minimize_capacity, reconstruct_chord, verify_chord, ChordReport, SolverOptions,
    VerifyTolerances,
};
use coiso_core::spectrum::{
    ellipsoid_spectrum, planar_chord_actions, PlanarCurve, Spectrum, WDomain,
};
use coiso_core::{Body, BodySpec, CoisoIndex};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Relative gap allowed between closed form and solver under `--check`.
pub const CHECK_TOL: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(
    name = "coisocap",
    version,
    about = "Coisotropic capacities of convex bodies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity c^{n,k} of a body, with the minimizing chord.
    Capacity(CapacityArgs),
    /// Chord actions up to a bound.
    Spectrum(SpectrumArgs),
    /// Axiom checks and chord verification.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    /// Half-dimension; defaults to the body's own.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of p-directions in the coisotropic subspace.
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Fourier truncation order.
    #[arg(long, default_value_t = SolverOptions::default().modes)]
    pub modes: usize,
    #[arg(long, default_value_t = SolverOptions::default().starts)]
    pub starts: usize,
    #[arg(long, default_value_t = SolverOptions::default().seed)]
    pub seed: u64,
    /// Gradient tolerance of the descent.
    #[arg(long, default_value_t = SolverOptions::default().grad_tol)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iters)]
    pub max_iters: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            modes: self.modes,
            starts: self.starts,
            max_iters: self.max_iters,
            grad_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    /// BodySpec JSON file.
    pub body: PathBuf,
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Run the solver even when a closed form exists and compare.
    #[arg(long)]
    pub check: bool,
    /// Write the chord samples as CSV (t, q.., p..).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// BodySpec JSON file (ball or diagonal ellipsoid).
    pub body: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    #[arg(long, default_value_t = 100.0)]
    pub bound: f64,
    /// Smoothed W-domain with box size N instead of a body file.
    #[arg(long, value_name = "N", conflicts_with_all = ["body", "planar"])]
    pub w_domain: Option<f64>,
    #[arg(long, default_value_t = 0.01, requires = "w_domain")]
    pub eps: f64,
    #[arg(long, requires = "w_domain")]
    pub delta1: Option<f64>,
    #[arg(long, requires = "w_domain")]
    pub delta2: Option<f64>,
    /// Treat a planar body (n = 1) as a curve and cut it along the q axis.
    #[arg(long)]
    pub planar: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// BodySpec JSON file.
    pub body: PathBuf,
    #[command(flatten)]
    pub index: IndexArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
    Verify(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Verify(_) => EXIT_VERIFY,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Solver(e) => write!(f, "solver error: {e:#}"),
            Failure::Verify(s) => write!(f, "verification failed: {s}"),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub ode: f64,
    pub boundary: f64,
    pub gauge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordSummary {
    pub action: f64,
    pub residuals: Residuals,
    pub certified: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub modes: usize,
    pub starts: usize,
    pub seed: u64,
    pub grad_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts_agreeing: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonsmooth: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub capacity: f64,
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub chord: Option<ChordSummary>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub action: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub n: usize,
    pub k: usize,
    pub passed: bool,
    pub axioms: Vec<AxiomCheck>,
    pub chord: Option<ChordReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chord_error: Option<String>,
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            serde_json::Number::from_f64(sig12(n.as_f64().expect("f64")))
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("output serializes");
    serde_json::to_string_pretty(&round_floats(v)).expect("json value serializes")
}

fn read_spec(path: &Path) -> std::result::Result<BodySpec, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Input)?;
    BodySpec::from_json(&text)
        .with_context(|| format!("bad body description in {}", path.display()))
        .map_err(Failure::Input)
}

fn load_body(
    path: &Path,
    n: Option<usize>,
    k: usize,
) -> std::result::Result<(Body, CoisoIndex), Failure> {
    let spec = read_spec(path)?;
    let n = n
        .or_else(|| spec.intrinsic_n())
        .ok_or_else(|| Failure::Input(anyhow!("the body has no intrinsic dimension, pass --n")))?;
    let body = spec.build(n).map_err(|e| Failure::Input(e.into()))?;
    let idx = CoisoIndex::new(n, k).map_err(|e| Failure::Input(e.into()))?;
    body.check_admissible(idx)
        .map_err(|e| Failure::Input(e.into()))?;
    Ok((body, idx))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    writeln!(out, "{text}").map_err(|e| Failure::Input(e.into()))
}

pub fn cmd_capacity(args: &CapacityArgs, out: &mut dyn Write) -> Outcome {
    let (body, idx) = load_body(&args.body, args.index.n, args.index.k)?;
    let opts = args.solver.options();
    opts.validate().map_err(|e| Failure::Input(e.into()))?;
    let closed = closed_form_capacity(&body, idx).map_err(|e| Failure::Input(e.into()))?;
    let mut diagnostics = Diagnostics {
        modes: opts.modes,
        starts: opts.starts,
        seed: opts.seed,
        grad_tol: opts.grad_tol,
        closed_form: closed,
        ..Default::default()
    };
    let mut result = CapacityResult {
        capacity: closed.unwrap_or(f64::NAN),
        method: if closed.is_some() {
            "closed_form"
        } else {
            "clarke_dual"
        }
        .into(),
        n: idx.n(),
        k: idx.k(),
        chord: None,
        diagnostics: Diagnostics::default(),
    };
    let mut check_failed = None;
    if closed.is_none() || args.check || args.samples.is_some() {
        let est = minimize_capacity(&body, idx, &opts).map_err(|e| Failure::Solver(e.into()))?;
        diagnostics.rayleigh_residual = Some(est.rayleigh_residual);
        diagnostics.starts_agreeing = Some(est.starts_agreeing);
        diagnostics.converged = Some(est.converged);
        diagnostics.nonsmooth = Some(est.nonsmooth);
        match reconstruct_chord(&est, &body, idx) {
            Ok(chord) => {
                if let Some(path) = &args.samples {
                    fs::write(path, chord.samples_csv())
                        .with_context(|| format!("cannot write {}", path.display()))
                        .map_err(Failure::Input)?;
                }
                result.chord = Some(ChordSummary {
                    action: chord.action,
                    residuals: Residuals {
                        ode: chord.ode_residual,
                        boundary: chord.boundary_residual,
                        gauge: chord.gauge_residual,
                    },
                    certified: chord.certified,
                });
            }
            Err(e) => diagnostics.chord_error = Some(e.to_string()),
        }
        match closed {
            Some(c) => {
                let gap = (est.value / c - 1.0).abs();
                diagnostics.solver_value = Some(est.value);
                diagnostics.relative_gap = Some(gap);
                if args.check && gap > CHECK_TOL {
                    check_failed = Some(format!(
                        "solver value {} differs from closed form {c} by {gap:.3e}",
                        est.value
                    ));
                }
            }
            None => result.capacity = est.value,
        }
    }
    result.diagnostics = diagnostics;
    match args.format {
        Format::Json => emit(out, &to_json(&result))?,
        Format::Csv => emit(
            out,
            &format!(
                "capacity,method,n,k\n{:.11e},{},{},{}",
                result.capacity, result.method, result.n, result.k
            ),
        )?,
    }
    match check_failed {
        Some(msg) => Err(Failure::Solver(anyhow!(msg))),
        None => Ok(()),
    }
}

fn planar_curve(body: &Body) -> std::result::Result<PlanarCurve, Failure> {
    if body.n() != 1 {
        return Err(Failure::Input(anyhow!("planar mode needs a body in R^2")));
    }
    match body.plane_radii() {
        Some(r) => PlanarCurve::circle(r[0]).map_err(|e| Failure::Input(e.into())),
        None => Err(Failure::Input(anyhow!("planar mode supports discs only"))),
    }
}

pub fn compute_spectrum(args: &SpectrumArgs) -> std::result::Result<Spectrum, Failure> {
    let input = |e: coiso_core::Error| Failure::Input(e.into());
    if let Some(n_box) = args.w_domain {
        let w = match (args.delta1, args.delta2) {
            (None, None) => WDomain::new(n_box, args.eps),
            (d1, d2) => WDomain::with_blend(
                n_box,
                args.eps,
                d1.unwrap_or(args.eps / 10.0),
                d2.unwrap_or(args.eps / 5.0),
            ),
        }
        .map_err(input)?;
        let curve = w.curve().map_err(input)?;
        return planar_chord_actions(&curve, args.bound).map_err(input);
    }
    let path = args
        .body
        .as_ref()
        .ok_or_else(|| Failure::Input(anyhow!("a body file or --w-domain is required")))?;
    if args.planar {
        let (body, _) = load_body(path, args.n.or(Some(1)), 0)?;
        return planar_chord_actions(&planar_curve(&body)?, args.bound).map_err(input);
    }
    let (body, idx) = load_body(path, args.n, args.k)?;
    let radii = body.plane_radii().ok_or_else(|| {
        Failure::Input(anyhow!(
            "spectra are available for balls and diagonal ellipsoids"
        ))
    })?;
    ellipsoid_spectrum(&radii, idx, args.bound).map_err(input)
}

pub fn cmd_spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> Outcome {
    let spectrum = compute_spectrum(args)?;
    match args.format {
        Format::Json => {
            let rows: Vec<SpectrumRow> = spectrum
                .entries()
                .iter()
                .map(|e| SpectrumRow {
                    action: e.action,
                    label: e.label.clone(),
                })
                .collect();
            emit(out, &to_json(&rows))
        }
        Format::Csv => {
            let csv = spectrum.to_csv();
            emit(out, csv.trim_end())
        }
    }
}

/// A capacity evaluator for the axiom harness.
pub type Evaluator<'a> = &'a (dyn Fn(&Body, CoisoIndex) -> coiso_core::Result<f64> + Sync);

fn table(result: &VerifyResult) -> String {
    let mut s = format!(
        "{:<16} {:>14} {:>14} {:>12}  status\n",
        "axiom", "measured", "expected", "violation"
    );
    for c in &result.axioms {
        s.push_str(&format!(
            "{:<16} {:>14.6e} {:>14.6e} {:>12.3e}  {}\n",
            c.axiom.to_string(),
            c.measured,
            c.expected,
            c.violation,
            if c.passed { "pass" } else { "FAIL" }
        ));
        if let Some(e) = &c.error {
            s.push_str(&format!("  error: {e}\n"));
        }
    }
    match (&result.chord, &result.chord_error) {
        (Some(r), _) => s.push_str(&format!(
            "chord: {} (gauge {:.2e}, cone {:.2e}, boundary {:.2e}, action {:.6e})\n",
            if r.passed() {
                "verified"
            } else {
                "not verified"
            },
            r.gauge_defect,
            r.cone_residual,
            r.boundary_defect,
            r.action
        )),
        (None, Some(e)) => s.push_str(&format!("chord: unavailable ({e})\n")),
        (None, None) => {}
    }
    s
}

/// Runs the axiom checks with `eval`; the chord is always taken from the solver.
pub fn cmd_verify_with(
    args: &VerifyArgs,
    eval: Evaluator<'_>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (body, idx) = load_body(&args.body, args.index.n, args.index.k)?;
    let opts = args.solver.options();
    opts.validate().map_err(|e| Failure::Input(e.into()))?;
    let report = axiom_harness_with(&body, idx, eval);
    let (chord, chord_error) = match minimize_capacity(&body, idx, &opts)
        .and_then(|est| reconstruct_chord(&est, &body, idx))
        .and_then(|c| verify_chord(&c, &body, idx, &VerifyTolerances::default()))
    {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let result = VerifyResult {
        n: idx.n(),
        k: idx.k(),
        passed: report.passed(),
        axioms: report.checks.clone(),
        chord,
        chord_error,
    };
    write!(err, "{}", table(&result)).map_err(|e| Failure::Input(e.into()))?;
    emit(out, &to_json(&result))?;
    let failing: Vec<String> = report.failures().map(|c| c.axiom.to_string()).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "axiom check failed: {}",
            failing.join(", ")
        )))
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let opts = args.solver.options();
    let eval = move |b: &Body, i: CoisoIndex| Ok(minimize_capacity(b, i, &opts)?.value);
    cmd_verify_with(args, &eval, out, err)
}

/// Dispatches a parsed command line and returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match &cli.command {
        Command::Capacity(a) => cmd_capacity(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{f}");
            f.code()
        }
    }
}
