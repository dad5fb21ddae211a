use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coiso_cli::{
    cmd_verify_with, CapacityResult, IndexArgs, SolverArgs, SpectrumRow, VerifyArgs, VerifyResult,
};
use coiso_core::{closed_form_capacity, Body, CoisoIndex};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coisocap"))
}

fn body_file(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str], body: Option<&Path>) -> Output {
    let mut c = bin();
    c.args(args);
    if let Some(b) = body {
        c.arg(b);
    }
    c.output().unwrap()
}

fn capacity(body: &Path, extra: &[&str]) -> (CapacityResult, Output) {
    let mut args = vec!["capacity"];
    args.extend_from_slice(extra);
    let out = run(&args, Some(body));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (serde_json::from_slice(&out.stdout).unwrap(), out)
}

#[test]
fn ball_capacity_is_half_pi() {
    let dir = TempDir::new().unwrap();
    let b = body_file(&dir, "ball.json", r#"{"type":"ball","r":1.0}"#);
    let (r, _) = capacity(&b, &["--n", "2", "--k", "1"]);
    assert_eq!(r.method, "closed_form");
    assert!((r.capacity - PI / 2.0).abs() < 1e-11);
    assert_eq!((r.n, r.k), (2, 1));

    let (checked, _) = capacity(
        &b,
        &[
            "--n", "2", "--k", "1", "--check", "--modes", "8", "--starts", "4",
        ],
    );
    assert!((checked.diagnostics.solver_value.unwrap() - PI / 2.0).abs() < 1e-6);
    let chord = checked.chord.expect("chord summary");
    assert!(chord.certified);
    assert!(chord.residuals.ode <= 1e-6);
}

#[test]
fn ellipsoid_and_polydisc_closed_forms() {
    let dir = TempDir::new().unwrap();
    let e = body_file(&dir, "e.json", r#"{"type":"ellipsoid","radii":[1.0,2.0]}"#);
    let (r, _) = capacity(&e, &["--k", "1"]);
    assert!((r.capacity - PI).abs() < 1e-11);
    let p = body_file(
        &dir,
        "p.json",
        r#"{"type":"product","factors":[{"type":"ball","r":1.0},{"type":"ball","r":1.2}]}"#,
    );
    let (r, _) = capacity(&p, &["--k", "1"]);
    assert!((r.capacity - 0.72 * PI).abs() < 1e-11);
}

#[test]
fn solver_path_for_lp_ball() {
    let dir = TempDir::new().unwrap();
    let b = body_file(&dir, "lp.json", r#"{"type":"lp_ball","p":4,"radii":[1.0]}"#);
    let (r, _) = capacity(&b, &["--k", "0", "--modes", "6", "--starts", "2"]);
    assert_eq!(r.method, "clarke_dual");
    assert!(r.capacity > PI / 2.0 && r.capacity < 2.0);
    assert!(r.diagnostics.rayleigh_residual.is_some());
}

#[test]
fn output_is_deterministic_and_twelve_digits() {
    let dir = TempDir::new().unwrap();
    let b = body_file(
        &dir,
        "lp.json",
        r#"{"type":"lp_ball","p":3,"radii":[1.0,1.1]}"#,
    );
    let args = ["--k", "1", "--modes", "4", "--starts", "3", "--seed", "7"];
    let (_, a) = capacity(&b, &args);
    let (_, c) = capacity(&b, &args);
    assert_eq!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let digits = v["capacity"]
        .to_string()
        .trim_start_matches("0.")
        .replace('.', "")
        .len();
    assert!(digits <= 12, "{}", v["capacity"]);
}

#[test]
fn chord_samples_csv() {
    let dir = TempDir::new().unwrap();
    let b = body_file(&dir, "ball.json", r#"{"type":"ball","r":1.0,"n":1}"#);
    let csv = dir.path().join("chord.csv");
    capacity(
        &b,
        &[
            "--k",
            "0",
            "--modes",
            "4",
            "--starts",
            "1",
            "--samples",
            csv.to_str().unwrap(),
        ],
    );
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,q1,p1"));
    assert!(lines.count() > 10);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["capacity", "--k", "1"], Some(&missing)).status.code(),
        Some(2)
    );
    let bad = body_file(&dir, "bad.json", r#"{"type":"cube"}"#);
    let out = run(&["capacity", "--n", "2", "--k", "1"], Some(&bad));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let ball = body_file(&dir, "ball.json", r#"{"type":"ball","r":1.0}"#);
    assert_eq!(
        run(&["capacity", "--n", "2", "--k", "3"], Some(&ball))
            .status
            .code(),
        Some(2)
    );
    let off = body_file(
        &dir,
        "off.json",
        r#"{"type":"translate","shift":[0.0,0.0,0.0,5.0],"base":{"type":"ball","r":1.0}}"#,
    );
    assert_eq!(
        run(&["capacity", "--n", "2", "--k", "1"], Some(&off))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(
            &["capacity", "--n", "2", "--k", "1", "--modes", "0"],
            Some(&ball)
        )
        .status
        .code(),
        Some(2)
    );
}

fn spectrum(args: &[&str], body: Option<&Path>) -> Vec<SpectrumRow> {
    let mut a = vec!["spectrum"];
    a.extend_from_slice(args);
    let out = run(&a, body);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn spectrum_modes() {
    let dir = TempDir::new().unwrap();
    let e = body_file(&dir, "e.json", r#"{"type":"ellipsoid","radii":[1.0,1.0]}"#);
    let rows = spectrum(&["--k", "1", "--bound", "4"], Some(&e));
    assert!((rows[0].action - PI / 2.0).abs() < 1e-11);
    assert_eq!(rows.len(), 3);

    let w = spectrum(&["--w-domain", "3", "--eps", "0.01"], None);
    assert_eq!(w.len(), 2);
    assert!(w[0].action > PI / 2.0 && w[0].action < PI / 2.0 + 0.01);

    let disc = body_file(&dir, "disc.json", r#"{"type":"ball","r":1.0}"#);
    let c = spectrum(&["--planar"], Some(&disc));
    assert_eq!(c.len(), 2);
    assert!(c.iter().all(|r| (r.action - PI / 2.0).abs() < 1e-9));
}

#[test]
fn spectrum_csv_columns() {
    let out = run(&["spectrum", "--w-domain", "3", "--format", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "action,label");
    assert_eq!(lines.len(), 3);
}

#[test]
fn spectrum_rejects_bad_w_domain() {
    let out = run(&["spectrum", "--w-domain", "3", "--eps", "0.5"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_ball_and_polydisc_pass() {
    let dir = TempDir::new().unwrap();
    let ball = body_file(&dir, "ball.json", r#"{"type":"ball","r":1.0}"#);
    let out = run(
        &[
            "verify", "--n", "2", "--k", "1", "--modes", "8", "--starts", "4",
        ],
        Some(&ball),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: VerifyResult = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r.passed);
    assert!(r.chord.unwrap().passed());
    assert!(String::from_utf8_lossy(&out.stderr).contains("conformality"));

    let pd = body_file(
        &dir,
        "pd.json",
        r#"{"type":"product","factors":[{"type":"ball","r":1.0},{"type":"ball","r":1.2}]}"#,
    );
    let out = run(
        &["verify", "--k", "1", "--modes", "8", "--starts", "2"],
        Some(&pd),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: VerifyResult = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r
        .axioms
        .iter()
        .any(|c| c.axiom.to_string() == "product_formula" && c.passed));
}

#[test]
fn mis_scaled_oracle_fails_conformality() {
    let dir = TempDir::new().unwrap();
    let ball = body_file(&dir, "ball.json", r#"{"type":"ball","r":1.0}"#);
    let args = VerifyArgs {
        body: ball,
        index: IndexArgs { n: Some(2), k: 1 },
        solver: SolverArgs {
            modes: 4,
            starts: 1,
            seed: 0,
            tol: 1e-7,
            max_iters: 500,
        },
    };
    // linear instead of quadratic in the scale
    let wrong =
        |b: &Body, i: CoisoIndex| Ok(closed_form_capacity(b, i)?.expect("closed form").sqrt());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let failure = cmd_verify_with(&args, &wrong, &mut out, &mut err).unwrap_err();
    assert_eq!(failure.code(), 1);
    assert!(failure.to_string().contains("conformality"));
    let r: VerifyResult = serde_json::from_slice(&out).unwrap();
    assert!(!r.passed);
}
