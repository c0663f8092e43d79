use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use casimir_ball::cli::{CheckReport, EnergyReport, ForceReport};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_casimir-ball");

const OSCILLATOR_CONFIG: &str = r#"
units_note = "lengths in units of the ball radius"
geometry.a = 1.0
geometry.lambda = 0.5
geometry.rho = 1.0
model.kind = "oscillators"
model.oscillators = [[1.0, 2.0]]
"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn casimir-ball")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn reference_energy(name: &str) -> f64 {
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/energy_reference.json"),
    )
    .unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let case = v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap();
    case["energy"].as_str().unwrap().parse().unwrap()
}

#[test]
fn energy_json_round_trips_and_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), OSCILLATOR_CONFIG);
    let out = run(&["energy", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&out);
    let report: EnergyReport = serde_json::from_str(&text).unwrap();
    let expected = reference_energy("one_oscillator");
    let r = &report.results;
    assert!(((r.analytic.total - expected) / expected).abs() < 1e-9);
    assert!(((r.brute_force.unwrap().total - expected) / expected).abs() < 1e-6);
    assert!(r.agreement.analytic_vs_kernel < 1e-9);
    assert_eq!(r.agreement.brute_agrees, Some(true));
    assert!(r.agreement.kernel_agrees);
    // Flat schema: the four terms sit next to the total.
    let raw: Value = serde_json::from_str(&text).unwrap();
    for key in ["total", "volume_term", "surface_term", "constant_term", "large_distance_term", "error_estimate"] {
        assert!(raw["results"]["analytic"][key].is_number(), "{key}");
    }
    assert!(raw["results"]["agreement"]["analytic_vs_brute"].is_number());
    assert_eq!(report.config.units_note.as_deref(), Some("lengths in units of the ball radius"));
    // The echoed config runs again to the same output.
    let echoed = serde_json::to_string(&report.config).unwrap();
    let back: casimir_ball::cli::RunConfig = serde_json::from_str(&echoed).unwrap();
    assert_eq!(back, report.config);
    // eps - 1 = 4 pi (1)(1/2) exceeds the dilute threshold.
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn static_dilute_energy_is_pinned() {
    let rho = 0.01 / (4.0 * std::f64::consts::PI);
    let out = run(&[
        "energy",
        "--set", "geometry.a=1.0",
        "--set", "geometry.lambda=0.5",
        "--set", &format!("geometry.rho={rho:e}"),
        "--set", "model.kind=static",
        "--set", "model.alpha0=1.0",
    ]);
    let report: EnergyReport = serde_json::from_str(&stdout(&out)).unwrap();
    let expected = reference_energy("static_dilute");
    assert!(((report.results.analytic.total - expected) / expected).abs() < 1e-9);
    assert!(!report.results.diluteness.warning);
    assert!(out.stderr.is_empty());
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), OSCILLATOR_CONFIG);
    let cfg = cfg.to_str().unwrap();
    let json_text = stdout(&run(&["force", "--config", cfg]));
    let csv_text = stdout(&run(&["force", "--config", cfg, "--format", "csv"]));
    let report: ForceReport = serde_json::from_str(&json_text).unwrap();
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let field = |name: &str| -> f64 {
        let idx = headers.iter().position(|h| h == name).unwrap();
        row[idx].parse().unwrap()
    };
    let r = &report.results;
    assert_eq!(field("spectral_pressure"), r.spectral.unwrap().pressure);
    assert_eq!(field("finite_difference_pressure"), r.finite_difference.pressure);
    assert!(r.attractive && r.spectral.unwrap().pressure < 0.0);
}

#[test]
fn precision_controls_significant_digits() {
    let out = run(&[
        "potential",
        "--set", "model.kind=static",
        "--set", "model.alpha0=1",
        "--set", "potential.r.values=[1.0]",
        "--set", "output.precision=5",
        "--format", "csv",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(1), Some("-1.8303e+0"));
}

#[test]
fn kernel_boundary_row_is_zero() {
    let out = run(&[
        "kernel",
        "--set", "kernel.n.values=[0.5, 2.0]",
        "--set", "kernel.p.values=[1e-9]",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["f"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(rows[0]["in_domain"], Value::Bool(false));
    assert!(rows[1]["f"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_rows_follow_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "{OSCILLATOR_CONFIG}\nsweep.parameter = \"geometry.a\"\nsweep.grid.values = [3.0, 1.0, 2.0]\nsweep.target = \"energy\"\nenergy.brute_force = false\n"
        ),
    );
    let out_path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--config", cfg.to_str().unwrap(),
        "--format", "csv",
        "--output", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(out_path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(&reader.headers().unwrap()[0], "geometry.a");
    let firsts: Vec<f64> = reader.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(firsts, vec![3.0, 1.0, 2.0]);
}

#[test]
fn check_passes_and_reports_every_check() {
    let out = run(&["check"]);
    let report: CheckReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.passed);
    assert!(report.checks.len() >= 10);
    assert!(report.checks.iter().all(|c| c.passed));
}

#[test]
fn bad_input_exits_one_with_a_diagnostic() {
    let cases: &[&[&str]] = &[
        &["energy", "--set", "geometry.a=1", "--set", "geometry.lambda=0.1"],
        &["energy", "--set", "geometry.a=1", "--set", "geometry.lambda=0.1", "--set", "geometry.rho=-1",
          "--set", "model.kind=static", "--set", "model.alpha0=1"],
        &["potential", "--set", "model.kind=static", "--set", "model.alpha0=1", "--set", "model.oscillators=[[1.0, 1.0]]"],
        &["potential", "--set", "model.kind=static", "--set", "model.alpha0=1", "--set", "potential.r.values=[]"],
        &["sweep", "--set", "model.kind=static", "--set", "model.alpha0=1", "--set", "sweep.parameter=model.nope",
          "--set", "sweep.grid.values=[1.0]", "--set", "sweep.target=potential"],
        &["energy", "--config", "/nonexistent/run.toml"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = run(&["energy", "--set", "geometry.a=1", "--set", "geometry.lambda=0.1"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("geometry") && err.contains("rho"), "{err}");
}

#[test]
fn non_convergence_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), OSCILLATOR_CONFIG);
    let out_path = dir.path().join("out.json");
    let out = run(&[
        "energy",
        "--config", cfg.to_str().unwrap(),
        "--set", "quadrature.max_subdivisions=1",
        "--output", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn static_model_force_uses_finite_difference_only() {
    let out = run(&[
        "force",
        "--set", "geometry.a=1.0",
        "--set", "geometry.lambda=0.25",
        "--set", "geometry.rho=0.001",
        "--set", "model.kind=static",
        "--set", "model.alpha0=1.0",
    ]);
    let report: ForceReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.results.spectral.is_none());
    assert!(report.results.finite_difference.pressure < 0.0);
    assert!(report.results.attractive);
}
