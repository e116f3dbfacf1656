use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sixvertex::report::AnalysisReport;
use tempfile::TempDir;

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sixvertex"));
    cmd.env_remove("SIXVERTEX_SETTINGS");
    cmd
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn analyze(dir: &TempDir, curve: &str, tag: &str) -> (Output, PathBuf, PathBuf) {
    let out = dir.path().join(format!("{tag}.json"));
    let svg = dir.path().join(format!("{tag}.svg"));
    let o = bin().arg("analyze").arg(spec(curve)).arg("--out").arg(&out).arg("--svg").arg(&svg).output().unwrap();
    (o, out, svg)
}

#[test]
fn analyze_writes_a_passing_report() {
    let dir = TempDir::new().unwrap();
    let (o, out, _) = analyze(&dir, "perturbed_ellipse.toml", "a");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: AnalysisReport = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(report.pass);
    assert_eq!(report.schema_version, 1);
    assert_eq!(report.sextactic.count, 6);
    assert!(report.sextactic.points.iter().all(|p| p.contact.order().is_some_and(|o| o >= 6)));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (_, a, sa) = analyze(&dir, "perturbed_ellipse.toml", "a");
    let (_, b, sb) = analyze(&dir, "perturbed_ellipse.toml", "b");
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(std::fs::read(sa).unwrap(), std::fs::read(sb).unwrap());
}

#[test]
fn svg_has_one_marker_per_sextactic_point() {
    let dir = TempDir::new().unwrap();
    let (o, out, svg) = analyze(&dir, "trefoil_rounded.toml", "t");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: AnalysisReport = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let svg = std::fs::read_to_string(svg).unwrap();
    assert_eq!(svg.matches("<circle").count(), report.sextactic.count);
    assert!(svg.contains(&format!(">S{}<", report.sextactic.count)));
}

#[test]
fn ellipse_is_flagged_as_a_conic() {
    let dir = TempDir::new().unwrap();
    let (o, out, svg) = analyze(&dir, "ellipse.toml", "e");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: AnalysisReport = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(report.degenerate_conic);
    assert!(report.theorem2.is_none());
    assert_eq!(std::fs::read_to_string(svg).unwrap().matches("<circle").count(), 0);
}

#[test]
fn nonconvex_curve_fails_at_convexity() {
    let dir = TempDir::new().unwrap();
    let (o, _, _) = analyze(&dir, "figure_eight.toml", "f");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("stage convexity"), "{}", stderr(&o));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "fourier_x = [[0.0, 0.0]]\nfourier_y = [[0.0, 0.0]]\ncolour = 3\n").unwrap();
    let o = bin().arg("roundtrip").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid input"));

    let o = bin().arg("roundtrip").arg(spec("perturbed_ellipse.toml")).args(["--grid", "100"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = bin().arg("nonsense").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn settings_come_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let tol = dir.path().join("tol.toml");
    std::fs::write(&tol, "cluster_tol = 2.5e-5\n").unwrap();
    let out = dir.path().join("r.json");
    let o = bin()
        .env("SIXVERTEX_SETTINGS", &tol)
        .arg("analyze")
        .arg(spec("perturbed_ellipse.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: AnalysisReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.settings.cluster_tol, 2.5e-5);

    std::fs::write(&tol, "cluster_tol = \"wide\"\n").unwrap();
    let o = bin().env("SIXVERTEX_SETTINGS", &tol).arg("roundtrip").arg(spec("ellipse.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("settings"));
}

#[test]
fn roundtrip_prints_a_small_residual() {
    let o = bin().arg("roundtrip").arg(spec("perturbed_ellipse.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let value: f64 = text.trim().strip_prefix("registration residual: ").unwrap().parse().unwrap();
    assert!(value < 1e-6);
}

#[test]
fn sturm_certificates_and_exit_codes() {
    let run = |file: &str, theorem: &str| {
        bin().arg("sturm").arg(spec(file)).args(["--theorem", theorem, "--trials", "20"]).output().unwrap()
    };
    let o = run("harmonic3.toml", "1");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cert: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cert["min_count"], 4);
    assert_eq!(cert["pass"], true);

    assert_eq!(run("harmonic3.toml", "2").status.code(), Some(0));
    assert_eq!(run("harmonic3_image.toml", "corollary").status.code(), Some(0));

    let o = run("resonant3.toml", "1");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("stage"), "{}", stderr(&o));

    assert_eq!(run("antiperiodic2.toml", "2").status.code(), Some(0));
    assert_eq!(run("antiperiodic2.toml", "1").status.code(), Some(2));
}

#[test]
fn sturm_output_is_deterministic_for_a_seed() {
    let run = || {
        bin().arg("sturm").arg(spec("harmonic5.toml")).args(["--theorem", "1", "--trials", "10", "--seed", "7"]).output().unwrap()
    };
    assert_eq!(run().stdout, run().stdout);
}
