use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-fluid"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_config(name: &str, outdir: &Path, overrides: &[&str]) -> Output {
    let cfg = config(name);
    let mut args = vec!["run", "--config", cfg.to_str().unwrap(), "--outdir", outdir.to_str().unwrap()];
    for o in overrides {
        args.extend(["--override", o]);
    }
    run(&args)
}

fn column_max(path: &Path, column: &str) -> f64 {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].parse::<f64>().unwrap().abs()).fold(0.0, f64::max)
}

#[test]
fn rest_run_matches_reduction_and_manifest() {
    let out = tempfile::tempdir().unwrap();
    let res = run_config("rest.json", out.path(), &[]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let dir = out.path().join("rest");
    assert!(column_max(&dir.join("diagnostics/equivalence.csv"), "sup_discrepancy") < 1e-8);
    assert!(column_max(&dir.join("diagnostics/conservation.csv"), "relative_drift") < 1e-12);
    assert!(column_max(&dir.join("diagnostics/identities.csv"), "residual_sup") < 1e-12);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    // defaults are echoed
    assert_eq!(manifest["config"]["params"]["hbar"], 1.0);
    assert_eq!(manifest["config"]["pipeline"]["solvers"], "both");
    assert_eq!(manifest["steps"], 10_000);
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 23);
    for f in files {
        let bytes = fs::read(dir.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn identical_configs_give_identical_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run_config("gaussian_packet.json", d.path(), &["duration=0.5"]).status.success());
    }
    let read = |d: &Path, rel: &str| fs::read(d.join("gaussian_packet").join(rel)).unwrap();
    assert_eq!(read(a.path(), "manifest.json"), read(b.path(), "manifest.json"));
    let manifest: serde_json::Value = serde_json::from_slice(&read(a.path(), "manifest.json")).unwrap();
    for f in manifest["files"].as_array().unwrap() {
        let rel = f["path"].as_str().unwrap();
        assert_eq!(read(a.path(), rel), read(b.path(), rel), "{rel}");
    }
}

#[test]
fn overrides_rename_and_reconfigure() {
    let out = tempfile::tempdir().unwrap();
    let res = run_config("rest.json", out.path(), &["name=short", "duration=0.01", "pipeline.diagnostics=[\"conservation\"]"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let dir = out.path().join("short");
    assert!(dir.join("diagnostics/conservation.csv").exists());
    assert!(!dir.join("diagnostics/equivalence.csv").exists());
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();

    let res = run_config("rest.json", out.path(), &["grid.spacing=0.1"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("spacing"));

    // 4 points per wavelength
    let res = run_config("plane_wave.json", out.path(), &["grid.points.0=8"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("recipe.k"));

    let res = run_config("plane_wave.json", out.path(), &["recipe.spin.angle=2"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("recipe.spin.angle"));

    // κ h = 100 is far outside the RK4 stability region
    let res = run_config("rest.json", out.path(), &[r#"params={"hbar":1,"m":1000,"c":1}"#, "grid.dt=0.1", "duration=1"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("instability"));

    let res = run(&["run", "--config", out.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));

    let blocked = out.path().join("file");
    fs::write(&blocked, "").unwrap();
    let res = run_config("rest.json", &blocked, &[]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn check_passes() {
    let res = run(&["check", "--seed", "3"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 10);
    assert!(!text.contains("FAIL"));
}

#[test]
fn scenario_list_names_recipes() {
    let res = run(&["scenario", "list"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    for name in ["rest_state", "plane_wave", "gaussian_packet", "custom"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn example_configs_parse() {
    for entry in fs::read_dir(config("")).unwrap() {
        let path = entry.unwrap().path();
        dirac_fluid_cli::parse_config(&path, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
