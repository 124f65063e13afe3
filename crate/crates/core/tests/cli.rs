//! The `whw` binary end to end: exit codes, file formats and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn whw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whw"))
        .args(args)
        .env_remove("WHW_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Everything the binary printed.
fn printed(out: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
}

fn path(dir: &Path) -> &str {
    dir.to_str().expect("utf-8 temp path")
}

/// Value of `key=` in a `k=v,k=v` line.
fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    text.split([',', '\n'])
        .find_map(|kv| kv.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .expect("numeric field")
}

fn assert_plain_svg(file: &Path) {
    let svg = fs::read_to_string(file).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"), "{}", file.display());
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("href"), "external reference in {}", file.display());
}

#[test]
fn verify_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = whw(&["verify", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", printed(&out));
    let report = fs::read_to_string(dir.path().join("verify_report.txt")).unwrap();
    assert!(report.contains("adjugate_identity"));
    assert!(!report.contains("FAIL"), "{report}");
}

#[test]
fn mutated_cofactor_fails_verify_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = whw(&["verify", "--mutate-cofactor", "--out", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(printed(&out).contains("adjugate_identity"), "{}", printed(&out));
}

#[test]
fn bad_configuration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&whw(&["simulate", "--mesh", "4", "--out", path(dir.path())])), 2);
    assert_eq!(code(&whw(&["spectrum", "--region", "1,0,0,1", "--out", path(dir.path())])), 2);

    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "mesh = 32\ncolour = blue\n").unwrap();
    let out = whw(&["simulate", "--config", path(&cfg), "--out", path(dir.path())]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&whw(&["decay-fit", path(&dir.path().join("missing.csv"))])), 2);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# short run\nmesh = 4\nt_final = 1\n").unwrap();
    let out = whw(&["simulate", "--config", path(&cfg), "--mesh", "16", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let last_t: f64 = trace.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(last_t, 1.0);
}

#[test]
fn zero_data_cannot_be_fitted() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    let sim = whw(&["simulate", "--profile", "custom:u=0", "--mesh", "16", "--t-final", "200", "--out", d]);
    assert_eq!(code(&sim), 0, "{}", printed(&sim));
    let trace = dir.path().join("trace.csv");
    assert_eq!(code(&whw(&["decay-fit", path(&trace), "--out", d])), 1);
}

#[test]
fn simulate_then_fit_recovers_fourth_power_decay() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    let sim = whw(&["simulate", "--profile", "bump_heat", "--mesh", "64", "--t-final", "200", "--out", d]);
    assert_eq!(code(&sim), 0, "{}", printed(&sim));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "t,E,E_wave1,E_heat,E_wave2,dissipation");
    let energies: Vec<f64> = trace.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));

    let fit = whw(&["decay-fit", path(&dir.path().join("trace.csv")), "--out", d]);
    assert_eq!(code(&fit), 0, "{}", printed(&fit));
    let block = fs::read_to_string(dir.path().join("decay_fit.txt")).unwrap();
    let p = field(&block, "exponent");
    assert!((3.5..=4.5).contains(&p), "{block}");
    assert!(block.contains("ci=") && block.contains("window="));
    assert_plain_svg(&dir.path().join("trace.svg"));
    assert_plain_svg(&dir.path().join("decay.svg"));
}

#[test]
fn snapshots_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "snapshot_stride = 10\n").unwrap();
    let d = path(dir.path());
    let out = whw(&["simulate", "--config", path(&cfg), "--mesh", "16", "--t-final", "1", "--out", d]);
    assert_eq!(code(&out), 0);
    let first = fs::read_to_string(dir.path().join("snapshots/snapshot_00000.csv")).unwrap();
    assert!(first.lines().next().unwrap().starts_with("xi,re_u,im_u"));
    assert!(dir.path().join("snapshots/index.csv").exists());
}

#[test]
fn spectrum_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let region = ["--region", "-5,-0.001,-20,20"];
    for d in [&a, &b] {
        let out = whw(&["spectrum", region[0], region[1], "--out", path(d)]);
        assert_eq!(code(&out), 0, "{}", printed(&out));
    }
    let csv = fs::read(a.join("eigenvalues.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("eigenvalues.csv")).unwrap());
    assert_eq!(fs::read(a.join("spectrum.svg")).unwrap(), fs::read(b.join("spectrum.svg")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "re,im,abs_det_residual,newton_iters");
    assert!(text.lines().count() > 1);
    for line in text.lines().skip(1) {
        let re: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(re < 0.0, "{line}");
    }
    assert_plain_svg(&a.join("spectrum.svg"));
}

#[test]
fn right_half_plane_holds_no_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = whw(&["spectrum", "--region", "0.01,5,-30,30", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", printed(&out));
    let csv = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "{csv}");
}

#[test]
fn scan_fit_lands_near_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    let out = whw(&["resolvent-scan", "--s-min", "100", "--s-max", "400", "--points", "12", "--out", d]);
    assert_eq!(code(&out), 0, "{}", printed(&out));
    let scan = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(scan.lines().next().unwrap(), "s,resolvent_norm,mesh_n,converged");
    assert_eq!(scan.lines().count(), 13);
    let block = fs::read_to_string(dir.path().join("scan_fit.txt")).unwrap();
    let e = field(&block, "exponent");
    assert!((0.4..=0.6).contains(&e), "{block}");
    assert_plain_svg(&dir.path().join("scan.svg"));
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_env");
    let out = Command::new(env!("CARGO_BIN_EXE_whw"))
        .args(["simulate", "--mesh", "16", "--t-final", "1"])
        .env("WHW_OUT", &target)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(target.join("trace.csv").exists());
}
