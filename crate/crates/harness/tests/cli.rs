use std::path::Path;
use std::process::{Command, Output};

use lpvsc_harness::{exit, SHIPPED_SPECS};

fn lpvsc(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpvsc")).args(args).env("LPVSC_OUT_DIR", out_dir).output().unwrap()
}

fn shipped(name: &str) -> &'static str {
    SHIPPED_SPECS.iter().find(|s| s.name == name).unwrap().text
}

fn write_spec(dir: &Path, file: &str, text: &str) -> String {
    let path = dir.join(file);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn list_specs_names_every_bundled_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpvsc(&["list-specs"], dir.path());
    assert_eq!(out.status.code(), Some(exit::PASS));
    let text = String::from_utf8(out.stdout).unwrap();
    for s in SHIPPED_SPECS {
        assert!(text.lines().any(|l| l.starts_with(s.name)), "{} missing from\n{text}", s.name);
    }
}

#[test]
fn passing_run_exits_zero_and_uses_the_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpvsc(&["run", "diagonal_s1"], dir.path());
    assert_eq!(out.status.code(), Some(exit::PASS), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("diagonal_s1/report.csv").exists());
    assert!(dir.path().join("diagonal_s1/summary.toml").exists());

    let explicit = tempfile::tempdir().unwrap();
    let out = lpvsc(&["run", "diagonal_s1", "--out", explicit.path().to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(exit::PASS));
    assert!(explicit.path().join("diagonal_s1/report.csv").exists());

    let svg = dir.path().join("p.svg");
    let out = lpvsc(&["plot", dir.path().join("diagonal_s1").to_str().unwrap(), svg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(exit::PASS));
    assert!(std::fs::read_to_string(svg).unwrap().contains("fitted slope"));
}

#[test]
fn acceptance_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Heavy over-regularization freezes the error near ||x||.
    let text = shipped("diagonal_s1").replace("constant = 1.0", "constant = 1e-12");
    let spec = write_spec(dir.path(), "over.toml", &text);
    let out = lpvsc(&["run", &spec], dir.path());
    assert_eq!(out.status.code(), Some(exit::FAIL), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
    assert!(dir.path().join("diagonal_s1/summary.toml").exists());
}

#[test]
fn invalid_specs_exit_three_with_the_window_named() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("tau.toml", shipped("stability").replace("tau = 2.0", "tau = 1.0"), "tau window"),
        ("qr.toml", shipped("stability").replace("r = 6.0", "r = 3.0"), "q-r relation"),
        ("pq.toml", shipped("elliptic").replace("q = 3.0", "q = 2.0"), "1/p + 1/q"),
        ("syntax.toml", "name = ".to_string(), ""),
    ];
    for (file, text, needle) in cases {
        let spec = write_spec(dir.path(), file, &text);
        let out = lpvsc(&["run", &spec], dir.path());
        assert_eq!(out.status.code(), Some(exit::INVALID_SPEC), "{file}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(needle) && err.contains(file), "{file}: {err}");
    }
    let out = lpvsc(&["run", "no-such-spec"], dir.path());
    assert_eq!(out.status.code(), Some(exit::OTHER));
}

#[test]
fn solver_stall_exits_four_with_a_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    // A first move far past the admissible set with no backtracking leaves
    // the line search nothing to accept.
    let text = shipped("elliptic")
        .replace("points = 32", "points = 8")
        .replace("holder = 0.5", "holder = 0.5\nconstant = 0.25")
        + "\n[solver]\ninitial_step = 1e6\nmax_backtracks = 0\nstarts = 1\n";
    let spec = write_spec(dir.path(), "stall.toml", &text);
    let out = lpvsc(&["run", &spec], dir.path());
    assert_eq!(out.status.code(), Some(exit::STALL), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(dir.path().join("elliptic/report.csv")).unwrap();
    assert_eq!(rows.lines().count(), 5);
    assert!(rows.lines().skip(1).any(|l| l.ends_with(",true")));
    let summary = std::fs::read_to_string(dir.path().join("elliptic/summary.toml")).unwrap();
    assert!(summary.contains("stalled = true"));
}

#[test]
fn calibrate_prints_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpvsc(&["calibrate", "convexity"], dir.path());
    assert_eq!(out.status.code(), Some(exit::PASS));
    let table: toml::Table = toml::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((table["c_p"].as_float().unwrap() - 1.0).abs() < 1e-10);

    let out = lpvsc(&["calibrate", "holder"], dir.path());
    assert_eq!(out.status.code(), Some(exit::INVALID_SPEC));
}

#[test]
fn missing_report_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpvsc(&["plot", dir.path().join("none.csv").to_str().unwrap(), "x.svg"], dir.path());
    assert_eq!(out.status.code(), Some(exit::OTHER));
}
