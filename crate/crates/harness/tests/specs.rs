use std::collections::BTreeSet;
use std::path::Path;

use lpvsc_harness::{load_spec, ExperimentSpec, HarnessError, Model, SHIPPED_SPECS};

fn specs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/specs"))
}

#[test]
fn every_shipped_spec_parses_and_matches_its_file() {
    for s in SHIPPED_SPECS {
        let spec = ExperimentSpec::from_text(s.text).unwrap_or_else(|e| panic!("{}: {e}", s.name));
        assert_eq!(spec.name, s.name);
        let from_file = load_spec(specs_dir().join(format!("{}.toml", s.name)).to_str().unwrap()).unwrap();
        assert_eq!(from_file, spec);
        assert_eq!(load_spec(s.name).unwrap(), spec);
    }
}

#[test]
fn every_spec_file_is_listed() {
    let on_disk: BTreeSet<String> = std::fs::read_dir(specs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| p.file_stem().unwrap().to_str().unwrap().to_string())
        .collect();
    let listed: BTreeSet<String> = SHIPPED_SPECS.iter().map(|s| s.name.to_string()).collect();
    assert_eq!(on_disk, listed);
}

#[test]
fn every_model_has_a_shipped_spec() {
    let covered: BTreeSet<&str> =
        SHIPPED_SPECS.iter().map(|s| ExperimentSpec::from_text(s.text).unwrap().model.name()).collect();
    for m in Model::ALL {
        assert!(covered.contains(m.name()), "no shipped spec for {}", m.name());
    }
}

fn stability_text() -> String {
    SHIPPED_SPECS.iter().find(|s| s.name == "stability").unwrap().text.to_string()
}

fn spec_error(text: &str) -> String {
    match ExperimentSpec::from_text(text) {
        Err(HarnessError::Spec(m)) => m,
        other => panic!("expected a spec error, got {other:?}"),
    }
}

#[test]
fn tau_window_diagnostics() {
    // p_frak >= n: any tau > 1 is admissible, tau = 1 is not.
    let m = spec_error(&stability_text().replace("tau = 2.0", "tau = 1.0"));
    assert!(m.contains("tau window") && m.contains("(1, inf)"), "{m}");
    // n/2 < p_frak < n: the window is (p n / (n p - n + p), p n / (n - p)) = (1.2, 6) at p_frak = 1.5.
    let text = stability_text().replace("p_frak = 3.0", "p_frak = 1.5");
    let m = spec_error(&text.replace("tau = 2.0", "tau = 6.5"));
    assert!(m.contains("tau window") && m.contains("(1.2, 6)"), "{m}");
    // p_frak <= n/2 has no admissible tau.
    let m = spec_error(&stability_text().replace("p_frak = 3.0", "p_frak = 1.0"));
    assert!(m.contains("tau window") && m.contains("n/2"), "{m}");
}

#[test]
fn q_r_relation_diagnostic() {
    let m = spec_error(&stability_text().replace("r = 6.0", "r = 4.0"));
    assert!(m.contains("q-r relation"), "{m}");
    // The relation only binds the stability experiment.
    let vsc = SHIPPED_SPECS.iter().find(|s| s.name == "vsc_check").unwrap().text;
    assert!(ExperimentSpec::from_text(&vsc.replace("samples = 500", "samples = 500\nr = 4.0")).is_ok());
}

#[test]
fn other_diagnostics() {
    let diag = SHIPPED_SPECS.iter().find(|s| s.name == "diagonal_s1").unwrap().text;
    assert!(spec_error(&diag.replace("q = 2.0", "q = 3.0")).contains("1/p + 1/q"));
    assert!(spec_error(&diag.replace("s = 1.0", "s = 1.5")).contains("(0, 1]"));
    assert!(spec_error(&diag.replace("1e-4, 1e-5, 1e-6", "1e-2")).contains("delta_grid"));
    assert!(ExperimentSpec::from_text(&diag.replace("seeds = [1]", "seeds = [1]\nbogus = 2")).is_err());
    let ell = SHIPPED_SPECS.iter().find(|s| s.name == "elliptic").unwrap().text;
    assert!(spec_error(&ell.replace("s = 1.0", "s = 0.5")).contains("s = 1"));
    assert!(spec_error(&ell.replace("M = 10.0", "M = 0.1")).contains("a_lower <= M"));
}
