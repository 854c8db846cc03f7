use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polaritonic_cli::config::{Couplings, OmegaC, OmegaMode};
use polaritonic_cli::output::sha256_hex;
use polaritonic_cli::{resolve, Job, Overrides, RunConfig, Task};
use serde_json::Value;

fn polaritonic(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polaritonic")).current_dir(dir).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn body(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn config_defaults_and_variants() {
    let cfg = RunConfig::parse("").unwrap();
    assert_eq!(cfg.cavity.omega_c, OmegaC::Mode(OmegaMode::Auto));
    assert_eq!(cfg.fixtures, vec!["anthracene_like".to_string()]);
    let cfg = RunConfig::parse("[cavity]\nomega_c = 0.125\ng = 0.01\n").unwrap();
    assert_eq!(cfg.cavity.omega_c, OmegaC::Hartree(0.125));
    assert_eq!(cfg.cavity.g, Couplings::One(0.01));
    let cfg = RunConfig::parse("[cavity]\nomega_c = \"vertical\"\ng = [0.0, 0.002]\n").unwrap();
    assert_eq!(cfg.cavity.omega_c, OmegaC::Mode(OmegaMode::Vertical));
    assert_eq!(cfg.couplings(), vec![0.0, 0.002]);
}

#[test]
fn strict_parsing_rejects_bad_input() {
    for text in [
        "colour = 3\n",
        "[cavity]\nomega = 0.1\n",
        "[cavity]\nomega_c = \"resonant\"\n",
        "[cavity]\ng = -0.1\n",
        "[grids.x]\nmin = -15.0\nmax = 15.0\npoints = 501\nstep = 0.1\n",
        "task = \"absorbance\"\n",
    ] {
        let err = RunConfig::parse(text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}: {err}");
    }
}

#[test]
fn verb_must_agree_with_config_task() {
    let cfg = RunConfig::parse("task = \"bare\"\n").unwrap();
    assert!(resolve(Job::Task(Task::Bare), cfg.clone(), &Overrides::default()).is_ok());
    let err = resolve(Job::Task(Task::Absorb), cfg, &Overrides::default()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.toml", "[cavity]\ng = 0.01\nfrequency = 2\n");
    let o = polaritonic(dir.path(), &["bare", "--config", "c.toml", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("frequency"));
}

#[test]
fn missing_fixture_names_the_calibrate_task() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.toml", "fixtures = [\"molecules/mine.params\"]\n");
    let o = polaritonic(dir.path(), &["figure", "fig8", "--config", "c.toml", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("polaritonic calibrate"), "{}", stderr(&o));
}

#[test]
fn no_crossing_exits_with_window_code() {
    let dir = tempfile::tempdir().unwrap();
    // A nuclear grid far inside the ground well never reaches E_g + ω_c = E_e.
    write_config(
        dir.path(),
        "c.toml",
        "fixtures = [\"r6g_like\"]\n[cavity]\nomega_c = 0.05\ng = 0.002\n[grids.r]\nmin = 3.0\nmax = 3.1\npoints = 41\n",
    );
    let o = polaritonic(dir.path(), &["nonbo", "--config", "c.toml", "--out", "o"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn decoupled_absorption_equals_bare_absorption() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.toml", "fixtures = [\"r6g_like\"]\n[cavity]\ng = 0.0\n");
    let a = polaritonic(dir.path(), &["bare", "--config", "c.toml", "--out", "bare"]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = polaritonic(dir.path(), &["absorb", "--config", "c.toml", "--out", "absorb"]);
    assert!(b.status.success(), "{}", stderr(&b));
    let x = body(&dir.path().join("bare/bare_r6g_like_absorption.csv"));
    let y = body(&dir.path().join("absorb/absorb_r6g_like_g0.csv"));
    assert!(x.starts_with("omega_ev,exact,boa\n"));
    assert_eq!(x, y);
}

#[test]
fn usc_scan_is_reproducible_and_cross_referenced() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.toml", "fixtures = [\"anthracene_like\"]\n[cavity]\ng = [0.004, 0.008, 0.016]\nn_max = 6\n");
    for out in ["a", "b"] {
        let o = polaritonic(dir.path(), &["usc-scan", "--config", "c.toml", "--out", out, "--workers", "1"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let csv = std::fs::read_to_string(a.join("usc_anthracene_like.csv")).unwrap();
    assert_eq!(csv, std::fs::read_to_string(b.join("usc_anthracene_like.csv")).unwrap());

    let m = manifest(&a);
    assert_eq!(m["status"], "complete");
    assert_eq!(m["hash"], manifest(&b)["hash"]);
    assert_eq!(m["config"]["cavity"]["n_max"], 6);
    assert_eq!(m["config"]["task"], "usc-scan");
    let hash = m["hash"].as_str().unwrap();
    assert!(csv.lines().any(|l| l == format!("# manifest {hash}")));
    for f in m["files"].as_array().unwrap() {
        let text = std::fs::read(a.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&text));
    }

    let rows: Vec<Vec<f64>> =
        body(&a.join("usc_anthracene_like.csv")).lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r.len(), 4);
        assert!(r[1] < 0.0 && r[2] > 0.0 && r[3] > 0.0);
    }
    // ⟨a†a⟩ and ΔR₀ grow as g².
    let ratio = |k: usize| (rows[2][k] / rows[0][k]).ln() / 4f64.ln();
    assert!((ratio(2) - 2.0).abs() < 0.1 && (ratio(3) - 2.0).abs() < 0.1, "{} {}", ratio(2), ratio(3));
}

#[test]
fn scaling_report_json_carries_slopes() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.toml", "fixtures = [\"anthracene_like\"]\n[cavity]\ng = [0.004, 0.008, 0.016]\nn_max = 6\n");
    let o = polaritonic(dir.path(), &["scaling-report", "--config", "c.toml", "--out", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/scaling_anthracene_like.json")).unwrap()).unwrap();
    assert_eq!(v["manifest"], manifest(&dir.path().join("o"))["hash"]);
    let d = &v["data"];
    assert!((d["delta_r0_slope"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert!((d["ground_beta_slope"].as_f64().unwrap() - 4.0).abs() < 0.2);
    assert_eq!(d["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn fig8_has_four_correction_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = polaritonic(dir.path(), &["figure", "fig8", "--out", "o"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for kind in ["numeric", "model"] {
        let b = body(&dir.path().join(format!("o/fig8_nonbo_anthracene_like_g0.002_{kind}.csv")));
        let mut lines = b.lines();
        assert_eq!(lines.next().unwrap(), "R,P_offdiag,P2_offdiag,P2_diag_plus,P2_diag_minus");
        assert!(lines.all(|l| l.split(',').count() == 5));
    }
    assert_eq!(manifest(&dir.path().join("o"))["job"]["figure"], "fig8");
}

#[test]
fn calibration_of_a_fixture_onto_its_own_observables() {
    let dir = tempfile::tempdir().unwrap();
    write_config(
        dir.path(),
        "c.toml",
        "fixtures = [\"anthracene_like\"]\n[calibrate]\nname = \"again\"\nomega_vib_ev = 0.18\ndelta_r = 0.092\n\
         transition_ev = 3.5\ndipole = 1.37\nrestarts = 0\nmax_iterations = 2\n",
    );
    let o = polaritonic(dir.path(), &["calibrate", "--config", "c.toml", "--out", "o", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let again = polaritonic::molecule::Fixture::load(dir.path().join("o/again.params")).unwrap();
    let orig = polaritonic::molecule::Fixture::anthracene_like();
    for (a, b) in again.params.as_array().iter().zip(orig.params.as_array()) {
        assert!((a - b).abs() <= 1e-3 * b.abs(), "{a} vs {b}");
    }
    assert_eq!(again.grid_r, orig.grid_r);
    assert_eq!(manifest(&dir.path().join("o"))["config"]["seed"], 7);
}
