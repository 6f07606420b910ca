use std::process::Command;

use nearbest_harness::config::ExperimentConfig;
use nearbest_harness::export::geometry_samples;
use nearbest_harness::run::{build_scenario, polynomial_json, rows_to_csv, rows_to_json, run_scenario, RunOptions, SCHEMA_VERSION};
use nearbest_harness::verify::{check_rows, segment_dn, Verdict};

const CORNER_LEGS: &str = "\
[piece]
kind = segment
from = 1
to = 0

[piece]
kind = segment
from = 0
to = i
";

fn corner(mode: &str, degrees: &str, f1: &str, f2: &str) -> ExperimentConfig {
    let lem = if mode == "theorem2" { "[lemniscate]\nn = 4\nr = 1\n" } else { "" };
    let text = format!(
        "[scenario]\nname = t\nmode = {mode}\ndegrees = {degrees}\nsingular = 1\nbase_nodes = 1200\n{lem}{CORNER_LEGS}\
         [branch]\nexpr = {f1}\n[branch]\nexpr = {f2}\n[compact]\nintervals = 0:0.5, 1.5:2\n"
    );
    ExperimentConfig::parse(&text).unwrap()
}

fn run(cfg: &ExperimentConfig) -> (String, Vec<nearbest_harness::ResultRow>) {
    let s = build_scenario(cfg).unwrap();
    let rows = run_scenario(cfg, &s, RunOptions::default());
    (rows_to_csv(&cfg.compact, &rows), rows)
}

#[test]
fn constant_function_has_zero_minimax_error() {
    let text = "[scenario]\nmode = bestapprox\ndegrees = 1, 4, 9\n[piece]\nkind = segment\nfrom = -1\nto = 1\n[branch]\nexpr = 2 - 3i\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let (_, rows) = run(&cfg);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.is_ok(), "{}", r.status);
        assert!(r.e_n.unwrap() < 1e-12, "n = {}: {:e}", r.n, r.e_n.unwrap());
    }
}

#[test]
fn no_jump_construction_reproduces_f() {
    let cfg = corner("theorem2", "16, 24", "exp(z)", "exp(z)");
    let (_, rows) = run(&cfg);
    for r in &rows {
        assert!(r.is_ok(), "{}", r.status);
        assert!(r.sup_l_err.unwrap() < 1e-8, "n = {}: {:e}", r.n, r.sup_l_err.unwrap());
        assert_eq!(r.m_damping, None);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = corner("theorem2", "16, 24", "0", "z");
    let (a, rows) = run(&cfg);
    let (b, _) = run(&cfg);
    assert_eq!(a, b);
    assert!(a.starts_with("n,E_n,E_n_lower,sup_L_err,sup_E1_err,d_n,m_damping,near_best_ratio,wall_ms,status\n"));
    assert!(rows.iter().all(|r| r.wall_ms == 0));
}

#[test]
fn failing_rows_do_not_stop_the_sweep() {
    // m = ⌊n/8⌋ vanishes at n = 4
    let cfg = corner("theorem2", "4, 16", "0", "z");
    let (csv, rows) = run(&cfg);
    assert!(!rows[0].is_ok());
    assert!(rows[0].status.contains("exponent"), "{}", rows[0].status);
    assert!(rows[0].e_n.is_some());
    assert!(rows[1].is_ok(), "{}", rows[1].status);
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn row_invariants_and_json_schema() {
    let cfg = corner("theorem2", "16, 32", "0", "z");
    let s = build_scenario(&cfg).unwrap();
    let rows = run_scenario(&cfg, &s, RunOptions::default());
    for r in &rows {
        let (e, l) = (r.e_n.unwrap(), r.sup_l_err.unwrap());
        assert!(e >= 0.0 && l >= 0.0 && r.sup_e_err[0].unwrap() >= 0.0);
        assert_eq!(r.near_best_ratio.unwrap(), l / e);
        assert!(r.d_n.unwrap() > 0.0);
    }
    let checks = check_rows(&cfg, &s, &rows);
    let failed: Vec<_> = checks.iter().filter(|c| c.hard && c.verdict == Verdict::Fail).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(checks.iter().any(|c| c.name.contains("lemniscate ratio")));
    let json: serde_json::Value = serde_json::from_str(&rows_to_json(&cfg, &s, &rows)).unwrap();
    assert_eq!(json["schema_version"], SCHEMA_VERSION);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["rows"][1]["construction"]["rays"].as_array().unwrap().len(), 2);

    let p = s.construct(16).unwrap();
    let poly: serde_json::Value = serde_json::from_str(&polynomial_json(&cfg, &s, &p)).unwrap();
    let coeffs = poly["coefficients"].as_array().unwrap();
    assert!(coeffs.len() <= 17);
    // monomial form against the stored basis at one point
    let z = nearbest::Complex::new(0.3, 0.2);
    let mut acc = nearbest::Complex::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + nearbest::Complex::new(c[0].as_f64().unwrap(), c[1].as_f64().unwrap());
    }
    assert!((acc - nearbest::constructor::eval_nearbest(&p, z)).norm() < 1e-9);
}

#[test]
fn level_lines_of_the_segment_are_ellipses() {
    let text = "[scenario]\nmode = bestapprox\ndegrees = 8, 32\nsingular = 0.5\n[piece]\nkind = segment\nfrom = -1\nto = 1\n\
                [branch]\nexpr = -z\n[branch]\nexpr = z\n";
    let cfg = ExperimentConfig::parse(text).unwrap();
    let s = build_scenario(&cfg).unwrap();
    let samples = geometry_samples(&cfg, &s, 64).unwrap();
    for n in [8usize, 32] {
        let rho = 1.0 + 1.0 / n as f64;
        let (a, b) = ((rho + 1.0 / rho) / 2.0, segment_dn(n));
        let pts: Vec<_> = samples.iter().filter(|p| p.kind == "level_line" && p.index == n).collect();
        assert_eq!(pts.len(), 2 * 64);
        for p in pts {
            let q = (p.z.re / a).powi(2) + (p.z.im / b).powi(2);
            assert!((q - 1.0).abs() < 1e-9, "n = {n}: {q}");
        }
    }
    assert!(samples.iter().any(|p| p.kind == "gamma_ray"));
}

fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_nearbest");
    let out = Command::new(bin).args(["verify"]).arg(configs_dir().join("inadmissible.cfg")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL lemniscate admissibility"), "{text}");
    assert!(text.contains("PASS segment oracle"), "{text}");

    let dir = std::env::temp_dir().join(format!("nearbest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "[scenario]\ndegrees = 4\nmode = theorem3\n").unwrap();
    let out = Command::new(bin).arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = Command::new(bin).arg("run").arg(configs_dir().join("segment_abs.cfg")).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.join("segment_abs.csv");
    assert!(csv.exists() && dir.join("segment_abs.json").exists());
    let out = Command::new(bin)
        .args(["rates"])
        .arg(&csv)
        .args(["--model", "powerlaw", "--column", "E_n"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let fit: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // E_n ~ β/n for |x|
    assert!((fit["b"].as_f64().unwrap() - 1.0).abs() < 0.05, "{fit}");
    std::fs::remove_dir_all(&dir).ok();
}
