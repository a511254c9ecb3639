use std::process::{Command, Output};

use serde_json::Value;

fn gridcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridcover"))
        .args(args)
        .env_remove("COVERAGE_BOUND_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = gridcover(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bound_headline() {
    let v = json(&["bound", "--d", "2", "--epsilon", "0.05", "--delta", "0.01", "--lipschitz", "1.0", "--json"]);
    assert_eq!(v["cells"], 3249);
    assert_eq!(v["m_approx"], 43486);
    let classic = v["m_classic"].as_f64().unwrap();
    assert!((classic - 2_852_379.0).abs() / 2_852_379.0 <= 1e-4);
}

#[test]
fn bound_human_output_uses_separators() {
    let out = gridcover(&["bound", "--d", "2", "--epsilon", "0.05", "--delta", "0.01"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("43,486"), "{text}");
    assert!(text.contains("2,852,379"), "{text}");
}

#[test]
fn bound_degenerate_grid() {
    let v = json(&["bound", "--d", "1", "--epsilon", "2", "--delta", "0.5", "--lipschitz", "1", "--json"]);
    assert_eq!(v["cells"], 1);
    for key in ["m_exact", "m_approx", "m_classic"] {
        assert_eq!(v[key], 1, "{key}");
    }
}

#[test]
fn bound_three_dimensions() {
    let v = json(&["bound", "--d", "3", "--epsilon", "0.1", "--delta", "0.1", "--json"]);
    assert_eq!(v["cells"], 42875);
    assert_eq!(v["m_approx"], 585749);
}

#[test]
fn bound_errors() {
    assert_eq!(gridcover(&["bound", "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(gridcover(&["bound", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(gridcover(&["bound", "--bogus"]).status.code(), Some(2));
    let out = gridcover(&["bound", "--d", "40", "--epsilon", "0.001"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_defaults() {
    let v = json(&["simulate", "--json"]);
    let ratio = v["mean_ratio"].as_f64().unwrap();
    assert!((0.6..=0.9).contains(&ratio), "{ratio}");
    assert_eq!(v["trials"].as_array().unwrap().len(), 32);
    assert_eq!(v["probe_m"], v["m_exact"]);
    assert!(v["failure_rate"].as_f64().unwrap() <= 0.1);
}

#[test]
fn simulate_single_cell() {
    let v = json(&["simulate", "--d", "1", "--epsilon", "2", "--json"]);
    for t in v["trials"].as_array().unwrap() {
        assert_eq!(t["m_actual"], 1);
    }
}

#[test]
fn simulate_probe_at_exact_bound() {
    let v = json(&["simulate", "--trials", "200", "--probe-m", "8257", "--json"]);
    assert_eq!(v["probe_m"], 8257);
    assert!(v["failure_rate"].as_f64().unwrap() <= 0.1);
}

#[test]
fn simulate_capacity() {
    let out = gridcover(&["simulate", "--epsilon", "0.01", "--max-cells", "1000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_from_environment() {
    let explicit = gridcover(&["simulate", "--trials", "4", "--seed", "9", "--json"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_gridcover"))
        .args(["simulate", "--trials", "4", "--json"])
        .env("COVERAGE_BOUND_SEED", "9")
        .output()
        .unwrap();
    let default = gridcover(&["simulate", "--trials", "4", "--json"]);
    assert_eq!(explicit.stdout, from_env.stdout);
    assert_ne!(explicit.stdout, default.stdout);
}

#[test]
fn sweep_dimension() {
    let v = json(&["sweep", "--vary", "dimension", "--values", "1,2,3", "--format", "json"]);
    let records = v["records"].as_array().unwrap();
    let aggregates: Vec<&Value> = records.iter().filter(|r| r["trial"] == -1).collect();
    assert_eq!(aggregates.len(), 3);
    for r in aggregates {
        assert!(r["improvement"].as_f64().unwrap() > 0.80);
    }
}

#[test]
fn sweep_single_point_to_file() {
    let dir = std::env::temp_dir().join(format!("gridcover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("single.csv");
    let out = gridcover(&["sweep", "--vary", "epsilon", "--values", "0.5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("grand mean ratio"), "{}", stdout(&out));

    let rows = gridcover::report::parse_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.iter().filter(|r| r.trial == -1).count(), 1);
    assert_eq!(rows.len(), 33);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_delta_range() {
    let v = json(&["sweep", "--vary", "delta", "--values", "0.02:0.2:10", "--format", "json", "--trials", "8"]);
    let imps: Vec<f64> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["trial"] == -1)
        .map(|r| r["improvement"].as_f64().unwrap())
        .collect();
    assert_eq!(imps.len(), 10);
    assert!((imps[0] - 0.959).abs() <= 0.03);
    assert!((imps[9] - 0.746).abs() <= 0.03);
}

#[test]
fn sweep_errors() {
    assert_eq!(gridcover(&["sweep", "--vary", "dimension", "--values", "1.5"]).status.code(), Some(2));
    assert_eq!(gridcover(&["sweep", "--vary", "colour", "--values", "1"]).status.code(), Some(2));
    assert_eq!(gridcover(&["sweep", "--vary", "delta", "--values", "0.1,,x"]).status.code(), Some(2));
}

#[test]
fn sweep_output_is_reproducible() {
    for format in ["csv", "json"] {
        let args = ["sweep", "--vary", "delta", "--values", "0.05,0.1", "--trials", "3", "--format", format];
        let a = gridcover(&args);
        let b = gridcover(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn verify_constant() {
    let v = json(&["verify", "--function", "constant", "--epsilon", "0.2", "--json"]);
    assert_eq!(v["sampled_max"], 1.0);
    assert_eq!(v["certified_sup_bound"], 1.1);
}

#[test]
fn verify_affine() {
    let v = json(&["verify", "--function", "affine", "--d", "1", "--epsilon", "0.2", "--delta", "0.1", "--lipschitz", "2", "--json"]);
    assert_eq!(v["m_used"], 120);
    assert_eq!(v["confidence"], 0.95);
}

#[test]
fn verify_negdist_over_seeds() {
    for seed in 0..10 {
        let v = json(&["verify", "--function", "negdist", "--d", "2", "--seed", &seed.to_string(), "--json"]);
        assert!(v["certified_sup_bound"].as_f64().unwrap() >= 0.0, "seed {seed}");
    }
}

#[test]
fn verify_errors() {
    assert_eq!(gridcover(&["verify", "--function", "nope"]).status.code(), Some(2));
    let out = gridcover(&["verify", "--function", "affine", "--lipschitz", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
}

#[test]
fn oracle_values() {
    for (cells, samples, expected) in [("2", "2", "0.5"), ("3", "3", "0.777777777778"), ("2", "1", "1.0")] {
        let out = gridcover(&["oracle", "--cells", cells, "--samples", samples]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), expected);
    }
    assert_eq!(gridcover(&["oracle", "--cells", "25", "--samples", "3"]).status.code(), Some(2));
}

#[test]
fn every_json_mode_parses() {
    json(&["bound", "--json"]);
    json(&["simulate", "--trials", "2", "--json"]);
    json(&["sweep", "--vary", "epsilon", "--values", "0.5", "--trials", "2", "--format", "json"]);
    json(&["verify", "--function", "sinprod", "--lipschitz", "5", "--json"]);
    json(&["oracle", "--cells", "4", "--samples", "6", "--json"]);
}
