use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn graphcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphcurv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, family: &str, params: &str) -> String {
    let path = dir.join(format!("{family}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = graphcurv(&[
        "generate", "--family", family, "--params", params, "--out", &p,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn generate_then_validate() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "hypercube", "d=3");
    let out = graphcurv(&["validate", "--graph", &g]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["vertices"], 8);
    assert_eq!(v["edges"], 12);
}

#[test]
fn invalid_graph_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(
        &p,
        r#"{"vertices":[{"id":"a"},{"id":"b"},{"id":"c"},{"id":"d"}],"edges":[{"u":"a","v":"b","w":1},{"u":"c","v":"d","w":1}],"measure":"normalized"}"#,
    )
    .unwrap();
    let out = graphcurv(&["validate", "--graph", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("connected"));
}

#[test]
fn curvature_json_on_two_vertex_graph() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "two_vertex", "");
    let out = graphcurv(&["curvature", "--graph", &g, "--json", "--oracle"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!((v["global_k"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    for entry in v["vertices"].as_array().unwrap() {
        assert!(entry["oracle_gap"].as_f64().unwrap().abs() < 1e-6);
    }
    let out = graphcurv(&["curvature", "--graph", &g, "--dim", "2", "--json"]);
    assert!((stdout_json(&out)["global_k"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn cheeger_and_spectrum() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "hypercube", "d=2");
    let v = stdout_json(&graphcurv(&["cheeger", "--graph", &g, "--exact"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = stdout_json(&graphcurv(&["spectrum", "--graph", &g]));
    assert!((v["eigenvalue"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    let p = generate(dir.path(), "path", "n=7");
    let omega = dir.path().join("omega.json");
    fs::write(&omega, r#"["1","2","3","4","5"]"#).unwrap();
    let v = stdout_json(&graphcurv(&[
        "cheeger",
        "--graph",
        &p,
        "--subset",
        omega.to_str().unwrap(),
    ]));
    assert_eq!(v["method"], "dinkelbach");
    let v = stdout_json(&graphcurv(&[
        "spectrum",
        "--graph",
        &p,
        "--dirichlet",
        omega.to_str().unwrap(),
    ]));
    assert_eq!(v["quantity"], "dirichlet_bottom");
}

#[test]
fn heat_conserves_mass() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "two_vertex", "");
    let f = dir.path().join("f.json");
    fs::write(&f, "[1, 0]").unwrap();
    let v = stdout_json(&graphcurv(&[
        "heat",
        "--graph",
        &g,
        "--f",
        f.to_str().unwrap(),
        "--t",
        "1",
    ]));
    let vals: Vec<f64> = v["values"]
        .as_object()
        .unwrap()
        .values()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((vals[0] + vals[1] - 1.0).abs() < 1e-14);
    assert!((vals[0] - 0.5 - 0.5 * (-2.0f64).exp()).abs() < 1e-14);
}

#[test]
fn checks_report_and_set_exit_codes() {
    let dir = TempDir::new().unwrap();
    let h = generate(dir.path(), "hypercube", "d=3");
    for kind in ["buser", "cheeger-bound", "pseudo-poincare", "semigroup"] {
        let out = graphcurv(&["check", kind, "--graph", &h, "--json"]);
        assert!(out.status.success(), "{kind}");
        assert_eq!(stdout_json(&out)["status"], "pass", "{kind}");
    }
    let u = dir.path().join("u.json");
    fs::write(&u, r#"["000","001"]"#).unwrap();
    let out = graphcurv(&[
        "check",
        "indicator-bound",
        "--graph",
        &h,
        "--subset",
        u.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    fs::write(&a, r#"["000"]"#).unwrap();
    fs::write(&b, r#"["111"]"#).unwrap();
    let out = graphcurv(&[
        "check",
        "dgg",
        "--graph",
        &h,
        "--a",
        a.to_str().unwrap(),
        "--b",
        b.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());

    // flat curvature: skipped, not failed
    let c = generate(dir.path(), "cycle", "n=6");
    let out = graphcurv(&["check", "cheeger-bound", "--graph", &c, "--json"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["status"], "skipped");
}

#[test]
fn suite_exit_codes_and_config_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_path = dir.path().join("report.json");
    let out_str = out_path.to_str().unwrap();

    fs::write(&cfg, r#"{"checks": []}"#).unwrap();
    let out = graphcurv(&["suite", "--config", cfg.to_str().unwrap(), "--out", out_str]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(report["reports"].as_array().unwrap().is_empty());

    fs::write(
        &cfg,
        r#"{"families": ["hypercube"], "sizes": {"hypercube": [2, 3]}, "checks": ["gradient_probe", "buser"],
            "probes": {"functions": 5}}"#,
    )
    .unwrap();
    let out = graphcurv(&["suite", "--config", cfg.to_str().unwrap(), "--out", out_str]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["summary"]["gradient_probe"]["expected_fail"], 2);

    // with zero tolerance rounding-level margins may fail; the exit code follows the failure count
    fs::write(
        &cfg,
        r#"{"families": ["cycle"], "sizes": {"cycle": [5]}, "checks": ["reverse_poincare"], "tolerances": {"reverse_poincare": 0}}"#,
    )
    .unwrap();
    let out = graphcurv(&["suite", "--config", cfg.to_str().unwrap(), "--out", out_str]);
    let report: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let failures = report["failures"].as_u64().unwrap();
    assert_eq!(out.status.code(), Some(if failures > 0 { 1 } else { 0 }));

    fs::write(&cfg, r#"{"families": ["cycle"], "colour": "blue"}"#).unwrap();
    let out = graphcurv(&["suite", "--config", cfg.to_str().unwrap(), "--out", out_str]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}
