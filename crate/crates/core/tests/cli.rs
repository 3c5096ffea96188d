use std::path::Path;
use std::process::{Command, Output};

use dispersionlab::cli::{main_with_args, presets, ExperimentConfig, Report};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispersionlab")).args(args).env_remove("DISPERSIONLAB_THREADS").output().unwrap()
}

fn is_empty_or_missing(dir: &Path) -> bool {
    !dir.exists() || std::fs::read_dir(dir).unwrap().next().is_none()
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        "{ not json",
        r#"{"kind":"ode","params":{"mu":5,"sigma2":0.1,"a":0,"dt":0.02}}"#,
        r#"{"kind":"ode","params":{"mu":5,"sigma2":0.1,"a":0,"dt":0.03,"t_max":20}}"#,
        r#"{"kind":"ode","params":{"mu":5,"sigma2":0.1,"a":0,"dt":0.02,"t_max":20,"bogus":1}}"#,
        r#"{"kind":"wave1d","params":{"mu":5}}"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("c{k}.json"));
        std::fs::write(&cfg, text).unwrap();
        let o = bin(&["ode", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {k}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(is_empty_or_missing(&out), "case {k} left files behind");
    }
}

#[test]
fn wave_model_that_fails_validation_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut cfg: serde_json::Value = serde_json::to_value(dispersionlab::cli::preset("wave1d-elastic").unwrap()).unwrap();
    cfg["params"]["model"]["homogeneous"]["vs"] = 5000.0.into();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let o = bin(&["wave1d", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(is_empty_or_missing(&out));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bin(&["ode"]).status.code(), Some(2));
    assert_eq!(bin(&["ode", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(bin(&["wave1d", "--preset", "fig1a"]).status.code(), Some(2));
    assert_eq!(bin(&["ode", "--preset", "fig1a", "--config", "x.json"]).status.code(), Some(2));
    assert_eq!(bin(&["--threads", "0", "ode", "--preset", "fig1a"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn presets_listing_names_every_preset() {
    let o = bin(&["presets"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for p in presets() {
        assert!(text.contains(p.name), "{}", p.name);
    }
}

#[test]
fn ode_preset_writes_report_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1b");
    let code = main_with_args(["dispersionlab", "--threads", "2", "ode", "--preset", "fig1b", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report: Report = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.preset.as_deref(), Some("fig1b"));
    assert!(report.summary["corrected_max_error"] < 1e-9);
    for name in ["analytic", "forward_euler", "central_fd", "corrected"] {
        let text = std::fs::read_to_string(out.join(format!("{name}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 1001, "{name}");
        assert_eq!(text.lines().next(), Some("t,re,im"));
    }
}

#[test]
fn report_top_level_keys_are_fixed() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, preset) in [("nonmatching", "nonmatching"), ("lemma-init", "lemma-init"), ("ode", "fig2a")] {
        let out = dir.path().join(preset);
        let o = bin(&[cmd, "--preset", preset, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["config", "details", "kind", "preset", "runtime_seconds", "schema_version", "summary"]);
        assert_eq!(v["schema_version"], 1);
        assert!(v["details"].get(cmd).is_some());
    }
}

#[test]
fn config_file_with_out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-config");
    let mut cfg = dispersionlab::cli::preset("nonmatching").unwrap();
    cfg.out = Some(out.clone());
    let path = dir.path().join("nm.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = bin(&["nonmatching", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(out.join("report.json").exists());
    let back = ExperimentConfig::load(&path).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn transform_keeps_the_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    let mut text = String::from("t,value\n");
    for k in 0..400 {
        let t = k as f64 * 0.02;
        text.push_str(&format!("{t},{}\n", (-(t - 4.0) * (t - 4.0) / 0.2).exp()));
    }
    std::fs::write(&input, text).unwrap();
    for (dir_name, scheme) in [("forward", "central"), ("inverse", "leapfrog")] {
        let output = dir.path().join(format!("{dir_name}.csv"));
        let o = bin(&[
            "transform",
            "--direction",
            dir_name,
            "--scheme",
            scheme,
            "--dt",
            "0.02",
            "--in",
            input.to_str().unwrap(),
            "--out",
            output.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let rows = std::fs::read_to_string(&output).unwrap().lines().count();
        assert_eq!(rows, 401);
    }
    let o = bin(&["transform", "--direction", "forward", "--scheme", "central", "--dt", "0.01", "--in", input.to_str().unwrap(), "--out", "/tmp/never.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["transform", "--direction", "sideways", "--scheme", "central", "--in", input.to_str().unwrap(), "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
