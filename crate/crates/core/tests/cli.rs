use std::process::{Command, Output};

use serde_json::Value;

fn qcard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcard"))
        .args(args)
        .env_remove("QCARD_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn entry<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == name)
        .unwrap_or_else(|| panic!("missing entry {name}"))
}

#[test]
fn report_reproduces_headline_values() {
    let out = qcard(&["report"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["schema"], "qcard/1");
    assert_eq!(doc["dominance"], true);
    let p_alice = entry(&doc, "p_alice")["value"].as_f64().unwrap();
    let p_bob = entry(&doc, "p_bob_combined")["value"].as_f64().unwrap();
    assert!((p_alice - (2.0 + 3f64.sqrt()) / 6.0).abs() < 1e-9);
    assert!((p_bob - (3.0 + 2f64.sqrt()) / 6.0).abs() < 1e-9);
    for e in doc["entries"].as_array().unwrap() {
        assert_eq!(e["pass"], true, "{e}");
    }
}

#[test]
fn alice_sweep_rows_stay_in_bounds() {
    let out = qcard(&["sweep", "--actor", "alice", "--from=-pi/6", "--to", "pi/6", "--steps", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    let hi = (2.0 + 3f64.sqrt()) / 6.0;
    let probs: Vec<f64> = rows.iter().map(|r| r["probability"].as_f64().unwrap()).collect();
    for p in &probs {
        assert!(*p >= 1.0 / 3.0 - 1e-12 && *p <= hi + 1e-12, "{p}");
    }
}

#[test]
fn sweep_peaks_at_pi_over_twelve() {
    // Thirteen points from -pi/6 to pi/6 put pi/12 at index 9.
    let out = qcard(&["sweep", "--from=-pi/6", "--to", "pi/6", "--steps", "13"]);
    let rows = json(&out)["rows"].as_array().unwrap().clone();
    let probs: Vec<f64> = rows.iter().map(|r| r["probability"].as_f64().unwrap()).collect();
    let best = probs.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(probs[9], best);
    assert!((rows[9]["alpha"].as_f64().unwrap() - std::f64::consts::PI / 12.0).abs() < 1e-12);
}

#[test]
fn sweep_csv_has_header_and_lf_endings() {
    let out = qcard(&["sweep", "--steps", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("alpha,probability"));
}

#[test]
fn empty_or_bad_ranges_are_usage_errors() {
    assert_eq!(qcard(&["sweep", "--from", "pi/12", "--to", "pi/12"]).status.code(), Some(64));
    assert_eq!(qcard(&["sweep", "--from", "pi/6", "--to", "pi/12"]).status.code(), Some(64));
    assert_eq!(qcard(&["sweep", "--steps", "1"]).status.code(), Some(64));
    assert_eq!(qcard(&["sweep", "--from", "0", "--to", "pi"]).status.code(), Some(64));
    assert_eq!(qcard(&["report", "--bogus"]).status.code(), Some(64));
}

#[test]
fn optimize_is_byte_identical_across_runs() {
    let args = ["optimize", "--actor", "bob-collective", "--choice", "III", "--restarts", "100", "--seed", "42"];
    let a = qcard(&args);
    let b = qcard(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    let p = doc["probability"].as_f64().unwrap();
    assert!((p - (3.0 + 2f64.sqrt()) / 6.0).abs() < 1e-6, "{p}");
}

#[test]
fn optimize_alice_finds_pi_over_twelve() {
    let out = qcard(&["optimize", "--actor", "alice", "--strategy", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let alpha = json(&out)["alpha"].as_f64().unwrap();
    assert!((alpha - std::f64::consts::PI / 12.0).abs() < 1e-6);
}

#[test]
fn single_trial_simulation_is_valid() {
    let out = qcard(&["simulate", "--actor", "alice", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json(&out)["report"];
    let p = r["estimate"].as_f64().unwrap();
    assert!(p == 0.0 || p == 1.0);
    assert_eq!(r["std_error"].as_f64().unwrap(), (p * (1.0 - p)).sqrt());
}

#[test]
fn seed_flag_overrides_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcard"));
        cmd.args(["simulate", "--actor", "bob-collective", "--trials", "1000"]);
        cmd.env_remove("QCARD_SEED");
        if let Some(s) = env {
            cmd.env("QCARD_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        json(&out)["report"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 42);
    assert_eq!(run(Some("7"), None), 7);
    assert_eq!(run(Some("7"), Some("9")), 9);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qcard-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    let out = qcard(&["sweep", "--steps", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
