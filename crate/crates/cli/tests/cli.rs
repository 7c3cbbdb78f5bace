use std::path::Path;
use std::process::{Command, Output};

use icc_cli::metrics::MetricsConfig;
use icc_cli::simulate::SimulateConfig;
use icc_cli::{emit, GlobalOpts};
use serde_json::Value;

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icc-kit"))
        .args(args)
        .env_remove("ICC_KIT_CAP")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// Splits `# {json}` comment lines from the CSV body.
fn csv_parts(text: &str) -> (Vec<Value>, Vec<&str>) {
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(j) => comments.push(serde_json::from_str(j).unwrap()),
            None => rows.push(line),
        }
    }
    (comments, rows)
}

#[test]
fn simulate_constant_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"n":3,"q":5,"r":1,"d":2,"S":1,"m":2,"runs":5,
            "f":{"n":3,"q":5,"d":2,"terms":[{"exp":[0,0,0],"coef":4}]}}"#,
    );
    let out = kit(&["simulate", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["match"], true);
    assert_eq!(v["matches"], 5);
    for run in v["runs"].as_array().unwrap() {
        assert_eq!(run["decoded"], 4);
        assert_eq!(run["stragglers"].as_array().unwrap().len(), 1);
    }
    assert_eq!(v["metrics"]["D"], 6);
    assert_eq!(v["metrics"]["N"], 12);
}

#[test]
fn simulate_random_runs_match_and_record_seed() {
    let cfg = SimulateConfig {
        runs: 50,
        ..Default::default()
    };
    let opts = GlobalOpts {
        seed: Some(99),
        ..Default::default()
    };
    let report = icc_cli::simulate::run(cfg, &opts).unwrap();
    assert!(report.passed);
    let v: Value = serde_json::from_str(&report.files[0].1).unwrap();
    assert_eq!(v["config"]["seed"], 99);
    assert_eq!(v["runs"][3]["seed"], 102);
    assert_eq!(v["matches"], 50);
}

#[test]
fn simulate_fixed_stragglers_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"n":4,"q":3,"d":2,"S":2,"m":3,"x":[2,0,1,1],"straggler_ids":[0,7]}"#,
    );
    let out = kit(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["runs"][0]["stragglers"], serde_json::json!([0, 7]));
    assert_eq!(v["runs"][0]["decoded"], v["runs"][0]["direct"]);
}

#[test]
fn malformed_configs_exit_2_with_json_error() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("syntax.json", "{\"n\": 4,"),
        ("unknown.json", r#"{"n":4,"bogus":1}"#),
        ("nonprime.json", r#"{"q":4}"#),
        ("degree.json", r#"{"n":3,"q":2,"d":3,"m":3}"#),
        ("budget.json", r#"{"S":1,"straggler_ids":[0,1]}"#),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let out = kit(&["simulate", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty(), "{name}");
        let err: Value =
            serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(err["error"].is_string(), "{name}");
    }
    let missing = dir.path().join("absent.json");
    let out = kit(&["audit", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(kit(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kit(&["audit", "--variant", "other"]).status.code(), Some(2));
    assert_eq!(kit(&["audit", "--seed", "minus"]).status.code(), Some(2));
}

#[test]
fn audit_uniform_leaks_only_through_rank_deficiency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "audit.json",
        r#"{"n":4,"q":2,"r":2,"epsilon":0.01,"m":4,"codes":40,"distribution":{"kind":"uniform"}}"#,
    );
    let out_file = dir.path().join("audit.csv");
    let out = kit(&[
        "audit",
        "--config",
        &cfg,
        "--seed",
        "5",
        "--variant",
        "conservative",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_file).unwrap();
    let (comments, rows) = csv_parts(&text);
    assert_eq!(comments.len(), 2);
    let header = &comments[0];
    assert_eq!(header["seed"], 5);
    assert_eq!(header["variant"], "conservative");
    assert_eq!(header["cap"], 1u64 << 24);
    assert_eq!(header["config"]["m"], 4);
    assert!((header["hp_x"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(rows[0], "code_seed,R,I_bits_q,bound,pass");
    assert_eq!(rows.len(), 41);
    assert!(rows[1].starts_with("6,"));
    let footer = &comments[1];
    assert!(footer["pass_fraction"].as_f64().unwrap() >= 0.9);
    assert_eq!(footer["pass"], true);
    assert_eq!(footer["codes"], 40);
    assert_eq!(footer["mean_vp_uniform"], 0.0);
    // Uniform data leaks exactly r - rank(G_R) symbols, so every row is an integer.
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5);
        let i = cols[2].parse::<f64>().unwrap();
        assert!(
            (i - i.round()).abs() < 1e-9 && (0.0..=2.0).contains(&i.round()),
            "{row}"
        );
        assert_eq!(cols[4], (i <= cols[3].parse::<f64>().unwrap()).to_string());
    }
}

#[test]
fn audit_exits_1_when_the_ensemble_leaks() {
    // X is 000 or 111 and m = 1: unless G is all-ones the key cannot hide the bit.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "leaky.json",
        r#"{"n":3,"q":2,"r":2,"epsilon":1e-8,"m":1,"codes":60,
            "distribution":{"kind":"table","probs":[0.5,0,0,0,0,0,0,0.5]}}"#,
    );
    let out = kit(&["audit", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let (comments, _) = csv_parts(&text);
    assert_eq!(comments[1]["pass"], false);
    assert!(comments[1]["pass_fraction"].as_f64().unwrap() < 0.4);
}

#[test]
fn audit_rejects_unreachable_key_size() {
    // Uniform data over n = 3 with r = 2, p = 2 leaves no room for eps < 1.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"n":3,"r":2,"distribution":{"kind":"uniform"}}"#,
    );
    let out = kit(&["audit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("epsilon"));
}

#[test]
fn cap_is_enforced_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.json", r#"{"codes":2}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_icc-kit"))
        .args(["audit", "--config", &cfg])
        .env("ICC_KIT_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn keysize_curves_write_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("curves");
    let out = kit(&["keysize-curves", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(out_dir.join("keysize_curve_a.csv")).unwrap();
    let b = std::fs::read_to_string(out_dir.join("keysize_curve_b.csv")).unwrap();
    let (ha, ra) = csv_parts(&a);
    let (hb, rb) = csv_parts(&b);
    assert_eq!(ha[0]["curve"], "a");
    assert_eq!(hb[0]["curve"], "b");
    assert_eq!(ha[0]["example_keysize"], 40.0);
    assert_eq!(ra[0], "x,m_real,m_ceil");
    assert_eq!(rb[0], "x,m_real,m_ceil");
    assert!(rb.contains(&"262140,42,42"));
    assert_eq!(ra.len(), 65);
}

#[test]
fn emit_single_document_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = icc_cli::curves::run(Default::default(), &GlobalOpts::default()).unwrap();
    let single = icc_cli::Report {
        files: report.files[..1].to_vec(),
        passed: true,
    };
    let path = dir.path().join("only.csv");
    emit(&single, Some(&path)).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), report.files[0].1);
}

fn small_metrics() -> MetricsConfig {
    MetricsConfig {
        distributions: 10,
        pairs: 15,
        ..Default::default()
    }
}

fn key_paths(v: &Value, prefix: String, out: &mut Vec<String>) {
    if let Value::Object(m) = v {
        for (k, child) in m {
            let p = format!("{prefix}/{k}");
            out.push(p.clone());
            if k != "config" {
                key_paths(child, p, out);
            }
        }
    }
}

#[test]
fn metrics_schema_is_stable_across_seeds() {
    let mut schemas = Vec::new();
    for seed in [1u64, 2, 3] {
        let opts = GlobalOpts {
            seed: Some(seed),
            ..Default::default()
        };
        let report = icc_cli::metrics::run(small_metrics(), &opts).unwrap();
        assert!(report.passed);
        let v: Value = serde_json::from_str(&report.files[0].1).unwrap();
        assert_eq!(v["config"]["seed"], seed);
        let mut keys = Vec::new();
        key_paths(&v, String::new(), &mut keys);
        schemas.push(keys);
    }
    assert_eq!(schemas[0], schemas[1]);
    assert_eq!(schemas[1], schemas[2]);
    for name in [
        "/checks/conditional_entropy",
        "/checks/v_le_vp",
        "/checks/d_le_dp",
        "/checks/pinsker_standard",
        "/checks/entropy_uniform",
        "/checks/entropy_point_mass",
        "/checks/divergence_relation",
        "/checks/triangle",
        "/all_passed",
    ] {
        assert!(schemas[0].iter().any(|k| k == name), "{name} missing");
    }
}

#[test]
fn metrics_check_binary_reproduces_itself() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "m.json",
        &serde_json::to_string(&small_metrics()).unwrap(),
    );
    let first = kit(&["metrics-check", "--config", &cfg, "--seed", "7"]);
    assert_eq!(first.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&first.stdout).unwrap();
    let replay = write_config(dir.path(), "replay.json", &v["config"].to_string());
    let second = kit(&["metrics-check", "--config", &replay]);
    assert_eq!(first.stdout, second.stdout);
}
