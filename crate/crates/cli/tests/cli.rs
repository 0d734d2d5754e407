use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ranksel");

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn ranksel(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

const SMALL_SIM: &str = r#"
experiment = "market_sim"
[pool]
n = 4
v1 = 5.0
v2 = 0.0
p1 = 0.4
p2 = 0.8
gamma = 3.0
[model]
kind = "plackett_luce"
beta_grid = [3.0]
[sim]
steps = 300
replicates = 6
refresh_prob = 0.4
[rng]
seed = 11
"#;

const SMALL_SWEEP: &str = r#"
experiment = "welfare_sweep"
[pool]
n = 4
v1 = 1.0
v2 = 0.0
p1 = 0.1
p2 = 0.4
[model]
beta_grid = [2.0, 1.0, 0.5]
[grid]
gamma = [1.6, 10.0]
"#;

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", SMALL_SIM);
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = ranksel(&["market_sim", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let out = dir.path().join("c.csv");
    let o = ranksel(&["market_sim", "--config", cfg.to_str().unwrap(), "--seed", "12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(std::fs::read(out).unwrap(), outputs[0]);
}

#[test]
fn summary_is_one_json_object() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.toml", SMALL_SWEEP);
    let out = dir.path().join("sweep.csv");
    let o = ranksel(&["welfare_sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["experiment"], "welfare_sweep");
    assert_eq!(summary["rows"], 2 * 3 * 8);
    assert_eq!(summary["flags"].as_array().unwrap().len(), 0);
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("gamma,model,param,strategy,k,p_picked_busy,"));
    assert_eq!(csv.lines().count(), 1 + 48);
}

#[test]
fn json_round_trips_csv_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.toml", SMALL_SWEEP);
    let (csv_out, json_out) = (dir.path().join("s.csv"), dir.path().join("s.json"));
    let c = cfg.to_str().unwrap();
    assert!(ranksel(&["welfare_sweep", "--config", c, "--out", csv_out.to_str().unwrap()]).status.success());
    let o = ranksel(&["welfare_sweep", "--config", c, "--format", "json", "--out", json_out.to_str().unwrap()]);
    assert!(o.status.success());

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(json_out).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["seed"], 0);
    assert!(doc["metadata"]["version"].as_str().unwrap().starts_with('v'));
    assert_eq!(doc["metadata"]["config"]["experiment"], "welfare_sweep");
    let rows = doc["rows"].as_array().unwrap();

    let mut reader = csv::Reader::from_path(csv_out).unwrap();
    let headers = reader.headers().unwrap().clone();
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        for (h, field) in headers.iter().zip(rec.iter()) {
            let v = &row[h];
            match v {
                Value::Number(x) => assert_eq!(x.as_f64().unwrap(), field.parse::<f64>().unwrap(), "{h}"),
                Value::String(s) => assert_eq!(s, field, "{h}"),
                other => assert_eq!(other.to_string(), field, "{h}"),
            }
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "experiment = \"strategy_map\"\n[pool]\nn = 3\n");
    let o = ranksel(&["strategy_map", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage error"));

    let unseeded = write_config(dir.path(), "sim.toml", &SMALL_SIM.replace("seed = 11", ""));
    assert_eq!(ranksel(&["market_sim", "--config", unseeded.to_str().unwrap()]).status.code(), Some(2));

    let cfg = write_config(dir.path(), "sweep.toml", SMALL_SWEEP);
    assert_eq!(ranksel(&["no_such_kind", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ranksel(&["welfare_sweep"]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(ranksel(&["welfare_sweep", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn over_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "big.toml", &SMALL_SWEEP.replace("n = 4", "n = 13"));
    let out = dir.path().join("big.csv");
    let o = ranksel(&["oracle_dump", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity error"));
}

#[test]
fn shipped_configs_parse_and_light_ones_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).unwrap();
        let kind = text.lines().find_map(|l| l.strip_prefix("experiment = ")).unwrap().trim_matches('"').to_string();
        if kind == "market_sim" {
            continue;
        }
        let out = dir.path().join(format!("{kind}.out"));
        let o = ranksel(&[&kind, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(summary["flags"].as_array().unwrap().len(), 0, "{}", path.display());
    }
    assert!(seen >= 6);
}
