use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SMALL: [&str; 6] = ["--precision", "128", "--d-exact", "30", "--d-float", "200"];

fn gwasym(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwasym"))
        .current_dir(dir)
        .env_remove("GWASYM_PRECISION")
        .env_remove("GWASYM_CACHE_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn exact_records_match_fixtures() {
    let tmp = TempDir::new().unwrap();
    let o = gwasym(tmp.path(), &["invariants", "--genus", "0", "--dmax", "3", "--exact"]);
    assert!(o.status.success());
    let r = records(&stdout(&o));
    let frac: Vec<(String, String)> = r
        .iter()
        .map(|v| (v["num"].as_str().unwrap().to_owned(), v["den"].as_str().unwrap().to_owned()))
        .collect();
    assert_eq!(
        frac,
        [("1", "2"), ("1", "120"), ("1", "3360")].map(|(a, b)| (a.to_owned(), b.to_owned()))
    );

    let o = gwasym(tmp.path(), &["invariants", "--genus", "1", "--dmax", "3"]);
    let r = records(&stdout(&o));
    assert_eq!(r[0]["num"], "0");
    assert_eq!(r[1]["num"], "0");
    assert_eq!((r[2]["num"].as_str(), r[2]["den"].as_str()), (Some("1"), Some("362880")));
}

#[test]
fn invariants_are_deterministic_and_idempotent() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [SMALL.as_slice(), &["invariants", "--dmax", "150", "--scaled"]].concat();
    let first = stdout(&gwasym(a.path(), &args));
    let other = stdout(&gwasym(b.path(), &args));
    assert_eq!(first, other, "fresh runs differ");
    assert_eq!(records(&first).len(), 150);

    let cache = a.path().join("gwasym-cache/genus0.jsonl");
    let before = fs::read(&cache).unwrap();
    let again = stdout(&gwasym(a.path(), &args));
    assert_eq!(first, again, "cached run differs");
    assert_eq!(before, fs::read(&cache).unwrap(), "cache rewritten without changes");
}

#[test]
fn out_file_and_cache_dir_flags() {
    let tmp = TempDir::new().unwrap();
    let o = gwasym(
        tmp.path(),
        &["--cache-dir", "c", "invariants", "--dmax", "5", "--out", "n0.jsonl"],
    );
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    assert_eq!(records(&fs::read_to_string(tmp.path().join("n0.jsonl")).unwrap()).len(), 5);
    assert!(tmp.path().join("c/genus0.jsonl").exists());
}

#[test]
fn verify_structural_suites() {
    let tmp = TempDir::new().unwrap();
    for suite in ["wdvv", "bounds"] {
        let args = [SMALL.as_slice(), &["verify", "--suite", suite]].concat();
        let o = gwasym(tmp.path(), &args);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["passed"], true, "{suite}: {v}");
        assert!(o.status.success());
    }
}

#[test]
fn tampered_cache_is_located() {
    let tmp = TempDir::new().unwrap();
    let gen = [SMALL.as_slice(), &["verify", "--suite", "wdvv"]].concat();
    assert!(gwasym(tmp.path(), &gen).status.success());

    let path = tmp.path().join("gwasym-cache/genus0.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    lines[6] = lines[6].replacen("\"num\":\"", "\"num\":\"1", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = gwasym(tmp.path(), &gen);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let failures: Vec<&Value> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .collect();
    assert_eq!(failures.len(), 1, "{v}");
    assert_eq!(failures[0]["name"], "cache_integrity");
    let detail = failures[0]["detail"].as_str().unwrap();
    assert!(detail.contains("line 7") && detail.contains("d = 7"), "{detail}");

    // the damaged entry was recomputed and the cache repaired
    assert!(gwasym(tmp.path(), &gen).status.success());
}

#[test]
fn config_file_and_flags_merge() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("run.toml"), "precision_bits = 96\ncache_dir = \"from-file\"\n").unwrap();
    let o = gwasym(
        tmp.path(),
        &["--config", "run.toml", "--precision", "80", "invariants", "--dmax", "2", "--scaled"],
    );
    assert!(o.status.success());
    let r = records(&stdout(&o));
    assert_eq!(r[0]["precision_bits"], 80);
    assert!(tmp.path().join("from-file/genus0.jsonl").exists());

    fs::write(tmp.path().join("bad.toml"), "precison = 3\n").unwrap();
    let o = gwasym(tmp.path(), &["--config", "bad.toml", "invariants", "--dmax", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_from_environment() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gwasym"))
        .current_dir(tmp.path())
        .env("GWASYM_PRECISION", "72")
        .env("GWASYM_CACHE_DIR", "env-cache")
        .args(["invariants", "--dmax", "2", "--scaled"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(records(&stdout(&o))[0]["precision_bits"], 72);
    assert!(tmp.path().join("env-cache/genus0.jsonl").exists());
}

#[test]
fn invalid_arguments_exit_with_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = gwasym(tmp.path(), &["invariants", "--genus", "2", "--dmax", "3"]);
    assert!(!o.status.success());
    let o = gwasym(tmp.path(), &["--z-init", "0", "singularity"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singularity_report_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["--precision", "128", "--d-exact", "60", "--d-float", "2500", "singularity"];
    let oa = gwasym(a.path(), &args);
    let ob = gwasym(b.path(), &args);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert!(ob.status.success());
    let ra = fs::read_to_string(a.path().join("gwasym-out/singularity.json")).unwrap();
    let rb = fs::read_to_string(b.path().join("gwasym-out/singularity.json")).unwrap();
    assert_eq!(ra, rb);
    let v: Value = serde_json::from_str(&ra).unwrap();
    assert!(v["x0"].as_str().unwrap().starts_with("1.98043386688"), "{}", v["x0"]);
}
