use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coded-shuffle"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coded-shuffle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn run_example1_reports_matching_loads() {
    let out = run(&["run", data("example1.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    for key in ["lower_bound", "osct", "fsct"] {
        assert_eq!(v[key]["over_qn"], "35/56", "{key}");
    }
    assert_eq!(v["theorem2_optimal"], true);
    assert_eq!(v["theorem4_optimal"], true);
    assert_eq!(v["decode_verified"], true);
}

#[test]
fn run_example2_osct_above_bound() {
    let out = run(&["run", data("example2.json").to_str().unwrap(), "--sequential"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["lower_bound"]["exact"], "40/63");
    assert_eq!(v["fsct"]["exact"], "40/63");
    assert_eq!(v["osct"]["exact"], "2/3");
    assert_eq!(v["theorem2_optimal"], false);
    assert_eq!(v["theorem4_optimal"], true);
}

#[test]
fn run_writes_transcript() {
    let path = scratch("t1.jsonl");
    let out = run(&["run", data("example1.json").to_str().unwrap(), "--transcript", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().any(|r| r["scheme"] == "osct"));
    assert!(lines.iter().any(|r| r["scheme"] == "fsct"));
}

#[test]
fn run_uncoded_only_omits_coded_schemes() {
    let out = run(&["run", data("example1.json").to_str().unwrap(), "--schemes", "uncoded"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["uncoded"]["exact"], "8/7");
    assert!(v.get("osct").is_none());
    assert!(v.get("fsct").is_none());
}

#[test]
fn invalid_instance_exits_2() {
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"K":2,"N":2,"Q":1,"placement":[[1],[1]],"assignment":[[1],[]]}"#).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn goldens_pass_on_embedded_data() {
    let out = run(&["goldens"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(!text.contains("FAIL"));
}

#[test]
fn goldens_list() {
    let out = run(&["goldens", "--list"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().count() >= 10);
    assert!(text.contains("example1."));
    assert!(text.contains("example2."));
}

#[test]
fn goldens_fail_on_corrupted_data() {
    let dir = scratch("corrupt");
    std::fs::create_dir_all(&dir).unwrap();
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(data("example1.json")).unwrap()).unwrap();
    doc["placement"][2] = serde_json::json!([3, 4, 7]);
    std::fs::write(dir.join("example1.json"), doc.to_string()).unwrap();
    std::fs::copy(data("example2.json"), dir.join("example2.json")).unwrap();
    let out = run(&["goldens", "--data-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL example1."));
}

#[test]
fn gen_homogeneous_roundtrips_through_run() {
    let desc = scratch("desc.json");
    std::fs::write(&desc, r#"{"kind":"homogeneous","k":4,"r":2,"s":1,"n":6,"q":4}"#).unwrap();
    let inst = scratch("gen.json");
    let out = run(&["gen", desc.to_str().unwrap(), "-o", inst.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["run", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["K"], 4);
    assert_eq!(v["osct"]["exact"], v["lower_bound"]["exact"]);
}

#[test]
fn gen_rejects_bad_descriptor() {
    let desc = scratch("bad_desc.json");
    std::fs::write(&desc, r#"{"kind":"homogeneous","k":4,"r":2,"s":1,"n":5,"q":4}"#).unwrap();
    let out = run(&["gen", desc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_small_config_emits_csv() {
    let cfg = scratch("sweep.json");
    std::fs::write(&cfg, r#"{"K":3,"d":["0","1/4"],"samples":2,"N":8,"Q":8,"seed":7}"#).unwrap();
    let out = run(&["sweep", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,sample,seed,lower_bound,uncoded,osct,fsct"));
    assert!(text.lines().filter(|l| l.contains(",mean,")).count() == 2);
}

#[test]
fn sweep_help_documents_columns() {
    let out = run(&["sweep", "--help"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("d,sample,seed,lower_bound,uncoded,osct,fsct"));
}
