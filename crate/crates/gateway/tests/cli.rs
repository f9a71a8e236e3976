mod common;

use std::process::Command;

use common::data;

fn sue() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sue"))
}

#[test]
fn check_reports_positions() {
    let ok = sue().args(["check", "--rules"]).arg(data("shooting.rules")).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("1 fluents, 2 rules"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rules");
    std::fs::write(&bad, "fluent f\ninitiate f when a and b\n").unwrap();
    let out = sue().args(["check", "--rules"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.rules:2:1: conjunction requires a window"));
}

#[test]
fn validate_reports_lines() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sue.jsonl");
    std::fs::write(
        &bad,
        r#"{"offset_ms":0,"type":"simple_event","payload":{"id":"a","event_type":"x","sensor_id":"nope","position":{"lat":0,"lon":0},"region_radius_m":1,"confidence":0.5,"modality":"audio"}}"#,
    )
    .unwrap();
    let out = sue().args(["validate", "--scenario"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unregistered sensor at line 1"));
    let ok = sue().args(["validate", "--scenario"]).arg(data("shooting.sue.jsonl")).output().unwrap();
    assert!(ok.status.success());
}

#[test]
fn replay_prints_envelopes_and_dump_writes_analytics() {
    let out = sue()
        .args(["replay", "--fast", "--rules"])
        .arg(data("shooting.rules"))
        .arg("--scenario")
        .arg(data("shooting.sue.jsonl"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(r#""type":"complex_event""#)).count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.json");
    let status = sue()
        .args(["dump", "--rules"])
        .arg(data("shooting.rules"))
        .arg("--scenario")
        .arg(data("shooting.sue.jsonl"))
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let dump: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dump["summary"]["total"], 4);
    assert_eq!(dump["summary"]["by_type"]["shooting"], 1);
    let buckets: u64 = dump["timeline"].as_array().unwrap().iter()
        .map(|b| b["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum::<u64>())
        .sum();
    assert_eq!(buckets, 4);
}
