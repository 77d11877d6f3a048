mod common;

use std::process::Command;

use common::{cli, mission_id};

fn data(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn shipped_files_validate_clean() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(dir.path(), &["validate", &data("onto4mat.kbx"), "--meta", &data("onto4mat.meta")]);
    assert_eq!(code, 0);
    assert!(out.contains("total 0 (P4=0"));
    let (code, out, _) = cli(
        dir.path(),
        &["validate", &data("onto4mat.kbx"), "--meta", &data("onto4mat.meta"), "--format", "json"],
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lint"]["total"], 0);
    assert_eq!(v["ontoclean"], serde_json::json!([]));
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(dir.path(), &["validate", &data("dirty.kbx")]);
    assert_eq!(code, 1);
    assert!(out.contains("P19 [critical]"));
    let (code, out, _) = cli(dir.path(), &["validate", &data("onto4mat.kbx"), "--meta", &data("dirty.meta")]);
    assert_eq!(code, 1);
    assert!(out.contains("total 14"));
    let (code, _, err) = cli(dir.path(), &["metrics", "/no/such/file.kbx"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(dir.path(), &[]).0, 2);
    assert_eq!(cli(dir.path(), &["frobnicate"]).0, 2);
    assert_eq!(cli(dir.path(), &["resolve", "builtin", "--intent", "mustering", "--goal", "4", "--sheep", "3"]).0, 2);
    assert_eq!(cli(dir.path(), &["metrics", "builtin", "--format", "xml"]).0, 2);
    assert_eq!(cli(dir.path(), &["--help"]).0, 0);
}

#[test]
fn resolve_approve_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(
        dir.path(),
        &["resolve", "builtin", "--intent", "mustering", "--goal", "40,40", "--sheep", "20", "--seed", "7"],
    );
    assert_eq!(code, 0);
    assert!(out.contains("tactic: mustering"));
    assert!(out.contains("behaviours: collect, drive"));
    let id = mission_id(&out);
    assert!(dir.path().join(format!("{id}.mission.json")).exists());

    let (code, _, err) = cli(dir.path(), &["run", &id]);
    assert_eq!(code, 1);
    assert!(err.contains("PlanNotApproved"));

    assert_eq!(cli(dir.path(), &["approve", &id]).0, 0);
    assert_eq!(cli(dir.path(), &["reject", &id]).0, 1);
    let export = dir.path().join("out.jsonl");
    let (code, out, _) = cli(dir.path(), &["run", &id, "--export", export.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("succeeded"));
    let frames = onto4mat::sim::parse_trajectory(&std::fs::read_to_string(&export).unwrap()).unwrap();
    assert!(frames.last().unwrap().complete);
    assert_eq!(cli(dir.path(), &["run", &id]).0, 1);
}

#[test]
fn metrics_query_conformance() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(dir.path(), &["query", "builtin", "--expr", "min(2, teamHasAgent, Agent)"]);
    assert_eq!((code, out.as_str()), (0, "herd\n"));
    let (code, _, err) = cli(dir.path(), &["query", "builtin", "--expr", "min("]);
    assert_eq!(code, 1);
    assert!(err.contains("column 5"));
    let (_, out, _) = cli(dir.path(), &["metrics", &data("onto4mat.kbx"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["individual_count"], 18);
    let (code, out, _) = cli(dir.path(), &["conformance", "builtin"]);
    assert_eq!(code, 0);
    assert!(out.contains("1060"));
}

#[test]
fn store_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_o4m"))
        .args(["resolve", "builtin", "--intent", "mustering", "--goal", "40,40", "--sheep", "4"])
        .env("O4M_STORE", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let id = mission_id(&String::from_utf8(out.stdout).unwrap());
    assert!(dir.path().join(format!("{id}.mission.json")).exists());
}
