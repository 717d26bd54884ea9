use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qf")).args(args).env_remove("QF_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_generated(dir: &Path, file: &str, args: &[&str]) -> String {
    let path = dir.join(file);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(qf(&full).status.code(), Some(0), "generate {args:?}");
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    for (file, args) in [
        ("c3.json", vec!["chain", "3"]),
        ("s.json", vec!["sierpinski_form"]),
        ("z2.json", vec!["group_quantale", "2"]),
        ("phi.json", vec!["phi_n", "min:3", "1"]),
    ] {
        let p = write_generated(dir.path(), file, &args);
        let o = qf(&["validate", &p]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("ok: "));
    }
    assert!(stdout(&qf(&["generate"])).contains("endo_quantale"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("bad.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(qf(&["validate", garbage.to_str().unwrap()]).status.code(), Some(2));
    let not_lattice = dir.path().join("nl.json");
    std::fs::write(&not_lattice, r#"{"name":"x","kind":"lattice","n":2,"leq":[[true,false],[false,true]]}"#).unwrap();
    assert_eq!(qf(&["validate", not_lattice.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qf(&["generate", "widget"]).status.code(), Some(2));
    assert_eq!(qf(&["laws", "run", "--law", "no-such-law"]).status.code(), Some(2));
    assert_eq!(qf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn dot_edges() {
    let dir = tempfile::tempdir().unwrap();
    for (args, edges) in [(vec!["chain", "2"], 1), (vec!["diamond"], 4), (vec!["powerset", "3"], 12)] {
        let p = write_generated(dir.path(), "l.json", &args);
        let dot = stdout(&qf(&["export-dot", &p]));
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), edges, "{args:?}");
    }
}

#[test]
fn corrupted_fixture_fails_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_generated(dir.path(), "q.json", &["min_quantale", "3"]);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // the bottom no longer annihilates
    doc["mult"][0][1] = 1.into();
    std::fs::write(&p, doc.to_string()).unwrap();

    let o = qf(&["laws", "run", "--scope", &p, "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let fail = report["results"].as_array().unwrap().iter().find(|r| r["status"] == "fail").unwrap();
    assert!(fail["witness"].is_object());

    let replay = dir.path().join("replay.json");
    std::fs::write(&replay, fail["instance"].to_string()).unwrap();
    let law = fail["law_id"].as_str().unwrap();
    let o = qf(&["laws", "run", "--scope", replay.to_str().unwrap(), "--law", law]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failures:"));
}

#[test]
fn cap_flag_and_env_agree() {
    let a = qf(&["laws", "run", "--law", "prop-formsvsGalois", "--cap", "2", "--json"]);
    let b = Command::new(env!("CARGO_BIN_EXE_qf"))
        .args(["laws", "run", "--law", "prop-formsvsGalois", "--json"])
        .env("QF_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        for r in v["results"].as_array_mut().unwrap() {
            r["elapsed_ms"] = 0.into();
        }
        v
    };
    let (va, vb) = (strip(&a), strip(&b));
    assert_eq!(va, vb);
    assert_eq!(va["bound"], 2);
    assert_eq!(va["summary"]["pass"], 5);
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = qf(&["report", "--json", "--cap", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = qf(&["report", "--text", "--from", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("prop-formsvsGalois") && text.contains("0 failed"));
}

#[test]
fn every_law_is_documented() {
    let listed = stdout(&qf(&["laws", "list"]));
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../LAWS.md")).unwrap();
    let ids: Vec<&str> = listed.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(ids.len(), 30);
    for id in ids {
        assert!(doc.contains(&format!("`{id}`")), "{id} missing from LAWS.md");
    }
}
