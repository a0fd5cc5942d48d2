use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn r2wb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_r2wb"))
        .args(args)
        .output()
        .expect("run r2wb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = r2wb(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn worked_transcripts() {
    for (args, want) in [
        (&["lh", "v[w]*v[17]"][..], "v[w]*v[17]+v[17]\n"),
        (&["pred2", "v[w]*v[17]+v[17]"][..], "v[18]\n"),
        (&["cmp", "0", "1"][..], "<\n"),
        (&["cmp", "w^w", "w^w"][..], "=\n"),
        (&["pred2", "v[w]*v[17]"][..], "v[w]\n"),
        (&["lh", "v[1]"][..], "inf\n"),
        (&["r1lh", "w^w"][..], "w^w+w+1\n"),
        (&["ts", "v[3]"][..], "(v[1],v[2],v[3])\n"),
        (&["succ2", "v[w]", "-n", "3"][..], "v[w]\nv[w]*2\nv[w]*3\n"),
    ] {
        let o = r2wb(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&o), want, "{args:?}");
    }
}

#[test]
fn norm_prints_canonical_forms() {
    let o = r2wb(&["norm", "w + 1", "w^1", "th_0(th_1(0))"]);
    assert_eq!(stdout(&o), "w+1\nw\nth_0(th_1(0))\n");
}

#[test]
fn chains_round_trip_through_o_and_tc() {
    for t in ["w^w+3", "v[2]*w", "th_0(th_1(0))*w+1", "v[w+1]"] {
        let chain = stdout(&r2wb(&["tc", t]));
        let back = stdout(&r2wb(&["o", chain.trim()]));
        assert_eq!(back.trim(), stdout(&r2wb(&["norm", t])).trim(), "{t} via {chain}");
    }
}

#[test]
fn exit_codes() {
    let parse = r2wb(&["norm", "w+"]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("byte 2"));
    assert_eq!(r2wb(&["o", "((w"]).status.code(), Some(2));

    assert_eq!(r2wb(&["o", "((w,1))"]).status.code(), Some(3));
    assert_eq!(r2wb(&["r1lh", "th_0(th_1(0))"]).status.code(), Some(3));
}

#[test]
fn broken_golden_corpus_is_an_invariant_failure() {
    let dir: PathBuf = std::env::temp_dir().join(format!("r2wb-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("operators.tsv"), "mu\tv[1]\tv[3]\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_r2wb"))
        .args(["verify", "golden"])
        .env("R2WB_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("golden: checked=1 failures=1"));

    let ok = r2wb(&["verify", "golden"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
}

#[test]
fn json_schema() {
    let v = json(&["lh", "v[w]*v[17]"]);
    for key in ["query", "input", "kind", "value", "chain"] {
        assert!(v.get(key).is_some(), "missing {key} in {v}");
    }
    assert_eq!(v["kind"], "term");
    assert_eq!(v["value"], "v[w]*v[17]+v[17]");

    let inf = json(&["lh2", "v[w]"]);
    assert_eq!(inf["kind"], "infinity");
    assert_eq!(inf["infinity"], true);
    assert!(inf.get("value").is_none());

    let lim = json(&["pred2", "v[w]"]);
    assert_eq!(lim["kind"], "limit");
    assert_eq!(lim["scheme"], "upsilon_chain");

    let seq = json(&["succ2", "v[w]", "-n", "2"]);
    assert_eq!(seq["values"], serde_json::json!(["v[w]", "v[w]*2"]));

    let err = r2wb(&["--json", "norm", "w+"]);
    let e: Value = serde_json::from_slice(&err.stderr).unwrap();
    assert_eq!(e["exit"], 2);
}

#[test]
fn substructure_lists_relations() {
    let o = stdout(&r2wb(&["substructure", "w", "w+1", "w*2"]));
    let lines: Vec<&str> = o.lines().collect();
    assert_eq!(lines[0], "w w+1 w*2");
    assert!(lines.contains(&"w <=1 w+1"));
    assert!(!lines.contains(&"w <=1 w*2"));
}

#[test]
fn randomized_verbs_are_deterministic() {
    let a = stdout(&r2wb(&["--seed", "3", "verify", "r1", "--samples", "50"]));
    let b = stdout(&r2wb(&["--seed", "3", "verify", "r1", "--samples", "50"]));
    assert_eq!(a, b);
    assert!(a.starts_with("r1: checked=50 failures=0"));
}
