use std::process::{Command, Output};

use nielsen_core::pipeline::Evaluation;

fn nielsen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nielsen")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn square_report_agrees() {
    let o = nielsen(&["report", "--A", "1,0,0,1", "--B", "1,0,0,3", "--c1", "2", "--c2", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("case        II"));
    assert!(text.contains("MF          4"));
    assert!(text.contains("N(F)        4"));
    assert!(text.contains("circles     4"));
}

#[test]
fn identity_fiber_is_case_one() {
    let o = nielsen(&["report", "--A", "1,0,0,1", "--B", "1,0,0,1", "--c1", "5", "--c2", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let ev: Evaluation = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(ev.classification.unwrap().mf, Some(0.into()));
}

#[test]
fn exit_codes() {
    let o = nielsen(&["report", "--A", "2,0,0,1", "--B", "1,0,0,1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("det A = 2"));
    let o = nielsen(&["report", "--A", "-1,0,0,-1", "--B", "1,0,0,2", "--c1", "1"]);
    assert_eq!(o.status.code(), Some(4));
    let o = nielsen(&["classify", "--A", "-1,0,0,1", "--B", "1,0,0,2"]);
    assert_eq!(o.status.code(), Some(4));
    let o = nielsen(&["report", "--A", "1,0", "--B", "1,0,0,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(nielsen(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_report_round_trips() {
    for args in [
        ["report", "--A", "1,0,0,1", "--B", "1,0,0,3", "--c1", "-2", "--c2", "1"],
        ["report", "--A", "1,5,0,-1", "--B", "1,5,0,-1", "--c1", "1", "--c2", "-3"],
        ["report", "--A", "1,1,0,1", "--B", "1,0,0,1", "--c1", "99999999999999999999", "--c2", "0"],
    ] {
        let mut args = args.to_vec();
        args.extend(["--format", "json"]);
        let text = stdout(&nielsen(&args));
        let ev: Evaluation = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&ev).unwrap() + "\n", text);
    }
}

#[test]
fn sweeps() {
    let o = nielsen(&["sweep", "--family", "square", "--c1", "-3..3", "--b4", "-2,0,2,3", "--jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 28);
    let o = nielsen(&["sweep", "--family", "triangulated", "--c1", "-3..3", "--c2", "-3..3", "--jsonl"]);
    assert_eq!(o.status.code(), Some(0));
    for l in stdout(&o).lines() {
        let r: serde_json::Value = serde_json::from_str(l).unwrap();
        let expect = (2 * r["c1"].as_i64().unwrap() + r["c2"].as_i64().unwrap()).abs();
        assert_eq!(r["nielsen"].as_i64(), Some(expect));
        assert_eq!(r["circles"].as_i64(), Some(expect));
    }
    let o = nielsen(&["sweep", "--family", "square", "--c1", "3..2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn sweep_output_is_sorted() {
    let o = nielsen(&[
        "sweep", "--family", "case-two", "--c1", "2,-1", "--c2", "1,0", "--b3", "-2..2", "--b4", "3", "--jsonl",
    ]);
    let keys: Vec<(i64, i64, i64)> = stdout(&o)
        .lines()
        .map(|l| {
            let r: serde_json::Value = serde_json::from_str(l).unwrap();
            (r["c1"].as_i64().unwrap(), r["c2"].as_i64().unwrap(), r["b3"].as_i64().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys.len(), 20);
}

#[test]
fn dump_model_json() {
    let o = nielsen(&["dump-model", "--model", "square", "--c1", "1", "--b4", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let m: nielsen_core::cells::CellModel = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m, nielsen_core::cells::build_square_model(1, 0, 2));
    let o = nielsen(&["dump-model", "--model", "triangulated", "--c1", "1", "--c2", "1", "--derived"]);
    assert_eq!(o.status.code(), Some(0));
}
