use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use temposum_core::model::default_health_vocabulary;

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.csv")
}

fn temposum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_temposum"))
        .args(args)
        .env_remove("TEMPOSUM_VOCAB")
        .output()
        .expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    let g = golden();
    let g = g.to_str().unwrap();
    for args in [
        vec!["summarize"],
        vec!["summarize", "--input", g, "--alphabet", "30"],
        vec!["summarize", "--input", g, "--granularity", "day", "--tw-len", "5"],
        vec!["summarize", "--input", g, "--protoforms", "NoSuchType"],
        vec!["summarize", "--input", g, "--goal", "Calories~3"],
        vec!["summarize", "--input", g, "--templates", "/nonexistent/t.json"],
    ] {
        let out = temposum(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "Day,Calories\n1,lots\n").unwrap();
    let out = temposum(&["summarize", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("lots"));

    let g = golden();
    let out = temposum(&["summarize", "--input", g.to_str().unwrap(), "--attrs", "Protein"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("Protein"));

    let out = temposum(&["summarize", "--input", "/nonexistent/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn jsonl_lines_have_sorted_keys() {
    let g = golden();
    let out = temposum(&["summarize", "--input", g.to_str().unwrap(), "--protoforms", "StandardEvalTW"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let first = text.lines().next().unwrap();
    let keys = ["\"attributes\"", "\"metrics\"", "\"provenance_path\"", "\"text\"", "\"type\""];
    let pos: Vec<usize> = keys.iter().map(|k| first.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{first}");
    let rows = lines(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["type"] == "StandardEvalTW" && r["provenance_path"].is_null()));
}

#[test]
fn table_format_has_a_header() {
    let g = golden();
    let out = temposum(&[
        "summarize",
        "--input",
        g.to_str().unwrap(),
        "--protoforms",
        "StandardEvalSTW",
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("type") && rows[0].contains("T6") && rows[0].ends_with("text"));
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.starts_with("StandardEvalSTW")));
}

#[test]
fn provenance_files_and_svg() {
    let g = golden();
    let dir = tempfile::tempdir().unwrap();
    let prov = dir.path().join("charts/nested");
    let out_file = dir.path().join("out/summaries.jsonl");
    let out = temposum(&[
        "summarize",
        "--input",
        g.to_str().unwrap(),
        "--attrs",
        "Calories",
        "--protoforms",
        "StandardEvalTW,StandardEvalSTW",
        "--provenance-dir",
        prov.to_str().unwrap(),
        "--svg",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_file).unwrap();
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let first = PathBuf::from(rows[0]["provenance_path"].as_str().unwrap());
    assert_eq!(first.file_name().unwrap(), "0001-StandardEvalTW.json");
    let chart: Value = serde_json::from_str(&fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(chart["title"], rows[0]["text"]);
    assert!(prov.join("0002-StandardEvalSTW.json").is_file());
    assert!(prov.join("0001-StandardEvalTW.svg").is_file());
    assert!(prov.join("0002-StandardEvalSTW.svg").is_file());
}

fn cohort(dir: &Path, copies: usize) {
    let text = fs::read_to_string(golden()).unwrap();
    for i in 0..copies {
        fs::write(dir.join(format!("user{i}.csv")), &text).unwrap();
    }
}

#[test]
fn group_over_identical_users() {
    let dir = tempfile::tempdir().unwrap();
    cohort(dir.path(), 3);
    fs::write(dir.path().join("short.csv"), "Day,Calories,Carbohydrates\n1,2000,250\n2,2100,240\n").unwrap();
    let out = temposum(&[
        "group",
        "--cohort",
        dir.path().to_str().unwrap(),
        "--min-days",
        "14",
        "--protoforms",
        "StandardEvalSTW,StandardEvalTW",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("excluded short: 2 logged days"));
    let rows = lines(&out);
    assert!(!rows.is_empty());
    for r in &rows {
        let t = r["type"].as_str().unwrap();
        assert_eq!(t, "GroupPopulationEval");
        assert!(r["text"].as_str().unwrap().starts_with("All of the participants"), "{r}");
    }
}

#[test]
fn single_user_cohort_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    cohort(dir.path(), 1);
    let out = temposum(&["group", "--cohort", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let empty = tempfile::tempdir().unwrap();
    let out = temposum(&["group", "--cohort", empty.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vocabulary_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = dir.path().join("vocab.json");
    let out = Command::new(env!("CARGO_BIN_EXE_temposum"))
        .args(["summarize", "--input", "/nonexistent.csv"])
        .env("TEMPOSUM_VOCAB", &vocab)
        .output()
        .unwrap();
    // the missing vocabulary file is a configuration error, found before the data
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let mut v = default_health_vocabulary();
    v.attribute_phrases.insert("Calories".into(), "energy intake".into());
    fs::write(&vocab, v.to_json()).unwrap();
    let g = golden();
    let out = Command::new(env!("CARGO_BIN_EXE_temposum"))
        .args(["summarize", "--input", g.to_str().unwrap(), "--attrs", "Calories", "--protoforms", "StandardEvalTW"])
        .env("TEMPOSUM_VOCAB", &vocab)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = lines(&out);
    assert!(rows[0]["text"].as_str().unwrap().contains("your energy intake"), "{}", rows[0]["text"]);
}
