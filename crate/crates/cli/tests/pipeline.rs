use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn lingctl(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_lingctl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn lingctl");
    assert!(
        out.status.success(),
        "lingctl {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn pipeline(dir: &Path) {
    let corpus = fixture("corpus.jsonl");
    let alpaca = fixture("alpaca100.jsonl");
    fs::write(dir.join("mock.json"), r#"{"kind": "constructive"}"#).unwrap();
    lingctl(
        dir,
        &[
            "extract",
            "--in",
            corpus.to_str().unwrap(),
            "--out",
            "feats.jsonl",
        ],
    );
    lingctl(
        dir,
        &["fit-stats", "--in", "feats.jsonl", "--out", "stats.json"],
    );
    lingctl(
        dir,
        &[
            "annotate",
            "--in",
            alpaca.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            "train.jsonl",
            "--holdout",
            "20",
            "--holdout-out",
            "test.jsonl",
        ],
    );
    lingctl(
        dir,
        &[
            "build-eval",
            "--in",
            "test.jsonl",
            "--stats",
            "stats.json",
            "--seed",
            "7",
            "--out",
            "eval.jsonl",
        ],
    );
    lingctl(
        dir,
        &[
            "--jobs",
            "4",
            "evaluate",
            "--tasks",
            "eval.jsonl",
            "--endpoint",
            "mock.json",
            "--out",
            "resp.jsonl",
        ],
    );
    lingctl(
        dir,
        &[
            "report",
            "--targets",
            "eval.jsonl",
            "--responses",
            "resp.jsonl",
            "--out",
            "report",
        ],
    );
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn full_pipeline_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    pipeline(a.path());
    pipeline(b.path());
    let (fa, fb) = (artifacts(a.path()), artifacts(b.path()));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for want in [
        "train.jsonl",
        "eval.jsonl",
        "resp.jsonl",
        "report/radar.json",
        "report/scores.csv",
    ] {
        assert!(names.contains(&want), "missing {want} in {names:?}");
    }
    assert_eq!(fa.len(), fb.len());
    for ((na, da), (nb, db)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        assert!(da == db, "{na} differs between runs");
    }
    let tasks = fs::read_to_string(a.path().join("eval.jsonl")).unwrap();
    assert_eq!(tasks.lines().count(), 20);
    let responses = fs::read_to_string(a.path().join("resp.jsonl")).unwrap();
    assert_eq!(responses.lines().count(), 100);
}

#[test]
fn extract_writes_one_line_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    fs::write(
        &input,
        "{\"id\": \"a\", \"text\": \"The cat sat.\"}\n{\"text\": \"Dogs bark loudly at night.\"}\n{\"id\": 3, \"text\": \"\"}\n",
    )
    .unwrap();
    lingctl(
        dir.path(),
        &["extract", "--in", "in.jsonl", "--out", "out.jsonl"],
    );
    let out = fs::read_to_string(dir.path().join("out.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["id"], "a");
    assert_eq!(lines[0]["features"]["t_word"], 3.0);
    assert_eq!(lines[1]["id"], "1");
    assert!(lines[2]["error"].is_string());
    assert!(dir.path().join("out.jsonl.manifest.json").exists());
}

#[test]
fn usage_and_runtime_errors_use_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_lingctl");
    let usage = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let missing = Command::new(bin)
        .current_dir(dir.path())
        .args(["fit-stats", "--in", "nope.jsonl", "--out", "s.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert!(err["error"].is_string());
}
