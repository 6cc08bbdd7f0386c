use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn ltlzinc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlzinc"))
        .args(args)
        .env_remove("LTLZINC_CACHE_DIR")
        .output()
        .expect("run ltlzinc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sha256(path: &Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_reports_minimal_state_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (task, n) in [("task1", 8), ("task6", 4)] {
        let o = ltlzinc(&["compile", task, "-o", arg(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains(&format!("states: {n}\n")), "{}", stdout(&o));
        assert!(dir.path().join(format!("{task}.dfa.json")).exists());
    }
}

#[test]
fn malformed_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.yaml");
    std::fs::write(&spec, "name: bad\nformula: [unclosed\n").unwrap();
    let o = ltlzinc(&["compile", arg(&spec)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = ltlzinc(&["compile", "no-such-task"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generation_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = ltlzinc(&[
            "generate", "task2", "-o", arg(d.path()), "--seed", "7", "--train", "30", "--val", "10", "--test", "10",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(sha256(&a.path().join("task2.csv")), sha256(&b.path().join("task2.csv")));

    let o = ltlzinc(&[
        "generate", "task2", "-o", arg(a.path()), "--seed", "8", "--train", "30", "--val", "10", "--test", "10",
    ]);
    assert!(o.status.success());
    assert_ne!(sha256(&a.path().join("task2.csv")), sha256(&b.path().join("task2.csv")));
}

#[test]
fn positive_ratio_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = ltlzinc(&[
        "generate", "task1", "-o", arg(dir.path()), "--positive-ratio", "0.9", "--train", "320", "--val", "10",
        "--test", "10",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("train: 320 sequences, 288 positive"), "{}", stdout(&o));

    let mut reader = csv::Reader::from_path(dir.path().join("task1.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (split, t, label) = (col("split"), col("t"), col("seq_label"));
    let positives = reader
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[split] == "train" && &r[t] == "0" && &r[label] == "1")
        .count();
    assert_eq!(positives, 288);
}

#[test]
fn perfect_oracle_inference() {
    let dir = tempfile::tempdir().unwrap();
    let out = arg(dir.path());
    let o = ltlzinc(&["generate", "task3", "-o", out, "--train", "20", "--val", "20", "--test", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let data = dir.path().join("task3.csv");
    for engine in ["exact", "fuzzy-p", "sddnnf-lp"] {
        let o = ltlzinc(&["infer", arg(&data), "--engine", engine, "--verify", "-o", out]);
        assert!(o.status.success(), "{}", stderr(&o));
        let json: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join(format!("task3_{engine}_test_metrics.json"))).unwrap())
                .unwrap();
        let m = &json["evaluation"]["metrics"];
        for key in ["cc_acc", "nsp_acc", "sc_acc", "avg_acc"] {
            assert_eq!(m[key], 1.0, "{engine} {key}");
        }
    }

    let o = ltlzinc(&["infer", arg(&data), "--engine", "magic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exact, fuzzy-p, fuzzy-lp, sddnnf-p, sddnnf-lp"), "{}", stderr(&o));

    let o = ltlzinc(&["infer", arg(&data), "--engine", "exact", "--task", "task4", "-o", out]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = ltlzinc(&["generate", "task6", "-o", arg(dir.path()), "--train", "10", "--val", "10", "--test", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ltlzinc(&[
        "sweep",
        arg(&dir.path().join("task6.csv")),
        "--p-list",
        "0,0.1",
        "--seeds",
        "3",
        "--jobs",
        "2",
        "-o",
        arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let csv_path = dir.path().join("task6_sweep.csv");
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    // 2 targets x (perfect + flip + confidence) x 2 engines x 3 seeds
    assert_eq!(rows.len(), 2 * 3 * 2 * 3);

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("task6_summary.json")).unwrap()).unwrap();
    let groups = summary.as_array().unwrap();
    assert_eq!(groups.len(), 2 * 3 * 2);
    assert!(groups.iter().all(|g| g["seeds"] == 3));

    let o = ltlzinc(&["report", arg(&csv_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, summary);
}

#[test]
fn baseline_prints_both_values() {
    let o = ltlzinc(&["baseline", "task6", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("mp_successor") && s.contains("mp_sequence"), "{s}");
}

#[test]
fn help_and_missing_arguments() {
    assert_eq!(ltlzinc(&["--help"]).status.code(), Some(0));
    assert_eq!(ltlzinc(&["infer"]).status.code(), Some(2));
    assert_eq!(ltlzinc(&["frobnicate"]).status.code(), Some(2));
}
