use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn tag5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tag5"))
        .args(args)
        .env_remove("TAG5_FRONTIER_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    for g in ["g1.json", "g2.json", "g3.json", "g4.json", "g5.json"] {
        let o = tag5(&["validate", path(&fixture(g))]);
        assert_eq!(code(&o), 0, "{g}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("OK"));
    }
    let o = tag5(&["validate", path(&fixture("invalid_two_wrapping.json"))]);
    assert_eq!(code(&o), 1);
    assert!(!stdout(&o).contains("OK"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&tag5(&["validate", path(&bad)])), 2);
    assert_eq!(code(&tag5(&["validate", path(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn recognize_g1() {
    let g1 = fixture("g1.json");
    for (input, verdict, exit) in [("abcd", "ACCEPT", 0), ("aabbccdd", "ACCEPT", 0), ("abcda", "REJECT", 1)] {
        for engine in ["restricted", "baseline"] {
            let o = tag5(&["recognize", path(&g1), input, "--chars", "--engine", engine]);
            assert_eq!(code(&o), exit, "{input} {engine}");
            assert_eq!(stdout(&o).lines().next(), Some(verdict));
        }
    }
    let o = tag5(&["recognize", path(&g1), "a,a,b,b,c,c,d,d", "--tokens", ",", "--stats"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("rule applications"));

    let o = tag5(&["recognize", path(&g1), "a b x d"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains('x'));
}

#[test]
fn restricted_engine_refuses_invalid_grammar() {
    let bad = fixture("invalid_two_wrapping.json");
    let o = tag5(&["recognize", path(&bad), "abcd", "--chars"]);
    assert_eq!(code(&o), 2);
    let o = tag5(&["recognize", path(&bad), "abcd", "--chars", "--engine", "baseline"]);
    assert_ne!(code(&o), 2);
}

#[test]
fn transform_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g1.json");
    let o = tag5(&["transform", path(&fixture("g1.json")), path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let got: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/g1_transformed.json");
    let want: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(golden).unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn transform_side_trees_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g2.json");
    let o = tag5(&["transform", path(&fixture("g2.json")), path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let names: Vec<&str> = v["trees"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["kind"] == "auxiliary")
        .map(|t| t["name"].as_str().unwrap())
        .collect();
    assert!(!names.is_empty());
    assert!(
        names.iter().all(|n| n.ends_with(".L") || n.ends_with(".R")),
        "{names:?}"
    );
}

#[test]
fn transform_invalid_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = tag5(&["transform", path(&fixture("invalid_left_wrapping.json")), path(&out)]);
    assert_eq!(code(&o), 1);
    assert!(!stderr(&o).is_empty());
    assert!(!out.exists());
}

#[test]
fn compare_reports_no_differences() {
    for (g, len) in [("g1.json", "8"), ("g2.json", "6")] {
        let o = tag5(&["compare", path(&fixture(g)), "--max-len", len]);
        assert_eq!(code(&o), 0, "{g}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("no differences"));
    }
    let o = tag5(&["compare", path(&fixture("g1.json")), "--max-len", "13"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn compare_honours_frontier_cap() {
    let o = Command::new(env!("CARGO_BIN_EXE_tag5"))
        .args(["compare", path(&fixture("g2.json")), "--max-len", "6"])
        .env("TAG5_FRONTIER_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(!stderr(&o).is_empty());
}

#[test]
fn bench_csv_and_slopes() {
    let o = tag5(&["bench", path(&fixture("g1.json")), "--lengths", "4,8,12,16"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let report = tag5::bench::ScalingReport::from_csv(&text).unwrap();
    assert_eq!(report.rows.len(), 8);
    let err = stderr(&o);
    assert_eq!(err.lines().filter(|l| l.starts_with("slope ")).count(), 2);
    assert!(!err.contains("n/a"));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = tag5(&[
        "bench",
        path(&fixture("g1.json")),
        "--lengths",
        "8",
        "--csv",
        path(&csv),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("n/a"));
    let report = tag5::bench::ScalingReport::from_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 2);

    // not a multiple of four: no string of this length in the language
    let o = tag5(&["bench", path(&fixture("g1.json")), "--lengths", "6"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_with_stacking_builder() {
    let o = tag5(&[
        "bench",
        path(&fixture("g2.json")),
        "--lengths",
        "3,5,7",
        "--builder",
        "stack:ℓ,s,r",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}
