use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nipgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is one JSON object");
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn score_reports_exact_and_closed_form() {
    let o = run(&["score", "--family", "hypercube", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["method"], "RandomWalk");
    assert!((lines[0]["nip"].as_f64().unwrap() - 2.0 / 81.0).abs() < 1e-15);
    assert_eq!(lines[1]["method"], "Asymptotic");
    assert!(lines[1]["ln_nip"].is_number());

    let o = run(&["score", "--family", "complete", "--n", "4"]);
    let first: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert!((first["nip"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-15);
}

#[test]
fn score_expected_mode_for_random_family() {
    let o = run(&["score", "--family", "er", "--n", "32", "--samples", "4", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let last: Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(last["samples"], 4);
}

#[test]
fn usage_errors_exit_2() {
    let o = run(&["score", "--family", "hypercube", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "NonPowerOfTwo");

    let o = run(&["mask", "--pattern", "hypercube", "--n", "1000", "--b", "16"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "IndivisibleBlock");

    let o = run(&["verify", "--theorem", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["score", "--n", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "Usage");

    let o = run(&["sweep", "--n-min", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.txt");
    fs::write(&path, "nipgraph v1 4 0\n0 1\n2 3\n").unwrap();
    let o = run(&["score", "--edges", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_kind(&o), "Disconnected");
}

#[test]
fn edge_list_round_trip_through_score() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("cube.txt");
    let o = run(&["score", "--family", "hypercube", "--n", "16", "--save-edges", saved.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o2 = run(&["score", "--edges", saved.to_str().unwrap()]);
    let a: Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    let b: Value = serde_json::from_str(stdout(&o2).lines().next().unwrap()).unwrap();
    assert_eq!(a["ln_nip"], b["ln_nip"]);
}

#[test]
fn mask_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<Vec<u8>> = ["a.nipm", "b.nipm"]
        .iter()
        .map(|name| {
            let path = dir.path().join(name);
            let o = run(&[
                "mask", "--pattern", "bigbird", "--n", "1024", "--b", "16", "--seed", "7", "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);
    assert_eq!(&files[0][..4], b"NIPM");

    let path = dir.path().join("cube.nipm");
    let o = run(&[
        "mask", "--pattern", "hypercube", "--n", "1024", "--b", "16", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["blocks"], 448);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cube.json")).unwrap()).unwrap();
    assert_eq!(sidecar["count"], 448);
    assert_eq!(fs::read(&path).unwrap().len(), 28 + 8 * 448);
}

#[test]
fn map_emits_code_table() {
    let values = |n: &str| -> Vec<String> {
        let o = run(&["map", "--n", n]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().to_string())
            .collect()
    };
    assert_eq!(values("2"), ["0", "1"]);
    assert_eq!(values("4"), ["0", "2", "3", "1"]);
    assert_eq!(values("8"), ["0", "4", "6", "2", "3", "7", "5", "1"]);
    let o = run(&["map", "--n", "8"]);
    assert!(stdout(&o).starts_with("index,code_binary,code_value,neighbor_indices\n0,000,0,1;3;7\n"));
}

#[test]
fn verify_suites_pass() {
    let o = run(&["verify", "--theorem", "1", "--max-n", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS, 0 failures"));
    let o = run(&["verify", "--theorem", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS, 8/8"));
}

#[test]
fn sweep_ratios() {
    let o = run(&["sweep", "--family", "hypercube", "--n-min", "8", "--n-max", "2048"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    let last: f64 = rows[8][6].parse().unwrap();
    assert!((last - 4.85).abs() / 4.85 < 0.01);

    let o = run(&["sweep", "--family", "complete", "--n-min", "8", "--n-max", "256"]);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert!(r.records().all(|row| &row.unwrap()[6] == "1.0"));

    let o = run(&["sweep", "--family", "longformer", "--w", "128", "--n-min", "2048", "--n-max", "2048"]);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let row = r.records().next().unwrap().unwrap();
    assert!((row[6].parse::<f64>().unwrap() - 0.125).abs() < 1e-12);
}

#[test]
fn sweep_exact_columns() {
    let o = run(&["sweep", "--family", "complete,star", "--n-min", "8", "--n-max", "16", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let complete = rows.iter().find(|row| &row[0] == "complete" && &row[1] == "8").unwrap();
    assert_eq!(&complete[10], "1.0");
    // Exact complete graph on 8 nodes: IP = 1/7, CC = 7.
    let nip: f64 = complete[8].parse().unwrap();
    assert!((nip - 1.0 / 49.0).abs() < 1e-15);
}

#[test]
fn ratio_flags_published_discrepancies() {
    let o = run(&["ratio", "--no-exact"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = |name: &str| text.lines().find(|l| l.starts_with(name)).unwrap().to_string();
    assert!(line("hypercube").contains("matches published"));
    assert!(line("longformer").contains("differs"));
    assert!(line("bigbird").contains("differs"));
}
