use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtm_core::ingest::{parse_events, to_edge_list};
use mtm_core::sample::{messaging_stream, MessagingParams};
use tempfile::TempDir;

fn mtm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtm"))
        .args(args)
        .env_remove("MTM_WORKERS")
        .output()
        .expect("mtm runs")
}

fn ok(args: &[&str]) -> String {
    let out = mtm(args);
    assert!(
        out.status.success(),
        "mtm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TOY: &str = "# b c a as 1 2 0\n1 2 1\n2 0 4\n1 0 5\n0 2 7\n0 1 8\n0 1 9\n";

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn demo(dir: &TempDir) -> PathBuf {
    let g = messaging_stream(
        &MessagingParams {
            nodes: 80,
            sessions: 300,
            horizon: 5 * 86_400,
            ..Default::default()
        },
        1,
    );
    write(dir, "demo.txt", &to_edge_list(&g))
}

#[test]
fn spectrum_lists_codes() {
    let out = ok(&["spectrum", "--l", "3"]);
    assert_eq!(out.lines().count(), 60);
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["spectrum", "--l", "4", "--format", "json"])).unwrap();
    assert_eq!(json["size"], 888);
    assert_eq!(json["transition_types"], 954);
}

#[test]
fn extract_reports_toy_summary() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "toy.txt", TOY);
    let profile = dir.path().join("p.json");
    let out = ok(&[
        "extract",
        s(&input),
        "--lmax",
        "3",
        "--delta",
        "5",
        "--out",
        s(&profile),
    ]);
    assert!(out.contains("cold events       2"), "{out}");
    assert!(out.contains("mu                2.5000"), "{out}");
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&profile).unwrap()).unwrap();
    assert_eq!(doc["cold_event_count"], 2);
}

#[test]
fn argument_and_input_errors_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "toy.txt", TOY);
    let profile = dir.path().join("p.json");
    assert!(
        !mtm(&["extract", s(&input), "--lmax", "1", "--out", s(&profile)])
            .status
            .success()
    );
    assert!(!profile.exists());
    let bad = write(&dir, "bad.txt", "1 2\n");
    let out = mtm(&["extract", s(&bad), "--out", s(&profile)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert!(!mtm(&["stats", s(&dir.path().join("missing.txt"))])
        .status
        .success());
    assert!(!mtm(&["count", s(&input), "--l", "5"]).status.success());
}

#[test]
fn generate_is_reproducible_and_records_seed() {
    let dir = TempDir::new().unwrap();
    let input = demo(&dir);
    let profile = dir.path().join("p.json");
    ok(&["extract", s(&input), "--out", s(&profile)]);
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    ok(&[
        "generate",
        "--profile",
        s(&profile),
        "--seed",
        "7",
        "--out",
        s(&a),
    ]);
    ok(&[
        "generate",
        "--profile",
        s(&profile),
        "--seed",
        "7",
        "--out",
        s(&b),
    ]);
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# mtm generate seed=7 "));
    assert!(!parse_events(&text).unwrap().graph.is_empty());
}

#[test]
fn generate_runs_writes_distinct_files() {
    let dir = TempDir::new().unwrap();
    let input = demo(&dir);
    let profile = dir.path().join("p.json");
    ok(&["extract", s(&input), "--out", s(&profile)]);
    let out = dir.path().join("syn.txt");
    let log = ok(&[
        "generate",
        "--profile",
        s(&profile),
        "--seed",
        "100",
        "--runs",
        "10",
        "--out",
        s(&out),
    ]);
    assert_eq!(log.lines().count(), 10);
    let bodies: Vec<String> = (0..10)
        .map(|i| fs::read_to_string(dir.path().join(format!("syn_{i}.txt"))).unwrap())
        .collect();
    for (i, body) in bodies.iter().enumerate() {
        assert!(body.starts_with(&format!("# mtm generate seed={} ", 100 + i)));
    }
    let mut unique = bodies.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), 10);

    // run 3 of the batch equals a single run with seed 103
    let single = dir.path().join("single.txt");
    ok(&[
        "generate",
        "--profile",
        s(&profile),
        "--seed",
        "103",
        "--out",
        s(&single),
    ]);
    assert_eq!(fs::read_to_string(single).unwrap(), bodies[3]);
}

#[test]
fn stop_only_profile_generates_cold_events_only() {
    let dir = TempDir::new().unwrap();
    // no two events within delta of each other, so every process stops at once
    let text: String = (0..40)
        .map(|i| format!("{} {} {}\n", i % 7, (i % 7) + 1 + i % 3, i * 100))
        .collect();
    let input = write(&dir, "sparse.txt", &text);
    let profile = dir.path().join("p.json");
    let summary = ok(&["extract", s(&input), "--delta", "50", "--out", s(&profile)]);
    assert!(summary.contains("cold fraction     1.0000"), "{summary}");
    let out = dir.path().join("o.txt");
    ok(&[
        "generate",
        "--profile",
        s(&profile),
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    let generated = parse_events(&fs::read_to_string(&out).unwrap())
        .unwrap()
        .graph;
    let original = parse_events(&text).unwrap().graph;
    let times = |g: &mtm_core::TemporalGraph| g.events().iter().map(|e| e.t).collect::<Vec<_>>();
    assert_eq!(times(&generated), times(&original));
}

#[test]
fn count_json_and_csv() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pair.txt", "0 1 1\n1 0 2\n0 1 40\n");
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["count", s(&input), "--l", "2", "--delta-c", "10"])).unwrap();
    assert_eq!(json["total"], 1);
    assert_eq!(json["counts"]["0110"], 1);
    let csv = ok(&[
        "count",
        s(&input),
        "--l",
        "2",
        "--delta-c",
        "38",
        "--format",
        "csv",
    ]);
    assert_eq!(csv, "code,count\n0110,2\n");
    let csv = ok(&[
        "count",
        s(&input),
        "--l",
        "2",
        "--delta-c",
        "38",
        "--delta-c-inclusive",
        "false",
        "--format",
        "csv",
    ]);
    assert_eq!(csv, "code,count\n0110,1\n");
}

#[test]
fn stats_prints_global_statistics() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "g.txt", "1 2 0\n2 1 5\n");
    let json: serde_json::Value = serde_json::from_str(&ok(&["stats", s(&input)])).unwrap();
    assert_eq!(json["edge_count"], 2);
    assert_eq!(json["timespan_seconds"], 5);
    assert_eq!(json["n_components"], 1);
    let csv = ok(&["stats", s(&input), "--format", "csv"]);
    assert!(csv.starts_with("metric,value\nedge_count,2\n"));
}

#[test]
fn compare_self_is_exact_and_globs_expand() {
    let dir = TempDir::new().unwrap();
    let input = demo(&dir);
    fs::copy(&input, dir.path().join("copy_0.txt")).unwrap();
    fs::copy(&input, dir.path().join("copy_1.txt")).unwrap();
    let pattern = dir.path().join("copy_*.txt");
    let report_path = dir.path().join("report.json");
    let table = ok(&[
        "compare",
        s(&input),
        s(&pattern),
        "--l-set",
        "2,3",
        "--windows",
        "4",
        "--out",
        s(&report_path),
    ]);
    assert!(table.contains("2 synthetic graph(s)"), "{table}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["runs"], 2);
    for m in report["global"].as_array().unwrap() {
        assert_eq!(m["ratio"], 1.0, "{m}");
    }
    for k in report["ks"].as_array().unwrap() {
        assert_eq!(k["mean"], 0.0);
    }
    for sp in report["spectra"].as_array().unwrap() {
        assert_eq!(sp["msre_total"], 0.0);
    }

    let csv_dir = dir.path().join("tables");
    ok(&[
        "compare",
        s(&input),
        s(&pattern),
        "--format",
        "csv",
        "--out",
        s(&csv_dir),
    ]);
    for name in ["ratios", "ks", "msre", "windows"] {
        assert!(csv_dir.join(format!("{name}.csv")).is_file());
    }
}

#[test]
fn compare_without_synthetics_fails() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "g.txt", "1 2 0\n2 1 5\n");
    let missing = dir.path().join("nothing_*.txt");
    let out = mtm(&["compare", s(&input), s(&missing)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no synthetic files"));
}

#[test]
fn worker_override_from_environment() {
    let dir = TempDir::new().unwrap();
    let input = demo(&dir);
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_mtm"))
            .args(["count", s(&input), "--l", "3"])
            .env("MTM_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
}
