//! Golden tests for the command line surface: byte-stable stdout, exit
//! codes, and the file-emitting paths.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).unwrap()
}

#[test]
fn cascade_stdout_is_byte_stable() {
    let t1 = fixture("demo.iim");
    let out = run(&["cascade", "--system", &t1, "--fail", "a2,a3"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "t=0: a2 a3\nt=1: b2 b3 b4\nt=2: a1\nt=3: b1\nfixed point: t=3\nfailed: 7 of 7\n"
    );

    let out = run(&[
        "cascade", "--system", &t1, "--fail", "a2,a3", "--harden", "a2",
    ]);
    assert_eq!(
        stdout(&out),
        "t=0: a3\nt=1: b4\nfixed point: t=1\nfailed: 2 of 7\n"
    );
}

#[test]
fn solve_outputs_are_byte_stable() {
    let t1 = fixture("demo.iim");
    let out = run(&["solve-enh", "--system", &t1, "--fail", "a2,a3", "--k", "1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "method: exact\nhardened (1): a2\nbaseline failed: 7\nfailed with plan: 2\nprotected: 5\n"
    );

    let out = run(&[
        "solve-teh",
        "--system",
        &t1,
        "--fail",
        "a2,a3",
        "--protect",
        "b4",
        "--method",
        "heuristic",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "method: heuristic\nhardened (1): a3\nbaseline failed: 7\nfailed with plan: 5\nprotected: 2\n"
    );

    // An empty protect list is a valid instance with an empty answer.
    let out = run(&[
        "solve-teh",
        "--system",
        &t1,
        "--fail",
        "a2,a3",
        "--protect",
        "",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "method: exact\nhardened (0):\nbaseline failed: 7\nfailed with plan: 7\nprotected: 0\n"
    );
}

#[test]
fn set_queries_are_byte_stable() {
    let t1 = fixture("demo.iim");
    let out = run(&["killset", "--system", &t1, "--fail", "a2,a3"]);
    assert_eq!(stdout(&out), "kill set (7): a1 a2 a3 b1 b2 b3 b4\n");

    let out = run(&[
        "protset", "--system", &t1, "--fail", "a2,a3", "--entity", "a3",
    ]);
    assert_eq!(stdout(&out), "protection set of a3 (2): a3 b4\n");

    let out = run(&["vulnerable", "--system", &t1, "--K", "2"]);
    assert_eq!(
        stdout(&out),
        "seeds (2): a1 a3\nkills: 7 of 7\nexhaustive: yes\n"
    );
}

#[test]
fn lp_export_is_deterministic() {
    let t1 = fixture("demo.iim");
    let args = ["export-lp", "--system", &t1, "--fail", "a2,a3", "--k", "1"];
    let first = run(&args);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(text.starts_with("Minimize\n"));
    assert!(text.contains("\nSubject To\n"));
    assert!(text.contains("\nBinary\n"));
    assert!(text.ends_with("End\n"));
    assert_eq!(text, stdout(&run(&args)));

    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("out.lp");
    let out = run(&[
        "export-lp",
        "--system",
        &t1,
        "--fail",
        "a2,a3",
        "--protect",
        "b4",
        "--out",
        lp.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "");
    let written = std::fs::read_to_string(&lp).unwrap();
    assert!(written.starts_with("Minimize\n") && written.ends_with("End\n"));
}

#[test]
fn power_rules_from_topology() {
    let out = run(&["gen", "power", "--topology", &fixture("nine_bus.json")]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "G1\nG2\nG3\n\
         L1 <- G1 T1\n\
         L2 <- L1 T2 + N2 T7\n\
         L3 <- L1 T3 + N1 T4\n\
         L4 <- N1 T6 + N2 T8\n\
         N1 <- G3 T5\n\
         N2 <- G2 T9\n\
         T1\nT2\nT3\nT4\nT5\nT6\nT7\nT8\nT9\n"
    );
}

#[test]
fn geo_rules_from_assets() {
    let assets = r#"[
        {"label": "g1", "kind": "generator", "x": 0.0, "y": 0.0},
        {"label": "g2", "kind": "generator", "x": 10.0, "y": 0.0},
        {"label": "t1", "kind": "cell_tower", "x": 2.0, "y": 0.0},
        {"label": "t2", "kind": "cell_tower", "x": 9.0, "y": 0.0},
        {"label": "f1", "kind": "fiber_lit_building", "x": 0.0, "y": 5.0},
        {"label": "f2", "kind": "fiber_lit_building", "x": 10.0, "y": 4.0},
        {"label": "tlA", "kind": "transmission_line", "from": "g1", "to": "t1"},
        {"label": "tlB", "kind": "transmission_line", "from": "g1", "to": "f1"},
        {"label": "tlC", "kind": "transmission_line", "from": "g2", "to": "t2"},
        {"label": "flA", "kind": "fiber_link", "from": "f1", "to": "g1"},
        {"label": "flB", "kind": "fiber_link", "from": "f2", "to": "g2"}
    ]"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("assets.json");
    std::fs::write(&path, assets).unwrap();

    let out = run(&["gen", "geo", "--assets", path.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "f1 <- g1 tlB + g2 tlC\n\
         f2 <- g1 tlA + g2 tlC\n\
         flA <- g1 tlB + g2 tlC\n\
         flB\n\
         g1 <- f1 flA + t1\n\
         g2 <- f2 flB + t2\n\
         t1 <- g1 tlA + g2 tlC\n\
         t2 <- g1 tlA + g2 tlC\n\
         tlA\ntlB\ntlC\n"
    );

    // A lower length threshold promotes the short link into a consumer.
    let out = run(&[
        "gen",
        "geo",
        "--assets",
        path.to_str().unwrap(),
        "--long-threshold",
        "0",
    ]);
    assert!(stdout(&out).contains("flB <- g1 tlA + g2 tlC\n"));
}

#[test]
fn random_generation_is_seeded() {
    let args = [
        "gen", "random", "--class", "general", "--n", "25", "--seed", "11",
    ];
    let first = run(&args);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&run(&args)));

    let other = run(&[
        "gen", "random", "--class", "general", "--n", "25", "--seed", "12",
    ]);
    assert_ne!(stdout(&first), stdout(&other));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.iim");
    let out = run(&[
        "gen",
        "random",
        "--class",
        "case1",
        "--n",
        "8",
        "--seed",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "");
    assert!(std::fs::read_to_string(&path).unwrap().contains("e000"));
}

#[test]
fn bench_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("demo.iim"), dir.path().join("demo.iim")).unwrap();
    let spec = r#"{
        "dataset": "t1",
        "system": "demo.iim",
        "mode": "enh",
        "seed_selection": {"strategy": "explicit", "labels": ["a2", "a3"]},
        "sweeps": [1, 2],
        "methods": ["exact", "heuristic"],
        "rng_seed": 1
    }"#;
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, spec).unwrap();
    let csv_path = dir.path().join("grid.csv");
    let report_path = dir.path().join("report.json");

    let out = run(&[
        "bench",
        "--spec",
        spec_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,mode,method,sweep,quality,seconds"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let heads: Vec<Vec<&str>> = rows.iter().map(|r| r[..5].to_vec()).collect();
    assert_eq!(
        heads,
        [
            ["t1", "enh", "exact", "1", "5"],
            ["t1", "enh", "heuristic", "1", "5"],
            ["t1", "enh", "exact", "2", "7"],
            ["t1", "enh", "heuristic", "2", "7"],
        ]
    );
    for row in &rows {
        assert!(row[5].parse::<f64>().is_ok(), "seconds column: {row:?}");
    }

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["metadata"]["dataset"], "t1");
    assert_eq!(
        report["metadata"]["seed_entities"],
        serde_json::json!(["a2", "a3"])
    );
    assert_eq!(report["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let t1 = fixture("demo.iim");

    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());

    let out = run(&["solve-enh", "--system", &t1, "--fail", "a2,zz", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown entity `zz`"));

    let out = run(&["cascade", "--system", "/no/such/file.iim", "--fail", "a1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/no/such/file.iim"));

    let out = run(&[
        "export-lp",
        "--system",
        &t1,
        "--fail",
        "a2",
        "--k",
        "1",
        "--protect",
        "b4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("exactly one of"));

    let out = run(&["solve-enh", "--system", &t1, "--fail", "a2"]);
    assert_eq!(out.status.code(), Some(1), "missing --k is a usage error");

    // A dense system whose kill set admits too many candidate subsets makes
    // the exhaustive solver refuse rather than hang.
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.iim");
    let out = run(&[
        "gen",
        "random",
        "--class",
        "general",
        "--n",
        "60",
        "--seed",
        "3",
        "--idr-prob",
        "1.0",
        "--max-minterms",
        "1",
        "--out",
        big.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let seeds: Vec<String> = (0..25).map(|i| format!("e{i:03}")).collect();
    let out = run(&[
        "solve-enh",
        "--system",
        big.to_str().unwrap(),
        "--fail",
        &seeds.join(","),
        "--k",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("exceeds cap"));
}
