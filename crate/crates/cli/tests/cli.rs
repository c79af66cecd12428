use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qsimplex"));
    c.env_remove("QSIMPLEX_SEED");
    c
}

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_toy_matches_classical() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let trace = dir.path().join("trace.csv");
    let toy = instance("toy.json");
    let o = run(&[
        "solve",
        "--instance",
        toy.to_str().unwrap(),
        "--out-summary",
        summary.to_str().unwrap(),
        "--out-trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["schema_version"], 1);
    assert_eq!(s["status"], "optimal");
    let obj = s["objective"].as_f64().unwrap();
    assert!((obj - s["classical_objective"].as_f64().unwrap()).abs() < 1e-9);
    assert!((obj + 2.0).abs() < 1e-9);

    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("iteration,basis,objective,outcome,entering,leaving_row,kappa"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].contains(",pivot,") && rows[2].contains(",optimal,"));
    assert!(rows.iter().all(|r| r.contains(",pass,")));
}

#[test]
fn sampling_trace_is_deterministic_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let toy = instance("toy.json");
    let traces: Vec<String> = (0..2)
        .map(|i| {
            let trace = dir.path().join(format!("trace{i}.csv"));
            let o = bin()
                .args(["solve", "--instance", toy.to_str().unwrap(), "--mode", "sampling", "--repetitions", "3"])
                .args(["--out-trace", trace.to_str().unwrap()])
                .env("QSIMPLEX_SEED", "99")
                .output()
                .unwrap();
            assert!(o.status.success(), "{}", stderr(&o));
            fs::read_to_string(trace).unwrap()
        })
        .collect();
    assert_eq!(traces[0], traces[1]);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"m\": 1,\n \"n\": }").unwrap();
    let o = run(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column"), "{}", stderr(&o));
}

#[test]
fn infeasible_start_exits_1() {
    let o = run(&["solve", "--instance", instance("toy.json").to_str().unwrap(), "--basis", "0"]);
    assert_eq!(o.status.code(), Some(2), "wrong-size basis is a usage error");
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("neg.json");
    fs::write(&lp, r#"{"m": 1, "n": 2, "A": {"cols": [[[0, 1.0]], [[0, 1.0]]]}, "b": [-1.0], "c": [1.0, 0.0]}"#).unwrap();
    let o = run(&["solve", "--instance", lp.to_str().unwrap(), "--basis", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no feasible starting basis"));
}

#[test]
fn epsilon_out_of_range_is_rejected() {
    for cmd in [vec!["verify"], vec!["solve", "--instance", instance("toy.json").to_str().unwrap()]] {
        let o = bin().args(&cmd).args(["--epsilon", "0.6"]).output().unwrap();
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("epsilon"));
    }
}

#[test]
fn classical_reports_unbounded_and_optimal() {
    let o = run(&["classical", "--instance", instance("unbounded.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("status: unbounded (column 0)"));

    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("s.json");
    let o = run(&[
        "classical",
        "--instance",
        instance("production.mps").to_str().unwrap(),
        "--rule",
        "bland",
        "--out-summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("objective: -2.20000000000e1"), "{}", stdout(&o));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert!(s["pivots"].as_u64().unwrap() <= s["iteration_cap"].as_u64().unwrap());
}

#[test]
fn quantum_solve_reports_unbounded() {
    let o = run(&["solve", "--instance", instance("unbounded.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("unbounded (column 0)"));
}

#[test]
fn analyze_report_round_trips_and_lists_split_costs() {
    let dir = tempfile::tempdir().unwrap();
    // identity basis, n/m = 4 above the threshold 2κd²/d_c ≈ 2
    let lp = dir.path().join("wide.json");
    fs::write(
        &lp,
        r#"{"m": 1, "n": 4, "A": {"cols": [[[0, 1.0]], [[0, 1.0]], [[0, 1.0]], [[0, 1.0]]]}, "b": [1.0], "c": [-1.0, -2.0, 0.5, 1.0]}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["analyze", "--instance", lp.to_str().unwrap(), "--basis", "0", "--out-report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    let parsed: qsimplex_core::cost::CostReport = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text);
    assert!((parsed.mu_basis - 1.0).abs() < 1e-3);
    assert_eq!(parsed.split_blocks, Some(3));
    for name in ["quantum_pricing", "quantum_pricing_split", "quantum_pricing_blocked"] {
        assert!(parsed.formula(name).and_then(|f| f.value).is_some(), "{name}");
    }
}

#[test]
fn analyze_includes_measured_counters_from_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let toy = instance("toy.json");
    assert!(run(&["solve", "--instance", toy.to_str().unwrap(), "--out-trace", trace.to_str().unwrap()]).status.success());
    let report = dir.path().join("r.json");
    let o = run(&["analyze", "--instance", toy.to_str().unwrap(), "--trace", trace.to_str().unwrap(), "--out-report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert!(r["measured"]["grover_iterations"].as_u64().is_some());
    assert!(r["measured"]["qlsa_invocations"].as_u64().unwrap() > 0);
}

#[test]
fn analyze_missing_instance_exits_2() {
    let o = run(&["analyze", "--instance", "/nonexistent/lp.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_detects_broken_threshold() {
    let o = run(&["verify", "--criteria", "1,10"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("criterion  1 phase-estimation accuracy: PASS"));

    let o = run(&["verify", "--criteria", "2", "--nfn-threshold-offset", "0.05"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("criterion  2 NFN/NFP sign estimation: FAIL"));
    assert!(out.contains("[FAIL] eps = 0.05: Pr(NFN=1 | a >= -eps)"));
    assert!(out.contains("counterexample seed:"));
}
