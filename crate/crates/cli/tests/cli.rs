use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spherical_ot::bench::{read_records, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherical-ot")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identical_file_twice_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a.cloud");
    assert!(run(&["sample", "vmf:d=4,mu=0,0,0,1,kappa=5,n=300", "--out", path(&f)]).status.success());
    for solver in ["binary_search", "level_median"] {
        let p = if solver == "level_median" { "1" } else { "2" };
        let o = run(&["compute", path(&f), path(&f), "--solver", solver, "--p", p, "--L", "50"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(json(&o)["value"].as_f64().unwrap().abs() <= 1e-10);
    }
}

#[test]
fn level_median_with_p2_exits_3() {
    let o = run(&["compute", "uniform:d=3,n=50", "uniform:d=3,n=50", "--solver", "level_median", "--p", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("level_median"));
}

#[test]
fn generator_specs_are_reproducible_under_seed() {
    let args = |seed| {
        run(&[
            "compute",
            "vmf:d=3,mu=0,0,1,kappa=10,n=500",
            "uniform:d=3,n=500",
            "--p",
            "2",
            "--solver",
            "uniform_closed_form",
            "--L",
            "1000",
            "--seed",
            seed,
        ])
    };
    let (a, b, c) = (args("11"), args("11"), args("12"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v = json(&a)["value"].as_f64().unwrap();
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn closed_form_needs_uniform_reference() {
    let o = run(&["compute", "uniform:d=3,n=50", "vmf:d=3,mu=0,0,1,kappa=1,n=50", "--solver", "uniform_closed_form"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.cloud");
    fs::write(&f, "3 2 1\n1 0 0\n0 2 0\n").unwrap();
    let o = run(&["compute", path(&f), "uniform:d=3,n=10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));
    assert_eq!(run(&["compute", "vmf:d=3,kappa=1,n=5", "uniform:d=3,n=5"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "missing.cloud", "uniform:d=3,n=5"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "uniform:d=3,n=5", "uniform:d=4,n=5"]).status.code(), Some(2));
}

#[test]
fn unknown_experiment_exits_2() {
    assert_eq!(run(&["experiment", "fig99"]).status.code(), Some(2));
}

#[test]
fn sample_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.cloud");
    let o = run(&["sample", "power_spherical:d=5,mu=1,0,0,0,0,kappa=3,n=40", "--seed", "9"]);
    assert!(o.status.success());
    assert!(run(&["sample", "power_spherical:d=5,mu=1,0,0,0,0,kappa=3,n=40", "--seed", "9", "--out", path(&f)])
        .status
        .success());
    assert_eq!(fs::read(&f).unwrap(), o.stdout);
    assert!(stdout(&o).starts_with("5 40 1\n"));
}

#[test]
fn compute_out_writes_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.csv");
    let o = run(&["compute", "uniform:d=3,n=80", "uniform:d=3,n=60", "--L", "20", "--seed", "3", "--out", path(&f)]);
    assert!(o.status.success());
    let text = fs::read_to_string(&f).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    let recs = read_records(text.as_bytes()).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!((recs[0].method.as_str(), recs[0].n, recs[0].m, recs[0].l), ("ssw_bs", 80, 60, 20));
    assert_eq!(recs[0].value, json(&o)["value"].as_f64().unwrap());
}

#[test]
fn bench_runtime_small_grid() {
    let o = run(&[
        "bench-runtime",
        "--n-grid",
        "50,100",
        "--L-grid",
        "5",
        "--d-grid",
        "3,4",
        "--methods",
        "ssw2_unif,w_bruteforce",
        "--repeats",
        "2",
        "--cap",
        "60",
        "--threads",
        "1",
    ]);
    assert!(o.status.success());
    let recs = read_records(o.stdout.as_slice()).unwrap();
    // per d: ssw2_unif 2 n × 2 repeats, exact baseline 2 repeats at n=50 and one skip at n=100
    assert_eq!(recs.len(), 2 * (4 + 2 + 1));
    assert!(recs.iter().all(|r| r.extra.get("threads").map(String::as_str) == Some("1")));
    assert_eq!(run(&["bench-runtime", "--methods", "sinkhorn"]).status.code(), Some(2));
}

#[test]
fn flow_writes_numbered_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gla");
    let o = run(&[
        "flow",
        "--algorithm",
        "gla",
        "--init",
        "uniform:d=3,n=30",
        "--mu",
        "0,-1,0",
        "--steps",
        "50",
        "--gla-step",
        "0.01",
        "--snapshot-every",
        "20",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        ["objective.csv", "step_000000.cloud", "step_000020.cloud", "step_000040.cloud", "step_000050.cloud"]
    );

    let out = dir.path().join("ssw");
    let args = [
        "flow",
        "--init",
        "uniform:d=3,n=40",
        "--target",
        "uniform",
        "--steps",
        "5",
        "--step-size",
        "0.5",
        "--out",
        path(&out),
    ];
    assert!(run(&args).status.success());
    let first = fs::read(out.join("step_000005.cloud")).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(fs::read(out.join("step_000005.cloud")).unwrap(), first);
    assert_eq!(run(&["flow", "--init", "uniform:d=3,n=40", "--out", path(&out)]).status.code(), Some(2));
}
