//! The `dirtrace` binary: exit codes, artifacts and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dirtrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirtrace"))
        .args(args)
        .env_remove("DIRTRACE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report on stdout")
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().expect("diagnostic line")).expect("JSON diagnostic")
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    let d = dir.to_str().expect("utf-8 path");
    all.extend(["--out", d]);
    dirtrace(&all)
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .expect("out dir")
        .map(|e| {
            let e = e.expect("entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).expect("file"),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn ibp_golden_report() {
    let o = dirtrace(&["ibp", "--domain", "square", "--angle", "0", "--ny", "1024"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = stdout_json(&o);
    assert_eq!(r["tool"], "dirtrace");
    assert_eq!(r["invariants_hold"], true);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    let text = r["result"].to_string();
    assert!(text.contains("0.83333333"), "{text}");
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"], &["ibp", "--help"]] {
        let o = dirtrace(args);
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn invalid_inputs_exit_two_with_json_diagnostic() {
    let cases: &[&[&str]] = &[
        &["ibp", "--domain", "nosuch"],
        &["ibp", "--u", "nosuch"],
        &["trace", "--ny", "1"],
        &["trace", "--gauss", "5"],
        &["staircase", "--tolerance=-1"],
        &["staircase", "--scheme", "fifth"],
        &["oned", "--domain", "square"],
        &["measure", "--theta", "99"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = dirtrace(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let d = stderr_json(&o);
        assert!(d["error"].is_string() && d["message"].is_string(), "{d}");
    }
}

#[test]
fn bad_thread_count_exits_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_dirtrace"))
        .args(["staircase", "--level", "3", "--pmax", "3"])
        .env("DIRTRACE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn violated_invariant_exits_three() {
    // The distances must decrease along the given levels; listing them in
    // increasing coarseness breaks that claim.
    let o = dirtrace(&[
        "oned",
        "--domain",
        "cantor_1d:rho=0.25,level=6",
        "--field",
        "sinmix",
        "--levels",
        "10,4",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stderr_json(&o)["error"], "invariant");
    assert_eq!(stdout_json(&o)["invariants_hold"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "trace",
        "--domain",
        "cusp",
        "--field",
        "sinmix",
        "--directions",
        "4",
        "--ny",
        "128",
    ];
    assert_eq!(run_into(a.path(), &args).status.code(), Some(0));
    assert_eq!(run_into(b.path(), &args).status.code(), Some(0));
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert!(fa.iter().any(|(n, _)| n == "report.json"));
    assert!(fa
        .iter()
        .any(|(n, _)| n.starts_with("trace_") && n.ends_with(".csv")));
    assert_eq!(fa, fb);
}

#[test]
fn thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "measure",
        "--domain",
        "square",
        "--directions",
        "4",
        "--ny",
        "256",
    ];
    let run = |dir: &Path, threads: &str| {
        let d = dir.to_str().unwrap();
        let mut all = args.to_vec();
        all.extend(["--out", d]);
        Command::new(env!("CARGO_BIN_EXE_dirtrace"))
            .args(&all)
            .env("DIRTRACE_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run(a.path(), "1").status.code(), Some(0));
    assert_eq!(run(b.path(), "3").status.code(), Some(0));
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn artifacts_per_subcommand() {
    let cases: &[(&[&str], &str, &str)] = &[
        (
            &[
                "measure",
                "--domain",
                "square",
                "--directions",
                "2",
                "--ny",
                "64",
            ],
            "measure_00.csv",
            "z1,z2,weight",
        ),
        (
            &[
                "ibp",
                "--domain",
                "square",
                "--directions",
                "2",
                "--ny",
                "64",
            ],
            "ibp.csv",
            "",
        ),
        (
            &[
                "lebesgue", "--domain", "square", "--angle", "0", "--ny", "128",
            ],
            "lebesgue.csv",
            "",
        ),
        (
            &[
                "nu",
                "--domain",
                "cone_union_cantor",
                "--levels",
                "4",
                "--ny",
                "64",
            ],
            "nu.csv",
            "",
        ),
        (
            &["staircase", "--level", "4", "--pmax", "4"],
            "staircase.csv",
            "t,f",
        ),
        (
            &[
                "oned",
                "--domain",
                "cantor_1d:rho=0.25,level=4",
                "--levels",
                "4,6",
            ],
            "oned_n04.csv",
            "t,v",
        ),
    ];
    for (args, name, header) in cases {
        let dir = tempfile::tempdir().unwrap();
        let o = run_into(dir.path(), args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let report: Value =
            serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report, stdout_json(&o));
        let csv = fs::read_to_string(dir.path().join(name))
            .unwrap_or_else(|_| panic!("{name} for {args:?}"));
        assert!(
            csv.starts_with(header),
            "{name}: {}",
            csv.lines().next().unwrap_or("")
        );
        assert!(csv.lines().count() > 1);
    }
}

#[test]
fn nu_reports_bicone_gap_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(
        dir.path(),
        &[
            "nu", "--domain", "bicone", "--field", "sign_y", "--levels", "6", "--ny", "64",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    let gaps = r["result"]["bicone_gap"].as_array().unwrap();
    assert_eq!(gaps.len(), 7);
    assert!(gaps.iter().all(|g| g.as_f64() == Some(2.0)), "{gaps:?}");
}

#[test]
fn consistency_detects_the_crack() {
    let o = dirtrace(&[
        "consistency",
        "--domain",
        "crack_2d",
        "--field",
        "crack_2d",
        "--directions",
        "4",
        "--ny",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["result"]["report"]["verdict"], "out");
    let o = dirtrace(&["oned", "--domain", "crack_1d", "--field", "crack_1d"]);
    assert_eq!(stdout_json(&o)["result"]["verdict"], "out");
}

#[test]
fn domain_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.json");
    fs::write(
        &path,
        r#"{"kind": "polygon", "params": {"vertices": [[0, 0], [1, 0], [0, 1]]}}"#,
    )
    .unwrap();
    let o = dirtrace(&[
        "ibp",
        "--domain",
        path.to_str().unwrap(),
        "--directions",
        "4",
        "--ny",
        "256",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stdout_json(&o)["invariants_hold"], true);
}
