use std::fs;
use std::path::PathBuf;

use ouroboros_cli::{run, EXIT_FAILS, EXIT_HOLDS, EXIT_UNDEFINED, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ouroboros").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = invoke(&full);
    let value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}{err}"));
    (code, value)
}

#[test]
fn exit_codes_follow_the_verdict() {
    let (code, r) = json(&["check", "--fn", "mean(x1,x2)", "--domain", "R^2"]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(r["status"], "HoldsProbably");

    let (code, r) = json(&["check", "--fn", "x1+1", "--domain", "R"]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(r["witness"]["kind"], "defect");

    let (code, r) = json(&["check", "--fn", "2*x1", "--domain", "real[0,1]"]);
    assert_eq!(code, EXIT_UNDEFINED);
    assert_eq!(r["witness"]["kind"], "escape");
    let y = r["witness"]["output"].as_f64().unwrap();
    assert!(!(0.0..=1.0).contains(&y));

    let (code, r) = json(&["check", "--name", "identity_z", "--domain", "int[-5..5]"]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(r["status"], "Holds");
    assert_eq!(r["points_checked"], 11);
}

#[test]
fn usage_errors_exit_three_with_grammar() {
    for args in [
        &["check", "--fn", "x1 +", "--domain", "R"][..],
        &["check", "--fn", "x3", "--domain", "R^2"],
        &["check", "--fn", "x1", "--domain", "real[1,0]"],
        &["check", "--name", "nope"],
        &["check", "--fn", "x1", "--name", "identity"],
        &["check", "--fn", "x1", "--samples", "0"],
        &["slln", "--dist", "cauchy(0,1)"],
        &[
            "slln",
            "--dist",
            "uniform(0,1)",
            "--n-max",
            "10",
            "--checkpoints",
            "5,3",
        ],
        &["frobnicate"],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {out}{err}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
    let (_, _, err) = invoke(&["check", "--fn", "x1 +", "--domain", "R"]);
    assert!(err.contains("1:5") && err.contains("int[a..b]"), "{err}");
}

#[test]
fn help_goes_to_stdout_and_succeeds() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_HOLDS);
    assert!(out.contains("check"));
}

#[test]
fn reports_echo_seed_and_config() {
    let (_, out, _) = invoke(&["check", "--fn", "abs(x1)", "--seed", "17", "--samples", "500"]);
    assert!(out.contains("seed 17") && out.contains("samples 500"), "{out}");
    let (_, r) = json(&["check", "--fn", "abs(x1)", "--seed", "17", "--samples", "500"]);
    assert_eq!(r["seed"], 17);
    assert_eq!(r["config"]["sample_count"], 500);
    let (_, _, err) = invoke(&[
        "slln",
        "--dist",
        "bernoulli(0.5)",
        "--n-max",
        "8",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert!(err.contains("seed 3"), "{err}");
}

#[test]
fn a_single_domain_is_raised_to_the_arity() {
    let (_, a) = json(&["check", "--name", "min_2", "--domain", "int[0..3]"]);
    let (_, b) = json(&["check", "--name", "min_2", "--domain", "int[0..3]^2"]);
    assert_eq!(a, b);
    assert_eq!(a["signature"], "int[0..3]^2");
    let (_, c) = json(&["check", "--fn", "max(x1, x2)"]);
    assert_eq!(c["signature"], "R^2");
}

#[test]
fn image_report_rides_along() {
    let (code, r) = json(&["image", "--name", "floor", "--domain", "set{-2,-1.5,0,0.5,2}"]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(r["image"]["equal"], true);
    assert_eq!(r["image"]["image"]["points"], serde_json::json!([-2, 0, 2]));

    let (code, r) = json(&["image", "--fn", "x1 + 1", "--domain", "int[0..4]"]);
    assert_eq!(code, EXIT_UNDEFINED);
    assert_eq!(r["image"]["equal"], false);
    assert_eq!(r["image"]["fixed_points"]["count"], 0);
}

#[test]
fn slln_csv_shape() {
    let (code, out, _) = invoke(&["slln", "--dist", "bernoulli(1)", "--n-max", "100", "--format", "csv"]);
    assert_eq!(code, EXIT_HOLDS);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,running_mean,analytic_mean,abs_error"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let ns: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns, vec![1, 2, 4, 8, 16, 32, 64, 100]);
    assert!(rows.iter().all(|r| r[3] == "0"));
}

#[test]
fn sweep_reports_carry_distribution_and_worst_exit_code() {
    let (code, r) = json(&[
        "sweep",
        "--dist",
        "uniform(0,1)",
        "--arities",
        "2,4",
        "--samples",
        "200",
    ]);
    assert_eq!(code, EXIT_HOLDS);
    let records = r.as_array().unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|x| x["distribution"] == "uniform(0,1)"));
    assert_eq!(records[1]["n"], 4);

    let (code, _) = json(&["sweep", "--domain", "int[0..9]", "--arities", "1,2"]);
    assert_eq!(code, EXIT_UNDEFINED);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = invoke(&["check", "--name", "abs", "--format", "json", "--out", p]);
    assert_eq!(code, EXIT_HOLDS);
    assert!(out.is_empty());
    let v: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["function"], "abs");
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares each report with its checked-in copy. Set `UPDATE_GOLDEN=1` to
/// rewrite the copies.
#[test]
fn golden_reports() {
    let cases: &[(&str, &[&str])] = &[
        (
            "check_mean2.json",
            &["check", "--fn", "mean(x1,x2)", "--domain", "R^2", "--format", "json"],
        ),
        (
            "check_succ.json",
            &["check", "--fn", "x1+1", "--domain", "R", "--format", "json"],
        ),
        (
            "check_double.json",
            &["check", "--fn", "2*x1", "--domain", "real[0,1]", "--format", "json"],
        ),
        (
            "check_mixed.json",
            &[
                "check",
                "--name",
                "mean_2",
                "--domain",
                "real[0,1] x int[0..9]",
                "--format",
                "json",
            ],
        ),
        (
            "image_floor.json",
            &[
                "image",
                "--name",
                "floor",
                "--domain",
                "set{-2,-1.5,0,0.5,2}",
                "--format",
                "json",
            ],
        ),
        (
            "sweep_normal.json",
            &[
                "sweep",
                "--dist",
                "normal(0,1)",
                "--arities",
                "2,8",
                "--samples",
                "100",
                "--format",
                "json",
            ],
        ),
        (
            "slln_uniform.csv",
            &["slln", "--dist", "uniform(0,1)", "--n-max", "4096", "--format", "csv"],
        ),
        ("check_succ.txt", &["check", "--fn", "x1+1", "--domain", "R"]),
        ("catalog.json", &["catalog", "--format", "json"]),
    ];
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (file, args) in cases {
        let (_, out, err) = invoke(args);
        assert!(!out.is_empty(), "{file}: {err}");
        let path = golden_dir().join(file);
        if update {
            fs::write(&path, &out).unwrap();
            continue;
        }
        let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(out, expected, "{file} drifted from its golden copy");
    }
}
