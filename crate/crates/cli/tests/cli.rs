use std::path::PathBuf;
use std::process::{Command, Output};

use bayes_core::testing::evidence_label;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn bayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bayes")).args(args).env_remove("BAYES_OUTPUT_DIR").output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = bayes(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["result"].clone()
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = bayes(args);
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn estimate_beta_binomial() {
    let r = ok_json(&["estimate", "--model", "beta-binomial", "--successes", "38", "--trials", "58"]);
    assert_eq!(r["posterior"]["family"], "beta");
    assert_eq!(num(&r["posterior"]["a"]), 39.0);
    assert_eq!(num(&r["posterior"]["b"]), 21.0);
    assert_eq!(num(&r["posterior_mean"]), 0.65);
}

#[test]
fn estimate_cancer_groups() {
    let cancer = fixture("cancer.csv");
    for (group, shape, rate) in [("non-malignant", 136.0, 161.0), ("malignant", 96.0, 133.0)] {
        let r = ok_json(&[
            "estimate", "--model", "gamma-poisson", "--prior-shape", "1", "--prior-rate", "2", "--data-file", &cancer,
            "--group", group,
        ]);
        assert_eq!(r["posterior"]["family"], "gamma");
        assert_eq!(num(&r["posterior"]["shape"]), shape);
        assert_eq!(num(&r["posterior"]["rate"]), rate);
    }
}

#[test]
fn empty_csv_is_an_input_error() {
    let (code, err) = exit_code(&[
        "estimate", "--model", "gamma-poisson", "--prior-shape", "1", "--prior-rate", "2", "--data-file",
        &fixture("empty_contingency.csv"),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("no data rows"), "{err}");
    let (code, err) = exit_code(&["predict", "--data-file", &fixture("empty.csv")]);
    assert_eq!(code, 2);
    assert!(err.contains("no data rows"), "{err}");
}

#[test]
fn hpd_cauchy_normal() {
    let r = ok_json(&["hpd", "--model", "cauchy-normal", "--prior-var", "10", "--data", "-4.3,3.2", "--alpha", "0.05"]);
    assert!((num(&r["k_alpha"]) - 0.0415).abs() < 0.003);
    assert!((num(&r["coverage"]) - 0.95).abs() < 1e-5);
    assert_eq!(r["grid"]["points"], 4001);
}

#[test]
fn hpd_sample_region() {
    let args = [
        "hpd", "--model", "normal-jeffreys", "--stats", "n=10,mean=0,ssd=1", "--alpha", "0.90", "--sample", "1000",
        "--seed", "7", "--format", "csv",
    ];
    let a = bayes(&args);
    let b = bayes(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("index,mu,sigma2\n"));
    assert_eq!(text.lines().count(), 101);
    let mut other = args;
    other[10] = "8";
    assert_ne!(bayes(&other).stdout, text.as_bytes());
}

#[test]
fn hpd_rejects_bad_alpha_and_short_grids() {
    let (code, _) = exit_code(&["hpd", "--model", "cauchy-normal", "--prior-var", "10", "--data", "-4.3,3.2", "--alpha", "1.0"]);
    assert_eq!(code, 2);
    let (code, err) = exit_code(&[
        "hpd", "--model", "beta-binomial", "--successes", "38", "--trials", "58", "--grid-min", "0.6", "--grid-max", "0.7",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("widen"), "{err}");
}

#[test]
fn grid_csv_goes_to_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bayes"))
        .args(["estimate", "--model", "beta-binomial", "--successes", "38", "--trials", "58", "--grid-csv", "beta.csv"])
        .env("BAYES_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("beta.csv")).unwrap();
    assert!(csv.starts_with("x,density\n"));
    assert_eq!(csv.lines().count(), 4002);
}

#[test]
fn point_null_tests() {
    let r = ok_json(&["test", "--point-null", "--x", "1.96", "--sigma", "1", "--tau-sq", "10", "--rho", "0.5"]);
    assert!((num(&r["posterior_null_prob"]) - 0.366_506_337_698_305).abs() < 1e-12);
    assert!((num(&r["bf10"]) / num(&r["bf10_quadrature"]) - 1.0).abs() < 1e-8);
    assert_eq!(r["decision"], "reject_H0");

    let r = ok_json(&["test", "--point-null-improper", "--x", "2.58"]);
    assert!((num(&r["posterior_null_prob"]) - 0.014).abs() < 5e-4);

    let r = ok_json(&["test", "--one-sided", "--x", "1.6449"]);
    assert!((num(&r["posterior_null_prob"]) - 0.05).abs() < 1e-4);

    let (code, err) = exit_code(&["test", "--point-null", "--x", "1.96", "--slab", "flat"]);
    assert_eq!(code, 3);
    assert!(err.contains("improper"), "{err}");
    let (code, _) = exit_code(&["test", "--x", "1.96"]);
    assert_eq!(code, 2);
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = bayes(&[
        "test", "--point-null", "--x", "1.96", "--tau", "1", "--sweep-tau", "1e-4,10,1000", "--sweep-csv",
        path.to_str().unwrap(), "--format", "csv",
    ]);
    assert!(out.status.success());
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file.as_bytes(), out.stdout.as_slice());
    let mut lines = file.lines();
    assert_eq!(lines.next(), Some("tau,bf10,posterior_prob"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1000);
    assert_eq!((rows[0][0], rows[999][0]), (1e-4, 10.0));
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
}

#[test]
fn regression_report() {
    let r = ok_json(&["regress", "--data-file", &fixture("regression.csv"), "--response", "y"]);
    assert_eq!(num(&r["g"]), 40.0);
    let rows = r["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|row| row["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["(Intercept)", "x1", "x2", "x3"]);
    for (j, row) in rows.iter().enumerate() {
        let label = evidence_label(num(&row["log10_bf10"]));
        assert_eq!(row["evidence"], serde_json::to_value(label).unwrap());
        assert_eq!(num(&row["estimate"]), 40.0 / 41.0 * num(&r["beta_hat"][j]));
    }

    let text = String::from_utf8(bayes(&["regress", "--data-file", &fixture("regression.csv"), "--response", "y"]).stdout)
        .unwrap();
    assert!(text.contains("log10(BF)"));
    assert!(text.contains("evidence against H0: (****) decisive, (***) strong, (**) substantial, (*) poor"));
}

#[test]
fn regression_errors_have_distinct_messages() {
    let (code, missing) = exit_code(&["regress", "--data-file", &fixture("regression.csv"), "--response", "z"]);
    assert_eq!(code, 2);
    let (code, short) = exit_code(&["regress", "--data-file", &fixture("too_few_rows.csv"), "--response", "y"]);
    assert_eq!(code, 2);
    let (code, rank) = exit_code(&["regress", "--data-file", &fixture("rank_deficient.csv"), "--response", "y"]);
    assert_eq!(code, 3);
    assert!(missing.contains("no response column"));
    assert!(short.contains("more observations than columns"));
    assert!(rank.contains("singular"));
}

#[test]
fn predictive_from_file() {
    let r = ok_json(&["predict", "--data-file", &fixture("sample10.csv"), "--column", "x"]);
    let p = &r["predictive"];
    assert_eq!(num(&p["df"]), 10.0);
    assert!(num(&p["location"]).abs() < 1e-15);
    assert!((num(&p["scale"]) - (11.0f64).sqrt() / 10.0).abs() < 1e-12);
}

#[test]
fn outlier_scan() {
    let out = bayes(&["outliers", "--alpha", "0.95", "--data-file", &fixture("planted_outlier.csv"), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,value,F_i,flagged\n"));
    let flagged: Vec<&str> =
        text.lines().skip(1).filter(|l| l.ends_with(",true")).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(flagged, ["17"]);

    let (code, _) = exit_code(&["outliers", "--data-file", &fixture("two_rows.csv")]);
    assert_eq!(code, 2);
}

#[test]
fn outputs_are_deterministic() {
    let cases: [&[&str]; 3] = [
        &["estimate", "--model", "normal-jeffreys", "--data-file", &fixture("sample10.csv")],
        &["hpd", "--model", "cauchy-normal", "--prior-var", "10", "--data", "-4.3,3.2"],
        &["outliers", "--data-file", &fixture("planted_outlier.csv")],
    ];
    for case in cases {
        for format in ["text", "json", "csv"] {
            let mut args = case.to_vec();
            args.extend(["--format", format]);
            let a = bayes(&args);
            assert!(a.status.success(), "{args:?}");
            assert_eq!(a.stdout, bayes(&args).stdout, "{args:?}");
        }
    }
}

#[test]
fn headers_print_defaults() {
    let text = String::from_utf8(bayes(&["hpd", "--model", "cauchy-normal", "--prior-var", "10", "--data", "-4.3,3.2"]).stdout)
        .unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("alpha=0.05") && header.contains("grid_points=4001") && header.contains("seed=0"), "{header}");
}

#[test]
fn unknown_flags_are_rejected() {
    let (code, _) = exit_code(&["estimate", "--model", "beta-binomial", "--bogus", "1"]);
    assert_eq!(code, 2);
}
