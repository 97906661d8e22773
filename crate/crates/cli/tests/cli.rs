use std::fs;
use std::process::{Command, Output};

fn mlcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlcm"))
        .args(args)
        .env("MLCM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn values(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn eval_ml_linear_grid() {
    let o = mlcm(&[
        "eval",
        "--target",
        "ml",
        "--alpha",
        "0.5",
        "--lambda",
        "1",
        "--grid",
        "0:10:21:linear",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("x,value,abs_error_estimate,route"));
    let v = values(&out);
    assert_eq!(v.len(), 21);
    assert_eq!(v[0], 1.0);
    assert!(v.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn eval_reference_points() {
    let o = mlcm(&["eval", "--target", "stable-pdf", "--alpha", "0.5", "--grid", "1:1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((values(&stdout(&o))[0] - 0.219_695_644_733_861_2).abs() < 1e-12);
    let o = mlcm(&["eval", "--target", "pollard-cdf", "--alpha", "0.5", "--grid", "1:1:1"]);
    assert!((values(&stdout(&o))[0] - 0.520_499_877_813_046_5).abs() < 1e-12);
}

#[test]
fn eval_keeps_grid_order_under_threads() {
    let o = mlcm(&[
        "eval",
        "--target",
        "pollard-pdf",
        "--alpha",
        "0.7",
        "--grid",
        "0.01:100:50:log",
    ]);
    let xs: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 50);
    assert!(xs.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn exit_codes() {
    assert_eq!(
        mlcm(&["verify", "--target", "prop1", "--alpha", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mlcm(&["eval", "--target", "ml", "--grid", "0:1:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mlcm(&["eval", "--target", "ml", "--alpha", "0.5", "--grid", "0:1:3:log"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        mlcm(&["eval", "--target", "ml", "--alpha", "0.5", "--grid", "0:1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(mlcm(&["cm-check", "--target", "sin"]).status.code(), Some(1));
    assert_eq!(
        mlcm(&["cm-check", "--target", "ml", "--alpha", "0.5"]).status.code(),
        Some(0)
    );
    // the series cannot resolve E_{1/2}(−20)
    let o = mlcm(&[
        "eval",
        "--target",
        "ml",
        "--alpha",
        "0.5",
        "--route",
        "series",
        "--grid",
        "400:400:1",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_prop1_writes_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let o = mlcm(&[
        "verify",
        "--target",
        "prop1",
        "--alpha",
        "0.5",
        "--lambda",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["identity"], "prop1");
        assert!(rec["residual"].as_f64().unwrap() <= 1e-7);
        assert_eq!(rec["verdict"], true);
    }
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = mlcm(&[
            "sample",
            "--target",
            "pollard",
            "--alpha",
            "0.5",
            "--n",
            "1000",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 1001);
    let o = mlcm(&[
        "sample", "--target", "stable", "--alpha", "0.5", "--n", "0", "--seed", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn ks_of_file(path: &std::path::Path, cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let text = fs::read_to_string(path).unwrap();
    let xs: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    (
        mlcm_core::ks::ks_statistic(&xs, cdf),
        mlcm_core::ks::ks_threshold(xs.len()),
    )
}

#[test]
fn sampled_files_pass_ks() {
    use mlcm_core::distributions::{gen_ml_cdf, pollard_cdf, GenMLSpec};
    use mlcm_core::quad::QuadConfig;
    let cfg = QuadConfig::default();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pollard.csv");
    let o = mlcm(&[
        "sample",
        "--target",
        "pollard",
        "--alpha",
        "0.5",
        "--n",
        "100000",
        "--seed",
        "42",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (d, thr) = ks_of_file(&p, |t| pollard_cdf(0.5, t, &cfg).unwrap().value);
    assert!(d <= thr, "{d} > {thr}");

    let g = dir.path().join("genml.csv");
    let o = mlcm(&[
        "sample",
        "--target",
        "gen-ml",
        "--alpha",
        "0.5",
        "--theta",
        "1",
        "--n",
        "10000",
        "--seed",
        "7",
        "--out",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let spec = GenMLSpec::new(0.5, 1.0).unwrap();
    let (d, thr) = ks_of_file(&g, |t| gen_ml_cdf(spec, t, &cfg).unwrap().value);
    assert!(d <= thr, "{d} > {thr}");
}
