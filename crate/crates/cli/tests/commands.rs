use std::fs;
use std::process::Command;

use bayesbag::{
    bayesbag_exact, make_report, BagConfig, CenterPolicy, Dataset, Evaluation,
    GaussianLocationModel, GridSpec,
};
use bayesbag_cli::{read_dataset, MEAN_CURVE_ID, POSTERIOR_CURVE_ID};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bayesbag"))
}

fn report_field(report: &str, name: &str) -> String {
    let mut lines = report.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_string()
}

#[test]
fn table1_prints_both_rows_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["table1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(-0.69, 2.81)"));
    assert!(text.contains("(0.10, 1.32)"));
    let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .contains(",-0.69,2.81,-1.29,3.41,exact,0"));
}

#[test]
fn table1_exact_and_monte_carlo_agree() {
    let dir = tempfile::tempdir().unwrap();
    let read = |args: &[&str]| {
        let status = bin()
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
        csv.lines()
            .skip(1)
            .map(|l| {
                let f: Vec<f64> = l
                    .split(',')
                    .skip(4)
                    .take(2)
                    .map(|x| x.parse().unwrap())
                    .collect();
                (f[0], f[1])
            })
            .collect::<Vec<_>>()
    };
    let exact = read(&["table1", "--exact"]);
    let mc = read(&["table1", "--mc", "--B", "10000", "--seed", "7"]);
    for (e, m) in exact.iter().zip(&mc) {
        assert!(
            (e.0 - m.0).abs() <= 0.03 && (e.1 - m.1).abs() <= 0.03,
            "{e:?} vs {m:?}"
        );
    }
    assert!(!bin()
        .args(["table1", "--exact", "--mc"])
        .status()
        .unwrap()
        .success());
}

#[test]
fn bag_on_single_value_matches_first_table_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "1.325\n").unwrap();
    let status = bin()
        .args(["bag", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report_field(&report, "posterior_lo_2dp"), "-0.69");
    assert_eq!(report_field(&report, "posterior_hi_2dp"), "2.81");
    let lo: f64 = report_field(&report, "bayesbag_lo").parse().unwrap();
    let hi: f64 = report_field(&report, "bayesbag_hi").parse().unwrap();
    assert!((lo + 1.30).abs() <= 0.015 && (hi - 3.41).abs() <= 0.015);
    let ratio: f64 = report_field(&report, "widening_ratio").parse().unwrap();
    assert!((ratio - 1.341_640_786_499_873_8).abs() < 1e-12);

    let curves = fs::read_to_string(dir.path().join("bag_curves.csv")).unwrap();
    assert_eq!(curves.lines().next(), Some("u,F_posterior,F_bayesbag"));
    assert_eq!(curves.lines().count(), 402);
}

#[test]
fn bag_on_ten_values_matches_second_table_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ten.csv");
    let values = [0.1, 0.9, 1.2, 0.5, 0.7, 1.0, 0.3, 0.8, 1.1, 0.6775];
    let body: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(&input, format!("obs\n{body}")).unwrap();
    let status = bin()
        .args(["bag", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report_field(&report, "n"), "10");
    assert_eq!(report_field(&report, "posterior_lo_2dp"), "0.10");
    assert_eq!(report_field(&report, "posterior_hi_2dp"), "1.32");
    let lo: f64 = report_field(&report, "bayesbag_lo").parse().unwrap();
    let hi: f64 = report_field(&report, "bayesbag_hi").parse().unwrap();
    assert!((lo + 0.16).abs() <= 0.02 && (hi - 1.56).abs() <= 0.02);
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = bin().args(["bag", "--input"]).arg(&empty).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty dataset"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x\n1.0\n2.0\nfoo\n").unwrap();
    let out = bin().args(["bag", "--input"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let missing = dir.path().join("missing.csv");
    let out = bin()
        .args(["bag", "--input"])
        .arg(&missing)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["bag", "--synthetic-n", "3", "--B", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["curves", "--synthetic-n", "3", "--grid-points", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonparametric_single_value_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "1.325\n").unwrap();
    let out = bin()
        .args(["bag", "--scheme", "nonparametric", "--B", "50", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("zero resampling variability"));
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report_field(&report, "degenerate_resampling"), "true");
    assert_eq!(
        report_field(&report, "widening_ratio")
            .parse::<f64>()
            .unwrap(),
        1.0
    );
    assert_eq!(
        report_field(&report, "ks_distance").parse::<f64>().unwrap(),
        0.0
    );
}

#[test]
fn curves_row_count_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .args([
                "curves",
                "--synthetic-n",
                "6",
                "--B",
                "2",
                "--grid-points",
                "51",
                "--seed",
                "5",
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out.join("curves.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 51 + 2 * 51);
    assert_eq!(
        rows.iter()
            .filter(|r| r.starts_with(&format!("{MEAN_CURVE_ID},")))
            .count(),
        51
    );
    assert_eq!(
        rows.iter()
            .filter(|r| r.starts_with(&format!("{POSTERIOR_CURVE_ID},")))
            .count(),
        51
    );
    assert_eq!(text.lines().next(), Some("replicate_id,u,F"));
}

#[test]
fn curves_mean_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "1.325\n").unwrap();
    let status = bin()
        .args(["curves", "--B", "1000", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let model = GaussianLocationModel::new(4.0, 1.0).unwrap();
    let exact = bayesbag_exact(
        &model,
        &Dataset::new(vec![1.325]).unwrap(),
        CenterPolicy::SampleMean,
    );
    let text = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let bound = 1.36 / 1000f64.sqrt() + 0.005;
    let mut seen = 0;
    for line in text
        .lines()
        .filter(|l| l.starts_with(&format!("{MEAN_CURVE_ID},")))
    {
        let f: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((f[1] - exact.cdf(f[0])).abs() <= bound);
        seen += 1;
    }
    assert_eq!(seen, 401);
}

#[test]
fn simulated_file_round_trips_through_bag() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("sim.csv");
    let status = bin()
        .args([
            "simulate", "--n", "25", "--theta", "1.31", "--seed", "11", "--out",
        ])
        .arg(&data_path)
        .status()
        .unwrap();
    assert!(status.success());
    let from_file = dir.path().join("file");
    let from_flags = dir.path().join("flags");
    for (out, extra) in [
        (
            &from_file,
            vec!["--input".to_string(), data_path.display().to_string()],
        ),
        (
            &from_flags,
            vec![
                "--synthetic-n".into(),
                "25".into(),
                "--theta".into(),
                "1.31".into(),
                "--gen-seed".into(),
                "11".into(),
            ],
        ),
    ] {
        let status = bin()
            .arg("bag")
            .args(&extra)
            .args(["--scheme", "nonparametric", "--B", "200", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(from_file.join("report.csv")).unwrap();
    let b = fs::read(from_flags.join("report.csv")).unwrap();
    assert_eq!(a, b);

    // and the same numbers in-process
    let data = read_dataset(&data_path).unwrap();
    let model = GaussianLocationModel::new(4.0, 1.0).unwrap();
    let cfg = BagConfig::default()
        .with_replicates(200)
        .with_scheme(bayesbag::ResampleScheme::NonparametricBootstrap);
    let r = make_report(
        &model,
        &data,
        &cfg,
        Evaluation::MonteCarlo,
        0.95,
        &GridSpec::default(),
    )
    .unwrap();
    let text = String::from_utf8(a).unwrap();
    let lo: f64 = report_field(&text, "bayesbag_lo").parse().unwrap();
    assert_eq!(lo, r.bagged_interval.lo);
}
