use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bessel-harmonic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

#[test]
fn region_csv() {
    let o = run(&["region", "--op", "g", "--lambda", "0.5", "--p", "2", "--delta", "0:3:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,delta,strong,weak,restricted_weak");
    assert_eq!(lines.len(), 5);
    // right end (2λ+1)p - 1 = 3 is restricted weak only
    assert_eq!(lines[4], "2.0000000000000000e0,3.0000000000000000e0,0,0,1");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["region", "--op", "nope", "--lambda", "1", "--p", "2", "--delta", "0"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "heat", "--lambda", "-1", "--t", "1", "--x", "1", "--y", "1"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "heat", "--lambda", "1", "--t", "1", "--x", "1:0:1", "--y", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["sharpness", "l1", "--op", "wmax", "--lambda", "1", "--delta", "3"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_errors_exit_3() {
    let o = run(&["kernel", "poisson", "--lambda", "0.5", "--t", "1e-300", "--x", "1", "--y", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn kernel_matches_reflection_formula() {
    let o = run(&["kernel", "heat", "--lambda", "0", "--t", "0.5", "--x", "1.5", "--y", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = row[3].parse().unwrap();
    let (t, x, y) = (0.5f64, 1.5f64, 0.25f64);
    let want = ((-(x - y).powi(2) / (4.0 * t)).exp() + (-(x + y).powi(2) / (4.0 * t)).exp()) / (4.0 * std::f64::consts::PI * t).sqrt();
    assert!((v - want).abs() <= 1e-14 * want);
    assert_eq!(row[4], "closed_form");
}

#[test]
fn riesz_prints_null_time() {
    let o = run(&["kernel", "riesz", "--lambda", "1", "--x", "1", "--y", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("null,"));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "# comment\nlambda = 0.5\nt = 1\nx = 1,2\ny = 1").unwrap();
    let path = cfg.path().to_str().unwrap();
    let from_file = stdout(&run(&["kernel", "heat", "--config", path]));
    assert_eq!(from_file.lines().count(), 3);
    let overridden = stdout(&run(&["kernel", "heat", "--config", path, "--lambda", "0"]));
    let explicit = stdout(&run(&["kernel", "heat", "--lambda", "0", "--t", "1", "--x", "1,2", "--y", "1"]));
    assert_eq!(overridden, explicit);
    assert_ne!(from_file, explicit);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let args = ["region", "--op", "riesz", "--lambda", "1", "--p", "1:2:0.5", "--delta", "-3:3:1"];
    let mut with_file = vec!["--output", out.to_str().unwrap()];
    with_file.extend_from_slice(&args);
    assert_eq!(run(&with_file).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), run(&args).stdout);
}

#[test]
fn threads_env_is_validated_and_harmless() {
    let args = ["--seed", "3", "kernel", "poisson", "--lambda", "1.5", "--random", "50"];
    let with = |n: &str| Command::new(env!("CARGO_BIN_EXE_bessel-harmonic")).args(args).env("BESSEL_HARMONIC_THREADS", n).output().unwrap();
    let one = with("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, with("3").stdout);
    assert_eq!(with("0").status.code(), Some(2));
    assert_eq!(with("many").status.code(), Some(2));
}

#[test]
fn seeds_change_random_points() {
    let a = run(&["--seed", "1", "kernel", "heat", "--lambda", "1", "--random", "5"]).stdout;
    let b = run(&["--seed", "2", "kernel", "heat", "--lambda", "1", "--random", "5"]).stdout;
    assert_eq!(a, run(&["--seed", "1", "kernel", "heat", "--lambda", "1", "--random", "5"]).stdout);
    assert_ne!(a, b);
}

#[test]
fn verify_kernels_reports_json_lines() {
    let o = run(&["verify", "kernels"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["status"], "PASS", "{line}");
        assert!(v["value"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
    }
    assert!(text.lines().count() >= 20);
}

#[test]
fn sharpness_boundary_reports() {
    let bounded = run(&["sharpness", "boundary", "--lambda", "1", "--p", "2", "--delta", "4.9"]);
    assert_eq!(bounded.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(stdout(&bounded).trim()).unwrap();
    assert_eq!(v["verdict"], "FAIL");
    let growing = run(&["sharpness", "boundary", "--lambda", "1", "--p", "2", "--delta", "5"]);
    assert_eq!(growing.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&growing).trim()).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert!(v["fit"]["slope"].as_f64().or(v["slope"].as_f64()).unwrap() > 0.9);
}
