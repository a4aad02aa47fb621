use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SYMMETRIC: &str = r#"{"p": 4, "q": 4, "r1": 1.75, "r2": 1.75, "mu1": 1, "mu2": 1, "beta": 1, "a": 1, "b": 1}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coupled-nls"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

/// `quantity,value` CSV into (name, value) pairs.
fn table(s: &str) -> Vec<(String, f64)> {
    s.lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect()
}

fn value(t: &[(String, f64)], key: &str) -> f64 {
    t.iter().find(|(k, _)| k == key).unwrap().1
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let s = std::fs::read_to_string(path).unwrap();
    let mut lines = s.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].clone()).collect()
}

#[test]
fn scalar_soliton_in_one_dimension() {
    let o = bin(&["scalar", "--dim", "1", "--p", "4", "--format", "csv"]);
    assert!(o.status.success());
    assert!((value(&table(&stdout(&o)), "mass_sq") - 4.0).abs() < 1e-4);

    let o = bin(&["scalar", "--dim", "1", "--p", "4", "--mu", "1", "--a", "1", "--format", "csv"]);
    let t = table(&stdout(&o));
    assert!((value(&t, "lambda") / 0.0625 - 1.0).abs() < 1e-9);
    assert!((value(&t, "m") / (-1.0 / 96.0) - 1.0).abs() < 1e-9);
}

#[test]
fn scalar_outside_window_is_invalid_input() {
    let o = bin(&["scalar", "--dim", "3", "--p", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn unknown_subcommand_is_invalid_input() {
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn beta_reports_sandwich_and_power_law() {
    let args = |a: &str, r: &str| {
        let o = bin(&["beta", "--dim", "3", "--p", "4", "--mu", "1", "--a", a, "--r", r, "--format", "csv"]);
        assert!(o.status.success());
        table(&stdout(&o))
    };
    let t = args("1", "2");
    let b = value(&t, "beta");
    assert!(value(&t, "lower") <= b && b <= value(&t, "upper"));

    let ratio = value(&args("4", "1.5"), "beta") / value(&args("1", "1.5"), "beta");
    let expected = 4f64.powf(-2.0 * 0.5 / 2.0);
    assert!((ratio / expected - 1.0).abs() < 1e-9);
}

#[test]
fn beta_vanishes_in_one_dimension_with_decay_evidence() {
    let o = bin(&["beta", "--dim", "1", "--p", "8", "--r", "2", "--format", "csv"]);
    assert!(o.status.success());
    let t = table(&stdout(&o));
    assert_eq!(value(&t, "beta"), 0.0);
    let decay = [value(&t, "beta_R20"), value(&t, "beta_R40"), value(&t, "beta_R80")];
    assert!(decay[0] > decay[1] && decay[1] > decay[2]);
}

#[test]
fn constants_for_the_symmetric_instance() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SYMMETRIC);
    let o = bin(&["constants", &cfg, "--format", "csv"]);
    assert!(o.status.success());
    let t = table(&stdout(&o));
    assert_eq!(value(&t, "b_star"), 1.0);
    assert_eq!(value(&t, "m_p"), value(&t, "m_q"));
    assert!(value(&t, "C0") > 0.0 && value(&t, "delta_lower") > 0.0);
}

#[test]
fn missing_key_names_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.json", &SYMMETRIC.replace(r#""mu2": 1, "#, ""));
    let o = bin(&["solve", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu2"));
}

#[test]
fn solve_writes_results_and_profiles_deterministically() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SYMMETRIC);
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for out in [&first, &second] {
        let o = bin(&["solve", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (header, rows) = csv_rows(&first);
    assert_eq!(
        header.join(","),
        "a,b,beta,C_ab,m_p,m_q,lambda1,lambda2,mass_u,mass_v,residual,iterations,converged,semitrivial,strict_margin"
    );
    assert_eq!(column(&header, &rows, "converged"), ["true"]);
    assert!(column(&header, &rows, "strict_margin")[0].parse::<f64>().unwrap() > 0.0);

    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let pa = std::fs::read(dir.path().join("first_profiles.csv")).unwrap();
    let pb = std::fs::read(dir.path().join("second_profiles.csv")).unwrap();
    assert_eq!(pa, pb);
    assert_eq!(String::from_utf8(pa).unwrap().lines().count(), 1502);
}

#[test]
fn solve_to_stdout_without_output_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SYMMETRIC);
    let o = bin(&["solve", &cfg]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn sweep_over_mass_keeps_order_and_decreases_m_p() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SYMMETRIC);
    let out = dir.path().join("sweep.csv");
    let o = bin(&["sweep", &cfg, "--vary", "a", "--values", "0.5,1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(column(&header, &rows, "a"), ["5.00000000000e-1", "1.00000000000e0", "2.00000000000e0"]);
    let mp: Vec<f64> = column(&header, &rows, "m_p").iter().map(|s| s.parse().unwrap()).collect();
    assert!(mp[0] > mp[1] && mp[1] > mp[2]);
}

#[test]
fn sweep_rejects_other_keys() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SYMMETRIC);
    let o = bin(&["sweep", &cfg, "--vary", "p", "--values", "4,5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_fast_passes() {
    let o = bin(&["verify", "fast"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 6);
}
