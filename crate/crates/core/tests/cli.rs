use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use siegel_core::cli::parse_point;
use siegel_core::Error;

fn siegel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .env_remove("SIEGEL_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn parse_point_examples() {
    let z = parse_point(r#"{"X":[[0,0],[0,0]],"Y":[[1,0],[0,1]]}"#).unwrap();
    assert_eq!(z.to_c2(), siegel_core::siegel::SiegelPoint::base().to_c2());
    assert!(z.is_interior());
    assert!(matches!(
        parse_point(r#"{"X":[[0,1],[0.5,0]],"Y":[[1,0],[0,1]]}"#),
        Err(Error::Asymmetry { .. })
    ));
    assert!(matches!(
        parse_point(r#"{"X":[[0,0],[0,0]],"Y":[[-0.5,0],[0,1]]}"#),
        Err(Error::NotPsd { .. })
    ));
    assert!(matches!(
        parse_point(r#"{"X":[[0,0],[0,0]]}"#),
        Err(Error::Schema(_))
    ));
}

#[test]
fn mu_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"X":[[0,0],[0,0]],"Y":[[1,0],[0,1]]}"#,
    );
    let b = write(
        dir.path(),
        "b.json",
        r#"{"X":[[0,0],[0,0]],"Y":[[2,0],[0,2]]}"#,
    );
    let out = siegel(&["mu", "--z1", &a, "--z2", &b, "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let mu = v["mu_star"].as_f64().unwrap();
    assert!((mu - 2.0 / 9.0).abs() < 1e-12, "{mu}");

    let out = siegel(&["mu", "--z1", &a, "--z2", &b, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p,mu_star,"));
    assert!(text.contains("2.2222222222222"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        r#"{"X":[[0,1],[0,0]],"Y":[[1,0],[0,1]]}"#,
    );
    assert_eq!(
        siegel(&["mu", "--z1", &a, "--z2", &a]).status.code(),
        Some(2)
    );
    assert_eq!(
        siegel(&["mu", "--z1", "/nonexistent.json", "--z2", &a])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        siegel(&["boundary", "--case", "+x,++"]).status.code(),
        Some(2)
    );
    assert_eq!(
        siegel(&["sweep", "--lambda-max", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(siegel(&["sweep", "--p", "-1"]).status.code(), Some(2));
}

#[test]
fn boundary_impossible_case() {
    let out = siegel(&["boundary", "--case", "++,+-"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "Impossible");
    assert_eq!(v["case"], "++,+-");
}

#[test]
fn boundary_writes_report_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let out = siegel(&[
        "boundary",
        "--case",
        "0-,0-",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "Corner");
    let trace = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(trace.starts_with("n,mu_star,w1_dist,w2_dist,wa_dist\n"));
    assert_eq!(trace.lines().count(), 21);
}

#[test]
fn sweep_is_seeded() {
    let args = [
        "sweep",
        "--lambda-steps",
        "3",
        "--samples",
        "5",
        "--p",
        "1",
        "--p",
        "2",
    ];
    let a = siegel(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,p,mu_star_mean,mu_star_max,gap_max")
    );
    assert_eq!(lines.count(), 6);
    assert_eq!(siegel(&args).stdout, a.stdout);

    let other = Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .env("SIEGEL_SEED", "7")
        .output()
        .unwrap();
    assert_ne!(other.stdout, a.stdout);
}
