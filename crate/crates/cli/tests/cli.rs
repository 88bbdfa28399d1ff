use std::process::{Command, Output};

fn fracwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave")).args(args).output().unwrap()
}

const CONFIG: &str = r#"
[problem]
alpha = 0.5
modes = 16
initial_a = { kind = "sin_mode", modes = [1] }

[problem.domain]
kind = "interval"
length = 3.141592653589793

[observation]
quantity = "operator_image"
target = { kind = "points", points = [[1.5707963267948966]] }

[output]
prefix = "demo"
"#;

#[test]
fn ml_prints_values() {
    let out = fracwave(&["ml", "--alpha", "1", "--z", "-1", "--z", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = first[1].parse().unwrap();
    assert!((v - (-1f64).exp()).abs() < 1e-14);
}

#[test]
fn invalid_order_exits_with_two() {
    let out = fracwave(&["ml", "--alpha", "3", "--z", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("demo.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out_dir = dir.path().join("out");
    let out = fracwave(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["demo_series.csv", "demo_expansion.csv", "demo_verdict.txt"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let verdict = std::fs::read_to_string(out_dir.join("demo_verdict.txt")).unwrap();
    assert!(verdict.contains("u(x0,0) nonzero"), "{verdict}");
}

#[test]
fn bad_config_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, CONFIG.replace("alpha = 0.5", "alpha = 1.5")).unwrap();
    let out = fracwave(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("problem.initial_b"));
}

#[test]
fn verify_filter_runs_a_subset() {
    let out = fracwave(&["verify", "--filter", "special"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{text}");
    assert_eq!(fracwave(&["verify", "--filter", "nothing-matches"]).status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .env("FRACWAVE_THREADS", "2")
        .args(["basis", "--modes", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
    let bad = Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .env("FRACWAVE_THREADS", "many")
        .args(["basis"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn oracle_tracks_the_series() {
    let out = fracwave(&["oracle", "--alpha", "0.5", "--dt", "1e-3", "--horizon", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let worst = text
        .lines()
        .skip(2)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst < 5e-3, "{worst}");
}
