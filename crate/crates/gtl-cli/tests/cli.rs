use std::path::PathBuf;
use std::process::{Command, Output};

fn gtl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtl"))
        .args(args)
        .env_remove("GTL_THREADS")
        .output()
        .expect("spawn gtl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gtl-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn plan_prints_derived_parameters() {
    let o = gtl(&["plan", "--epsilon", "0.05", "--format", "json"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "plan");
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn plan_csv_has_a_header() {
    let o = gtl(&["plan", "--epsilon", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() >= 2);
}

#[test]
fn print_config_shows_overrides() {
    let o = gtl(&[
        "gnn-eval",
        "--seed",
        "9",
        "--n",
        "512,1024",
        "--mode",
        "ran",
        "--print-config",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["mode"], "ran");
    assert_eq!(v["vertices"], serde_json::json!([512, 1024]));
}

#[test]
fn threads_fall_back_to_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gtl"))
        .args(["verify", "--print-config"])
        .env("GTL_THREADS", "3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["threads"], 3);

    let o = Command::new(env!("CARGO_BIN_EXE_gtl"))
        .args(["verify", "--threads", "2", "--print-config"])
        .env("GTL_THREADS", "3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["threads"], 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let path = dir.join("c.json");
    std::fs::write(&path, r#"{"kind": "wnn-eval", "grid": 100, "seed": 4}"#).unwrap();
    let o = gtl(&[
        "wnn-eval",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "5",
        "--print-config",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["grid"], 100);
    assert_eq!(v["seed"], 5);
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = scratch("bad");
    let unknown = dir.join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"kind": "plan", "epsilon": 0.1, "colour": "red"}"#,
    )
    .unwrap();
    assert_eq!(
        gtl(&["plan", "--config", unknown.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let other = dir.join("other.json");
    std::fs::write(&other, r#"{"kind": "transfer"}"#).unwrap();
    assert_eq!(
        gtl(&["plan", "--config", other.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(gtl(&["sweep-sampling", "--Ns", "1"]).status.code(), Some(2));
    assert_eq!(
        gtl(&["verify", "--check", "nonsense"]).status.code(),
        Some(2)
    );
}

#[test]
fn failing_checks_exit_with_one() {
    let o = gtl(&[
        "verify",
        "--check",
        "planner_fidelity",
        "--check",
        "exact_sampling",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = gtl(&["verify", "--check", "bound_trend"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed: bound_trend"));
}

#[test]
fn out_directory_receives_csv_and_sidecar() {
    let dir = scratch("out");
    let o = gtl(&[
        "wnn-eval",
        "--N",
        "32",
        "--grid",
        "32",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("wnn-eval.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
    assert!(dir.join("wnn-eval.report.json").exists());

    let again = scratch("out2");
    gtl(&[
        "wnn-eval",
        "--N",
        "32",
        "--grid",
        "32",
        "--out",
        again.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(
        std::fs::read_to_string(again.join("wnn-eval.csv")).unwrap(),
        csv
    );
}
