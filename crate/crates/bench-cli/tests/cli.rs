//! End-to-end checks of the command-line interface: exit codes, reproducible
//! CSV bytes, fit output, and the machine-readable error line.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robust-sco-bench"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "robust-sco-bench-test-{tag}-{}",
        std::process::id()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_to(config: &Path, out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out);
    if let Some(t) = threads {
        cmd.env("ROBUST_SCO_THREADS", t);
    }
    cmd.output().unwrap()
}

#[test]
fn run_and_fit_roundtrip() {
    let dir = tmp_dir("roundtrip");
    let csv = dir.join("quickstart.csv");
    let out = run_to(&config_path("quickstart.toml"), &csv, Some("1"));
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("cell,trial,d,n,epsilon,sigma,seed,excess_risk"));
    assert_eq!(text.lines().count(), 4, "header plus 3 trials");

    // A clean quadratic cell has a deterministic optimum: excess ~ 0.
    for line in text.lines().skip(1) {
        let excess: f64 = line.split(',').nth(7).unwrap().parse().unwrap();
        assert!(excess.abs() <= 1e-9, "excess {excess} in {line}");
    }

    // Scaling fit over the epsilon sweep.
    let sweep_csv = dir.join("eps_sweep.csv");
    let out = run_to(&config_path("ac2_epsilon_sweep.toml"), &sweep_csv, None);
    assert!(out.status.success());
    let fit = bin()
        .arg("fit")
        .arg("--in")
        .arg(&sweep_csv)
        .arg("--axis")
        .arg("epsilon")
        .output()
        .unwrap();
    assert!(fit.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&fit.stdout).expect("fit output is one JSON line");
    let exponent = parsed["exponent"].as_f64().unwrap();
    assert!((0.35..=0.65).contains(&exponent), "exponent {exponent}");
    assert_eq!(parsed["cells"].as_u64(), Some(4));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rerun_with_same_seed_is_byte_identical() {
    let dir = tmp_dir("bytes");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    assert!(run_to(&config_path("quickstart.toml"), &a, Some("2"))
        .status
        .success());
    assert!(run_to(&config_path("quickstart.toml"), &b, Some("1"))
        .status
        .success());
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "reruns (even with different thread counts) must match"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn failures_exit_nonzero_with_a_machine_readable_line() {
    let dir = tmp_dir("errors");

    // Missing config file.
    let out = run_to(
        Path::new("/nonexistent/config.toml"),
        &dir.join("x.csv"),
        None,
    );
    assert!(!out.status.success());
    let line = String::from_utf8_lossy(&out.stderr);
    let parsed: serde_json::Value =
        serde_json::from_str(line.lines().next().unwrap()).expect("stderr is JSON");
    assert_eq!(parsed["error"].as_str(), Some("io"));

    // Unsupported family/algorithm pairing: the nonsmooth norm family cannot
    // drive the net-based solver. Rejected before any trial runs.
    let bad = dir.join("bad.toml");
    std::fs::write(
        &bad,
        r#"
base_seed = 1
trials = 1

[distribution]
family = "norm"

[adversary]
kind = "none"

[algorithm]
name = "robust_net_pgd"

[grid]
dims = [2]
ns = [10]
epsilons = [0.0]
sigmas = [1.0]
"#,
    )
    .unwrap();
    let out = run_to(&bad, &dir.join("y.csv"), None);
    assert!(!out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().next().unwrap()).unwrap();
    assert_eq!(parsed["error"].as_str(), Some("invalid-argument"));
    assert!(
        !dir.join("y.csv").exists(),
        "no output may be written on failure"
    );

    // Degenerate fit axis.
    let csv = dir.join("one_cell.csv");
    assert!(run_to(&config_path("quickstart.toml"), &csv, None)
        .status
        .success());
    let fit = bin()
        .arg("fit")
        .arg("--in")
        .arg(&csv)
        .arg("--axis")
        .arg("epsilon")
        .output()
        .unwrap();
    assert!(!fit.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&fit.stderr).lines().next().unwrap()).unwrap();
    assert_eq!(parsed["error"].as_str(), Some("invalid-config"));

    std::fs::remove_dir_all(&dir).ok();
}
