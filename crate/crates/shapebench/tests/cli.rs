use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn shapebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapebench"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

fn default_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        &format!(
            r#"{{"algorithms": ["ga", "rs", "gs"], "master_seed": 42, "output_dir": {:?}}}"#,
            dir.join("results").to_str().unwrap()
        ),
    )
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let out_dir = tmp.path().join("elsewhere");
    let o = shapebench(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("y_star = 760.0"));
    for f in [
        "runs.csv",
        "metrics.csv",
        "summary.csv",
        "metadata.json",
        "traces/ga_0.csv",
    ] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert!(!tmp.path().join("results").exists());
}

#[test]
fn seed_override_changes_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    let cfg = cfg.to_str().unwrap();
    assert!(
        shapebench(&["run", "--config", cfg, "--out", a.to_str().unwrap()])
            .status
            .success()
    );
    assert!(shapebench(&[
        "run",
        "--config",
        cfg,
        "--out",
        b.to_str().unwrap(),
        "--seed",
        "42"
    ])
    .status
    .success());
    assert!(shapebench(&[
        "run",
        "--config",
        cfg,
        "--out",
        c.to_str().unwrap(),
        "--seed",
        "9"
    ])
    .status
    .success());
    let runs = |d: &Path| fs::read(d.join("runs.csv")).unwrap();
    assert_eq!(runs(&a), runs(&b));
    assert_ne!(runs(&a), runs(&c));
}

#[test]
fn eval_prints_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let o = shapebench(&[
        "eval",
        "--config",
        cfg.to_str().unwrap(),
        "--x",
        "3.2,-1.6,-4.8,3.2",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "760.0");

    let bad = shapebench(&["eval", "--config", cfg.to_str().unwrap(), "--x", "1,1,1,1"]);
    assert_eq!(bad.status.code(), Some(1));
    let short = shapebench(&["eval", "--config", cfg.to_str().unwrap(), "--x", "1,-1"]);
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn benchmark_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    let grid = stdout(&shapebench(&[
        "benchmark",
        "--config",
        cfg,
        "--method",
        "grid",
    ]));
    assert!(grid.contains("y_star: 760.0"), "{grid}");
    assert!(grid.contains("evals: 2255"), "{grid}");
    let analytic = stdout(&shapebench(&[
        "benchmark",
        "--config",
        cfg,
        "--method",
        "analytic",
    ]));
    assert!(analytic.contains("y_star: 760.0"), "{analytic}");
    let ga = stdout(&shapebench(&[
        "benchmark",
        "--config",
        cfg,
        "--method",
        "long-ga",
    ]));
    assert!(ga.contains("evals: 1540"), "{ga}");
}

#[test]
fn landscape_to_file_and_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    let csv = tmp.path().join("slice.csv");
    let o = shapebench(&[
        "landscape",
        "--config",
        cfg,
        "--axes",
        "1,2",
        "--resolution",
        "20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let minima: usize = stdout(&o)
        .trim()
        .strip_prefix("local_minima: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(minima >= 1);
    assert_eq!(
        fs::read_to_string(&csv).unwrap().lines().count(),
        1 + 20 * 20
    );
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("slice.json")).unwrap()).unwrap();
    assert_eq!(sidecar["local_minima"], minima);
    assert_eq!(sidecar["axes"], serde_json::json!([1, 2]));

    let o = shapebench(&[
        "landscape",
        "--config",
        cfg,
        "--axes",
        "1,2",
        "--resolution",
        "20",
    ]);
    assert!(o.status.success());
    assert_eq!(o.stdout, fs::read(&csv).unwrap());
    assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("local_minima: {minima}")));
}

#[test]
fn argument_and_config_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = default_config(tmp.path());
    let cfg = cfg.to_str().unwrap();
    for args in [
        vec!["landscape", "--config", cfg, "--axes", "1,1"],
        vec!["landscape", "--config", cfg, "--axes", "0,2"],
        vec!["landscape", "--config", cfg, "--axes", "1,5"],
        vec![
            "landscape",
            "--config",
            cfg,
            "--axes",
            "1,2",
            "--resolution",
            "1",
        ],
        vec!["run", "--config", cfg, "--workers", "0"],
        vec!["run", "--config", "/nonexistent/config.json"],
        vec!["frobnicate"],
        vec!["run"],
    ] {
        let o = shapebench(&args);
        assert_eq!(
            o.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }

    let broken = write_config(
        tmp.path(),
        r#"{"algorithms": ["ga"], "master_seed": 1, "typo": 3}"#,
    );
    let o = shapebench(&["run", "--config", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("typo"));

    assert_eq!(shapebench(&["--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"objective": {"external": {"command": ["/nonexistent/simulator"]}}, "algorithms": ["rs"], "master_seed": 1}"#,
    );
    let o = shapebench(&["eval", "--config", cfg.to_str().unwrap(), "--x", "1,-1,0,0"]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn serve_synthetic_speaks_protocol() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_shapebench"))
        .arg("serve-synthetic")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"{\"x\":[3.2,-1.6,-4.8,3.2]}\n{\"x\":[0,0,0,0]}\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], r#"{"kwh":760.0}"#);
    assert!(lines[1].starts_with(r#"{"kwh":"#));
}
