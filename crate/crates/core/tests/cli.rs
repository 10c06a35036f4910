//! Command-line exit codes and outputs.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btl-bounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.display().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bcrb", "unknown.json", r#"{"k": 5, "bogus": 1}"#),
        (
            "bcrb",
            "descending.json",
            r#"{"k": 5, "n_grid": [100, 50]}"#,
        ),
        (
            "bcrb",
            "small_shape.json",
            r#"{"k": 5, "prior": {"a": 2.0, "b": 1.0}}"#,
        ),
        ("it-bound", "syntax.json", "{"),
        ("em-fit", "zero_trials.json", r#"{"trials": 0}"#),
    ];
    for (sub, name, json) in cases {
        let path = config(dir.path(), name, json);
        let out = run(&[sub, "--config", &path]);
        assert_eq!(
            code(&out),
            2,
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(out.stdout.is_empty());
    }
    assert_eq!(code(&run(&["bcrb", "--config", "/nonexistent/x.json"])), 2);
    assert_eq!(code(&run(&["bcrb", "--threads", "0"])), 2);
    assert_eq!(code(&run(&["no-such-subcommand"])), 2);
}

#[test]
fn singular_information_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = config(
        dir.path(),
        "empty_graph.json",
        r#"{"k": 6, "n_grid": [60], "topologies": [{"kind": "erdos-renyi", "k": 6, "p": 0.0}]}"#,
    );
    let out = run(&["hcrb", "--config", &path]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_lists_schemas() {
    let out = run(&["em-fit", "--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains(
        "topology,topology_seed,k,a,b,n,trials,seed,em_mse,em_mse_ci95,it_bound,cor1_bound,bcrb"
    ));
    let out = run(&["phase-transition", "--help"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("p_normalized"));
}

#[test]
fn writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bcrb.csv");
    let plot = dir.path().join("bcrb.gp");
    let out = run(&[
        "bcrb",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("topology,topology_seed,k,a,b,n,bcrb"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 5);
    for row in &rows {
        let bcrb: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(bcrb > 0.0 && bcrb.is_finite());
    }
    let script = std::fs::read_to_string(&plot).unwrap();
    assert!(script.contains(csv.to_str().unwrap()));
    assert!(script.contains("set logscale xy"));
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("it.csv");
    let to_file = run(&["it-bound", "--out", csv.to_str().unwrap()]);
    let to_stdout = run(&["it-bound"]);
    assert_eq!(code(&to_file), 0);
    assert_eq!(code(&to_stdout), 0);
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        String::from_utf8(to_stdout.stdout).unwrap()
    );
}
