//! End-to-end checks of the command-line surface, driving the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simplex-cycling"))
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn generate_canonical(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("p1.txt");
    let output = bin()
        .args(["generate", "--a11", "0.4", "--a12", "0.2", "--mu", "-2.15/2.3"])
        .args(["--scale", "2.3", "--name", "problem-one", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    path
}

#[test]
fn generate_writes_the_canonical_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_canonical(dir.path());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("maximize"));
    assert!(text.contains("2.3 2.15 -13.55 -0.4"));
    assert!(text.contains("0.4 0.2 -1.4 -0.2"));
    assert!(text.contains("-7.8 -1.4 7.8 0.4"));

    // determinism: a second run produces identical bytes
    let path2 = dir.path().join("p1-again.txt");
    let output = bin()
        .args(["generate", "--a11", "0.4", "--a12", "0.2", "--mu", "-2.15/2.3"])
        .args(["--scale", "2.3", "--name", "problem-one", "-o"])
        .arg(&path2)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert_eq!(text, std::fs::read_to_string(&path2).unwrap());
}

#[test]
fn generate_exports_mps() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("p1.txt");
    let mps = dir.path().join("p1.mps");
    let output = bin()
        .args(["generate", "--a11", "0.4", "--a12", "0.2", "--mu", "-2.15/2.3", "--scale", "2.3"])
        .arg("-o")
        .arg(&instance)
        .arg("--mps")
        .arg(&mps)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&mps).unwrap();
    assert!(text.starts_with("* Maximization instance"));
    assert!(text.contains("ENDATA"));
    assert!(stdout(&output).contains("dantzig=true expand=true"));
}

#[test]
fn run_reports_the_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_canonical(dir.path());
    let log = dir.path().join("iters.csv");
    let output = bin()
        .args(["run", "--pricing", "dantzig", "--ratio", "standard", "--arith", "exact"])
        .arg("--instance")
        .arg(&path)
        .arg("--log")
        .arg(&log)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("CYCLES period=6"), "{output:?}");
    let csv = std::fs::read_to_string(&log).unwrap();
    assert!(csv.starts_with("n,entering,leaving,pivot_row,alpha,kind,objective,x1"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn run_steepest_edge_unbounded() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_canonical(dir.path());
    let output = bin()
        .args(["run", "--pricing", "steepest"])
        .arg("--instance")
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("UNBOUNDED at=2"));
}

#[test]
fn run_expand_float_backend() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate_canonical(dir.path());
    let output = bin()
        .args(["run", "--ratio", "expand", "--arith", "float", "--max-iters", "500"])
        .arg("--instance")
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("ITERATION_LIMIT"), "{output:?}");
}

#[test]
fn verify_passes_on_cycling_member() {
    let output = bin()
        .args(["verify", "--a11", "0.4", "--a12", "0.2", "--mu", "-2.15/2.3"])
        .args(["--scale", "2.3", "--iters", "60"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(stdout(&output).starts_with("PASS"));
}

#[test]
fn verify_fails_on_escaping_member_with_break_report() {
    let output = bin()
        .args(["verify", "--a11", "0.6", "--a12", "0.2", "--mu", "-0.8", "--iters", "100"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    assert!(text.contains("FAIL"), "{text}");
    assert!(text.contains("broke at even iteration 14"), "{text}");
    assert!(text.contains("k=Some(6)"), "{text}");
    assert!(text.contains("UNBOUNDED at=15"), "{text}");
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("region.csv");
    let svg = dir.path().join("region.svg");
    let output = bin()
        .args(["sweep", "--a11", "0.1:0.9:4", "--a12", "0.05:0.45:4", "--mu", "mid"])
        .arg("--csv")
        .arg(&csv)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(stdout(&output).contains("agree on every non-boundary cell"));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv_text.lines().count(), 17);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<?xml"));
    assert!(svg_text.trim_end().ends_with("</svg>"));
}

#[test]
fn usage_errors_exit_with_two() {
    // unknown subcommand (clap)
    let output = bin().arg("frobnicate").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    // unreadable instance file
    let output = bin()
        .args(["run", "--instance", "/nonexistent/nope.txt"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    // malformed numeric flag
    let output = bin()
        .args(["verify", "--a11", "1e5", "--a12", "0.2", "--mu", "-0.9"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    // empty sweep range
    let output = bin()
        .args(["sweep", "--a11", "0.5:0.1:4", "--a12", "0.05:0.45:4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn generate_steepest_edge_instance_and_cycle_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("se.txt");
    let output = bin()
        .args(["generate", "--a11", "0.4", "--a12", "0.2", "--mu", "-1.75"])
        .args(["--steepest-edge-row", "0,-20", "--rhs", "1", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("0 -20 156 8"));
    assert!(text.contains("0 0 1"));

    let output = bin()
        .args(["run", "--pricing", "steepest"])
        .arg("--instance")
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(stdout(&output).contains("CYCLES period=6"), "{output:?}");
}
