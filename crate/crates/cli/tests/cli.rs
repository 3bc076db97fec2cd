use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypembed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const K4: &str = "instance n=4 h=2 lambda=1 m=2\ncolors r=1,1,1\nedge 1 2 color=1\n";

#[test]
fn check_admissible_uniform() {
    let o = run(&["check", "--n", "30", "--h", "3", "--m", "8", "--r", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("admissible yes"));
}

#[test]
fn check_inadmissible_exits_3() {
    let o = run(&["check", "--n", "5", "--h", "2", "--m", "2", "--r", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("admissible no"));
}

#[test]
fn embed_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k4.txt", K4);
    let out = dir.path().join("out.txt");
    let o = run(&["embed", input.to_str().unwrap(), "--seed", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("edge")).count(), 6);
    assert!(text.contains("# certificate pass"));
    let v = run(&["verify", out.to_str().unwrap(), "--input", input.to_str().unwrap()]);
    assert!(v.status.success());
}

#[test]
fn embed_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "j.txt", "instance n=9 h=2 lambda=1 m=3\ncolors r=2*4\nedge 1 2 color=1\n");
    let a = run(&["embed", input.to_str().unwrap(), "--connected", "--seed", "4", "--format", "json", "--trace"]);
    let b = run(&["embed", input.to_str().unwrap(), "--connected", "--seed", "4", "--format", "json", "--trace"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["schema"], "hypembed/result/v1");
    assert_eq!(doc["trace"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_detects_recolour() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k4.txt", K4);
    let o = run(&["embed", input.to_str().unwrap()]);
    let text = stdout(&o).replacen("edge 3 4 color=1", "edge 3 4 color=2", 1);
    let bad = write(&dir, "bad.txt", &text);
    let v = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("# certificate fail"));
}

#[test]
fn connected_r1_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k4.txt", K4);
    let o = run(&["embed", input.to_str().unwrap(), "--connected=1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn partial_budget_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.txt", "instance n=4 h=2 lambda=2 m=4\ncolors r=5,1 s=5\n");
    let o = run(&["embed-partial", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn embed_partial_connected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p.txt", "instance n=9 h=2 lambda=1 m=3\ncolors r=2*4 s=2\nedge 1 2 color=1\n");
    let o = run(&["embed-partial", input.to_str().unwrap(), "--connected=all"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# certificate pass"));
}

#[test]
fn parse_error_exit_1() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.txt", "instance n=4 h=2 lambda=1 m=2\nbogus\n");
    let o = run(&["embed", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn bounds_tables() {
    let o = run(&["bounds", "qmax", "--m", "10", "--h", "3", "--n", "38", "--r", "6", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((doc["qmax"].as_i64(), doc["qmax_connected"].as_i64()), (Some(105), Some(103)));
    let o = run(&["bounds", "cruse", "--m-max", "4", "--n-max", "10"]);
    assert!(stdout(&o).lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["3", "8", "4"]));
    let o = run(&["bounds", "preset", "--part", "IV", "--variant", "sub", "--n", "21", "--h", "3", "--m", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn oracle_and_search() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "k4.txt", K4);
    let o = run(&["oracle", input.to_str().unwrap()]);
    assert!(stdout(&o).contains("count 2"));
    let big = write(&dir, "big.txt", "instance n=12 h=2 lambda=1 m=2\ncolors r=1*11\n");
    assert_eq!(run(&["oracle", big.to_str().unwrap()]).status.code(), Some(1));
    let s = run(&["search", "--h", "2", "--m-max", "2", "--n-max", "4"]);
    assert!(s.status.success());
    assert!(stdout(&s).contains("finding"));
}

#[test]
fn jobs_batch() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", K4);
    let b = write(&dir, "b.txt", "instance n=6 h=2 lambda=1 m=2\ncolors r=1*5\n");
    let o = run(&["embed", a.to_str().unwrap(), b.to_str().unwrap(), "--jobs", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("# certificate pass").count(), 2);
}
