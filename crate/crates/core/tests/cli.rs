use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartesian-topk")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn all_algorithms_emit_one_row_each_and_agree() {
    let out = cli(&["--algorithm", "all", "--m", "4", "--n", "4", "--k", "10", "--seed", "1", "--validate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("algorithm,replicate,seed,m,n,k,alpha,distribution,wall_time_ns,kth_value"));
    let kth: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(9).unwrap()).collect();
    assert!(kth.iter().all(|v| *v == kth[0]), "{kth:?}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&cli(&["--k", "0"])), 1);
    assert_eq!(code(&cli(&["--algorithm", "nope"])), 1);
    assert_eq!(code(&cli(&["--algorithm", "fast-soft-tree", "--alpha", "2.0"])), 1);
    assert_eq!(code(&cli(&["--m", "2", "--n", "2", "--k", "5"])), 1);
    assert_eq!(code(&cli(&["--unknown-flag"])), 1);
    assert_eq!(code(&cli(&["--help"])), 0);
}

#[test]
fn guard_violation_exits_1() {
    let out = Command::new(env!("CARGO_BIN_EXE_cartesian-topk"))
        .args(["--algorithm", "brute-force", "--m", "3", "--n", "10", "--k", "1"])
        .env("CARTESIAN_TOPK_GUARD", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn file_input_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    fs::write(&good, "1, 2 3\n\n4e0 5\n").unwrap();
    let out = cli(&["--input-file", good.to_str().unwrap(), "--k", "6", "--validate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\n3 x\n").unwrap();
    let out = cli(&["--input-file", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 3"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&cli(&["--input-file", missing.to_str().unwrap()])), 2);
}

#[test]
fn output_file_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = cli(&["--algorithm", "sort-tree", "--m", "8", "--k", "16", "--stats", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("sort-tree: 16.00"));
    let csv = fs::read_to_string(path).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().next().unwrap().ends_with("pops_level_3"));
}

#[test]
fn gnuplot_subcommand() {
    let out = cli(&["gnuplot", "runs.csv", "--algorithm", "sort-tree"]);
    assert_eq!(code(&out), 0);
    let script = String::from_utf8(out.stdout).unwrap();
    assert!(script.contains("set logscale xy") && script.contains("'runs.csv'"));
}
