//! The `sqfree` binary: outputs, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn sqfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqfree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sieve_count() {
    let o = sqfree(&["sieve-count", "--x", "100", "--k", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "61\n");
    let j: serde_json::Value = serde_json::from_slice(&sqfree(&["--json", "sieve-count", "--x", "10"]).stdout).unwrap();
    assert_eq!(j["count"], 7);
}

#[test]
fn named_witness() {
    let o = sqfree(&["verify-named", "--tag", "A1", "--prefix", "15", "--mode", "q-witness"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("certification FULL"), "{out}");
    let w: u64 = out.lines().next().unwrap().strip_prefix("witness ").unwrap().parse().unwrap();
    assert!((16_385..=32_769).contains(&w));
}

#[test]
fn figure_shift() {
    let o = sqfree(&["figure-shift", "--xmax", "1"]);
    assert_eq!(stdout(&o), "x,a_minus_main,q_minus_main,status\n1,0.3920728981,0.3920728981,EXACT\n");
    let dir = std::env::temp_dir().join(format!("sqfree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f.csv");
    let o = sqfree(&["figure-shift", "--xmax", "12", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.lines().nth(10).unwrap().starts_with("10,1.920728981,0.9207289815,"));
}

#[test]
fn exit_codes() {
    assert_eq!(sqfree(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(sqfree(&["sieve-count", "--x", "10", "--bogus"]).status.code(), Some(2));
    assert_eq!(sqfree(&["construct", "sample-counter", "--x-max", "100"]).status.code(), Some(2));
    let o = sqfree(&["admissible-max", "--x", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(sqfree(&["construct", "p", "--growth", "const:3", "--count", "10"]).status.code(), Some(1));
    assert_eq!(sqfree(&["verify-named", "--tag", "A1", "--prefix", "5", "--mode", "sums"]).status.code(), Some(0));
}

#[test]
fn seeded_runs_repeat_byte_for_byte() {
    let args = ["construct", "sample-counter", "--x-max", "5000", "--seed", "17"];
    let a = sqfree(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, sqfree(&args).stdout);
    let other = sqfree(&["construct", "sample-counter", "--x-max", "5000", "--seed", "18"]);
    assert_ne!(a.stdout, other.stdout);
    let trials = ["verify-appendix", "--trials", "50", "--seed", "3"];
    assert_eq!(sqfree(&trials).stdout, sqfree(&trials).stdout);
}

#[test]
fn admissible_max_and_bounds() {
    let o = sqfree(&["admissible-max", "--x", "10"]);
    assert!(stdout(&o).starts_with("A(10) = 8 [EXACT]"));
    let o = sqfree(&["sieve-bound", "--n", "100", "--q", "2"]);
    assert!(stdout(&o).contains("bound = 87"));
    let o = sqfree(&["sieve-bound", "--n", "100", "--optimize", "4"]);
    assert!(stdout(&o).starts_with("Q = 2\n"));
    assert_eq!(sqfree(&["sieve-bound", "--n", "100"]).status.code(), Some(1));
}

#[test]
fn constructions_print_known_prefixes() {
    assert!(stdout(&sqfree(&["construct", "p", "--count", "6"])).starts_with("terms: 1 2 3 4 7 11\n"));
    assert!(stdout(&sqfree(&["construct", "greedy-sums", "--count", "3"])).starts_with("terms: 1 5 21\n"));
    assert!(stdout(&sqfree(&["construct", "overp", "--threshold", "3"])).starts_with("n = 252 "));
    assert!(stdout(&sqfree(&["construct", "dense-q", "--anchor", "2", "--x", "10000"])).contains("n_2 = 5004"));
}

#[test]
fn crosscheck_uses_cache_and_flags_mismatches() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/oeis");
    let o = Command::new(env!("CARGO_BIN_EXE_sqfree"))
        .args(["crosscheck", "--id", "A005117", "--id", "A013928"])
        .env("SQFREE_OEIS_CACHE", &fixtures)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A013928: 1001 match, 0 mismatch"));
    let no_cache = Command::new(env!("CARGO_BIN_EXE_sqfree"))
        .args(["crosscheck", "--id", "A005117"])
        .env_remove("SQFREE_OEIS_CACHE")
        .output()
        .unwrap();
    assert_eq!(no_cache.status.code(), Some(1));

    let dir = std::env::temp_dir().join(format!("sqfree-xc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("b000051.txt"), "1 3\n2 5\n3 10\n").unwrap();
    let o = sqfree(&["crosscheck", "--bfile", dir.join("b000051.txt").to_str().unwrap()]);
    std::fs::write(dir.join("A999999.txt"), "1 3\n").unwrap();
    let missing_rule = sqfree(&["crosscheck", "--bfile", dir.join("A999999.txt").to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("index 3: b-file 10 computed 9"));
    assert_eq!(missing_rule.status.code(), Some(1));
}
