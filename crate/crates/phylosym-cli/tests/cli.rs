//! End-to-end tests of the installed binary: output formats, determinism,
//! exit codes. Small --order values keep every invocation fast; none of the
//! checked values depend on the truncation order.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phylosym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn counts_table_matches_known_values() {
    let out = run(&["counts", "--max-n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,b_n,u_n,W_n"));
    assert!(text.contains("4,15,2,5/8"), "{text}");
    assert!(text.contains("8,135135,23,429/128"), "{text}");
}

#[test]
fn pn_rows_are_exact_fractions() {
    let out = run(&["pn", "--max-n", "8", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("\n7,13/99,"), "{text}");
    assert!(text.contains("\n8,12497/184041,"), "{text}");
}

#[test]
fn constants_json_has_the_solved_rho() {
    let out = run(&["constants", "--order", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid JSON");
    let rho = v["rho"].as_f64().unwrap();
    assert!((rho - 0.589_918_409_274_932_2).abs() < 1e-12);
    assert!((v["b"].as_f64().unwrap() - 4.0 * rho).abs() < 1e-15);
    assert!((v["rho_half"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["provenance"]["a"].is_string());
}

#[test]
fn dist_moments_are_exact() {
    let out = run(&["dist", "--model", "otter", "--n", "8", "--moments", "--order", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).expect("valid JSON");
    assert_eq!(v["mean"], "74/23");
    assert_eq!(v["coincidence"], "137/529");
}

#[test]
fn dist_table_has_gaussian_overlay() {
    let out = run(&["dist", "--model", "phylo", "--n", "8", "--order", "16"]);
    let text = stdout_of(&out);
    assert!(text.starts_with("k,probability,decimal,gaussian"), "{text}");
    assert!(text.contains("2,64/143,"), "{text}");
}

#[test]
fn histo_emits_plot_ready_columns() {
    let out = run(&[
        "histo", "--model", "otter", "--n", "8", "--trials", "500", "--order", "16",
    ]);
    let text = stdout_of(&out);
    assert!(text.starts_with("k,count,frequency,exact_probability,gaussian"), "{text}");
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let args = ["sample", "--model", "phylo", "--n", "12", "--trials", "2000", "--order", "12", "--seed", "11"];
    let first = stdout_of(&run(&args));
    let second = stdout_of(&run(&args));
    assert_eq!(first, second, "same seed must reproduce byte-identical output");
    let mut other_seed = args;
    other_seed[10] = "12";
    let third = stdout_of(&run(&other_seed));
    assert_ne!(first, third, "distinct seeds should differ");
}

#[test]
fn verify_fast_exits_zero() {
    let out = run(&["verify", "--order", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("0 failed"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn bfile_check_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "# prefix\n1 1\n2 1\n3 1\n4 2\n").unwrap();
    let out = run(&["bfile-check", "--id", "a001190", "--path", good.to_str().unwrap(), "--order", "32"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("4 lines checked"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 1\n2 1\n3 1\n4 3\n").unwrap();
    let out = run(&["bfile-check", "--id", "a001190", "--path", bad.to_str().unwrap(), "--order", "32"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("should be 2"), "{}", stderr_of(&out));

    let malformed = dir.path().join("malformed.txt");
    std::fs::write(&malformed, "0 1\none 1\n").unwrap();
    let out = run(&["bfile-check", "--id", "a001147", "--path", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("line 2"), "{}", stderr_of(&out));

    let sparse = dir.path().join("sparse.txt");
    std::fs::write(&sparse, "1 1\n2 2\n3 2\n4 10\n60 123\n").unwrap();
    let out = run(&["bfile-check", "--id", "a003609", "--path", sparse.to_str().unwrap(), "--order", "32"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("1 beyond the computed range"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["dist", "--model", "otter"]);
    assert_eq!(out.status.code(), Some(2), "missing --n is a usage error");
    let out = run(&["dist", "--model", "neither", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
}
