//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vdw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw"))
        .args(args)
        .current_dir(dir)
        .env("VDW_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn compute_exact_dne_and_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(dir.path(), &["compute", "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(1,1;2) = 9"));

    let out = vdw(dir.path(), &["compute", "--a", "2", "--b", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("dne (b = 2a)"));

    let out = vdw(dir.path(), &["compute", "--a", "2", "--b", "2", "--cap", "15"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(2,2;2) >= 15"));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    // a > b is rejected as usage.
    let out = vdw(dir.path(), &["compute", "--a", "5", "--b", "1"]);
    assert_eq!(out.status.code(), Some(3));
    // Unknown flag is usage too.
    let out = vdw(dir.path(), &["compute", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(3));
    // Inapplicable construction.
    let out = vdw(dir.path(), &["construct", "--scheme", "thm24", "--a", "1", "--b", "2"]);
    assert_eq!(out.status.code(), Some(1));
    // Unknown scheme.
    let out = vdw(dir.path(), &["construct", "--scheme", "nope"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn construct_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("thm25_b4.json");
    let out = vdw(
        dir.path(),
        &["construct", "--scheme", "thm25", "--b", "4", "--check", "--out", cert.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(1,4;2) >= 58"));

    let out = vdw(dir.path(), &["verify", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid"));

    // Tamper: make the coloring monochromatic.
    let mut parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let n = parsed["colors"].as_array().unwrap().len();
    parsed["colors"] = serde_json::json!(vec![0u8; n]);
    fs::write(&cert, parsed.to_string()).unwrap();
    let out = vdw(dir.path(), &["verify", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("invalid"));

    // Not JSON at all.
    fs::write(&cert, "not json").unwrap();
    let out = vdw(dir.path(), &["verify", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_prefix_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(
        dir.path(),
        &["construct", "--scheme", "thm41", "--a", "2", "--n", "100000", "--check"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("no monochromatic 4-term 2-progression on [1,100000]"));

    let out = vdw(
        dir.path(),
        &["construct", "--scheme", "parity", "--a", "3", "--n", "50000", "--check"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("triple-free on [1,50000]"));

    let out = vdw(
        dir.path(),
        &["construct", "--scheme", "thm31", "--a", "2", "--b", "3", "--n", "50000", "--check"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(2,3;3) >= 50001"));

    let out = vdw(
        dir.path(),
        &[
            "construct", "--scheme", "thm32", "--a", "2", "--b", "2", "--q", "2", "--p", "sqrt2",
            "--modulus", "6", "--n", "50000", "--check",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(2,2;6) >= 50001"));

    let out = vdw(dir.path(), &["construct", "--scheme", "prop31", "--a", "2", "--b", "3", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(2,3;3) >= 92"));

    let out = vdw(dir.path(), &["construct", "--scheme", "prop32", "--b", "3", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("N(1,3;3) >= 119"));
}

#[test]
fn table_small_grid_csv_and_md() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(
        dir.path(),
        &[
            "table", "--max-a", "2", "--max-b", "4", "--budget-seconds-per-cell", "60",
            "--format", "csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    assert!(csv.starts_with("a,b,r,status,value,source,seconds\n"));
    assert!(csv.contains("1,1,2,exact,9,"));
    assert!(csv.contains("1,2,2,dne,,"));
    assert!(csv.contains("1,3,2,exact,39,"));
    assert!(csv.contains("2,2,2,exact,16,"));
    assert!(csv.contains("2,3,2,exact,46,"));
    assert!(csv.contains("2,4,2,dne,,"));

    // Budget 0: cells hit the cache from the run above, or fall back to a
    // construction bound.
    let out = vdw(
        dir.path(),
        &["table", "--max-a", "1", "--max-b", "3", "--budget-seconds-per-cell", "0", "--format", "md"],
    );
    let md1 = stdout(&out);
    assert!(md1.contains("| 1 | 1 | 2 | exact | 9 | cache |"));
    assert!(md1.contains("| 1 | 2 | 2 | dne | dne |"));
    assert!(md1.contains("| 1 | 3 | 2 | exact | 39 | cache |"));
    // Byte-identical across runs.
    let out = vdw(
        dir.path(),
        &["table", "--max-a", "1", "--max-b", "3", "--budget-seconds-per-cell", "0", "--format", "md"],
    );
    assert_eq!(md1, stdout(&out));

    // With an empty cache and no budget, non-dne cells report the best
    // construction bound.
    let fresh = tempfile::tempdir().unwrap();
    let out = vdw(
        fresh.path(),
        &["table", "--max-a", "1", "--max-b", "3", "--budget-seconds-per-cell", "0", "--format", "md"],
    );
    assert!(stdout(&out).contains("| 1 | 3 | 2 | lower-bound | >= 39 | Theorem 2.5 |"));
}

#[test]
fn dor_table_has_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(dir.path(), &["dor-table", "--max-a", "3", "--max-b", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 24);
    assert_eq!(lines[0], "(1,1) inf van der Waerden's Theorem");
    assert_eq!(lines[1], "(1,2) 1 Theorem 2.1");
    assert_eq!(lines[10], "(2,3) 2 Theorem 3.1");
    assert_eq!(lines[23], "(3,9) 2-3 Theorem 3.2");
}

#[test]
fn bounds_report_lists_sources() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(dir.path(), &["bounds", "--a", "2", "--b", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("lower 46  (Corollary 2.1)"));
    assert!(text.contains("best lower: 46"));

    let out = vdw(dir.path(), &["bounds", "--a", "1", "--b", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("dor: (1,2) 1 Theorem 2.1"));
}

#[test]
fn cache_hit_reverifies_and_poisoning_forces_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let out = vdw(dir.path(), &["compute", "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));

    // Second run answers from the cache.
    let out = vdw(dir.path(), &["compute", "--a", "1", "--b", "1"]);
    assert!(stdout(&out).contains("N(1,1;2) = 9"));
    assert!(stdout(&out).contains("cached"));

    // Poison the certificate: the claim must be recomputed, never echoed.
    let cert = dir.path().join("cache").join("1_1_2.json");
    let mut parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    parsed["n"] = serde_json::json!(998);
    parsed["colors"] = serde_json::json!(vec![0u8; 998]);
    fs::write(&cert, parsed.to_string()).unwrap();
    let mut index: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cache/index.json")).unwrap()).unwrap();
    index["1,1,2"]["value"] = serde_json::json!(999);
    fs::write(dir.path().join("cache/index.json"), index.to_string()).unwrap();

    let out = vdw(dir.path(), &["compute", "--a", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("N(1,1;2) = 9"), "poisoned cache leaked: {text}");
    assert!(!text.contains("cached"));
}
