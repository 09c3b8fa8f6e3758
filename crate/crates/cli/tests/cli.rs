//! Drives the binary end to end. Golden files live in `tests/golden/`;
//! regenerate them with `UPDATE_GOLDEN=1 cargo test -p chernbott-cli`.

use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::{Command, Output};

fn chernbott(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chernbott"))
        .args(args)
        .env_remove("CHERNBOTT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn payload(args: &[&str]) -> Value {
    let out = chernbott(args);
    assert!(
        out.status.success(),
        "{args:?} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("JSON output");
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("series_ak_3_3_rank", &["series", "ak", "--k", "3", "--n", "3", "--method", "rank"]),
    ("series_ak_3_3_groebner", &["series", "ak", "--k", "3", "--n", "3", "--method", "groebner"]),
    ("series_ak_1_4_rank", &["series", "ak", "--k", "1", "--n", "4"]),
    ("series_ak_2_3_subset", &["series", "ak", "--k", "2", "--n", "3", "--subset", "2,3"]),
    ("series_ak_2_4_groebner", &["series", "ak", "--k", "2", "--n", "4", "--method", "groebner"]),
    ("series_ak_5_5_rank", &["series", "ak", "--k", "5", "--n", "5"]),
    ("series_invariant_2", &["series", "invariant", "--n", "2"]),
    ("series_invariant_3", &["series", "invariant", "--n", "3"]),
    ("series_invariant_4", &["series", "invariant", "--n", "4"]),
    ("series_cohomology_3", &["series", "cohomology", "--n", "3"]),
    ("series_cohomology_4", &["series", "cohomology", "--n", "4"]),
    ("verify_presentation_3_3", &["verify", "presentation", "--k", "3", "--n", "3"]),
    ("verify_presentation_2_4", &["verify", "presentation", "--k", "2", "--n", "4"]),
    ("verify_subsets_2_3", &["verify", "subsets", "--k", "2", "--n", "3"]),
    ("verify_subsets_1_4", &["verify", "subsets", "--k", "1", "--n", "4"]),
    ("verify_lemma29_2_3", &["verify", "lemma29", "--k", "2", "--n", "3", "--samples", "20", "--seed", "7"]),
    ("verify_conjecture14_max5", &["verify", "conjecture14", "--max-n", "5"]),
    ("verify_conjecture14_k1", &["verify", "conjecture14", "--k", "1", "--n-range", "1..5"]),
    ("verify_conjecture14_k2", &["verify", "conjecture14", "--k", "2", "--n-range", "2..5"]),
    ("verify_cohomology_3", &["verify", "cohomology", "--n", "3"]),
    ("count_forests_1", &["count", "forests", "--n", "1"]),
    ("count_forests_3", &["count", "forests", "--n", "3"]),
    ("count_forests_5_brute", &["count", "forests", "--n", "5", "--brute-force"]),
    ("count_eulerian_3", &["count", "eulerian", "--n", "3"]),
    ("count_eulerian_4", &["count", "eulerian", "--n", "4"]),
    ("check_prop24_3", &["check", "prop24", "--n", "3"]),
    ("check_prop24_4", &["check", "prop24", "--n", "4"]),
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for (name, args) in GOLDEN {
        let got = payload(args);
        let path = golden_dir().join(format!("{name}.json"));
        if update {
            std::fs::create_dir_all(golden_dir()).unwrap();
            let text = serde_json::to_string_pretty(&got).unwrap() + "\n";
            std::fs::write(&path, text).unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        let want: Value = serde_json::from_str(&text).unwrap();
        if got != want {
            mismatches.push(format!("{name}:\n  got  {got}\n  want {want}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

fn field(v: &Value, key: &str) -> Value {
    v.get(key).cloned().unwrap_or(Value::Null)
}

/// Published values checked through the CLI, independent of the snapshots.
#[test]
fn published_values() {
    let checks: Vec<(&[&str], &str, Value)> = vec![
        (&["series", "ak", "--k", "3", "--n", "3", "--method", "rank"], "series", json!([1, 2, 3, 1])),
        (&["series", "ak", "--k", "3", "--n", "3", "--method", "rank"], "total", json!(7)),
        (&["series", "ak", "--k", "3", "--n", "3", "--method", "groebner"], "series", json!([1, 2, 3, 1])),
        (&["series", "ak", "--k", "1", "--n", "4"], "series", json!([1, 1, 1, 1])),
        (&["series", "ak", "--k", "2", "--n", "3"], "series", json!([1, 2, 3, 1])),
        (&["series", "invariant", "--n", "3"], "series", json!([1, 0, 3, 2, 3, 0, 1])),
        (&["series", "invariant", "--n", "3"], "total", json!(10)),
        (
            &["series", "invariant", "--n", "4"],
            "series",
            json!([1, 0, 6, 4, 18, 12, 26, 12, 18, 4, 6, 0, 1]),
        ),
        (&["series", "invariant", "--n", "4"], "total", json!(108)),
        (&["series", "cohomology", "--n", "3"], "series", json!([1, 2, 2, 1])),
        (&["verify", "cohomology", "--n", "3"], "difference", json!([0, 0, 1, 0])),
        (&["count", "forests", "--n", "3"], "count", json!("7")),
        (&["count", "forests", "--n", "1"], "count", json!("1")),
        (&["count", "eulerian", "--n", "3"], "count", json!("10")),
        (&["check", "prop24", "--n", "3"], "implied_eul", json!(1)),
        (&["check", "prop24", "--n", "4"], "implied_eul", json!(22)),
    ];
    let mut failures = Vec::new();
    for (args, key, want) in checks {
        let got = field(&payload(args), key);
        if got != want {
            failures.push(format!("{} [{key}]: got {got}, want {want}", args.join(" ")));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(chernbott(&["bogus"]).status.code(), Some(2));
    assert_eq!(chernbott(&["series", "ak", "--k", "3", "--n", "3", "--frobnicate"]).status.code(), Some(2));
    let usage = chernbott(&["series", "ak", "--k", "3"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert_eq!(chernbott(&["series", "ak", "--k", "4", "--n", "3"]).status.code(), Some(2));
    assert_eq!(chernbott(&["count", "forests", "--n", "3", "--csv"]).status.code(), Some(2));
    assert_eq!(
        chernbott(&["series", "ak", "--k", "2", "--n", "3", "--method", "groebner", "--subset", "1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(chernbott(&["count", "eulerian", "--n", "6"]).status.code(), Some(3));
    assert_eq!(chernbott(&["series", "invariant", "--n", "6"]).status.code(), Some(3));
    assert_eq!(chernbott(&["verify", "presentation", "--k", "2", "--n", "6"]).status.code(), Some(3));
    assert_eq!(chernbott(&["series", "ak", "--k", "7", "--n", "7"]).status.code(), Some(3));
    assert_eq!(chernbott(&["series", "ak", "--k", "2", "--n", "6", "--method", "groebner"]).status.code(), Some(3));
    assert_eq!(chernbott(&["count", "forests", "--n", "3"]).status.code(), Some(0));
}

#[test]
fn csv_series() {
    let out = chernbott(&["series", "ak", "--k", "3", "--n", "3", "--csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "degree,dimension\n0,1\n1,2\n2,3\n3,1\n");
}

#[test]
fn deterministic_across_runs_and_threads() {
    for args in [
        &["series", "ak", "--k", "4", "--n", "5", "--seed", "99"][..],
        &["verify", "lemma29", "--k", "2", "--n", "4", "--samples", "10", "--seed", "5"][..],
        &["verify", "subsets", "--k", "2", "--n", "4"][..],
    ] {
        let a = payload(args);
        let b = payload(args);
        let mut single = args.to_vec();
        single.extend(["--threads", "1"]);
        let c = payload(&single);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
    let s1 = payload(&["series", "ak", "--k", "3", "--n", "4", "--seed", "1"]);
    let s2 = payload(&["series", "ak", "--k", "3", "--n", "4", "--seed", "2"]);
    assert_eq!(s1["series"], s2["series"]);
    assert_ne!(s1["details"]["primes"], s2["details"]["primes"]);
}

#[test]
fn envelope_fields() {
    let v = payload(&["series", "ak", "--k", "2", "--n", "4"]);
    for key in ["command", "parameters", "seed", "version", "series", "total"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "series ak");
    assert_eq!(v["parameters"]["n"], 4);
    let raw = chernbott(&["count", "forests", "--n", "2"]);
    let raw: Value = serde_json::from_slice(&raw.stdout).unwrap();
    assert!(raw["elapsed_ms"].is_u64());
}

#[test]
fn cache_dir_from_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let fresh = payload(&["series", "ak", "--k", "2", "--n", "4", "--cache-dir", path]);
    let files = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(files > 0);
    let cached = payload(&["series", "ak", "--k", "2", "--n", "4", "--cache-dir", path]);
    assert_eq!(fresh, cached);

    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_chernbott"))
        .args(["series", "ak", "--k", "2", "--n", "3"])
        .env("CHERNBOTT_CACHE_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(std::fs::read_dir(env_dir.path()).unwrap().count() > 0);
}

#[test]
fn large_counts_are_strings() {
    let v = payload(&["count", "forests", "--n", "30"]);
    assert!(v["count"].is_string());
    let v = payload(&["series", "cohomology", "--n", "20"]);
    // 20! exceeds 2^53
    assert!(v["total"].is_string());
}
