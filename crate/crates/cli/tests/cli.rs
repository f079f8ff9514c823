//! End-to-end CLI tests: every subcommand through the real binary, with
//! the exit-code contract (0 success, 1 infeasible/invalid model,
//! 2 usage or I/O error, 3 solver failure).

use std::path::Path;
use std::process::{Command, Output};

fn ucsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn gen_small(dir: &Path) {
    let out = ucsim(&[
        "gen",
        "--out",
        dir.to_str().unwrap(),
        "--regions",
        "1",
        "--slots",
        "6",
        "--peak-load-mw",
        "1200",
        "--res-penetration",
        "0.3",
        "--unit-count-scale",
        "0.2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_validate_solve_compare_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let case = tmp.path().join("case");
    gen_small(&case);

    let out = ucsim(&["validate", case.to_str().unwrap()]);
    assert!(out.status.success());

    for variant in ["mst", "agg"] {
        let run = tmp.path().join(variant);
        let out = ucsim(&[
            "solve",
            case.to_str().unwrap(),
            "--out",
            run.to_str().unwrap(),
            "--variant",
            variant,
            "--gap",
            "0.01",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(run.join("dispatch.csv").exists());
        assert!(run.join("result.json").exists());
        assert!(run.join("metadata.json").exists());
        // The persisted gap honors the request.
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(run.join("metadata.json")).unwrap())
                .unwrap();
        assert!(meta["gap"].as_f64().unwrap() <= 0.01 + 1e-12);
        assert_eq!(meta["backend"], "reference");
    }

    let out = ucsim(&[
        "compare",
        case.to_str().unwrap(),
        tmp.path().join("mst").to_str().unwrap(),
        tmp.path().join("agg").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("objective"), "{table}");

    // Comparing a run against itself is all-zero deltas.
    let out = ucsim(&[
        "compare",
        case.to_str().unwrap(),
        tmp.path().join("mst").to_str().unwrap(),
        tmp.path().join("mst").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("max_commitment_diff,,,0.0000"), "{table}");
}

#[test]
fn rolling_solve_writes_window_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let case = tmp.path().join("case");
    gen_small(&case);
    let run = tmp.path().join("roll");
    let out = ucsim(&[
        "roll",
        case.to_str().unwrap(),
        "--out",
        run.to_str().unwrap(),
        "--variant",
        "mst",
        "--gap",
        "0.01",
        "--window-slots",
        "4",
        "--commit-slots",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("window"), "{text}");
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["horizon_plan"]["window_slots"], 4);
}

#[test]
fn infeasible_model_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let case = tmp.path().join("case");
    gen_small(&case);
    // Blow the load past any feasible capacity.
    let traces = case.join("traces.csv");
    let text = std::fs::read_to_string(&traces).unwrap();
    let bumped: String = text
        .lines()
        .map(|l| {
            if l.contains("consumer_load_mw") {
                let mut parts: Vec<&str> = l.split(',').collect();
                parts[3] = "999999";
                parts.join(",") + "\n"
            } else {
                l.to_string() + "\n"
            }
        })
        .collect();
    std::fs::write(&traces, bumped).unwrap();
    let out = ucsim(&[
        "solve",
        case.to_str().unwrap(),
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_case_exits_one_with_report() {
    let tmp = tempfile::tempdir().unwrap();
    let case = tmp.path().join("case");
    gen_small(&case);
    let toml_path = case.join("case.toml");
    let text = std::fs::read_to_string(&toml_path).unwrap();
    std::fs::write(&toml_path, text.replacen("p_min_mw = ", "p_min_mw = 99999.0 #", 1)).unwrap();
    let out = ucsim(&["validate", case.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_min"));
}

#[test]
fn usage_and_io_errors_exit_two() {
    let out = ucsim(&["solve", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ucsim(&["solve", "/definitely/missing/case", "--out", "/tmp/unused-ucsim-out"]);
    assert_eq!(out.status.code(), Some(2));

    let tmp = tempfile::tempdir().unwrap();
    let case = tmp.path().join("case");
    gen_small(&case);
    let out = Command::new(env!("CARGO_BIN_EXE_ucsim"))
        .env("UCSIM_BACKEND", "no-such-backend")
        .args([
            "solve",
            case.to_str().unwrap(),
            "--out",
            tmp.path().join("x").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_prints_a_timing_table() {
    let out = ucsim(&[
        "bench",
        "--reps",
        "1",
        "--slots",
        "4",
        "--penetrations",
        "0.0",
        "--variants",
        "mst,buc",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.lines().count() >= 3, "{table}");
    assert!(table.contains("mst") && table.contains("buc"), "{table}");
}
