//! End-to-end tests of the `msp` binary: file formats, subcommands,
//! exit codes, and the serial/parallel determinism of `frontier`.

use std::path::Path;
use std::process::{Command, Output};

fn msp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_segment_instance(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("inst.json");
    std::fs::write(
        &path,
        r#"{"kind":"msp","nodes":2,"arcs":[[0,1,1.0,1.0]],
           "modes":[[1,1,0,1],[2,1,1,4]],"demand":[[0,1,4]],"budget":1}"#,
    )
    .unwrap();
    path
}

#[test]
fn gen_esum_then_oracle_decides_true() {
    let dir = tempfile::tempdir().unwrap();
    let out = msp(
        dir.path(),
        &["gen", "esum", "--items", "1,2", "--target", "2", "--out", "esum.json"],
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("esum.meta.json").exists());
    let out = msp(dir.path(), &["oracle", "esum.json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("decision = true"));
}

#[test]
fn gen_esum_then_oracle_decides_false() {
    let dir = tempfile::tempdir().unwrap();
    msp(
        dir.path(),
        &["gen", "esum", "--items", "2,4", "--target", "3", "--out", "esum.json"],
    );
    let out = msp(dir.path(), &["oracle", "esum.json"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("decision = false"));
}

#[test]
fn segment_prints_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_segment_instance(dir.path());
    let out = msp(dir.path(), &["segment", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("psi0 = (4, 4)"), "{text}");
    assert!(text.contains("psi1 = (8, 1)"), "{text}");
    assert!(text.contains("delta = 1"), "{text}");
}

#[test]
fn segment_premise_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // tau_1 < tau_0 breaks the segment premises
    std::fs::write(
        &path,
        r#"{"kind":"msp","nodes":2,"arcs":[[0,1,1.0,1.0]],
           "modes":[[2,1,0,1],[1,1,1,4]],"demand":[[0,1,4]],"budget":1}"#,
    )
    .unwrap();
    let out = msp(dir.path(), &["segment", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn frontier_rows_lie_on_segment() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_segment_instance(dir.path());
    let out = msp(
        dir.path(),
        &["frontier", inst.to_str().unwrap(), "--samples", "3", "--epsilon", "0.1"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let rows = msp_core::io::parse_frontier_csv(&stdout(&out)).unwrap();
    // psi0 = (4,4), psi1 = (8,1), delta = 1
    let seg = msp_core::solvers::Segment {
        p0: msp_core::ObjectivePoint::new(4.0, 4.0),
        p1: msp_core::ObjectivePoint::new(8.0, 1.0),
        delta: 1.0,
    };
    let lambdas: Vec<f64> = rows
        .iter()
        .filter(|r| r.source == msp_core::io::FrontierSource::Sample)
        .map(|r| r.lambda)
        .collect();
    assert_eq!(lambdas, vec![0.0, 0.5, 1.0]);
    for r in &rows {
        if r.source == msp_core::io::FrontierSource::Sample {
            assert!(seg.contains(r.point, 1e-9), "row {r:?} off segment");
        }
    }
}

#[test]
fn frontier_parallel_matches_serial_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_segment_instance(dir.path());
    let serial = msp(
        dir.path(),
        &["frontier", inst.to_str().unwrap(), "--samples", "7", "--epsilon", "0.1"],
    );
    let parallel = msp(
        dir.path(),
        &["frontier", inst.to_str().unwrap(), "--samples", "7", "--epsilon", "0.1", "--parallel"],
    );
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(parallel.status.code(), Some(0));
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn solve_verify_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_segment_instance(dir.path());
    let out = msp(
        dir.path(),
        &[
            "solve-fixed-flow",
            inst.to_str().unwrap(),
            "--epsilon",
            "0.1",
            "--out",
            "sol.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = msp(dir.path(), &["verify", inst.to_str().unwrap(), "sol.json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("feasible"));
    let out = msp(dir.path(), &["evaluate", inst.to_str().unwrap(), "sol.json"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("T = "));
}

#[test]
fn verify_tampered_solution_reports_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write_segment_instance(dir.path());
    msp(
        dir.path(),
        &[
            "solve-fixed-flow",
            inst.to_str().unwrap(),
            "--epsilon",
            "0.1",
            "--out",
            "sol.json",
        ],
    );
    // remove the installed vehicles while keeping the mode-1 split
    let text = std::fs::read_to_string(dir.path().join("sol.json")).unwrap();
    let sol: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut sol = sol;
    sol["layout"][0][0] = serde_json::json!(0.0);
    std::fs::write(dir.path().join("bad.json"), serde_json::to_string(&sol).unwrap()).unwrap();
    let out = msp(dir.path(), &["verify", inst.to_str().unwrap(), "bad.json"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("capacity exceeded"),
        "{out:?}"
    );
}

#[test]
fn two_approx_on_dindp_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.json");
    std::fs::write(
        &path,
        r#"{"kind":"dindp","nodes":3,
           "arcs":[[0,1,1.0,1.0],[1,2,1.0,1.0],[2,0,1.0,1.0]],
           "beta":4.0,"gamma":9.0}"#,
    )
    .unwrap();
    let out = msp(dir.path(), &["two-approx", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("R = 9"), "{out:?}");
}

#[test]
fn gen_outputs_are_reparseable() {
    let dir = tempfile::tempdir().unwrap();
    // generator closure property across kinds, including a chained one
    msp(
        dir.path(),
        &["gen", "ssum", "--items", "1,2,3", "--target", "3", "--bound", "3", "--out", "ssum.json"],
    );
    msp(
        dir.path(),
        &["gen", "ukps", "--items", "2:1", "--target", "4", "--bound", "2", "--out", "ukps.json"],
    );
    std::fs::write(
        dir.path().join("cycle.json"),
        r#"{"kind":"dindp","nodes":3,
           "arcs":[[0,1,1.0,1.0],[1,2,1.0,1.0],[2,0,1.0,1.0]],
           "beta":3.0,"gamma":9.0}"#,
    )
    .unwrap();
    let out = msp(
        dir.path(),
        &["gen", "dindp2msp", "--input", "cycle.json", "--out", "cycle-msp.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    for file in ["ssum.json", "ukps.json", "cycle-msp.json"] {
        let parsed = msp_core::io::parse_instance(&dir.path().join(file));
        assert!(parsed.is_ok(), "{file}: {parsed:?}");
        // and the oracle accepts them
        let out = msp(dir.path(), &["oracle", file]);
        assert!(
            matches!(out.status.code(), Some(0) | Some(1)),
            "{file}: {out:?}"
        );
    }
}

#[test]
fn malformed_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"kind\":\"msp\"}").unwrap();
    let out = msp(dir.path(), &["oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let out = msp(dir.path(), &["oracle", "does-not-exist.json"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}
