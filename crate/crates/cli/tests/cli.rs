//! End-to-end tests that drive the compiled `fhutch` binary the way a user
//! would: through argv, files, exit codes, and captured output.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fhutch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhutch"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).expect("test file should write");
}

#[test]
fn iterate_writes_the_three_artifacts_and_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = fhutch(&["iterate", "-c", "preset:cantor", "-o", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).starts_with("converged after"), "summary: {}", stdout(&out));

    let attractor = fs::read_to_string(out_dir.join("attractor.csv")).unwrap();
    assert!(attractor.starts_with("x0\n"), "header row first");
    assert!(attractor.lines().count() > 100, "a real point cloud, not a stub");

    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("m,card,h_step,ms\n"));

    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["stop_reason"], "converged");
    assert_eq!(result["cardinality"].as_u64().unwrap() as usize, attractor.lines().count() - 1);
}

#[test]
fn iterate_that_runs_out_of_steps_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("slow.json");
    // One step can never bring the step distance under such a tight tol.
    write(
        &config,
        r#"{
            "dimension": 1,
            "metric": {"kind": "abs-diff"},
            "maps": [{"matrix": [[0.5]], "translation": [0.25]}],
            "F": {"kind": "log"},
            "tau": {"kind": "constant", "c": 0.1},
            "iterate": {"tol": 1e-12, "max_iter": 1},
            "seed": {"points": [[0.0]]}
        }"#,
    );
    let out_dir = dir.path().join("run");
    let out = fhutch(&[
        "iterate",
        "-c",
        config.to_str().unwrap(),
        "-o",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "stdout: {}", stdout(&out));
    assert!(stdout(&out).starts_with("max-iter after"));
    // Partial results still land on disk for inspection.
    assert!(out_dir.join("trace.csv").exists());
}

#[test]
fn verify_rejects_unknown_suites_by_name() {
    let out = fhutch(&["verify", "-c", "preset:cantor", "--suites", "lemma14,bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown suite `bogus`"), "stderr: {}", stderr(&out));
}

#[test]
fn verify_emits_one_report_per_selected_suite() {
    let out = fhutch(&["verify", "-c", "preset:cantor", "--suites", "lemma15,lemma14"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], true);
    let suites = doc["suites"].as_array().unwrap();
    let names: Vec<&str> = suites.iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["lemma15", "lemma14"], "selection order is preserved");
    assert!(suites.iter().all(|s| s["passed"] == true));
    assert_eq!(doc["config"]["dimension"], 1, "report echoes the config it checked");
}

#[test]
fn invalid_config_reports_every_problem_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    write(
        &config,
        r#"{
            "dimension": 0,
            "metric": {"kind": "euclidean"},
            "maps": [],
            "F": {"kind": "warp"},
            "tau": {"kind": "constant", "c": -1.0},
            "iterate": {"tol": 0.001, "max_iter": 10},
            "seed": {}
        }"#,
    );
    let out = fhutch(&["verify", "-c", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    for needle in ["dimension:", "maps:", "F.kind:", "tau.c:", "seed:"] {
        assert!(err.contains(needle), "missing `{needle}` in:\n{err}");
    }
}

#[test]
fn distance_matches_a_hand_oracle_and_both_evaluators_agree_textually() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write(&a, "x0\n0\n");
    write(&b, "x0\n1\n");

    let brute = fhutch(&["distance", a.to_str().unwrap(), b.to_str().unwrap(), "--metric", "abs-diff"]);
    assert!(brute.status.success());
    let text = stdout(&brute);
    assert!(text.starts_with("H = 1.00000000000\n"), "got: {text}");
    assert!(text.contains("forward: a[0] = (0) -> b[0] = (1)"));
    assert!(text.contains("backward: b[0] = (1) -> a[0] = (0)"));

    let accel = fhutch(&[
        "distance",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--metric",
        "abs-diff",
        "--accel",
    ]);
    assert!(accel.status.success());
    assert_eq!(stdout(&accel), text, "the two evaluators must print identical reports");
}

#[test]
fn distance_of_a_set_to_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, "x0,x1\n0.25,0.5\n-1,2\n3,4\n");
    let out = fhutch(&["distance", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("H = 0\n"), "got: {}", stdout(&out));
}

#[test]
fn distance_understands_the_snowflake_metric_flag() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write(&a, "x0\n0\n");
    write(&b, "x0\n3\n");
    let out = fhutch(&["distance", a.to_str().unwrap(), b.to_str().unwrap(), "--metric", "snowflake:p=2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("H = 9.00000000000\n"), "got: {}", stdout(&out));

    let bad = fhutch(&["distance", a.to_str().unwrap(), b.to_str().unwrap(), "--metric", "taxicab"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("unknown metric `taxicab`"));
}

#[test]
fn distance_refuses_mismatched_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write(&a, "x0\n0\n");
    write(&b, "x0,x1\n0,0\n");
    let out = fhutch(&["distance", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dimension mismatch"));
}

#[test]
fn render_requires_two_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, "x0\n0\n1\n");
    let out = fhutch(&["render", a.to_str().unwrap(), "-o", dir.path().join("x.pgm").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("render requires dimension 2"));
}

#[test]
fn render_produces_a_valid_pgm_with_the_requested_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, "x0,x1\n0,0\n1,1\n0.5,0.5\n");
    let pgm_path = dir.path().join("out.pgm");
    let out = fhutch(&[
        "render",
        a.to_str().unwrap(),
        "-o",
        pgm_path.to_str().unwrap(),
        "--size",
        "64x32",
        "--viewport",
        "0,0,1,1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let bytes = fs::read(&pgm_path).unwrap();
    let header = b"P5\n64 32\n255\n";
    assert!(bytes.starts_with(header));
    assert_eq!(bytes.len(), header.len() + 64 * 32);
}

#[test]
fn render_is_byte_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = fhutch(&["iterate", "-c", "preset:cantor", "-o", dir.path().to_str().unwrap()]);
    assert!(run.status.success());

    // Lift the 1-D attractor into 2-D so it can be drawn.
    let src = fs::read_to_string(dir.path().join("attractor.csv")).unwrap();
    let mut lifted = String::from("x0,x1\n");
    for line in src.lines().skip(1) {
        lifted.push_str(&format!("{line},0\n"));
    }
    let cloud = dir.path().join("cloud.csv");
    write(&cloud, &lifted);

    let mut renders = Vec::new();
    for name in ["one.pgm", "two.pgm"] {
        let path = dir.path().join(name);
        let out = fhutch(&["render", cloud.to_str().unwrap(), "-o", path.to_str().unwrap()]);
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        renders.push(fs::read(&path).unwrap());
    }
    assert_eq!(renders[0], renders[1], "same input must give identical bytes");
}

#[test]
fn early_closed_stdout_does_not_panic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    write(&a, "x0\n0\n");
    // `head -c 3` closes the pipe after the first bytes of the report.
    let out = Command::new("sh")
        .arg("-c")
        .arg(format!(
            "{} distance {} {} | head -c 3",
            env!("CARGO_BIN_EXE_fhutch"),
            a.display(),
            a.display()
        ))
        .output()
        .expect("shell should spawn");
    assert!(out.status.success(), "pipeline exit: {:?}", out.status);
    let err = stderr(&out);
    assert!(!err.contains("panic"), "broken pipe must not panic:\n{err}");
}

#[test]
fn unknown_preset_names_the_alternatives() {
    let out = fhutch(&["iterate", "-c", "preset:julia", "-o", "/tmp/nowhere"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("julia"), "stderr: {err}");
    assert!(err.contains("sierpinski"), "stderr should list valid presets: {err}");
}
