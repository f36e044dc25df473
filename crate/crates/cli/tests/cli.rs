use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use celljoin::run::{run_case, DirectionChoice, RunConfig};
use celljoin::{load_case, load_root, DatasetError};
use celljoin_core::Mode;
use tempfile::TempDir;

const F1: &str = "source,target\ngrace hopper,ghopper@u.ca\nmary jane watson,mwatson@u.ca\nalan turing,turing@u.ca\n";
const F2: &str = "source,target\ngrace hopper,g. hopper\nmary jane watson,m. j. watson\n";

fn write_case(root: &Path, name: &str, rows: &str) {
    let dir = root.join(name);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("rows.csv"), rows).unwrap();
}

fn bench_root() -> TempDir {
    let root = TempDir::new().unwrap();
    write_case(root.path(), "f1", F1);
    write_case(root.path(), "f2", F2);
    root
}

fn celljoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_celljoin")).args(args).output().expect("binary runs")
}

fn forward() -> RunConfig {
    RunConfig { direction: DirectionChoice::Forward, run_join: false, ..RunConfig::default() }
}

#[test]
fn relative_indices_need_one_transformation_for_f1() {
    let root = bench_root();
    let case = load_case(&root.path().join("f1")).unwrap();
    assert_eq!(case.name, "f1");
    assert_eq!(case.rows.len(), 3);

    let rel_rem = run_case(&case, Mode::RelRem, &forward()).unwrap();
    assert_eq!(rel_rem.num_transformations, 1);
    assert_eq!(rel_rem.best_transformation_coverage, 1.0);

    let baseline = run_case(&case, Mode::Baseline, &forward()).unwrap();
    assert!(baseline.num_transformations >= 2, "{baseline:?}");
}

#[test]
fn repetition_covers_f2_with_a_group() {
    let root = bench_root();
    let case = load_case(&root.path().join("f2").join("rows.csv")).unwrap();
    let report = run_case(&case, Mode::RelRemRep, &forward()).unwrap();
    assert_eq!(report.num_transformations, 1);
    assert!(report.selected[0].transformation.contains(")^2"), "{}", report.selected[0].transformation);
}

#[test]
fn cases_load_in_name_order() {
    let root = bench_root();
    let names: Vec<String> = load_root(root.path()).unwrap().into_iter().map(|c| c.name).collect();
    assert_eq!(names, ["f1", "f2"]);
}

#[test]
fn missing_header_is_reported_at_line_one() {
    let root = TempDir::new().unwrap();
    write_case(root.path(), "bad", "grace hopper,ghopper@u.ca\nalan turing,turing@u.ca\n");
    match load_case(&root.path().join("bad")) {
        Err(DatasetError::Format { line, .. }) => assert_eq!(line, 1),
        other => panic!("expected a format error, got {other:?}"),
    }
    let out = celljoin(&["synth", root.path().join("bad").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rows.csv:1:"));
}

#[test]
fn synth_reports_json() {
    let root = bench_root();
    let out = celljoin(&["synth", root.path().join("f1").to_str().unwrap(), "--mode", "REL_REM", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"best_transformation_coverage\": 1.0"), "{text}");
    assert!(text.contains("\"num_transformations\": 1,"), "{text}");
}

#[test]
fn bench_output_is_deterministic() {
    let root = bench_root();
    let path = root.path().to_str().unwrap();
    let args = ["bench", path, "--mode", "BASELINE", "--mode", "REL_REM_REP", "--format", "json"];
    let first = celljoin(&args);
    let second = celljoin(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("\"mode\": \"REL_REM_REP\""));
    assert!(text.contains("\"mean_f1\""));
}

#[test]
fn bench_writes_text_tables_to_a_file() {
    let root = bench_root();
    let out_file = root.path().join("report.txt");
    let out = celljoin(&[
        "bench",
        root.path().to_str().unwrap(),
        "--mode",
        "REL",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(out_file).unwrap();
    assert!(text.starts_with("Best transformation coverage\n"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("f2 ")));
}

#[test]
fn empty_root_fails_with_an_input_error() {
    let root = TempDir::new().unwrap();
    let out = celljoin(&["bench", root.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no benchmark cases"));

    let out = celljoin(&["bench", root.path().join("missing").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manual_examples_score_the_remaining_rows() {
    let root = bench_root();
    let out = celljoin(&[
        "join",
        root.path().join("f1").to_str().unwrap(),
        "--examples",
        "manual:2",
        "--direction",
        "forward",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"examples\": 2,"), "{text}");
    assert!(text.contains("\"evaluated_rows\": 1,"), "{text}");

    let out = celljoin(&["join", root.path().join("f1").to_str().unwrap(), "--examples", "manual:3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explain_shows_each_variant() {
    let out = celljoin(&[
        "explain",
        "<substr(s, s+1)^?, split(' ', e), literal('@u.ca')>",
        "mary jane watson",
        "--target",
        "mwatson@u.ca",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("variant 1:"), "{text}");
    assert!(text.contains("variant 2:"), "{text}");
    assert!(text.contains("target \"mwatson@u.ca\": produced"), "{text}");

    let out = celljoin(&["explain", "<substr(s, s+1>", "x"]);
    assert_eq!(out.status.code(), Some(2));
}
