use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn povmquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_povmquad"))
        .args(args)
        .env_remove("POVMQUAD_GRIDS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn grids() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../grids")
}

fn write_povm(dir: &Path, copies: usize) -> PathBuf {
    let path = dir.join(format!("povm_{copies}.json"));
    let out = povmquad(&[
        "construct",
        &copies.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    path
}

#[test]
fn construct_json_matches_golden() {
    let out = povmquad(&["construct", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let golden = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/construct_2.json"),
    )
    .unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn construct_csv_has_header_and_rows() {
    let out = povmquad(&["construct", "3", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c,theta,phi");
    assert_eq!(lines.len(), 1 + 8);
}

#[test]
fn construct_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let out = povmquad(&["construct", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let summary = stdout(&out);
    assert!(summary.contains("elements: 18"), "{summary}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["N"], 5);
    assert_eq!(json["n"], 18);
}

#[test]
fn zero_copies_is_usage_error() {
    assert_eq!(code(&povmquad(&["construct", "0"])), 64);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&povmquad(&["frobnicate"])), 64);
}

#[test]
fn certify_reports_design_strength() {
    let file = grids().join("design_003.txt");
    let out = povmquad(&[
        "certify",
        file.to_str().unwrap(),
        "--lmax",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["strength"], 3);
    assert_eq!(json["n"], 6);

    let out = povmquad(&["certify", file.to_str().unwrap(), "--expect", "4"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn strength_of_lebedev_grid() {
    let file = grids().join("lebedev_011.txt");
    let out = povmquad(&["strength", file.to_str().unwrap(), "--cap", "15"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "11");
}

#[test]
fn zero_vector_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    fs::write(&file, "0 0 1\n0 0 0\n").unwrap();
    let out = povmquad(&["certify", file.to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(code(&povmquad(&["certify", "/nonexistent/points.txt"])), 2);
}

#[test]
fn corrupted_povm_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_povm(dir.path(), 2);
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, &text[..text.len() / 2]).unwrap();
    let out = povmquad(&[
        "simulate",
        path.to_str().unwrap(),
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 65);
}

#[test]
fn simulate_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_povm(dir.path(), 1);
    assert_eq!(
        code(&povmquad(&[
            "simulate",
            path.to_str().unwrap(),
            "--trials",
            "1000"
        ])),
        64
    );
}

#[test]
fn simulate_is_reproducible_and_checks_sample_size() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_povm(dir.path(), 3);
    let p = path.to_str().unwrap();
    let args = [
        "simulate", p, "--trials", "20000", "--seed", "11", "--format", "json",
    ];
    let first = povmquad(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, povmquad(&args).stdout);
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["N"], 3);
    assert_eq!(report["trials"], 20000);
    assert_eq!(report["expected"], 0.8);
    for key in ["seed", "mean_score", "std_error", "chunks"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    assert_eq!(
        code(&povmquad(&[
            "simulate", p, "--trials", "50", "--seed", "11"
        ])),
        3
    );
}

#[test]
fn score_reports_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_povm(dir.path(), 4);
    let out = povmquad(&["score", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let exact = json["score_exact"].as_f64().unwrap();
    let averaged = json["score_quadrature"].as_f64().unwrap();
    assert!((exact - 5.0 / 6.0).abs() < 1e-12);
    assert!((averaged - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn table_with_grids() {
    let out = povmquad(&[
        "table",
        "--nmax",
        "11",
        "--format",
        "csv",
        "--grids",
        grids().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let column = |i: usize| -> Vec<&str> { rows.iter().map(|r| r[i]).collect() };
    assert_eq!(
        column(2),
        ["2", "6", "8", "15", "18", "28", "32", "45", "50", "66", "72"]
    );
    assert_eq!(
        column(3),
        ["", "", "6", "", "14", "", "26", "", "38", "", "50"]
    );
    assert_eq!(
        column(4),
        ["2", "4", "6", "12", "12", "", "", "", "", "", ""]
    );
    assert_eq!(
        column(6),
        ["2", "", "8", "", "22", "", "48", "", "86", "", "136"]
    );
}

#[test]
fn table_reads_grid_directory_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_povmquad"))
        .args(["table", "--nmax", "5", "--format", "json"])
        .env("POVMQUAD_GRIDS", grids())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[4]["lebedev"]["value"], 14);
    assert_eq!(rows[4]["design"]["value"], 12);
}

#[test]
fn table_without_grids_omits_columns() {
    let out = povmquad(&["table", "--nmax", "3", "--grids", "/nonexistent/grids"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}
