//! Binary-level contract tests: output formats, exit codes, report files.

use std::path::PathBuf;
use std::process::{Command, Output};

use anisomix::grid::{AxisBox, GridFunction, Lattice};
use anisomix::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisomix"))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout).lines().map(str::to_owned).collect()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn quasinorm_prints_twelve_significant_digits() {
    for (args, expected) in [
        (["--a", "1,1", "--x", "3,4"], "5.00000000000"),
        (["--a", "1,2", "--x", "0,4"], "2.00000000000"),
        (["--a", "1,2", "--x", "1,1"], "1.27201964951"),
    ] {
        let out = run(&[&["quasinorm"], &args[..]].concat());
        assert!(out.status.success(), "{args:?}: {out:?}");
        assert_eq!(stdout_lines(&out)[0], expected, "{args:?}");
    }
}

#[test]
fn quasinorm_rejects_malformed_vector_as_usage_error() {
    let out = run(&["quasinorm", "--a", "1,1", "--x", "foo"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("invalid input"), "stderr: {err}");
}

#[test]
fn mixed_norm_of_rectangle_indicator() {
    // Constant 1 on [0,1] x [0,2] with p = (1,2): |I_1|^{1/1} |I_2|^{1/2}
    // = 1 * sqrt(2).
    let out = run(&[
        "mixed-norm",
        "--family",
        "constant",
        "--value",
        "1",
        "--lo",
        "0,0",
        "--hi",
        "1,2",
        "--resolution",
        "32,32",
        "--p",
        "1,2",
    ]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout_lines(&out)[0], "1.41421356237");
}

#[test]
fn campanato_absolute_value_instance() {
    let out = run(&[
        "campanato",
        "--family",
        "abs",
        "--lo",
        "-1",
        "--hi",
        "1",
        "--resolution",
        "4096",
        "--p",
        "0.5",
        "--q",
        "inf",
        "--s",
        "1",
        "--centers-per-axis",
        "9",
        "--radius-count",
        "6",
        "--rounds",
        "2",
    ]);
    assert!(out.status.success(), "{out:?}");
    let lines = stdout_lines(&out);
    let value: f64 = lines[0].parse().expect("first line is the seminorm");
    assert!((value - 0.25).abs() <= 0.02 * 0.25, "value {value}");
    let witness: f64 = lines
        .iter()
        .find_map(|l| l.strip_prefix("witness_center "))
        .expect("witness line")
        .parse()
        .expect("witness parses");
    assert!(witness.abs() <= 0.02, "witness {witness}");
}

#[test]
fn atom_on_polynomial_input_is_a_numerical_error() {
    let out = run(&[
        "atom",
        "--family",
        "constant",
        "--value",
        "1",
        "--lo",
        "-1",
        "--hi",
        "1",
        "--resolution",
        "1024",
        "--ball-center",
        "0",
        "--ball-radius",
        "0.5",
        "--p",
        "0.8",
        "--r",
        "2",
        "--s",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim(), "degenerate: input is polynomial on ball");
}

#[test]
fn atom_construction_validates_cleanly() {
    let out = run(&[
        "atom",
        "--family",
        "trig",
        "--terms",
        "3",
        "--max-frequency",
        "2",
        "--family-seed",
        "5",
        "--lo",
        "-1",
        "--hi",
        "1",
        "--resolution",
        "1024",
        "--ball-center",
        "0.1",
        "--ball-radius",
        "0.6",
        "--p",
        "0.8",
        "--r",
        "2",
        "--s",
        "1",
    ]);
    assert!(out.status.success(), "{out:?}");
    let lines = stdout_lines(&out);
    assert_eq!(lines[0], "1.00000000000", "size ratio saturates its bound");
    assert!(lines.iter().any(|l| l == "all_pass true"), "{lines:?}");
}

#[test]
fn pair_integrates_a_product_given_two_csv_grids() {
    let lattice = Lattice::from_box(
        &AxisBox::new(vec![0.0], vec![1.0]).unwrap(),
        &[64],
    )
    .unwrap();
    let f = GridFunction::new(lattice.clone(), vec![1.0; 64]).unwrap();
    let g = GridFunction::new(lattice, vec![2.0; 64]).unwrap();
    let f_path = tmp("pair_f.csv");
    let g_path = tmp("pair_g.csv");
    std::fs::write(&f_path, f.to_csv_string()).unwrap();
    std::fs::write(&g_path, g.to_csv_string()).unwrap();
    let out = run(&["pair", f_path.to_str().unwrap(), g_path.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(stdout_lines(&out)[0], "2.00000000000");
}

const REDUCED_CONFIG: &str = r#"{
    "quasinorm_cases": 40,
    "volume_cases": 3,
    "norm_cases": 12,
    "projection_cases": 10,
    "atom_cases": 6,
    "combination_cases": 6,
    "minimax_cases": 6,
    "q_monotonicity_cases": 6,
    "single_ball_cases": 8,
    "functional_cases": 4,
    "sup_domination_cases": 4,
    "dual_norm_cases": 2,
    "dual_norm_samples": 50,
    "resolution_1d": 512,
    "resolution_2d": 96,
    "benchmark_resolution": 2048
}"#;

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn suite_geometry_writes_a_passing_report() {
    let config = write_config("reduced.json", REDUCED_CONFIG);
    let report_path = tmp("geometry_report.json");
    let out = run(&[
        "suite",
        "--name",
        "geometry",
        "--seed",
        "7",
        "--out",
        report_path.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let report = Report::from_json_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.suite, "geometry");
    assert_eq!(report.seed, 7);
    assert_eq!(report.summary.failed, 0);
    assert!(report.op_count() >= 4, "got {} ops", report.op_count());
}

#[test]
fn suite_reports_are_byte_identical_under_a_fixed_seed() {
    let config = write_config("reduced_det.json", REDUCED_CONFIG);
    let paths = [tmp("det_a.json"), tmp("det_b.json")];
    for path in &paths {
        let out = run(&[
            "suite",
            "--name",
            "geometry",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tampered_tolerance_fails_the_suite_but_still_writes_the_report() {
    let tampered = REDUCED_CONFIG.replacen('{', "{\n    \"identity_rel_tol\": 0.0,", 1);
    let config = write_config("tampered.json", &tampered);
    let report_path = tmp("tampered_report.json");
    let out = run(&[
        "suite",
        "--name",
        "geometry",
        "--seed",
        "7",
        "--out",
        report_path.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = Report::from_json_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert!(report.summary.failed > 0);
}

#[test]
fn unknown_suite_name_is_a_usage_error() {
    let out = run(&["suite", "--name", "nonsense", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
