//! Acceptance gate: nine release criteria, one printed pass/fail line each.
//!
//! Every case count, tolerance, and runtime budget the criteria depend on
//! is pinned here, so drift in the library defaults fails the gate instead
//! of silently weakening it. The criteria run sequentially in one test so
//! the per-block timings are not distorted by sibling tests.

use std::process::Command;
use std::time::{Duration, Instant};

use anisomix::config::Config;
use anisomix::report::Report;
use anisomix::suite::{run_suite, SuiteName};

const SEED: u64 = 7;

struct Gate {
    lines: Vec<(bool, String)>,
}

impl Gate {
    fn record(&mut self, number: usize, name: &str, ok: bool, detail: &str) {
        let verdict = if ok { "PASS" } else { "FAIL" };
        let line = format!("criterion {number} ({name}): {verdict} [{detail}]");
        println!("{line}");
        self.lines.push((ok, line));
    }
}

/// Zero failures and at least `minimum` cases for every named op.
fn ops_clean(report: &Report, ops: &[(&str, usize)]) -> (bool, String) {
    let mut ok = true;
    let mut failed = 0usize;
    let mut problems = Vec::new();
    for &(op, minimum) in ops {
        let total = report.cases.iter().filter(|c| c.op == op).count();
        let bad = report.cases.iter().filter(|c| c.op == op && !c.pass).count();
        failed += bad;
        if total < minimum {
            ok = false;
            problems.push(format!("{op}: {total} of {minimum} cases"));
        }
        if bad > 0 {
            ok = false;
            problems.push(format!("{op}: {bad} failures"));
        }
    }
    let detail = if problems.is_empty() {
        format!("{failed} failures")
    } else {
        problems.join("; ")
    };
    (ok, detail)
}

fn within(elapsed: Duration, budget: Duration) -> (bool, String) {
    (
        elapsed <= budget,
        format!("{:.1}s of {:.0}s budget", elapsed.as_secs_f64(), budget.as_secs_f64()),
    )
}

fn timed_suite(name: SuiteName, config: &Config) -> (Report, Duration) {
    let start = Instant::now();
    let report = run_suite(name, SEED, config).expect("suite runs");
    (report, start.elapsed())
}

#[test]
fn acceptance() {
    let cfg = Config::default();
    let mut gate = Gate { lines: Vec::new() };

    // Criteria 1-2 share the geometry block.
    let (geometry, geometry_time) = timed_suite(SuiteName::Geometry, &cfg);

    {
        let pins = cfg.quasinorm_cases >= 10_000
            && cfg.identity_rel_tol == 1e-9
            && cfg.euclidean_collapse_tol == 1e-10;
        let (clean, ops_detail) = ops_clean(
            &geometry,
            &[
                ("quasi_norm_homogeneity", 10_000),
                ("quasi_norm_triangle", 10_000),
                ("euclidean_collapse", 10_000),
            ],
        );
        let (in_time, time_detail) = within(geometry_time, Duration::from_secs(10));
        gate.record(
            1,
            "quasi-norm laws",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    {
        let pins = cfg.volume_cases >= 20 && cfg.grid_tolerance == 0.02 && cfg.resolution_2d == 256;
        let (clean, ops_detail) = ops_clean(&geometry, &[("ball_volume_quadrature", 20)]);
        let planar = geometry
            .cases
            .iter()
            .filter(|c| c.op == "ball_volume_quadrature")
            .all(|c| c.resolution == vec![256, 256]);
        let (in_time, time_detail) = within(geometry_time, Duration::from_secs(30));
        gate.record(
            2,
            "ball volume quadrature",
            pins && clean && planar && in_time,
            &format!("{ops_detail}; 256x256 {planar}; {time_detail}; pins {pins}"),
        );
    }

    {
        let (norms, norms_time) = timed_suite(SuiteName::Norms, &cfg);
        let pins = cfg.norm_cases >= 1_000
            && cfg.rectangle_tol == 1e-10
            && cfg.shared_quadrature_rel_tol <= 1e-10;
        let (clean, ops_detail) = ops_clean(
            &norms,
            &[
                ("rectangle_closed_form", 1_000),
                ("isotropic_collapse", 1_000),
                ("infinity_component_axis_max", 1_000),
            ],
        );
        let (in_time, time_detail) = within(norms_time, Duration::from_secs(30));
        gate.record(
            3,
            "mixed-norm correctness",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    {
        let (projection, projection_time) = timed_suite(SuiteName::Projection, &cfg);
        let pins = cfg.projection_cases >= 500 && cfg.projection_fix_tol == 1e-8;
        let (clean, ops_detail) = ops_clean(
            &projection,
            &[
                ("fixes_polynomials", 100),
                ("moment_annihilation", 100),
                ("dilation_translation_covariance", 100),
                ("bound_ratio_degree_zero", 100),
                ("idempotence", 100),
            ],
        );
        let (in_time, time_detail) = within(projection_time, Duration::from_secs(120));
        gate.record(
            4,
            "projection laws",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    // Criteria 5-6 share the atoms block.
    let (atoms, atoms_time) = timed_suite(SuiteName::Atoms, &cfg);

    {
        let pins = cfg.atom_cases >= 500 && cfg.atom_size_ratio_tol == 1e-9;
        let (clean, ops_detail) =
            ops_clean(&atoms, &[("atom_validation", 500), ("sign_atom_closed_form", 1)]);
        let (in_time, time_detail) = within(atoms_time, Duration::from_secs(120));
        gate.record(
            5,
            "atom validation",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    {
        let pins = cfg.combination_cases >= 500 && cfg.grid_tolerance == 0.02;
        let (clean, ops_detail) = ops_clean(
            &atoms,
            &[("coefficient_lower_bound", 500), ("single_atom_aggregate_equality", 50)],
        );
        let (in_time, time_detail) = within(atoms_time, Duration::from_secs(120));
        gate.record(
            6,
            "coefficient lower bound",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    {
        let (campanato, campanato_time) = timed_suite(SuiteName::Campanato, &cfg);
        let pins = cfg.minimax_cases >= 100
            && cfg.q_monotonicity_cases >= 200
            && cfg.q2_match_tol == 1e-10
            && cfg.minimax_match_tol == 1e-6
            && cfg.median_match_tol == 1e-3
            && cfg.benchmark_rel_tol == 0.02
            && cfg.witness_center_max == 0.02;
        let (clean, ops_detail) = ops_clean(
            &campanato,
            &[
                ("quadratic_matches_projection", 100),
                ("minimax_matches_midrange", 100),
                ("best_constant_is_median", 100),
                ("inner_exponent_monotonicity", 200),
                ("benchmark_absolute_value", 1),
            ],
        );
        let one_dimensional = campanato
            .cases
            .iter()
            .filter(|c| c.op == "minimax_matches_midrange")
            .all(|c| c.resolution.len() == 1);
        let (in_time, time_detail) = within(campanato_time, Duration::from_secs(300));
        gate.record(
            7,
            "campanato solvers",
            pins && clean && one_dimensional && in_time,
            &format!("{ops_detail}; midrange n=1 {one_dimensional}; {time_detail}; pins {pins}"),
        );
    }

    {
        let (duality, duality_time) = timed_suite(SuiteName::Duality, &cfg);
        let pins = cfg.single_ball_cases >= 1_000
            && cfg.functional_cases >= 200
            && cfg.dual_norm_samples >= 2_000
            && cfg.dual_benchmark_rel_tol == 0.05;
        let (clean, ops_detail) = ops_clean(
            &duality,
            &[
                ("single_ball_bound", 1_000),
                ("functional_bound", 200),
                ("sup_domination_identity", 50),
                ("dual_norm_cap", 20),
                ("dual_norm_benchmark", 1),
                ("atom_annihilates_polynomials", 30),
            ],
        );
        let (in_time, time_detail) = within(duality_time, Duration::from_secs(600));
        gate.record(
            8,
            "duality inequalities",
            pins && clean && in_time,
            &format!("{ops_detail}; {time_detail}; pins {pins}"),
        );
    }

    {
        let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
        let paths = [dir.join("acceptance_a.json"), dir.join("acceptance_b.json")];
        let mut runs_ok = true;
        for path in &paths {
            let out = Command::new(env!("CARGO_BIN_EXE_anisomix"))
                .args([
                    "suite",
                    "--name",
                    "all",
                    "--seed",
                    &SEED.to_string(),
                    "--out",
                    path.to_str().unwrap(),
                ])
                .output()
                .expect("binary runs");
            runs_ok &= out.status.success();
        }
        let a = std::fs::read(&paths[0]).unwrap_or_default();
        let b = std::fs::read(&paths[1]).unwrap_or_default();
        let identical = !a.is_empty() && a == b;
        gate.record(
            9,
            "determinism",
            runs_ok && identical,
            &format!("two full runs exit 0 {runs_ok}; {} bytes identical {identical}", a.len()),
        );
    }

    let transcript: Vec<&str> = gate.lines.iter().map(|(_, l)| l.as_str()).collect();
    assert!(
        gate.lines.iter().all(|(ok, _)| *ok),
        "acceptance gate failed:\n{}",
        transcript.join("\n")
    );
}
