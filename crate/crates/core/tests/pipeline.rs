//! End-to-end flows through the public API only: build functions, make and
//! validate atoms, bound pairings, round-trip grids through CSV, and run a
//! reduced verification suite deterministically.

use anisomix::anisotropy::{s_min, AnisotropicBall, AnisotropyVector, ExponentVector};
use anisomix::atoms::{make_atom, validate_atom, AtomParams, AtomicCombination};
use anisomix::campanato::{BallSearchDomain, CampanatoParams};
use anisomix::config::Config;
use anisomix::duality::{functional_norm_bound, single_ball_bound};
use anisomix::grid::{AxisBox, FunctionFamily, GridFunction, Lattice};
use anisomix::mixed_norm::conjugate_exponent;
use anisomix::report::Report;
use anisomix::suite::{run_suite, SuiteName};

fn reduced_config() -> Config {
    Config {
        quasinorm_cases: 40,
        volume_cases: 3,
        norm_cases: 12,
        projection_cases: 10,
        atom_cases: 6,
        combination_cases: 6,
        minimax_cases: 6,
        q_monotonicity_cases: 6,
        single_ball_cases: 8,
        functional_cases: 4,
        sup_domination_cases: 4,
        dual_norm_cases: 2,
        dual_norm_samples: 50,
        resolution_1d: 512,
        resolution_2d: 96,
        benchmark_resolution: 2048,
        ..Config::default()
    }
}

fn trig(lattice: &Lattice, seed: u64) -> GridFunction {
    let family = FunctionFamily::TrigMixture { terms: 4, max_frequency: 2.0, seed };
    GridFunction::sample(&family, lattice).unwrap()
}

#[test]
fn atoms_built_from_smooth_data_bound_the_pairing() {
    let bounds = AxisBox::new(vec![-1.5], vec![1.5]).unwrap();
    let lattice = Lattice::from_box(&bounds, &[1024]).unwrap();
    let g = trig(&lattice, 11);

    let anis = AnisotropyVector::isotropic(1).unwrap();
    let p = ExponentVector::constant(1, 0.7).unwrap();
    let r = 2.0;
    let s = s_min(&anis, &p).unwrap();
    let params = AtomParams::new(p.clone(), r, s).unwrap();

    let mut atoms = Vec::new();
    for (seed, center, radius) in [(21u64, -0.4, 0.5), (22, 0.55, 0.4)] {
        let f = trig(&lattice, seed);
        let ball = AnisotropicBall::new(anis.clone(), vec![center], radius).unwrap();
        let atom = make_atom(&f, &ball, &params).unwrap();
        let validation = validate_atom(&atom).unwrap();
        assert!(validation.all_pass(), "{validation:?}");
        let single = single_ball_bound(&atom, &g).unwrap();
        assert!(
            single.lhs <= single.rhs * (1.0 + 1e-6) + 1e-12,
            "lhs {} rhs {}",
            single.lhs,
            single.rhs
        );
        atoms.push(atom);
    }

    let combo = AtomicCombination::new(atoms, vec![0.8, -1.1]).unwrap();
    let sem_params =
        CampanatoParams::new(anis.clone(), p, conjugate_exponent(r).unwrap(), s).unwrap();
    let domain = BallSearchDomain::over_box(&bounds, &anis, 5, 4, 1).unwrap();
    let bound = functional_norm_bound(&combo, &g, &sem_params, &domain).unwrap();
    assert!(
        bound.lhs <= bound.rhs * (1.0 + 1e-5) + bound.absolute,
        "lhs {} rhs {}",
        bound.lhs,
        bound.rhs
    );
}

#[test]
fn csv_round_trip_is_bitwise_exact() {
    let bounds = AxisBox::new(vec![-1.0, 0.25], vec![2.0, 1.75]).unwrap();
    let lattice = Lattice::from_box(&bounds, &[17, 9]).unwrap();
    let f = trig(&lattice, 99);

    let text = f.to_csv_string();
    let back = GridFunction::from_csv_str(&text).unwrap();
    assert_eq!(back.lattice().resolution(), f.lattice().resolution());
    assert_eq!(back.values(), f.values());
    assert_eq!(back.to_csv_string(), text);
}

#[test]
fn reduced_suite_passes_and_reports_deterministically() {
    let config = reduced_config();
    let first = run_suite(SuiteName::All, 3, &config).unwrap();
    assert!(first.passed(), "failed cases: {}", first.summary.failed);
    assert_eq!(first.summary.total, first.cases.len());

    let second = run_suite(SuiteName::All, 3, &config).unwrap();
    assert_eq!(first.to_json(), second.to_json());

    let parsed = Report::from_json_str(&first.to_json()).unwrap();
    assert_eq!(parsed.to_json(), first.to_json());
}
