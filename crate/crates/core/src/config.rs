//! Runtime configuration for the verification suites and the CLI.
//!
//! A [`Config`] collects every knob the suites read: grid resolutions, ball
//! search shape, per-property case counts, and check tolerances. Defaults
//! mirror the library's compiled-in tolerance constants, so a default
//! config reproduces the library's own standards; a config file may relax
//! or tighten any of them, and the report records a digest of whatever was
//! actually used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// All suite parameters. Every field has a default, so a config file may
/// specify only the fields it wants to change. Unknown fields are rejected
/// to catch typos.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Nodes per axis for one-dimensional grids.
    pub resolution_1d: usize,
    /// Nodes per axis for two-dimensional grids.
    pub resolution_2d: usize,
    /// Nodes per axis for three-dimensional grids.
    pub resolution_3d: usize,
    /// Nodes per axis for the high-resolution seminorm benchmark.
    pub benchmark_resolution: usize,

    /// Seminorm scan: centers per axis.
    pub centers_per_axis: usize,
    /// Seminorm scan: number of log-spaced radii.
    pub radius_count: usize,
    /// Seminorm scan: refinement rounds after the coarse scan.
    pub refinement_rounds: usize,

    /// Quasi-norm law cases (per law).
    pub quasinorm_cases: usize,
    /// Ball volume quadrature cases.
    pub volume_cases: usize,
    /// Mixed-norm identity cases (per identity).
    pub norm_cases: usize,
    /// Projection property cases (total across its five properties).
    pub projection_cases: usize,
    /// Constructed-and-validated atom cases.
    pub atom_cases: usize,
    /// Coefficient lower-bound combination cases.
    pub combination_cases: usize,
    /// One-dimensional minimax and median oracle cases (each).
    pub minimax_cases: usize,
    /// Seminorm inner-exponent monotonicity cases.
    pub q_monotonicity_cases: usize,
    /// One-ball duality bound cases.
    pub single_ball_cases: usize,
    /// Functional bound combination cases.
    pub functional_cases: usize,
    /// Sup-domination identity cases.
    pub sup_domination_cases: usize,
    /// Dual-norm cap cases.
    pub dual_norm_cases: usize,
    /// Random test functions per dual-norm estimate.
    pub dual_norm_samples: usize,

    /// Relative tolerance for exact algebraic identities (homogeneity,
    /// triangle inequality, covariance).
    pub identity_rel_tol: f64,
    /// Absolute tolerance for the Euclidean specialization of the
    /// quasi-norm, relative to the Euclidean norm.
    pub euclidean_collapse_tol: f64,
    /// Relative tolerance for closed-form norm identities.
    pub rectangle_tol: f64,
    /// Relative tolerance for two routes sharing the same quadrature.
    pub shared_quadrature_rel_tol: f64,
    /// Relative tolerance for grid-quadrature against continuum values.
    pub grid_tolerance: f64,
    /// Relative tolerance for projection fixed-point and moment checks.
    pub projection_fix_tol: f64,
    /// Atom size certificate slack.
    pub atom_size_ratio_tol: f64,
    /// Atom moment certificate bound.
    pub atom_moment_tol: f64,
    /// Match tolerance between the quadratic-exponent solver and the
    /// projection-residual route.
    pub q2_match_tol: f64,
    /// Match tolerance between the minimax solver and the dense oracle.
    pub minimax_match_tol: f64,
    /// Match tolerance between the best-constant solver and the median.
    pub median_match_tol: f64,
    /// Relative error allowed for the seminorm benchmark value.
    pub benchmark_rel_tol: f64,
    /// Largest acceptable distance of the benchmark witness center from
    /// the oracle center.
    pub witness_center_max: f64,
    /// One-ball bound slack.
    pub single_ball_rel_slack: f64,
    /// Functional bound slack.
    pub functional_rel_slack: f64,
    /// Dual-norm cap slack.
    pub dual_norm_rel_slack: f64,
    /// Relative error allowed for the self-dual benchmark.
    pub dual_benchmark_rel_tol: f64,
    /// Inner-exponent monotonicity slack.
    pub q_monotonicity_rel_slack: f64,
    /// Absolute floor for pairings of vanishing quantities.
    pub pairing_abs_slack: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            resolution_1d: 1024,
            resolution_2d: 256,
            resolution_3d: 64,
            benchmark_resolution: 4096,

            centers_per_axis: 5,
            radius_count: 6,
            refinement_rounds: 1,

            quasinorm_cases: 10_000,
            volume_cases: 20,
            norm_cases: 1_000,
            projection_cases: 500,
            atom_cases: 500,
            combination_cases: 500,
            minimax_cases: 100,
            q_monotonicity_cases: 200,
            single_ball_cases: 1_000,
            functional_cases: 200,
            sup_domination_cases: 50,
            dual_norm_cases: 20,
            dual_norm_samples: 2_000,

            identity_rel_tol: 1e-9,
            euclidean_collapse_tol: 1e-10,
            rectangle_tol: 1e-10,
            shared_quadrature_rel_tol: 1e-12,
            grid_tolerance: tolerances::GRID_TOLERANCE,
            projection_fix_tol: 1e-8,
            atom_size_ratio_tol: tolerances::ATOM_SIZE_RATIO_TOL,
            atom_moment_tol: tolerances::ATOM_MOMENT_TOL,
            q2_match_tol: 1e-10,
            minimax_match_tol: 1e-6,
            median_match_tol: 1e-3,
            benchmark_rel_tol: 0.02,
            witness_center_max: 0.02,
            single_ball_rel_slack: tolerances::SINGLE_BALL_REL_SLACK,
            functional_rel_slack: tolerances::FUNCTIONAL_REL_SLACK,
            dual_norm_rel_slack: tolerances::DUAL_NORM_REL_SLACK,
            dual_benchmark_rel_tol: 0.05,
            q_monotonicity_rel_slack: tolerances::Q_MONOTONICITY_REL_SLACK,
            pairing_abs_slack: tolerances::PAIRING_ABS_SLACK,
        }
    }
}

impl Config {
    /// Parses a JSON config. Missing fields take defaults; unknown fields
    /// are format errors.
    pub fn from_json_str(text: &str) -> Result<Config> {
        let config: Config = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and parses a JSON config file.
    pub fn from_json_path(path: &std::path::Path) -> Result<Config> {
        Config::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Serializes the full config, defaults included.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural sanity: positive counts and resolutions, nonnegative
    /// finite tolerances. A zero tolerance is allowed; it makes checks
    /// strict, it does not make them meaningless.
    pub fn validate(&self) -> Result<()> {
        let resolutions = [
            ("resolution_1d", self.resolution_1d),
            ("resolution_2d", self.resolution_2d),
            ("resolution_3d", self.resolution_3d),
            ("benchmark_resolution", self.benchmark_resolution),
        ];
        for (name, v) in resolutions {
            if !(8..=crate::grid::MAX_AXIS_RESOLUTION).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be between 8 and {}, got {v}",
                    crate::grid::MAX_AXIS_RESOLUTION
                )));
            }
        }
        let counts = [
            ("centers_per_axis", self.centers_per_axis),
            ("radius_count", self.radius_count),
            ("quasinorm_cases", self.quasinorm_cases),
            ("volume_cases", self.volume_cases),
            ("norm_cases", self.norm_cases),
            ("projection_cases", self.projection_cases),
            ("atom_cases", self.atom_cases),
            ("combination_cases", self.combination_cases),
            ("minimax_cases", self.minimax_cases),
            ("q_monotonicity_cases", self.q_monotonicity_cases),
            ("single_ball_cases", self.single_ball_cases),
            ("functional_cases", self.functional_cases),
            ("sup_domination_cases", self.sup_domination_cases),
            ("dual_norm_cases", self.dual_norm_cases),
            ("dual_norm_samples", self.dual_norm_samples),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        let tols = [
            ("identity_rel_tol", self.identity_rel_tol),
            ("euclidean_collapse_tol", self.euclidean_collapse_tol),
            ("rectangle_tol", self.rectangle_tol),
            ("shared_quadrature_rel_tol", self.shared_quadrature_rel_tol),
            ("grid_tolerance", self.grid_tolerance),
            ("projection_fix_tol", self.projection_fix_tol),
            ("atom_size_ratio_tol", self.atom_size_ratio_tol),
            ("atom_moment_tol", self.atom_moment_tol),
            ("q2_match_tol", self.q2_match_tol),
            ("minimax_match_tol", self.minimax_match_tol),
            ("median_match_tol", self.median_match_tol),
            ("benchmark_rel_tol", self.benchmark_rel_tol),
            ("witness_center_max", self.witness_center_max),
            ("single_ball_rel_slack", self.single_ball_rel_slack),
            ("functional_rel_slack", self.functional_rel_slack),
            ("dual_norm_rel_slack", self.dual_norm_rel_slack),
            ("dual_benchmark_rel_tol", self.dual_benchmark_rel_tol),
            ("q_monotonicity_rel_slack", self.q_monotonicity_rel_slack),
            ("pairing_abs_slack", self.pairing_abs_slack),
        ];
        for (name, v) in tols {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Order-independent fingerprint of the exact configuration in use,
    /// recorded in every report. FNV-1a over the canonical JSON encoding;
    /// stable across processes and platforms.
    pub fn digest(&self) -> String {
        let encoded = serde_json::to_string(self).expect("config serializes");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in encoded.as_bytes() {
            hash ^= u64::from(*byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}
