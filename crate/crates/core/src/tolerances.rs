//! Numerical tolerances shared across modules.
//!
//! Every inequality check in the crate compares a left side against a right
//! side inflated by a pinned relative slack (plus, where a right side can
//! legitimately vanish, a pinned absolute slack). The slacks are chosen so
//! that a correct implementation passes with orders of magnitude to spare
//! while a genuine violation of the underlying inequality is still caught:
//! solver tolerances sit well below check slacks, and check slacks sit well
//! below the quadrature accuracy target.

/// Relative accuracy expected of ball-indicator quadrature at the default
/// resolutions; inequality checks whose two sides are discretized on
/// different lattices get twice this slack.
pub const GRID_TOLERANCE: f64 = 0.02;

/// Atom size condition: ||a||_{L^r} may exceed its bound by this relative
/// margin (floating-point headroom only; both sides share the same
/// discretization by construction).
pub const ATOM_SIZE_RATIO_TOL: f64 = 1e-9;

/// Atom moment condition: each moment must vanish to this fraction of
/// ||a||_{L^1} times the monomial's magnitude on the ball.
pub const ATOM_MOMENT_TOL: f64 = 1e-7;

/// An atom candidate whose projection residual is below this fraction of
/// the input norm is treated as a polynomial on the ball.
pub const ATOM_DEGENERACY_FLOOR: f64 = 1e-12;

/// Relative slack of the single-atom pairing bound.
pub const SINGLE_BALL_REL_SLACK: f64 = 1e-6;

/// Absolute slack added to pairing bounds whose right side can vanish.
pub const PAIRING_ABS_SLACK: f64 = 1e-12;

/// Relative slack of the combination pairing bound.
pub const FUNCTIONAL_REL_SLACK: f64 = 1e-5;

/// Relative slack of the sampled dual-norm upper bound.
pub const DUAL_NORM_REL_SLACK: f64 = 1e-5;

/// Relative slack of the seminorm monotonicity comparison in the inner
/// exponent.
pub const Q_MONOTONICITY_REL_SLACK: f64 = 1e-6;

/// Iteratively reweighted least squares: stop when the objective changes by
/// less than this relative amount.
pub const IRLS_OBJECTIVE_REL_TOL: f64 = 1e-8;

/// Residuals are floored at this fraction of the data scale when inverted
/// into weights (exponents below 2).
pub const IRLS_RESIDUAL_FLOOR_FACTOR: f64 = 1e-10;

/// Iteration cap for the reweighted least-squares loop. Exponents near 1
/// descend monotonically but sublinearly on fine grids, so the cap leaves
/// room for several hundred steps.
pub const IRLS_MAX_ITER: usize = 600;

/// Minimax fits stop when the duality gap (largest residual minus the
/// weighted mean residual) falls below this fraction of the largest
/// residual.
pub const LAWSON_GAP_REL_TOL: f64 = 1e-8;

/// Iteration cap for the minimax weight iteration. The reweighting
/// converges linearly with a rate that flattens on fine grids, so this cap
/// is much larger than the other solvers'.
pub const LAWSON_MAX_ITER: usize = 2000;

/// Fallback acceptance for minimax fits: when neither the reweighting nor
/// the reference exchange settles, the achieved error is still returned
/// provided its certified duality gap is below this fraction of the error.
/// Accepted values overstate the optimum by at most the gap, and every
/// consumer compares minimax errors on the side that tolerates
/// overstatement.
pub const LAWSON_ACCEPT_REL_GAP: f64 = 1e-3;

/// A ball-search run fails if more than this fraction of candidate balls
/// report solver errors.
pub const SEMINORM_MAX_FAILURE_FRACTION: f64 = 0.10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::ROOT_REL_TOL;
    use crate::projection::{EIG_FLOOR_FACTOR, GRAM_RESIDUAL_MAX};

    #[test]
    fn solver_tolerances_sit_below_check_slacks() {
        assert!(IRLS_OBJECTIVE_REL_TOL < Q_MONOTONICITY_REL_SLACK);
        assert!(LAWSON_GAP_REL_TOL < SINGLE_BALL_REL_SLACK);
        assert!(LAWSON_GAP_REL_TOL < LAWSON_ACCEPT_REL_GAP);
        assert!(LAWSON_ACCEPT_REL_GAP < GRID_TOLERANCE);
        assert!(ROOT_REL_TOL < ATOM_SIZE_RATIO_TOL);
        assert!(GRAM_RESIDUAL_MAX <= ATOM_MOMENT_TOL);
    }

    #[test]
    fn check_slacks_sit_below_the_quadrature_target() {
        for slack in [
            ATOM_SIZE_RATIO_TOL,
            ATOM_MOMENT_TOL,
            SINGLE_BALL_REL_SLACK,
            FUNCTIONAL_REL_SLACK,
            DUAL_NORM_REL_SLACK,
            Q_MONOTONICITY_REL_SLACK,
        ] {
            assert!(slack < GRID_TOLERANCE);
        }
    }

    #[test]
    fn floors_are_strictly_tighter_than_their_consumers() {
        assert!(ATOM_DEGENERACY_FLOOR < ATOM_MOMENT_TOL);
        assert!(IRLS_RESIDUAL_FLOOR_FACTOR < IRLS_OBJECTIVE_REL_TOL);
        assert!(EIG_FLOOR_FACTOR < GRAM_RESIDUAL_MAX);
        assert!(SEMINORM_MAX_FAILURE_FRACTION < 1.0);
    }
}
