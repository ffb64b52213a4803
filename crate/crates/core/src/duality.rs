//! The pairing `(f, g) -> integral of f g` and direct numerical checks of
//! the inequalities that connect atoms to polynomial approximation error.
//!
//! Every check in this module returns a [`BoundCheck`] carrying both sides
//! of its inequality, so callers (and reports) can see the margin rather
//! than a bare boolean. The bounds hold exactly for the discrete measure
//! (node count times cell weight) when both functions live on the same
//! anchor grid; the stated slacks only absorb solver tolerances, never
//! discretization error in the inequality itself.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::anisotropy::AnisotropicBall;
use crate::atoms::{aggregate_norm, Atom, AtomicCombination, BoundCheck};
use crate::campanato::{best_poly_error, campanato_seminorm, BallSearchDomain, CampanatoParams};
use crate::error::{Error, Result};
use crate::grid::{default_resolution, in_ball_indices, AxisBox, GridFunction};
use crate::mixed_norm::{conjugate_exponent, indicator_mixed_norm, lr_norm_on_ball};
use crate::projection::OrthonormalBasis;
use crate::tolerances::{
    FUNCTIONAL_REL_SLACK, PAIRING_ABS_SLACK, SINGLE_BALL_REL_SLACK,
};

/// Extra polynomial degrees (beyond the annihilated ones) spanned by the
/// random test functions of [`dual_norm_on_ball`].
pub const DUAL_SAMPLE_EXTRA_DEGREE: usize = 3;

/// A random dual sample whose norm, relative to its pre-projection size,
/// falls below this floor is discarded as degenerate.
pub const SAMPLE_DEGENERACY_FLOOR: f64 = 1e-12;

/// Two-route consistency tolerance for [`sup_domination_check`]: the ball
/// score used by the seminorm search and the bound factor used by
/// [`single_ball_bound`] are the same quantity computed through different
/// code paths, so they must agree to near round-off.
pub const SUP_DOMINATION_TOL: f64 = 1e-9;

/// Quadrature of `f * g` over the intersection of the two boxes.
///
/// The sum runs over the nodes of `f`'s lattice that lie inside the
/// intersection, weighted by `f`'s cell weight. When `g` shares the anchor
/// grid, its values transfer by index and the quadrature is the exact
/// discrete pairing; otherwise `g` is read at the nearest cell, which adds
/// an O(spacing) consistency error. Boxes that do not overlap with positive
/// volume are a degenerate-domain error.
pub fn pairing(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if f.lattice().dim() != g.lattice().dim() {
        return Err(Error::DimensionMismatch(format!(
            "pairing arguments have dimensions {} and {}",
            f.lattice().dim(),
            g.lattice().dim()
        )));
    }
    let inter = f
        .lattice()
        .bounds()
        .intersect(&g.lattice().bounds())
        .ok_or_else(|| {
            Error::DegenerateDomain("the two functions' boxes do not overlap".into())
        })?;
    let sub = f.lattice().aligned_restriction(&inter)?;
    let shared = g.lattice().same_anchor(f.lattice());
    let mut total = 0.0;
    for flat in 0..sub.node_count() {
        let x = sub.node(flat);
        // The restriction rounds outward to whole cells, so guard against
        // nodes that fall outside the true intersection.
        if !inter.contains_point(&x) {
            continue;
        }
        let Some(fi) = f.lattice().index_of_sub_node(&sub, flat) else {
            continue;
        };
        let gv = if shared {
            match g.lattice().index_of_sub_node(&sub, flat) {
                Some(gi) => g.values()[gi],
                None => continue,
            }
        } else {
            match g.eval_nearest(&x) {
                Some(v) => v,
                None => continue,
            }
        };
        total += f.values()[fi] * gv;
    }
    Ok(total * sub.cell_weight())
}

/// Discrete measure of the ball on the function's own lattice: in-ball node
/// count times cell weight. This is the `|B|` every bound in this module
/// uses, matching the convention of the atom size bound.
fn discrete_measure(f: &GridFunction, ball: &AnisotropicBall) -> Result<f64> {
    let inside = in_ball_indices(f.lattice(), ball)?;
    Ok(inside.len() as f64 * f.lattice().cell_weight())
}

/// Checks the one-ball duality chain: the pairing of an atom against `g` is
/// bounded by the atom's size bound times the best polynomial approximation
/// error of `g` on the atom's ball in the conjugate exponent.
///
/// `lhs = |pairing(a, g)|`;
/// `rhs = (|B|^{1/r} / ||chi_B||) * inf_P ||g - P||_{L^{r'}(B)}` with
/// `1/r + 1/r' = 1`. The inequality composes Hoelder with the atom's
/// vanishing moments, so a failure beyond [`SINGLE_BALL_REL_SLACK`]
/// indicates a defect in one of the computed quantities, not in the bound.
pub fn single_ball_bound(atom: &Atom, g: &GridFunction) -> Result<BoundCheck> {
    let ball = atom.ball();
    let (lo, hi) = ball.bounding_box();
    let bbox = AxisBox::new(lo, hi)?;
    if !g.lattice().bounds().contains_box(&bbox) {
        return Err(Error::InvalidInput(
            "the atom's ball must lie inside g's box".into(),
        ));
    }
    let r = atom.params().r();
    let r_conj = conjugate_exponent(r)?;
    let lhs = pairing(atom.values(), g)?.abs();
    let fit = best_poly_error(g, ball, r_conj, atom.params().s())?;
    let chi = indicator_mixed_norm(ball, atom.params().p(), &default_resolution(ball.dim())?)?;
    let m = discrete_measure(atom.values(), ball)?;
    let rhs = m.powf(1.0 / r) / chi * fit.raw_error;
    Ok(BoundCheck::of(
        lhs,
        rhs,
        1.0 + SINGLE_BALL_REL_SLACK,
        PAIRING_ABS_SLACK,
    ))
}

/// Consistency identity between the seminorm search and the single-ball
/// bound: on the atom's own ball, the searched weighted score
/// `(m / ||chi_B||) * normalized error` equals the bound factor
/// `(m^{1/r} / ||chi_B||) * raw error` because the raw error is the
/// normalized error times `m^{1/r'}`. Both sides are computed through their
/// production code paths and must agree to [`SUP_DOMINATION_TOL`].
pub fn sup_domination_check(atom: &Atom, g: &GridFunction) -> Result<BoundCheck> {
    let ball = atom.ball();
    let r = atom.params().r();
    let r_conj = conjugate_exponent(r)?;
    let fit = best_poly_error(g, ball, r_conj, atom.params().s())?;
    let chi = indicator_mixed_norm(ball, atom.params().p(), &default_resolution(ball.dim())?)?;
    let m = discrete_measure(atom.values(), ball)?;
    let bound_factor = m.powf(1.0 / r) / chi * fit.raw_error;
    let score = fit.measure / chi * fit.normalized_error;
    Ok(BoundCheck::of(
        bound_factor,
        score,
        1.0 + SUP_DOMINATION_TOL,
        PAIRING_ABS_SLACK,
    ))
}

/// Checks the full functional bound: the pairing of a finite atomic
/// combination against `g` is bounded by the combination's aggregate norm
/// times the searched oscillation seminorm of `g`.
///
/// The searched seminorm is a lower bound for the continuum supremum, so
/// the check is only sound if the search provably dominates the per-ball
/// quantities the chain actually uses. That is arranged by augmenting the
/// search domain with every atom's own center and radius; the augmentation
/// is mandatory, not an optimization.
///
/// `params` must describe the dual side of the combination: matching
/// anisotropy, matching moment order, component exponents equal to the
/// atoms' integrability vector, and inner exponent conjugate to the atoms'
/// size exponent. Mismatches are rejected rather than silently checked
/// against the wrong seminorm.
pub fn functional_norm_bound(
    c: &AtomicCombination,
    g: &GridFunction,
    params: &CampanatoParams,
    domain: &BallSearchDomain,
) -> Result<BoundCheck> {
    let first = &c.atoms()[0];
    if params.p().components() != first.params().p().components() {
        return Err(Error::InvalidInput(
            "seminorm exponent vector must equal the atoms' integrability vector".into(),
        ));
    }
    if params.s() != first.params().s() {
        return Err(Error::InvalidInput(
            "seminorm moment order must equal the atoms' moment order".into(),
        ));
    }
    if params.anisotropy().exponents() != first.ball().anisotropy().exponents() {
        return Err(Error::InvalidInput(
            "seminorm anisotropy must equal the atoms' anisotropy".into(),
        ));
    }
    let r_conj = conjugate_exponent(first.params().r())?;
    if (params.q() - r_conj).abs() > 1e-12 * r_conj && !(params.q() == r_conj) {
        return Err(Error::InvalidInput(format!(
            "seminorm inner exponent {} is not conjugate to the atoms' size exponent {}",
            params.q(),
            first.params().r()
        )));
    }
    if first.params().p().p_plus() > 1.0 {
        return Err(Error::InvalidInput(
            "the functional bound requires every component exponent to be at most 1".into(),
        ));
    }
    let g_bounds = g.lattice().bounds();
    let mut centers = domain.centers().to_vec();
    let mut radii = domain.radii().to_vec();
    for atom in c.atoms() {
        let (lo, hi) = atom.ball().bounding_box();
        if !g_bounds.contains_box(&AxisBox::new(lo, hi)?) {
            return Err(Error::InvalidInput(
                "every atom's ball must lie inside g's box".into(),
            ));
        }
        let center = atom.ball().center().to_vec();
        if !centers.iter().any(|c| c == &center) {
            centers.push(center);
        }
        let radius = atom.ball().radius();
        if !radii.iter().any(|&r| r == radius) {
            radii.push(radius);
        }
    }
    let augmented = BallSearchDomain::new(centers, radii, domain.refinement_rounds())?;

    let mut lhs = 0.0;
    let mut lambda_l1 = 0.0;
    for (atom, &lambda) in c.atoms().iter().zip(c.lambdas()) {
        lhs += lambda * pairing(atom.values(), g)?;
        lambda_l1 += lambda.abs();
    }
    let seminorm = campanato_seminorm(g, params, &augmented)?;
    let rhs = aggregate_norm(c)? * seminorm.value;

    let sup_g = g.values().iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let absolute = PAIRING_ABS_SLACK * (1.0 + lambda_l1 * sup_g);
    Ok(BoundCheck::of(
        lhs.abs(),
        rhs,
        1.0 + FUNCTIONAL_REL_SLACK,
        absolute,
    ))
}

/// Outcome of the randomized dual-norm estimate.
#[derive(Debug, Clone, Copy)]
pub struct DualNormEstimate {
    /// Largest |pairing| over the accepted samples; a lower bound for the
    /// dual norm of `g` on the annihilator subspace.
    pub value: f64,
    /// Samples whose projection survived normalization.
    pub accepted: usize,
    /// Samples discarded as degenerate.
    pub degenerate: usize,
    /// Index of the sample attaining `value`.
    pub attained_at: usize,
}

/// Empirical dual norm of `g` over random ball-supported test functions
/// with vanishing moments.
///
/// Each sample is a random combination (standard normal coefficients) of
/// the discrete orthonormal polynomial basis of degree
/// `s + DUAL_SAMPLE_EXTRA_DEGREE` on the ball, explicitly re-projected so
/// its discrete moments of order up to `s` vanish, then normalized in
/// `L^r(B)`. The maximum of |pairing(sample, g)| over `samples` draws is a
/// lower bound for `inf_P ||g - P||_{L^{r'}(B)}` (up to
/// [`DUAL_NORM_REL_SLACK`] of solver noise) and approaches it from below as
/// the sample count grows. Draws come from one sequential stream, so the
/// estimate is non-decreasing in `samples` at a fixed seed.
pub fn dual_norm_on_ball(
    g: &GridFunction,
    ball: &AnisotropicBall,
    r: f64,
    s: usize,
    samples: usize,
    seed: u64,
) -> Result<DualNormEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    conjugate_exponent(r)?;
    let restricted = g.restrict_to_ball(ball)?;
    let rich = OrthonormalBasis::build(restricted.lattice(), ball, s + DUAL_SAMPLE_EXTRA_DEGREE)?;
    let low = OrthonormalBasis::build(restricted.lattice(), ball, s)?;
    let q_rich = rich.values_at_nodes();
    let q_low = low.values_at_nodes();
    let g_nodes = DVector::from_vec(low.function_at_nodes(&restricted)?);
    let w = restricted.lattice().cell_weight();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut attained_at = 0usize;
    let mut accepted = 0usize;
    let mut degenerate = 0usize;
    let mut sample = GridFunction::constant(restricted.lattice(), 0.0);
    for k in 0..samples {
        let coeffs =
            DVector::from_iterator(rich.len(), (0..rich.len()).map(|_| rng.sample(StandardNormal)));
        let mut nodes = q_rich.tr_mul(&coeffs);
        let raw_scale = nodes.amax();
        // Exact discrete moment kill: subtract the projection onto the
        // low-degree span, valid whether or not the basis is nested.
        let low_coeffs = &q_low * &nodes * w;
        nodes -= q_low.tr_mul(&low_coeffs);

        for v in sample.values_mut() {
            *v = 0.0;
        }
        for (j, &idx) in rich.node_indices().iter().enumerate() {
            sample.values_mut()[idx] = nodes[j];
        }
        let norm = lr_norm_on_ball(&sample, ball, r)?;
        if norm <= SAMPLE_DEGENERACY_FLOOR * raw_scale.max(f64::MIN_POSITIVE) {
            degenerate += 1;
            continue;
        }
        accepted += 1;
        let pair = (nodes.dot(&g_nodes) * w / norm).abs();
        if pair > best {
            best = pair;
            attained_at = k;
        }
    }
    if accepted == 0 {
        return Err(Error::Sampling(
            "every random sample projected to zero on the ball".into(),
        ));
    }
    Ok(DualNormEstimate {
        value: best,
        accepted,
        degenerate,
        attained_at,
    })
}
