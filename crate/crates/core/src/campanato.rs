//! Campanato-type seminorm: weighted best polynomial approximation on a
//! ball, then a supremum over a searched ball family.
//!
//! The inner problem minimizes the normalized `L^q` error of a degree-`s`
//! polynomial fit on an anisotropic ball. `q = 2` is solved exactly by
//! orthogonal projection; `q = inf` by reference exchange for the discrete
//! minimax, warm-started by Lawson reweighting above one dimension; other
//! `q >= 1` by iteratively reweighted least squares.
//! The outer supremum over all balls has no finite exact procedure, so
//! [`campanato_seminorm`] scans a configurable center/radius family and
//! sharpens the best candidate by local refinement. The reported value is a
//! lower bound for the continuum supremum; every score it maximizes is a
//! faithfully computed ball quantity.

use crate::anisotropy::{AnisotropicBall, AnisotropyVector, ExponentVector};
use crate::atoms::BoundCheck;
use crate::error::{Error, Result};
use crate::grid::{default_resolution, AxisBox, GridFunction};
use crate::mixed_norm::indicator_mixed_norm;
use crate::projection::{OrthonormalBasis, Polynomial};
use crate::tolerances::{
    IRLS_MAX_ITER, IRLS_OBJECTIVE_REL_TOL, IRLS_RESIDUAL_FLOOR_FACTOR, LAWSON_ACCEPT_REL_GAP,
    LAWSON_GAP_REL_TOL, LAWSON_MAX_ITER, Q_MONOTONICITY_REL_SLACK,
    SEMINORM_MAX_FAILURE_FRACTION,
};
use nalgebra::{Cholesky, DVector};
use rayon::prelude::*;

/// Residuals this small relative to the data are treated as an exact fit.
const FLAT_RESIDUAL_FACTOR: f64 = 1e-12;

/// Minimax reweighting iterations before the first reference-exchange
/// attempt; by then the weights have usually localized the extreme nodes.
const MINIMAX_WARMUP_ITERS: usize = 80;

/// Reweighting iterations between reference-exchange retries.
const MINIMAX_EXCHANGE_STRIDE: usize = 120;

/// Pivot cap for the reference exchange. The levelled error is
/// nondecreasing and the reference has at most a handful of slots, so real
/// runs settle in far fewer pivots.
const EXCHANGE_MAX_PIVOTS: usize = 500;

/// Dual weights this far below zero void a reference-exchange certificate.
const EXCHANGE_FEASIBILITY_TOL: f64 = 1e-11;

/// Golden-section iterations per radius refinement.
const RADIUS_SEARCH_ITERS: usize = 10;

/// Probe sweeps per center refinement round; the step halves every sweep,
/// so this also fixes the final center resolution.
const CENTER_SEARCH_SWEEPS: usize = 6;

/// Result of one inner best-approximation problem.
#[derive(Debug, Clone)]
pub struct BestPolyFit {
    /// Measure-normalized error `[(1/m) sum_B |g-P|^q w]^{1/q}`; the node
    /// maximum when `q = inf`.
    pub normalized_error: f64,
    /// Plain `L^q` norm of the residual over the ball, no normalization.
    pub raw_error: f64,
    /// The minimizing polynomial.
    pub argmin: Polynomial,
    /// Discrete ball measure: in-ball node count times cell weight.
    pub measure: f64,
    /// Inner linear solves performed (reweighting steps, exchange pivots).
    pub iterations: usize,
}

/// Best degree-`s` polynomial approximation of `g` on `ball` in the
/// normalized `L^q` sense.
///
/// The fit runs on the cell-aligned restriction of `g`'s lattice to the
/// ball's bounding box, so node values transfer exactly. Non-convergence
/// of the reweighting loops reports a convergence error with the stalled
/// gap in the message.
pub fn best_poly_error(
    g: &GridFunction,
    ball: &AnisotropicBall,
    q: f64,
    s: usize,
) -> Result<BestPolyFit> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidInput(format!(
            "inner exponent must lie in [1, inf], got {q}"
        )));
    }
    let (blo, bhi) = ball.bounding_box();
    let sub = g.lattice().aligned_restriction(&AxisBox::new(blo, bhi)?)?;
    let basis = OrthonormalBasis::build(&sub, ball, s)?;
    let g_nodes = basis.function_at_nodes(g)?;
    let gvec = DVector::from_column_slice(&g_nodes);
    let qmat = basis.values_at_nodes();
    let w = basis.cell_weight();
    let m = basis.measure();
    let scale = g_nodes.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    // The unweighted projection seeds every exponent and is already the
    // exact answer for q = 2.
    let mut coeffs = DVector::from_column_slice(&basis.coefficients_of_values(&g_nodes));
    let mut residual = &gvec - qmat.tr_mul(&coeffs);
    let mut iterations = 1usize;

    if q.is_infinite() {
        if ball.dim() == 1 {
            // On a line the basis is a Chebyshev system, so the discrete
            // minimax problem is solved exactly by reference exchange.
            let (c, iters) = discrete_minimax_1d(&qmat, &gvec, scale)?;
            coeffs = c;
            iterations = iters;
            residual = &gvec - qmat.tr_mul(&coeffs);
        } else {
            // Lawson reweighting with a duality-gap stop. Two lower bounds
            // on the optimal minimax error certify convergence: the
            // weighted rms error (weights sum to 1, so it never exceeds
            // the optimum), and, once the iteration has localized the
            // extreme nodes, an exact bound from a nonnegative
            // annihilating measure on them. The reweighting converges
            // linearly at a rate that can flatten short of the gap stop,
            // so after a warm-up it periodically hands its iterate to the
            // exact reference exchange, which levels the residual in a few
            // pivots whenever it finds a dual-feasible reference.
            let n = g_nodes.len();
            let mut weights = DVector::from_element(n, 1.0 / n as f64);
            let mut converged = false;
            let mut best_lower = 0.0f64;
            let mut gap = f64::INFINITY;
            let mut rmax = f64::INFINITY;
            for iter in 0..=LAWSON_MAX_ITER {
                let abs: DVector<f64> = residual.map(f64::abs);
                rmax = abs.max();
                if rmax <= FLAT_RESIDUAL_FACTOR * scale {
                    converged = true;
                    break;
                }
                let rms = residual
                    .iter()
                    .zip(weights.iter())
                    .map(|(r, w)| w * r * r)
                    .sum::<f64>()
                    .sqrt();
                best_lower = best_lower.max(rms);
                if let Some(dual) = minimax_dual_bound(&qmat, &gvec, &residual, &weights, &coeffs)
                {
                    best_lower = best_lower.max(dual);
                }
                gap = rmax - best_lower;
                if gap <= LAWSON_GAP_REL_TOL * rmax {
                    converged = true;
                    break;
                }
                let warmed = iter >= MINIMAX_WARMUP_ITERS
                    && (iter - MINIMAX_WARMUP_ITERS) % MINIMAX_EXCHANGE_STRIDE == 0;
                if warmed || iter == LAWSON_MAX_ITER {
                    if let Some((c, pivots)) =
                        discrete_minimax_reference(&qmat, &gvec, &residual, scale)
                    {
                        coeffs = c;
                        residual = &gvec - qmat.tr_mul(&coeffs);
                        iterations += pivots;
                        converged = true;
                        break;
                    }
                }
                if iter == LAWSON_MAX_ITER {
                    break;
                }
                let mean = weights.dot(&abs);
                if mean <= f64::MIN_POSITIVE {
                    return Err(Error::Convergence(
                        "minimax weights collapsed onto an exactly fit node set".into(),
                    ));
                }
                for i in 0..n {
                    weights[i] *= abs[i] / mean;
                }
                coeffs = weighted_least_squares(&qmat, &gvec, &weights)?;
                residual = &gvec - qmat.tr_mul(&coeffs);
                iterations += 1;
            }
            // The achieved error of the final iterate exceeds the unknown
            // optimum by at most the duality gap, so a certified small gap
            // keeps the value usable even when no iteration levelled out.
            if !converged && gap <= LAWSON_ACCEPT_REL_GAP * rmax {
                converged = true;
            }
            if !converged {
                return Err(Error::Convergence(format!(
                    "minimax fit stalled after {LAWSON_MAX_ITER} iterations (gap {gap:.3e}, error {rmax:.3e})"
                )));
            }
        }
        let err = residual.map(f64::abs).max();
        return Ok(BestPolyFit {
            normalized_error: err,
            raw_error: err,
            argmin: basis.polynomial_from_coefficients(coeffs.as_slice()),
            measure: m,
            iterations,
        });
    }

    if q != 2.0 {
        let floor = (IRLS_RESIDUAL_FLOOR_FACTOR * scale).max(f64::MIN_POSITIVE);
        // A full reweighted step overshoots for q > 2 because the weight
        // |r|^{q-2} grows with the residual; the 1/(q - 1) damping makes the
        // iteration contract there. Below 2 the plain step already does.
        let step = if q > 2.0 { 1.0 / (q - 1.0) } else { 1.0 };
        let mut objective = normalized_q_error(&residual, q, w, m);
        let mut best = (objective, coeffs.clone(), residual.clone());
        let mut converged = false;
        for _ in 0..IRLS_MAX_ITER {
            let weights = residual.map(|r| r.abs().max(floor).powf(q - 2.0));
            let solved = weighted_least_squares(&qmat, &gvec, &weights)?;
            coeffs = &coeffs * (1.0 - step) + solved * step;
            residual = &gvec - qmat.tr_mul(&coeffs);
            iterations += 1;
            let next = normalized_q_error(&residual, q, w, m);
            if next < best.0 {
                best = (next, coeffs.clone(), residual.clone());
            }
            let done = (objective - next).abs() <= IRLS_OBJECTIVE_REL_TOL * next.max(floor);
            objective = next;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence(format!(
                "reweighted fit stalled after {IRLS_MAX_ITER} iterations (q = {q}, error {objective:.3e})"
            )));
        }
        coeffs = best.1;
        residual = best.2;
    }

    let normalized = normalized_q_error(&residual, q, w, m);
    Ok(BestPolyFit {
        normalized_error: normalized,
        raw_error: normalized * m.powf(1.0 / q),
        argmin: basis.polynomial_from_coefficients(coeffs.as_slice()),
        measure: m,
        iterations,
    })
}

/// Discrete minimax fit over nodes of any dimension by single-point
/// reference exchange, warm-started from a residual whose extreme nodes a
/// reweighting pass has localized.
///
/// A reference is k+1 (node, sign) pairs whose levelling system
/// `sigma_t (g_t - phi_t . c) = h` comes with a nonnegative dual weight
/// vector (`sum_t lambda_t sigma_t phi_t = 0`, `sum_t lambda_t = 1`); the
/// level `h` is then an exact lower bound for the optimum. Each pivot
/// swaps the globally worst node into the reference, choosing the leaving
/// slot by the simplex ratio test, which keeps the dual weights
/// nonnegative and the level nondecreasing. Terminates once the worst
/// residual exceeds the level by at most [`LAWSON_GAP_REL_TOL`], making
/// the fit exact to that relative gap. Returns `None` whenever no
/// dual-feasible reference emerges; the caller keeps its reweighting
/// iterate.
fn discrete_minimax_reference(
    qmat: &nalgebra::DMatrix<f64>,
    g: &DVector<f64>,
    residual: &DVector<f64>,
    scale: f64,
) -> Option<(DVector<f64>, usize)> {
    let k = qmat.nrows();
    let m = qmat.ncols();
    if m < k + 1 {
        return None;
    }
    let sign_at = |node: usize| if residual[node] < 0.0 { -1.0 } else { 1.0 };
    let signed_row = |node: usize, sigma: f64| {
        let mut row = DVector::zeros(k + 1);
        for a in 0..k {
            row[a] = sigma * qmat[(a, node)];
        }
        row[k] = 1.0;
        row
    };
    // Twice-iterated Gram-Schmidt rejection against the rows of `kept`;
    // a candidate row is usable when a meaningful fraction survives.
    let independent = |kept: &[(usize, f64)], row: &DVector<f64>| -> bool {
        let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(kept.len());
        for &(node, sigma) in kept {
            let mut v = signed_row(node, sigma);
            for _ in 0..2 {
                for u in &ortho {
                    let d = u.dot(&v);
                    v -= u * d;
                }
            }
            let nv = v.norm();
            if nv > 0.0 {
                ortho.push(v / nv);
            }
        }
        let norm = row.norm();
        let mut rej = row.clone();
        for _ in 0..2 {
            for u in &ortho {
                let d = u.dot(&rej);
                rej -= u * d;
            }
        }
        rej.norm() > 1e-8 * norm
    };

    // Candidates in decreasing residual magnitude: near a levelled
    // residual, magnitude ranks extremality. The initial reference takes
    // the first k+1 with numerically independent rows; the rest queue up
    // as repair material.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_unstable_by(|&a, &b| residual[b].abs().total_cmp(&residual[a].abs()));
    let mut picked: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
    let mut ortho: Vec<DVector<f64>> = Vec::with_capacity(k + 1);
    let mut spare: Vec<usize> = Vec::new();
    for &node in &order {
        if picked.len() == k + 1 {
            spare.push(node);
            continue;
        }
        let sigma = sign_at(node);
        let row = signed_row(node, sigma);
        let norm = row.norm();
        let mut rej = row;
        for _ in 0..2 {
            for u in &ortho {
                let d = u.dot(&rej);
                rej -= u * d;
            }
        }
        let rn = rej.norm();
        if rn > 1e-8 * norm {
            ortho.push(rej / rn);
            picked.push((node, sigma));
        } else {
            spare.push(node);
        }
    }
    if picked.len() < k + 1 {
        return None;
    }

    let mut e_last = DVector::zeros(k + 1);
    e_last[k] = 1.0;
    let mut repairs_left = 2 * (k + 1);
    let mut spare_pos = 0usize;
    let mut pivots = 0usize;
    while pivots <= EXCHANGE_MAX_PIVOTS {
        let mut mat = nalgebra::DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (t, &(node, sigma)) in picked.iter().enumerate() {
            for a in 0..k {
                mat[(t, a)] = sigma * qmat[(a, node)];
            }
            mat[(t, k)] = 1.0;
            rhs[t] = sigma * g[node];
        }
        let lut = mat.transpose().full_piv_lu();
        let lambda = lut.solve(&e_last)?;
        if lambda.min() < -EXCHANGE_FEASIBILITY_TOL {
            // Not a certificate yet: swap the most negative slot for the
            // next spare that keeps the rows independent.
            if repairs_left == 0 {
                return None;
            }
            repairs_left -= 1;
            let worst_t = (0..=k).min_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))?;
            let kept: Vec<(usize, f64)> = picked
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != worst_t)
                .map(|(_, &p)| p)
                .collect();
            let mut found = None;
            while spare_pos < spare.len() {
                let node = spare[spare_pos];
                spare_pos += 1;
                if independent(&kept, &signed_row(node, sign_at(node))) {
                    found = Some(node);
                    break;
                }
            }
            let node = found?;
            picked[worst_t] = (node, sign_at(node));
            continue;
        }
        let x = mat.full_piv_lu().solve(&rhs)?;
        let coeffs = x.rows(0, k).into_owned();
        let level = x[k];
        let res = g - qmat.tr_mul(&coeffs);
        let mut worst = 0usize;
        let mut rmax = -1.0f64;
        for (i, r) in res.iter().enumerate() {
            if r.abs() > rmax {
                rmax = r.abs();
                worst = i;
            }
        }
        if rmax <= FLAT_RESIDUAL_FACTOR * scale
            || (level > 0.0 && rmax <= level * (1.0 + LAWSON_GAP_REL_TOL))
        {
            return Some((coeffs, pivots.max(1)));
        }
        if picked.iter().any(|&(node, _)| node == worst) {
            // The worst node already sits on the levelled reference, so
            // the solve and the residual disagree at rounding level; no
            // sharper certificate is available from here.
            return None;
        }
        let sigma = if res[worst] < 0.0 { -1.0 } else { 1.0 };
        let y = lut.solve(&signed_row(worst, sigma))?;
        let ymax = y.amax();
        let mut leave = None;
        let mut best_ratio = f64::INFINITY;
        for t in 0..=k {
            if y[t] > 1e-14 * ymax {
                let ratio = lambda[t].max(0.0) / y[t];
                if ratio < best_ratio {
                    best_ratio = ratio;
                    leave = Some(t);
                }
            }
        }
        picked[leave?] = (worst, sigma);
        pivots += 1;
    }
    None
}

/// Discrete minimax fit over 1-D nodes by single-point reference exchange.
///
/// Columns of `qmat` must be in ascending coordinate order. Each round
/// levels the residual on a k+1 point alternating reference (an exact
/// lower bound for the optimum), then swaps the globally worst node into
/// the reference; the levelled error rises strictly, so the exchange
/// terminates. Converged when the worst residual exceeds the level by at
/// most [`LAWSON_GAP_REL_TOL`].
fn discrete_minimax_1d(
    qmat: &nalgebra::DMatrix<f64>,
    g: &DVector<f64>,
    scale: f64,
) -> Result<(DVector<f64>, usize)> {
    let k = qmat.nrows();
    let n = qmat.ncols();
    let mut reference: Vec<usize> = (0..=k).map(|j| j * (n - 1) / k).collect();
    reference.dedup();
    if reference.len() < k + 1 {
        return Err(Error::InsufficientNodes(
            "too few distinct nodes for an alternating reference".into(),
        ));
    }
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > LAWSON_MAX_ITER {
            return Err(Error::Convergence(format!(
                "minimax exchange failed to settle after {LAWSON_MAX_ITER} rounds"
            )));
        }
        let mut system = nalgebra::DMatrix::zeros(k + 1, k + 1);
        let mut rhs = DVector::zeros(k + 1);
        for (row, &node) in reference.iter().enumerate() {
            for a in 0..k {
                system[(row, a)] = qmat[(a, node)];
            }
            system[(row, k)] = if row % 2 == 0 { 1.0 } else { -1.0 };
            rhs[row] = g[node];
        }
        let sol = system
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Conditioning("degenerate minimax reference".into()))?;
        let coeffs = sol.rows(0, k).into_owned();
        let level = sol[k].abs();
        let residual = g - qmat.tr_mul(&coeffs);
        let mut worst = 0usize;
        let mut rmax = -1.0f64;
        for (i, r) in residual.iter().enumerate() {
            if r.abs() > rmax {
                rmax = r.abs();
                worst = i;
            }
        }
        if rmax <= level * (1.0 + LAWSON_GAP_REL_TOL) || rmax <= FLAT_RESIDUAL_FACTOR * scale {
            return Ok((coeffs, iterations));
        }
        let sign = residual[worst].signum();
        let pos = reference.partition_point(|&r| r < worst);
        if reference.get(pos) == Some(&worst) {
            return Err(Error::Convergence(
                "minimax exchange stalled on its own reference".into(),
            ));
        }
        if pos == 0 {
            if residual[reference[0]].signum() == sign {
                reference[0] = worst;
            } else {
                reference.insert(0, worst);
                reference.pop();
            }
        } else if pos == reference.len() {
            if residual[reference[pos - 1]].signum() == sign {
                reference[pos - 1] = worst;
            } else {
                reference.push(worst);
                reference.remove(0);
            }
        } else if residual[reference[pos - 1]].signum() == sign {
            reference[pos - 1] = worst;
        } else {
            reference[pos] = worst;
        }
    }
}

/// Exact lower bound for the discrete minimax error from the current
/// residual pattern, when it exists.
///
/// For any mu >= 0 with sum 1 and signs sigma such that sum_j mu_j sigma_j
/// q(., j) = 0, every coefficient vector c satisfies
/// max_i |g_i - (Q^T c)_i| >= sum_j mu_j sigma_j g_j: the measure
/// annihilates the fit. The optimal solution is supported on k+1 extreme
/// nodes (barring degeneracy), so the k+1 largest residuals with their
/// signs are tried; infeasibility just means the bound is not available
/// this round.
///
/// The k+1 candidate nodes are picked by largest reweighting weight (the
/// multiplicative updates concentrate weight on persistently extreme
/// nodes, while the largest raw residuals can all cluster around one
/// smooth peak), except that the top node of each residual sign is always
/// included: a one-signed selection can never carry an annihilating
/// measure.
fn minimax_dual_bound(
    qmat: &nalgebra::DMatrix<f64>,
    g: &DVector<f64>,
    residual: &DVector<f64>,
    weights: &DVector<f64>,
    coeffs: &DVector<f64>,
) -> Option<f64> {
    let k = qmat.nrows();
    let n = qmat.ncols();
    if n < k + 1 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let top_pos = order.iter().copied().find(|&i| residual[i] > 0.0)?;
    let top_neg = order.iter().copied().find(|&i| residual[i] < 0.0)?;
    let mut active: Vec<usize> = vec![top_pos, top_neg];
    for &i in &order {
        if active.len() == k + 1 {
            break;
        }
        if i != top_pos && i != top_neg {
            active.push(i);
        }
    }
    let active = &active[..];

    let mut system = nalgebra::DMatrix::zeros(k + 1, k + 1);
    for (j, &node) in active.iter().enumerate() {
        let sigma = residual[node].signum();
        for row in 0..k {
            system[(row, j)] = sigma * qmat[(row, node)];
        }
        system[(k, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let mu = system.clone().lu().solve(&rhs)?;
    if mu.iter().any(|&v| v < 0.0) {
        return None;
    }
    // Imperfect annihilation leaks c-dependence into the bound; charge it
    // against a generous coefficient budget.
    let defect = &system * &mu - rhs;
    let budget = 2.0 * coeffs.amax() + g.amax() + 1.0;
    let slop: f64 = defect.rows(0, k).iter().map(|d| d.abs()).sum::<f64>() * budget;
    let bound: f64 = active
        .iter()
        .enumerate()
        .map(|(j, &node)| mu[j] * residual[node].signum() * g[node])
        .sum();
    Some(bound - slop)
}

fn normalized_q_error(residual: &DVector<f64>, q: f64, cell_weight: f64, measure: f64) -> f64 {
    let sum: f64 = residual.iter().map(|r| r.abs().powf(q)).sum();
    (sum * cell_weight / measure).powf(1.0 / q)
}

/// Solves min_c sum_i w_i (g_i - (Q^T c)_i)^2 by normal equations, with a
/// relative ridge that keeps near-degenerate weight patterns factorable.
fn weighted_least_squares(
    qmat: &nalgebra::DMatrix<f64>,
    g: &DVector<f64>,
    weights: &DVector<f64>,
) -> Result<DVector<f64>> {
    let mut scaled = qmat.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= weights[j];
    }
    let mut gram = &scaled * qmat.transpose();
    let rhs = scaled * g;
    let ridge = 1e-14 * gram.trace().max(f64::MIN_POSITIVE);
    for i in 0..gram.nrows() {
        gram[(i, i)] += ridge;
    }
    let chol = Cholesky::new(gram).ok_or_else(|| {
        Error::Conditioning("weighted normal equations are not positive definite".into())
    })?;
    Ok(chol.solve(&rhs))
}

/// Parameters of the seminorm: anisotropy, outer exponents, inner exponent,
/// and polynomial degree.
#[derive(Debug, Clone)]
pub struct CampanatoParams {
    a: AnisotropyVector,
    p: ExponentVector,
    q: f64,
    s: usize,
}

impl CampanatoParams {
    pub fn new(a: AnisotropyVector, p: ExponentVector, q: f64, s: usize) -> Result<Self> {
        if a.dim() != p.dim() {
            return Err(Error::DimensionMismatch(format!(
                "anisotropy dimension {} vs exponents {}",
                a.dim(),
                p.dim()
            )));
        }
        if q.is_nan() || q < 1.0 {
            return Err(Error::InvalidInput(format!(
                "inner exponent must lie in [1, inf], got {q}"
            )));
        }
        Ok(Self { a, p, q, s })
    }

    pub fn anisotropy(&self) -> &AnisotropyVector {
        &self.a
    }

    pub fn p(&self) -> &ExponentVector {
        &self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.p.clone(), q, self.s)
    }
}

/// Finite family of candidate balls: a center set crossed with a log-spaced
/// radius set, plus a local refinement budget.
#[derive(Debug, Clone)]
pub struct BallSearchDomain {
    centers: Vec<Vec<f64>>,
    radii: Vec<f64>,
    refinement_rounds: usize,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "radius bounds must satisfy 0 < lo <= hi < inf, got [{lo}, {hi}]"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidInput("need at least one radius".into()));
    }
    if count == 1 {
        return Ok(vec![hi]);
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|k| lo * (step * k as f64).exp()).collect())
}

impl BallSearchDomain {
    pub fn new(centers: Vec<Vec<f64>>, radii: Vec<f64>, refinement_rounds: usize) -> Result<Self> {
        if centers.is_empty() || radii.is_empty() {
            return Err(Error::InvalidInput("search domain must be nonempty".into()));
        }
        let dim = centers[0].len();
        if centers.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch("centers of mixed dimension".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidInput("radii must be positive and finite".into()));
        }
        Ok(Self { centers, radii, refinement_rounds })
    }

    /// Uniform center grid inside `bounds` crossed with log-spaced radii.
    ///
    /// The largest radius is the biggest one whose ball, centered at the
    /// box midpoint, still fits inside the box; the smallest is 1/16 of
    /// that. Balls that stick out of the box at a given center are simply
    /// not scanned.
    pub fn over_box(
        bounds: &AxisBox,
        anisotropy: &AnisotropyVector,
        centers_per_axis: usize,
        radius_count: usize,
        refinement_rounds: usize,
    ) -> Result<Self> {
        if bounds.dim() != anisotropy.dim() {
            return Err(Error::DimensionMismatch(format!(
                "box dimension {} vs anisotropy {}",
                bounds.dim(),
                anisotropy.dim()
            )));
        }
        if centers_per_axis == 0 {
            return Err(Error::InvalidInput("need at least one center per axis".into()));
        }
        let r_max = (0..bounds.dim())
            .map(|k| (bounds.width(k) / 2.0).powf(1.0 / anisotropy.exponents()[k]))
            .fold(f64::INFINITY, f64::min);
        let radii = log_spaced(r_max / 16.0, r_max, radius_count)?;

        let dim = bounds.dim();
        let mut centers = Vec::with_capacity(centers_per_axis.pow(dim as u32));
        let mut idx = vec![0usize; dim];
        loop {
            let c: Vec<f64> = (0..dim)
                .map(|k| {
                    bounds.lo()[k]
                        + (idx[k] as f64 + 0.5) * bounds.width(k) / centers_per_axis as f64
                })
                .collect();
            centers.push(c);
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Self::new(centers, radii, refinement_rounds);
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < centers_per_axis {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn refinement_rounds(&self) -> usize {
        self.refinement_rounds
    }
}

/// Outcome of the seminorm search.
#[derive(Debug, Clone)]
pub struct SeminormResult {
    /// Largest weighted error found; a lower bound for the continuum
    /// supremum.
    pub value: f64,
    /// The maximizing ball.
    pub witness: AnisotropicBall,
    /// Inner problems attempted (scan plus refinement).
    pub evaluated: usize,
    /// Inner problems skipped after solver errors.
    pub skipped: usize,
}

/// Weighted score of one ball: `(m / ||chi_B||_{L^p}) * normalized error`.
fn ball_score(g: &GridFunction, params: &CampanatoParams, ball: &AnisotropicBall) -> Result<f64> {
    let fit = best_poly_error(g, ball, params.q, params.s)?;
    let chi = indicator_mixed_norm(ball, &params.p, &default_resolution(ball.dim())?)?;
    Ok(fit.measure / chi * fit.normalized_error)
}

fn ball_fits(bounds: &AxisBox, a: &AnisotropyVector, center: &[f64], radius: f64) -> bool {
    center
        .iter()
        .zip(a.exponents())
        .enumerate()
        .all(|(k, (&c, &ak))| {
            let hw = radius.powf(ak);
            c - hw >= bounds.lo()[k] && c + hw <= bounds.hi()[k]
        })
}

/// Largest radius at which a ball centered at `center` fits in `bounds`.
fn max_fitting_radius(bounds: &AxisBox, a: &AnisotropyVector, center: &[f64]) -> f64 {
    center
        .iter()
        .zip(a.exponents())
        .enumerate()
        .map(|(k, (&c, &ak))| {
            let room = (c - bounds.lo()[k]).min(bounds.hi()[k] - c).max(0.0);
            room.powf(1.0 / ak)
        })
        .fold(f64::INFINITY, f64::min)
}

struct Search<'a> {
    g: &'a GridFunction,
    params: &'a CampanatoParams,
    bounds: AxisBox,
    best: Option<(f64, AnisotropicBall)>,
    evaluated: usize,
    skipped: usize,
}

impl Search<'_> {
    /// Scores one candidate, tracking the running maximum; returns the
    /// score for use by line searches, or None when the ball does not fit,
    /// holds too few nodes to resolve, or its solver failed. Only genuine
    /// solver failures count toward `skipped`; a ball below the lattice's
    /// resolution is simply not a candidate.
    fn probe(&mut self, center: &[f64], radius: f64) -> Option<f64> {
        if !(radius.is_finite() && radius > 0.0)
            || !ball_fits(&self.bounds, self.params.anisotropy(), center, radius)
        {
            return None;
        }
        let ball =
            AnisotropicBall::new(self.params.anisotropy().clone(), center.to_vec(), radius).ok()?;
        match ball_score(self.g, self.params, &ball) {
            Ok(score) => {
                self.evaluated += 1;
                if self.best.as_ref().is_none_or(|(b, _)| score > *b) {
                    self.best = Some((score, ball));
                }
                Some(score)
            }
            Err(Error::InsufficientNodes(_)) => None,
            Err(_) => {
                self.evaluated += 1;
                self.skipped += 1;
                None
            }
        }
    }
}

/// Seminorm of `g`: maximum weighted best-approximation error over the
/// domain's balls, followed by golden-section radius search and center
/// descent around the best candidate.
///
/// Candidate balls that stick out of `g`'s box are not evaluated. Balls
/// whose inner solver fails are skipped and counted; the search fails if
/// more than [`SEMINORM_MAX_FAILURE_FRACTION`] of attempts were skipped.
pub fn campanato_seminorm(
    g: &GridFunction,
    params: &CampanatoParams,
    domain: &BallSearchDomain,
) -> Result<SeminormResult> {
    let dim = g.lattice().dim();
    if params.anisotropy().dim() != dim || domain.centers[0].len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "function dimension {dim} vs parameters {} vs domain {}",
            params.anisotropy().dim(),
            domain.centers[0].len()
        )));
    }
    let bounds = g.lattice().bounds();

    let candidates: Vec<(Vec<f64>, f64)> = domain
        .centers
        .iter()
        .flat_map(|c| domain.radii.iter().map(move |&r| (c.clone(), r)))
        .filter(|(c, r)| ball_fits(&bounds, params.anisotropy(), c, *r))
        .collect();
    if candidates.is_empty() {
        return Err(Error::DegenerateDomain(
            "no candidate ball fits inside the function's box".into(),
        ));
    }

    let scores: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|(c, r)| {
            let ball = AnisotropicBall::new(params.anisotropy().clone(), c.clone(), *r)?;
            ball_score(g, params, &ball)
        })
        .collect();

    let mut search = Search {
        g,
        params,
        bounds: bounds.clone(),
        best: None,
        evaluated: 0,
        skipped: 0,
    };
    for ((c, r), score) in candidates.iter().zip(scores) {
        match score {
            Ok(s) => {
                search.evaluated += 1;
                if search.best.as_ref().is_none_or(|(b, _)| s > *b) {
                    let ball =
                        AnisotropicBall::new(params.anisotropy().clone(), c.clone(), *r)?;
                    search.best = Some((s, ball));
                }
            }
            Err(Error::InsufficientNodes(_)) => {}
            Err(_) => {
                search.evaluated += 1;
                search.skipped += 1;
            }
        }
    }

    let radius_ratio = if domain.radii.len() > 1 {
        let lo = domain.radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = domain.radii.iter().cloned().fold(0.0f64, f64::max);
        (hi / lo).powf(1.0 / (domain.radii.len() - 1) as f64)
    } else {
        2.0
    };

    for _ in 0..domain.refinement_rounds {
        if let Some((_, ball)) = search.best.clone() {
            refine_radius(&mut search, &ball, radius_ratio);
        }
        if let Some((_, ball)) = search.best.clone() {
            refine_center(&mut search, &ball);
        }
    }

    if search.evaluated > 0
        && search.skipped as f64 > SEMINORM_MAX_FAILURE_FRACTION * search.evaluated as f64
    {
        return Err(Error::Convergence(format!(
            "{} of {} ball fits failed; results would not be trustworthy",
            search.skipped, search.evaluated
        )));
    }
    let (value, witness) = match search.best {
        Some(best) => best,
        None if search.skipped > 0 => {
            return Err(Error::Convergence(
                "every candidate ball's inner fit failed".into(),
            ))
        }
        None => {
            return Err(Error::DegenerateDomain(
                "no candidate ball is resolvable on the function's lattice".into(),
            ))
        }
    };
    Ok(SeminormResult { value, witness, evaluated: search.evaluated, skipped: search.skipped })
}

/// Golden-section maximization of the score over log-radius around the
/// current best, bracketed by one scan step each way and clipped to fit.
fn refine_radius(search: &mut Search<'_>, ball: &AnisotropicBall, ratio: f64) {
    let center = ball.center().to_vec();
    let r_fit = max_fitting_radius(&search.bounds, search.params.anisotropy(), &center);
    let hi = (ball.radius() * ratio).min(r_fit);
    let lo = ball.radius() / ratio;
    if !(hi > lo && lo > 0.0) {
        return;
    }
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = search.probe(&center, c.exp());
    let mut fd = search.probe(&center, d.exp());
    for _ in 0..RADIUS_SEARCH_ITERS {
        if fc.unwrap_or(f64::NEG_INFINITY) >= fd.unwrap_or(f64::NEG_INFINITY) {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = search.probe(&center, c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = search.probe(&center, d.exp());
        }
    }
}

/// Axis-wise descent on the center with shrinking steps, radius fixed.
fn refine_center(search: &mut Search<'_>, ball: &AnisotropicBall) {
    let mut center = ball.center().to_vec();
    let radius = ball.radius();
    let mut steps: Vec<f64> = ball.half_widths().iter().map(|h| h / 4.0).collect();
    let mut current = match search.best.as_ref() {
        Some((s, _)) => *s,
        None => return,
    };
    for _ in 0..CENTER_SEARCH_SWEEPS {
        for axis in 0..center.len() {
            for sign in [-1.0, 1.0] {
                let mut cand = center.clone();
                cand[axis] += sign * steps[axis];
                if let Some(score) = search.probe(&cand, radius) {
                    if score > current {
                        current = score;
                        center = cand;
                    }
                }
            }
        }
        for s in &mut steps {
            *s /= 2.0;
        }
    }
}

/// Compares the seminorm at two inner exponents over the shared scan set
/// (no refinement, so both sides maximize over identical balls): passes
/// when the `q1` value stays below the `q2` value up to rounding slack.
pub fn q_monotonicity_check(
    g: &GridFunction,
    params: &CampanatoParams,
    domain: &BallSearchDomain,
    q1: f64,
    q2: f64,
) -> Result<BoundCheck> {
    if q1.is_nan() || q2.is_nan() || q1 < 1.0 || q2 <= q1 {
        return Err(Error::InvalidInput(format!(
            "exponents must satisfy 1 <= q1 < q2, got {q1}, {q2}"
        )));
    }
    let p1 = params.with_q(q1)?;
    let p2 = params.with_q(q2)?;
    let bounds = g.lattice().bounds();
    let mut v1 = 0.0f64;
    let mut v2 = 0.0f64;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    for center in &domain.centers {
        for &radius in &domain.radii {
            if !ball_fits(&bounds, params.anisotropy(), center, radius) {
                continue;
            }
            let ball =
                AnisotropicBall::new(params.anisotropy().clone(), center.clone(), radius)?;
            match (ball_score(g, &p1, &ball), ball_score(g, &p2, &ball)) {
                (Ok(s1), Ok(s2)) => {
                    evaluated += 1;
                    v1 = v1.max(s1);
                    v2 = v2.max(s2);
                }
                (Err(Error::InsufficientNodes(_)), _) | (_, Err(Error::InsufficientNodes(_))) => {}
                _ => {
                    evaluated += 1;
                    skipped += 1;
                }
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::DegenerateDomain(
            "no candidate ball fits inside the function's box".into(),
        ));
    }
    if skipped as f64 > SEMINORM_MAX_FAILURE_FRACTION * evaluated as f64 {
        return Err(Error::Convergence(format!(
            "{skipped} of {evaluated} ball fits failed; results would not be trustworthy"
        )));
    }
    let g_sup = g.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(BoundCheck::of(v1, v2, 1.0 + Q_MONOTONICITY_REL_SLACK, 1e-12 * g_sup))
}
