//! Ball-supported building blocks with vanishing moments.
//!
//! An atom is a grid function supported on an anisotropic ball whose size is
//! capped in `L^r` relative to the ball's indicator norm and whose moments
//! vanish up to a prescribed degree. [`make_atom`] manufactures one from any
//! sampled function by restriction, polynomial projection, and rescaling;
//! [`validate_atom`] re-measures the three defining conditions from the
//! stored values alone. Finite weighted combinations carry the aggregate
//! quasi-norm of [`aggregate_norm`], against which [`l1_lower_bound_check`]
//! tests the coefficient-sum lower bound.
//!
//! Size bounds use the discrete ball measure (in-ball node count times cell
//! weight) rather than the closed-form volume, so every inequality tested
//! here is exact at the lattice level and tolerances only absorb rounding.

use crate::anisotropy::{s_min, AnisotropicBall, ExponentVector};
use crate::error::{Error, Result};
use crate::grid::{default_resolution, in_ball_indices, AxisBox, GridFunction, Lattice};
use crate::mixed_norm::{indicator_mixed_norm, lr_norm_on_ball, mixed_norm};
use crate::projection::{multi_indices, OrthonormalBasis};
use crate::tolerances::{
    ATOM_DEGENERACY_FLOOR, ATOM_MOMENT_TOL, ATOM_SIZE_RATIO_TOL, GRID_TOLERANCE,
};
use nalgebra::DVector;

/// Shape parameters of an atom: outer exponent vector, inner size exponent,
/// and vanishing-moment degree.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomParams {
    p: ExponentVector,
    r: f64,
    s: usize,
}

impl AtomParams {
    /// The inner exponent must exceed 1 (infinity allowed); the moment
    /// degree is checked against the admissible minimum once the ball's
    /// anisotropy is known, in [`make_atom`].
    pub fn new(p: ExponentVector, r: f64, s: usize) -> Result<Self> {
        if !(r > 1.0) {
            return Err(Error::InvalidInput(format!(
                "inner exponent must lie in (1, inf], got {r}"
            )));
        }
        Ok(Self { p, r, s })
    }

    pub fn p(&self) -> &ExponentVector {
        &self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

/// Margins measured when an atom is built or re-validated.
#[derive(Debug, Clone, Copy)]
pub struct AtomEvidence {
    /// Largest absolute node value outside the ball; exactly 0 for a
    /// correctly supported atom.
    pub support_margin: f64,
    /// ||a||_{L^r} divided by its bound m^{1/r}/||chi_B||; 1 up to rounding
    /// at construction.
    pub size_ratio: f64,
    /// Largest moment integral relative to ||a||_{L^1} times the monomial's
    /// in-ball magnitude, over all degrees up to s.
    pub max_moment_residual: f64,
    /// L^r norm of the projection residual relative to the input's, before
    /// rescaling; small values mean the input was nearly polynomial.
    pub residual_fraction: f64,
}

/// A normalized, ball-supported, moment-free grid function.
///
/// Immutable after construction. The stored evidence describes the build;
/// [`validate_atom`] recomputes the conditions from scratch.
#[derive(Debug, Clone)]
pub struct Atom {
    values: GridFunction,
    ball: AnisotropicBall,
    params: AtomParams,
    evidence: AtomEvidence,
    seed: Option<u64>,
}

impl Atom {
    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn ball(&self) -> &AnisotropicBall {
        &self.ball
    }

    pub fn params(&self) -> &AtomParams {
        &self.params
    }

    pub fn evidence(&self) -> &AtomEvidence {
        &self.evidence
    }

    /// Seed of the sampled input the atom was built from, when one exists;
    /// lets a failing randomized case be rebuilt exactly.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Builds an atom supported on `ball` from an arbitrary sampled function.
///
/// The input is restricted to the ball on a cell-aligned sub-lattice, its
/// degree-`s` quadrature projection is subtracted at the in-ball nodes
/// (leaving all moments through degree `s` zero by orthogonality), and the
/// residual is scaled so the `L^r` size bound holds with equality:
///
/// ```text
/// a = ( m^{1/r} / ||chi_B||_{L^p} ) * (f - proj f) / ||f - proj f||_{L^r(B)}
/// ```
///
/// where `m` is the discrete ball measure on the atom's lattice and the
/// indicator norm is evaluated at the default resolution for the dimension.
///
/// Errors with degenerate input when the residual is below
/// [`ATOM_DEGENERACY_FLOOR`] times the input's norm, i.e. `f` coincides
/// with a polynomial on the ball.
pub fn make_atom(f: &GridFunction, ball: &AnisotropicBall, params: &AtomParams) -> Result<Atom> {
    let dim = ball.dim();
    if params.p.dim() != dim || f.lattice().dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "ball dimension {dim} vs exponents {} vs function {}",
            params.p.dim(),
            f.lattice().dim()
        )));
    }
    let floor = s_min(ball.anisotropy(), &params.p)?;
    if params.s < floor {
        return Err(Error::InvalidInput(format!(
            "moment degree {} below admissible minimum {floor}",
            params.s
        )));
    }

    let restricted = f.restrict_to_ball(ball)?;
    let basis = OrthonormalBasis::build(restricted.lattice(), ball, params.s)?;
    let f_nodes = basis.function_at_nodes(&restricted)?;
    let coeffs = basis.coefficients_of_values(&f_nodes);
    let q = basis.values_at_nodes();
    let proj_nodes = q.tr_mul(&DVector::from_column_slice(&coeffs));

    let mut residual = restricted.clone();
    for (k, &idx) in basis.node_indices().iter().enumerate() {
        residual.values_mut()[idx] -= proj_nodes[k];
    }

    let input_norm = lr_norm_on_ball(&restricted, ball, params.r)?;
    let residual_norm = lr_norm_on_ball(&residual, ball, params.r)?;
    if residual_norm <= ATOM_DEGENERACY_FLOOR * input_norm {
        return Err(Error::DegenerateInput(
            "degenerate: input is polynomial on ball".into(),
        ));
    }

    let measure = basis.measure();
    let chi = indicator_mixed_norm(ball, &params.p, &default_resolution(dim)?)?;
    let size_bound = measure.powf(1.0 / params.r) / chi;
    let factor = size_bound / residual_norm;
    for v in residual.values_mut() {
        *v *= factor;
    }

    let evidence = AtomEvidence {
        support_margin: off_ball_max(&residual, basis.node_indices()),
        size_ratio: lr_norm_on_ball(&residual, ball, params.r)? / size_bound,
        max_moment_residual: max_moment_residual(&residual, ball, params.s),
        residual_fraction: residual_norm / input_norm,
    };
    Ok(Atom {
        values: residual,
        ball: ball.clone(),
        params: params.clone(),
        evidence,
        seed: None,
    })
}

/// One re-measured atom condition: `measured <= bound` determines `pass`.
#[derive(Debug, Clone, Copy)]
pub struct ConditionCheck {
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl ConditionCheck {
    fn of(measured: f64, bound: f64) -> Self {
        Self { measured, bound, pass: measured <= bound }
    }
}

/// Independent verdicts on the three atom conditions.
#[derive(Debug, Clone, Copy)]
pub struct AtomValidation {
    pub support: ConditionCheck,
    pub size: ConditionCheck,
    pub moments: ConditionCheck,
}

impl AtomValidation {
    pub fn all_pass(&self) -> bool {
        self.support.pass && self.size.pass && self.moments.pass
    }
}

/// Re-measures the support, size, and moment conditions from the atom's
/// stored values, independently of how it was built.
///
/// Support demands exact zeros off the ball. The size check integrates over
/// the whole lattice (so leaked support would inflate it) and compares
/// against the discrete-measure bound with [`ATOM_SIZE_RATIO_TOL`] headroom.
/// Moments integrate raw monomials over the whole lattice and are compared
/// relative to `||a||_{L^1}` times each monomial's in-ball magnitude.
pub fn validate_atom(atom: &Atom) -> Result<AtomValidation> {
    let ball = &atom.ball;
    let lattice = atom.values.lattice();
    let inside = in_ball_indices(lattice, ball)?;

    let support_margin = off_ball_max(&atom.values, &inside);

    let r = atom.params.r;
    let w = lattice.cell_weight();
    let full_norm = if r.is_infinite() {
        atom.values.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        let sum: f64 = atom.values.values().iter().map(|v| v.abs().powf(r)).sum();
        (sum * w).powf(1.0 / r)
    };
    let measure = inside.len() as f64 * w;
    let chi = indicator_mixed_norm(ball, &atom.params.p, &default_resolution(ball.dim())?)?;
    let size_bound = measure.powf(1.0 / r) / chi;
    let size_ratio = if size_bound > 0.0 { full_norm / size_bound } else { f64::INFINITY };

    let moment_residual = max_moment_residual(&atom.values, ball, atom.params.s);

    Ok(AtomValidation {
        support: ConditionCheck::of(support_margin, 0.0),
        size: ConditionCheck::of(size_ratio, 1.0 + ATOM_SIZE_RATIO_TOL),
        moments: ConditionCheck::of(moment_residual, ATOM_MOMENT_TOL),
    })
}

/// Largest absolute value at nodes outside the listed in-ball set.
fn off_ball_max(f: &GridFunction, inside: &[usize]) -> f64 {
    let mut mask = vec![false; f.values().len()];
    for &i in inside {
        mask[i] = true;
    }
    f.values()
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| !m)
        .fold(0.0f64, |acc, (v, _)| acc.max(v.abs()))
}

/// Largest raw-monomial moment of `f` through degree `s`, relative to
/// ||f||_{L^1} times the monomial's largest in-ball node magnitude.
fn max_moment_residual(f: &GridFunction, ball: &AnisotropicBall, s: usize) -> f64 {
    let lattice = f.lattice();
    let w = lattice.cell_weight();
    let dim = lattice.dim();
    let l1: f64 = f.values().iter().map(|v| v.abs()).sum::<f64>() * w;
    if l1 == 0.0 {
        return 0.0;
    }
    let inside: Vec<bool> = {
        let mut mask = vec![false; f.values().len()];
        if let Ok(idx) = in_ball_indices(lattice, ball) {
            for i in idx {
                mask[i] = true;
            }
        }
        mask
    };
    let mut worst = 0.0f64;
    for alpha in multi_indices(dim, s) {
        let mut moment = 0.0;
        let mut scale = 0.0f64;
        for (flat, v) in f.values().iter().enumerate() {
            let x = lattice.node(flat);
            let mono: f64 = x
                .iter()
                .zip(&alpha)
                .map(|(&xi, &e)| xi.powi(e as i32))
                .product();
            moment += v * mono * w;
            if inside[flat] {
                scale = scale.max(mono.abs());
            }
        }
        if scale > 0.0 {
            worst = worst.max(moment.abs() / (l1 * scale));
        }
    }
    worst
}

/// A finite weighted family of atoms sharing anisotropy and outer exponents.
#[derive(Debug, Clone)]
pub struct AtomicCombination {
    atoms: Vec<Atom>,
    lambdas: Vec<f64>,
}

impl AtomicCombination {
    /// Weights are signed reals, one per atom; the lists must be nonempty
    /// and equal length, and all atoms must share anisotropy and exponents.
    pub fn new(atoms: Vec<Atom>, lambdas: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("combination needs at least one atom".into()));
        }
        if atoms.len() != lambdas.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} atoms vs {} weights",
                atoms.len(),
                lambdas.len()
            )));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        let a0 = atoms[0].ball().anisotropy().exponents().to_vec();
        let p0 = atoms[0].params().p().components().to_vec();
        for atom in &atoms[1..] {
            if atom.ball().anisotropy().exponents() != a0.as_slice()
                || atom.params().p().components() != p0.as_slice()
            {
                return Err(Error::InvalidInput(
                    "atoms in a combination must share anisotropy and exponents".into(),
                ));
            }
        }
        Ok(Self { atoms, lambdas })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

/// Aggregate quasi-norm of a weighted atom family:
///
/// ```text
/// || ( sum_i [ |lambda_i| chi_{B_i} / ||chi_{B_i}|| ]^{p_} )^{1/p_} ||_{L^p}
/// ```
///
/// with `p_ = min(min_i p_i, 1)`. Everything is evaluated on one lattice
/// over the union of the balls' bounding boxes, including each indicator
/// norm, so the comparison in [`l1_lower_bound_check`] is between
/// discretizations of identical support sets.
pub fn aggregate_norm(c: &AtomicCombination) -> Result<f64> {
    let p = c.atoms[0].params().p();
    let dim = p.dim();
    let p_under = p.p_underline();

    let (mut lo, mut hi) = c.atoms[0].ball().bounding_box();
    for atom in &c.atoms[1..] {
        let (blo, bhi) = atom.ball().bounding_box();
        for k in 0..dim {
            lo[k] = lo[k].min(blo[k]);
            hi[k] = hi[k].max(bhi[k]);
        }
    }
    let lattice = Lattice::from_box(&AxisBox::new(lo, hi)?, &default_resolution(dim)?)?;

    let mut field = vec![0.0f64; lattice.node_count()];
    for (atom, &lambda) in c.atoms.iter().zip(&c.lambdas) {
        let inside = in_ball_indices(&lattice, atom.ball())?;
        if inside.is_empty() {
            return Err(Error::InsufficientNodes(
                "a ball contains no nodes of the union lattice".into(),
            ));
        }
        let mut chi_values = vec![0.0f64; lattice.node_count()];
        for &i in &inside {
            chi_values[i] = 1.0;
        }
        let chi_norm = mixed_norm(&GridFunction::new(lattice.clone(), chi_values)?, p)?;
        let term = lambda.abs() / chi_norm;
        let term_pow = if p_under == 1.0 { term } else { term.powf(p_under) };
        for &i in &inside {
            field[i] += term_pow;
        }
    }
    if p_under != 1.0 {
        for v in &mut field {
            *v = v.powf(1.0 / p_under);
        }
    }
    mixed_norm(&GridFunction::new(lattice, field)?, p)
}

/// Verdict of one two-sided inequality check: passes when
/// `lhs <= rhs * slack + absolute`.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub absolute: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn of(lhs: f64, rhs: f64, slack: f64, absolute: f64) -> Self {
        Self { lhs, rhs, slack, absolute, pass: lhs <= rhs * slack + absolute }
    }

    /// Distance to failure; negative when the check failed.
    pub fn margin(&self) -> f64 {
        self.rhs * self.slack + self.absolute - self.lhs
    }
}

/// Tests the coefficient-sum lower bound: for exponents all at most 1,
/// `sum_i |lambda_i| <= aggregate_norm` up to twice the grid tolerance
/// (both sides are lattice discretizations, one per side of the bound).
pub fn l1_lower_bound_check(c: &AtomicCombination) -> Result<BoundCheck> {
    let p = c.atoms[0].params().p();
    if p.p_plus() > 1.0 {
        return Err(Error::InvalidInput(
            "coefficient-sum bound requires all exponents in (0, 1]".into(),
        ));
    }
    let lhs: f64 = c.lambdas.iter().map(|l| l.abs()).sum();
    let rhs = aggregate_norm(c)?;
    Ok(BoundCheck::of(lhs, rhs, 1.0 + 2.0 * GRID_TOLERANCE, 0.0))
}
