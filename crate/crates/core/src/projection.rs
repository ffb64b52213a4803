//! Polynomial spaces on balls and L^2 quadrature projection.
//!
//! Polynomials live in ball-adapted coordinates u_i = (y_i - c_i) / r^{a_i},
//! which map the ball B_a(c, r) onto the Euclidean unit ball. Conditioning of
//! the monomial Gram matrix is therefore independent of the ball's position
//! and size. A basis is orthonormalized against the discrete inner product
//!
//! ```text
//!     <f, g> = sum_{nodes inside B} f g * cell_weight,
//! ```
//!
//! by Cholesky factorization of the Gram matrix, with a floored symmetric
//! eigendecomposition as fallback. The projection of a grid function onto
//! the span is the usual coefficient sum Pi f = sum_alpha <f, q_alpha>
//! q_alpha; its residual f - Pi f has vanishing discrete moments against
//! every polynomial of the space.

use crate::anisotropy::AnisotropicBall;
use crate::error::{Error, Result};
use crate::grid::{in_ball_indices, GridFunction, Lattice};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Multiple of the space dimension required as an in-ball node count.
pub const MIN_NODE_FACTOR: usize = 3;
/// Eigenvalue floor for the Gram fallback, as a fraction of the trace.
pub const EIG_FLOOR_FACTOR: f64 = 1e-12;
/// Largest acceptable orthonormality defect of a built basis.
pub const GRAM_RESIDUAL_MAX: f64 = 1e-8;

/// Monomial exponent tuples of total degree <= max_degree in graded
/// lexicographic order (degree first, then lexicographic).
pub fn multi_indices(dim: usize, max_degree: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for degree in 0..=max_degree as u32 {
        let mut current = vec![0u32; dim];
        fill_degree(&mut out, &mut current, 0, degree);
    }
    out
}

fn fill_degree(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, axis: usize, remaining: u32) {
    if axis + 1 == current.len() {
        current[axis] = remaining;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[axis] = e;
        fill_degree(out, current, axis + 1, remaining - e);
    }
}

/// Dimension of the space of polynomials of total degree <= s in n variables.
pub fn poly_space_dim(n: usize, s: usize) -> usize {
    // C(n + s, s) computed without overflow for the small arguments used here.
    let mut num = 1usize;
    for k in 1..=s {
        num = num * (n + k) / k;
    }
    num
}

/// Polynomial in ball-adapted coordinates: sum_alpha c_alpha u^alpha with
/// u_i = (y_i - center_i) / scale_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    center: Vec<f64>,
    scale: Vec<f64>,
    exponents: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(
        center: Vec<f64>,
        scale: Vec<f64>,
        exponents: Vec<Vec<u32>>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        if center.len() != scale.len() {
            return Err(Error::DimensionMismatch(
                "polynomial center and scale dimensions differ".into(),
            ));
        }
        if exponents.len() != coefficients.len() {
            return Err(Error::DimensionMismatch(
                "exponent and coefficient counts differ".into(),
            ));
        }
        if scale.iter().any(|&s| !s.is_finite() || s <= 0.0) {
            return Err(Error::InvalidInput("polynomial scale must be positive".into()));
        }
        Ok(Self {
            center,
            scale,
            exponents,
            coefficients,
        })
    }

    /// The zero polynomial in the frame of a ball.
    pub fn zero(ball: &AnisotropicBall) -> Self {
        Self {
            center: ball.center().to_vec(),
            scale: ball.half_widths(),
            exponents: vec![vec![0; ball.dim()]],
            coefficients: vec![0.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Largest total degree carried by the representation.
    pub fn degree_bound(&self) -> usize {
        self.exponents
            .iter()
            .map(|alpha| alpha.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Adapted coordinates of a point.
    pub fn adapted(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(self.center.iter().zip(&self.scale))
            .map(|(&yi, (&ci, &si))| (yi - ci) / si)
            .collect()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let u = self.adapted(y);
        self.exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(alpha, &c)| {
                c * alpha
                    .iter()
                    .zip(&u)
                    .map(|(&e, &ui)| ui.powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Quadrature-orthonormal polynomial basis on the in-ball nodes of a lattice.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    ball: AnisotropicBall,
    lattice: Lattice,
    degree: usize,
    exponents: Vec<Vec<u32>>,
    /// Row i holds the adapted-monomial coefficients of basis element q_i.
    coeffs: DMatrix<f64>,
    node_indices: Vec<usize>,
    cell_weight: f64,
    /// Discrete ball measure: node count times cell weight.
    measure: f64,
    gram_residual: f64,
    /// True when built by Cholesky, which makes the basis graded-nested:
    /// the first poly_space_dim(n, d) elements span exactly degree <= d.
    nested: bool,
}

impl OrthonormalBasis {
    /// Build the basis for polynomials of total degree <= degree on the
    /// nodes of `lattice` inside `ball`.
    pub fn build(lattice: &Lattice, ball: &AnisotropicBall, degree: usize) -> Result<Self> {
        if ball.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ball has dimension {}, lattice has {}",
                ball.dim(),
                lattice.dim()
            )));
        }
        let exponents = multi_indices(lattice.dim(), degree);
        let dim_p = exponents.len();
        let node_indices = in_ball_indices(lattice, ball)?;
        if node_indices.len() < MIN_NODE_FACTOR * dim_p {
            return Err(Error::InsufficientNodes(format!(
                "{} nodes inside the ball, need at least {} for degree {degree}",
                node_indices.len(),
                MIN_NODE_FACTOR * dim_p
            )));
        }
        let cell_weight = lattice.cell_weight();
        let measure = node_indices.len() as f64 * cell_weight;
        // Monomial values at in-ball nodes, dim_p x nodes.
        let monomials = monomial_matrix(lattice, ball, &exponents, &node_indices);
        let gram = (&monomials * monomials.transpose()) * cell_weight;
        let (coeffs, nested) = match factor_gram(&gram) {
            Some(c) => (c, true),
            None => (eigen_fallback(&gram), false),
        };
        let reorth = &coeffs * &gram * coeffs.transpose();
        let mut gram_residual = 0.0_f64;
        for i in 0..dim_p {
            for j in 0..dim_p {
                let target = if i == j { 1.0 } else { 0.0 };
                gram_residual = gram_residual.max((reorth[(i, j)] - target).abs());
            }
        }
        if !gram_residual.is_finite() || gram_residual > GRAM_RESIDUAL_MAX {
            // The node count cleared the floor but the node placement
            // cannot tell the monomials apart (a ball thinner than one
            // lattice cell along an axis collapses that coordinate): the
            // continuum Gram matrix is positive definite, so this is a
            // resolution shortfall of the node set, not a solver failure.
            return Err(Error::InsufficientNodes(format!(
                "{} in-ball nodes cannot resolve a degree-{degree} basis \
                 (orthonormality defect {gram_residual:.3e}); a finer lattice is needed",
                node_indices.len()
            )));
        }
        Ok(Self {
            ball: ball.clone(),
            lattice: lattice.clone(),
            degree,
            exponents,
            coeffs,
            node_indices,
            cell_weight,
            measure,
            gram_residual,
            nested,
        })
    }

    pub fn ball(&self) -> &AnisotropicBall {
        &self.ball
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis elements.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn node_indices(&self) -> &[usize] {
        &self.node_indices
    }

    pub fn cell_weight(&self) -> f64 {
        self.cell_weight
    }

    /// Discrete measure of the ball on this lattice.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    /// Values of every basis element at the stored in-ball nodes,
    /// as a len() x node_count matrix.
    pub fn values_at_nodes(&self) -> DMatrix<f64> {
        let monomials = monomial_matrix(&self.lattice, &self.ball, &self.exponents, &self.node_indices);
        &self.coeffs * monomials
    }

    /// Values of every basis element at one point.
    pub fn values_at_point(&self, y: &[f64]) -> Vec<f64> {
        let u = adapted_coords(&self.ball, y);
        let m = DVector::from_iterator(
            self.exponents.len(),
            self.exponents.iter().map(|alpha| {
                alpha
                    .iter()
                    .zip(&u)
                    .map(|(&e, &ui)| ui.powi(e as i32))
                    .product::<f64>()
            }),
        );
        (&self.coeffs * m).iter().cloned().collect()
    }

    /// Values of `f` at the basis's in-ball nodes.
    ///
    /// Fast path: `f` shares the lattice anchor, so values transfer by
    /// index. Otherwise each node is read by nearest-cell lookup, which
    /// requires `f` to cover the ball.
    pub fn function_at_nodes(&self, f: &GridFunction) -> Result<Vec<f64>> {
        if f.lattice() == &self.lattice {
            return Ok(self.node_indices.iter().map(|&i| f.values()[i]).collect());
        }
        if f.lattice().same_anchor(&self.lattice) {
            let mut out = Vec::with_capacity(self.node_indices.len());
            for &i in &self.node_indices {
                let parent = f.lattice().index_of_sub_node(&self.lattice, i).ok_or_else(|| {
                    Error::DegenerateDomain("function does not cover the ball's nodes".into())
                })?;
                out.push(f.values()[parent]);
            }
            return Ok(out);
        }
        let mut out = Vec::with_capacity(self.node_indices.len());
        for &i in &self.node_indices {
            let point = self.lattice.node(i);
            let v = f.eval_nearest(&point).ok_or_else(|| {
                Error::DegenerateDomain("function does not cover the ball's nodes".into())
            })?;
            out.push(v);
        }
        Ok(out)
    }

    /// Basis coefficients <f, q_i> of the projection of `f`.
    pub fn project_coefficients(&self, f: &GridFunction) -> Result<Vec<f64>> {
        let fv = self.function_at_nodes(f)?;
        Ok(self.coefficients_of_values(&fv))
    }

    /// Basis coefficients of the projection of raw node values (aligned
    /// with `node_indices`).
    pub fn coefficients_of_values(&self, values_at_nodes: &[f64]) -> Vec<f64> {
        let q = self.values_at_nodes();
        let fv = DVector::from_column_slice(values_at_nodes);
        (q * fv * self.cell_weight).iter().cloned().collect()
    }

    /// Assemble a polynomial from basis coefficients.
    pub fn polynomial_from_coefficients(&self, basis_coeffs: &[f64]) -> Polynomial {
        let c = DVector::from_column_slice(basis_coeffs);
        let monomial_coeffs = self.coeffs.transpose() * c;
        Polynomial {
            center: self.ball.center().to_vec(),
            scale: self.ball.half_widths(),
            exponents: self.exponents.clone(),
            coefficients: monomial_coeffs.iter().cloned().collect(),
        }
    }

    /// L^2 quadrature projection of `f` onto the span.
    pub fn project(&self, f: &GridFunction) -> Result<Polynomial> {
        Ok(self.polynomial_from_coefficients(&self.project_coefficients(f)?))
    }
}

fn adapted_coords(ball: &AnisotropicBall, y: &[f64]) -> Vec<f64> {
    let hw = ball.half_widths();
    y.iter()
        .zip(ball.center().iter().zip(&hw))
        .map(|(&yi, (&ci, &si))| (yi - ci) / si)
        .collect()
}

fn monomial_matrix(
    lattice: &Lattice,
    ball: &AnisotropicBall,
    exponents: &[Vec<u32>],
    node_indices: &[usize],
) -> DMatrix<f64> {
    let dim_p = exponents.len();
    let degree = exponents
        .iter()
        .map(|a| a.iter().sum::<u32>())
        .max()
        .unwrap_or(0) as usize;
    let n = lattice.dim();
    let hw = ball.half_widths();
    let center = ball.center();
    let mut m = DMatrix::zeros(dim_p, node_indices.len());
    // Power table per node: powers[k][e] = u_k^e for e <= degree.
    let mut powers = vec![vec![1.0_f64; degree + 1]; n];
    for (col, &flat) in node_indices.iter().enumerate() {
        let idx = lattice.unflatten(flat);
        for k in 0..n {
            let u = (lattice.axis_coord(k, idx[k]) - center[k]) / hw[k];
            let row = &mut powers[k];
            row[0] = 1.0;
            for e in 1..=degree {
                row[e] = row[e - 1] * u;
            }
        }
        for (row, alpha) in exponents.iter().enumerate() {
            let mut v = 1.0;
            for k in 0..n {
                v *= powers[k][alpha[k] as usize];
            }
            m[(row, col)] = v;
        }
    }
    m
}

/// Cholesky route: returns C with C G C^T = I, rows spanning the graded
/// flag, or None when the factorization fails.
fn factor_gram(gram: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = nalgebra::Cholesky::new(gram.clone())?;
    let l = chol.l();
    let identity = DMatrix::identity(gram.nrows(), gram.ncols());
    l.solve_lower_triangular(&identity)
}

/// Fallback whitening by symmetric eigendecomposition with floored
/// eigenvalues. Not graded-nested.
fn eigen_fallback(gram: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new(gram.clone());
    let floor = EIG_FLOOR_FACTOR * gram.trace().max(f64::MIN_POSITIVE);
    let inv_sqrt = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| 1.0 / l.max(floor).sqrt()),
    );
    let mut c = eig.eigenvectors.transpose();
    for (i, row_scale) in inv_sqrt.iter().enumerate() {
        for j in 0..c.ncols() {
            c[(i, j)] *= row_scale;
        }
    }
    c
}

/// Ratio sup_{nodes in B} |Pi_B f| / ((1/m) sum_B |f| w), the quantity whose
/// boundedness makes projections stable on atoms. Uses the discrete ball
/// measure m throughout, so the ratio is exactly <= 1 for degree 0.
pub fn projection_bound_ratio(
    f: &GridFunction,
    ball: &AnisotropicBall,
    degree: usize,
) -> Result<f64> {
    let basis = OrthonormalBasis::build(f.lattice(), ball, degree)?;
    let fv = basis.function_at_nodes(f)?;
    let mean_abs: f64 =
        fv.iter().map(|v| v.abs()).sum::<f64>() * basis.cell_weight() / basis.measure();
    if mean_abs <= 0.0 {
        return Err(Error::DegenerateInput(
            "projection bound ratio needs a function with nonzero mean modulus on the ball".into(),
        ));
    }
    let coeffs = basis.coefficients_of_values(&fv);
    let q = basis.values_at_nodes();
    let c = DVector::from_column_slice(&coeffs);
    let projected = q.transpose() * c;
    let sup = projected.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok(sup / mean_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::AnisotropyVector;
    use crate::grid::{AxisBox, FunctionFamily};

    fn interval_lattice(lo: f64, hi: f64, res: usize) -> Lattice {
        Lattice::from_box(&AxisBox::new(vec![lo], vec![hi]).unwrap(), &[res]).unwrap()
    }

    fn unit_interval_ball() -> AnisotropicBall {
        let a = AnisotropyVector::new(vec![1.0]).unwrap();
        AnisotropicBall::new(a, vec![0.0], 1.0).unwrap()
    }

    #[test]
    fn multi_index_enumeration_is_graded_and_complete() {
        let idx = multi_indices(2, 2);
        assert_eq!(
            idx,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(multi_indices(3, 4).len(), poly_space_dim(3, 4));
        assert_eq!(poly_space_dim(3, 4), 35);
        assert_eq!(poly_space_dim(1, 3), 4);
    }

    #[test]
    fn constant_basis_element_matches_interval_normalization() {
        // On B = (-1, 1) with measure ~ 2 the normalized constant is 1/sqrt(2).
        let lat = interval_lattice(-1.0, 1.0, 1024);
        let basis = OrthonormalBasis::build(&lat, &unit_interval_ball(), 2).unwrap();
        assert!(basis.is_nested());
        let q0 = basis.values_at_point(&[0.3])[0];
        assert!(
            (q0 - 1.0 / 2.0_f64.sqrt()).abs() < 1e-8,
            "constant element value {q0}"
        );
        assert!(basis.gram_residual() < 1e-12);
    }

    #[test]
    fn projection_fixes_polynomials() {
        let bounds = AxisBox::new(vec![-1.5, -1.0], vec![1.5, 1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[96, 96]).unwrap();
        let family = FunctionFamily::RandomPolynomial { degree: 3, seed: 11 };
        let f = GridFunction::sample(&family, &lat).unwrap();
        let a = AnisotropyVector::new(vec![1.0, 1.5]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.2, -0.1], 0.8).unwrap();
        let basis = OrthonormalBasis::build(&lat, &ball, 3).unwrap();
        let proj = basis.project(&f).unwrap();
        let fv = basis.function_at_nodes(&f).unwrap();
        let scale = fv.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (&flat, &value) in basis.node_indices().iter().zip(&fv) {
            let point = lat.node(flat);
            assert!(
                (proj.eval(&point) - value).abs() <= 1e-8 * scale.max(1.0),
                "projection moved a degree-3 polynomial"
            );
        }
    }

    #[test]
    fn residual_moments_vanish() {
        let lat = interval_lattice(-2.0, 2.0, 512);
        let f = GridFunction::sample(
            &FunctionFamily::TrigMixture {
                terms: 4,
                max_frequency: 1.5,
                seed: 5,
            },
            &lat,
        )
        .unwrap();
        let a = AnisotropyVector::new(vec![1.3]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.4], 0.9).unwrap();
        let degree = 3;
        let basis = OrthonormalBasis::build(&lat, &ball, degree).unwrap();
        let fv = basis.function_at_nodes(&f).unwrap();
        let proj = basis.project(&f).unwrap();
        let scale = fv.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        // Residual against every adapted monomial of degree <= s.
        for alpha in multi_indices(1, degree) {
            let mut moment = 0.0;
            for (&flat, &value) in basis.node_indices().iter().zip(&fv) {
                let point = lat.node(flat);
                let u = proj.adapted(&point);
                let mon: f64 = alpha
                    .iter()
                    .zip(&u)
                    .map(|(&e, &ui)| ui.powi(e as i32))
                    .product();
                moment += (value - proj.eval(&point)) * mon;
            }
            moment *= basis.cell_weight();
            assert!(
                moment.abs() <= 1e-8 * scale.max(1.0),
                "moment {alpha:?} = {moment}"
            );
        }
    }

    #[test]
    fn projection_is_idempotent_and_self_adjoint() {
        let bounds = AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[80, 80]).unwrap();
        let f = GridFunction::sample(
            &FunctionFamily::TrigMixture {
                terms: 3,
                max_frequency: 1.0,
                seed: 21,
            },
            &lat,
        )
        .unwrap();
        let g = GridFunction::sample(
            &FunctionFamily::GaussianBump {
                center: vec![0.3, -0.2],
                sigma: 0.7,
            },
            &lat,
        )
        .unwrap();
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.0, 0.1], 0.7).unwrap();
        let basis = OrthonormalBasis::build(&lat, &ball, 2).unwrap();

        // Idempotence: projecting the projected values returns the
        // coefficients unchanged.
        let coeffs = basis.project_coefficients(&f).unwrap();
        let q = basis.values_at_nodes();
        let projected_values: Vec<f64> = (q.transpose()
            * DVector::from_column_slice(&coeffs))
        .iter()
        .cloned()
        .collect();
        let again = basis.coefficients_of_values(&projected_values);
        for (c1, c2) in coeffs.iter().zip(&again) {
            assert!((c1 - c2).abs() <= 1e-8 * c1.abs().max(1.0));
        }

        // Self-adjointness: <Pi f, g> = <f, Pi g> on the ball nodes.
        let fv = basis.function_at_nodes(&f).unwrap();
        let gv = basis.function_at_nodes(&g).unwrap();
        let cf = basis.coefficients_of_values(&fv);
        let cg = basis.coefficients_of_values(&gv);
        let pf: Vec<f64> = (q.transpose() * DVector::from_column_slice(&cf))
            .iter()
            .cloned()
            .collect();
        let pg: Vec<f64> = (q.transpose() * DVector::from_column_slice(&cg))
            .iter()
            .cloned()
            .collect();
        let w = basis.cell_weight();
        let lhs: f64 = pf.iter().zip(&gv).map(|(x, y)| x * y).sum::<f64>() * w;
        let rhs: f64 = fv.iter().zip(&pg).map(|(x, y)| x * y).sum::<f64>() * w;
        assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn degree_zero_ratio_is_at_most_one() {
        let lat = interval_lattice(-1.0, 1.0, 1024);
        for seed in 0..20 {
            let f = GridFunction::sample(
                &FunctionFamily::TrigMixture {
                    terms: 4,
                    max_frequency: 2.0,
                    seed,
                },
                &lat,
            )
            .unwrap();
            let ratio = projection_bound_ratio(&f, &unit_interval_ball(), 0).unwrap();
            assert!(ratio <= 1.0 + 1e-8, "seed {seed}: ratio {ratio}");
        }
    }

    #[test]
    fn covariance_under_dilation_and_translation() {
        // Projections computed in adapted coordinates commute with the
        // anisotropic scaling and with translation of the ball.
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let family = FunctionFamily::TrigMixture {
            terms: 3,
            max_frequency: 0.8,
            seed: 33,
        };
        let base_ball = AnisotropicBall::new(a.clone(), vec![0.0, 0.0], 1.0).unwrap();
        let scaled_ball = AnisotropicBall::new(a.clone(), vec![0.0, 0.0], 0.5).unwrap();
        let shifted_ball = AnisotropicBall::new(a.clone(), vec![0.7, -0.4], 1.0).unwrap();
        let res = [64, 64];

        let eval_proj = |ball: &AnisotropicBall, map: &dyn Fn(&[f64]) -> Vec<f64>| -> Vec<f64> {
            let (lo, hi) = ball.bounding_box();
            let lat = Lattice::from_box(&AxisBox::new(lo, hi).unwrap(), &res).unwrap();
            let mut values = Vec::with_capacity(lat.node_count());
            for flat in 0..lat.node_count() {
                let x = lat.node(flat);
                values.push(family.eval_at(&map(&x)).unwrap());
            }
            let f = GridFunction::new(lat.clone(), values).unwrap();
            let basis = OrthonormalBasis::build(&lat, ball, 2).unwrap();
            basis.project_coefficients(&f).unwrap()
        };

        // Dilation: pulling the function back through t^a and projecting on
        // the scaled ball gives the same adapted coefficients up to the
        // measure factor sqrt(|B_t| / |B_1|) = t^{nu/2}.
        let id = |x: &[f64]| x.to_vec();
        let c_base = eval_proj(&base_ball, &id);
        let pullback = |x: &[f64]| {
            a.dilate(2.0, x).unwrap() // map B(0, 1/2) points into B(0, 1)
        };
        let c_scaled = eval_proj(&scaled_ball, &pullback);
        let t: f64 = 0.5;
        let factor = t.powf(a.nu() / 2.0);
        for (cb, cs) in c_base.iter().zip(&c_scaled) {
            assert!(
                (cs - cb * factor).abs() <= 1e-8 * cb.abs().max(1.0),
                "dilation covariance: {cs} vs {}",
                cb * factor
            );
        }

        // Translation: projecting the shifted function on the shifted ball
        // reproduces the original coefficients.
        let shift = shifted_ball.center().to_vec();
        let unshift = move |x: &[f64]| -> Vec<f64> {
            x.iter().zip(&shift).map(|(xi, si)| xi - si).collect()
        };
        let c_shifted = eval_proj(&shifted_ball, &unshift);
        for (cb, cs) in c_base.iter().zip(&c_shifted) {
            assert!(
                (cs - cb).abs() <= 1e-8 * cb.abs().max(1.0),
                "translation covariance: {cs} vs {cb}"
            );
        }
    }

    #[test]
    fn too_few_nodes_is_an_error() {
        let lat = interval_lattice(-1.0, 1.0, 16);
        let a = AnisotropyVector::new(vec![1.0]).unwrap();
        let tiny = AnisotropicBall::new(a, vec![0.0], 0.05).unwrap();
        assert!(matches!(
            OrthonormalBasis::build(&lat, &tiny, 3),
            Err(Error::InsufficientNodes(_))
        ));
    }
}
