//! Anisotropic scaling structure on R^n.
//!
//! An anisotropy is a vector a = (a_1, ..., a_n) with every a_i >= 1. It
//! induces the dilation t^a x = (t^{a_1} x_1, ..., t^{a_n} x_n) and the
//! homogeneous quasi-norm |x|_a, defined for x != 0 as the unique t > 0 with
//!
//! ```text
//!     sum_i x_i^2 / t^{2 a_i} = 1,
//! ```
//!
//! and |0|_a = 0. The quasi-norm satisfies |t^a x|_a = t |x|_a and collapses
//! to the Euclidean norm when a = (1, ..., 1). Balls of the quasi-norm are
//! ellipsoid-like sets whose volume scales like r^{nu} with the homogeneous
//! dimension nu = a_1 + ... + a_n.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative bracket width at which quasi-norm bisection stops.
pub const ROOT_REL_TOL: f64 = 1e-12;

/// Volume of the Euclidean unit ball in dimension n.
///
/// Computed by the recurrence v_n = v_{n-2} * 2 pi / n with v_0 = 1, v_1 = 2.
pub fn euclidean_unit_ball_volume(n: usize) -> f64 {
    let mut prev = 1.0; // v_0
    let mut cur = 2.0; // v_1
    match n {
        0 => prev,
        1 => cur,
        _ => {
            for k in 2..=n {
                let next = prev * 2.0 * std::f64::consts::PI / k as f64;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Anisotropy vector a with a_i >= 1 for every component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyVector {
    exponents: Vec<f64>,
}

impl AnisotropyVector {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidInput("anisotropy must be non-empty".into()));
        }
        for (i, &a) in exponents.iter().enumerate() {
            if !a.is_finite() || a < 1.0 {
                return Err(Error::InvalidInput(format!(
                    "anisotropy component {i} is {a}; every component must be finite and >= 1"
                )));
            }
        }
        Ok(Self { exponents })
    }

    /// The isotropic anisotropy (1, ..., 1) in dimension n.
    pub fn isotropic(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// Homogeneous dimension nu = sum_i a_i.
    pub fn nu(&self) -> f64 {
        self.exponents.iter().sum()
    }

    pub fn a_minus(&self) -> f64 {
        self.exponents.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn a_plus(&self) -> f64 {
        self.exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has dimension {}, anisotropy has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Value of the defining sum sum_i x_i^2 / t^{2 a_i} at scale t > 0.
    ///
    /// Strictly decreasing in t for x != 0; the quasi-norm is its unique
    /// root at level 1. Exposed because `deficit(x, r) < 1` is an exact
    /// membership test for the ball of radius r without any root solve.
    pub fn deficit(&self, x: &[f64], t: f64) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .map(|(&a, &xi)| (xi * xi) / t.powf(2.0 * a))
            .sum()
    }

    /// Anisotropic dilation t^a x = (t^{a_i} x_i). Requires t >= 0.
    pub fn dilate(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!(
                "dilation parameter must be finite and >= 0, got {t}"
            )));
        }
        Ok(self
            .exponents
            .iter()
            .zip(x)
            .map(|(&a, &xi)| t.powf(a) * xi)
            .collect())
    }

    /// Homogeneous quasi-norm |x|_a.
    ///
    /// Bracketing starts from the Euclidean norm and expands geometrically;
    /// bisection then narrows the bracket to relative width `ROOT_REL_TOL`.
    pub fn quasi_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        for (i, &xi) in x.iter().enumerate() {
            if !xi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "point component {i} is {xi}; components must be finite"
                )));
            }
        }
        let euclid = x.iter().map(|&v| v * v).sum::<f64>().sqrt();
        if euclid == 0.0 {
            return Ok(0.0);
        }
        solve_scale(&self.exponents, x, euclid)
    }

    /// Anisotropic bracket <x>_a = |(1, x)|_{(1, a)}; always >= 1.
    pub fn bracket(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut aug_a = Vec::with_capacity(self.dim() + 1);
        aug_a.push(1.0);
        aug_a.extend_from_slice(&self.exponents);
        let mut aug_x = Vec::with_capacity(self.dim() + 1);
        aug_x.push(1.0);
        aug_x.extend_from_slice(x);
        let euclid = aug_x.iter().map(|&v| v * v).sum::<f64>().sqrt();
        solve_scale(&aug_a, &aug_x, euclid)
    }
}

/// Solve sum_i x_i^2 / t^{2 a_i} = 1 for t, starting the bracket at `init`.
fn solve_scale(exponents: &[f64], x: &[f64], init: f64) -> Result<f64> {
    let deficit = |t: f64| -> f64 {
        exponents
            .iter()
            .zip(x)
            .map(|(&a, &xi)| (xi * xi) / t.powf(2.0 * a))
            .sum()
    };
    let (mut lo, mut hi);
    if deficit(init) >= 1.0 {
        // init is below the root; expand upward.
        lo = init;
        hi = init * 2.0;
        while deficit(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::InvalidInput(
                    "quasi-norm bracket expansion overflowed".into(),
                ));
            }
        }
    } else {
        hi = init;
        lo = init * 0.5;
        while deficit(lo) < 1.0 {
            hi = lo;
            lo *= 0.5;
            if lo == 0.0 {
                return Err(Error::InvalidInput(
                    "quasi-norm bracket collapse underflowed".into(),
                ));
            }
        }
    }
    // Invariant: deficit(lo) >= 1 >= deficit(hi).
    while hi - lo > ROOT_REL_TOL * lo {
        let mid = 0.5 * (lo + hi);
        if deficit(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ball of the anisotropic quasi-norm: {y : |y - center|_a < radius}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisotropicBall {
    anisotropy: AnisotropyVector,
    center: Vec<f64>,
    radius: f64,
}

impl AnisotropicBall {
    pub fn new(anisotropy: AnisotropyVector, center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != anisotropy.dim() {
            return Err(Error::DimensionMismatch(format!(
                "ball center has dimension {}, anisotropy has dimension {}",
                center.len(),
                anisotropy.dim()
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("ball center must be finite".into()));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "ball radius must be finite and > 0, got {radius}"
            )));
        }
        Ok(Self {
            anisotropy,
            center,
            radius,
        })
    }

    pub fn anisotropy(&self) -> &AnisotropyVector {
        &self.anisotropy
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Exact volume nu_n * radius^{nu}, with nu_n the Euclidean unit-ball
    /// volume and nu the homogeneous dimension.
    pub fn volume(&self) -> f64 {
        euclidean_unit_ball_volume(self.dim()) * self.radius.powf(self.anisotropy.nu())
    }

    /// Per-axis half-widths of the tight axis-aligned bounding box,
    /// radius^{a_i} along axis i.
    pub fn half_widths(&self) -> Vec<f64> {
        self.anisotropy
            .exponents()
            .iter()
            .map(|&a| self.radius.powf(a))
            .collect()
    }

    /// Tight axis-aligned bounding box as (lower, upper) corner vectors.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let hw = self.half_widths();
        let lo = self
            .center
            .iter()
            .zip(&hw)
            .map(|(c, h)| c - h)
            .collect();
        let hi = self
            .center
            .iter()
            .zip(&hw)
            .map(|(c, h)| c + h)
            .collect();
        (lo, hi)
    }

    /// Strict membership |y - center|_a < radius.
    ///
    /// Evaluated as sum_i (y_i - c_i)^2 / r^{2 a_i} < 1, which is exact:
    /// the defining sum is strictly decreasing in its scale argument, so the
    /// comparison against 1 at scale r decides the root's position without a
    /// root solve.
    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        self.anisotropy.check_dim(y)?;
        let offset: Vec<f64> = y.iter().zip(&self.center).map(|(yi, ci)| yi - ci).collect();
        Ok(self.anisotropy.deficit(&offset, self.radius) < 1.0)
    }
}

/// Integrability exponent vector with components in (0, infinity].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentVector {
    components: Vec<f64>,
}

impl ExponentVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("exponent vector must be non-empty".into()));
        }
        for (i, &p) in components.iter().enumerate() {
            if p.is_nan() || p <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "exponent component {i} is {p}; every component must lie in (0, inf]"
                )));
            }
        }
        Ok(Self { components })
    }

    /// The constant vector (p, ..., p) in dimension n.
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn p_minus(&self) -> f64 {
        self.components.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn p_plus(&self) -> f64 {
        self.components.iter().cloned().fold(0.0, f64::max)
    }

    /// min(p_minus, 1), the exponent that controls quasi-norm concavity.
    pub fn p_underline(&self) -> f64 {
        self.p_minus().min(1.0)
    }
}

/// Least admissible vanishing-moment degree:
/// max(0, floor((nu / a_minus) (1/p_minus - 1))).
pub fn s_min(a: &AnisotropyVector, p: &ExponentVector) -> Result<usize> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "anisotropy has dimension {}, exponent vector has dimension {}",
            a.dim(),
            p.dim()
        )));
    }
    let raw = (a.nu() / a.a_minus()) * (1.0 / p.p_minus() - 1.0);
    Ok(raw.floor().max(0.0) as usize)
}

/// Grand maximal function order
/// floor(nu (a_plus / a_minus) (1/p_underline + 1) + nu + 2 a_plus) + 1.
pub fn grand_maximal_order(a: &AnisotropyVector, p: &ExponentVector) -> Result<usize> {
    if a.dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "anisotropy has dimension {}, exponent vector has dimension {}",
            a.dim(),
            p.dim()
        )));
    }
    let nu = a.nu();
    let raw = nu * (a.a_plus() / a.a_minus()) * (1.0 / p.p_underline() + 1.0) + nu + 2.0 * a.a_plus();
    Ok(raw.floor() as usize + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
    }

    #[test]
    fn quasi_norm_solves_quartic_for_parabolic_scaling() {
        // a = (1, 2), x = (1, 1): 1/t^2 + 1/t^4 = 1, so t^2 = (1 + sqrt 5)/2.
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let expected = ((1.0 + 5.0_f64.sqrt()) / 2.0).sqrt();
        let got = a.quasi_norm(&[1.0, 1.0]).unwrap();
        assert!(rel_close(got, expected, 1e-11), "got {got}, want {expected}");
    }

    #[test]
    fn quasi_norm_single_axis_closed_form() {
        // Only x_2 nonzero: t = |x_2|^{1/a_2}.
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let got = a.quasi_norm(&[0.0, 4.0]).unwrap();
        assert!(rel_close(got, 2.0, 1e-11), "got {got}");
    }

    #[test]
    fn quasi_norm_zero_vector_is_zero() {
        let a = AnisotropyVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.quasi_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn quasi_norm_collapses_to_euclidean_when_isotropic() {
        let a = AnisotropyVector::isotropic(2).unwrap();
        let got = a.quasi_norm(&[3.0, 4.0]).unwrap();
        assert!(rel_close(got, 5.0, 1e-10), "got {got}");
    }

    #[test]
    fn bracket_of_sqrt3_in_one_dimension_is_two() {
        // 1/t^2 + 3/t^2 = 1 at t = 2.
        let a = AnisotropyVector::new(vec![1.0]).unwrap();
        let got = a.bracket(&[3.0_f64.sqrt()]).unwrap();
        assert!(rel_close(got, 2.0, 1e-11), "got {got}");
    }

    #[test]
    fn ball_volume_and_bounding_box() {
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.5, -1.0], 2.0).unwrap();
        // nu = 3, nu_2 = pi: volume = pi * 8.
        assert!(rel_close(ball.volume(), std::f64::consts::PI * 8.0, 1e-12));
        let (lo, hi) = ball.bounding_box();
        assert_eq!(lo, vec![0.5 - 2.0, -1.0 - 4.0]);
        assert_eq!(hi, vec![0.5 + 2.0, -1.0 + 4.0]);
    }

    #[test]
    fn ball_membership_is_strict() {
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.0, 0.0], 2.0).unwrap();
        assert!(ball.contains(&[0.0, 0.0]).unwrap());
        // Boundary point along axis 1: |y|_a = 2 exactly.
        assert!(!ball.contains(&[2.0, 0.0]).unwrap());
        assert!(ball.contains(&[1.999_999, 0.0]).unwrap());
    }

    #[test]
    fn s_min_matches_hand_computed_cases() {
        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        let p = ExponentVector::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(s_min(&a, &p).unwrap(), 3);

        let a = AnisotropyVector::isotropic(2).unwrap();
        let p = ExponentVector::new(vec![2.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(s_min(&a, &p).unwrap(), 1);

        // p >= 1 everywhere: no moments required.
        let p = ExponentVector::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(s_min(&a, &p).unwrap(), 0);
    }

    #[test]
    fn grand_maximal_order_matches_hand_computed_cases() {
        let a = AnisotropyVector::isotropic(2).unwrap();
        let p = ExponentVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(grand_maximal_order(&a, &p).unwrap(), 9);

        let a = AnisotropyVector::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(grand_maximal_order(&a, &p).unwrap(), 20);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(AnisotropyVector::new(vec![]).is_err());
        assert!(AnisotropyVector::new(vec![0.5]).is_err());
        assert!(AnisotropyVector::new(vec![f64::NAN]).is_err());
        assert!(ExponentVector::new(vec![0.0]).is_err());
        assert!(ExponentVector::new(vec![-1.0]).is_err());
        let a = AnisotropyVector::new(vec![1.0]).unwrap();
        assert!(AnisotropicBall::new(a.clone(), vec![0.0], 0.0).is_err());
        assert!(AnisotropicBall::new(a.clone(), vec![0.0, 1.0], 1.0).is_err());
        assert!(a.quasi_norm(&[1.0, 2.0]).is_err());
        assert!(a.dilate(-1.0, &[1.0]).is_err());
    }

    #[test]
    fn exponent_vector_summaries_handle_infinities() {
        let p = ExponentVector::new(vec![f64::INFINITY, 2.0]).unwrap();
        assert_eq!(p.p_minus(), 2.0);
        assert_eq!(p.p_plus(), f64::INFINITY);
        assert_eq!(p.p_underline(), 1.0);
        let p = ExponentVector::new(vec![f64::INFINITY, f64::INFINITY]).unwrap();
        assert_eq!(p.p_underline(), 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn homogeneity_under_dilation(
            n in 1usize..=3,
            seed_a in prop::collection::vec(1.0..3.0_f64, 3),
            seed_x in prop::collection::vec(-10.0..10.0_f64, 3),
            t in 0.05..20.0_f64,
        ) {
            let a = AnisotropyVector::new(seed_a[..n].to_vec()).unwrap();
            let x = &seed_x[..n];
            let base = a.quasi_norm(x).unwrap();
            let dilated = a.quasi_norm(&a.dilate(t, x).unwrap()).unwrap();
            prop_assert!((dilated - t * base).abs() <= 1e-9 * (t * base).abs().max(1e-12));
        }

        #[test]
        fn triangle_inequality(
            n in 1usize..=3,
            seed_a in prop::collection::vec(1.0..3.0_f64, 3),
            seed_x in prop::collection::vec(-10.0..10.0_f64, 3),
            seed_y in prop::collection::vec(-10.0..10.0_f64, 3),
        ) {
            let a = AnisotropyVector::new(seed_a[..n].to_vec()).unwrap();
            let x = &seed_x[..n];
            let y = &seed_y[..n];
            let sum: Vec<f64> = x.iter().zip(y).map(|(xi, yi)| xi + yi).collect();
            let lhs = a.quasi_norm(&sum).unwrap();
            let rhs = a.quasi_norm(x).unwrap() + a.quasi_norm(y).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
        }

        #[test]
        fn bracket_at_least_one(
            n in 1usize..=3,
            seed_a in prop::collection::vec(1.0..3.0_f64, 3),
            seed_x in prop::collection::vec(-10.0..10.0_f64, 3),
        ) {
            let a = AnisotropyVector::new(seed_a[..n].to_vec()).unwrap();
            let b = a.bracket(&seed_x[..n]).unwrap();
            prop_assert!(b >= 1.0 - 1e-12);
        }

        #[test]
        fn membership_matches_quasi_norm(
            seed_a in prop::collection::vec(1.0..3.0_f64, 2),
            seed_c in prop::collection::vec(-2.0..2.0_f64, 2),
            seed_y in prop::collection::vec(-4.0..4.0_f64, 2),
            r in 0.1..3.0_f64,
        ) {
            let a = AnisotropyVector::new(seed_a).unwrap();
            let ball = AnisotropicBall::new(a.clone(), seed_c.clone(), r).unwrap();
            let offset: Vec<f64> = seed_y.iter().zip(&seed_c).map(|(y, c)| y - c).collect();
            let norm = a.quasi_norm(&offset).unwrap();
            // Skip the measure-zero boundary where the root tolerance decides.
            prop_assume!((norm - r).abs() > 1e-9 * r);
            prop_assert_eq!(ball.contains(&seed_y).unwrap(), norm < r);
        }
    }

    #[test]
    fn unit_ball_volumes_match_closed_forms() {
        assert!(rel_close(euclidean_unit_ball_volume(1), 2.0, 1e-15));
        assert!(rel_close(euclidean_unit_ball_volume(2), std::f64::consts::PI, 1e-15));
        assert!(rel_close(
            euclidean_unit_ball_volume(3),
            4.0 * std::f64::consts::PI / 3.0,
            1e-15
        ));
    }
}
