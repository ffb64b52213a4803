//! Sampled functions on midpoint lattices over axis-aligned boxes.
//!
//! A lattice is anchored: it stores a global origin, per-axis spacing, an
//! integer index offset, and a resolution. Node j along axis k sits at
//! `origin_k + (offset_k + j + 0.5) * spacing_k`. A cell-aligned sub-lattice
//! shares `origin` and `spacing` bitwise, so its nodes coincide exactly with
//! the parent's nodes; membership tests and quadrature weights therefore
//! never disagree between a grid and its restrictions.
//!
//! All quadrature is the midpoint rule with the constant cell weight
//! `prod_k spacing_k`. Supported dimensions are 1 to 3.

use crate::anisotropy::AnisotropicBall;
use crate::error::{Error, Result};
use crate::projection::multi_indices;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest per-axis resolution accepted when building a lattice.
pub const MAX_AXIS_RESOLUTION: usize = 1 << 20;
/// Largest total node count accepted when building a lattice.
pub const MAX_NODE_COUNT: usize = 1 << 26;

/// Default per-axis resolution for each supported dimension.
pub fn default_resolution(dim: usize) -> Result<Vec<usize>> {
    match dim {
        1 => Ok(vec![1024]),
        2 => Ok(vec![256, 256]),
        3 => Ok(vec![64, 64, 64]),
        _ => Err(Error::InvalidInput(format!(
            "grids support dimensions 1 to 3, got {dim}"
        ))),
    }
}

/// Axis-aligned box with positive width along every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!(
                "box corners have dimensions {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.is_empty() || lo.len() > 3 {
            return Err(Error::InvalidInput(format!(
                "boxes support dimensions 1 to 3, got {}",
                lo.len()
            )));
        }
        for k in 0..lo.len() {
            if !lo[k].is_finite() || !hi[k].is_finite() || lo[k] >= hi[k] {
                return Err(Error::DegenerateDomain(format!(
                    "box axis {k} has empty or infinite extent [{}, {}]",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    /// Closed-box point containment.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&xi, (&lo, &hi))| lo <= xi && xi <= hi)
    }

    /// True when `other` lies inside this box (closed inclusion).
    pub fn contains_box(&self, other: &AxisBox) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    /// Intersection with positive volume, or None when empty or degenerate.
    pub fn intersect(&self, other: &AxisBox) -> Option<AxisBox> {
        if other.dim() != self.dim() {
            return None;
        }
        let lo: Vec<f64> = (0..self.dim()).map(|k| self.lo[k].max(other.lo[k])).collect();
        let hi: Vec<f64> = (0..self.dim()).map(|k| self.hi[k].min(other.hi[k])).collect();
        if (0..self.dim()).all(|k| lo[k] < hi[k]) {
            Some(AxisBox { lo, hi })
        } else {
            None
        }
    }
}

/// Midpoint lattice over an axis-aligned box. See the module docs for the
/// anchored-node convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    offset: Vec<usize>,
    resolution: Vec<usize>,
}

impl Lattice {
    /// Fresh lattice covering `bounds` with the given per-axis resolution.
    pub fn from_box(bounds: &AxisBox, resolution: &[usize]) -> Result<Self> {
        if resolution.len() != bounds.dim() {
            return Err(Error::DimensionMismatch(format!(
                "resolution has {} axes, box has {}",
                resolution.len(),
                bounds.dim()
            )));
        }
        let mut total: usize = 1;
        for (k, &r) in resolution.iter().enumerate() {
            if r == 0 || r > MAX_AXIS_RESOLUTION {
                return Err(Error::InvalidInput(format!(
                    "resolution along axis {k} must be in 1..={MAX_AXIS_RESOLUTION}, got {r}"
                )));
            }
            total = total.checked_mul(r).ok_or_else(|| {
                Error::InvalidInput("total node count overflows".into())
            })?;
        }
        if total > MAX_NODE_COUNT {
            return Err(Error::InvalidInput(format!(
                "total node count {total} exceeds {MAX_NODE_COUNT}"
            )));
        }
        let spacing = (0..bounds.dim())
            .map(|k| bounds.width(k) / resolution[k] as f64)
            .collect();
        Ok(Self {
            origin: bounds.lo().to_vec(),
            spacing,
            offset: vec![0; bounds.dim()],
            resolution: resolution.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Total number of nodes.
    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Constant quadrature weight of one cell.
    pub fn cell_weight(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Covered box, recovered from the anchor data.
    pub fn bounds(&self) -> AxisBox {
        let lo: Vec<f64> = (0..self.dim())
            .map(|k| self.origin[k] + self.offset[k] as f64 * self.spacing[k])
            .collect();
        let hi: Vec<f64> = (0..self.dim())
            .map(|k| self.origin[k] + (self.offset[k] + self.resolution[k]) as f64 * self.spacing[k])
            .collect();
        AxisBox { lo, hi }
    }

    /// Coordinate of node index j along one axis.
    pub fn axis_coord(&self, axis: usize, j: usize) -> f64 {
        self.origin[axis] + ((self.offset[axis] + j) as f64 + 0.5) * self.spacing[axis]
    }

    /// All node coordinates along one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.resolution[axis]).map(|j| self.axis_coord(axis, j)).collect()
    }

    /// Multi-index of a flat node index (row-major, last axis fastest).
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        let mut rem = flat;
        for k in (0..self.dim()).rev() {
            idx[k] = rem % self.resolution[k];
            rem /= self.resolution[k];
        }
        idx
    }

    /// Flat node index of a multi-index (row-major, last axis fastest).
    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for k in 0..self.dim() {
            flat = flat * self.resolution[k] + idx[k];
        }
        flat
    }

    /// Coordinates of a flat node index.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .iter()
            .enumerate()
            .map(|(k, &j)| self.axis_coord(k, j))
            .collect()
    }

    /// Flat index of the cell containing `point`, or None outside the
    /// closed box. Points on the upper boundary map to the last cell.
    pub fn nearest_flat(&self, point: &[f64]) -> Option<usize> {
        if point.len() != self.dim() {
            return None;
        }
        let bounds = self.bounds();
        if !bounds.contains_point(point) {
            return None;
        }
        let mut idx = vec![0usize; self.dim()];
        for k in 0..self.dim() {
            let rel = (point[k] - bounds.lo[k]) / self.spacing[k];
            idx[k] = (rel.floor().max(0.0) as usize).min(self.resolution[k] - 1);
        }
        Some(self.flatten(&idx))
    }

    /// True when both lattices share the anchor grid (origin and spacing
    /// bitwise equal), so their nodes are drawn from the same global family.
    pub fn same_anchor(&self, other: &Lattice) -> bool {
        self.origin == other.origin && self.spacing == other.spacing
    }

    /// Cell-aligned sub-lattice covering `target` intersected with this
    /// lattice's box. Index ranges are rounded outward to whole cells.
    pub fn aligned_restriction(&self, target: &AxisBox) -> Result<Lattice> {
        if target.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "restriction target has dimension {}, lattice has {}",
                target.dim(),
                self.dim()
            )));
        }
        let bounds = self.bounds();
        let mut offset = vec![0usize; self.dim()];
        let mut resolution = vec![0usize; self.dim()];
        for k in 0..self.dim() {
            let lo_rel = (target.lo[k] - bounds.lo[k]) / self.spacing[k];
            let hi_rel = (target.hi[k] - bounds.lo[k]) / self.spacing[k];
            let i_lo = lo_rel.floor().max(0.0) as usize;
            let i_hi = (hi_rel.ceil().min(self.resolution[k] as f64) as usize).max(i_lo);
            if i_hi <= i_lo || i_lo >= self.resolution[k] {
                return Err(Error::DegenerateDomain(format!(
                    "restriction target does not overlap the grid along axis {k}"
                )));
            }
            offset[k] = self.offset[k] + i_lo;
            resolution[k] = i_hi - i_lo;
        }
        Ok(Lattice {
            origin: self.origin.clone(),
            spacing: self.spacing.clone(),
            offset,
            resolution,
        })
    }

    /// Flat index into this lattice of a node of `sub`, which must share the
    /// anchor and lie inside this lattice's index range.
    pub fn index_of_sub_node(&self, sub: &Lattice, sub_flat: usize) -> Option<usize> {
        if !self.same_anchor(sub) {
            return None;
        }
        let idx = sub.unflatten(sub_flat);
        let mut parent_idx = vec![0usize; self.dim()];
        for k in 0..self.dim() {
            let global = sub.offset[k] + idx[k];
            if global < self.offset[k] || global >= self.offset[k] + self.resolution[k] {
                return None;
            }
            parent_idx[k] = global - self.offset[k];
        }
        Some(self.flatten(&parent_idx))
    }
}

/// Flat indices of the lattice nodes strictly inside the ball.
pub fn in_ball_indices(lattice: &Lattice, ball: &AnisotropicBall) -> Result<Vec<usize>> {
    if ball.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch(format!(
            "ball has dimension {}, lattice has {}",
            ball.dim(),
            lattice.dim()
        )));
    }
    let n = lattice.dim();
    let r = ball.radius();
    let a = ball.anisotropy().exponents();
    let c = ball.center();
    // Per-axis contributions (x_k - c_k)^2 / r^{2 a_k}.
    let contrib: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let scale = r.powf(2.0 * a[k]);
            lattice
                .axis_coords(k)
                .iter()
                .map(|&x| {
                    let d = x - c[k];
                    (d * d) / scale
                })
                .collect()
        })
        .collect();
    let res = lattice.resolution();
    let mut out = Vec::new();
    match n {
        1 => {
            for (i0, &d0) in contrib[0].iter().enumerate() {
                if d0 < 1.0 {
                    out.push(i0);
                }
            }
        }
        2 => {
            for i0 in 0..res[0] {
                let d0 = contrib[0][i0];
                if d0 >= 1.0 {
                    continue;
                }
                let base = i0 * res[1];
                for (i1, &d1) in contrib[1].iter().enumerate() {
                    if d0 + d1 < 1.0 {
                        out.push(base + i1);
                    }
                }
            }
        }
        3 => {
            for i0 in 0..res[0] {
                let d0 = contrib[0][i0];
                if d0 >= 1.0 {
                    continue;
                }
                for i1 in 0..res[1] {
                    let d01 = d0 + contrib[1][i1];
                    if d01 >= 1.0 {
                        continue;
                    }
                    let base = (i0 * res[1] + i1) * res[2];
                    for (i2, &d2) in contrib[2].iter().enumerate() {
                        if d01 + d2 < 1.0 {
                            out.push(base + i2);
                        }
                    }
                }
            }
        }
        _ => unreachable!("lattice dimension is validated to 1..=3"),
    }
    Ok(out)
}

/// Deterministic families of sample functions.
///
/// Randomized kinds draw their shape parameters from a ChaCha stream seeded
/// by the stored seed, in a fixed order, before any node is evaluated; the
/// underlying function therefore does not depend on the lattice, and
/// sampling the same family on the same lattice is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FunctionFamily {
    /// exp(-|x - center|^2 / (2 sigma^2)); peak value 1 at the center.
    GaussianBump { center: Vec<f64>, sigma: f64 },
    /// Polynomial with coefficients drawn uniformly from [-1, 1] over all
    /// monomials of total degree <= degree, in graded lexicographic order.
    RandomPolynomial { degree: usize, seed: u64 },
    /// -1 where x_axis < threshold, +1 otherwise.
    SignStep { axis: usize, threshold: f64 },
    /// Sum of `terms` cosine waves: amp cos(2 pi omega . x + phase) with
    /// amp ~ U[-1, 1], omega_k ~ U[0, max_frequency], phase ~ U[0, 2 pi).
    TrigMixture {
        terms: usize,
        max_frequency: f64,
        seed: u64,
    },
}

enum FamilyEvaluator {
    Gaussian {
        center: Vec<f64>,
        inv_two_sigma_sq: f64,
    },
    Polynomial {
        exponents: Vec<Vec<u32>>,
        coefficients: Vec<f64>,
    },
    SignStep {
        axis: usize,
        threshold: f64,
    },
    Trig {
        amplitudes: Vec<f64>,
        frequencies: Vec<Vec<f64>>,
        phases: Vec<f64>,
    },
}

impl FamilyEvaluator {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            FamilyEvaluator::Gaussian {
                center,
                inv_two_sigma_sq,
            } => {
                let d2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(xi, ci)| (xi - ci) * (xi - ci))
                    .sum();
                (-d2 * inv_two_sigma_sq).exp()
            }
            FamilyEvaluator::Polynomial {
                exponents,
                coefficients,
            } => exponents
                .iter()
                .zip(coefficients)
                .map(|(alpha, &c)| {
                    c * alpha
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product::<f64>()
                })
                .sum(),
            FamilyEvaluator::SignStep { axis, threshold } => {
                if x[*axis] < *threshold {
                    -1.0
                } else {
                    1.0
                }
            }
            FamilyEvaluator::Trig {
                amplitudes,
                frequencies,
                phases,
            } => amplitudes
                .iter()
                .zip(frequencies.iter().zip(phases))
                .map(|(&amp, (omega, &phase))| {
                    let arg: f64 = omega.iter().zip(x).map(|(&w, &xi)| w * xi).sum();
                    amp * (2.0 * std::f64::consts::PI * arg + phase).cos()
                })
                .sum(),
        }
    }
}

impl FunctionFamily {
    fn evaluator(&self, dim: usize) -> Result<FamilyEvaluator> {
        match self {
            FunctionFamily::GaussianBump { center, sigma } => {
                if center.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "bump center has dimension {}, lattice has {dim}",
                        center.len()
                    )));
                }
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "bump width must be finite and > 0, got {sigma}"
                    )));
                }
                Ok(FamilyEvaluator::Gaussian {
                    center: center.clone(),
                    inv_two_sigma_sq: 1.0 / (2.0 * sigma * sigma),
                })
            }
            FunctionFamily::RandomPolynomial { degree, seed } => {
                if *degree > 12 {
                    return Err(Error::InvalidInput(format!(
                        "random polynomial degree must be <= 12, got {degree}"
                    )));
                }
                let exponents = multi_indices(dim, *degree);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let coefficients = (0..exponents.len())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                Ok(FamilyEvaluator::Polynomial {
                    exponents,
                    coefficients,
                })
            }
            FunctionFamily::SignStep { axis, threshold } => {
                if *axis >= dim {
                    return Err(Error::InvalidInput(format!(
                        "sign step axis {axis} out of range for dimension {dim}"
                    )));
                }
                if !threshold.is_finite() {
                    return Err(Error::InvalidInput("sign step threshold must be finite".into()));
                }
                Ok(FamilyEvaluator::SignStep {
                    axis: *axis,
                    threshold: *threshold,
                })
            }
            FunctionFamily::TrigMixture {
                terms,
                max_frequency,
                seed,
            } => {
                if *terms == 0 || *terms > 64 {
                    return Err(Error::InvalidInput(format!(
                        "trig mixture needs 1..=64 terms, got {terms}"
                    )));
                }
                if !max_frequency.is_finite() || *max_frequency <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "trig mixture max frequency must be finite and > 0, got {max_frequency}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut amplitudes = Vec::with_capacity(*terms);
                let mut frequencies = Vec::with_capacity(*terms);
                let mut phases = Vec::with_capacity(*terms);
                for _ in 0..*terms {
                    amplitudes.push(rng.random_range(-1.0..1.0));
                    frequencies.push(
                        (0..dim)
                            .map(|_| rng.random_range(0.0..*max_frequency))
                            .collect(),
                    );
                    phases.push(rng.random_range(0.0..2.0 * std::f64::consts::PI));
                }
                Ok(FamilyEvaluator::Trig {
                    amplitudes,
                    frequencies,
                    phases,
                })
            }
        }
    }

    /// Evaluate the family at a single point.
    pub fn eval_at(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluator(x.len())?.eval(x))
    }
}

/// Function sampled at the nodes of a midpoint lattice, stored row-major
/// with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    lattice: Lattice,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "value count {} does not match node count {}",
                values.len(),
                lattice.node_count()
            )));
        }
        Ok(Self { lattice, values })
    }

    /// Sample a family at every node of the lattice.
    pub fn sample(family: &FunctionFamily, lattice: &Lattice) -> Result<Self> {
        let evaluator = family.evaluator(lattice.dim())?;
        let mut values = Vec::with_capacity(lattice.node_count());
        let mut point = vec![0.0; lattice.dim()];
        let res = lattice.resolution().to_vec();
        let coords: Vec<Vec<f64>> = (0..lattice.dim()).map(|k| lattice.axis_coords(k)).collect();
        let mut idx = vec![0usize; lattice.dim()];
        for _ in 0..lattice.node_count() {
            for k in 0..lattice.dim() {
                point[k] = coords[k][idx[k]];
            }
            values.push(evaluator.eval(&point));
            // Odometer increment, last axis fastest.
            for k in (0..lattice.dim()).rev() {
                idx[k] += 1;
                if idx[k] < res[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Self {
            lattice: lattice.clone(),
            values,
        })
    }

    /// Constant function on a lattice.
    pub fn constant(lattice: &Lattice, value: f64) -> Self {
        Self {
            lattice: lattice.clone(),
            values: vec![value; lattice.node_count()],
        }
    }

    /// Indicator of a ball, sampled on a fresh lattice over the ball's
    /// bounding box at the given per-axis resolution.
    pub fn indicator(ball: &AnisotropicBall, resolution: &[usize]) -> Result<Self> {
        let (lo, hi) = ball.bounding_box();
        let bounds = AxisBox::new(lo, hi)?;
        let lattice = Lattice::from_box(&bounds, resolution)?;
        let inside = in_ball_indices(&lattice, ball)?;
        let mut values = vec![0.0; lattice.node_count()];
        for &i in &inside {
            values[i] = 1.0;
        }
        Ok(Self { lattice, values })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Midpoint-rule integral over the whole box.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.lattice.cell_weight()
    }

    /// Value of the cell containing `point`, or None outside the box.
    pub fn eval_nearest(&self, point: &[f64]) -> Option<f64> {
        self.lattice.nearest_flat(point).map(|i| self.values[i])
    }

    /// Resample onto another lattice by nearest-cell lookup. Every node of
    /// the target must lie inside this function's box. When the target is a
    /// sub-lattice sharing the anchor, values are copied by index and the
    /// result is exact.
    pub fn resample_onto(&self, target: &Lattice) -> Result<GridFunction> {
        let mut values = Vec::with_capacity(target.node_count());
        if self.lattice.same_anchor(target) {
            for flat in 0..target.node_count() {
                let parent = self.lattice.index_of_sub_node(target, flat).ok_or_else(|| {
                    Error::DegenerateDomain(
                        "target lattice extends beyond the sampled box".into(),
                    )
                })?;
                values.push(self.values[parent]);
            }
        } else {
            for flat in 0..target.node_count() {
                let point = target.node(flat);
                let v = self.eval_nearest(&point).ok_or_else(|| {
                    Error::DegenerateDomain(
                        "target lattice extends beyond the sampled box".into(),
                    )
                })?;
                values.push(v);
            }
        }
        GridFunction::new(target.clone(), values)
    }

    /// Multiply by the indicator of a ball and crop to the cell-aligned
    /// sub-lattice covering the ball's bounding box. Values outside the ball
    /// are exactly zero. Fails when the ball does not overlap the box.
    pub fn restrict_to_ball(&self, ball: &AnisotropicBall) -> Result<GridFunction> {
        let (lo, hi) = ball.bounding_box();
        let target = AxisBox::new(lo, hi)?;
        let sub = self.lattice.aligned_restriction(&target)?;
        let mut restricted = self.resample_onto(&sub)?;
        let inside = in_ball_indices(&sub, ball)?;
        let mut mask = vec![false; sub.node_count()];
        for &i in &inside {
            mask[i] = true;
        }
        for (v, keep) in restricted.values.iter_mut().zip(&mask) {
            if !keep {
                *v = 0.0;
            }
        }
        Ok(restricted)
    }

    /// Parse the exchange format: a header line
    /// `n,res_1,...,res_n,lo_1,hi_1,...,lo_n,hi_n` followed by the values in
    /// row-major order (last axis fastest), separated by commas or newlines.
    pub fn from_csv_str(text: &str) -> Result<GridFunction> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty grid file".into()))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Format(format!("cannot parse {what} from {s:?}")))
        };
        let n = parse(fields[0], "dimension")? as usize;
        if n == 0 || n > 3 {
            return Err(Error::Format(format!("dimension must be 1 to 3, got {n}")));
        }
        if fields.len() != 1 + n + 2 * n {
            return Err(Error::Format(format!(
                "header must have {} fields for dimension {n}, got {}",
                1 + 3 * n,
                fields.len()
            )));
        }
        let mut resolution = Vec::with_capacity(n);
        for k in 0..n {
            let r = parse(fields[1 + k], "resolution")?;
            if r < 1.0 || r.fract() != 0.0 {
                return Err(Error::Format(format!("resolution must be a positive integer, got {r}")));
            }
            resolution.push(r as usize);
        }
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for k in 0..n {
            lo.push(parse(fields[1 + n + 2 * k], "box corner")?);
            hi.push(parse(fields[1 + n + 2 * k + 1], "box corner")?);
        }
        let bounds = AxisBox::new(lo, hi).map_err(|e| Error::Format(e.to_string()))?;
        let lattice = Lattice::from_box(&bounds, &resolution).map_err(|e| Error::Format(e.to_string()))?;
        let mut values = Vec::with_capacity(lattice.node_count());
        for line in lines {
            for field in line.split(',') {
                let field = field.trim();
                if field.is_empty() {
                    continue;
                }
                values.push(parse(field, "value")?);
            }
        }
        if values.len() != lattice.node_count() {
            return Err(Error::Format(format!(
                "expected {} values, got {}",
                lattice.node_count(),
                values.len()
            )));
        }
        GridFunction::new(lattice, values)
    }

    /// Read the exchange format from a file.
    pub fn from_csv_path(path: &std::path::Path) -> Result<GridFunction> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    /// Serialize to the exchange format accepted by [`Self::from_csv_str`].
    pub fn to_csv_string(&self) -> String {
        let bounds = self.lattice.bounds();
        let n = self.lattice.dim();
        let mut header = vec![n.to_string()];
        header.extend(self.lattice.resolution().iter().map(|r| r.to_string()));
        for k in 0..n {
            header.push(format!("{:.17e}", bounds.lo()[k]));
            header.push(format!("{:.17e}", bounds.hi()[k]));
        }
        let mut out = header.join(",");
        out.push('\n');
        for chunk in self.values.chunks(8) {
            let row: Vec<String> = chunk.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::AnisotropyVector;

    fn unit_interval(res: usize) -> Lattice {
        let bounds = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
        Lattice::from_box(&bounds, &[res]).unwrap()
    }

    #[test]
    fn midpoint_quadrature_of_squares() {
        let lat = unit_interval(64);
        let values: Vec<f64> = lat.axis_coords(0).iter().map(|&x| x * x).collect();
        let f = GridFunction::new(lat, values).unwrap();
        let got = f.integrate();
        assert!((got - 1.0 / 3.0).abs() < 1e-4, "got {got}");
    }

    #[test]
    fn integrate_is_linear() {
        let lat = unit_interval(32);
        let f = GridFunction::sample(
            &FunctionFamily::TrigMixture {
                terms: 3,
                max_frequency: 2.0,
                seed: 7,
            },
            &lat,
        )
        .unwrap();
        let g = GridFunction::sample(
            &FunctionFamily::RandomPolynomial { degree: 3, seed: 9 },
            &lat,
        )
        .unwrap();
        let combo_values: Vec<f64> = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| 2.5 * a - 0.75 * b)
            .collect();
        let combo = GridFunction::new(lat, combo_values).unwrap();
        let lhs = combo.integrate();
        let rhs = 2.5 * f.integrate() - 0.75 * g.integrate();
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn sign_step_on_symmetric_interval() {
        let bounds = AxisBox::new(vec![-1.0], vec![1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[4]).unwrap();
        let f = GridFunction::sample(
            &FunctionFamily::SignStep {
                axis: 0,
                threshold: 0.0,
            },
            &lat,
        )
        .unwrap();
        assert_eq!(f.values(), &[-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn gaussian_bump_peaks_at_center() {
        let family = FunctionFamily::GaussianBump {
            center: vec![0.0, 0.0],
            sigma: 1.0,
        };
        assert_eq!(family.eval_at(&[0.0, 0.0]).unwrap(), 1.0);
        let off = family.eval_at(&[1.0, 0.0]).unwrap();
        assert!((off - (-0.5_f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let bounds = AxisBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[16, 16]).unwrap();
        let family = FunctionFamily::TrigMixture {
            terms: 5,
            max_frequency: 3.0,
            seed: 42,
        };
        let f1 = GridFunction::sample(&family, &lat).unwrap();
        let f2 = GridFunction::sample(&family, &lat).unwrap();
        assert_eq!(f1.values(), f2.values());
        let other = FunctionFamily::TrigMixture {
            terms: 5,
            max_frequency: 3.0,
            seed: 43,
        };
        let f3 = GridFunction::sample(&other, &lat).unwrap();
        assert_ne!(f1.values(), f3.values());
    }

    #[test]
    fn restriction_of_constant_is_ball_indicator() {
        let bounds = AxisBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[64, 64]).unwrap();
        let one = GridFunction::constant(&lat, 1.0);
        let a = AnisotropyVector::new(vec![1.0, 1.5]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.25, -0.5], 0.9).unwrap();
        let restricted = one.restrict_to_ball(&ball).unwrap();
        // Every node value is the membership indicator at that node.
        for flat in 0..restricted.lattice().node_count() {
            let x = restricted.lattice().node(flat);
            let expected = if ball.contains(&x).unwrap() { 1.0 } else { 0.0 };
            assert_eq!(restricted.values()[flat], expected);
        }
        // The restriction's nodes coincide bitwise with parent nodes.
        assert!(lat.same_anchor(restricted.lattice()));
    }

    #[test]
    fn restricted_volume_approximates_closed_form() {
        let bounds = AxisBox::new(vec![-2.0, -3.0], vec![2.0, 3.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[256, 256]).unwrap();
        let one = GridFunction::constant(&lat, 1.0);
        let a = AnisotropyVector::new(vec![1.0, 1.4]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.3, 0.2], 1.1).unwrap();
        let got = one.restrict_to_ball(&ball).unwrap().integrate();
        let want = ball.volume();
        assert!(
            (got - want).abs() <= 0.02 * want,
            "quadrature {got} vs closed form {want}"
        );
    }

    #[test]
    fn restriction_outside_box_fails() {
        let bounds = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[16]).unwrap();
        let one = GridFunction::constant(&lat, 1.0);
        let a = AnisotropyVector::new(vec![1.0]).unwrap();
        let far = AnisotropicBall::new(a.clone(), vec![5.0], 0.5).unwrap();
        assert!(matches!(
            one.restrict_to_ball(&far),
            Err(Error::DegenerateDomain(_))
        ));
        // Tangent ball: bounding box touches the domain only at a point.
        let tangent = AnisotropicBall::new(a, vec![1.5], 0.5).unwrap();
        assert!(one.restrict_to_ball(&tangent).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let bounds = AxisBox::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[8, 4]).unwrap();
        let f = GridFunction::sample(
            &FunctionFamily::RandomPolynomial { degree: 2, seed: 3 },
            &lat,
        )
        .unwrap();
        let text = f.to_csv_string();
        let g = GridFunction::from_csv_str(&text).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(f.lattice().resolution(), g.lattice().resolution());
    }

    #[test]
    fn csv_rejects_value_count_mismatch() {
        let text = "1,4,0.0,1.0\n0.1,0.2,0.3\n";
        assert!(matches!(
            GridFunction::from_csv_str(text),
            Err(Error::Format(_))
        ));
        let text = "1,4,0.0,1.0\n0.1,0.2,0.3,0.4,0.5\n";
        assert!(GridFunction::from_csv_str(text).is_err());
    }

    #[test]
    fn in_ball_indices_match_membership() {
        let bounds = AxisBox::new(vec![-1.0, -1.0, -1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[12, 12, 12]).unwrap();
        let a = AnisotropyVector::new(vec![1.0, 2.0, 1.5]).unwrap();
        let ball = AnisotropicBall::new(a, vec![0.1, 0.0, -0.2], 0.7).unwrap();
        let inside = in_ball_indices(&lat, &ball).unwrap();
        let flags: std::collections::HashSet<usize> = inside.into_iter().collect();
        for flat in 0..lat.node_count() {
            let x = lat.node(flat);
            assert_eq!(flags.contains(&flat), ball.contains(&x).unwrap());
        }
    }

    #[test]
    fn aligned_restriction_indexes_into_parent() {
        let bounds = AxisBox::new(vec![0.0, 0.0], vec![4.0, 2.0]).unwrap();
        let lat = Lattice::from_box(&bounds, &[16, 8]).unwrap();
        let target = AxisBox::new(vec![1.1, 0.4], vec![2.3, 1.2]).unwrap();
        let sub = lat.aligned_restriction(&target).unwrap();
        assert!(lat.same_anchor(&sub));
        let sub_bounds = sub.bounds();
        assert!(boundary_covers(&sub_bounds, &target));
        for flat in 0..sub.node_count() {
            let parent = lat.index_of_sub_node(&sub, flat).unwrap();
            assert_eq!(lat.node(parent), sub.node(flat));
        }
    }

    fn boundary_covers(outer: &AxisBox, inner: &AxisBox) -> bool {
        (0..outer.dim()).all(|k| outer.lo()[k] <= inner.lo()[k] && inner.hi()[k] <= outer.hi()[k])
    }
}
