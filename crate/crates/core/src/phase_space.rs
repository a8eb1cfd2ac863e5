// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Uniform grids over phase space M = R^{2N}, the canonical symplectic form,
//! finite differences, trapezoid quadrature and the Poisson bracket.
//!
//! Coordinates are ordered (q^1 … q^N, p^1 … p^N). Flat storage is row-major:
//! axis 0 varies slowest.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Fraction of each axis, centred, on which interior assertions are made.
pub const INTERIOR_FRACTION: f64 = 0.8;

/// Minimum number of samples per phase-space axis.
pub const MIN_AXIS_COUNT: usize = 8;

/// A uniformly sampled closed interval `[min, max]` with `count` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::InvalidGrid(format!("axis needs min < max, got [{min}, {max}]")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 nodes, got {count}")));
        }
        Ok(Self { min, max, count })
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn length(&self) -> f64 {
        self.max - self.min
    }

    /// Composite trapezoid weights (spacing included).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.count];
        w[0] *= 0.5;
        w[self.count - 1] *= 0.5;
        w
    }

    /// Inclusive index bounds of the centred sub-interval holding `fraction`
    /// of the axis length.
    pub fn interior_bounds(&self, fraction: f64) -> (usize, usize) {
        let n = (self.count - 1) as f64;
        let margin = 0.5 * (1.0 - fraction);
        let lo = (margin * n - 1e-9).ceil().max(0.0) as usize;
        let hi = ((1.0 - margin) * n + 1e-9).floor() as usize;
        (lo, hi.min(self.count - 1))
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-9 * self.spacing();
        x >= self.min - tol && x <= self.max + tol
    }
}

/// A point φ = (q^1 … q^N, p^1 … p^N) of phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    coords: Vec<f64>,
}

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "phase point needs an even, non-zero number of coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self { coords })
    }

    /// Degrees of freedom N.
    pub fn dof(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn q(&self) -> &[f64] {
        &self.coords[..self.dof()]
    }

    pub fn p(&self) -> &[f64] {
        &self.coords[self.dof()..]
    }
}

/// Tensor-product grid over the 2N phase-space axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || !axes.len().is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "phase space needs 2N axes with N >= 1, got {}",
                axes.len()
            )));
        }
        if let Some(a) = axes.iter().find(|a| a.count < MIN_AXIS_COUNT) {
            return Err(Error::InvalidGrid(format!(
                "each axis needs at least {MIN_AXIS_COUNT} nodes, got {}",
                a.count
            )));
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].count;
        }
        Ok(Self { axes, strides })
    }

    /// Grid with the same `[min, max]` and `count` on every one of the 2N axes.
    pub fn cube(dof: usize, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Axis::new(min, max, count)?;
        Self::new(vec![axis; 2 * dof])
    }

    /// N = 1 grid from separate q and p axes.
    pub fn plane(q: Axis, p: Axis) -> Result<Self> {
        Self::new(vec![q, p])
    }

    pub fn dof(&self) -> usize {
        self.axes.len() / 2
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index_along(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.axes[axis].count
    }

    #[inline]
    pub fn coord(&self, flat: usize, axis: usize) -> f64 {
        self.axes[axis].point(self.index_along(flat, axis))
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn point(&self, flat: usize) -> PhasePoint {
        PhasePoint {
            coords: (0..self.dims()).map(|k| self.coord(flat, k)).collect(),
        }
    }

    /// Whether `flat` lies in the centred `fraction` of every axis.
    pub fn is_interior(&self, flat: usize, fraction: f64) -> bool {
        self.axes.iter().enumerate().all(|(k, a)| {
            let (lo, hi) = a.interior_bounds(fraction);
            let i = self.index_along(flat, k);
            i >= lo && i <= hi
        })
    }

    /// Volume of the box covered by the grid.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }
}

/// The canonical symplectic matrix ω^{ab} = [[0, I_N], [−I_N, 0]].
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    dof: usize,
    matrix: Vec<f64>,
}

impl SymplecticForm {
    pub fn canonical(dof: usize) -> Self {
        let n = 2 * dof;
        let mut matrix = vec![0.0; n * n];
        for i in 0..dof {
            matrix[i * n + (dof + i)] = 1.0;
            matrix[(dof + i) * n + i] = -1.0;
        }
        Self { dof, matrix }
    }

    pub fn dim(&self) -> usize {
        2 * self.dof
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix[a * self.dim() + b]
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| (0..n).all(|b| self.get(a, b) == -self.get(b, a)))
    }

    /// ω·ω = −I.
    pub fn squares_to_minus_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let s: f64 = (0..n).map(|c| self.get(a, c) * self.get(c, b)).sum();
                s == if a == b { -1.0 } else { 0.0 }
            })
        })
    }

    /// Non-zero entries as `(a, b, ω^{ab})`.
    pub fn nonzero(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let w = self.get(a, b);
                if w != 0.0 {
                    out.push((a, b, w));
                }
            }
        }
        out
    }
}

/// A complex function sampled on a phase-space [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFunction {
    grid: Grid,
    values: Vec<Complex64>,
    label: String,
}

impl PhaseFunction {
    pub fn from_values(grid: Grid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{label}: {} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(label));
        }
        Ok(Self { grid, values, label })
    }

    pub fn from_fn<F>(grid: &Grid, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&PhasePoint) -> Complex64,
    {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::from_values(grid.clone(), values, label)
    }

    pub fn from_real_fn<F>(grid: &Grid, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(&PhasePoint) -> f64,
    {
        Self::from_fn(grid, label, |x| Complex64::new(f(x), 0.0))
    }

    pub fn zeros(grid: &Grid, label: impl Into<String>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            label: label.into(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn value_at(&self, idx: &[usize]) -> Complex64 {
        self.values[self.grid.flat_index(idx)]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            label: self.label.clone(),
        }
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            label: self.label.clone(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "'{}' and '{}' live on different grids",
                self.label, other.label
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Max modulus over the centred `fraction` of every axis.
    pub fn max_abs_interior(&self, fraction: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_interior(*i, fraction))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Minimum of the real part.
    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Trapezoidal quadrature ∫ f dφ^{2N} over all axes of the grid.
pub fn integrate(f: &PhaseFunction) -> Result<Complex64> {
    if f.values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(f.label.clone()));
    }
    let grid = &f.grid;
    let weights: Vec<Vec<f64>> = grid.axes().iter().map(Axis::trapezoid_weights).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for (flat, v) in f.values.iter().enumerate() {
        let w: f64 = (0..grid.dims())
            .map(|k| weights[k][grid.index_along(flat, k)])
            .product();
        sum += v * w;
    }
    Ok(sum)
}

/// Finite-difference weights for derivatives `0..=max_order` at `z` from
/// nodes `xs` (Fornberg's recursion). Row `k` holds the weights of the k-th
/// derivative.
pub fn fd_weights(z: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// One stencil per node of an axis: `(first node, weights)`.
#[derive(Debug, Clone)]
struct Stencil {
    start: usize,
    weights: Vec<f64>,
}

/// Fourth-order accurate stencils for the `order`-th derivative: central in
/// the interior, shifted one-sided windows of `order + 4` nodes near the ends.
fn stencils(axis: &Axis, order: usize) -> Vec<Stencil> {
    let n = axis.count;
    let h = axis.spacing();
    let half = if order <= 2 { 2 } else { 3 };
    let width = order + 4;
    let scale = h.powi(order as i32);
    (0..n)
        .map(|i| {
            let (start, len) = if i >= half && i + half < n {
                (i - half, 2 * half + 1)
            } else {
                let w = width.min(n);
                let s = i.saturating_sub(w / 2).min(n - w);
                (s, w)
            };
            let offsets: Vec<f64> = (start..start + len).map(|j| j as f64 - i as f64).collect();
            let weights = fd_weights(0.0, &offsets, order)[order]
                .iter()
                .map(|w| w / scale)
                .collect();
            Stencil { start, weights }
        })
        .collect()
}

/// ∂^order f / ∂(φ^axis)^order by fourth-order finite differences.
pub fn partial_derivative(f: &PhaseFunction, axis: usize, order: usize) -> Result<PhaseFunction> {
    let grid = &f.grid;
    if axis >= grid.dims() {
        return Err(Error::AxisOutOfRange { axis, dims: grid.dims() });
    }
    if !(1..=4).contains(&order) {
        return Err(Error::OrderOutOfRange(order));
    }
    let stencils = stencils(grid.axis(axis), order);
    let stride = grid.stride(axis);
    let values = (0..grid.len())
        .map(|flat| {
            let i = grid.index_along(flat, axis);
            let base = flat - i * stride;
            let st = &stencils[i];
            st.weights
                .iter()
                .enumerate()
                .map(|(j, w)| f.values[base + (st.start + j) * stride] * *w)
                .sum()
        })
        .collect();
    Ok(PhaseFunction {
        grid: grid.clone(),
        values,
        label: format!("d{order}/dphi{axis} {}", f.label),
    })
}

/// Mixed derivative with per-axis orders `orders[k]` (any non-negative
/// order; orders above 4 are composed from lower ones).
pub fn derivative(f: &PhaseFunction, orders: &[usize]) -> Result<PhaseFunction> {
    if orders.len() != f.grid.dims() {
        return Err(Error::AxisOutOfRange { axis: orders.len(), dims: f.grid.dims() });
    }
    let mut out = f.clone();
    for (axis, &order) in orders.iter().enumerate() {
        let mut left = order;
        while left > 0 {
            let step = left.min(4);
            out = partial_derivative(&out, axis, step)?;
            left -= step;
        }
    }
    Ok(out)
}

/// {f, g}_pb = ∂_a f ω^{ab} ∂_b g.
pub fn poisson_bracket(f: &PhaseFunction, g: &PhaseFunction) -> Result<PhaseFunction> {
    f.check_same_grid(g)?;
    let n = f.grid.dof();
    let mut values = vec![Complex64::new(0.0, 0.0); f.grid.len()];
    for i in 0..n {
        let fq = partial_derivative(f, i, 1)?;
        let fp = partial_derivative(f, n + i, 1)?;
        let gq = partial_derivative(g, i, 1)?;
        let gp = partial_derivative(g, n + i, 1)?;
        for (k, v) in values.iter_mut().enumerate() {
            *v += fq.values[k] * gp.values[k] - fp.values[k] * gq.values[k];
        }
    }
    Ok(PhaseFunction {
        grid: f.grid.clone(),
        values,
        label: format!("{{{}, {}}}_pb", f.label, g.label),
    })
}
