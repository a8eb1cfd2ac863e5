// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! The energy representation |ω, p⟩ of a CSCO {Ĥ, P̂_1 … P̂_{N−1}}.
//!
//! An [`Observable`] is the pair of kernels O(ω, p) (singular, diagonal in
//! energy) and O(ω, ω′, p, p′) (regular). The continuous spectrum is
//! truncated to `[0, ω_max]` and sampled uniformly; Dirac deltas become
//! Kronecker indicators divided by the cell size, and all spectral integrals
//! are cell sums Σ (·) Δω Δp, which keeps the discrete duality exact.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{self, Axis, Grid, PhaseFunction, INTERIOR_FRACTION};
use crate::weyl::{OperatorKernel, WaveFunction};

pub const MIN_SPECTRAL_COUNT: usize = 16;

/// Tolerance for self-adjointness and commutation checks.
pub const KERNEL_TOLERANCE: f64 = 1e-12;

/// Truncated spectral grid: ω ∈ [0, ω_max] and N − 1 momentum axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    axes: Vec<Axis>,
    strides: Vec<usize>,
}

/// One node (ω, p) of a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub omega: f64,
    pub p: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(omega_max: f64, omega_count: usize, p_axes: Vec<Axis>) -> Result<Self> {
        let omega = Axis::new(0.0, omega_max, omega_count)?;
        let mut axes = vec![omega];
        axes.extend(p_axes);
        if let Some(a) = axes.iter().find(|a| a.count < MIN_SPECTRAL_COUNT) {
            return Err(Error::InvalidGrid(format!(
                "spectral axes need at least {MIN_SPECTRAL_COUNT} nodes, got {}",
                a.count
            )));
        }
        let mut strides = vec![1; axes.len()];
        for k in (0..axes.len() - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].count;
        }
        Ok(Self { axes, strides })
    }

    /// N = 1: energy only.
    pub fn energy(omega_max: f64, omega_count: usize) -> Result<Self> {
        Self::new(omega_max, omega_count, Vec::new())
    }

    pub fn omega_axis(&self) -> &Axis {
        &self.axes[0]
    }

    pub fn p_axes(&self) -> &[Axis] {
        &self.axes[1..]
    }

    /// Number of spectral labels (1 + number of momentum axes).
    pub fn labels(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Δω Δp^{N−1}.
    pub fn cell(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    #[inline]
    pub fn index_along(&self, m: usize, k: usize) -> usize {
        (m / self.strides[k]) % self.axes[k].count
    }

    #[inline]
    pub fn omega(&self, m: usize) -> f64 {
        self.axes[0].point(self.index_along(m, 0))
    }

    pub fn point(&self, m: usize) -> SpectralPoint {
        SpectralPoint {
            omega: self.omega(m),
            p: (1..self.axes.len()).map(|k| self.axes[k].point(self.index_along(m, k))).collect(),
        }
    }

    pub fn points(&self) -> Vec<SpectralPoint> {
        (0..self.len()).map(|m| self.point(m)).collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    fn check_range(&self, coords: &[f64]) -> Result<()> {
        for (k, (a, &x)) in self.axes.iter().zip(coords).enumerate() {
            if !a.contains(x) {
                return Err(Error::OutOfRange {
                    what: if k == 0 { "H(φ)".into() } else { format!("P_{k}(φ)") },
                    value: x,
                    min: a.min,
                    max: a.max,
                });
            }
        }
        Ok(())
    }

    /// Multilinear interpolation stencil `(flat index, weight)` at `coords`.
    pub fn interpolation_stencil(&self, coords: &[f64]) -> Result<Vec<(usize, f64)>> {
        self.check_range(coords)?;
        let mut stencil = vec![(0usize, 1.0f64)];
        for (k, (a, &x)) in self.axes.iter().zip(coords).enumerate() {
            let t = ((x - a.min) / a.spacing()).clamp(0.0, (a.count - 1) as f64);
            let i0 = (t.floor() as usize).min(a.count - 2);
            let frac = t - i0 as f64;
            let mut next = Vec::with_capacity(stencil.len() * 2);
            for &(m, w) in &stencil {
                next.push((m + i0 * self.strides[k], w * (1.0 - frac)));
                next.push((m + (i0 + 1) * self.strides[k], w * frac));
            }
            stencil = next;
        }
        Ok(stencil)
    }

    /// Node nearest to `coords` (level-set binning).
    pub fn nearest(&self, coords: &[f64]) -> Result<usize> {
        self.check_range(coords)?;
        Ok(self
            .axes
            .iter()
            .zip(coords)
            .enumerate()
            .map(|(k, (a, &x))| {
                let i = ((x - a.min) / a.spacing()).round().clamp(0.0, (a.count - 1) as f64) as usize;
                i * self.strides[k]
            })
            .sum())
    }
}

/// Singular ⊕ regular observable on a [`SpectralGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    grid: SpectralGrid,
    singular: Vec<Complex64>,
    regular: Array2<Complex64>,
}

/// Outcome of the [Ĥ, Ô] = 0 test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    pub commutes: bool,
    /// max |(ω − ω′) O(ω, ω′, p, p′)|.
    pub weighted_max: f64,
    /// max |O(ω, ω′, p, p′)|.
    pub regular_max: f64,
    /// Regular part is non-zero but lives only on ω = ω′.
    pub degenerate_diagonal: bool,
}

fn check_finite(values: impl IntoIterator<Item = Complex64>, what: &str) -> Result<()> {
    if values.into_iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite(what.to_string()));
    }
    Ok(())
}

/// max |R(a, b) − conj(R(b, a))|.
pub fn hermiticity_defect(regular: &Array2<Complex64>) -> f64 {
    let n = regular.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            worst = worst.max((regular[[a, b]] - regular[[b, a]].conj()).norm());
        }
    }
    worst
}

pub(crate) fn sample_regular<F>(grid: &SpectralGrid, f: F) -> Array2<Complex64>
where
    F: Fn(&SpectralPoint, &SpectralPoint) -> Complex64,
{
    let pts = grid.points();
    Array2::from_shape_fn((pts.len(), pts.len()), |(a, b)| f(&pts[a], &pts[b]))
}

impl Observable {
    pub fn from_parts(grid: SpectralGrid, singular: Vec<Complex64>, regular: Array2<Complex64>) -> Result<Self> {
        let m = grid.len();
        if singular.len() != m || regular.dim() != (m, m) {
            return Err(Error::GridMismatch(format!(
                "observable kernels do not match a spectral grid of {m} nodes"
            )));
        }
        check_finite(singular.iter().copied(), "singular kernel")?;
        check_finite(regular.iter().copied(), "regular kernel")?;
        Ok(Self { grid, singular, regular })
    }

    /// Sample O(ω, p) and O(ω, ω′, p, p′) on `grid`.
    pub fn from_fns<S, R>(grid: &SpectralGrid, singular_fn: S, regular_fn: R) -> Result<Self>
    where
        S: Fn(&SpectralPoint) -> Complex64,
        R: Fn(&SpectralPoint, &SpectralPoint) -> Complex64,
    {
        let singular = grid.points().iter().map(singular_fn).collect();
        Self::from_parts(grid.clone(), singular, sample_regular(grid, regular_fn))
    }

    /// Purely singular observable O(Ĥ, P̂).
    pub fn singular_only<S>(grid: &SpectralGrid, singular_fn: S) -> Result<Self>
    where
        S: Fn(&SpectralPoint) -> Complex64,
    {
        let singular = grid.points().iter().map(singular_fn).collect();
        Self::from_parts(grid.clone(), singular, Array2::zeros((grid.len(), grid.len())))
    }

    pub fn identity(grid: &SpectralGrid) -> Self {
        Self::singular_only(grid, |_| Complex64::new(1.0, 0.0)).expect("finite")
    }

    /// Ĥ = ∫ ω |ω, p⟩⟨ω, p|.
    pub fn hamiltonian(grid: &SpectralGrid) -> Self {
        Self::singular_only(grid, |x| Complex64::new(x.omega, 0.0)).expect("finite")
    }

    /// Discrete basis operator |ω_m, p_m) = |ω_m, p_m⟩⟨ω_m, p_m|, i.e. a
    /// singular kernel δ(ω − ω_m)δ(p − p_m) realised as an indicator / cell.
    pub fn singular_basis(grid: &SpectralGrid, m: usize) -> Self {
        let mut singular = vec![Complex64::new(0.0, 0.0); grid.len()];
        singular[m] = Complex64::new(1.0 / grid.cell(), 0.0);
        Self::from_parts(grid.clone(), singular, Array2::zeros((grid.len(), grid.len()))).expect("finite")
    }

    /// Discrete basis operator |ω_a, ω_b, p_a, p_b) = |ω_a, p_a⟩⟨ω_b, p_b|.
    pub fn regular_basis(grid: &SpectralGrid, a: usize, b: usize) -> Self {
        let mut regular = Array2::zeros((grid.len(), grid.len()));
        regular[[a, b]] = Complex64::new(1.0 / (grid.cell() * grid.cell()), 0.0);
        Self::from_parts(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.len()], regular)
            .expect("finite")
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn singular(&self) -> &[Complex64] {
        &self.singular
    }

    pub fn regular(&self) -> &Array2<Complex64> {
        &self.regular
    }

    /// Conjugate singular part, conjugate-transposed regular part.
    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            singular: self.singular.iter().map(|v| v.conj()).collect(),
            regular: self.regular.t().mapv(|v| v.conj()),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.singular.iter().all(|v| v.im.abs() <= KERNEL_TOLERANCE)
            && hermiticity_defect(&self.regular) <= KERNEL_TOLERANCE
    }

    pub fn commutation_report(&self) -> CommutationReport {
        let m = self.grid.len();
        let mut weighted_max: f64 = 0.0;
        let mut regular_max: f64 = 0.0;
        for a in 0..m {
            let wa = self.grid.omega(a);
            for b in 0..m {
                let v = self.regular[[a, b]].norm();
                regular_max = regular_max.max(v);
                weighted_max = weighted_max.max((wa - self.grid.omega(b)).abs() * v);
            }
        }
        let commutes = weighted_max < KERNEL_TOLERANCE;
        CommutationReport {
            commutes,
            weighted_max,
            regular_max,
            degenerate_diagonal: commutes && regular_max >= KERNEL_TOLERANCE,
        }
    }

    /// [Ĥ, Ô] = 0, tested as max|(ω − ω′) O_regular| < tolerance.
    pub fn commutator_with_h_vanishes(&self) -> bool {
        self.commutation_report().commutes
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("observables on different spectral grids".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            singular: self.singular.iter().zip(&other.singular).map(|(a, b)| a + b).collect(),
            regular: &self.regular + &other.regular,
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            singular: self.singular.iter().map(|v| v * c).collect(),
            regular: self.regular.mapv(|v| v * c),
        }
    }
}

/// One label function P_k(φ) for [`MomentumMap::from_fns`].
pub type LabelFn = Box<dyn Fn(&phase_space::PhasePoint) -> f64>;

/// The classical functions H(φ), P_1(φ) … P_{N−1}(φ) on one phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMap {
    h: PhaseFunction,
    p: Vec<PhaseFunction>,
}

impl MomentumMap {
    pub fn new(h: PhaseFunction, p: Vec<PhaseFunction>) -> Result<Self> {
        if p.len() + 1 != h.grid().dof() {
            return Err(Error::GridMismatch(format!(
                "{} momenta for N = {}; expected N − 1",
                p.len(),
                h.grid().dof()
            )));
        }
        for f in &p {
            h.check_same_grid(f)?;
        }
        Ok(Self { h, p })
    }

    pub fn from_fns<H>(grid: &Grid, h: H, p: Vec<LabelFn>) -> Result<Self>
    where
        H: Fn(&phase_space::PhasePoint) -> f64,
    {
        let hf = PhaseFunction::from_real_fn(grid, "H", h)?;
        let pf = p
            .iter()
            .enumerate()
            .map(|(i, f)| PhaseFunction::from_real_fn(grid, format!("P{}", i + 1), f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(hf, pf)
    }

    /// H = (q² + p²)/2 on an N = 1 grid.
    pub fn oscillator(grid: &Grid) -> Result<Self> {
        if grid.dof() != 1 {
            return Err(Error::Unsupported("oscillator momentum map is N = 1".into()));
        }
        Self::from_fns(grid, |x| 0.5 * (x.q()[0].powi(2) + x.p()[0].powi(2)), Vec::new())
    }

    pub fn grid(&self) -> &Grid {
        self.h.grid()
    }

    pub fn h(&self) -> &PhaseFunction {
        &self.h
    }

    pub fn p(&self) -> &[PhaseFunction] {
        &self.p
    }

    /// (H(φ), P(φ)) at grid point `flat`.
    pub fn labels_at(&self, flat: usize) -> Vec<f64> {
        std::iter::once(self.h.values()[flat].re)
            .chain(self.p.iter().map(|f| f.values()[flat].re))
            .collect()
    }

    /// Largest interior |{H, P_i}_pb| or |{P_i, P_j}_pb|.
    pub fn involution_defect(&self) -> Result<f64> {
        let all: Vec<&PhaseFunction> = std::iter::once(&self.h).chain(&self.p).collect();
        let mut worst: f64 = 0.0;
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let b = phase_space::poisson_bracket(all[i], all[j])?;
                worst = worst.max(b.max_abs_interior(INTERIOR_FRACTION));
            }
        }
        Ok(worst)
    }

    /// Pull spectral samples back to phase space: φ ↦ s(H(φ), P(φ)) by
    /// multilinear interpolation.
    pub fn compose<T>(&self, grid: &SpectralGrid, samples: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        self.check_labels(grid)?;
        (0..self.grid().len())
            .map(|flat| {
                let st = grid.interpolation_stencil(&self.labels_at(flat))?;
                Ok(st.iter().fold(T::default(), |acc, &(m, w)| acc + samples[m] * w))
            })
            .collect()
    }

    /// Nearest-node variant of [`compose`](Self::compose).
    pub fn compose_nearest<T: Copy>(&self, grid: &SpectralGrid, samples: &[T]) -> Result<Vec<T>> {
        self.check_labels(grid)?;
        (0..self.grid().len())
            .map(|flat| Ok(samples[grid.nearest(&self.labels_at(flat))?]))
            .collect()
    }

    fn check_labels(&self, grid: &SpectralGrid) -> Result<()> {
        if grid.labels() != self.p.len() + 1 {
            return Err(Error::GridMismatch(format!(
                "spectral grid has {} labels, momentum map provides {}",
                grid.labels(),
                self.p.len() + 1
            )));
        }
        Ok(())
    }
}

/// Symbol of the singular part, O_S(φ) = O(H(φ), P(φ)), on the map's grid.
/// The regular kernel is ignored and the O(ℏ²) remainder is dropped.
pub fn symb_singular(obs: &Observable, map: &MomentumMap) -> Result<PhaseFunction> {
    let values = map.compose(&obs.grid, &obs.singular)?;
    PhaseFunction::from_values(map.grid().clone(), values, "O_S")
}

/// Like [`symb_singular`] but assigns each phase-space point to its nearest
/// spectral node. A singular basis operator then maps to the level-set band
/// of H around ω_m with weight 1/Δω.
pub fn symb_singular_level_set(obs: &Observable, map: &MomentumMap) -> Result<PhaseFunction> {
    let values = map.compose_nearest(&obs.grid, &obs.singular)?;
    PhaseFunction::from_values(map.grid().clone(), values, "O_S (level set)")
}

/// A concrete N = 1 model with continuous spectrum: Ĥ = p̂ + ω₀, whose
/// eigenfunctions are plane waves ⟨q|ω⟩ = e^{i(ω − ω₀)q/ℏ}/√(2πℏ). The
/// conjugate variable of H is q itself, so orbits are unbounded lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveRealization {
    pub omega_offset: f64,
}

impl PlaneWaveRealization {
    pub fn new(omega_offset: f64) -> Self {
        Self { omega_offset }
    }

    fn check(grid: &SpectralGrid, hbar: f64) -> Result<()> {
        if grid.labels() != 1 {
            return Err(Error::Unsupported("plane-wave realization is N = 1".into()));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::NonPositiveHbar(hbar));
        }
        Ok(())
    }

    #[inline]
    pub fn eigenfunction(&self, omega: f64, q: f64, hbar: f64) -> Complex64 {
        Complex64::cis((omega - self.omega_offset) * q / hbar) / (2.0 * PI * hbar).sqrt()
    }

    /// H(φ) = p + ω₀.
    pub fn momentum_map(&self, grid: &Grid) -> Result<MomentumMap> {
        if grid.dof() != 1 {
            return Err(Error::Unsupported("plane-wave realization is N = 1".into()));
        }
        let w0 = self.omega_offset;
        MomentumMap::from_fns(grid, move |x| x.p()[0] + w0, Vec::new())
    }

    /// c(ω) = ⟨ω|ψ⟩ = ∫ conj(⟨q|ω⟩) ψ(q) dq.
    pub fn amplitudes(&self, psi: &WaveFunction, grid: &SpectralGrid, hbar: f64) -> Result<Vec<Complex64>> {
        Self::check(grid, hbar)?;
        let w = psi.axis().trapezoid_weights();
        let qs = psi.axis().points();
        Ok((0..grid.len())
            .map(|m| {
                let omega = grid.omega(m);
                qs.iter()
                    .zip(&w)
                    .zip(psi.values())
                    .map(|((&q, &wq), &v)| self.eigenfunction(omega, q, hbar).conj() * v * wq)
                    .sum()
            })
            .collect())
    }

    /// Position kernel ⟨q|R̂|q′⟩ = ∫∫ ⟨q|ω⟩ R(ω, ω′) ⟨ω′|q′⟩ dω dω′ of a
    /// regular spectral kernel.
    pub fn position_kernel(
        &self,
        grid: &SpectralGrid,
        regular: &Array2<Complex64>,
        q_axis: Axis,
        hbar: f64,
    ) -> Result<OperatorKernel> {
        Self::check(grid, hbar)?;
        if regular.dim() != (grid.len(), grid.len()) {
            return Err(Error::GridMismatch("regular kernel does not match spectral grid".into()));
        }
        let dw = grid.cell();
        let qs = q_axis.points();
        let e = Array2::from_shape_fn((q_axis.count, grid.len()), |(i, a)| {
            self.eigenfunction(grid.omega(a), qs[i], hbar) * dw
        });
        let e_dag = e.t().mapv(|v| v.conj());
        let k = e.dot(regular).dot(&e_dag);
        OperatorKernel::new(q_axis, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn egrid() -> SpectralGrid {
        SpectralGrid::energy(4.0, 41).unwrap()
    }

    #[test]
    fn spectral_grid_invariants() {
        assert!(SpectralGrid::energy(4.0, 15).is_err());
        assert!(SpectralGrid::energy(-1.0, 20).is_err());
        let g = SpectralGrid::new(2.0, 21, vec![Axis::new(-1.0, 1.0, 17).unwrap()]).unwrap();
        assert_eq!(g.len(), 21 * 17);
        assert!((g.cell() - 0.1 * 0.125).abs() < 1e-15);
        assert_eq!(g.omega_axis().min, 0.0);
        let m = g.flat_index(&[3, 5]);
        assert!((g.omega(m) - 0.3).abs() < 1e-15);
        assert!((g.point(m).p[0] + 1.0 - 5.0 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn identity_observable_is_self_adjoint() {
        let o = Observable::from_fns(&egrid(), |_| c(1.0), |_, _| c(0.0)).unwrap();
        assert!(o.is_self_adjoint());
        assert!(o.commutator_with_h_vanishes());
    }

    #[test]
    fn hamiltonian_commutes_with_itself() {
        let h = Observable::hamiltonian(&egrid());
        assert!(h.is_self_adjoint());
        assert!(h.commutator_with_h_vanishes());
        assert!(!h.commutation_report().degenerate_diagonal);
    }

    #[test]
    fn real_symmetric_regular_kernel_is_self_adjoint() {
        let o = Observable::from_fns(&egrid(), |_| c(0.0), |a, b| {
            c((-(a.omega - 1.0).powi(2)).exp() * (-(b.omega - 1.0).powi(2)).exp())
        })
        .unwrap();
        assert!(o.is_self_adjoint());
        assert!(!o.commutator_with_h_vanishes());
    }

    #[test]
    fn non_finite_kernels_rejected() {
        assert!(matches!(
            Observable::from_fns(&egrid(), |x| c(1.0 / (x.omega - 0.0)), |_, _| c(0.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn adjoint_examples() {
        let g = egrid();
        let sa = Observable::from_fns(&g, |x| c(x.omega), |a, b| c((a.omega * b.omega).cos())).unwrap();
        assert_eq!(sa.adjoint(), sa);

        let k = |a: &SpectralPoint, b: &SpectralPoint| (-(a.omega - b.omega).powi(2)).exp();
        let imag = Observable::from_fns(&g, |_| c(0.0), |a, b| Complex64::new(0.0, k(a, b))).unwrap();
        let expect = Observable::from_fns(&g, |_| c(0.0), |a, b| Complex64::new(0.0, -k(a, b))).unwrap();
        assert_eq!(imag.adjoint(), expect);
        assert!(!imag.is_self_adjoint());
    }

    #[test]
    fn commutation_detection() {
        let g = egrid();
        let off = Observable::from_fns(&g, |_| c(0.0), |a, b| {
            if (a.omega - b.omega).abs() > 0.5 { c(1.0) } else { c(0.0) }
        })
        .unwrap();
        assert!(!off.commutator_with_h_vanishes());

        let diag = Observable::from_fns(&g, |_| c(0.0), |a, b| {
            if a.omega == b.omega { c(2.0) } else { c(0.0) }
        })
        .unwrap();
        let r = diag.commutation_report();
        assert!(r.commutes);
        assert!(r.degenerate_diagonal);
        assert_eq!(r.weighted_max, 0.0);
    }

    #[test]
    fn self_adjointness_survives_sums_and_real_scaling() {
        let g = egrid();
        let a = Observable::hamiltonian(&g);
        let b = Observable::from_fns(&g, |_| c(0.5), |x, y| {
            Complex64::new((x.omega + y.omega).cos(), (x.omega - y.omega).sin())
        })
        .unwrap();
        assert!(b.is_self_adjoint());
        assert!(a.add(&b).unwrap().is_self_adjoint());
        assert!(b.scale(-3.5).is_self_adjoint());
    }

    fn oscillator_setup() -> (SpectralGrid, MomentumMap) {
        let grid = Grid::cube(1, -2.0, 2.0, 81).unwrap();
        let spec = SpectralGrid::energy(4.0, 161).unwrap();
        (spec, MomentumMap::oscillator(&grid).unwrap())
    }

    #[test]
    fn symb_of_hamiltonian_is_classical_energy() {
        let (spec, map) = oscillator_setup();
        let s = symb_singular(&Observable::hamiltonian(&spec), &map).unwrap();
        assert!(s.sub(map.h()).unwrap().max_abs() < 1e-6);
        let one = symb_singular(&Observable::identity(&spec), &map).unwrap();
        assert!(one.values().iter().all(|v| (v.re - 1.0).abs() < 1e-12));
    }

    #[test]
    fn symb_rejects_range_excursions() {
        let grid = Grid::cube(1, -3.0, 3.0, 41).unwrap();
        let map = MomentumMap::oscillator(&grid).unwrap();
        let spec = SpectralGrid::energy(4.0, 41).unwrap();
        assert!(matches!(
            symb_singular(&Observable::hamiltonian(&spec), &map),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn symb_is_linear_and_multiplicative() {
        let (spec, map) = oscillator_setup();
        let a = Observable::singular_only(&spec, |x| c((x.omega * 0.7).sin())).unwrap();
        let b = Observable::singular_only(&spec, |x| c((-x.omega).exp())).unwrap();
        let sa = symb_singular(&a, &map).unwrap();
        let sb = symb_singular(&b, &map).unwrap();
        let sum = symb_singular(&a.add(&b.scale(2.0)).unwrap(), &map).unwrap();
        let expect = sa.add(&sb.scale(c(2.0))).unwrap();
        assert!(sum.sub(&expect).unwrap().max_abs() < 1e-12);

        let prod = Observable::singular_only(&spec, |x| c((x.omega * 0.7).sin() * (-x.omega).exp())).unwrap();
        let sp = symb_singular(&prod, &map).unwrap();
        assert!(sp.sub(&sa.mul(&sb).unwrap()).unwrap().max_abs() < 1e-3);
    }

    #[test]
    fn delta_column_maps_to_level_set_band() {
        // Histogram oracle: the band |H − ω′| < Δω/2 of H = (q² + p²)/2 has
        // area 2πΔω, so ∫ symb δ dφ ≈ 2π.
        let grid = Grid::cube(1, -2.5, 2.5, 401).unwrap();
        let map = MomentumMap::oscillator(&grid).unwrap();
        let spec = SpectralGrid::energy(6.4, 65).unwrap();
        let m = 10;
        let delta = Observable::singular_basis(&spec, m);
        let band = symb_singular_level_set(&delta, &map).unwrap();
        let dw = spec.omega_axis().spacing();
        let w0 = spec.omega(m);
        for (flat, v) in band.values().iter().enumerate() {
            let h = map.h().values()[flat].re;
            let inside = (h - w0).abs() < 0.5 * dw;
            let expect = if inside { 1.0 / dw } else { 0.0 };
            if ((h - w0).abs() - 0.5 * dw).abs() > 1e-9 {
                assert_eq!(v.re, expect);
            }
        }
        let total = phase_space::integrate(&band).unwrap().re;
        assert!((total - 2.0 * PI).abs() < 0.02 * 2.0 * PI, "band integral {total}");
    }

    #[test]
    fn oscillator_map_is_involutive() {
        let g = Grid::cube(2, -1.0, 1.0, 11).unwrap();
        let map = MomentumMap::from_fns(
            &g,
            |x| 0.5 * (x.q()[0].powi(2) + x.p()[0].powi(2) + x.q()[1].powi(2) + x.p()[1].powi(2)),
            vec![Box::new(|x: &phase_space::PhasePoint| 0.5 * (x.q()[1].powi(2) + x.p()[1].powi(2)))],
        )
        .unwrap();
        assert!(map.involution_defect().unwrap() < 1e-10);
    }

    #[test]
    fn plane_wave_kernel_of_rank_one_is_projector() {
        let hbar = 1.0;
        let spec = SpectralGrid::energy(16.0, 161).unwrap();
        let real = PlaneWaveRealization::new(8.0);
        let q = Axis::new(-8.0, 8.0, 161).unwrap();
        let psi = WaveFunction::gaussian(q, 1.0, 0.5, 0.3, hbar).unwrap();
        let amp = real.amplitudes(&psi, &spec, hbar).unwrap();
        let norm: f64 = amp.iter().map(|a| a.norm_sqr()).sum::<f64>() * spec.cell();
        assert!((norm - 1.0).abs() < 1e-10);
        let r = Array2::from_shape_fn((spec.len(), spec.len()), |(a, b)| amp[a] * amp[b].conj());
        let k = real.position_kernel(&spec, &r, q, hbar).unwrap();
        let expect = OperatorKernel::projector(&psi);
        let diff = (k.values() - expect.values()).mapv(|v| v.norm()).fold(0.0f64, |a, b| a.max(*b));
        assert!(diff < 1e-8, "kernel mismatch {diff}");
    }
}
