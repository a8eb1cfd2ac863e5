// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Weyl symbols of regular-space operators (N = 1).
//!
//! For a position kernel K(q, q′) = ⟨q|f̂|q′⟩ the symbol is
//!
//! ```text
//! f(q, p) = ∫ K(q − y, q + y) e^{2ipy/ℏ} 2 dy
//! ```
//!
//! which carries no prefactor, so the identity maps to 1. States are
//! normalised as Wigner functions, W = f / (2πℏ), so that ∫W dq dp = Tr ρ̂ and
//! ∫W_ρ f_O dq dp = Tr(ρ̂ Ô).
//!
//! The y-integral is a trapezoid sum over kernel nodes, so output q values
//! must sit on the kernel grid or halfway between two of its nodes.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase_space::{fd_weights, Axis, Grid, PhaseFunction};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest allowed max|p|·Δy/ℏ for the oscillatory y-integral.
pub const NYQUIST_GUARD: f64 = PI / 4.0;

/// Nodes used to interpolate symbols at half-nodes in [`weyl_quantize`].
const INTERP_POINTS: usize = 6;

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::NonPositiveHbar(hbar));
    }
    Ok(())
}

/// Position-representation kernel K(q_i, q_j) of a regular-space operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    axis: Axis,
    values: Array2<Complex64>,
}

impl OperatorKernel {
    pub fn new(axis: Axis, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != (axis.count, axis.count) {
            return Err(Error::GridMismatch(format!(
                "kernel of shape {:?} on an axis with {} nodes",
                values.dim(),
                axis.count
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("operator kernel".into()));
        }
        Ok(Self { axis, values })
    }

    pub fn from_fn(axis: Axis, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let values = Array2::from_shape_fn((axis.count, axis.count), |(i, j)| {
            f(axis.point(i), axis.point(j))
        });
        Self::new(axis, values)
    }

    pub fn zeros(axis: Axis) -> Self {
        Self { axis, values: Array2::zeros((axis.count, axis.count)) }
    }

    /// |ψ⟩⟨ψ| as a kernel ψ(q) conj(ψ(q′)).
    pub fn projector(psi: &WaveFunction) -> Self {
        let v = &psi.values;
        let values = Array2::from_shape_fn((v.len(), v.len()), |(i, j)| v[i] * v[j].conj());
        Self { axis: psi.axis, values }
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    /// max |K(q, q′) − conj(K(q′, q))|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.axis.count;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.values[[i, j]] - self.values[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOLERANCE
    }

    /// Tr(Â B̂) = ∫∫ A(q, q′) B(q′, q) dq dq′ by the 2-D trapezoid rule.
    pub fn trace_pairing(&self, other: &Self) -> Result<Complex64> {
        if self.axis != other.axis {
            return Err(Error::GridMismatch("kernels on different q axes".into()));
        }
        let w = self.axis.trapezoid_weights();
        let n = self.axis.count;
        let sum = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| self.values[[i, j]] * other.values[[j, i]] * (w[i] * w[j]))
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        Ok(sum)
    }
}

/// A pure state ψ(q) sampled on a q axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    axis: Axis,
    values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.count {
            return Err(Error::GridMismatch(format!(
                "{} samples on an axis with {} nodes",
                values.len(),
                axis.count
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("wave function".into()));
        }
        Ok(Self { axis, values })
    }

    pub fn from_fn(axis: Axis, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = axis.points().into_iter().map(f).collect();
        Self::new(axis, values)
    }

    /// (πσ²)^{−1/4} exp(−(q − q₀)²/2σ²) e^{i k₀ q/ℏ}.
    pub fn gaussian(axis: Axis, sigma: f64, q0: f64, k0: f64, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        if !(sigma > 0.0) {
            return Err(Error::Degenerate(format!("gaussian width must be positive, got {sigma}")));
        }
        let norm = (PI * sigma * sigma).powf(-0.25);
        Self::from_fn(axis, |q| {
            let env = norm * (-(q - q0).powi(2) / (2.0 * sigma * sigma)).exp();
            Complex64::from_polar(env, k0 * q / hbar)
        })
    }

    /// n-th eigenstate of the unit-mass, unit-frequency oscillator
    /// H = (p² + q²)/2, via the normalised Hermite recurrence.
    pub fn oscillator_eigenstate(axis: Axis, n: usize, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let values = axis
            .points()
            .into_iter()
            .map(|q| Complex64::new(hermite_function(n, q, hbar), 0.0))
            .collect();
        Self::new(axis, values)
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// |ψ(q)|² per node.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// ∫ |ψ|² dq (trapezoid).
    pub fn norm_squared(&self) -> f64 {
        self.axis
            .trapezoid_weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) {
            return Err(Error::Degenerate("cannot normalise a zero wave function".into()));
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self { axis: self.axis, values: self.values.iter().map(|v| v * s).collect() })
    }
}

/// ψ_n(q) for H = (p² + q²)/2 with the given ℏ.
pub fn hermite_function(n: usize, q: f64, hbar: f64) -> f64 {
    let x = q / hbar.sqrt();
    let mut prev = (PI * hbar).powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * x * prev;
    for k in 1..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Position of `x` on the kernel's half-step lattice, in half-spacings.
fn half_lattice_index(axis: &Axis, x: f64) -> Result<usize> {
    if !axis.contains(x) {
        return Err(Error::OutOfRange {
            what: "output q".into(),
            value: x,
            min: axis.min,
            max: axis.max,
        });
    }
    let s = 2.0 * (x - axis.min) / axis.spacing();
    let m = s.round();
    if (s - m).abs() > 1e-6 {
        return Err(Error::GridMismatch(format!(
            "output q = {x} is neither a kernel node nor a kernel half-node"
        )));
    }
    Ok(m as usize)
}

/// (y, K(q − y, q + y), trapezoid weight) for the y-integral at half-lattice
/// position `m`.
fn y_samples(kernel: &OperatorKernel, m: usize) -> Vec<(f64, Complex64, f64)> {
    let n = kernel.axis.count;
    let h = kernel.axis.spacing();
    let k = &kernel.values;
    let mut out = Vec::new();
    if m.is_multiple_of(2) {
        let i = m / 2;
        let kmax = i.min(n - 1 - i);
        if kmax == 0 {
            return out;
        }
        for s in -(kmax as isize)..=(kmax as isize) {
            let w = if s.unsigned_abs() == kmax { 0.5 } else { 1.0 };
            let lo = (i as isize - s) as usize;
            let hi = (i as isize + s) as usize;
            out.push((s as f64 * h, k[[lo, hi]], w));
        }
    } else {
        let i = (m - 1) / 2;
        let kmax = i.min(n - 2 - i);
        for s in 0..=kmax {
            let w = if s == kmax { 0.5 } else { 1.0 };
            let y = (s as f64 + 0.5) * h;
            out.push((y, k[[i - s, i + 1 + s]], w));
            out.push((-y, k[[i + 1 + s, i - s]], w));
        }
    }
    out
}

/// Weyl symbol f(q, p) = ∫ K(q − y, q + y) e^{2ipy/ℏ} 2 dy on `out_grid`.
pub fn wigner_of_kernel(kernel: &OperatorKernel, hbar: f64, out_grid: &Grid) -> Result<PhaseFunction> {
    check_hbar(hbar)?;
    if out_grid.dims() != 2 {
        return Err(Error::Unsupported("Wigner transforms are implemented for N = 1".into()));
    }
    let q_axis = out_grid.axis(0);
    let p_axis = out_grid.axis(1);
    let kq = &kernel.axis;
    if !(kq.contains(q_axis.min) && kq.contains(q_axis.max)) {
        return Err(Error::OutOfRange {
            what: "output q range".into(),
            value: if kq.contains(q_axis.min) { q_axis.max } else { q_axis.min },
            min: kq.min,
            max: kq.max,
        });
    }
    let pmax = p_axis.min.abs().max(p_axis.max.abs());
    let guard = pmax * kq.spacing() / hbar;
    if guard >= NYQUIST_GUARD {
        return Err(Error::Undersampled(format!(
            "max|p|·Δy/ℏ = {guard:.4} must stay below π/4"
        )));
    }
    let positions = q_axis
        .points()
        .into_iter()
        .map(|x| half_lattice_index(kq, x))
        .collect::<Result<Vec<_>>>()?;
    let ps = p_axis.points();
    let dy2 = 2.0 * kq.spacing();
    let rows: Vec<Vec<Complex64>> = positions
        .par_iter()
        .map(|&m| {
            let samples = y_samples(kernel, m);
            ps.iter()
                .map(|&p| {
                    let s: Complex64 = samples
                        .iter()
                        .map(|&(y, kv, w)| kv * Complex64::cis(2.0 * p * y / hbar) * w)
                        .sum();
                    s * dy2
                })
                .collect()
        })
        .collect();
    PhaseFunction::from_values(out_grid.clone(), rows.concat(), "weyl symbol")
}

/// Wigner function of |ψ⟩⟨ψ|, normalised so that ∫W dq dp = 1.
pub fn wigner_of_pure_state(psi: &WaveFunction, hbar: f64, out_grid: &Grid) -> Result<PhaseFunction> {
    check_hbar(hbar)?;
    let psi = psi.normalized()?;
    let symbol = wigner_of_kernel(&OperatorKernel::projector(&psi), hbar, out_grid)?;
    Ok(symbol.scale(Complex64::new(1.0 / (2.0 * PI * hbar), 0.0)).with_label("wigner"))
}

fn check_plane(w: &PhaseFunction) -> Result<()> {
    if w.grid().dims() != 2 {
        return Err(Error::Unsupported("marginals are implemented for N = 1".into()));
    }
    if w.values().iter().any(|v| !v.re.is_finite()) {
        return Err(Error::NonFinite(w.label().to_string()));
    }
    Ok(())
}

/// ∫ W(q, p) dp per q node (real part).
pub fn q_marginal(w: &PhaseFunction) -> Result<Vec<f64>> {
    check_plane(w)?;
    let grid = w.grid();
    let wp = grid.axis(1).trapezoid_weights();
    let np = grid.axis(1).count;
    Ok(w.values()
        .chunks(np)
        .map(|row| row.iter().zip(&wp).map(|(v, x)| v.re * x).sum())
        .collect())
}

/// ∫ W(q, p) dq per p node (real part).
pub fn p_marginal(w: &PhaseFunction) -> Result<Vec<f64>> {
    check_plane(w)?;
    let grid = w.grid();
    let wq = grid.axis(0).trapezoid_weights();
    let np = grid.axis(1).count;
    let mut out = vec![0.0; np];
    for (row, x) in w.values().chunks(np).zip(&wq) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v.re * x;
        }
    }
    Ok(out)
}

/// Inverse Weyl transform
/// K(q, q′) = (1/2πℏ) ∫ f((q + q′)/2, p) e^{ip(q − q′)/ℏ} dp on the q axis of `f`.
///
/// Midpoints falling between q nodes are filled by six-point Lagrange
/// interpolation along q.
pub fn weyl_quantize(f: &PhaseFunction, hbar: f64) -> Result<OperatorKernel> {
    check_hbar(hbar)?;
    let grid = f.grid();
    if grid.dims() != 2 {
        return Err(Error::Unsupported("Weyl quantization is implemented for N = 1".into()));
    }
    let q_axis = *grid.axis(0);
    let p_axis = grid.axis(1);
    let n = q_axis.count;
    let np = p_axis.count;
    let wp = p_axis.trapezoid_weights();
    let ps = p_axis.points();
    let column = |i: usize| &f.values()[i * np..(i + 1) * np];

    // columns[m] holds f(q_min + m·Δq/2, ·)
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(2 * n - 1);
    for m in 0..(2 * n - 1) {
        if m % 2 == 0 {
            columns.push(column(m / 2).to_vec());
        } else {
            let width = INTERP_POINTS.min(n);
            let h = (m - 1) / 2;
            let start = h.saturating_sub(width / 2 - 1).min(n - width);
            let nodes: Vec<f64> = (start..start + width).map(|j| j as f64).collect();
            let w = &fd_weights(h as f64 + 0.5, &nodes, 0)[0];
            let mut col = vec![Complex64::new(0.0, 0.0); np];
            for (k, wk) in w.iter().enumerate() {
                for (c, v) in col.iter_mut().zip(column(start + k)) {
                    *c += v * *wk;
                }
            }
            columns.push(col);
        }
    }

    let qs = q_axis.points();
    let pref = 1.0 / (2.0 * PI * hbar);
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let col = &columns[i + j];
                    let s = qs[i] - qs[j];
                    let sum: Complex64 = col
                        .iter()
                        .zip(&ps)
                        .zip(&wp)
                        .map(|((v, p), w)| v * Complex64::cis(p * s / hbar) * *w)
                        .sum();
                    sum * pref
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_vec((n, n), rows.concat())
        .map_err(|e| Error::GridMismatch(e.to_string()))?;
    OperatorKernel::new(q_axis, values)
}
