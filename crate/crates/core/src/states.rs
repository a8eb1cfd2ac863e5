// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Linear functionals on observables, admissible states, and the two ways of
//! pairing them: the regular part by an ordinary phase-space integral, the
//! singular part by an integral over the momentum labels (H, P) only.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{self, PhaseFunction};
use crate::spectral::{self, hermiticity_defect, MomentumMap, Observable, SpectralGrid, SpectralPoint, KERNEL_TOLERANCE};

/// The two contributions to (ρ|O).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    pub singular: Complex64,
    pub regular: Complex64,
}

impl Pairing {
    pub fn total(&self) -> Complex64 {
        self.singular + self.regular
    }
}

/// A general functional, given by its coefficients ρ(ω, p) and
/// ρ(ω, ω′, p, p′). No positivity or normalisation is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    grid: SpectralGrid,
    singular: Vec<Complex64>,
    regular: Array2<Complex64>,
}

fn check_grid(a: &SpectralGrid, b: &SpectralGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch("state and observable live on different spectral grids".into()));
    }
    Ok(())
}

fn singular_sum<T: Copy + Into<Complex64>>(rho: &[T], o: &[Complex64], cell: f64) -> Complex64 {
    rho.iter().zip(o).map(|(&r, &v)| r.into() * v).sum::<Complex64>() * cell
}

/// Σ ρ(a, b) O(b, a) cell².
pub(crate) fn regular_sum(rho: &Array2<Complex64>, o: &Array2<Complex64>, cell: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, row) in rho.outer_iter().enumerate() {
        let inner: Complex64 = row.iter().zip(o.column(a)).map(|(r, v)| r * v).sum();
        acc += inner;
    }
    acc * (cell * cell)
}

impl Functional {
    pub fn from_parts(grid: SpectralGrid, singular: Vec<Complex64>, regular: Array2<Complex64>) -> Result<Self> {
        let m = grid.len();
        if singular.len() != m || regular.dim() != (m, m) {
            return Err(Error::GridMismatch(format!(
                "functional coefficients do not match a spectral grid of {m} nodes"
            )));
        }
        if singular.iter().chain(regular.iter()).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("functional coefficients".into()));
        }
        Ok(Self { grid, singular, regular })
    }

    pub fn from_fns<S, R>(grid: &SpectralGrid, singular_fn: S, regular_fn: R) -> Result<Self>
    where
        S: Fn(&SpectralPoint) -> Complex64,
        R: Fn(&SpectralPoint, &SpectralPoint) -> Complex64,
    {
        let singular = grid.points().iter().map(singular_fn).collect();
        Self::from_parts(grid.clone(), singular, spectral::sample_regular(grid, regular_fn))
    }

    /// Functional ρ = (ω_m, p_m| dual to the singular basis operator.
    pub fn singular_basis(grid: &SpectralGrid, m: usize) -> Self {
        let mut singular = vec![Complex64::new(0.0, 0.0); grid.len()];
        singular[m] = Complex64::new(1.0 / grid.cell(), 0.0);
        Self { grid: grid.clone(), singular, regular: Array2::zeros((grid.len(), grid.len())) }
    }

    /// Functional (ω_a, ω_b, p_a, p_b| dual to |ω_a, ω_b, p_a, p_b). The
    /// pairing contracts ρ(ω, ω′) with O(ω′, ω), so the coefficient sits at
    /// the transposed position.
    pub fn regular_basis(grid: &SpectralGrid, a: usize, b: usize) -> Self {
        let mut regular = Array2::zeros((grid.len(), grid.len()));
        regular[[b, a]] = Complex64::new(1.0 / (grid.cell() * grid.cell()), 0.0);
        Self { grid: grid.clone(), singular: vec![Complex64::new(0.0, 0.0); grid.len()], regular }
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

    pub fn pair_parts(&self, obs: &Observable) -> Result<Pairing> {
        check_grid(&self.grid, obs.grid())?;
        let cell = self.grid.cell();
        Ok(Pairing {
            singular: singular_sum(&self.singular, obs.singular(), cell),
            regular: regular_sum(&self.regular, obs.regular(), cell),
        })
    }

    pub fn pair(&self, obs: &Observable) -> Result<Complex64> {
        Ok(self.pair_parts(obs)?.total())
    }
}

/// An admissible state: ρ(ω, p) ≥ 0 with unit discrete integral, and a
/// hermitian regular kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    grid: SpectralGrid,
    diagonal: Vec<f64>,
    regular: Array2<Complex64>,
}

/// Σ values · cell.
fn discrete_mass(values: &[f64], cell: f64) -> f64 {
    values.iter().sum::<f64>() * cell
}

fn normalize_diagonal(values: &mut [f64], cell: f64, what: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{what} sample {v}")));
    }
    if let Some(v) = values.iter().find(|&&v| v < 0.0) {
        return Err(Error::Inadmissible(format!("{what} takes the negative value {v}")));
    }
    let mass = discrete_mass(values, cell);
    if mass <= 0.0 {
        return Err(Error::Inadmissible(format!("{what} has zero total weight")));
    }
    if (mass - 1.0).abs() > 1e-12 {
        log::info!("{what} renormalized by factor {:.6e}", 1.0 / mass);
        values.iter_mut().for_each(|v| *v /= mass);
    }
    Ok(())
}

impl State {
    pub fn from_parts(grid: SpectralGrid, mut diagonal: Vec<f64>, regular: Array2<Complex64>) -> Result<Self> {
        let m = grid.len();
        if diagonal.len() != m || regular.dim() != (m, m) {
            return Err(Error::GridMismatch(format!(
                "state coefficients do not match a spectral grid of {m} nodes"
            )));
        }
        if regular.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("regular state kernel".into()));
        }
        let defect = hermiticity_defect(&regular);
        if defect > KERNEL_TOLERANCE {
            return Err(Error::Inadmissible(format!(
                "regular state kernel is not hermitian (defect {defect:.3e})"
            )));
        }
        normalize_diagonal(&mut diagonal, grid.cell(), "state diagonal")?;
        Ok(Self { grid, diagonal, regular })
    }

    /// Sample ρ(ω, p) and ρ(ω, ω′, p, p′); the diagonal is renormalised.
    pub fn from_fns<D, R>(grid: &SpectralGrid, diagonal_fn: D, regular_fn: R) -> Result<Self>
    where
        D: Fn(&SpectralPoint) -> f64,
        R: Fn(&SpectralPoint, &SpectralPoint) -> Complex64,
    {
        let diagonal = grid.points().iter().map(diagonal_fn).collect();
        Self::from_parts(grid.clone(), diagonal, spectral::sample_regular(grid, regular_fn))
    }

    /// A stationary state with no regular part.
    pub fn stationary<D>(grid: &SpectralGrid, diagonal_fn: D) -> Result<Self>
    where
        D: Fn(&SpectralPoint) -> f64,
    {
        let diagonal = grid.points().iter().map(diagonal_fn).collect();
        Self::from_parts(grid.clone(), diagonal, Array2::zeros((grid.len(), grid.len())))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn regular(&self) -> &Array2<Complex64> {
        &self.regular
    }

    /// The same coefficients as an unconstrained functional.
    pub fn to_functional(&self) -> Functional {
        Functional {
            grid: self.grid.clone(),
            singular: self.diagonal.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            regular: self.regular.clone(),
        }
    }

    pub fn pair_parts(&self, obs: &Observable) -> Result<Pairing> {
        check_grid(&self.grid, obs.grid())?;
        let cell = self.grid.cell();
        Ok(Pairing {
            singular: singular_sum(&self.diagonal, obs.singular(), cell),
            regular: regular_sum(&self.regular, obs.regular(), cell),
        })
    }

    /// (ρ|O) = Σ ρ(ω,p) O(ω,p) ΔωΔp + Σ ρ(ω,ω′,p,p′) O(ω′,ω,p′,p) (ΔωΔp)².
    pub fn pair(&self, obs: &Observable) -> Result<Complex64> {
        Ok(self.pair_parts(obs)?.total())
    }

    /// The diagonal read as a density over (H, P).
    pub fn to_classical_density(&self) -> ClassicalDensity {
        ClassicalDensity { grid: self.grid.clone(), values: self.diagonal.clone() }
    }

    /// ρ_S(φ) = ρ(H(φ), P(φ)).
    pub fn singular_symbol(&self, map: &MomentumMap) -> Result<PhaseFunction> {
        let values = map.compose(&self.grid, &self.diagonal)?;
        PhaseFunction::from_values(
            map.grid().clone(),
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            "rho_S",
        )
    }
}

/// A normalised nonnegative density on the (H, P) spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDensity {
    grid: SpectralGrid,
    values: Vec<f64>,
}

impl ClassicalDensity {
    /// Renormalises `values` to unit discrete integral.
    pub fn from_values(grid: SpectralGrid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("density does not match spectral grid".into()));
        }
        normalize_diagonal(&mut values, grid.cell(), "classical density")?;
        Ok(Self { grid, values })
    }

    pub fn from_fn<D: Fn(&SpectralPoint) -> f64>(grid: &SpectralGrid, f: D) -> Result<Self> {
        Self::from_values(grid.clone(), grid.points().iter().map(f).collect())
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        discrete_mass(&self.values, self.grid.cell())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// ∫ ρ_R(φ) O_R(φ) dφ over the whole phase-space grid.
pub fn pair_regular_symbols(rho_r: &PhaseFunction, o_r: &PhaseFunction) -> Result<Complex64> {
    phase_space::integrate(&rho_r.mul(o_r)?)
}

/// Σ ρ_S(H, P) O(H, P) ΔH ΔP, an integral over the momentum labels only.
pub fn pair_singular_symbols(rho_s: &ClassicalDensity, obs: &Observable) -> Result<Complex64> {
    check_grid(&rho_s.grid, obs.grid())?;
    Ok(singular_sum(&rho_s.values, obs.singular(), rho_s.grid.cell()))
}
