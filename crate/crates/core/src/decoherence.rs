// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of (ρ(t)|O), its Riemann–Lebesgue weak limit, and
//! empirical decoherence times.
//!
//! Only the regular kernel evolves: ρ(ω, ω′) picks up e^{i(ω−ω′)t/ℏ} while
//! ρ(ω) is stationary. For kernels that are integrable in ν = ω − ω′ the
//! regular contribution is a Fourier integral and vanishes as t → ∞.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::{fit_line, LineFit};
use crate::spectral::{Observable, SpectralGrid};
use crate::states::{pair_singular_symbols, State};

/// Residual magnitudes below this are clipped before taking logs.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// Minimum R² for a decay model to be accepted.
pub const MIN_FIT_QUALITY: f64 = 0.9;

pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

/// Off-diagonal profiles k(ν) used to build coherent regular kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelFamily {
    /// γ²/(ν² + γ²): simple poles at ν = ±iγ, so the residual decays as e^{−γt/ℏ}.
    Lorentzian { gamma: f64 },
    /// e^{−ν²/2s²}: entire, Gaussian decay in t.
    Gaussian { width: f64 },
    /// e^{−|ν|/ν₀}: no poles, but a cusp at ν = 0, so the residual decays
    /// algebraically, ∝ t^{−2}.
    PoleFree { scale: f64 },
    /// Σ c_k ν^k.
    CustomPolynomial { coeffs: Vec<f64> },
}

impl KernelFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::OutOfRange { what: what.into(), value: v, min: 0.0, max: f64::INFINITY })
        };
        match *self {
            Self::Lorentzian { gamma } if !(gamma > 0.0 && gamma.is_finite()) => bad("gamma", gamma),
            Self::Gaussian { width } if !(width > 0.0 && width.is_finite()) => bad("width", width),
            Self::PoleFree { scale } if !(scale > 0.0 && scale.is_finite()) => bad("scale", scale),
            Self::CustomPolynomial { ref coeffs } if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) => {
                Err(Error::InvalidGrid("polynomial kernel needs finite coefficients".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn profile(&self, nu: f64) -> f64 {
        match self {
            Self::Lorentzian { gamma } => gamma * gamma / (nu * nu + gamma * gamma),
            Self::Gaussian { width } => (-nu * nu / (2.0 * width * width)).exp(),
            Self::PoleFree { scale } => (-nu.abs() / scale).exp(),
            Self::CustomPolynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * nu + c),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lorentzian { .. } => "lorentzian",
            Self::Gaussian { .. } => "gaussian",
            Self::PoleFree { .. } => "pole-free",
            Self::CustomPolynomial { .. } => "custom-polynomial",
        }
    }
}

/// amplitude·√(d(ω)d(ω′))·k(ω − ω′) for a nonnegative diagonal `d`.
pub fn coherence_kernel(grid: &SpectralGrid, family: &KernelFamily, amplitude: f64, diagonal: &[f64]) -> Result<Array2<Complex64>> {
    family.validate()?;
    if diagonal.len() != grid.len() {
        return Err(Error::GridMismatch("diagonal does not match spectral grid".into()));
    }
    let root: Vec<f64> = diagonal.iter().map(|d| d.max(0.0).sqrt()).collect();
    Ok(Array2::from_shape_fn((grid.len(), grid.len()), |(a, b)| {
        let k = family.profile(grid.omega(a) - grid.omega(b));
        Complex64::new(amplitude * root[a] * root[b] * k, 0.0)
    }))
}

/// A state with diagonal `diagonal_fn` (renormalised) and a coherent regular
/// part drawn from `family`.
pub fn decohering_state<D>(grid: &SpectralGrid, diagonal_fn: D, family: &KernelFamily, amplitude: f64) -> Result<State>
where
    D: Fn(&crate::spectral::SpectralPoint) -> f64,
{
    let stationary = State::stationary(grid, diagonal_fn)?;
    let kernel = coherence_kernel(grid, family, amplitude, stationary.diagonal())?;
    State::from_parts(grid.clone(), stationary.diagonal().to_vec(), kernel)
}

/// Sampling of the time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "lowercase", deny_unknown_fields)]
pub enum TimeGrid {
    Linear { start: f64, end: f64, count: usize },
    Log { start: f64, end: f64, count: usize },
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::Log { start: 0.1, end: 1000.0, count: 200 }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>> {
        let (start, end, count, log) = match *self {
            Self::Linear { start, end, count } => (start, end, count, false),
            Self::Log { start, end, count } => (start, end, count, true),
        };
        if !(start.is_finite() && end.is_finite() && start >= 0.0 && end > start && count >= 2) {
            return Err(Error::InvalidGrid(format!("time grid [{start}, {end}] with {count} samples")));
        }
        if log && start <= 0.0 {
            return Err(Error::InvalidGrid("log-spaced times need a positive start".into()));
        }
        let n = (count - 1) as f64;
        Ok((0..count)
            .map(|i| {
                let s = i as f64 / n;
                if log {
                    (start.ln() + s * (end.ln() - start.ln())).exp()
                } else {
                    start + s * (end - start)
                }
            })
            .collect())
    }

    /// The same grid with every time multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Self::Linear { start, end, count } => Self::Linear { start: start * factor, end: end * factor, count },
            Self::Log { start, end, count } => Self::Log { start: start * factor, end: end * factor, count },
        }
    }
}

/// Precomputed ρ(a, b)·O(b, a) for repeated evaluation at many times.
struct Evolution {
    omegas: Vec<f64>,
    weights: Array2<Complex64>,
    singular: Complex64,
    cell2: f64,
}

impl Evolution {
    fn new(rho: &State, obs: &Observable) -> Result<Self> {
        let parts = rho.pair_parts(obs)?;
        let grid = rho.grid();
        let (r, o) = (rho.regular(), obs.regular());
        let weights = Array2::from_shape_fn(r.dim(), |(a, b)| r[[a, b]] * o[[b, a]]);
        Ok(Self {
            omegas: (0..grid.len()).map(|m| grid.omega(m)).collect(),
            weights,
            singular: parts.singular,
            cell2: grid.cell() * grid.cell(),
        })
    }

    /// Row-wise sum Σ_a u_a Σ_b W(a, b) conj(u_b) with u = e^{iωt/ℏ}. At
    /// t = 0 every phase is exactly 1 and the arithmetic matches the plain
    /// pairing operation for operation.
    fn at(&self, t: f64, hbar: f64) -> Complex64 {
        let u: Vec<Complex64> = self.omegas.iter().map(|w| Complex64::cis(w * t / hbar)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, row) in self.weights.outer_iter().enumerate() {
            let inner: Complex64 = row.iter().zip(&u).map(|(w, ub)| w * ub.conj()).sum();
            acc += u[a] * inner;
        }
        self.singular + acc * self.cell2
    }
}

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::NonPositiveHbar(hbar));
    }
    Ok(())
}

/// (ρ(t)|O): singular term unchanged, regular term weighted by e^{i(ω−ω′)t/ℏ}.
pub fn evolve_pairing(rho: &State, obs: &Observable, t: f64, hbar: f64) -> Result<Complex64> {
    check_hbar(hbar)?;
    Ok(Evolution::new(rho, obs)?.at(t, hbar))
}

/// lim_{t→∞} (ρ(t)|O) = Σ ρ(H, P) O(H, P) ΔH ΔP.
pub fn limit_pairing(rho: &State, obs: &Observable) -> Result<f64> {
    Ok(pair_singular_symbols(&rho.to_classical_density(), obs)?.re)
}

/// Residual (ρ(t)|O) − limit on a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub limit_value: f64,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, limit_value: f64) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Degenerate(format!("{} times for {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("times must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("trajectory values".into()));
        }
        Ok(Self { times, values, limit_value })
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

pub fn residual_trajectory(rho: &State, obs: &Observable, times: &[f64], hbar: f64) -> Result<Trajectory> {
    check_hbar(hbar)?;
    if times.is_empty() {
        return Err(Error::Degenerate("empty time list".into()));
    }
    let evolution = Evolution::new(rho, obs)?;
    let limit = limit_pairing(rho, obs)?;
    let values = times.par_iter().map(|&t| evolution.at(t, hbar) - limit).collect();
    Trajectory::new(times.to_vec(), values, limit)
}

/// max |residual| over each window [T, 2T], T = t0·2^k for k < windows.
pub fn window_maxima(rho: &State, obs: &Observable, hbar: f64, t0: f64, windows: usize, samples: usize) -> Result<Vec<f64>> {
    check_hbar(hbar)?;
    if !(t0 > 0.0) || samples < 2 {
        return Err(Error::InvalidGrid("windows need t0 > 0 and at least 2 samples".into()));
    }
    let evolution = Evolution::new(rho, obs)?;
    let limit = limit_pairing(rho, obs)?;
    Ok((0..windows)
        .map(|k| {
            let t = t0 * 2f64.powi(k as i32);
            (0..samples)
                .into_par_iter()
                .map(|i| (evolution.at(t * (1.0 + i as f64 / (samples - 1) as f64), hbar) - limit).norm())
                .reduce(|| 0.0, f64::max)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    Exponential,
    PowerLaw,
    None,
}

/// Outcome of [`fit_decay`]. `rate` is γ in e^{−γt} for the exponential model
/// and the exponent α in t^{−α} for the power law. `t_dec` is infinite unless
/// the decay is exponential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub model: DecayModel,
    pub rate: f64,
    pub fit_quality: f64,
    pub t_dec: f64,
    /// Candidate fits, kept for diagnostics.
    pub exponential_fit: Option<LineFit>,
    pub power_law_fit: Option<LineFit>,
}

/// Classify the tail of |residual(t)| after discarding the first 10% of
/// samples.
pub fn fit_decay(traj: &Trajectory) -> Result<DecayReport> {
    let skip = traj.times.len() / 10;
    let times = &traj.times[skip..];
    let mags: Vec<f64> = traj.magnitudes()[skip..].to_vec();
    if times.len() < 10 {
        return Err(Error::Degenerate(format!("{} samples after the transient; need 10", times.len())));
    }
    if mags.iter().all(|&m| m < RESIDUAL_FLOOR) {
        return Ok(DecayReport {
            model: DecayModel::Exponential,
            rate: 0.0,
            fit_quality: 1.0,
            t_dec: 0.0,
            exponential_fit: None,
            power_law_fit: None,
        });
    }
    let logs: Vec<f64> = mags.iter().map(|m| m.max(RESIDUAL_FLOOR).ln()).collect();
    let exponential = fit_line(times, &logs)?;

    let (lt, ly): (Vec<f64>, Vec<f64>) =
        times.iter().zip(&logs).filter(|(t, _)| **t > 0.0).map(|(t, y)| (t.ln(), *y)).unzip();
    let power = if lt.len() >= 2 { fit_line(&lt, &ly).ok() } else { None };

    let exp_ok = exponential.slope < 0.0 && exponential.r_squared >= MIN_FIT_QUALITY;
    let pow_ok = power.is_some_and(|p| p.slope < 0.0 && p.r_squared >= MIN_FIT_QUALITY);
    let pow_r2 = power.map_or(0.0, |p| p.r_squared);

    let (model, rate, fit_quality, t_dec) = if exp_ok && (!pow_ok || exponential.r_squared >= pow_r2) {
        let rate = -exponential.slope;
        (DecayModel::Exponential, rate, exponential.r_squared, 1.0 / rate)
    } else if pow_ok {
        (DecayModel::PowerLaw, -power.unwrap().slope, pow_r2, f64::INFINITY)
    } else {
        (DecayModel::None, 0.0, exponential.r_squared.max(pow_r2), f64::INFINITY)
    };
    Ok(DecayReport { model, rate, fit_quality, t_dec, exponential_fit: Some(exponential), power_law_fit: power })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_value: f64,
    pub passed: bool,
}

/// Minimum of the limiting classical density ρ(H, P).
pub fn verify_final_positivity(rho: &State) -> PositivityReport {
    let min_value = rho.to_classical_density().min();
    PositivityReport { min_value, passed: min_value >= -POSITIVITY_TOLERANCE }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralPoint;

    fn gauss(x: f64, mu: f64, s: f64) -> f64 {
        (-(x - mu).powi(2) / (2.0 * s * s)).exp()
    }

    const CENTER: f64 = 1.5;
    const SIGMA_D: f64 = 0.25;
    const SIGMA_B: f64 = 0.25;

    fn grid() -> SpectralGrid {
        SpectralGrid::energy(3.0, 301).unwrap()
    }

    fn observable(g: &SpectralGrid) -> Observable {
        Observable::from_fns(g, |_| Complex64::new(1.0, 0.0), |a, b| {
            Complex64::new(gauss(a.omega, CENTER, SIGMA_B) * gauss(b.omega, CENTER, SIGMA_B), 0.0)
        })
        .unwrap()
    }

    fn state(g: &SpectralGrid, family: KernelFamily) -> State {
        decohering_state(g, |x: &SpectralPoint| gauss(x.omega, CENTER, SIGMA_D), &family, 1.0).unwrap()
    }

    fn linear(end: f64, count: usize) -> Vec<f64> {
        TimeGrid::Linear { start: 0.0, end, count }.times().unwrap()
    }

    #[test]
    fn time_zero_is_bit_exact() {
        let g = grid();
        let rho = state(&g, KernelFamily::Lorentzian { gamma: 0.1 });
        let o = observable(&g);
        assert_eq!(evolve_pairing(&rho, &o, 0.0, 1.0).unwrap(), rho.pair(&o).unwrap());
    }

    #[test]
    fn stationary_state_is_time_independent() {
        let g = grid();
        let rho = State::stationary(&g, |x| gauss(x.omega, 1.0, 0.2)).unwrap();
        let o = observable(&g);
        let p0 = rho.pair(&o).unwrap();
        for t in [0.5, 3.0, 40.0, 1e4] {
            assert_eq!(evolve_pairing(&rho, &o, t, 0.7).unwrap(), p0);
        }
        assert_eq!(limit_pairing(&rho, &o).unwrap(), p0.re);
        let traj = residual_trajectory(&rho, &o, &linear(100.0, 50), 1.0).unwrap();
        assert!(traj.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        let single = residual_trajectory(&rho, &o, &[0.0], 1.0).unwrap();
        assert_eq!(single.values, vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn limit_of_identity_is_one() {
        let g = grid();
        let rho = state(&g, KernelFamily::Gaussian { width: 0.3 });
        assert!((limit_pairing(&rho, &Observable::identity(&g)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_rate_is_pole_distance_over_hbar() {
        let g = grid();
        let gamma = 0.1;
        let rho = state(&g, KernelFamily::Lorentzian { gamma });
        let o = observable(&g);
        for hbar in [1.0, 0.5] {
            let traj = residual_trajectory(&rho, &o, &linear(150.0 * hbar, 301), hbar).unwrap();
            let rep = fit_decay(&traj).unwrap();
            assert_eq!(rep.model, DecayModel::Exponential);
            let expect = gamma / hbar;
            assert!((rep.rate - expect).abs() < 0.05 * expect, "ℏ = {hbar}: rate {}", rep.rate);
            assert!((rep.t_dec - hbar / gamma).abs() < 0.05 * hbar / gamma);
        }
        // The discrete spectrum recurs after 2πℏ/Δω, so t = 200/γ needs a finer ω grid.
        let fine = SpectralGrid::energy(3.0, 1201).unwrap();
        let (rho, o) = (state(&fine, KernelFamily::Lorentzian { gamma }), observable(&fine));
        let late = evolve_pairing(&rho, &o, 200.0 / gamma, 1.0).unwrap();
        assert!((late - limit_pairing(&rho, &o).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn gaussian_kernel_gives_gaussian_decay() {
        // Oracle: the ν-profile of ρ(a,b)O(b,a) is exp(−ν²/2s_eff²) with
        // 1/s_eff² = 1/s² + 1/(2σ_e²), 1/σ_e² = 1/(2σ_d²) + 1/σ_b²; its
        // Fourier transform is ∝ exp(−s_eff² t²/2).
        let g = grid();
        let s = 0.3;
        let inv_e2 = 1.0 / (2.0 * SIGMA_D * SIGMA_D) + 1.0 / (SIGMA_B * SIGMA_B);
        let s_eff2 = 1.0 / (1.0 / (s * s) + inv_e2 / 2.0);
        let rho = state(&g, KernelFamily::Gaussian { width: s });
        let traj = residual_trajectory(&rho, &observable(&g), &linear(8.0, 81), 1.0).unwrap();
        let r0 = traj.values[0].norm();
        for (t, v) in traj.times.iter().zip(&traj.values) {
            let expect = r0 * (-s_eff2 * t * t / 2.0).exp();
            assert!((v.norm() - expect).abs() < 1e-6 * r0, "t = {t}");
        }
    }

    #[test]
    fn pole_free_kernel_is_not_exponential() {
        let g = grid();
        let rho = state(&g, KernelFamily::PoleFree { scale: 0.5 });
        let times = TimeGrid::Log { start: 1.0, end: 300.0, count: 120 }.times().unwrap();
        let rep = fit_decay(&residual_trajectory(&rho, &observable(&g), &times, 1.0).unwrap()).unwrap();
        assert_ne!(rep.model, DecayModel::Exponential);
        assert!(rep.t_dec.is_infinite());
        assert!(rep.exponential_fit.unwrap().r_squared < MIN_FIT_QUALITY);
    }

    #[test]
    fn residual_is_bounded_by_its_initial_value() {
        let g = grid();
        let o = observable(&g);
        for family in [
            KernelFamily::Lorentzian { gamma: 0.1 },
            KernelFamily::Gaussian { width: 0.3 },
            KernelFamily::PoleFree { scale: 0.5 },
        ] {
            let traj = residual_trajectory(&state(&g, family), &o, &linear(200.0, 401), 1.0).unwrap();
            let r0 = traj.values[0].norm();
            assert!(traj.magnitudes().iter().all(|&m| m <= r0 * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn window_maxima_decrease() {
        let g = grid();
        let o = observable(&g);
        for family in [KernelFamily::Lorentzian { gamma: 0.1 }, KernelFamily::PoleFree { scale: 0.5 }] {
            let m = window_maxima(&state(&g, family), &o, 1.0, 10.0, 4, 200).unwrap();
            assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
        }
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> Trajectory {
        let times = TimeGrid::Linear { start: 0.0, end: 40.0, count: 200 }.times().unwrap();
        let values = times.iter().map(|&t| Complex64::new(f(t), 0.0)).collect();
        Trajectory::new(times, values, 0.0).unwrap()
    }

    #[test]
    fn fit_decay_examples() {
        let rep = fit_decay(&synthetic(|t| (-0.25 * t).exp())).unwrap();
        assert_eq!(rep.model, DecayModel::Exponential);
        assert!((rep.rate - 0.25).abs() < 0.0025);
        assert!((rep.t_dec - 4.0).abs() < 0.04);

        let times = TimeGrid::Log { start: 1.0, end: 1000.0, count: 100 }.times().unwrap();
        let values = times.iter().map(|t| Complex64::new(1.0 / t, 0.0)).collect();
        let rep = fit_decay(&Trajectory::new(times, values, 0.0).unwrap()).unwrap();
        assert_eq!(rep.model, DecayModel::PowerLaw);
        assert!(rep.t_dec.is_infinite());
        assert!((rep.rate - 1.0).abs() < 1e-9);

        let rep = fit_decay(&synthetic(|_| 0.0)).unwrap();
        assert_eq!((rep.model, rep.rate, rep.t_dec), (DecayModel::Exponential, 0.0, 0.0));

        let rep = fit_decay(&synthetic(|t| 1.0 + 0.5 * (3.0 * t).sin())).unwrap();
        assert_eq!(rep.model, DecayModel::None);
        assert!(rep.t_dec.is_infinite());

        let short = TimeGrid::Linear { start: 0.0, end: 1.0, count: 10 }.times().unwrap();
        let traj = Trajectory::new(short.clone(), vec![Complex64::new(1.0, 0.0); 10], 0.0).unwrap();
        assert!(fit_decay(&traj).is_err());
    }

    #[test]
    fn final_positivity_examples() {
        let g = grid();
        let rep = verify_final_positivity(&state(&g, KernelFamily::Lorentzian { gamma: 0.1 }));
        assert!(rep.passed);
        let uniform = verify_final_positivity(&State::stationary(&g, |_| 2.0).unwrap());
        assert!(uniform.passed);
        assert!((uniform.min_value - 1.0 / 3.0 / (301.0 / 300.0)).abs() < 1e-12);
    }

    #[test]
    fn time_grids() {
        let t = TimeGrid::Log { start: 1.0, end: 100.0, count: 3 }.times().unwrap();
        assert!((t[1] - 10.0).abs() < 1e-12);
        assert!(TimeGrid::Log { start: 0.0, end: 1.0, count: 3 }.times().is_err());
        assert!(TimeGrid::Linear { start: 1.0, end: 1.0, count: 3 }.times().is_err());
        let families: Vec<KernelFamily> =
            serde_json::from_str(r#"[{"family":"lorentzian","gamma":0.1},{"family":"pole-free","scale":0.5}]"#).unwrap();
        assert_eq!(families[1], KernelFamily::PoleFree { scale: 0.5 });
        assert!(KernelFamily::Lorentzian { gamma: -1.0 }.validate().is_err());
        assert_eq!(KernelFamily::CustomPolynomial { coeffs: vec![1.0, 0.0, 2.0] }.profile(3.0), 19.0);
    }
}
