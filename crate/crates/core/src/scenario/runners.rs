// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Assertion, Curve, Findings, RunError, ScenarioConfig};
use crate::decoherence::{
    self, fit_decay, limit_pairing, residual_trajectory, window_maxima, DecayModel, KernelFamily,
};
use crate::moyal::{classical_limit_check, moyal_bracket, star_product, StarOrder};
use crate::phase_space::{integrate, Axis, Grid, PhaseFunction, INTERIOR_FRACTION};
use crate::regression::log_log_slope;
use crate::spectral::{symb_singular, Observable, PlaneWaveRealization, SpectralGrid};
use crate::states::{pair_regular_symbols, pair_singular_symbols, ClassicalDensity, Functional, State};
use crate::weyl::{self, OperatorKernel, WaveFunction};

const MOYAL_PRODUCT_SLOPE: (f64, f64) = (1.0, 0.15);
const MOYAL_BRACKET_SLOPE: (f64, f64) = (2.0, 0.2);
const QUADRATIC_TOLERANCE: f64 = 1e-8;
const NEGATIVITY_RELATIVE: f64 = 0.02;
const GROUND_STATE_FLOOR: f64 = -1e-6;
const NORMALISATION_TOLERANCE: f64 = 1e-5;
const PAIRING_RELATIVE: f64 = 1e-4;
const BOX_SLOPE: (f64, f64) = (1.0, 0.1);
const BOX_INDEPENDENCE: f64 = 1e-10;
const DUALITY_RELATIVE: f64 = 1e-14;
const RATE_RELATIVE: f64 = 0.05;
const MIN_EXPONENTIAL_R2: f64 = 0.99;
const MAX_POLEFREE_R2: f64 = 0.9;
const WEAK_LIMIT_RELATIVE: f64 = 1e-3;
const WEAK_LIMIT_MULTIPLES: [f64; 4] = [10.0, 20.0, 50.0, 100.0];
const HBAR_SCALING_RELATIVE: f64 = 0.1;

fn gauss(x: f64, mu: f64, s: f64) -> f64 {
    (-(x - mu).powi(2) / (2.0 * s * s)).exp()
}

fn phase_grid(cfg: &ScenarioConfig) -> Result<(Axis, Grid), RunError> {
    let ps = &cfg.phase_space;
    let q = Axis::new(ps.q_min, ps.q_max, ps.q_count)?;
    let p = Axis::new(ps.p_min, ps.p_max, ps.p_count)?;
    Ok((q, Grid::plane(q, p)?))
}

fn first_hbar(cfg: &ScenarioConfig) -> f64 {
    cfg.hbar.values()[0]
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub(super) fn moyal_convergence(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let (_, grid) = phase_grid(cfg)?;
    let order = StarOrder::new(cfg.moyal.order)?;
    let monomial = |[a, b]: [u32; 2], label: &str| {
        PhaseFunction::from_real_fn(&grid, label, move |x| x.q()[0].powi(a as i32) * x.p()[0].powi(b as i32))
    };
    let f = monomial(cfg.moyal.f, "f")?;
    let g = monomial(cfg.moyal.g, "g")?;
    let hbars = cfg.hbar.values();
    let report = classical_limit_check(&f, &g, &hbars, order)?;

    let mut assertions = Vec::new();
    let slope = |s: Option<crate::regression::LineFit>| s.map_or(f64::NAN, |l| l.slope);
    assertions.push(Assertion::within(
        "product_slope",
        slope(report.product_slope),
        MOYAL_PRODUCT_SLOPE.0,
        MOYAL_PRODUCT_SLOPE.1,
    ));
    assertions.push(Assertion::within(
        "bracket_slope",
        slope(report.bracket_slope),
        MOYAL_BRACKET_SLOPE.0,
        MOYAL_BRACKET_SLOPE.1,
    ));

    let h = cfg.moyal.quadratic_hbar;
    let quad_order = StarOrder::new(order.get().max(2))?;
    let ham = PhaseFunction::from_real_fn(&grid, "H", |x| 0.5 * (x.q()[0].powi(2) + x.p()[0].powi(2)))?;
    let q = PhaseFunction::from_real_fn(&grid, "q", |x| x.q()[0])?;
    let minus_p = PhaseFunction::from_real_fn(&grid, "-p", |x| -x.p()[0])?;
    let bracket_err = moyal_bracket(&ham, &q, h, quad_order)?.sub(&minus_p)?.max_abs_interior(INTERIOR_FRACTION);
    let hh_exact = ham.mul(&ham)?.map(|v| v - h * h / 4.0);
    let product_err = star_product(&ham, &ham, h, quad_order)?.sub(&hh_exact)?.max_abs_interior(INTERIOR_FRACTION);
    assertions.push(Assertion::at_most("quadratic_bracket_error", bracket_err, QUADRATIC_TOLERANCE));
    assertions.push(Assertion::at_most("quadratic_product_error", product_err, QUADRATIC_TOLERANCE));

    let mut curve = Curve::new("moyal_convergence.csv", &["hbar", "product_error", "bracket_error"]);
    for ((h, pe), be) in hbars.iter().zip(&report.product_errors).zip(&report.bracket_errors) {
        curve.push(vec![*h, *pe, *be]);
    }
    Ok(Findings {
        assertions,
        results: json!({
            "convergence": report,
            "quadratic": { "hbar": h, "bracket_error": bracket_err, "product_error": product_err },
        }),
        curves: vec![curve],
    })
}

pub(super) fn wigner_negativity(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let hbar = first_hbar(cfg);
    let (q_axis, grid) = phase_grid(cfg)?;
    let psi0 = WaveFunction::oscillator_eigenstate(q_axis, 0, hbar)?;
    let psi1 = WaveFunction::oscillator_eigenstate(q_axis, 1, hbar)?;
    let w0 = weyl::wigner_of_pure_state(&psi0, hbar, &grid)?;
    let w1 = weyl::wigner_of_pure_state(&psi1, hbar, &grid)?;
    let target = -1.0 / (PI * hbar);
    let min_w1 = w1.min_re();
    let min_w0 = w0.min_re();
    let norm0 = integrate(&w0)?.re;
    let marginal = weyl::q_marginal(&w1)?;
    let min_marginal = marginal.iter().copied().fold(f64::INFINITY, f64::min);

    let spec = SpectralGrid::energy(cfg.spectral.omega_max, cfg.spectral.omega_count)?;
    let pr = &cfg.profile;
    let state = decoherence::decohering_state(&spec, |x| gauss(x.omega, pr.center, pr.width), &cfg.kernel, pr.amplitude)?;
    let positivity = decoherence::verify_final_positivity(&state);

    let assertions = vec![
        Assertion::within("excited_min_wigner", min_w1, target, NEGATIVITY_RELATIVE * target.abs()),
        Assertion::holds("pre_decoherence_negativity", min_w1 < 0.0),
        Assertion::at_least("ground_min_wigner", min_w0, GROUND_STATE_FLOOR),
        Assertion::within("ground_normalisation", norm0, 1.0, NORMALISATION_TOLERANCE),
        Assertion::at_least("excited_min_marginal", min_marginal, GROUND_STATE_FLOOR),
        Assertion::holds("limit_positivity", positivity.passed),
    ];

    let p_zero = (0..grid.axis(1).count)
        .min_by(|&a, &b| grid.axis(1).point(a).abs().total_cmp(&grid.axis(1).point(b).abs()))
        .unwrap_or(0);
    let mut slice = Curve::new("wigner_slice.csv", &["q", "ground", "excited"]);
    let mut marg = Curve::new("marginal.csv", &["q", "excited_marginal", "excited_density"]);
    let density = psi1.density();
    for i in 0..q_axis.count {
        slice.push(vec![q_axis.point(i), w0.value_at(&[i, p_zero]).re, w1.value_at(&[i, p_zero]).re]);
        marg.push(vec![q_axis.point(i), marginal[i], density[i]]);
    }
    Ok(Findings {
        assertions,
        results: json!({
            "hbar": hbar,
            "min_w_excited": min_w1,
            "min_w_expected": target,
            "min_w_ground": min_w0,
            "ground_integral": norm0,
            "min_marginal_excited": min_marginal,
            "pre_decoherence_negativity": min_w1 < 0.0,
            "limit_positivity": positivity,
        }),
        curves: vec![slice, marg],
    })
}

/// Smooth real-symmetric regular observable used in the pairing comparison.
fn smooth_regular_observable(spec: &SpectralGrid, offset: f64) -> Result<Observable, RunError> {
    Ok(Observable::from_fns(spec, |_| Complex64::new(0.0, 0.0), |a, b| {
        let (k, l) = (a.omega - offset, b.omega - offset);
        Complex64::new((-(k * k + l * l) / 4.0).exp() * (-(k - l).powi(2) / 2.0).exp(), 0.0)
    })?)
}

pub(super) fn pairing_equivalence(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let hbar = first_hbar(cfg);
    let (q_axis, grid) = phase_grid(cfg)?;
    let sp = &cfg.spectral;
    let spec = SpectralGrid::energy(sp.omega_max, sp.omega_count)?;
    let model = PlaneWaveRealization::new(sp.omega_offset);
    let mut assertions = Vec::new();

    // Three routes to Tr(ρ̂Ô) for ρ̂ = |ψ⟩⟨ψ|.
    let pk = &cfg.packet;
    let psi = WaveFunction::gaussian(q_axis, pk.sigma, pk.q0, pk.k0, hbar)?.normalized()?;
    let c = model.amplitudes(&psi, &spec, hbar)?;
    let rank_one = Array2::from_shape_fn((spec.len(), spec.len()), |(a, b)| c[a] * c[b].conj());
    let rho = Functional::from_parts(spec.clone(), vec![Complex64::new(0.0, 0.0); spec.len()], rank_one)?;
    let obs = smooth_regular_observable(&spec, sp.omega_offset)?;
    let spectral_value = rho.pair(&obs)?;
    let obs_kernel = model.position_kernel(&spec, obs.regular(), q_axis, hbar)?;
    let phase_value = pair_regular_symbols(
        &weyl::wigner_of_pure_state(&psi, hbar, &grid)?,
        &weyl::wigner_of_kernel(&obs_kernel, hbar, &grid)?,
    )?;
    let kernel_value = OperatorKernel::projector(&psi).trace_pairing(&obs_kernel)?;
    assertions.push(Assertion::at_most("spectral_vs_kernel", relative(spectral_value, kernel_value), PAIRING_RELATIVE));
    assertions.push(Assertion::at_most("phase_space_vs_kernel", relative(phase_value, kernel_value), PAIRING_RELATIVE));
    assertions.push(Assertion::at_most("spectral_vs_phase_space", relative(spectral_value, phase_value), PAIRING_RELATIVE));

    // Singular ⊗ singular over growing q boxes.
    let pr = &cfg.profile;
    let density = ClassicalDensity::from_fn(&spec, |x| gauss(x.omega, pr.center, pr.width))?;
    let sing_obs = Observable::singular_only(&spec, |x| Complex64::new(gauss(x.omega, pr.center, pr.observable_width), 0.0))?;
    let p_axis = *grid.axis(1);
    let mut boxes = Curve::new("singular_boxes.csv", &["box_length", "full_phase_space", "momentum_space"]);
    let (mut lengths, mut full, mut momentum) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..=cfg.boxes.doublings {
        let length = cfg.boxes.base_length * 2f64.powi(k as i32);
        let box_grid = Grid::plane(Axis::new(-length / 2.0, length / 2.0, cfg.boxes.q_count)?, p_axis)?;
        let map = model.momentum_map(&box_grid)?;
        let rho_s = PhaseFunction::from_values(
            box_grid.clone(),
            map.compose(&spec, density.values())?.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            "rho_S",
        )?;
        let o_s = symb_singular(&sing_obs, &map)?;
        let whole = integrate(&rho_s.mul(&o_s)?)?.re;
        let reduced = pair_singular_symbols(&density, &sing_obs)?.re;
        boxes.push(vec![length, whole, reduced]);
        lengths.push(length);
        full.push(whole);
        momentum.push(reduced);
    }
    let box_fit = log_log_slope(&lengths, &full)?;
    let spread = momentum.iter().map(|m| (m - momentum[0]).abs()).fold(0.0, f64::max);
    assertions.push(Assertion::within("full_integral_box_slope", box_fit.slope, BOX_SLOPE.0, BOX_SLOPE.1));
    assertions.push(Assertion::at_most("momentum_integral_box_spread", spread, BOX_INDEPENDENCE));

    let duality = duality_errors(sp.omega_max, cfg.random.duality_count)?;
    assertions.push(Assertion::at_most("singular_duality_error", duality.singular, DUALITY_RELATIVE));
    assertions.push(Assertion::at_most("regular_duality_error", duality.regular, DUALITY_RELATIVE));
    assertions.push(Assertion::at_most("cross_pairing_max", duality.cross, 0.0));

    Ok(Findings {
        assertions,
        results: json!({
            "hbar": hbar,
            "pairing": {
                "spectral": [spectral_value.re, spectral_value.im],
                "phase_space": [phase_value.re, phase_value.im],
                "kernel_trace": [kernel_value.re, kernel_value.im],
            },
            "singular_boxes": {
                "lengths": lengths,
                "full_phase_space": full,
                "momentum_space": momentum,
                "slope": box_fit,
            },
            "duality": {
                "count": cfg.random.duality_count,
                "singular_relative_error": duality.singular,
                "regular_relative_error": duality.regular,
                "cross_max": duality.cross,
            },
        }),
        curves: vec![boxes],
    })
}

struct DualityErrors {
    singular: f64,
    regular: f64,
    cross: f64,
}

/// Largest relative deviation from the scaled Kronecker deltas, and the
/// largest singular↔regular cross pairing, over every basis pair.
fn duality_errors(omega_max: f64, count: usize) -> Result<DualityErrors, RunError> {
    let g = SpectralGrid::energy(omega_max, count)?;
    let n = g.len();
    let cell = g.cell();
    let dev = |v: Complex64, expect: f64| {
        if expect == 0.0 { v.norm() } else { (v - expect).norm() / expect }
    };
    let sing_ops: Vec<Observable> = (0..n).map(|m| Observable::singular_basis(&g, m)).collect();
    let reg_ops: Vec<Observable> = (0..n * n).map(|i| Observable::regular_basis(&g, i / n, i % n)).collect();
    let (mut singular, mut regular, mut cross) = (0.0f64, 0.0f64, 0.0f64);
    for m in 0..n {
        let f = Functional::singular_basis(&g, m);
        for (k, op) in sing_ops.iter().enumerate() {
            singular = singular.max(dev(f.pair(op)?, if k == m { 1.0 / cell } else { 0.0 }));
        }
        for op in &reg_ops {
            cross = cross.max(f.pair(op)?.norm());
        }
    }
    for i in 0..n * n {
        let f = Functional::regular_basis(&g, i / n, i % n);
        for (j, op) in reg_ops.iter().enumerate() {
            regular = regular.max(dev(f.pair(op)?, if i == j { 1.0 / (cell * cell) } else { 0.0 }));
        }
        for op in &sing_ops {
            cross = cross.max(f.pair(op)?.norm());
        }
    }
    Ok(DualityErrors { singular, regular, cross })
}

/// State with a coherent regular part plus the observable B(ω)B(ω′) ⊕ 1.
fn decoherence_setup(cfg: &ScenarioConfig) -> Result<(State, Observable), RunError> {
    let spec = SpectralGrid::energy(cfg.spectral.omega_max, cfg.spectral.omega_count)?;
    let pr = &cfg.profile;
    let state = decoherence::decohering_state(&spec, |x| gauss(x.omega, pr.center, pr.width), &cfg.kernel, pr.amplitude)?;
    let obs = Observable::from_fns(&spec, |_| Complex64::new(1.0, 0.0), |a, b| {
        Complex64::new(gauss(a.omega, pr.center, pr.observable_width) * gauss(b.omega, pr.center, pr.observable_width), 0.0)
    })?;
    Ok((state, obs))
}

fn residual_curve(hbar: f64, traj: &decoherence::Trajectory) -> Curve {
    let mut curve = Curve::new(format!("residual_hbar_{hbar}.csv"), &["t", "re", "im", "abs"]);
    for (t, v) in traj.times.iter().zip(&traj.values) {
        curve.push(vec![*t, v.re, v.im, v.norm()]);
    }
    curve
}

pub(super) fn decoherence_lorentzian(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let KernelFamily::Lorentzian { gamma } = cfg.kernel else {
        return Err(RunError::Validation(format!(
            "decoherence-lorentzian needs a lorentzian kernel, got {}",
            cfg.kernel.name()
        )));
    };
    let (state, obs) = decoherence_setup(cfg)?;
    let limit = limit_pairing(&state, &obs)?;
    let r0 = (decoherence::evolve_pairing(&state, &obs, 0.0, 1.0)? - limit).norm();
    let mut assertions = Vec::new();
    let mut curves = Vec::new();
    let mut runs = Vec::new();
    let mut scaled_rates = Vec::new();
    for hbar in cfg.hbar.values() {
        let traj = residual_trajectory(&state, &obs, &cfg.times(hbar)?, hbar)?;
        let fit = fit_decay(&traj)?;
        let expect = gamma / hbar;
        let tag = |s: &str| format!("{s}[hbar={hbar}]");
        assertions.push(Assertion::holds(&tag("model_exponential"), fit.model == DecayModel::Exponential));
        assertions.push(Assertion::above(&tag("exponential_r2"), fit.fit_quality, MIN_EXPONENTIAL_R2));
        assertions.push(Assertion::within(&tag("fitted_rate"), fit.rate, expect, RATE_RELATIVE * expect));

        let t_dec = if fit.model == DecayModel::Exponential { fit.t_dec } else { hbar / gamma };
        let mut late = Vec::new();
        for m in WEAK_LIMIT_MULTIPLES {
            late.push((m * t_dec, (decoherence::evolve_pairing(&state, &obs, m * t_dec, hbar)? - limit).norm()));
        }
        for (t, v) in traj.times.iter().zip(&traj.values) {
            if *t >= 10.0 * t_dec {
                late.push((*t, v.norm()));
            }
        }
        let worst = late.iter().map(|p| p.1).fold(0.0, f64::max);
        assertions.push(Assertion::below(&tag("weak_limit_residual"), worst, WEAK_LIMIT_RELATIVE * limit.abs()));
        let peak = traj.magnitudes().into_iter().fold(0.0, f64::max);
        assertions.push(Assertion::at_most(&tag("residual_bounded_by_initial"), peak, r0 * (1.0 + 1e-12)));

        scaled_rates.push(fit.rate * hbar);
        runs.push(json!({
            "hbar": hbar,
            "expected_rate": expect,
            "fit": fit,
            "weak_limit_max_residual": worst,
            "weak_limit_samples": late.len(),
        }));
        curves.push(residual_curve(hbar, &traj));
    }
    if scaled_rates.len() >= 2 {
        let mean = scaled_rates.iter().sum::<f64>() / scaled_rates.len() as f64;
        let spread = scaled_rates.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max);
        assertions.push(Assertion::at_most("rate_times_hbar_spread", spread, HBAR_SCALING_RELATIVE));
    }
    let identity_limit = limit_pairing(&state, &Observable::identity(state.grid()))?;
    assertions.push(Assertion::within("identity_limit", identity_limit, 1.0, 1e-12));
    Ok(Findings {
        assertions,
        results: json!({
            "gamma": gamma,
            "limit_pairing": limit,
            "initial_residual": r0,
            "fitted_rate": runs[0]["fit"]["rate"],
            "runs": runs,
        }),
        curves,
    })
}

pub(super) fn decoherence_polefree(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let (state, obs) = decoherence_setup(cfg)?;
    let limit = limit_pairing(&state, &obs)?;
    let mut assertions = Vec::new();
    let mut curves = Vec::new();
    let mut runs = Vec::new();
    for hbar in cfg.hbar.values() {
        let times = cfg.times(hbar)?;
        let traj = residual_trajectory(&state, &obs, &times, hbar)?;
        let fit = fit_decay(&traj)?;
        let exp_r2 = fit.exponential_fit.map_or(0.0, |f| f.r_squared);
        let tag = |s: &str| format!("{s}[hbar={hbar}]");
        assertions.push(Assertion::holds(&tag("model_not_exponential"), fit.model != DecayModel::Exponential));
        assertions.push(Assertion::below(&tag("exponential_r2"), exp_r2, MAX_POLEFREE_R2));
        assertions.push(Assertion::holds(&tag("t_dec_infinite"), fit.t_dec.is_infinite()));

        let maxima = window_maxima(&state, &obs, hbar, 10.0 * hbar, 4, 200)?;
        assertions.push(Assertion::holds(&tag("window_maxima_decreasing"), maxima.windows(2).all(|w| w[1] < w[0])));
        runs.push(json!({
            "hbar": hbar,
            "fit": fit,
            "window_start": 10.0 * hbar,
            "window_maxima": maxima,
        }));
        curves.push(residual_curve(hbar, &traj));
    }
    Ok(Findings {
        assertions,
        results: json!({ "kernel": cfg.kernel, "limit_pairing": limit, "runs": runs }),
        curves,
    })
}

/// One randomly drawn admissible state and the pure state behind its
/// regular part.
pub(crate) struct RandomState {
    pub state: State,
    pub psi: WaveFunction,
}

/// Diagonal: a positive Gaussian mixture in ω. Regular part:
/// amplitude·c(ω)conj(c(ω′)) with c the spectral amplitudes of a random
/// superposition of oscillator levels 0..=max_level.
pub(crate) fn random_state(
    rng: &mut ChaCha8Rng,
    cfg: &ScenarioConfig,
    spec: &SpectralGrid,
    q_axis: Axis,
    hbar: f64,
) -> Result<RandomState, RunError> {
    let sp = &cfg.spectral;
    let half = 0.25 * sp.omega_max;
    let comps: Vec<(f64, f64, f64)> = (0..cfg.random.mixture_components)
        .map(|_| {
            (
                rng.random_range(0.1..1.0),
                rng.random_range(sp.omega_offset - half..sp.omega_offset + half),
                rng.random_range(0.05..0.15) * sp.omega_max,
            )
        })
        .collect();
    let diagonal: Vec<f64> = (0..spec.len())
        .map(|m| comps.iter().map(|&(w, mu, s)| w * gauss(spec.omega(m), mu, s)).sum())
        .collect();

    let coeffs: Vec<Complex64> = (0..=cfg.random.max_level)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let levels = (0..=cfg.random.max_level)
        .map(|n| WaveFunction::oscillator_eigenstate(q_axis, n, hbar))
        .collect::<crate::Result<Vec<_>>>()?;
    let values = (0..q_axis.count)
        .map(|i| coeffs.iter().zip(&levels).map(|(c, l)| c * l.values()[i]).sum())
        .collect();
    let psi = WaveFunction::new(q_axis, values)?.normalized()?;
    let c = PlaneWaveRealization::new(sp.omega_offset).amplitudes(&psi, spec, hbar)?;
    let amp = cfg.profile.amplitude;
    let regular = Array2::from_shape_fn((spec.len(), spec.len()), |(a, b)| c[a] * c[b].conj() * amp);
    let state = State::from_parts(spec.clone(), diagonal, regular)?;
    Ok(RandomState { state, psi })
}

pub(super) fn limit_positivity(cfg: &ScenarioConfig) -> Result<Findings, RunError> {
    let hbar = first_hbar(cfg);
    let (q_axis, grid) = phase_grid(cfg)?;
    let spec = SpectralGrid::energy(cfg.spectral.omega_max, cfg.spectral.omega_count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut curve = Curve::new("positivity.csv", &["index", "limit_density_min", "wigner_min"]);
    let (mut all_positive, mut any_negative) = (true, false);
    let mut worst_density = f64::INFINITY;
    let mut most_negative = f64::INFINITY;
    for i in 0..cfg.random.states {
        let draw = random_state(&mut rng, cfg, &spec, q_axis, hbar)?;
        let report = decoherence::verify_final_positivity(&draw.state);
        let w_min = weyl::wigner_of_pure_state(&draw.psi, hbar, &grid)?.min_re();
        all_positive &= report.passed;
        any_negative |= w_min < 0.0;
        worst_density = worst_density.min(report.min_value);
        most_negative = most_negative.min(w_min);
        curve.push(vec![i as f64, report.min_value, w_min]);
    }
    let assertions = vec![
        Assertion::holds("all_limits_positive", all_positive),
        Assertion::holds("some_wigner_negative", any_negative),
    ];
    Ok(Findings {
        assertions,
        results: json!({
            "hbar": hbar,
            "states": cfg.random.states,
            "min_limit_density": worst_density,
            "min_wigner": most_negative,
        }),
        curves: vec![curve],
    })
}
