// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cslimit::decoherence::{
    decohering_state, evolve_pairing, fit_decay, limit_pairing, residual_trajectory, verify_final_positivity,
    DecayModel, KernelFamily, TimeGrid,
};
use cslimit::moyal::{classical_limit_check, moyal_bracket, star_product, StarOrder};
use cslimit::phase_space::{integrate, Axis, Grid, PhaseFunction, INTERIOR_FRACTION};
use cslimit::regression::log_log_slope;
use cslimit::spectral::{symb_singular, Observable, PlaneWaveRealization, SpectralGrid};
use cslimit::states::{pair_regular_symbols, pair_singular_symbols, ClassicalDensity, Functional, State};
use cslimit::weyl::{self, OperatorKernel, WaveFunction};
use cslimit::Complex64;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn gauss(x: f64, mu: f64, s: f64) -> f64 {
    (-(x - mu).powi(2) / (2.0 * s * s)).exp()
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg) }
}

fn real(grid: &Grid, label: &str, f: impl Fn(f64, f64) -> f64) -> PhaseFunction {
    PhaseFunction::from_real_fn(grid, label, |x| f(x.q()[0], x.p()[0])).unwrap()
}

fn moyal_classical_limits() -> Check {
    let grid = Grid::cube(1, -2.0, 2.0, 161).map_err(|e| e.to_string())?;
    let f = real(&grid, "q³", |q, _| q.powi(3));
    let g = real(&grid, "p³", |_, p| p.powi(3));
    let hbars = [0.4, 0.2, 0.1];
    let rep = classical_limit_check(&f, &g, &hbars, StarOrder::new(6).unwrap()).map_err(|e| e.to_string())?;
    let ps = rep.product_slope.ok_or("product reported exact")?.slope;
    let bs = rep.bracket_slope.ok_or("bracket reported exact")?.slope;
    ensure((ps - 1.0).abs() <= 0.15, format!("product slope {ps}"))?;
    ensure((bs - 2.0).abs() <= 0.2, format!("bracket slope {bs}"))?;
    // Hand expansion: only B₁ and B₃ survive in the bracket and
    // {q³, p³}_mb − {q³, p³}_pb = −(3/2)ℏ² identically.
    for (h, e) in hbars.iter().zip(&rep.bracket_errors) {
        ensure((e - 1.5 * h * h).abs() < 1e-6, format!("bracket error {e} at ℏ = {h}, expected {}", 1.5 * h * h))?;
    }
    Ok(format!("product slope {ps:.4}, bracket slope {bs:.4}"))
}

fn quadratic_exactness() -> Check {
    let grid = Grid::cube(1, -2.0, 2.0, 161).map_err(|e| e.to_string())?;
    let h = 0.5;
    let order = StarOrder::new(2).unwrap();
    let ham = real(&grid, "H", |q, p| 0.5 * (q * q + p * p));
    let q = real(&grid, "q", |q, _| q);
    let bracket = moyal_bracket(&ham, &q, h, order).map_err(|e| e.to_string())?;
    let be = bracket.sub(&real(&grid, "-p", |_, p| -p)).unwrap().max_abs_interior(INTERIOR_FRACTION);
    let hh = star_product(&ham, &ham, h, order).map_err(|e| e.to_string())?;
    let expect = real(&grid, "H² − ℏ²/4", |q, p| (0.5 * (q * q + p * p)).powi(2) - h * h / 4.0);
    let pe = hh.sub(&expect).unwrap().max_abs_interior(INTERIOR_FRACTION);
    ensure(be <= 1e-8, format!("{{H, q}}_mb error {be:e}"))?;
    ensure(pe <= 1e-8, format!("H ⋆ H error {pe:e}"))?;
    Ok(format!("bracket error {be:.1e}, product error {pe:.1e}"))
}

fn wigner_negativity() -> Check {
    let q = Axis::new(-6.0, 6.0, 129).unwrap();
    let grid = Grid::plane(q, Axis::new(-6.0, 6.0, 129).unwrap()).unwrap();
    let w1 = weyl::wigner_of_pure_state(&WaveFunction::oscillator_eigenstate(q, 1, 1.0).unwrap(), 1.0, &grid)
        .map_err(|e| e.to_string())?;
    let w0 = weyl::wigner_of_pure_state(&WaveFunction::oscillator_eigenstate(q, 0, 1.0).unwrap(), 1.0, &grid)
        .map_err(|e| e.to_string())?;
    let min1 = w1.min_re();
    let min0 = w0.min_re();
    let norm = integrate(&w0).unwrap().re;
    ensure((min1 + 1.0 / PI).abs() <= 0.02 / PI, format!("excited min W = {min1}"))?;
    ensure(min0 >= -1e-6, format!("ground min W = {min0}"))?;
    ensure((norm - 1.0).abs() <= 1e-5, format!("ground ∫W = {norm}"))?;
    // Laguerre form (1/π)(2(q²+p²) − 1)e^{−(q²+p²)}.
    let oracle = real(&grid, "W₁", |q, p| (2.0 * (q * q + p * p) - 1.0) * (-(q * q + p * p)).exp() / PI);
    let dev = w1.sub(&oracle).unwrap().max_abs();
    ensure(dev < 1e-5, format!("excited W deviates from the Laguerre form by {dev:e}"))?;
    Ok(format!("min W₁ = {min1:.6} (−1/π = {:.6}), min W₀ = {min0:.1e}, ∫W₀ = {norm:.8}", -1.0 / PI))
}

fn pairing_equivalence() -> Check {
    let hbar = 1.0;
    let (sigma, q0, k0, offset) = (1.0, 0.5, 0.3, 8.0);
    let spec = SpectralGrid::energy(16.0, 161).unwrap();
    let model = PlaneWaveRealization::new(offset);
    let q = Axis::new(-8.0, 8.0, 201).unwrap();
    let grid = Grid::plane(q, Axis::new(-7.0, 7.0, 141).unwrap()).unwrap();
    let o_kernel = |k: f64, l: f64| (-(k * k + l * l) / 4.0).exp() * (-(k - l).powi(2) / 2.0).exp();

    let psi = WaveFunction::gaussian(q, sigma, q0, k0, hbar).unwrap();
    let c = model.amplitudes(&psi, &spec, hbar).map_err(|e| e.to_string())?;
    let rho = Array2::from_shape_fn((spec.len(), spec.len()), |(a, b)| c[a] * c[b].conj());
    let rho = Functional::from_parts(spec.clone(), vec![Complex64::new(0.0, 0.0); spec.len()], rho).unwrap();
    let obs = Observable::from_fns(&spec, |_| Complex64::new(0.0, 0.0), |a, b| {
        Complex64::new(o_kernel(a.omega - offset, b.omega - offset), 0.0)
    })
    .unwrap();

    let spectral = rho.pair(&obs).map_err(|e| e.to_string())?;
    let k_o = model.position_kernel(&spec, obs.regular(), q, hbar).map_err(|e| e.to_string())?;
    let phase = pair_regular_symbols(
        &weyl::wigner_of_pure_state(&psi, hbar, &grid).map_err(|e| e.to_string())?,
        &weyl::wigner_of_kernel(&k_o, hbar, &grid).map_err(|e| e.to_string())?,
    )
    .unwrap();
    let trace = OperatorKernel::projector(&psi).trace_pairing(&k_o).unwrap();

    // Independent oracle: c(k) = ⟨k|ψ⟩ in closed form, then a fine double
    // quadrature of ∫∫ c(k) conj(c(k′)) O(k′, k) dk dk′.
    let ck = |k: f64| {
        let amp = (PI * sigma * sigma).powf(-0.25) * sigma / hbar.sqrt();
        Complex64::from_polar(amp * (-(sigma * (k - k0) / hbar).powi(2) / 2.0).exp(), -(k - k0) * q0 / hbar)
    };
    let dk = 0.02;
    let ks: Vec<f64> = (0..=800).map(|i| -8.0 + i as f64 * dk).collect();
    let cs: Vec<Complex64> = ks.iter().map(|&k| ck(k)).collect();
    let mut oracle = Complex64::new(0.0, 0.0);
    for (i, &k) in ks.iter().enumerate() {
        for (j, &l) in ks.iter().enumerate() {
            oracle += cs[i] * cs[j].conj() * o_kernel(l, k);
        }
    }
    oracle *= dk * dk;

    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let worst = rel(spectral, trace).max(rel(phase, trace)).max(rel(spectral, phase));
    ensure(worst <= 1e-4, format!("routes disagree: spectral {spectral}, phase space {phase}, trace {trace}"))?;
    ensure(rel(spectral, oracle) <= 1e-6, format!("spectral {spectral} vs closed form {oracle}"))?;
    Ok(format!("Tr(ρO) = {:.10}, max relative spread {worst:.1e}", trace.re))
}

fn decoherence_setup(family: KernelFamily, count: usize) -> (State, Observable) {
    let spec = SpectralGrid::energy(3.0, count).unwrap();
    let state = decohering_state(&spec, |x| gauss(x.omega, 1.5, 0.25), &family, 1.0).unwrap();
    let obs = Observable::from_fns(&spec, |_| Complex64::new(1.0, 0.0), |a, b| {
        Complex64::new(gauss(a.omega, 1.5, 0.25) * gauss(b.omega, 1.5, 0.25), 0.0)
    })
    .unwrap();
    (state, obs)
}

fn decoherence_law() -> Check {
    let gamma = 0.1;
    let (state, obs) = decoherence_setup(KernelFamily::Lorentzian { gamma }, 1201);
    let mut notes = Vec::new();
    for hbar in [1.0, 0.5] {
        let times = TimeGrid::Linear { start: 0.0, end: 150.0 * hbar, count: 301 }.times().unwrap();
        let fit = fit_decay(&residual_trajectory(&state, &obs, &times, hbar).unwrap()).unwrap();
        let expect = gamma / hbar;
        ensure(fit.model == DecayModel::Exponential, format!("ℏ = {hbar}: model {:?}", fit.model))?;
        ensure(fit.fit_quality > 0.99, format!("ℏ = {hbar}: R² = {}", fit.fit_quality))?;
        ensure((fit.rate - expect).abs() <= 0.05 * expect, format!("ℏ = {hbar}: rate {} vs {expect}", fit.rate))?;
        notes.push(format!("ℏ={hbar}: rate {:.5} (γ/ℏ = {expect})", fit.rate));
    }
    let (state, obs) = decoherence_setup(KernelFamily::PoleFree { scale: 0.5 }, 601);
    let times = TimeGrid::Log { start: 1.0, end: 300.0, count: 120 }.times().unwrap();
    let fit = fit_decay(&residual_trajectory(&state, &obs, &times, 1.0).unwrap()).unwrap();
    let exp_r2 = fit.exponential_fit.map_or(0.0, |f| f.r_squared);
    ensure(fit.model != DecayModel::Exponential, "pole-free kernel classified exponential".into())?;
    ensure(exp_r2 < 0.9, format!("pole-free exponential R² = {exp_r2}"))?;
    notes.push(format!("pole-free: {:?}, exponential R² {exp_r2:.3}", fit.model));
    Ok(notes.join("; "))
}

fn weak_limit() -> Check {
    let gamma = 0.1;
    let (state, obs) = decoherence_setup(KernelFamily::Lorentzian { gamma }, 1201);
    let limit = limit_pairing(&state, &obs).unwrap();
    let mut worst: f64 = 0.0;
    for hbar in [1.0, 0.5] {
        let t_dec = hbar / gamma;
        for m in [10.0, 15.0, 20.0, 50.0, 100.0] {
            let r = (evolve_pairing(&state, &obs, m * t_dec, hbar).unwrap() - limit).norm();
            worst = worst.max(r / limit.abs());
        }
    }
    ensure(worst < 1e-3, format!("relative residual {worst:e} past 10 t_dec"))?;
    Ok(format!("limit {limit:.6}, max relative residual past 10 t_dec {worst:.1e}"))
}

fn final_positivity() -> Check {
    let hbar = 1.0;
    let offset = 8.0;
    let spec = SpectralGrid::energy(16.0, 161).unwrap();
    let model = PlaneWaveRealization::new(offset);
    let q = Axis::new(-6.0, 6.0, 129).unwrap();
    let grid = Grid::plane(q, Axis::new(-6.0, 6.0, 129).unwrap()).unwrap();
    let levels: Vec<WaveFunction> = (0..4).map(|n| WaveFunction::oscillator_eigenstate(q, n, hbar).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut negative = 0;
    let mut min_density = f64::INFINITY;
    for _ in 0..20 {
        let comps: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(0.1..1.0), rng.random_range(4.0..12.0), rng.random_range(0.5..2.0)))
            .collect();
        let diagonal: Vec<f64> = (0..spec.len())
            .map(|m| comps.iter().map(|&(w, mu, s)| w * gauss(spec.omega(m), mu, s)).sum())
            .collect();
        let coeffs: Vec<Complex64> =
            (0..4).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let values = (0..q.count).map(|i| coeffs.iter().zip(&levels).map(|(c, l)| c * l.values()[i]).sum()).collect();
        let psi = WaveFunction::new(q, values).unwrap().normalized().unwrap();
        let c = model.amplitudes(&psi, &spec, hbar).unwrap();
        let regular = Array2::from_shape_fn((spec.len(), spec.len()), |(a, b)| c[a] * c[b].conj() * 0.5);
        let state = State::from_parts(spec.clone(), diagonal, regular).map_err(|e| e.to_string())?;
        let report = verify_final_positivity(&state);
        ensure(report.passed, format!("limit density minimum {}", report.min_value))?;
        min_density = min_density.min(report.min_value);
        if weyl::wigner_of_pure_state(&psi, hbar, &grid).unwrap().min_re() < 0.0 {
            negative += 1;
        }
    }
    ensure(negative > 0, "no pre-limit Wigner symbol was negative".into())?;
    Ok(format!("20/20 limits positive (min {min_density:.2e}); {negative}/20 Wigner symbols negative"))
}

fn singular_integration() -> Check {
    let offset = 8.0;
    let spec = SpectralGrid::energy(16.0, 161).unwrap();
    let model = PlaneWaveRealization::new(offset);
    let density = ClassicalDensity::from_fn(&spec, |x| gauss(x.omega, offset, 1.0)).unwrap();
    let obs = Observable::singular_only(&spec, |x| Complex64::new(gauss(x.omega, offset, 1.5), 0.0)).unwrap();
    let p = Axis::new(-7.0, 7.0, 141).unwrap();
    let (mut lengths, mut full, mut reduced) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..4 {
        let length = 4.0 * 2f64.powi(k);
        let grid = Grid::plane(Axis::new(-length / 2.0, length / 2.0, 65).unwrap(), p).unwrap();
        let map = model.momentum_map(&grid).unwrap();
        let rho_s = PhaseFunction::from_values(
            grid.clone(),
            map.compose(&spec, density.values()).unwrap().into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            "ρ_S",
        )
        .unwrap();
        let o_s = symb_singular(&obs, &map).map_err(|e| e.to_string())?;
        lengths.push(length);
        full.push(integrate(&rho_s.mul(&o_s).unwrap()).unwrap().re);
        reduced.push(pair_singular_symbols(&density, &obs).unwrap().re);
    }
    let slope = log_log_slope(&lengths, &full).unwrap().slope;
    let spread = reduced.iter().map(|r| (r - reduced[0]).abs()).fold(0.0, f64::max);
    ensure((slope - 1.0).abs() <= 0.1, format!("full-integral slope {slope}"))?;
    ensure(spread <= 1e-10, format!("momentum-space pairing varies by {spread:e}"))?;
    // Closed form: ∫ N(8, 1) e^{−(ω−8)²/4.5} dω = √(2.25/3.25).
    let closed = (2.25f64 / 3.25).sqrt();
    ensure((reduced[0] - closed).abs() < 1e-6, format!("momentum pairing {} vs {closed}", reduced[0]))?;
    for (l, f) in lengths.iter().zip(&full) {
        ensure((f / l - reduced[0]).abs() < 1e-6, format!("full integral per unit length {} at L = {l}", f / l))?;
    }
    Ok(format!("full-integral slope {slope:.6}, momentum pairing {:.10} (spread {spread:.1e})", reduced[0]))
}

fn duality() -> Check {
    let g = SpectralGrid::energy(1.5, 16).unwrap();
    let n = g.len();
    let cell = g.cell();
    let close = |v: Complex64, e: f64| if e == 0.0 { v.norm() == 0.0 } else { (v - e).norm() <= 1e-14 * e };
    let sing: Vec<Observable> = (0..n).map(|m| Observable::singular_basis(&g, m)).collect();
    let reg: Vec<Observable> = (0..n * n).map(|i| Observable::regular_basis(&g, i / n, i % n)).collect();
    let mut checked = 0usize;
    for m in 0..n {
        let f = Functional::singular_basis(&g, m);
        for (k, o) in sing.iter().enumerate() {
            let v = f.pair(o).unwrap();
            ensure(close(v, if k == m { 1.0 / cell } else { 0.0 }), format!("(ω_{m}|ω_{k}) = {v}"))?;
            checked += 1;
        }
        for (i, o) in reg.iter().enumerate() {
            let v = f.pair(o).unwrap();
            ensure(v.norm() == 0.0, format!("cross pairing singular {m} / regular {i} = {v}"))?;
            checked += 1;
        }
    }
    for i in 0..n * n {
        let f = Functional::regular_basis(&g, i / n, i % n);
        for (j, o) in reg.iter().enumerate() {
            let v = f.pair(o).unwrap();
            ensure(close(v, if i == j { 1.0 / (cell * cell) } else { 0.0 }), format!("regular pair {i}/{j} = {v}"))?;
            checked += 1;
        }
        for (m, o) in sing.iter().enumerate() {
            let v = f.pair(o).unwrap();
            ensure(v.norm() == 0.0, format!("cross pairing regular {i} / singular {m} = {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} basis pairings match the scaled Kronecker deltas"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 Moyal classical limits", moyal_classical_limits),
        ("2 quadratic exactness", quadratic_exactness),
        ("3 Wigner negativity", wigner_negativity),
        ("4 pairing-oracle equivalence", pairing_equivalence),
        ("5 decoherence law", decoherence_law),
        ("6 weak limit", weak_limit),
        ("7 final positivity", final_positivity),
        ("8 singular-integration prescription", singular_integration),
        ("9 duality", duality),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {}/9 criteria passed", 9 - failures);
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
