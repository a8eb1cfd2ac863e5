// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Moyal star product and Moyal bracket.
//!
//! The star product is the series
//!
//! ```text
//! f ⋆ g = Σ_{m=0}^{k} (1/m!) (σ iℏ/2)^m B_m(f, g),   B_m = (←∂_a ω^{ab} →∂_b)^m
//! ```
//!
//! with σ = [`STAR_SIGN`]. The bidifferential operators B_m are expanded
//! explicitly over the 2N elementary pairs (q^i, p^i) and (p^i, q^i) and
//! evaluated with [`phase_space::derivative`].

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::{self, PhaseFunction, INTERIOR_FRACTION};
use crate::regression::{log_log_slope, LineFit};

/// Sign σ of the exponent. With σ = +1 the m = 1 term is (iℏ/2){f, g}_pb, so
/// that {q, p}_mb = +{q, p}_pb = +1.
pub const STAR_SIGN: f64 = 1.0;

/// Errors at or below this (relative to the pointwise product) count as exact.
pub const EXACT_TOLERANCE: f64 = 1e-10;

/// Truncation order k of the star-product series (terms up to ℏ^k).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StarOrder(usize);

impl StarOrder {
    pub const MAX: usize = 6;
    pub const DEFAULT: StarOrder = StarOrder(2);

    pub fn new(k: usize) -> Result<Self> {
        if k > Self::MAX {
            return Err(Error::StarOrderOutOfRange(k));
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for StarOrder {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Memoised mixed derivatives of one function.
struct DerivativeCache<'a> {
    f: &'a PhaseFunction,
    cache: HashMap<Vec<usize>, PhaseFunction>,
}

impl<'a> DerivativeCache<'a> {
    fn new(f: &'a PhaseFunction) -> Self {
        Self { f, cache: HashMap::new() }
    }

    fn get(&mut self, orders: &[usize]) -> Result<&PhaseFunction> {
        if !self.cache.contains_key(orders) {
            let d = if orders.iter().all(|&o| o == 0) {
                self.f.clone()
            } else {
                phase_space::derivative(self.f, orders)?
            };
            self.cache.insert(orders.to_vec(), d);
        }
        Ok(&self.cache[orders])
    }
}

/// All ways of writing `m` as an ordered sum of `parts` non-negative integers.
fn compositions(m: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![m]];
    }
    let mut out = Vec::new();
    for first in 0..=m {
        for mut rest in compositions(m - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn bidifferential_cached(
    fd: &mut DerivativeCache<'_>,
    gd: &mut DerivativeCache<'_>,
    m: usize,
) -> Result<PhaseFunction> {
    let grid = fd.f.grid().clone();
    let n = grid.dof();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    // Elementary pair j < n: (∂_{q_j} on f, ∂_{p_j} on g) with ω = +1;
    // pair n + j: (∂_{p_j} on f, ∂_{q_j} on g) with ω = −1.
    for ks in compositions(m, 2 * n) {
        let mut coeff = factorial(m) / ks.iter().map(|&k| factorial(k)).product::<f64>();
        let mut left = vec![0; 2 * n];
        let mut right = vec![0; 2 * n];
        for j in 0..n {
            left[j] += ks[j];
            right[n + j] += ks[j];
            left[n + j] += ks[n + j];
            right[j] += ks[n + j];
            if ks[n + j] % 2 == 1 {
                coeff = -coeff;
            }
        }
        let df = fd.get(&left)?.values().to_vec();
        let dg = gd.get(&right)?;
        for ((a, x), y) in acc.iter_mut().zip(&df).zip(dg.values()) {
            *a += x * y * coeff;
        }
    }
    PhaseFunction::from_values(grid, acc, format!("B{m}({}, {})", fd.f.label(), gd.f.label()))
}

/// B_m(f, g) = f (←∂_a ω^{ab} →∂_b)^m g.
pub fn bidifferential(f: &PhaseFunction, g: &PhaseFunction, m: usize) -> Result<PhaseFunction> {
    f.check_same_grid(g)?;
    bidifferential_cached(&mut DerivativeCache::new(f), &mut DerivativeCache::new(g), m)
}

/// B_0 … B_k for both orderings (f, g) and (g, f), sharing derivatives.
struct SeriesTerms {
    fg: Vec<PhaseFunction>,
    gf: Vec<PhaseFunction>,
}

impl SeriesTerms {
    fn compute(f: &PhaseFunction, g: &PhaseFunction, order: StarOrder) -> Result<Self> {
        f.check_same_grid(g)?;
        let mut fd = DerivativeCache::new(f);
        let mut gd = DerivativeCache::new(g);
        let mut fg = Vec::with_capacity(order.get() + 1);
        let mut gf = Vec::with_capacity(order.get() + 1);
        for m in 0..=order.get() {
            fg.push(bidifferential_cached(&mut fd, &mut gd, m)?);
            gf.push(bidifferential_cached(&mut gd, &mut fd, m)?);
        }
        Ok(Self { fg, gf })
    }

    fn sum(terms: &[PhaseFunction], hbar: f64, label: String) -> PhaseFunction {
        let grid = terms[0].grid();
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
        let step = Complex64::new(0.0, STAR_SIGN * hbar / 2.0);
        let mut c = Complex64::new(1.0, 0.0);
        for (m, term) in terms.iter().enumerate() {
            if m > 0 {
                c = c * step / m as f64;
            }
            if c == Complex64::new(0.0, 0.0) {
                break;
            }
            for (a, v) in acc.iter_mut().zip(term.values()) {
                *a += c * v;
            }
        }
        PhaseFunction::from_values(grid.clone(), acc, label).expect("finite series sum")
    }

    fn star_fg(&self, hbar: f64) -> PhaseFunction {
        Self::sum(&self.fg, hbar, "f * g".into())
    }

    fn star_gf(&self, hbar: f64) -> PhaseFunction {
        Self::sum(&self.gf, hbar, "g * f".into())
    }
}

fn check_hbar_nonnegative(hbar: f64) -> Result<()> {
    if !(hbar >= 0.0 && hbar.is_finite()) {
        return Err(Error::NonPositiveHbar(hbar));
    }
    Ok(())
}

/// Truncated star product f ⋆ g.
pub fn star_product(
    f: &PhaseFunction,
    g: &PhaseFunction,
    hbar: f64,
    order: StarOrder,
) -> Result<PhaseFunction> {
    check_hbar_nonnegative(hbar)?;
    f.check_same_grid(g)?;
    let mut fd = DerivativeCache::new(f);
    let mut gd = DerivativeCache::new(g);
    let terms = (0..=order.get())
        .map(|m| bidifferential_cached(&mut fd, &mut gd, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTerms::sum(&terms, hbar, format!("{} * {}", f.label(), g.label())))
}

fn bracket_from(fg: &PhaseFunction, gf: &PhaseFunction, hbar: f64) -> Result<PhaseFunction> {
    let inv = Complex64::new(0.0, -1.0 / hbar);
    fg.zip_with(gf, |a, b| (a - b) * inv)
}

/// {f, g}_mb = (f ⋆ g − g ⋆ f) / (iℏ).
pub fn moyal_bracket(
    f: &PhaseFunction,
    g: &PhaseFunction,
    hbar: f64,
    order: StarOrder,
) -> Result<PhaseFunction> {
    if hbar == 0.0 {
        return Err(Error::ZeroHbarBracket);
    }
    check_hbar_nonnegative(hbar)?;
    let terms = SeriesTerms::compute(f, g, order)?;
    Ok(bracket_from(&terms.star_fg(hbar), &terms.star_gf(hbar), hbar)?
        .with_label(format!("{{{}, {}}}_mb", f.label(), g.label())))
}

/// Observed ℏ → 0 behaviour of the product and bracket errors.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub hbars: Vec<f64>,
    /// max over the interior of |f ⋆ g − f g| per ℏ.
    pub product_errors: Vec<f64>,
    /// max over the interior of |{f, g}_mb − {f, g}_pb| per ℏ.
    pub bracket_errors: Vec<f64>,
    /// log-log fit of product error against ℏ; `None` when exact.
    pub product_slope: Option<LineFit>,
    pub bracket_slope: Option<LineFit>,
    pub product_exact: bool,
    pub bracket_exact: bool,
}

/// Measure how f ⋆ g → f g and {f, g}_mb → {f, g}_pb along a decreasing ℏ
/// sequence.
pub fn classical_limit_check(
    f: &PhaseFunction,
    g: &PhaseFunction,
    hbars: &[f64],
    order: StarOrder,
) -> Result<ConvergenceReport> {
    if hbars.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 hbar values, got {}", hbars.len())));
    }
    if hbars.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::Degenerate("hbar values must be positive".into()));
    }
    if hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Degenerate("hbar sequence must be strictly decreasing".into()));
    }
    let terms = SeriesTerms::compute(f, g, order)?;
    let pointwise = &terms.fg[0];
    let poisson = phase_space::poisson_bracket(f, g)?;
    let scale = pointwise.max_abs_interior(INTERIOR_FRACTION).max(1.0);
    let bracket_scale = poisson.max_abs_interior(INTERIOR_FRACTION).max(1.0);

    let mut product_errors = Vec::with_capacity(hbars.len());
    let mut bracket_errors = Vec::with_capacity(hbars.len());
    for &h in hbars {
        let fg = terms.star_fg(h);
        let gf = terms.star_gf(h);
        product_errors.push(fg.sub(pointwise)?.max_abs_interior(INTERIOR_FRACTION));
        let mb = bracket_from(&fg, &gf, h)?;
        bracket_errors.push(mb.sub(&poisson)?.max_abs_interior(INTERIOR_FRACTION));
    }
    let product_exact = product_errors.iter().all(|e| *e <= EXACT_TOLERANCE * scale);
    let bracket_exact = bracket_errors.iter().all(|e| *e <= EXACT_TOLERANCE * bracket_scale);
    let product_slope = if product_exact { None } else { Some(log_log_slope(hbars, &product_errors)?) };
    let bracket_slope = if bracket_exact { None } else { Some(log_log_slope(hbars, &bracket_errors)?) };
    Ok(ConvergenceReport {
        hbars: hbars.to_vec(),
        product_errors,
        bracket_errors,
        product_slope,
        bracket_slope,
        product_exact,
        bracket_exact,
    })
}
