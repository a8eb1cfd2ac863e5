// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

//! Phase-space numerics for the ℏ → 0 statistical limit of quantum
//! systems with a continuous energy spectrum.
//!
//! The crate is organised bottom-up:
//!
//! - [`phase_space`]: grids over R^{2N}, the symplectic form, finite
//!   differences, quadrature and the Poisson bracket.
//! - [`weyl`]: Wigner transforms of position kernels and pure states, Weyl
//!   quantization and marginals.
//! - [`moyal`]: truncated star product, Moyal bracket and their ℏ → 0 limits.
//! - [`spectral`]: observables in the (ω, p) energy representation, split into
//!   singular (diagonal) and regular (off-diagonal) kernels.
//! - [`states`]: state functionals, admissibility, the regular and singular
//!   pairings, and classical densities over (H, P).
//! - [`decoherence`]: time evolution of pairings, weak limits and decay-rate
//!   extraction.
//! - [`scenario`]: the config-driven runner behind the `cslimit` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod error;
pub mod moyal;
pub mod phase_space;
pub mod regression;
pub mod scenario;
pub mod spectral;
pub mod states;
pub mod weyl;

pub use error::{Error, Result};

pub use num_complex::Complex64;
