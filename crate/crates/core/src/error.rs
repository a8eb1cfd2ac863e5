// Copyright 2026 The cslimit Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample in {0}")]
    NonFinite(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("derivative order {0} out of range (expected 1..=4)")]
    OrderOutOfRange(usize),

    #[error("axis {axis} out of range for a grid with {dims} axes")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("star-product truncation order {0} out of range (expected 0..=6)")]
    StarOrderOutOfRange(usize),

    #[error("hbar must be positive, got {0}")]
    NonPositiveHbar(f64),

    #[error("Moyal bracket needs hbar > 0; use the Poisson bracket at hbar = 0")]
    ZeroHbarBracket,

    #[error("{what} = {value} lies outside [{min}, {max}]")]
    OutOfRange {
        what: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("grid undersamples the oscillatory integrand: {0}")]
    Undersampled(String),

    #[error("inadmissible state: {0}")]
    Inadmissible(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
