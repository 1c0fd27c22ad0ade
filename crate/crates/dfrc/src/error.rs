//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by configuration validation, scene handling, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration invariant does not hold. The message names the
    /// failing constraint and the offending values.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A scene entry falls outside the valid delay window.
    #[error("target delay {tau_s} s outside valid window [{min_s}, {max_s}) s")]
    DelayOutOfWindow { tau_s: f64, min_s: f64, max_s: f64 },

    /// A grid violates its spacing or ordering invariants.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Not enough input bits to encode the requested symbols.
    #[error("insufficient bits: need {needed}, got {got}")]
    InsufficientBits { needed: usize, got: usize },

    /// Bit-stream length is not a multiple of the per-symbol rate.
    #[error("bit stream length {len} is not a multiple of the rate {rate}")]
    BadStreamLength { len: usize, rate: usize },

    /// A dense sensing matrix would exceed the configured memory budget.
    #[error("sensing matrix of {rows}x{cols} exceeds budget of {budget_bytes} bytes; use the matrix-free path")]
    MatrixBudgetExceeded { rows: usize, cols: usize, budget_bytes: usize },

    /// The selected atom set became rank deficient (duplicate or collinear
    /// atoms); the solver aborts rather than returning garbage amplitudes.
    #[error("rank-deficient support in sparse solver at iteration {iteration} (atom {atom})")]
    RankDeficientSupport { iteration: usize, atom: usize },

    /// Mismatched dimensions between two objects that must agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// I/O or parse failure for config, scene, or output files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// Scene file could not be parsed.
    #[error("scene parse error: {0}")]
    SceneParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
