//! Periodic grids, spectral fields and Fourier-multiplier operators.
//!
//! The transform pair is an unnormalized forward DFT and an inverse scaled
//! by `1 / N^n`. Multipliers act on the forward coefficients, so a symbol
//! `m(xi)` applied to `exp(i k.x)` returns `m(k) exp(i k.x)` exactly.

mod field;
mod grid;
pub mod ops;
pub mod snapshot;

use thiserror::Error;

pub use field::SpectralField;
pub use grid::Grid;
pub use ops::{
    apply_multiplier, apply_multiplier_with, dealias, fractional_laplacian, frequency_l2_norm, lp_norm,
    normalization_constant, riesz_potential, sobolev_seminorm, ZeroMode,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("grid dimension must be 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("points per axis must be a power of two and at least 8, got {0}")]
    Points(usize),
    #[error("grid extent must be positive and finite, got {0}")]
    Extent(f64),
    #[error("sample count {found} does not match grid size {expected}")]
    Length { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("symbol is not finite at frequency index {index} (|xi| = {magnitude})")]
    NonFiniteSymbol { index: usize, magnitude: f64 },
    #[error("operator order must be positive, got {0}")]
    Order(f64),
    #[error("alpha must lie in (0, n), got alpha = {alpha} with n = {n}")]
    RieszOrder { alpha: f64, n: f64 },
    #[error("Lebesgue exponent must be at least 1, got {0}")]
    Exponent(f64),
}
