//! Functions on `Z^d`: periodic dense grids and finitely supported maps,
//! together with Fourier transforms, convolution and norms.
//!
//! Fourier convention: `F(a) = sum_x f(x) e(-x . a / N)` with
//! `e(t) = exp(2 pi i t)`; the inverse carries the `1 / N^d` factor.

mod convolve;
mod dft;
mod function;
mod generators;
mod norms;

pub use convolve::{convolve, Convolution};
pub use dft::{
    dft_forward, dft_forward_with, dft_inverse, dft_inverse_with, DftBackend, DftRegistry,
    NaiveDft, RustFftDft, Spectrum,
};
pub use function::{DenseFunction, GridShape, LatticeFunction, SparseFunction};
pub use generators::{
    random_test_function, trial_seed, GeneratorParams, GeneratorRegistry, GeneratorSpec,
    TestFunctionGenerator,
};
pub use norms::{deterministic_sum, lp_norm, lp_norm_dense};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid period and dimension must be positive")]
    EmptyGrid,
    #[error("grid {period}^{dim} does not fit in memory")]
    TooLarge { period: usize, dim: usize },
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("values must be finite")]
    NonFinite,
    #[error("exponent p must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("unknown test function generator {0:?}")]
    UnknownGenerator(String),
    #[error("unknown transform backend {0:?}")]
    UnknownBackend(String),
    #[error("generator {generator:?}: {reason}")]
    GeneratorParams { generator: String, reason: String },
}
