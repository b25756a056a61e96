//! Discrete simplicial averages on integer lattices and the harmonic-analysis
//! machinery used to study their long variation.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] enumerates lattice points on spheres and isometric copies of
//!   dilated simplices, exactly, in integer arithmetic.
//! * [`grid`] holds dense periodic and sparse lattice functions, their discrete
//!   Fourier transforms, convolutions and norms.
//! * [`averaging`] builds the uniform averaging kernels over copy sets and the
//!   smoothed kernels `Ψ ∗ w`.
//! * [`variation`] computes r-variation seminorms and λ-jump counts, pointwise
//!   and as fields over a family of averages.
//! * [`littlewood_paley`] evaluates the frequency-localised multipliers and
//!   frequency arcs on the torus.
//! * [`martingale`] implements the nested cube filtration, conditional
//!   expectations and martingale differences.

pub mod averaging;
pub mod geometry;
pub mod grid;
pub mod littlewood_paley;
pub mod martingale;
pub mod variation;

pub use num_complex::Complex64;
