//! Frequency-localised multipliers on the torus.
//!
//! `Psi_{l,j}` is the lattice restriction of a smooth bump at step
//! `t_j = lcm{1, ..., 2^j}` and width `(2|s|)^{l-j}`. Its Fourier transform on
//! `Z^d` is a periodised copy of `psi_hat` concentrated on arcs of half-width
//! `(2|s|)^{j-l}` around `(t_j^{-1} Z)^d`. Everything here is evaluated on the
//! Fourier side through the Poisson sum, exactly at rational frequencies where
//! that matters.

mod arcs;
mod decompose;
mod multiplier;
mod profile;

pub use arcs::{ArcScale, FrequencyArcs};
pub use decompose::{
    decompose, decomposition_multipliers, square_sum_delta, square_sum_delta_grid, Decomposition,
    Increment,
};
pub use multiplier::{
    axis_table, delta_psi_multiplier, delta_psi_multiplier_grid, multiplier_psi, psi_multiplier,
    psi_multiplier_grid, tensor_grid, MultiplierSpec, MAX_POISSON_TERMS,
};
pub use profile::{psi_hat, psi_hat_1, transition};

use thiserror::Error;

use crate::grid::GridError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("t_{0} = lcm(1..2^{0}) does not fit in 64 bits")]
    Overflow(u32),
    #[error("scale l must be at least 1")]
    ZeroScale,
    #[error("|s|^2 must be positive")]
    ZeroNorm,
    #[error("Poisson sum with step {step} and width {width} needs too many terms")]
    TooManyTerms { step: u64, width: f64 },
    #[error("band {j} needs 2^{j} <= l_max = {l_max}")]
    BandRange { j: u32, l_max: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// `t_j = lcm{1, 2, ..., 2^j}`.
pub fn lcm_t(j: u32) -> Result<u64, LpError> {
    if j >= 6 {
        return Err(LpError::Overflow(j));
    }
    let gcd = |mut a: u64, mut b: u64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    Ok((1..=1u64 << j).fold(1, |acc, m| acc / gcd(acc, m) * m))
}

/// `J_l = floor(log2 l)` for `l >= 1`.
pub fn band_count(l: u32) -> Result<u32, LpError> {
    if l == 0 {
        return Err(LpError::ZeroScale);
    }
    Ok(l.ilog2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_values() {
        assert_eq!(lcm_t(0), Ok(1));
        assert_eq!(lcm_t(1), Ok(2));
        assert_eq!(lcm_t(2), Ok(12));
        assert_eq!(lcm_t(3), Ok(840));
        assert_eq!(lcm_t(4), Ok(720720));
        assert_eq!(lcm_t(5), Ok(144403552893600));
        assert_eq!(lcm_t(6), Err(LpError::Overflow(6)));
    }

    #[test]
    fn band_counts() {
        assert_eq!(band_count(0), Err(LpError::ZeroScale));
        assert_eq!(band_count(1), Ok(0));
        assert_eq!(band_count(7), Ok(2));
        assert_eq!(band_count(8), Ok(3));
    }
}
