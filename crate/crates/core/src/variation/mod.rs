//! r-variation seminorms and lambda-jump counts.
//!
//! For values `a_1, ..., a_L` at increasing scales,
//! `v_r = sup (sum_t |a_{i_{t+1}} - a_{i_t}|^r)^{1/r}` over increasing index
//! sequences, and `J_lam` is the largest number of pairs
//! `u_1 < v_1 <= u_2 < v_2 <= ...` with `|a_v - a_u| > lam`.

mod field;
mod sequence;

pub use field::{
    jump_field, lacunary_maximal_field, square_function_field, variation_field, Family,
    FamilyValues, JumpField,
};
pub use sequence::{jump_count, v_r, Exponent, SampleSequence, SampleValue};

use thiserror::Error;

use crate::averaging::AverageError;
use crate::grid::GridError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("variation exponent must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("jump height must be positive, got {0}")]
    InvalidJump(f64),
    #[error("scales must be strictly increasing")]
    UnsortedScales,
    #[error("{scales} scales but {values} values")]
    LengthMismatch { scales: usize, values: usize },
    #[error("sample values must be finite")]
    NonFinite,
    #[error("scale list is empty")]
    NoScales,
    #[error(transparent)]
    Average(#[from] AverageError),
    #[error(transparent)]
    Grid(#[from] GridError),
}
