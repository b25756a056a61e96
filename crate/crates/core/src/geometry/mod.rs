//! Exact lattice-point geometry: spheres, simplices and their dilated copies.
//!
//! Dilations are carried as the squared factor `lambda_sq` everywhere so that
//! every constraint is an integer equality.

mod copyset;
mod count;
mod enumerate;
mod simplex;

pub use copyset::{CopyKind, CopySet, CopySetFormatError};
pub use count::count_representations;
pub use enumerate::{enumerate_simplex_copies, enumerate_sphere, verify_isometry};
pub use simplex::SimplexConfig;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("ambient dimension must be positive")]
    ZeroDimension,
    #[error("a simplex needs between 1 and n vertices, got {k} in dimension {n}")]
    VertexCount { n: usize, k: usize },
    #[error("vertex {index} has length {found}, expected {expected}")]
    VertexLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vertices are linearly dependent")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("squared dilation must be at least 1")]
    ZeroDilation,
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

/// One row of a cardinality scaling table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalingRow {
    pub lambda: u64,
    pub lambda_sq: u64,
    pub count: u64,
    /// `count / lambda^(nk - k(k+1))`.
    pub normalized: f64,
    /// False when `n < 2k + 3`, where the two-sided growth bound is not known.
    pub regime_ok: bool,
}

/// Exact copy counts for each dilation `lambda` together with the count
/// normalised by `lambda^(nk - k(k+1))`.
///
/// For `k = 1` the count is `r_n(lambda^2 |s_1|^2)` and no points are
/// materialised; otherwise the copies are enumerated.
pub fn cardinality_scaling_report(
    simplex: &SimplexConfig,
    lambdas: &[u64],
) -> Result<Vec<ScalingRow>, GeometryError> {
    lambdas
        .iter()
        .map(|&lambda| {
            if lambda == 0 {
                return Err(GeometryError::ZeroDilation);
            }
            let lambda_sq = lambda
                .checked_mul(lambda)
                .ok_or_else(|| GeometryError::Overflow(format!("lambda {lambda} squared")))?;
            let count = copy_count(simplex, lambda_sq)?;
            let exponent = simplex.scaling_exponent();
            let normalized = count as f64 / (lambda as f64).powi(exponent as i32);
            Ok(ScalingRow {
                lambda,
                lambda_sq,
                count,
                normalized,
                regime_ok: simplex.regime_ok(),
            })
        })
        .collect()
}

/// `|S_{lambda S}|` without keeping the points when `k = 1`.
pub fn copy_count(simplex: &SimplexConfig, lambda_sq: u64) -> Result<u64, GeometryError> {
    if lambda_sq == 0 {
        return Err(GeometryError::ZeroDilation);
    }
    if simplex.k() == 1 {
        let radius_sq = (simplex.gram()[0][0] as u64)
            .checked_mul(lambda_sq)
            .ok_or_else(|| GeometryError::Overflow("sphere radius".into()))?;
        count_representations(simplex.n(), radius_sq)
    } else {
        Ok(enumerate_simplex_copies(simplex, lambda_sq)?.count() as u64)
    }
}
