//! Uniform averages over isometric copies of a dilated simplex.
//!
//! `A_{lambda S} f(x) = |S_{lambda S}|^{-1} sum_{y in S_{lambda S}} f(x - y)`,
//! with the sphere as the `k = 1`, `s_1 = e_1` case.

mod family;
mod kernel;
mod smoothed;

pub use family::{local_sup_average, AverageFamily, KernelBank, LocalSup};
pub use kernel::{
    average_kernel, simplex_average, spherical_average, AverageKernel, AveragePath, CopySource,
    DirectEnumeration,
};
pub use smoothed::{smoothed_kernel, SmoothedKernel};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::grid::GridError;
use crate::littlewood_paley::LpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AverageError {
    #[error("no isometric copies at lambda^2 = {lambda_sq}")]
    EmptyCopySet { lambda_sq: u64 },
    #[error("function lives on Z^{found} but the copies live in Z^{expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("copy source failed: {0}")]
    Source(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Multiplier(#[from] LpError),
}
