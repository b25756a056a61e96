use super::{AverageError, AverageKernel, CopySource};
use crate::geometry::SimplexConfig;
use crate::grid::{dft_forward, dft_inverse, DenseFunction, GridShape, Spectrum};
use crate::littlewood_paley::psi_multiplier_grid;

/// `Psi^s_{l,0} * w_{2^l S}` held as its multiplier on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedKernel {
    pub l: u32,
    pub multiplier: Spectrum,
    /// `N <= 2 * 2^l * |s|`: the smoothed kernel is not well separated from
    /// its periodic images.
    pub wraparound: bool,
}

impl SmoothedKernel {
    pub fn space_kernel(&self) -> DenseFunction {
        dft_inverse(&self.multiplier)
    }

    /// Sum of the space-side kernel over the grid.
    pub fn mass(&self) -> f64 {
        crate::grid::deterministic_sum(
            &self
                .space_kernel()
                .values()
                .iter()
                .map(|v| v.re)
                .collect::<Vec<_>>(),
        )
    }

    pub fn apply(&self, f: &DenseFunction) -> DenseFunction {
        dft_inverse(&dft_forward(f).multiply(&self.multiplier))
    }
}

pub fn smoothed_kernel(
    simplex: &SimplexConfig,
    l: u32,
    shape: GridShape,
    source: &dyn CopySource,
) -> Result<SmoothedKernel, AverageError> {
    let lambda_sq = 1u64 << (2 * l);
    let kernel = AverageKernel::from_copies(source.copies(simplex, lambda_sq)?)?;
    let norm_sq = simplex.norm_sq() as u64;
    let psi = Spectrum::from_real(shape, psi_multiplier_grid(norm_sq, l, 0, shape)?)?;
    let multiplier = psi.multiply(&kernel.multiplier(shape)?);
    let wraparound = (shape.period() as f64) <= 2.0 * (1u64 << l) as f64 * simplex.norm();
    Ok(SmoothedKernel {
        l,
        multiplier,
        wraparound,
    })
}
