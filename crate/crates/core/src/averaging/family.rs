use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{AverageError, AverageKernel, AveragePath, CopySource};
use crate::geometry::SimplexConfig;
use crate::grid::{
    dft_forward, dft_inverse, DenseFunction, GridShape, LatticeFunction, SparseFunction, Spectrum,
};

/// Kernel multipliers `F(w_{lambda S})` on one grid for a list of dilations
/// `lambda`, computed once and reused across test functions.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBank {
    pub shape: GridShape,
    pub scales_used: Vec<u64>,
    /// Scales whose copy set is empty.
    pub skipped: Vec<u64>,
    pub counts: Vec<usize>,
    pub wraparound: bool,
    multipliers: Vec<Spectrum>,
}

impl KernelBank {
    pub fn new(
        simplex: &SimplexConfig,
        scales: &[u64],
        shape: GridShape,
        source: &dyn CopySource,
    ) -> Result<Self, AverageError> {
        let mut bank = Self {
            shape,
            scales_used: Vec::new(),
            skipped: Vec::new(),
            counts: Vec::new(),
            wraparound: false,
            multipliers: Vec::new(),
        };
        for &lambda in scales {
            match AverageKernel::from_copies(source.copies(simplex, lambda * lambda)?) {
                Ok(k) => {
                    bank.wraparound |= k.wraps(shape.period());
                    bank.multipliers.push(k.multiplier(shape)?);
                    bank.counts.push(k.count());
                    bank.scales_used.push(lambda);
                }
                Err(AverageError::EmptyCopySet { .. }) => {
                    log::info!("lambda = {lambda}: no copies, skipped");
                    bank.skipped.push(lambda);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(bank)
    }

    pub fn multipliers(&self) -> &[Spectrum] {
        &self.multipliers
    }

    /// `A_{lambda S} f` for every scale in the bank.
    pub fn averages(&self, f: &DenseFunction) -> Result<Vec<DenseFunction>, AverageError> {
        if f.shape() != self.shape {
            return Err(AverageError::DimensionMismatch {
                expected: self.shape.dim(),
                found: f.shape().dim(),
            });
        }
        let spectrum = dft_forward(f);
        Ok(self
            .multipliers
            .iter()
            .map(|m| dft_inverse(&spectrum.multiply(m)))
            .collect())
    }
}

/// Averages of one dense function at many dilations: a single forward
/// transform, then one multiplier product and inverse transform per scale.
pub struct AverageFamily {
    spectrum: Spectrum,
}

impl AverageFamily {
    pub fn new(f: &DenseFunction) -> Self {
        Self {
            spectrum: dft_forward(f),
        }
    }

    pub fn average(&self, kernel: &AverageKernel) -> Result<DenseFunction, AverageError> {
        let m = kernel.multiplier(self.spectrum.shape())?;
        Ok(dft_inverse(&self.spectrum.multiply(&m)))
    }
}

/// `sup |A_{lambda S} f|` over `lambda^2 = 4^l, 4^l + stride, ..., <= 4^{l+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSup {
    pub output: LatticeFunction,
    pub lambda_sq_used: Vec<u64>,
    /// Dilations without isometric copies.
    pub skipped: Vec<u64>,
    /// Some kernel spans a full grid period.
    pub wraparound: bool,
}

impl LocalSup {
    pub fn is_empty(&self) -> bool {
        self.lambda_sq_used.is_empty()
    }
}

pub fn local_sup_average(
    f: &LatticeFunction,
    simplex: &SimplexConfig,
    l: u32,
    stride: u64,
    source: &dyn CopySource,
) -> Result<LocalSup, AverageError> {
    let stride = stride.max(1);
    let lo = 1u64 << (2 * l);
    let hi = lo << 2;
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut wraparound = false;
    let mut kernels = Vec::new();
    for lambda_sq in (lo..=hi).step_by(stride as usize) {
        match AverageKernel::from_copies(source.copies(simplex, lambda_sq)?) {
            Ok(k) => {
                used.push(lambda_sq);
                kernels.push(k);
            }
            Err(AverageError::EmptyCopySet { .. }) => {
                log::info!("lambda^2 = {lambda_sq}: no copies, skipped");
                skipped.push(lambda_sq);
            }
            Err(e) => return Err(e),
        }
    }
    if kernels.is_empty() {
        log::warn!("no admissible dilation in [{lo}, {hi}]");
    }
    let output = match f {
        LatticeFunction::Dense(d) => {
            let family = AverageFamily::new(d);
            let mut sup = vec![0.0f64; d.shape().len()];
            for k in &kernels {
                wraparound |= k.wraps(d.shape().period());
                let avg = family.average(k)?;
                for (s, v) in sup.iter_mut().zip(avg.values()) {
                    *s = s.max(v.norm());
                }
            }
            DenseFunction::from_real(d.shape(), sup)?.into()
        }
        LatticeFunction::Sparse(_) => {
            let mut sup: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
            for k in &kernels {
                let avg = k.apply(f, AveragePath::Direct)?;
                for (p, v) in avg
                    .as_sparse()
                    .expect("sparse input stays sparse")
                    .entries()
                {
                    let slot = sup.entry(p.clone()).or_default();
                    *slot = slot.max(v.norm());
                }
            }
            let entries = sup.into_iter().map(|(p, v)| (p, Complex64::new(v, 0.0)));
            SparseFunction::from_entries(f.dim(), entries)?.into()
        }
    };
    Ok(LocalSup {
        output,
        lambda_sq_used: used,
        skipped,
        wraparound,
    })
}
