use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{jump_count, v_r, Exponent, VariationError};
use crate::averaging::{
    AverageError, AverageFamily, AverageKernel, AveragePath, CopySource, KernelBank,
};
use crate::geometry::SimplexConfig;
use crate::grid::{DenseFunction, GridShape, LatticeFunction, SparseFunction};

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyValues {
    Dense(Vec<DenseFunction>),
    Sparse(Vec<SparseFunction>),
}

/// `A_{lambda S} f` for each usable dilation of a scale list, in increasing
/// order of `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub scales_used: Vec<u64>,
    /// Scales whose copy set is empty.
    pub skipped: Vec<u64>,
    pub wraparound: bool,
    pub values: FamilyValues,
}

impl Family {
    /// Averages at dilations `lambda` (so `lambda^2 = lambda * lambda`).
    pub fn compute(
        f: &LatticeFunction,
        simplex: &SimplexConfig,
        scales: &[u64],
        source: &dyn CopySource,
    ) -> Result<Self, VariationError> {
        if scales.is_empty() {
            return Err(VariationError::NoScales);
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VariationError::UnsortedScales);
        }
        let mut used = Vec::new();
        let mut skipped = Vec::new();
        let mut kernels = Vec::new();
        for &lambda in scales {
            match AverageKernel::from_copies(source.copies(simplex, lambda * lambda)?) {
                Ok(k) => {
                    used.push(lambda);
                    kernels.push(k);
                }
                Err(AverageError::EmptyCopySet { .. }) => {
                    log::info!("lambda = {lambda}: no copies, skipped");
                    skipped.push(lambda);
                }
                Err(e) => return Err(e.into()),
            }
        }
        let (values, wraparound) = match f {
            LatticeFunction::Dense(d) => {
                let family = AverageFamily::new(d);
                let averages = kernels
                    .iter()
                    .map(|k| family.average(k))
                    .collect::<Result<_, _>>()?;
                let wraps = kernels.iter().any(|k| k.wraps(d.shape().period()));
                (FamilyValues::Dense(averages), wraps)
            }
            LatticeFunction::Sparse(_) => {
                let averages = kernels
                    .iter()
                    .map(|k| {
                        let out = k.apply(f, AveragePath::Direct)?;
                        Ok(out.as_sparse().expect("sparse input stays sparse").clone())
                    })
                    .collect::<Result<_, AverageError>>()?;
                (FamilyValues::Sparse(averages), false)
            }
        };
        Ok(Self {
            scales_used: used,
            skipped,
            wraparound,
            values,
        })
    }

    /// Averages of a dense function at every scale of a kernel bank.
    pub fn from_bank(f: &DenseFunction, bank: &KernelBank) -> Result<Self, VariationError> {
        Ok(Self {
            scales_used: bank.scales_used.clone(),
            skipped: bank.skipped.clone(),
            wraparound: bank.wraparound,
            values: FamilyValues::Dense(bank.averages(f)?),
        })
    }

    /// The sub-family on the first `len` scales.
    pub fn truncated(&self, len: usize) -> Self {
        let len = len.min(self.len());
        let values = match &self.values {
            FamilyValues::Dense(v) => FamilyValues::Dense(v[..len].to_vec()),
            FamilyValues::Sparse(v) => FamilyValues::Sparse(v[..len].to_vec()),
        };
        Self {
            scales_used: self.scales_used[..len].to_vec(),
            skipped: self.skipped.clone(),
            wraparound: self.wraparound,
            values,
        }
    }

    /// A family of precomputed functions, e.g. conditional expectations.
    pub fn from_values(scales: Vec<u64>, values: FamilyValues) -> Result<Self, VariationError> {
        let len = match &values {
            FamilyValues::Dense(v) => v.len(),
            FamilyValues::Sparse(v) => v.len(),
        };
        if scales.len() != len {
            return Err(VariationError::LengthMismatch {
                scales: scales.len(),
                values: len,
            });
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VariationError::UnsortedScales);
        }
        Ok(Self {
            scales_used: scales,
            skipped: Vec::new(),
            wraparound: false,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.scales_used.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales_used.is_empty()
    }

    /// Apply `stat` to the value sequence at every point.
    pub fn map_points(
        &self,
        dim: usize,
        stat: impl Fn(&[Complex64]) -> f64 + Sync,
    ) -> LatticeFunction {
        match &self.values {
            FamilyValues::Dense(fs) => {
                let shape: GridShape = match fs.first() {
                    Some(f) => f.shape(),
                    None => unreachable_empty_dense(),
                };
                let out: Vec<f64> = (0..shape.len())
                    .into_par_iter()
                    .map_init(Vec::new, |buf, flat| {
                        buf.clear();
                        buf.extend(fs.iter().map(|f| f.values()[flat]));
                        stat(buf)
                    })
                    .collect();
                DenseFunction::from_real(shape, out)
                    .expect("statistics are finite")
                    .into()
            }
            FamilyValues::Sparse(fs) => {
                let points: BTreeSet<&Vec<i64>> =
                    fs.iter().flat_map(|f| f.entries().keys()).collect();
                let entries = points.into_iter().map(|p| {
                    let seq: Vec<Complex64> = fs.iter().map(|f| f.get(p)).collect();
                    (p.clone(), Complex64::new(stat(&seq), 0.0))
                });
                SparseFunction::from_entries(dim, entries)
                    .expect("statistics are finite")
                    .into()
            }
        }
    }
}

fn unreachable_empty_dense() -> ! {
    panic!("dense family without members has no grid; check Family::is_empty first")
}

fn dim_of(family: &Family) -> usize {
    match &family.values {
        FamilyValues::Dense(fs) => fs.first().map_or(0, |f| f.shape().dim()),
        FamilyValues::Sparse(fs) => fs.first().map_or(0, |f| f.dim()),
    }
}

fn empty_field(family: &Family) -> Option<LatticeFunction> {
    family
        .is_empty()
        .then(|| SparseFunction::new(dim_of(family)).into())
}

/// `V_r` of the family at every point.
pub fn variation_field(family: &Family, r: Exponent) -> LatticeFunction {
    empty_field(family).unwrap_or_else(|| family.map_points(dim_of(family), |seq| v_r(seq, r)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpField {
    pub lam: f64,
    /// `J_lam(x)`.
    pub counts: LatticeFunction,
    /// `lam * sqrt(J_lam(x))`.
    pub scaled: LatticeFunction,
}

pub fn jump_field(family: &Family, lam: f64) -> Result<JumpField, VariationError> {
    jump_count::<f64>(&[], lam)?;
    let dim = dim_of(family);
    let counts = empty_field(family).unwrap_or_else(|| {
        family.map_points(dim, |seq| jump_count(seq, lam).expect("lam checked") as f64)
    });
    let scaled = match &counts {
        LatticeFunction::Dense(d) => d.map(|c| Complex64::new(lam * c.re.sqrt(), 0.0)).into(),
        LatticeFunction::Sparse(s) => SparseFunction::from_entries(
            dim,
            s.entries()
                .iter()
                .map(|(p, c)| (p.clone(), Complex64::new(lam * c.re.sqrt(), 0.0))),
        )?
        .into(),
    };
    Ok(JumpField {
        lam,
        counts,
        scaled,
    })
}

/// `sup_lambda |A_{lambda S} f|` over the family.
pub fn lacunary_maximal_field(family: &Family) -> LatticeFunction {
    empty_field(family).unwrap_or_else(|| {
        family.map_points(dim_of(family), |seq| {
            seq.iter().map(|v| v.norm()).fold(0.0, f64::max)
        })
    })
}

/// `(sum_lambda |A_{lambda S} f|^2)^{1/2}`.
pub fn square_function_field(family: &Family) -> LatticeFunction {
    empty_field(family).unwrap_or_else(|| {
        family.map_points(dim_of(family), |seq| {
            seq.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
        })
    })
}
