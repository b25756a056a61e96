use num_complex::Complex64;

use super::AverageError;
use crate::geometry::{enumerate_simplex_copies, enumerate_sphere, CopySet, SimplexConfig};
use crate::grid::{
    convolve, dft_forward, dft_inverse, DenseFunction, GridShape, LatticeFunction, SparseFunction,
    Spectrum,
};

/// Supplies copy sets, e.g. straight from the enumerator or through a cache.
pub trait CopySource: Send + Sync {
    fn copies(&self, simplex: &SimplexConfig, lambda_sq: u64) -> Result<CopySet, AverageError>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DirectEnumeration;

impl CopySource for DirectEnumeration {
    fn copies(&self, simplex: &SimplexConfig, lambda_sq: u64) -> Result<CopySet, AverageError> {
        Ok(enumerate_simplex_copies(simplex, lambda_sq)?)
    }
}

/// `w_{lambda S}`: weight `1 / |S_{lambda S}|` on every copy.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageKernel {
    copies: CopySet,
}

impl AverageKernel {
    pub fn from_copies(copies: CopySet) -> Result<Self, AverageError> {
        if copies.is_empty() {
            return Err(AverageError::EmptyCopySet {
                lambda_sq: copies.lambda_sq(),
            });
        }
        Ok(Self { copies })
    }

    pub fn copies(&self) -> &CopySet {
        &self.copies
    }

    pub fn count(&self) -> usize {
        self.copies.count()
    }

    pub fn dim(&self) -> usize {
        self.copies.dim()
    }

    pub fn lambda_sq(&self) -> u64 {
        self.copies.lambda_sq()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.count() as f64
    }

    pub fn to_sparse(&self) -> SparseFunction {
        let w = Complex64::new(self.weight(), 0.0);
        SparseFunction::from_entries(self.dim(), self.copies.points().map(|p| (p.to_vec(), w)))
            .expect("copy points have the kernel dimension")
    }

    /// Largest coordinate spread of the support along any axis.
    pub fn diameter(&self) -> u64 {
        let dim = self.dim();
        (0..dim)
            .map(|a| {
                let axis = self.copies.coords().iter().skip(a).step_by(dim);
                let (lo, hi) =
                    axis.fold((i64::MAX, i64::MIN), |(lo, hi), &c| (lo.min(c), hi.max(c)));
                hi.abs_diff(lo)
            })
            .max()
            .unwrap_or(0)
    }

    /// Whether the support spans a full period of a grid of side `period`,
    /// so circular and plain convolution differ.
    pub fn wraps(&self, period: usize) -> bool {
        self.diameter() >= period as u64
    }

    /// `F(w)(a / N) = |S|^{-1} sum_y e(-y . a / N)` at every grid frequency.
    pub fn multiplier(&self, shape: GridShape) -> Result<Spectrum, AverageError> {
        self.check_dim(shape.dim())?;
        let mut dense = DenseFunction::zeros(shape);
        let w = Complex64::new(self.weight(), 0.0);
        let values = dense.values_mut();
        for p in self.copies.points() {
            values[shape.wrap_index(p)] += w;
        }
        Ok(dft_forward(&dense))
    }

    fn check_dim(&self, found: usize) -> Result<(), AverageError> {
        if found != self.dim() {
            return Err(AverageError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// `A_{lambda S} f`.
    pub fn apply(
        &self,
        f: &LatticeFunction,
        path: AveragePath,
    ) -> Result<LatticeFunction, AverageError> {
        self.check_dim(f.dim())?;
        let dense = match f {
            LatticeFunction::Sparse(_) => return Ok(convolve(f, &self.to_sparse())?.output),
            LatticeFunction::Dense(d) => d,
        };
        let shape = dense.shape();
        let spectral = match path {
            AveragePath::Direct => false,
            AveragePath::Spectral => true,
            AveragePath::Auto => self.count() > shape.len() / shape.dim(),
        };
        if spectral {
            let spectrum = dft_forward(dense).multiply(&self.multiplier(shape)?);
            Ok(dft_inverse(&spectrum).into())
        } else {
            Ok(convolve(f, &self.to_sparse())?.output)
        }
    }
}

/// How a dense average is evaluated. `Auto` multiplies spectra once the
/// kernel has more than `N^d / d` points and sums directly otherwise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AveragePath {
    #[default]
    Auto,
    Direct,
    Spectral,
}

pub fn average_kernel(
    simplex: &SimplexConfig,
    lambda_sq: u64,
) -> Result<AverageKernel, AverageError> {
    AverageKernel::from_copies(enumerate_simplex_copies(simplex, lambda_sq)?)
}

pub fn simplex_average(
    f: &LatticeFunction,
    simplex: &SimplexConfig,
    lambda_sq: u64,
) -> Result<LatticeFunction, AverageError> {
    average_kernel(simplex, lambda_sq)?.apply(f, AveragePath::Auto)
}

/// `M_lambda f`, the average over the lattice sphere of radius `lambda`.
/// `lambda_sq = 0` gives the identity.
pub fn spherical_average(
    f: &LatticeFunction,
    n: usize,
    lambda_sq: u64,
) -> Result<LatticeFunction, AverageError> {
    AverageKernel::from_copies(enumerate_sphere(n, lambda_sq)?)?.apply(f, AveragePath::Auto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{random_test_function, GeneratorSpec};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn unit_sphere_kernel() {
        let k = average_kernel(&SimplexConfig::unit(5).unwrap(), 1).unwrap();
        assert_eq!(k.count(), 10);
        assert_eq!(k.weight(), 0.1);
        let tri = SimplexConfig::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(average_kernel(&tri, 1).unwrap().count(), 8);
    }

    #[test]
    fn delta_spreads_over_sphere() {
        let shape = GridShape::new(8, 5).unwrap();
        let out = spherical_average(&DenseFunction::delta(shape).into(), 5, 1).unwrap();
        let out = out.as_dense().unwrap();
        let mut hits = 0;
        for (flat, v) in out.values().iter().enumerate() {
            let p = shape.point(flat);
            let on_sphere = p.iter().map(|&x| x.min(8 - x).pow(2)).sum::<i64>() == 1;
            if on_sphere {
                hits += 1;
                assert!((v - c(0.1)).norm() < 1e-15);
            } else {
                assert_eq!(*v, c(0.0));
            }
        }
        assert_eq!(hits, 10);
    }

    #[test]
    fn zero_radius_is_identity() {
        let shape = GridShape::new(5, 3).unwrap();
        let f = random_test_function(2, shape, &GeneratorSpec::named("gaussian-iid")).unwrap();
        assert_eq!(spherical_average(&f, 3, 0).unwrap(), f);
    }

    #[test]
    fn empty_copy_set() {
        // 7 is not a sum of three squares.
        let shape = GridShape::new(4, 3).unwrap();
        let f = DenseFunction::delta(shape).into();
        assert_eq!(
            spherical_average(&f, 3, 7),
            Err(AverageError::EmptyCopySet { lambda_sq: 7 })
        );
    }

    #[test]
    fn paths_agree_and_preserve_constants() {
        let shape = GridShape::new(9, 3).unwrap();
        let k = average_kernel(&SimplexConfig::unit(3).unwrap(), 6).unwrap();
        let f = random_test_function(5, shape, &GeneratorSpec::named("gaussian-iid")).unwrap();
        let a = k
            .apply(&f, AveragePath::Direct)
            .unwrap()
            .into_dense()
            .unwrap();
        let b = k
            .apply(&f, AveragePath::Spectral)
            .unwrap()
            .into_dense()
            .unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10);
        let one = DenseFunction::constant(shape, c(1.0)).into();
        let out = k
            .apply(&one, AveragePath::Direct)
            .unwrap()
            .into_dense()
            .unwrap();
        assert!(out.values().iter().all(|v| (v - c(1.0)).norm() < 1e-12));
    }

    #[test]
    fn sphere_matches_unit_simplex() {
        let shape = GridShape::new(7, 4).unwrap();
        let f = random_test_function(8, shape, &GeneratorSpec::named("gaussian-iid")).unwrap();
        for m in [1, 2, 3, 5] {
            let a = spherical_average(&f, 4, m).unwrap();
            let b = simplex_average(&f, &SimplexConfig::unit(4).unwrap(), m).unwrap();
            assert_eq!(a, b);
        }
    }
}
