//! Nested cubes `Q_t^l = B^l (t + [0,1)^d)` with an integer base `B`,
//! conditional expectations `E_l` and martingale differences
//! `D_m = E_m - E_{m-1}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{DenseFunction, GridError, LatticeFunction, SparseFunction};
use crate::variation::{jump_field, Family, FamilyValues, JumpField, VariationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MartingaleError {
    #[error("cube base must be at least 2, got {0}")]
    InvalidBase(u64),
    #[error("cube side {side} does not divide the period {period}")]
    Indivisible { period: usize, side: u64 },
    #[error("cube side B^{level} overflows")]
    Overflow { level: u32 },
    #[error("martingale differences start at level 1")]
    ZeroLevel,
    #[error("dimension mismatch: scheme has {expected}, function has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Variation(#[from] VariationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicScheme {
    base: u64,
    dim: usize,
}

impl DyadicScheme {
    pub fn new(base: u64, dim: usize) -> Result<Self, MartingaleError> {
        if base < 2 {
            return Err(MartingaleError::InvalidBase(base));
        }
        Ok(Self { base, dim })
    }

    /// Base `B = ceil(2|s|)` (at least 2) from `|s|^2`.
    pub fn for_norm_sq(norm_sq: u64, dim: usize) -> Result<Self, MartingaleError> {
        let mut b = 2u64;
        while b * b < 4 * norm_sq {
            b += 1;
        }
        Self::new(b, dim)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self, level: u32) -> Result<u64, MartingaleError> {
        self.base
            .checked_pow(level)
            .ok_or(MartingaleError::Overflow { level })
    }

    /// Largest `L` with `B^L | period`.
    pub fn max_level(&self, period: usize) -> u32 {
        let mut level = 0;
        let mut p = period as u64;
        while p > 0 && p.is_multiple_of(self.base) {
            p /= self.base;
            level += 1;
        }
        level
    }

    /// `t` with `x in Q_t^l`: `t_i = floor(x_i / B^l)`.
    pub fn cube_index(&self, x: &[i64], level: u32) -> Result<Vec<i64>, MartingaleError> {
        let side = self.side(level)? as i64;
        Ok(x.iter().map(|&c| c.div_euclid(side)).collect())
    }

    /// `E_l f`: the cube average on each level-`l` cube.
    pub fn conditional_expectation(
        &self,
        f: &LatticeFunction,
        level: u32,
    ) -> Result<LatticeFunction, MartingaleError> {
        self.check_dim(f.dim())?;
        match f {
            LatticeFunction::Dense(d) => Ok(self.expect_dense(d, level)?.into()),
            LatticeFunction::Sparse(s) => Ok(self.expect_sparse(s, level)?.into()),
        }
    }

    pub fn expect_dense(
        &self,
        f: &DenseFunction,
        level: u32,
    ) -> Result<DenseFunction, MartingaleError> {
        self.check_dim(f.shape().dim())?;
        let shape = f.shape();
        let side = self.side(level)?;
        let n = shape.period();
        if !(n as u64).is_multiple_of(side) {
            return Err(MartingaleError::Indivisible { period: n, side });
        }
        let side = side as usize;
        let mut values = f.values().to_vec();
        if side == 1 {
            return Ok(DenseFunction::from_values(shape, values)?);
        }
        // Block means along each axis in turn give the cube mean.
        let scale = 1.0 / side as f64;
        for axis in 0..shape.dim() {
            let stride = shape.stride(axis);
            for outer in values.chunks_mut(n * stride) {
                for inner in 0..stride {
                    for block in 0..n / side {
                        let idx = |i: usize| (block * side + i) * stride + inner;
                        let sum: Complex64 = (0..side).map(|i| outer[idx(i)]).sum();
                        let mean = sum * scale;
                        (0..side).for_each(|i| outer[idx(i)] = mean);
                    }
                }
            }
        }
        Ok(DenseFunction::from_values(shape, values)?)
    }

    pub fn expect_sparse(
        &self,
        f: &SparseFunction,
        level: u32,
    ) -> Result<SparseFunction, MartingaleError> {
        self.check_dim(f.dim())?;
        let side = self.side(level)?;
        let mut sums: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (p, &v) in f.entries() {
            *sums.entry(self.cube_index(p, level)?).or_default() += v;
        }
        let volume = (side as f64).powi(self.dim as i32);
        let mut out = SparseFunction::new(self.dim);
        let mut offset = vec![0u64; self.dim];
        for (t, sum) in sums {
            let mean = sum / volume;
            offset.iter_mut().for_each(|o| *o = 0);
            loop {
                let p: Vec<i64> = t
                    .iter()
                    .zip(&offset)
                    .map(|(&ti, &o)| ti * side as i64 + o as i64)
                    .collect();
                out.add_at(p, mean)?;
                let Some(axis) = offset.iter().rposition(|&o| o + 1 < side) else {
                    break;
                };
                offset[axis] += 1;
                offset[axis + 1..].iter_mut().for_each(|o| *o = 0);
            }
        }
        Ok(out)
    }

    /// `D_m f = E_m f - E_{m-1} f`, `m >= 1`.
    pub fn martingale_difference(
        &self,
        f: &LatticeFunction,
        m: u32,
    ) -> Result<LatticeFunction, MartingaleError> {
        if m == 0 {
            return Err(MartingaleError::ZeroLevel);
        }
        let hi = self.conditional_expectation(f, m)?;
        let lo = self.conditional_expectation(f, m - 1)?;
        Ok(match (hi, lo) {
            (LatticeFunction::Dense(a), LatticeFunction::Dense(b)) => a.sub(&b).into(),
            (LatticeFunction::Sparse(a), LatticeFunction::Sparse(b)) => {
                let mut out = a;
                for (p, &v) in b.entries() {
                    out.add_at(p.clone(), -v)?;
                }
                out.into()
            }
            _ => unreachable!("conditional expectation keeps the representation"),
        })
    }

    /// `J_lam` of the sequence `(E_l f(x))_{l in levels}` at every point.
    pub fn martingale_jump_field(
        &self,
        f: &LatticeFunction,
        lam: f64,
        levels: &[u32],
    ) -> Result<JumpField, MartingaleError> {
        let scales: Vec<u64> = levels.iter().map(|&l| l as u64).collect();
        let expectations = levels
            .iter()
            .map(|&l| self.conditional_expectation(f, l))
            .collect::<Result<Vec<_>, _>>()?;
        let values = match f {
            LatticeFunction::Dense(_) => FamilyValues::Dense(
                expectations
                    .into_iter()
                    .map(|e| e.into_dense().expect("dense"))
                    .collect(),
            ),
            LatticeFunction::Sparse(_) => FamilyValues::Sparse(
                expectations
                    .into_iter()
                    .map(|e| e.as_sparse().expect("sparse").clone())
                    .collect(),
            ),
        };
        let family = Family::from_values(scales, values)?;
        Ok(jump_field(&family, lam)?)
    }

    fn check_dim(&self, found: usize) -> Result<(), MartingaleError> {
        if found != self.dim {
            return Err(MartingaleError::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, random_test_function, GeneratorSpec, GridShape};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn base_from_norm() {
        assert_eq!(DyadicScheme::for_norm_sq(1, 1).unwrap().base(), 2);
        assert_eq!(DyadicScheme::for_norm_sq(2, 1).unwrap().base(), 3);
        assert_eq!(DyadicScheme::for_norm_sq(4, 1).unwrap().base(), 4);
        assert_eq!(DyadicScheme::for_norm_sq(5, 1).unwrap().base(), 5);
        assert!(DyadicScheme::new(1, 1).is_err());
    }

    #[test]
    fn cube_indices_nest() {
        let s = DyadicScheme::new(3, 2).unwrap();
        assert_eq!(s.cube_index(&[0, 0], 4).unwrap(), vec![0, 0]);
        assert_eq!(
            DyadicScheme::new(2, 1)
                .unwrap()
                .cube_index(&[3], 1)
                .unwrap(),
            vec![1]
        );
        assert_eq!(s.cube_index(&[-1, 9], 2).unwrap(), vec![-1, 1]);
        for x in -40..40 {
            for y in -40..40 {
                for l1 in 0..3 {
                    for l2 in l1..4 {
                        let t1 = s.cube_index(&[x, y], l1).unwrap();
                        let via = s.cube_index(&t1, l2 - l1).unwrap();
                        assert_eq!(via, s.cube_index(&[x, y], l2).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        let s = DyadicScheme::new(2, 1).unwrap();
        let shape = GridShape::new(8, 1).unwrap();
        let delta: LatticeFunction = DenseFunction::delta(shape).into();
        let e1 = s.conditional_expectation(&delta, 1).unwrap();
        let expect = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(e1.as_dense().unwrap().values(), expect.map(c).as_slice());
        let d1 = s.martingale_difference(&delta, 1).unwrap();
        let expect = [-0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(d1.as_dense().unwrap().values(), expect.map(c).as_slice());
        let sparse = s
            .martingale_difference(&SparseFunction::delta(1).into(), 1)
            .unwrap();
        assert_eq!(sparse.as_sparse().unwrap().get(&[0]), c(-0.5));
        assert_eq!(sparse.as_sparse().unwrap().get(&[1]), c(0.5));
        assert!(s.conditional_expectation(&delta, 4).is_err());
    }

    #[test]
    fn tower_and_orthogonality() {
        let s = DyadicScheme::new(2, 3).unwrap();
        let shape = GridShape::new(8, 3).unwrap();
        let f = random_test_function(4, shape, &GeneratorSpec::named("gaussian-iid")).unwrap();
        let top = s.max_level(8);
        assert_eq!(top, 3);
        for l1 in 0..=top {
            for l2 in 0..=top {
                let a = s
                    .conditional_expectation(&s.conditional_expectation(&f, l1).unwrap(), l2)
                    .unwrap();
                let b = s.conditional_expectation(&f, l1.max(l2)).unwrap();
                assert!(a.as_dense().unwrap().max_abs_diff(b.as_dense().unwrap()) < 1e-12);
            }
        }
        let mut energy = lp_norm(&s.conditional_expectation(&f, top).unwrap(), 2.0)
            .unwrap()
            .powi(2);
        let mut rebuilt = s
            .conditional_expectation(&f, top)
            .unwrap()
            .into_dense()
            .unwrap();
        for m in 1..=top {
            let d = s.martingale_difference(&f, m).unwrap();
            energy += lp_norm(&d, 2.0).unwrap().powi(2);
            rebuilt = rebuilt.sub(d.as_dense().unwrap());
            let e = s.conditional_expectation(&d, m).unwrap();
            assert!(lp_norm(&e, f64::INFINITY).unwrap() < 1e-12);
        }
        let total = lp_norm(&f, 2.0).unwrap().powi(2);
        assert!((energy - total).abs() < 1e-10 * total);
        assert!(rebuilt.max_abs_diff(f.as_dense().unwrap()) < 1e-12);
    }

    #[test]
    fn sparse_matches_dense() {
        let s = DyadicScheme::new(3, 2).unwrap();
        let shape = GridShape::new(9, 2).unwrap();
        let sparse =
            SparseFunction::from_entries(2, [(vec![1, 4], c(2.0)), (vec![7, 0], c(-1.0))]).unwrap();
        let dense = sparse.to_dense(shape).unwrap();
        let a = s
            .expect_sparse(&sparse, 1)
            .unwrap()
            .to_dense(shape)
            .unwrap();
        let b = s.expect_dense(&dense, 1).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn jump_field_edge_cases() {
        let s = DyadicScheme::new(2, 2).unwrap();
        let shape = GridShape::new(8, 2).unwrap();
        let one: LatticeFunction = DenseFunction::constant(shape, c(3.0)).into();
        let j = s.martingale_jump_field(&one, 0.1, &[0, 1, 2]).unwrap();
        assert_eq!(lp_norm(&j.counts, 1.0).unwrap(), 0.0);
        let delta: LatticeFunction = DenseFunction::delta(shape).into();
        let j = s.martingale_jump_field(&delta, 2.1, &[0, 1, 2, 3]).unwrap();
        assert_eq!(lp_norm(&j.counts, 1.0).unwrap(), 0.0);
        // At the origin: 1, 1/4, 1/16, 1/64; jumps 1 -> 1/4 and 1/4 -> 1/64.
        let j = s.martingale_jump_field(&delta, 0.2, &[0, 1, 2, 3]).unwrap();
        assert_eq!(j.counts.as_dense().unwrap().values()[0], c(2.0));
    }
}
