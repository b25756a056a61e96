use rayon::prelude::*;

use super::{DenseFunction, GridError, LatticeFunction};

const CHUNK: usize = 8192;

/// Sum with a fixed chunking so the result does not depend on thread count.
pub fn deterministic_sum(values: &[f64]) -> f64 {
    let partial: Vec<f64> = values
        .par_chunks(CHUNK)
        .map(|c| c.iter().sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn norm_of_moduli(moduli: &[f64], p: f64) -> Result<f64, GridError> {
    if p.is_nan() || p < 1.0 {
        return Err(GridError::InvalidExponent(p));
    }
    let max = moduli.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // Rescale by the maximum so large p cannot overflow.
    let scaled: Vec<f64> = moduli.par_iter().map(|m| (m / max).powf(p)).collect();
    Ok(max * deterministic_sum(&scaled).powf(1.0 / p))
}

/// `l^p` norm over the grid or the support, `p` in `[1, inf]`.
pub fn lp_norm(f: &LatticeFunction, p: f64) -> Result<f64, GridError> {
    match f {
        LatticeFunction::Dense(d) => lp_norm_dense(d, p),
        LatticeFunction::Sparse(s) => {
            let moduli: Vec<f64> = s.entries().values().map(|v| v.norm()).collect();
            norm_of_moduli(&moduli, p)
        }
    }
}

pub fn lp_norm_dense(f: &DenseFunction, p: f64) -> Result<f64, GridError> {
    let moduli: Vec<f64> = f.values().par_iter().map(|v| v.norm()).collect();
    norm_of_moduli(&moduli, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridShape, SparseFunction};
    use num_complex::Complex64;

    #[test]
    fn delta_has_unit_norm() {
        let shape = GridShape::new(6, 2).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert_eq!(
                lp_norm(&DenseFunction::delta(shape).into(), p).unwrap(),
                1.0
            );
            assert_eq!(lp_norm(&SparseFunction::delta(3).into(), p).unwrap(), 1.0);
        }
    }

    #[test]
    fn constant_on_four_points() {
        let shape = GridShape::new(4, 1).unwrap();
        let f = DenseFunction::constant(shape, Complex64::new(1.0, 0.0));
        assert!((lp_norm_dense(&f, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((lp_norm_dense(&f, 1.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn large_exponent_does_not_overflow() {
        let shape = GridShape::new(2, 1).unwrap();
        let f = DenseFunction::from_real(shape, vec![1e300, 1e300]).unwrap();
        let v = lp_norm_dense(&f, 4.0).unwrap();
        assert!((v / 1e300 - 2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        let f = SparseFunction::delta(1).into();
        assert_eq!(lp_norm(&f, 0.5), Err(GridError::InvalidExponent(0.5)));
    }
}
