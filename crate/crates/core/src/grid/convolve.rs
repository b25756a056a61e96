use num_complex::Complex64;
use rayon::prelude::*;

use super::{DenseFunction, GridError, LatticeFunction, SparseFunction};

/// Result of [`convolve`]. `wraparound` is set when a dense input is
/// convolved with a kernel whose support spans a full period on some axis,
/// so circular and non-periodic convolution differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Convolution {
    pub output: LatticeFunction,
    pub wraparound: bool,
}

/// `(f * w)(x) = sum_y w(y) f(x - y)`: circular on dense grids, exact for
/// sparse inputs.
pub fn convolve(f: &LatticeFunction, kernel: &SparseFunction) -> Result<Convolution, GridError> {
    if f.dim() != kernel.dim() {
        return Err(GridError::DimensionMismatch {
            expected: f.dim(),
            found: kernel.dim(),
        });
    }
    match f {
        LatticeFunction::Dense(d) => Ok(Convolution {
            wraparound: kernel.diameter() >= d.shape().period() as u64,
            output: convolve_dense(d, kernel).into(),
        }),
        LatticeFunction::Sparse(s) => Ok(Convolution {
            output: convolve_sparse(s, kernel)?.into(),
            wraparound: false,
        }),
    }
}

fn convolve_dense(f: &DenseFunction, kernel: &SparseFunction) -> DenseFunction {
    let shape = f.shape();
    let n = shape.period() as i64;
    let dim = shape.dim();
    let taps: Vec<(Vec<usize>, Complex64)> = kernel
        .entries()
        .iter()
        .map(|(y, &w)| (y.iter().map(|&c| c.rem_euclid(n) as usize).collect(), w))
        .collect();
    let strides: Vec<usize> = (0..dim).map(|a| shape.stride(a)).collect();
    let src = f.values();
    let mut out = vec![Complex64::default(); shape.len()];
    out.par_chunks_mut(4096)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut idx = vec![0usize; dim];
            for (i, slot) in slots.iter_mut().enumerate() {
                shape.multi_index(chunk * 4096 + i, &mut idx);
                let mut acc = Complex64::default();
                for (y, w) in &taps {
                    let mut flat = 0;
                    for a in 0..dim {
                        let mut c = idx[a] + shape.period() - y[a];
                        if c >= shape.period() {
                            c -= shape.period();
                        }
                        flat += c * strides[a];
                    }
                    acc += w * src[flat];
                }
                *slot = acc;
            }
        });
    DenseFunction::from_raw(shape, out)
}

fn convolve_sparse(
    f: &SparseFunction,
    kernel: &SparseFunction,
) -> Result<SparseFunction, GridError> {
    let mut out = SparseFunction::new(f.dim());
    for (x, &a) in f.entries() {
        for (y, &b) in kernel.entries() {
            let p: Vec<i64> = x.iter().zip(y).map(|(u, v)| u + v).collect();
            out.add_at(p, a * b)?;
        }
    }
    Ok(out)
}
