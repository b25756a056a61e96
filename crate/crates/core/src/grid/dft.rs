use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{DenseFunction, GridError, GridShape};

/// Coefficients indexed by frequency multi-index `a in {0..N-1}^d`, i.e. the
/// torus point `xi = a / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    shape: GridShape,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_values(shape: GridShape, coefficients: Vec<Complex64>) -> Result<Self, GridError> {
        if coefficients.len() != shape.len() {
            return Err(GridError::LengthMismatch {
                expected: shape.len(),
                found: coefficients.len(),
            });
        }
        if coefficients
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(GridError::NonFinite);
        }
        Ok(Self {
            shape,
            coefficients,
        })
    }

    /// Real multiplier values, e.g. a Fourier multiplier sampled on the grid.
    pub fn from_real(shape: GridShape, values: Vec<f64>) -> Result<Self, GridError> {
        Self::from_values(
            shape,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Pointwise product, used to apply a multiplier.
    pub fn multiply(&self, other: &Spectrum) -> Spectrum {
        assert_eq!(self.shape, other.shape, "spectrum shapes differ");
        Spectrum {
            shape: self.shape,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// A one-dimensional transform applied along every axis of a grid.
pub trait DftBackend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Transform each contiguous run of `len` values in `lines` in place,
    /// unnormalised, with kernel `e(-x a / len)` (forward) or `e(+x a / len)`.
    fn process_lines(&self, lines: &mut [Complex64], len: usize, inverse: bool);
}

/// Mixed-radix FFT from `rustfft`; any length.
#[derive(Debug, Default, Clone, Copy)]
pub struct RustFftDft;

impl DftBackend for RustFftDft {
    fn name(&self) -> &'static str {
        "rustfft"
    }

    fn process_lines(&self, lines: &mut [Complex64], len: usize, inverse: bool) {
        let mut planner = FftPlanner::<f64>::new();
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(lines, &mut scratch);
    }
}

/// Direct `O(N^2)` sums per line; works for every `N` with no planning.
#[derive(Debug, Default, Clone, Copy)]
pub struct NaiveDft;

impl DftBackend for NaiveDft {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn process_lines(&self, lines: &mut [Complex64], len: usize, inverse: bool) {
        let sign = if inverse { 1.0 } else { -1.0 };
        let twiddles: Vec<Complex64> = (0..len)
            .map(|t| {
                Complex64::from_polar(
                    1.0,
                    sign * 2.0 * std::f64::consts::PI * t as f64 / len as f64,
                )
            })
            .collect();
        let mut out = vec![Complex64::default(); len];
        for line in lines.chunks_exact_mut(len) {
            for (a, slot) in out.iter_mut().enumerate() {
                *slot = line
                    .iter()
                    .enumerate()
                    .map(|(x, &v)| v * twiddles[(x * a) % len])
                    .sum();
            }
            line.copy_from_slice(&out);
        }
    }
}

/// Transform backends by name.
pub struct DftRegistry {
    backends: BTreeMap<&'static str, Arc<dyn DftBackend>>,
}

impl DftRegistry {
    pub fn empty() -> Self {
        Self {
            backends: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(RustFftDft));
        r.register(Arc::new(NaiveDft));
        r
    }

    pub fn register(&mut self, backend: Arc<dyn DftBackend>) {
        self.backends.insert(backend.name(), backend);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn DftBackend>, GridError> {
        self.backends
            .get(name)
            .cloned()
            .ok_or_else(|| GridError::UnknownBackend(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.backends.keys().copied()
    }
}

/// Apply the backend along each axis of a row-major grid.
fn transform_axes(
    backend: &dyn DftBackend,
    data: &mut [Complex64],
    shape: GridShape,
    inverse: bool,
) {
    let n = shape.period();
    for axis in 0..shape.dim() {
        let stride = shape.stride(axis);
        if stride == 1 {
            // Lines are contiguous; hand over whole blocks.
            data.par_chunks_mut(n * 256).for_each(|block| {
                backend.process_lines(block, n, inverse);
            });
            continue;
        }
        data.par_chunks_mut(n * stride).for_each(|block| {
            let mut lines = vec![Complex64::default(); n * stride];
            for i in 0..n {
                for o in 0..stride {
                    lines[o * n + i] = block[i * stride + o];
                }
            }
            backend.process_lines(&mut lines, n, inverse);
            for i in 0..n {
                for o in 0..stride {
                    block[i * stride + o] = lines[o * n + i];
                }
            }
        });
    }
}

pub fn dft_forward_with(backend: &dyn DftBackend, f: &DenseFunction) -> Spectrum {
    let shape = f.shape();
    let mut data = f.values().to_vec();
    transform_axes(backend, &mut data, shape, false);
    Spectrum {
        shape,
        coefficients: data,
    }
}

pub fn dft_inverse_with(backend: &dyn DftBackend, spectrum: &Spectrum) -> DenseFunction {
    let shape = spectrum.shape;
    let mut data = spectrum.coefficients.clone();
    transform_axes(backend, &mut data, shape, true);
    let scale = 1.0 / shape.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    DenseFunction::from_raw(shape, data)
}

/// `F(a) = sum_x f(x) e(-x . a / N)`.
pub fn dft_forward(f: &DenseFunction) -> Spectrum {
    dft_forward_with(&RustFftDft, f)
}

/// Inverse of [`dft_forward`], normalised by `1 / N^d`.
pub fn dft_inverse(spectrum: &Spectrum) -> DenseFunction {
    dft_inverse_with(&RustFftDft, spectrum)
}
