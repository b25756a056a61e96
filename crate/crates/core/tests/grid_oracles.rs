use std::f64::consts::PI;

use proptest::prelude::*;
use simplicial_core::grid::{
    convolve, dft_forward, dft_inverse, lp_norm, random_test_function, DenseFunction,
    GeneratorSpec, GridShape, LatticeFunction, SparseFunction, Spectrum,
};
use simplicial_core::Complex64;

/// `F(a) = sum_x f(x) e(-x . a / N)` as a full double sum.
fn naive_dft(f: &DenseFunction, sign: f64) -> Vec<Complex64> {
    let shape = f.shape();
    let n = shape.period() as f64;
    (0..shape.len())
        .map(|a| {
            let pa = shape.point(a);
            f.values()
                .iter()
                .enumerate()
                .map(|(x, &v)| {
                    let px = shape.point(x);
                    let dot: i64 = pa.iter().zip(&px).map(|(u, w)| u * w).sum();
                    v * Complex64::from_polar(1.0, sign * 2.0 * PI * dot as f64 / n)
                })
                .sum()
        })
        .collect()
}

fn gaussian(seed: u64, shape: GridShape) -> DenseFunction {
    let mut spec = GeneratorSpec::named("gaussian-iid");
    spec.params.complex = true;
    random_test_function(seed, shape, &spec)
        .unwrap()
        .into_dense()
        .unwrap()
}

#[test]
fn forward_matches_double_sum() {
    let shape = GridShape::new(16, 2).unwrap();
    let f = gaussian(3, shape);
    let fast = dft_forward(&f);
    let slow = naive_dft(&f, -1.0);
    let err = fast
        .coefficients()
        .iter()
        .zip(&slow)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn inverse_matches_double_sum() {
    let shape = GridShape::new(12, 2).unwrap();
    let g = gaussian(4, shape);
    let spectrum = Spectrum::from_values(shape, g.values().to_vec()).unwrap();
    let fast = dft_inverse(&spectrum);
    let slow: Vec<Complex64> = naive_dft(&g, 1.0)
        .into_iter()
        .map(|v| v / shape.len() as f64)
        .collect();
    let err = fast
        .values()
        .iter()
        .zip(&slow)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

fn dense_strategy() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..9, 1usize..4, any::<u64>())
}

fn kernel_strategy(dim: usize) -> impl Strategy<Value = SparseFunction> {
    prop::collection::vec((prop::collection::vec(-3i64..4, dim), -2.0f64..2.0), 1..6).prop_map(
        move |entries| {
            SparseFunction::from_entries(
                dim,
                entries
                    .into_iter()
                    .map(|(p, v)| (p, Complex64::new(v, 0.0))),
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_and_parseval((n, d, seed) in dense_strategy()) {
        let shape = GridShape::new(n, d).unwrap();
        let f = gaussian(seed, shape);
        let spec = dft_forward(&f);
        let back = dft_inverse(&spec);
        let scale = lp_norm(&f.clone().into(), f64::INFINITY).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-10 * scale);
        let lhs = lp_norm(&f.into(), 2.0).unwrap().powi(2);
        let rhs: f64 = spec.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() / shape.len() as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
    }

    #[test]
    fn convolution_commutes_with_translation(
        (n, seed) in (7usize..10, any::<u64>()),
        kernel in kernel_strategy(2),
        shift in prop::collection::vec(-9i64..9, 2),
    ) {
        let shape = GridShape::new(n, 2).unwrap();
        let f = gaussian(seed, shape);
        let a = convolve(&f.translate(&shift).into(), &kernel).unwrap().output.into_dense().unwrap();
        let b = convolve(&f.into(), &kernel).unwrap().output.into_dense().unwrap().translate(&shift);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dense_and_sparse_paths_agree(
        kernel in kernel_strategy(2),
        support in prop::collection::vec((prop::collection::vec(0i64..4, 2), -1.0f64..1.0), 1..6),
    ) {
        // Supports fit in [0, 4) + [-3, 4), well inside a period of 16.
        let shape = GridShape::new(16, 2).unwrap();
        let f = SparseFunction::from_entries(2, support.into_iter().map(|(p, v)| (p, Complex64::new(v, 0.0)))).unwrap();
        let sparse = convolve(&f.clone().into(), &kernel).unwrap();
        let dense = convolve(&f.to_dense(shape).unwrap().into(), &kernel).unwrap();
        prop_assert!(!dense.wraparound);
        let lifted = sparse.output.as_sparse().unwrap().to_dense(shape).unwrap();
        prop_assert!(lifted.max_abs_diff(dense.output.as_dense().unwrap()) < 1e-10);
    }

    #[test]
    fn delta_is_neutral(kernel in kernel_strategy(3)) {
        let out = convolve(&SparseFunction::delta(3).into(), &kernel).unwrap();
        prop_assert_eq!(out.output, LatticeFunction::Sparse(kernel));
    }

    #[test]
    fn band_limited_functions(seed in any::<u64>(), band in prop::collection::btree_set(0usize..64, 1..10)) {
        let shape = GridShape::new(8, 2).unwrap();
        let band: Vec<usize> = band.into_iter().collect();
        let f = random_test_function(seed, shape, &GeneratorSpec::fourier_band(band.clone())).unwrap();
        let spec = dft_forward(f.as_dense().unwrap());
        for (a, c) in spec.coefficients().iter().enumerate() {
            if !band.contains(&a) {
                prop_assert!(c.norm() < 1e-12);
            }
        }
    }
}
