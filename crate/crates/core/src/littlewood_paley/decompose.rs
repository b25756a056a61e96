use rayon::prelude::*;

use super::{band_count, psi_multiplier_grid, LpError, MultiplierSpec};
use crate::grid::{dft_forward, dft_inverse, DenseFunction, GridShape, Spectrum};

/// `f = f1 + f2 + f3` with `f1 = f * Psi_{l,0}`,
/// `f2 = sum_{j=0}^{J_l - 3} f * Delta Psi_{l,j}` and `f3 = f - f * Psi_{l,J_l - 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub f1: DenseFunction,
    pub f2: DenseFunction,
    pub f3: DenseFunction,
}

/// Grid values of the three multipliers. For `J_l < 3` the middle band is
/// empty and the last multiplier uses index `max(J_l - 2, 0)`.
pub fn decomposition_multipliers(
    norm_sq: u64,
    l: u32,
    shape: GridShape,
) -> Result<[Vec<f64>; 3], LpError> {
    let bands = band_count(l)?;
    let top = bands.saturating_sub(2);
    let psi: Vec<Vec<f64>> = (0..=top)
        .map(|j| psi_multiplier_grid(norm_sq, l, j, shape))
        .collect::<Result<_, _>>()?;
    let mut middle = vec![0.0; shape.len()];
    for j in 0..bands.saturating_sub(2) as usize {
        for (m, (hi, lo)) in middle.iter_mut().zip(psi[j + 1].iter().zip(&psi[j])) {
            *m += hi - lo;
        }
    }
    let last = psi[top as usize].iter().map(|v| 1.0 - v).collect();
    Ok([psi[0].clone(), middle, last])
}

pub fn decompose(f: &DenseFunction, norm_sq: u64, l: u32) -> Result<Decomposition, LpError> {
    let shape = f.shape();
    let spectrum = dft_forward(f);
    let [m1, m2, m3] = decomposition_multipliers(norm_sq, l, shape)?;
    let apply = |m: Vec<f64>| -> Result<DenseFunction, LpError> {
        Ok(dft_inverse(
            &spectrum.multiply(&Spectrum::from_real(shape, m)?),
        ))
    };
    Ok(Decomposition {
        f1: apply(m1)?,
        f2: apply(m2)?,
        f3: apply(m3)?,
    })
}

/// Which neighbouring pair of multipliers a square sum differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Increment {
    /// `Psi_{l,j+1} - Psi_{l,j}`, the band increment used by the decomposition.
    Band,
    /// `Psi_{l+1,j} - Psi_{l,j}`, the scale increment: same step, width
    /// multiplied by `2|s|`.
    Scale,
}

impl Increment {
    fn pair(
        self,
        norm_sq: u64,
        l: u32,
        j: u32,
    ) -> Result<(MultiplierSpec, MultiplierSpec), LpError> {
        let upper = match self {
            Increment::Band => MultiplierSpec::new(norm_sq, l, j + 1)?,
            Increment::Scale => MultiplierSpec::new(norm_sq, l + 1, j)?,
        };
        Ok((upper, MultiplierSpec::new(norm_sq, l, j)?))
    }
}

fn check_band(j: u32, l_max: u32) -> Result<u32, LpError> {
    let start = 1u32.checked_shl(j).filter(|&s| s <= l_max);
    start.ok_or(LpError::BandRange { j, l_max })
}

/// Partial sums of `sum_{l = 2^j}^{l_max} |Delta(xi)|^2`, one per `l`.
pub fn square_sum_delta(
    norm_sq: u64,
    j: u32,
    xi: &[f64],
    l_max: u32,
    increment: Increment,
) -> Result<Vec<f64>, LpError> {
    let start = check_band(j, l_max)?;
    let mut acc = 0.0;
    (start..=l_max)
        .map(|l| {
            let (hi, lo) = increment.pair(norm_sq, l, j)?;
            let d = hi.eval(xi)? - lo.eval(xi)?;
            acc += d * d;
            Ok(acc)
        })
        .collect()
}

/// `sum_{l = 2^j}^{l_max} |Delta|^2` at every frequency of the grid.
pub fn square_sum_delta_grid(
    norm_sq: u64,
    j: u32,
    shape: GridShape,
    l_max: u32,
    increment: Increment,
) -> Result<Vec<f64>, LpError> {
    let start = check_band(j, l_max)?;
    let n = shape.period();
    let tables: Vec<(Vec<f64>, Vec<f64>)> = (start..=l_max)
        .map(|l| {
            let (hi, lo) = increment.pair(norm_sq, l, j)?;
            Ok((hi.axis_table(n)?, lo.axis_table(n)?))
        })
        .collect::<Result<_, LpError>>()?;
    let dim = shape.dim();
    let mut out = vec![0.0; shape.len()];
    out.par_chunks_mut(4096)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut idx = vec![0; dim];
            for (i, slot) in slots.iter_mut().enumerate() {
                shape.multi_index(chunk * 4096 + i, &mut idx);
                *slot = tables
                    .iter()
                    .map(|(hi, lo)| {
                        let d = idx.iter().map(|&a| hi[a]).product::<f64>()
                            - idx.iter().map(|&a| lo[a]).product::<f64>();
                        d * d
                    })
                    .sum();
            }
        });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipliers_sum_to_one() {
        let shape = GridShape::new(24, 1).unwrap();
        for l in [1, 3, 4, 8, 12] {
            let [a, b, c] = decomposition_multipliers(1, l, shape).unwrap();
            for i in 0..shape.len() {
                assert!((a[i] + b[i] + c[i] - 1.0).abs() < 1e-12);
            }
            if l < 8 {
                assert!(b.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn single_middle_band_at_eight() {
        let shape = GridShape::new(24, 1).unwrap();
        let [_, b, _] = decomposition_multipliers(1, 8, shape).unwrap();
        let d0: Vec<f64> = psi_multiplier_grid(1, 8, 1, shape)
            .unwrap()
            .iter()
            .zip(psi_multiplier_grid(1, 8, 0, shape).unwrap())
            .map(|(x, y)| x - y)
            .collect();
        assert_eq!(b, d0);
    }

    #[test]
    fn square_sums_at_origin_and_monotone() {
        // At l = 2^j the upper width is below t_{j+1}: overlapping arcs lift the
        // sum above 1 at the origin. Past that both plateaus hold there.
        let at_origin = square_sum_delta(1, 1, &[0.0], 12, Increment::Band).unwrap();
        assert!(at_origin[0] > 1.0);
        let first_clean = (2..=12)
            .position(|l| !MultiplierSpec::new(1, l, 2).unwrap().arcs_overlap())
            .unwrap();
        assert!(at_origin.windows(2).skip(first_clean).all(|w| w[0] == w[1]));
        let sums = square_sum_delta(1, 1, &[0.3, 0.13], 14, Increment::Scale).unwrap();
        assert_eq!(sums.len(), 14 - 2 + 1);
        assert!(sums.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(
            square_sum_delta(1, 3, &[0.0], 7, Increment::Band),
            Err(LpError::BandRange { j: 3, l_max: 7 })
        );
    }

    #[test]
    fn grid_square_sum_matches_pointwise() {
        let shape = GridShape::new(20, 2).unwrap();
        for increment in [Increment::Band, Increment::Scale] {
            let grid = square_sum_delta_grid(2, 1, shape, 6, increment).unwrap();
            for flat in (0..shape.len()).step_by(7) {
                let xi: Vec<f64> = shape.point(flat).iter().map(|&c| c as f64 / 20.0).collect();
                let direct = *square_sum_delta(2, 1, &xi, 6, increment)
                    .unwrap()
                    .last()
                    .unwrap();
                assert!(
                    (grid[flat] - direct).abs() < 1e-12 * direct.max(1.0),
                    "{} vs {direct}",
                    grid[flat]
                );
            }
        }
    }
}
