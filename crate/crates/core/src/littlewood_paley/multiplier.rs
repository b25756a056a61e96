use rayon::prelude::*;

use super::{lcm_t, psi_hat_1, FrequencyArcs, LpError};
use crate::grid::GridShape;

/// Cap on the number of Poisson terms per coordinate.
pub const MAX_POISSON_TERMS: f64 = 16_777_216.0;

/// Parameters of `Psi_{l,j}`: step `t_j`, width `(2|s|)^{l-j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSpec {
    pub l: u32,
    pub j: u32,
    pub step: u64,
    pub width: f64,
    pub norm_sq: u64,
}

impl MultiplierSpec {
    pub fn new(norm_sq: u64, l: u32, j: u32) -> Result<Self, LpError> {
        if norm_sq == 0 {
            return Err(LpError::ZeroNorm);
        }
        let step = lcm_t(j)?;
        let width = (2.0 * (norm_sq as f64).sqrt()).powi(l as i32 - j as i32);
        if width <= step as f64 {
            log::debug!("Psi_(l={l}, j={j}): width {width} does not exceed step {step}");
        }
        Ok(Self {
            l,
            j,
            step,
            width,
            norm_sq,
        })
    }

    /// Whether neighbouring arcs of the periodised bump overlap. Without
    /// overlap the multiplier is exactly 1 on the inner half-arcs.
    pub fn arcs_overlap(&self) -> bool {
        self.width < 1.5 * self.step as f64
    }

    pub fn arcs(&self) -> FrequencyArcs {
        FrequencyArcs::new(self.norm_sq, self.l, self.j, self.step)
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64, LpError> {
        multiplier_psi(self.step, self.width, xi)
    }

    /// Per-axis values at `a / n`, `a = 0..n`.
    pub fn axis_table(&self, n: usize) -> Result<Vec<f64>, LpError> {
        axis_table(self.step, self.width, n)
    }
}

fn term_range(centre: f64, radius: f64, step: u64, width: f64) -> Result<(i64, i64), LpError> {
    if !(2.0 * radius + 1.0 <= MAX_POISSON_TERMS) {
        return Err(LpError::TooManyTerms { step, width });
    }
    Ok((
        (centre - radius).floor() as i64,
        (centre + radius).ceil() as i64,
    ))
}

/// `sum_{x in Z^d} psi_hat((width / step) (x + step xi))`, a product of
/// one-dimensional sums with finitely many nonzero terms.
pub fn multiplier_psi(step: u64, width: f64, xi: &[f64]) -> Result<f64, LpError> {
    let radius = step as f64 / width;
    let mut product = 1.0;
    for &t in xi {
        let u = step as f64 * t;
        let (lo, hi) = term_range(-u, radius, step, width)?;
        product *= (lo..=hi)
            .map(|x| psi_hat_1((x as f64 + u) / radius))
            .sum::<f64>();
        if product == 0.0 {
            break;
        }
    }
    Ok(product)
}

/// One-dimensional factor at every `a / n`. The argument is formed from the
/// integer numerator `x n + step a` so plateau edges are hit exactly when
/// `width` is exact.
pub fn axis_table(step: u64, width: f64, n: usize) -> Result<Vec<f64>, LpError> {
    let radius = step as f64 / width;
    let denom = (step as u128 * n as u128) as f64;
    term_range(0.0, radius, step, width)?;
    Ok((0..n)
        .into_par_iter()
        .map(|a| {
            let centre = -(step as f64) * a as f64 / n as f64;
            let lo = (centre - radius).floor() as i128;
            let hi = (centre + radius).ceil() as i128;
            (lo..=hi)
                .map(|x| {
                    let num = x * n as i128 + step as i128 * a as i128;
                    psi_hat_1(num as f64 * width / denom)
                })
                .sum()
        })
        .collect())
}

/// Tensor product of a per-axis table over a full grid.
pub fn tensor_grid(table: &[f64], shape: GridShape) -> Vec<f64> {
    assert_eq!(
        table.len(),
        shape.period(),
        "table length must equal the period"
    );
    let dim = shape.dim();
    let mut out = vec![0.0; shape.len()];
    out.par_chunks_mut(4096)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut idx = vec![0; dim];
            for (i, slot) in slots.iter_mut().enumerate() {
                shape.multi_index(chunk * 4096 + i, &mut idx);
                *slot = idx.iter().map(|&a| table[a]).product();
            }
        });
    out
}

/// `Psi^s_{l,j}(xi)`.
pub fn psi_multiplier(norm_sq: u64, l: u32, j: u32, xi: &[f64]) -> Result<f64, LpError> {
    MultiplierSpec::new(norm_sq, l, j)?.eval(xi)
}

/// `Delta Psi^s_{l,j} = Psi^s_{l,j+1} - Psi^s_{l,j}`.
pub fn delta_psi_multiplier(norm_sq: u64, l: u32, j: u32, xi: &[f64]) -> Result<f64, LpError> {
    Ok(psi_multiplier(norm_sq, l, j + 1, xi)? - psi_multiplier(norm_sq, l, j, xi)?)
}

/// `Psi^s_{l,j}` at every frequency of the grid.
pub fn psi_multiplier_grid(
    norm_sq: u64,
    l: u32,
    j: u32,
    shape: GridShape,
) -> Result<Vec<f64>, LpError> {
    let table = MultiplierSpec::new(norm_sq, l, j)?.axis_table(shape.period())?;
    Ok(tensor_grid(&table, shape))
}

pub fn delta_psi_multiplier_grid(
    norm_sq: u64,
    l: u32,
    j: u32,
    shape: GridShape,
) -> Result<Vec<f64>, LpError> {
    let upper = psi_multiplier_grid(norm_sq, l, j + 1, shape)?;
    let lower = psi_multiplier_grid(norm_sq, l, j, shape)?;
    Ok(upper.iter().zip(&lower).map(|(a, b)| a - b).collect())
}
