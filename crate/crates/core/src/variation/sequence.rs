use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::VariationError;

/// Variation exponent `r` in `(0, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(r: f64) -> Result<Self, VariationError> {
        if r.is_nan() || r <= 0.0 {
            Err(VariationError::InvalidExponent(r))
        } else if r.is_infinite() {
            Ok(Exponent::Infinity)
        } else {
            Ok(Exponent::Finite(r))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(r) => r,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl TryFrom<f64> for Exponent {
    type Error = VariationError;
    fn try_from(r: f64) -> Result<Self, Self::Error> {
        Exponent::new(r)
    }
}

impl From<Exponent> for f64 {
    fn from(r: Exponent) -> f64 {
        r.value()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

/// A value an operator family takes at one point.
pub trait SampleValue: Copy + Send + Sync {
    fn distance(self, other: Self) -> f64;
    fn is_finite(self) -> bool;

    /// Maximal number of chained jumps of size `> lam`: earliest-finish
    /// greedy, with the closing index found by an `O(L^2)` scan.
    fn jump_count(values: &[Self], lam: f64) -> usize {
        let mut count = 0;
        let mut start = 0;
        'outer: while start < values.len() {
            for v in start + 1..values.len() {
                if values[start..v]
                    .iter()
                    .any(|&u| values[v].distance(u) > lam)
                {
                    count += 1;
                    start = v;
                    continue 'outer;
                }
            }
            break;
        }
        count
    }
}

impl SampleValue for f64 {
    fn distance(self, other: Self) -> f64 {
        (self - other).abs()
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    /// Same greedy, with a running min and max over the open window.
    fn jump_count(values: &[Self], lam: f64) -> usize {
        let Some(&first) = values.first() else {
            return 0;
        };
        let (mut lo, mut hi) = (first, first);
        let mut count = 0;
        for &a in &values[1..] {
            if a - lo > lam || hi - a > lam {
                count += 1;
                lo = a;
                hi = a;
            } else {
                lo = lo.min(a);
                hi = hi.max(a);
            }
        }
        count
    }
}

impl SampleValue for Complex64 {
    fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// `v_r` by the dynamic program `best[j] = max(0, max_{i<j} best[i] + |a_j - a_i|^r)`;
/// for `r = inf` the two-point form `max_{i<j} |a_j - a_i|`.
pub fn v_r<T: SampleValue>(values: &[T], r: Exponent) -> f64 {
    match r {
        Exponent::Infinity => {
            let mut best = 0.0f64;
            for (j, &b) in values.iter().enumerate() {
                for &a in &values[..j] {
                    best = best.max(b.distance(a));
                }
            }
            best
        }
        Exponent::Finite(r) => {
            let mut best = vec![0.0f64; values.len()];
            for j in 1..values.len() {
                best[j] = (0..j)
                    .map(|i| best[i] + values[j].distance(values[i]).powf(r))
                    .fold(0.0, f64::max);
            }
            best.iter().copied().fold(0.0, f64::max).powf(1.0 / r)
        }
    }
}

pub fn jump_count<T: SampleValue>(values: &[T], lam: f64) -> Result<usize, VariationError> {
    if lam.is_nan() || lam <= 0.0 {
        return Err(VariationError::InvalidJump(lam));
    }
    Ok(T::jump_count(values, lam))
}

/// Values of an operator family at one point, paired with their scales.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSequence<T> {
    scales: Vec<f64>,
    values: Vec<T>,
}

impl<T: SampleValue> SampleSequence<T> {
    pub fn new(scales: Vec<f64>, values: Vec<T>) -> Result<Self, VariationError> {
        if scales.len() != values.len() {
            return Err(VariationError::LengthMismatch {
                scales: scales.len(),
                values: values.len(),
            });
        }
        if scales.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(VariationError::UnsortedScales);
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(VariationError::NonFinite);
        }
        Ok(Self { scales, values })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn variation(&self, r: Exponent) -> f64 {
        v_r(&self.values, r)
    }

    pub fn jumps(&self, lam: f64) -> Result<usize, VariationError> {
        jump_count(&self.values, lam)
    }
}
