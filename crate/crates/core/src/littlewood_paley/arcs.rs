use num_bigint::BigUint;

use crate::grid::GridShape;

/// Radius of an arc test as `factor * (2|s|)^{j - l + shift}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcScale {
    pub factor_num: u64,
    pub factor_den: u64,
    pub shift: i64,
}

impl ArcScale {
    /// The arcs `Omega^s_{l,j}` themselves.
    pub const OUTER: ArcScale = ArcScale {
        factor_num: 1,
        factor_den: 1,
        shift: 0,
    };
    /// Where `Psi^s_{l,j}` sits on its plateau.
    pub const PLATEAU: ArcScale = ArcScale {
        factor_num: 1,
        factor_den: 2,
        shift: 0,
    };
    /// Where both `Psi^s_{l,j}` and `Psi^s_{l,j+1}` sit on their plateaus.
    pub const DELTA_PLATEAU: ArcScale = ArcScale {
        factor_num: 1,
        factor_den: 2,
        shift: -1,
    };
}

/// `Omega^s_{l,j} = [-(2|s|)^{j-l}, (2|s|)^{j-l}]^d + (t_j^{-1} Z)^d` on the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyArcs {
    pub norm_sq: u64,
    pub l: u32,
    pub j: u32,
    pub step: u64,
}

impl FrequencyArcs {
    pub fn new(norm_sq: u64, l: u32, j: u32, step: u64) -> Self {
        Self {
            norm_sq,
            l,
            j,
            step,
        }
    }

    pub fn half_width(&self) -> f64 {
        (2.0 * (self.norm_sq as f64).sqrt()).powi(self.j as i32 - self.l as i32)
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.step as f64
    }

    fn exponent(&self, scale: ArcScale) -> i64 {
        self.j as i64 - self.l as i64 + scale.shift
    }

    /// Floating-point membership for arbitrary `xi`.
    pub fn contains(&self, xi: &[f64]) -> bool {
        self.within(xi, ArcScale::OUTER)
    }

    pub fn within(&self, xi: &[f64], scale: ArcScale) -> bool {
        let radius = scale.factor_num as f64 / scale.factor_den as f64
            * (2.0 * (self.norm_sq as f64).sqrt()).powi(self.exponent(scale) as i32);
        let t = self.step as f64;
        xi.iter().all(|&x| {
            let u = (t * x).rem_euclid(1.0);
            u.min(1.0 - u) / t <= radius
        })
    }

    /// Exact membership of the grid frequency `a / n`.
    pub fn contains_grid(&self, a: &[usize], n: usize) -> bool {
        self.within_grid(a, n, ArcScale::OUTER)
    }

    /// Exact test of `dist_inf(a / n, t^{-1} Z^d) <= radius(scale)`, by clearing
    /// denominators: with `r = a t mod n` the distance is `min(r, n - r) / (n t)`.
    pub fn within_grid(&self, a: &[usize], n: usize, scale: ArcScale) -> bool {
        a.iter().all(|&c| self.axis_within(c, n, scale))
    }

    fn axis_within(&self, a: usize, n: usize, scale: ArcScale) -> bool {
        let r = (a as u128 * self.step as u128) % n as u128;
        let num = BigUint::from(r.min(n as u128 - r));
        let nt = BigUint::from(n as u128 * self.step as u128);
        let four_norm = BigUint::from(4 * self.norm_sq);
        let e = self.exponent(scale);
        let mut lhs = &num * &num * BigUint::from(scale.factor_den).pow(2);
        let mut rhs = &nt * &nt * BigUint::from(scale.factor_num).pow(2);
        if e < 0 {
            lhs *= four_norm.pow((-e) as u32);
        } else {
            rhs *= four_norm.pow(e as u32);
        }
        lhs <= rhs
    }

    /// Per-axis membership table for `a = 0..n`.
    pub fn axis_mask(&self, n: usize, scale: ArcScale) -> Vec<bool> {
        (0..n).map(|a| self.axis_within(a, n, scale)).collect()
    }

    /// Flat indices of grid frequencies inside (or, with `inside = false`,
    /// outside) the arcs at the given scale.
    pub fn grid_indices(&self, shape: GridShape, scale: ArcScale, inside: bool) -> Vec<usize> {
        let mask = self.axis_mask(shape.period(), scale);
        let mut idx = vec![0; shape.dim()];
        (0..shape.len())
            .filter(|&flat| {
                shape.multi_index(flat, &mut idx);
                idx.iter().all(|&c| mask[c]) == inside
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points_are_members() {
        let arcs = FrequencyArcs::new(1, 8, 2, 12);
        for b in 0..12 {
            assert!(arcs.contains_grid(&[b * 5, 0], 60));
            assert!(arcs.contains(&[b as f64 / 12.0]));
        }
        assert!(!arcs.contains_grid(&[2], 60));
    }

    #[test]
    fn wide_arcs_cover_everything() {
        // j > l: half-width (2|s|)^{j-l} >= 1.
        let arcs = FrequencyArcs::new(1, 1, 2, 12);
        assert!((0..97).all(|a| arcs.contains_grid(&[a], 97)));
    }

    #[test]
    fn exact_boundary() {
        // step 1, half-width 1/4 at l = 2, |s| = 1: a / 8 is inside iff a in {0, 1, 2, 6, 7}.
        let arcs = FrequencyArcs::new(1, 2, 0, 1);
        let mask = arcs.axis_mask(8, ArcScale::OUTER);
        assert_eq!(
            mask,
            vec![true, true, true, false, false, false, true, true]
        );
        let plateau = arcs.axis_mask(8, ArcScale::PLATEAU);
        assert_eq!(
            plateau,
            vec![true, true, false, false, false, false, false, true]
        );
    }

    #[test]
    fn irrational_norm_agrees_with_float() {
        let arcs = FrequencyArcs::new(3, 4, 1, 2);
        for a in 0..200 {
            let exact = arcs.contains_grid(&[a], 200);
            let float = arcs.contains(&[a as f64 / 200.0]);
            assert_eq!(exact, float, "a = {a}");
        }
    }
}
