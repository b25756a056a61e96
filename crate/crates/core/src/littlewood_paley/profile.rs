/// Smooth step `sigma(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})` on `[0, 1]`.
pub fn transition(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
}

/// One-dimensional bump: `1` on `|t| <= 1/2`, `0` on `|t| >= 1`.
pub fn psi_hat_1(t: f64) -> f64 {
    let t = t.abs();
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        transition(2.0 * (1.0 - t))
    }
}

/// Tensor product `prod_i psi_hat_1(xi_i)`.
pub fn psi_hat(xi: &[f64]) -> f64 {
    xi.iter().map(|&t| psi_hat_1(t)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_midpoint() {
        assert_eq!(psi_hat(&[0.0, 0.0]), 1.0);
        assert_eq!(psi_hat_1(0.5), 1.0);
        assert_eq!(psi_hat_1(-1.0), 0.0);
        assert_eq!(psi_hat(&[0.1, 1.2]), 0.0);
        assert!((psi_hat_1(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(psi_hat_1(0.6), psi_hat_1(-0.6));
    }

    #[test]
    fn monotone_on_transition() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = psi_hat_1(0.5 + i as f64 / 2000.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev);
            prev = v;
        }
    }
}
