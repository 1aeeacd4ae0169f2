//! Small special-function helpers shared across modules.

use std::f64::consts::PI;

/// Surface area of the unit sphere `S^d ⊂ R^{d+1}`, `2π^{(d+1)/2} / Γ((d+1)/2)`.
///
/// Uses `|S^0| = 2`, `|S^1| = 2π` and `|S^d| = 2π |S^{d-2}| / (d - 1)`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(d - 2) / (d as f64 - 1.0),
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln B(a, b)` for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Generalised binomial coefficient `Γ(x + 1) / (Γ(k + 1) Γ(x - k + 1))`
/// for `x ≥ k - 1`, computed by the finite product.
pub fn binomial(x: f64, k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (x - k as f64 + i as f64) / i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn areas_match_closed_forms() {
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(3), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(4), 8.0 * PI * PI / 3.0, max_relative = 1e-15);
        for d in 2..8 {
            let gamma_form =
                2.0 * PI.powf((d as f64 + 1.0) / 2.0) / ln_gamma((d as f64 + 1.0) / 2.0).exp();
            assert_relative_eq!(sphere_area(d), gamma_form, max_relative = 1e-13);
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(7.0, 5), 21.0);
        assert_eq!(binomial(4.0, 0), 1.0);
        assert_relative_eq!(binomial(2.5, 2), 2.5 * 1.5 / 2.0);
    }
}
