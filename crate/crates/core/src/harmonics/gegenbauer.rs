//! Gegenbauer polynomials and the orthonormal recurrence behind zonal
//! harmonics.

use crate::error::{Error, Result};
use crate::special::sphere_area;

const T_SLACK: f64 = 1e-12;
const RESCALE_ABOVE: f64 = 1e150;

fn check_argument(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + T_SLACK {
        return Err(Error::Domain(format!("argument {t} outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `C_p^α(t)` by the upward three-term recurrence
/// `p C_p = 2t(p + α - 1) C_{p-1} - (p + 2α - 2) C_{p-2}`.
///
/// The pair of running values is rescaled whenever it grows past `1e150`,
/// so large `α` only overflows when the final value itself does.
pub fn gegenbauer(p: u32, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Gegenbauer index {alpha} must be positive")));
    }
    let t = check_argument(t)?;
    if p == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut curr = 2.0 * alpha * t;
    let mut log_scale = 0.0;
    for k in 2..=p {
        let k = f64::from(k);
        let next = (2.0 * t * (k + alpha - 1.0) * curr - (k + 2.0 * alpha - 2.0) * prev) / k;
        prev = curr;
        curr = next;
        if curr.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            curr /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    Ok(curr * log_scale.exp())
}

/// Monic recurrence coefficient `β_k` of the Gegenbauer family with index
/// `α`: `t P_k = P_{k+1} + β_k P_{k-1}`.
#[inline]
pub(crate) fn monic_beta(k: u32, alpha: f64) -> f64 {
    let k = f64::from(k);
    k * (k + 2.0 * alpha - 1.0) / (4.0 * (k + alpha) * (k + alpha - 1.0))
}

/// Orthonormal Gegenbauer polynomials with respect to the weight
/// `(1 - t^2)^{(d-2)/2}` on `[-1, 1]` (index `α = (d - 1)/2`).
#[derive(Debug, Clone)]
pub struct OrthonormalGegenbauer {
    alpha: f64,
    q0: f64,
    sqrt_beta: Vec<f64>,
}

impl OrthonormalGegenbauer {
    /// Family for the polar weight of `S^d`; the weight has total mass
    /// `|S^d| / |S^{d-1}|`.
    pub fn for_sphere(d: usize, max_degree: u32) -> Self {
        let alpha = (d as f64 - 1.0) / 2.0;
        let mass = sphere_area(d) / sphere_area(d - 1);
        Self::new(alpha, mass, max_degree)
    }

    fn new(alpha: f64, mass: f64, max_degree: u32) -> Self {
        let sqrt_beta = (0..=max_degree + 1)
            .map(|k| if k == 0 { 0.0 } else { monic_beta(k, alpha).sqrt() })
            .collect();
        Self { alpha, q0: mass.sqrt().recip(), sqrt_beta }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn max_degree(&self) -> u32 {
        self.sqrt_beta.len() as u32 - 2
    }

    /// `q_p(t)`.
    pub fn value(&self, p: u32, t: f64) -> f64 {
        assert!(p <= self.max_degree(), "degree {p} above table size");
        let mut prev = 0.0;
        let mut curr = self.q0;
        for k in 0..p as usize {
            let next = (t * curr - self.sqrt_beta[k] * prev) / self.sqrt_beta[k + 1];
            prev = curr;
            curr = next;
        }
        curr
    }

    /// `(q_p(t), q_p'(t))`.
    pub fn value_and_derivative(&self, p: u32, t: f64) -> (f64, f64) {
        let (mut q_prev, mut q) = (0.0, self.q0);
        let (mut dq_prev, mut dq) = (0.0, 0.0);
        for k in 0..p as usize {
            let b_next = self.sqrt_beta[k + 1];
            let q_next = (t * q - self.sqrt_beta[k] * q_prev) / b_next;
            let dq_next = (q + t * dq - self.sqrt_beta[k] * dq_prev) / b_next;
            q_prev = q;
            q = q_next;
            dq_prev = dq;
            dq = dq_next;
        }
        (q, dq)
    }

    /// Sum of squares `Σ_{k<n} q_k(t)^2`, the reciprocal Christoffel weight.
    pub fn christoffel_sum(&self, n: u32, t: f64) -> f64 {
        let mut prev = 0.0;
        let mut curr = self.q0;
        let mut acc = curr * curr;
        for k in 0..n.saturating_sub(1) as usize {
            let next = (t * curr - self.sqrt_beta[k] * prev) / self.sqrt_beta[k + 1];
            prev = curr;
            curr = next;
            acc += curr * curr;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binomial;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn base_cases() {
        assert_eq!(gegenbauer(0, 0.7, 0.3).unwrap(), 1.0);
        assert_eq!(gegenbauer(1, 1.0, 0.5).unwrap(), 1.0);
        assert_relative_eq!(gegenbauer(5, 1.5, 1.0).unwrap(), 21.0, max_relative = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(gegenbauer(3, 0.0, 0.1).is_err());
        assert!(gegenbauer(3, -1.0, 0.1).is_err());
        assert!(gegenbauer(3, 1.0, 1.0 + 1e-9).is_err());
        assert!(gegenbauer(3, 1.0, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn endpoint_identity() {
        for twice_alpha in 1..=8u32 {
            let alpha = f64::from(twice_alpha) / 2.0;
            for p in 0..=64u32 {
                let expected = binomial(f64::from(p) + 2.0 * alpha - 1.0, p);
                let got = gegenbauer(p, alpha, 1.0).unwrap();
                assert_relative_eq!(got, expected, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn legendre_special_case() {
        // C_p^{1/2} = P_p; P_3(t) = (5t^3 - 3t)/2
        let t = 0.37;
        assert_relative_eq!(
            gegenbauer(3, 0.5, t).unwrap(),
            (5.0 * t * t * t - 3.0 * t) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn rescaling_keeps_large_index_finite() {
        // C_p^α(1) = binom(p + 2α - 1, p) overflows f64 only for huge α
        let v = gegenbauer(40, 60.0, 1.0).unwrap();
        let expected = binomial(40.0 + 119.0, 40);
        assert_relative_eq!(v, expected, max_relative = 1e-10);
    }

    #[test]
    fn high_degree_agrees_with_orthonormal_route() {
        // C_p^α = q_p · ‖C_p^α‖ with ‖C_p^α‖^2 = π 2^{1-2α} Γ(p+2α) / (p! (p+α) Γ(α)^2)
        use crate::special::ln_gamma;
        let d = 3;
        let alpha = 1.0;
        let family = OrthonormalGegenbauer::for_sphere(d, 4096);
        for &p in &[100u32, 1000, 4096] {
            let pf = f64::from(p);
            let ln_h = std::f64::consts::PI.ln() + (1.0 - 2.0 * alpha) * 2f64.ln()
                + ln_gamma(pf + 2.0 * alpha)
                - ln_gamma(pf + 1.0)
                - (pf + alpha).ln()
                - 2.0 * ln_gamma(alpha);
            for &t in &[-0.93, -0.2, 0.05, 0.61, 0.999] {
                let raw = gegenbauer(p, alpha, t).unwrap();
                let via = family.value(p, t) * (0.5 * ln_h).exp();
                assert!((raw - via).abs() <= 1e-10 * raw.abs().max(1.0), "p={p} t={t} {raw} {via}");
            }
        }
    }

    #[test]
    fn orthonormal_derivative_matches_finite_difference() {
        let family = OrthonormalGegenbauer::for_sphere(4, 30);
        let h = 1e-6;
        for &t in &[-0.7, 0.1, 0.55] {
            let (_, d) = family.value_and_derivative(17, t);
            let fd = (family.value(17, t + h) - family.value(17, t - h)) / (2.0 * h);
            assert_relative_eq!(d, fd, max_relative = 1e-6);
        }
    }

    proptest! {
        #[test]
        fn parity(p in 0u32..=512, twice_alpha in 1u32..8, t in -1.0f64..1.0) {
            let alpha = f64::from(twice_alpha) / 2.0;
            let plus = gegenbauer(p, alpha, t).unwrap();
            let minus = gegenbauer(p, alpha, -t).unwrap();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((minus - sign * plus).abs() <= 1e-10 * plus.abs().max(1e-300));
        }
    }
}
