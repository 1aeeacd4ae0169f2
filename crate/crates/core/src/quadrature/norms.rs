//! `L^r` norms on `S^d`.

use num_complex::Complex64;

use super::line::gauss_polar;
use super::sphere::{SphereRule, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::harmonics::ZonalProfile;
use crate::special::{ln_beta, sphere_area};
use crate::sum::compensated_sum;

/// Oversampling factor per axis for empirical sup norms.
pub const SUP_OVERSAMPLING: u32 = 10;

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponent(r));
    }
    Ok(())
}

/// `(Σ w_i |f(x_i)|^r)^{1/r}`, or `max_i |f(x_i)|` for `r = ∞`.
///
/// For finite `r`, `integrand_degree` is the polynomial degree of `|f|^r`
/// when known; the rule must be exact through it. The `r = ∞` value is an
/// empirical sup, a lower bound on the true one; see [`empirical_sup_rule`].
pub fn lp_norm<F>(f: F, rule: &SphereRule, r: f64, integrand_degree: Option<u32>) -> Result<f64>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    check_exponent(r)?;
    if r.is_infinite() {
        let values = rule.map_nodes(|x| f(x).norm());
        return Ok(values.into_iter().map(|(_, v)| v).fold(0.0, f64::max));
    }
    if let Some(deg) = integrand_degree {
        if rule.exact_degree() < deg {
            return Err(Error::InfeasibleQuadrature {
                what: format!("integrand of degree {deg} on a rule exact through {}", rule.exact_degree()),
                nodes: rule.len(),
                budget: rule.len(),
            });
        }
    }
    let values = rule.map_nodes(|x| f(x).norm());
    let total = if r == 2.0 {
        compensated_sum(values.into_iter().map(|(w, v)| w * v * v))
    } else {
        compensated_sum(values.into_iter().map(|(w, v)| w * v.powf(r)))
    };
    Ok(total.powf(r.recip()))
}

/// Dense rule for empirical sup norms of functions oscillating at `degree`:
/// `SUP_OVERSAMPLING × degree` samples per axis.
pub fn empirical_sup_rule(d: usize, degree: u32, node_budget: usize) -> Result<SphereRule> {
    SphereRule::build(d, SUP_OVERSAMPLING * degree.max(1), DEFAULT_MARGIN, node_budget)
}

/// `‖∏ Z_{p_i}‖_{L^r(S^d)}` for unit zonal harmonics sharing one pole, by the
/// reduction `|S^{d-1}| ∫ (∏ Z_{p_i}(t))^r (1 - t^2)^{(d-2)/2} dt` on a Gauss
/// rule exact for the integrand.
pub fn zonal_line_norm(d: usize, degrees: &[u32], r: u32) -> Result<f64> {
    zonal_line_norm_with_margin(d, degrees, r, DEFAULT_MARGIN)
}

pub fn zonal_line_norm_with_margin(d: usize, degrees: &[u32], r: u32, margin: u32) -> Result<f64> {
    if r == 0 || r % 2 == 1 {
        return Err(Error::InvalidExponent(f64::from(r)));
    }
    if !(2..=5).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let integrand_degree = r * degrees.iter().sum::<u32>();
    let n = (integrand_degree as usize + 2).div_ceil(2) + margin as usize;
    let rule = gauss_polar(d, n);
    let profiles: Vec<ZonalProfile> = degrees.iter().map(|&p| ZonalProfile::new(d, p)).collect();
    let integral = rule.integrate(|t| {
        let product: f64 = profiles.iter().map(|z| z.value(t)).product();
        product.powi(r as i32)
    });
    Ok((sphere_area(d - 1) * integral).powf(1.0 / f64::from(r)))
}

/// `‖(x_1 + i x_2)^n‖_{L^r(S^d)}` in closed form:
/// `∫ (x_1^2 + x_2^2)^{s} dσ = π |S^{d-2}| B(s + 1, (d - 1)/2)` with `s = nr/2`.
pub fn highest_weight_lp(d: usize, n: u32, r: f64) -> Result<f64> {
    check_exponent(r)?;
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if r.is_infinite() {
        return Ok(1.0);
    }
    let s = f64::from(n) * r / 2.0;
    let ln_integral = (std::f64::consts::PI * sphere_area(d - 2)).ln() + ln_beta(s + 1.0, (d as f64 - 1.0) / 2.0);
    Ok((ln_integral / r).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{highest_weight_coords, sph_basis_coords, HarmonicSpec};
    use crate::quadrature::sphere_rule;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_norm() {
        let rule = sphere_rule(2, 2).unwrap();
        let v = lp_norm(|_| Complex64::new(1.0, 0.0), &rule, 2.0, Some(0)).unwrap();
        assert_relative_eq!(v, (4.0 * PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn homogeneity_and_errors() {
        let rule = sphere_rule(2, 12).unwrap();
        let f = |x: &[f64]| sph_basis_coords(3, 1, x) + sph_basis_coords(2, -2, x);
        let c = Complex64::new(-2.5, 1.5);
        for r in [1.0, 2.0, 3.5, f64::INFINITY] {
            let a = lp_norm(f, &rule, r, None).unwrap();
            let b = lp_norm(|x| f(x) * c, &rule, r, None).unwrap();
            assert_relative_eq!(b, c.norm() * a, max_relative = 1e-13);
        }
        assert_eq!(lp_norm(f, &rule, 0.5, None), Err(Error::InvalidExponent(0.5)));
        assert!(lp_norm(f, &rule, 2.0, Some(40)).is_err());
    }

    #[test]
    fn highest_weight_wallis_values() {
        let rule = sphere_rule(2, 2).unwrap();
        let e1 = lp_norm(|x| highest_weight_coords(1, x), &rule, 2.0, Some(2)).unwrap();
        assert!((e1 * e1 - 8.0 * PI / 3.0).abs() <= 1e-10);
        assert_relative_eq!(highest_weight_lp(2, 1, 2.0).unwrap(), (8.0 * PI / 3.0).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(highest_weight_lp(2, 2, 2.0).unwrap(), (32.0 * PI / 15.0).sqrt(), max_relative = 1e-13);
        for d in 2..=5 {
            for r in [1.0, 2.0, 4.0] {
                assert_relative_eq!(
                    highest_weight_lp(d, 0, r).unwrap(),
                    sphere_area(d).powf(1.0 / r),
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn highest_weight_closed_form_matches_quadrature() {
        for d in 2..=4 {
            for n in [1u32, 3, 6] {
                for r in [2.0f64, 4.0] {
                    let deg = (f64::from(n) * r) as u32;
                    let rule = sphere_rule(d, deg).unwrap();
                    let q = lp_norm(|x| highest_weight_coords(n, x), &rule, r, Some(deg)).unwrap();
                    let c = highest_weight_lp(d, n, r).unwrap();
                    assert_relative_eq!(q, c, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn zonal_line_values() {
        for d in 2..=5 {
            for p in [0u32, 1, 5, 40] {
                assert_relative_eq!(zonal_line_norm(d, &[p], 2).unwrap(), 1.0, max_relative = 1e-10);
            }
        }
        assert_relative_eq!(zonal_line_norm(2, &[0, 0], 2).unwrap(), (4.0 * PI).sqrt().recip(), max_relative = 1e-13);
        assert_eq!(zonal_line_norm(3, &[2, 2], 3), Err(Error::InvalidExponent(3.0)));
    }

    #[test]
    fn zonal_line_matches_full_sphere() {
        for (d, degrees, r) in [(3usize, vec![4u32, 4], 2u32), (2, vec![3, 5], 2), (4, vec![2, 3, 1], 2), (3, vec![3], 4)] {
            let line = zonal_line_norm(d, &degrees, r).unwrap();
            let deg = r * degrees.iter().sum::<u32>();
            let rule = sphere_rule(d, deg).unwrap();
            let evals: Vec<_> = degrees.iter().map(|&p| HarmonicSpec::zonal(d, p).evaluator()).collect();
            let full = lp_norm(|x| evals.iter().map(|e| e(x)).product(), &rule, f64::from(r), Some(deg)).unwrap();
            assert_relative_eq!(line, full, max_relative = 1e-9);
        }
    }

    #[test]
    fn holder_consistency() {
        let rule = sphere_rule(2, 20).unwrap();
        let fs: Vec<Box<dyn Fn(&[f64]) -> Complex64 + Sync>> = vec![
            Box::new(|x| sph_basis_coords(5, 2, x)),
            Box::new(|x| highest_weight_coords(4, x)),
            Box::new(|x| Complex64::new(x[2].exp(), 0.0)),
        ];
        for f in &fs {
            let l1 = lp_norm(f, &rule, 1.0, None).unwrap();
            let l2 = lp_norm(f, &rule, 2.0, None).unwrap();
            assert!(l1 <= (4.0 * PI).sqrt() * l2 * (1.0 + 1e-14));
        }
    }

    #[test]
    fn empirical_sup_of_highest_weight() {
        let rule = empirical_sup_rule(2, 4, 1_000_000).unwrap();
        let sup = lp_norm(|x| highest_weight_coords(4, x), &rule, f64::INFINITY, None).unwrap();
        assert!(sup <= 1.0 && sup > 0.999);
    }
}
