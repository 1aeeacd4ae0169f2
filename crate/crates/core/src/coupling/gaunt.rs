//! Gaunt coefficients `∫_{S^2} Y_{l1}^{m1} Y_{l2}^{m2} conj(Y_L^M) dσ`.

use std::f64::consts::PI;

use super::wigner::{wigner_3j, TripleIndex};

/// Gaunt coefficient through two 3j symbols:
/// `√((2l1+1)(2l2+1)(2L+1)/4π) (l1 l2 L; 0 0 0) (l1 l2 L; m1 m2 -M) (-1)^M`.
pub fn gaunt_coeff(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32) -> f64 {
    if m1 + m2 != m || m.unsigned_abs() > l {
        return 0.0;
    }
    let parity = wigner_3j(&TripleIndex::new(l1, l2, l, 0, 0, 0));
    if parity == 0.0 {
        return 0.0;
    }
    gaunt_with_parity(l1, m1, l2, m2, l, m, parity)
}

/// Same as [`gaunt_coeff`] with `(l1 l2 L; 0 0 0)` supplied by the caller.
pub(crate) fn gaunt_with_parity(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32, parity: f64) -> f64 {
    let orders = wigner_3j(&TripleIndex::new(l1, l2, l, m1, m2, -m));
    if orders == 0.0 {
        return 0.0;
    }
    let norm = (f64::from(2 * l1 + 1) * f64::from(2 * l2 + 1) * f64::from(2 * l + 1) / (4.0 * PI)).sqrt();
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    norm * parity * orders * sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::sph_basis_coords;
    use crate::quadrature::sphere_rule;
    use approx::assert_relative_eq;

    #[test]
    fn constant_triple() {
        assert_relative_eq!(gaunt_coeff(0, 0, 0, 0, 0, 0), (4.0 * PI).sqrt().recip(), max_relative = 1e-15);
    }

    #[test]
    fn order_selection() {
        assert_eq!(gaunt_coeff(2, 1, 3, 1, 4, 1), 0.0);
        assert_eq!(gaunt_coeff(2, 1, 3, 1, 1, 2), 0.0);
    }

    #[test]
    fn matches_direct_quadrature_small_degrees() {
        let rule = sphere_rule(2, 12).unwrap();
        for (l1, l2, l) in [(1u32, 1u32, 2u32), (2, 3, 3), (3, 3, 4), (4, 2, 2)] {
            for m1 in -(l1 as i32)..=l1 as i32 {
                for m2 in -(l2 as i32)..=l2 as i32 {
                    for m in -(l as i32)..=l as i32 {
                        let q = rule.integrate(|x| {
                            (sph_basis_coords(l1, m1, x) * sph_basis_coords(l2, m2, x) * sph_basis_coords(l, m, x).conj()).re
                        });
                        let g = gaunt_coeff(l1, m1, l2, m2, l, m);
                        assert!((q - g).abs() <= 1e-12, "({l1},{m1},{l2},{m2},{l},{m}): {q} vs {g}");
                    }
                }
            }
        }
    }
}
