//! Exact expansion of products of two single-degree harmonics on `S^2`.

use num_complex::Complex64;

use super::gaunt::gaunt_with_parity;
use super::wigner::{wigner_3j, TripleIndex};
use crate::error::Result;
use crate::harmonics::CoefficientVector;

/// Coefficients of `f g` for `f ∈ H_p`, `g ∈ H_q`; supported on
/// `|p - q| ≤ L ≤ p + q` with `L ≡ p + q (mod 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductExpansion {
    pub p: u32,
    pub q: u32,
    pub coefficients: CoefficientVector,
}

impl ProductExpansion {
    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        self.coefficients.get(l, m)
    }

    /// `‖f g‖_{L^2(S^2)}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.norm()
    }
}

pub fn product_expand(f: &CoefficientVector, g: &CoefficientVector) -> Result<ProductExpansion> {
    let p = f.single_degree()?;
    let q = g.single_degree()?;
    let fb = f.block(p);
    let gb = g.block(q);
    let (ip, iq) = (p as i32, q as i32);
    let mut out = CoefficientVector::zeros(p + q);
    for l in p.abs_diff(q)..=p + q {
        let parity = wigner_3j(&TripleIndex::new(p, q, l, 0, 0, 0));
        if parity == 0.0 {
            continue;
        }
        let il = l as i32;
        for m in -il..=il {
            let mut acc = Complex64::new(0.0, 0.0);
            for m1 in (-ip).max(m - iq)..=ip.min(m + iq) {
                let m2 = m - m1;
                let a = fb[(m1 + ip) as usize];
                let b = gb[(m2 + iq) as usize];
                if a.norm_sqr() == 0.0 || b.norm_sqr() == 0.0 {
                    continue;
                }
                acc += a * b * gaunt_with_parity(p, m1, q, m2, l, m, parity);
            }
            out.set(l, m, acc)?;
        }
    }
    Ok(ProductExpansion { p, q, coefficients: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::harmonics::random_harmonic_s2;
    use crate::quadrature::{sphere_rule, S2Transform};
    use std::f64::consts::PI;

    #[test]
    fn constant_factor() {
        let one = CoefficientVector::basis(0, 0).unwrap();
        let g = random_harmonic_s2(5, 3);
        let e = product_expand(&one, &g).unwrap();
        let c = (4.0 * PI).sqrt().recip();
        for m in -5..=5 {
            assert!((e.get(5, m) - g.get(5, m) * c).norm() < 1e-15);
        }
        let e = product_expand(&one, &one).unwrap();
        assert!((e.get(0, 0).re - c).abs() < 1e-16);
        assert_eq!(e.coefficients.support(), vec![0]);
    }

    #[test]
    fn rejects_multi_degree() {
        let f = &random_harmonic_s2(2, 1) + &random_harmonic_s2(3, 1);
        assert_eq!(
            product_expand(&f, &random_harmonic_s2(2, 2)).unwrap_err(),
            Error::MultiDegreeInput(vec![2, 3])
        );
    }

    #[test]
    fn matches_pointwise_product() {
        let (p, q) = (8, 8);
        let f = random_harmonic_s2(p, 10);
        let g = random_harmonic_s2(q, 11);
        let e = product_expand(&f, &g).unwrap();
        let tr = S2Transform::new(sphere_rule(2, 2 * (p + q)).unwrap(), &[p, q]).unwrap();
        let fv = tr.synthesize(&f).unwrap();
        let gv = tr.synthesize(&g).unwrap();
        let sq: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| (a * b).norm_sqr()).collect();
        let quad = tr.integrate(&sq).sqrt();
        assert!((e.l2_norm() - quad).abs() <= 1e-9 * quad);
    }
}
