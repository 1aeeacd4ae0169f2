//! Eigenfunction families of the Laplacian on `S^d`.
//!
//! Points use Euclidean coordinates in `R^{d+1}`. On `S^2` the polar axis is
//! the last coordinate: `x = (sin θ cos φ, sin θ sin φ, cos θ)`. Every family
//! in [`HarmonicSpec`] is normalised to unit `L^2` norm.

mod coefficients;
mod gegenbauer;
mod legendre;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::sphere_area;

pub use coefficients::{random_band_s2, random_harmonic_s2, windowed_projector, CoefficientVector, SpectralWindow};
pub use gegenbauer::{gegenbauer, OrthonormalGegenbauer};
pub use legendre::{legendre_column, legendre_table, triangular_index};

const UNIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::Domain(format!(
                "a point of S^d with d ≥ 2 needs at least 3 coordinates, got {}",
                coords.len()
            )));
        }
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_SLACK {
            return Err(Error::Domain(format!("point has norm {norm}, not on the unit sphere")));
        }
        Ok(Self { coords })
    }

    /// Normalises a nonzero vector onto the sphere.
    pub fn from_direction(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot normalise a zero vector".into()));
        }
        Self::new(v.iter().map(|c| c / norm).collect())
    }

    pub(crate) fn from_unit_coords(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// North pole `(0, …, 0, 1)` of `S^d`.
    pub fn north_pole(d: usize) -> Self {
        let mut coords = vec![0.0; d + 1];
        coords[d] = 1.0;
        Self { coords }
    }

    pub fn from_angles_s2(theta: f64, phi: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { coords: vec![s * phi.cos(), s * phi.sin(), c] }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.coords.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn expect_dimension(&self, d: usize) -> Result<()> {
        if self.dimension() != d {
            return Err(Error::DimensionMismatch { expected: d, found: self.dimension() });
        }
        Ok(())
    }
}

/// `√(p(p + d - 1))`, the eigenvalue of `√-Δ` on degree-`p` harmonics of `S^d`.
pub fn sqrt_laplace_eigenvalue(d: usize, p: u32) -> f64 {
    let p = f64::from(p);
    (p * (p + d as f64 - 1.0)).sqrt()
}

/// `(x_1 + i x_2)^n`, evaluated as `ρ^n e^{inφ}`.
pub fn highest_weight_eval(n: u32, x: &SpherePoint) -> Complex64 {
    highest_weight_coords(n, x.coords())
}

pub(crate) fn highest_weight_coords(n: u32, x: &[f64]) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let rho = x[0].hypot(x[1]);
    let phi = x[1].atan2(x[0]);
    let modulus = if n <= i32::MAX as u32 { rho.powi(n as i32) } else { rho.powf(f64::from(n)) };
    Complex64::from_polar(modulus, f64::from(n) * phi)
}

/// Orthonormal `Y_l^m` on `S^2` with the Condon-Shortley phase.
pub fn sph_basis_s2(l: u32, m: i32, x: &SpherePoint) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::InvalidIndex { degree: l, order: m });
    }
    x.expect_dimension(2)?;
    Ok(sph_basis_coords(l, m, x.coords()))
}

pub(crate) fn sph_basis_coords(l: u32, m: i32, x: &[f64]) -> Complex64 {
    let am = m.unsigned_abs();
    let p = *legendre_column(l, am, x[2]).last().expect("l ≥ |m|");
    let phi = x[1].atan2(x[0]);
    let y = Complex64::from_polar(p, f64::from(am) * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HarmonicFamily {
    /// Unit zonal harmonic about `pole`.
    Zonal { pole: SpherePoint },
    /// `e_n = (x_1 + i x_2)^n / ‖e_n‖_2`.
    HighestWeight,
    /// `Y_l^m` on `S^2`.
    BasisS2 { order: i32 },
    /// [`random_harmonic_s2`] with the given seed.
    RandomS2 { seed: u64 },
}

/// A unit-norm member of the degree-`degree` eigenspace of `S^dimension`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpec {
    dimension: usize,
    degree: u32,
    family: HarmonicFamily,
}

impl HarmonicSpec {
    pub fn new(dimension: usize, degree: u32, family: HarmonicFamily) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::UnsupportedDimension(dimension));
        }
        match &family {
            HarmonicFamily::Zonal { pole } => pole.expect_dimension(dimension)?,
            HarmonicFamily::HighestWeight => {}
            HarmonicFamily::BasisS2 { order } => {
                if dimension != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: dimension });
                }
                if order.unsigned_abs() > degree {
                    return Err(Error::InvalidIndex { degree, order: *order });
                }
            }
            HarmonicFamily::RandomS2 { .. } => {
                if dimension != 2 {
                    return Err(Error::DimensionMismatch { expected: 2, found: dimension });
                }
            }
        }
        Ok(Self { dimension, degree, family })
    }

    pub fn zonal(dimension: usize, degree: u32) -> Self {
        Self { dimension, degree, family: HarmonicFamily::Zonal { pole: SpherePoint::north_pole(dimension) } }
    }

    pub fn highest_weight(dimension: usize, degree: u32) -> Self {
        Self { dimension, degree, family: HarmonicFamily::HighestWeight }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn family(&self) -> &HarmonicFamily {
        &self.family
    }

    /// Evaluates the unit-normalised function at `x`.
    pub fn evaluate(&self, x: &SpherePoint) -> Result<Complex64> {
        x.expect_dimension(self.dimension)?;
        Ok(self.evaluator()(x.coords()))
    }

    /// A reusable evaluator over raw coordinates with all per-function
    /// constants precomputed.
    pub fn evaluator(&self) -> Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync> {
        let p = self.degree;
        match &self.family {
            HarmonicFamily::Zonal { pole } => {
                let profile = ZonalProfile::new(self.dimension, p);
                let pole = pole.clone();
                Box::new(move |x| Complex64::new(profile.value(pole.dot(x)), 0.0))
            }
            HarmonicFamily::HighestWeight => {
                let scale = crate::quadrature::highest_weight_lp(self.dimension, p, 2.0)
                    .expect("finite exponent")
                    .recip();
                Box::new(move |x| highest_weight_coords(p, x) * scale)
            }
            HarmonicFamily::BasisS2 { order } => {
                let m = *order;
                Box::new(move |x| sph_basis_coords(p, m, x))
            }
            HarmonicFamily::RandomS2 { seed } => {
                let c = random_harmonic_s2(p, *seed);
                Box::new(move |x| c.evaluate_coords(x))
            }
        }
    }

    /// Expansion over `Y_l^m` for families on `S^2`.
    pub fn coefficients(&self) -> Result<CoefficientVector> {
        if self.dimension != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dimension });
        }
        let l = self.degree;
        match &self.family {
            HarmonicFamily::Zonal { pole } => {
                // addition theorem: Z(x) = sqrt(4π/(2l+1)) Σ_m conj(Y_l^m(pole)) Y_l^m(x)
                let scale = (4.0 * std::f64::consts::PI / f64::from(2 * l + 1)).sqrt();
                let block: Vec<Complex64> = (-(l as i32)..=l as i32)
                    .map(|m| sph_basis_coords(l, m, pole.coords()).conj() * scale)
                    .collect();
                CoefficientVector::from_block(l, &block)
            }
            HarmonicFamily::HighestWeight => {
                // (x_1 + i x_2)^l ∝ (-1)^l Y_l^l
                let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
                let mut v = CoefficientVector::zeros(l);
                v.set(l, l as i32, Complex64::new(sign, 0.0))?;
                Ok(v)
            }
            HarmonicFamily::BasisS2 { order } => CoefficientVector::basis(l, *order),
            HarmonicFamily::RandomS2 { seed } => Ok(random_harmonic_s2(l, *seed)),
        }
    }
}

/// Radial profile `t ↦ Z_p` of the unit zonal harmonic of `S^d`,
/// `Z_p(x) = q_p(⟨pole, x⟩) / √|S^{d-1}|`.
#[derive(Debug, Clone)]
pub struct ZonalProfile {
    degree: u32,
    family: OrthonormalGegenbauer,
    scale: f64,
}

impl ZonalProfile {
    pub fn new(d: usize, degree: u32) -> Self {
        Self {
            degree,
            family: OrthonormalGegenbauer::for_sphere(d, degree),
            scale: sphere_area(d - 1).sqrt().recip(),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.family.value(self.degree, t.clamp(-1.0, 1.0)) * self.scale
    }
}

/// Unit zonal harmonic `N_{d,p} C_p^{(d-1)/2}(⟨pole, x⟩)`.
pub fn zonal_eval(spec: &HarmonicSpec, x: &SpherePoint) -> Result<f64> {
    let HarmonicFamily::Zonal { pole } = spec.family() else {
        return Err(Error::InvalidFamily("zonal_eval needs a zonal harmonic".into()));
    };
    x.expect_dimension(spec.dimension())?;
    Ok(ZonalProfile::new(spec.dimension(), spec.degree()).value(pole.dot(x.coords())))
}
