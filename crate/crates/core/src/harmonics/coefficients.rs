//! Truncated expansions over the orthonormal `Y_l^m` basis of `L^2(S^2)`.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::legendre::{legendre_table, triangular_index};
use super::{sqrt_laplace_eigenvalue, SpherePoint};
use crate::error::{Error, Result};
use crate::rng::GaussianStream;

#[inline]
fn flat_index(l: u32, m: i32) -> usize {
    let l = l as i64;
    (l * l + l + i64::from(m)) as usize
}

/// Coefficients `c_{l,m}` for `0 ≤ l ≤ max_degree`, `|m| ≤ l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    max_degree: u32,
    entries: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn zeros(max_degree: u32) -> Self {
        let len = flat_index(max_degree, max_degree as i32) + 1;
        Self { max_degree, entries: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// A single basis function `Y_l^m`.
    pub fn basis(l: u32, m: i32) -> Result<Self> {
        let mut v = Self::zeros(l);
        v.set(l, m, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    /// Supported on degree `l`; `block[m + l]` is the coefficient of `Y_l^m`.
    pub fn from_block(l: u32, block: &[Complex64]) -> Result<Self> {
        if block.len() != 2 * l as usize + 1 {
            return Err(Error::Domain(format!(
                "degree {l} block needs {} entries, got {}",
                2 * l + 1,
                block.len()
            )));
        }
        let mut v = Self::zeros(l);
        let start = flat_index(l, -(l as i32));
        v.entries[start..start + block.len()].copy_from_slice(block);
        Ok(v)
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    fn check(&self, l: u32, m: i32) -> Result<()> {
        if m.unsigned_abs() > l || l > self.max_degree {
            return Err(Error::InvalidIndex { degree: l, order: m });
        }
        Ok(())
    }

    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        if l > self.max_degree || m.unsigned_abs() > l {
            return Complex64::new(0.0, 0.0);
        }
        self.entries[flat_index(l, m)]
    }

    pub fn set(&mut self, l: u32, m: i32, value: Complex64) -> Result<()> {
        self.check(l, m)?;
        self.entries[flat_index(l, m)] = value;
        Ok(())
    }

    /// The `2l + 1` coefficients of degree `l`, ordered `m = -l..=l`.
    pub fn block(&self, l: u32) -> &[Complex64] {
        let start = flat_index(l, -(l as i32));
        &self.entries[start..start + 2 * l as usize + 1]
    }

    pub fn block_mut(&mut self, l: u32) -> &mut [Complex64] {
        let start = flat_index(l, -(l as i32));
        &mut self.entries[start..start + 2 * l as usize + 1]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Degrees carrying at least one nonzero coefficient.
    pub fn support(&self) -> Vec<u32> {
        (0..=self.max_degree)
            .filter(|&l| self.block(l).iter().any(|c| c.norm_sqr() > 0.0))
            .collect()
    }

    /// The unique supported degree; the zero vector counts as its top degree.
    pub fn single_degree(&self) -> Result<u32> {
        match self.support().as_slice() {
            [] => Ok(self.max_degree),
            [l] => Ok(*l),
            many => Err(Error::MultiDegreeInput(many.to_vec())),
        }
    }

    /// Euclidean coefficient norm, equal to the `L^2(S^2)` norm by Parseval.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(n.recip(), 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            max_degree: self.max_degree,
            entries: self.entries.iter().map(|c| c * factor).collect(),
        }
    }

    /// Same coefficients with room for degrees up to `max_degree`.
    pub fn widened(&self, max_degree: u32) -> Self {
        if max_degree <= self.max_degree {
            return self.clone();
        }
        let mut out = Self::zeros(max_degree);
        out.entries[..self.entries.len()].copy_from_slice(&self.entries);
        out
    }

    /// `Σ c_{l,m} Y_l^m(x)`.
    pub fn evaluate(&self, x: &SpherePoint) -> Result<Complex64> {
        x.expect_dimension(2)?;
        Ok(self.evaluate_coords(x.coords()))
    }

    pub(crate) fn evaluate_coords(&self, x: &[f64]) -> Complex64 {
        let support = self.support();
        let Some(&lmax) = support.last() else {
            return Complex64::new(0.0, 0.0);
        };
        let table = legendre_table(lmax, x[2]);
        let phi = x[1].atan2(x[0]);
        let mut acc = Complex64::new(0.0, 0.0);
        for &l in &support {
            acc += self.get(l, 0) * table[triangular_index(l, 0)];
            for m in 1..=l {
                let p = table[triangular_index(l, m)];
                let e = Complex64::from_polar(1.0, f64::from(m) * phi);
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                // Y_l^{-m} = (-1)^m conj(Y_l^m)
                acc += p * (self.get(l, m as i32) * e + sign * self.get(l, -(m as i32)) * e.conj());
            }
        }
        acc
    }
}

impl Add for &CoefficientVector {
    type Output = CoefficientVector;

    fn add(self, rhs: &CoefficientVector) -> CoefficientVector {
        let top = self.max_degree.max(rhs.max_degree);
        let mut out = self.widened(top);
        for (o, r) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            *o += r;
        }
        out
    }
}

impl Mul<&CoefficientVector> for Complex64 {
    type Output = CoefficientVector;

    fn mul(self, rhs: &CoefficientVector) -> CoefficientVector {
        rhs.scaled(self)
    }
}

/// Unit-norm random element of `H_l` on `S^2`: i.i.d. standard complex
/// Gaussian coefficients, normalised. Entry `m` is drawn at index `m + l`
/// of stream `l` under `seed`.
pub fn random_harmonic_s2(l: u32, seed: u64) -> CoefficientVector {
    let mut stream = GaussianStream::new(seed, u64::from(l));
    let block: Vec<Complex64> = (0..=2 * u64::from(l)).map(|i| stream.complex_normal(i)).collect();
    CoefficientVector::from_block(l, &block)
        .expect("block length matches degree")
        .normalized()
}

/// Unit-norm random function spread over several degrees: i.i.d. standard
/// complex Gaussian coefficients on every `(l, m)` with `l` in `degrees`,
/// normalised jointly. Entry `(l, m)` is index `m + l` of stream `l`.
pub fn random_band_s2(degrees: &[u32], seed: u64) -> CoefficientVector {
    let top = degrees.iter().copied().max().unwrap_or(0);
    let mut v = CoefficientVector::zeros(top);
    for &l in degrees {
        let mut stream = GaussianStream::new(seed, u64::from(l));
        for (i, c) in v.block_mut(l).iter_mut().enumerate() {
            *c = stream.complex_normal(i as u64);
        }
    }
    v.normalized()
}

/// Unit-width Gaussian multiplier `χ(s) = exp(-s^2)` centred at `λ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindow {
    center: f64,
}

impl SpectralWindow {
    pub fn new(center: f64) -> Result<Self> {
        if !(center >= 1.0) || !center.is_finite() {
            return Err(Error::Domain(format!("window center {center} must be ≥ 1")));
        }
        Ok(Self { center })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// `χ(s)` at distance `s` from the center.
    pub fn value(&self, s: f64) -> f64 {
        (-s * s).exp()
    }

    /// Scalar by which `χ(√-Δ - λ)` acts on the degree-`l` eigenspace of `S^2`.
    pub fn multiplier(&self, l: u32) -> f64 {
        self.value(sqrt_laplace_eigenvalue(2, l) - self.center)
    }

    /// Degrees whose frequency lies within `widths` window widths of the center.
    pub fn degrees_within(&self, widths: f64) -> Vec<u32> {
        let top = (self.center + widths).ceil() as u32 + 1;
        (0..=top)
            .filter(|&l| (sqrt_laplace_eigenvalue(2, l) - self.center).abs() <= widths)
            .collect()
    }

    /// Degree whose frequency is closest to the center.
    pub fn nearest_degree(&self) -> u32 {
        let top = self.center.ceil() as u32 + 1;
        (0..=top)
            .min_by(|&a, &b| {
                let da = (sqrt_laplace_eigenvalue(2, a) - self.center).abs();
                let db = (sqrt_laplace_eigenvalue(2, b) - self.center).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }
}

/// `χ_λ f`: every degree-`l` block of `f` multiplied by `χ(√(l(l+1)) - λ)`.
pub fn windowed_projector(window: &SpectralWindow, f: &CoefficientVector) -> CoefficientVector {
    let mut out = f.clone();
    for l in 0..=f.max_degree() {
        let factor = window.multiplier(l);
        for c in out.block_mut(l) {
            *c *= factor;
        }
    }
    out
}
