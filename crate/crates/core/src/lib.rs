//! Numerical laboratory for bilinear and trilinear estimates on products of
//! Laplace eigenfunctions on the spheres `S^d`.
//!
//! The crate is organised bottom-up:
//!
//! * [`harmonics`] evaluates eigenfunction families (zonal, highest-weight,
//!   the orthonormal `Y_l^m` basis on `S^2`, random eigenspace elements) and
//!   the Gaussian spectral window.
//! * [`quadrature`] builds Gauss rules on `[-1, 1]` and product rules on
//!   `S^d` with certified polynomial exactness, and computes `L^r` norms.
//! * [`coupling`] is the exact product algebra on `S^2`: Wigner 3j symbols,
//!   Gaunt coefficients, product expansions and the extremal bilinear
//!   constant over a pair of eigenspaces.
//! * [`experiments`] measures product-norm ratios on degree grids, compares
//!   them with the growth factors `Λ(d, ν)` and fits power-law exponents.

pub mod coupling;
pub mod error;
pub mod experiments;
pub mod harmonics;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod sum;

pub use error::{Error, Result};

pub use num_complex::Complex64;
