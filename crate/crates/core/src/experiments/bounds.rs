//! Growth factors on the right-hand side of the bilinear and trilinear
//! estimates.

use crate::error::{Error, Result};

/// `Λ(d, ν)`: `ν^{1/4}` for `d = 2`, `ν^{1/2} log^{1/2} ν` for `d = 3` and
/// `ν^{(d-2)/2}` for `d ≥ 4`.
///
/// The `d = 3` logarithm is floored at 1, so the factor is never zero.
pub fn lambda_bound(d: usize, nu: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(nu >= 1.0) || !nu.is_finite() {
        return Err(Error::Domain(format!("frequency {nu} must be ≥ 1")));
    }
    Ok(match d {
        2 => nu.powf(0.25),
        3 => (nu * nu.ln().max(1.0)).sqrt(),
        _ => nu.powf((d as f64 - 2.0) / 2.0),
    })
}

/// `(λ μ ν / max(λ, μ, ν))^{(2d-3)/4}`, i.e. the product of the two smaller
/// frequencies raised to `(2d - 3)/4`. Frequencies are expected to be ≥ 1.
pub fn trilinear_bound(d: usize, l1: f64, l2: f64, l3: f64) -> f64 {
    let top = l1.max(l2).max(l3);
    (l1 * l2 * l3 / top).powf((2.0 * d as f64 - 3.0) / 4.0)
}
