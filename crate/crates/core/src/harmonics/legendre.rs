//! Fully normalised associated Legendre functions with the Condon-Shortley
//! phase, `Y_l^m(θ, φ) = P̄_l^m(cos θ) e^{imφ}` for `m ≥ 0`.

use std::f64::consts::PI;

/// Index of `(l, m)`, `0 ≤ m ≤ l`, in a triangular table.
#[inline]
pub fn triangular_index(l: u32, m: u32) -> usize {
    (l as usize * (l as usize + 1)) / 2 + m as usize
}

/// `P̄_l^m(t)` for `l = m..=lmax`, returned as a vector indexed by `l - m`.
pub fn legendre_column(lmax: u32, m: u32, t: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let s = (1.0 - t * t).max(0.0).sqrt();
    let mut pmm = (4.0 * PI).sqrt().recip();
    for k in 1..=m {
        let k = f64::from(k);
        pmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    let mut out = Vec::with_capacity((lmax - m + 1) as usize);
    out.push(pmm);
    if m == lmax {
        return out;
    }
    let mf = f64::from(m);
    let mut prev = pmm;
    let mut curr = (2.0 * mf + 3.0).sqrt() * t * pmm;
    out.push(curr);
    for l in m + 2..=lmax {
        let lf = f64::from(l);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (t * curr - b * prev);
        prev = curr;
        curr = next;
        out.push(curr);
    }
    out
}

/// All `P̄_l^m(t)` with `0 ≤ m ≤ l ≤ lmax`, laid out by [`triangular_index`].
pub fn legendre_table(lmax: u32, t: f64) -> Vec<f64> {
    let mut table = vec![0.0; triangular_index(lmax, lmax) + 1];
    for m in 0..=lmax {
        for (offset, v) in legendre_column(lmax, m, t).into_iter().enumerate() {
            table[triangular_index(m + offset as u32, m)] = v;
        }
    }
    table
}
