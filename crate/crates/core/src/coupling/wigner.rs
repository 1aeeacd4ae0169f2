//! Wigner 3j symbols for integer angular momenta.
//!
//! Up to [`EXACT_MAX_DEGREE`] the Racah sum is evaluated exactly over
//! prime-factorised factorials and rounded once at the end. Above it, a whole
//! row in `m1` is obtained from the three-term recurrence
//! `X(m1) f(m1) + A(m1) f(m1-1) + B(m1) f(m1+1) = 0`, run inward from both
//! ends, matched in the classically allowed region, normalised by
//! `Σ (2j3+1) f^2 = 1` and signed by the value at the top of the row.

use num_bigint::{BigInt, Sign};
use serde::{Deserialize, Serialize};

use super::primes::{ratio_to_f64, PrimePower};

/// Largest angular momentum evaluated with exact arithmetic.
pub const EXACT_MAX_DEGREE: u32 = 200;

const RESCALE_ABOVE: f64 = 1e200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleIndex {
    pub l1: u32,
    pub l2: u32,
    pub l3: u32,
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl TripleIndex {
    pub fn new(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Self { l1, l2, l3, m1, m2, m3 }
    }

    pub fn satisfies_triangle(&self) -> bool {
        let (a, b, c) = (i64::from(self.l1), i64::from(self.l2), i64::from(self.l3));
        (a - b).abs() <= c && c <= a + b
    }

    pub fn orders_in_range(&self) -> bool {
        self.m1.unsigned_abs() <= self.l1 && self.m2.unsigned_abs() <= self.l2 && self.m3.unsigned_abs() <= self.l3
    }

    pub fn orders_sum_to_zero(&self) -> bool {
        i64::from(self.m1) + i64::from(self.m2) + i64::from(self.m3) == 0
    }

    /// All selection rules; the symbol vanishes when this is false.
    pub fn is_admissible(&self) -> bool {
        self.orders_in_range() && self.orders_sum_to_zero() && self.satisfies_triangle()
    }

    fn max_degree(&self) -> u32 {
        self.l1.max(self.l2).max(self.l3)
    }
}

/// The Wigner 3j symbol; zero whenever a selection rule fails.
pub fn wigner_3j(t: &TripleIndex) -> f64 {
    if !t.is_admissible() {
        return 0.0;
    }
    if t.max_degree() <= EXACT_MAX_DEGREE {
        wigner_3j_exact(t)
    } else {
        wigner_3j_recurrence(t)
    }
}

#[inline]
fn sign_of_power(exponent: i64) -> i64 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Racah formula in exact arithmetic. Requires an admissible index.
pub fn wigner_3j_exact(t: &TripleIndex) -> f64 {
    if !t.is_admissible() {
        return 0.0;
    }
    let (j1, j2, j3) = (i64::from(t.l1), i64::from(t.l2), i64::from(t.l3));
    let (m1, m2, m3) = (i64::from(t.m1), i64::from(t.m2), i64::from(t.m3));
    let f = |n: i64| n as usize;

    // square of the prefactor: Δ(j1 j2 j3) ∏ (j ± m)!
    let top = f(j1 + j2 + j3 + 1);
    let mut prefactor = PrimePower::one_upto(top);
    for n in [j1 + j2 - j3, j1 - j2 + j3, -j1 + j2 + j3, j1 + m1, j1 - m1, j2 + m2, j2 - m2, j3 + m3, j3 - m3] {
        prefactor.mul_factorial(f(n));
    }
    prefactor.div_factorial(f(j1 + j2 + j3 + 1));

    let k_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let k_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let terms: Vec<(i64, PrimePower)> = (k_min..=k_max)
        .map(|k| {
            let mut e = PrimePower::one_upto(top);
            for n in [k, j3 - j2 + k + m1, j3 - j1 + k - m2, j1 + j2 - j3 - k, j1 - k - m1, j2 - k + m2] {
                e.div_factorial(f(n));
            }
            (k, e)
        })
        .collect();
    let floor = terms.iter().skip(1).fold(terms[0].1.clone(), |acc, (_, e)| acc.componentwise_min(e));
    let mut sum = BigInt::from(0);
    for (k, e) in &terms {
        let n = BigInt::from_biguint(Sign::Plus, e.minus(&floor).to_integer());
        if k % 2 == 0 {
            sum += n;
        } else {
            sum -= n;
        }
    }
    if sum.sign() == Sign::NoSign {
        return 0.0;
    }
    let (num, den) = prefactor.plus(&floor.scaled(2)).to_fraction();
    let magnitude = sum.magnitude();
    let squared = ratio_to_f64(&(magnitude * magnitude * num), &den);
    let sign = sign_of_power(j1 - j2 - m3) * if sum.sign() == Sign::Minus { -1 } else { 1 };
    sign as f64 * squared.sqrt()
}

/// Row of symbols `(j1 j2 j3; m1, -m3-m1, m3)` over every allowed `m1`.
/// Returns the smallest allowed `m1` and the values in increasing `m1`.
pub fn wigner_3j_row(l1: u32, l2: u32, l3: u32, m3: i32) -> (i32, Vec<f64>) {
    let (j1, j2, j3) = (f64::from(l1), f64::from(l2), f64::from(l3));
    let (il1, il2) = (l1 as i32, l2 as i32);
    let lo = (-il1).max(-il2 - m3);
    let hi = il1.min(il2 - m3);
    let probe = TripleIndex::new(l1, l2, l3, lo, -m3 - lo, m3);
    if lo > hi || !probe.satisfies_triangle() || m3.unsigned_abs() > l3 {
        return (lo, Vec::new());
    }
    let n = (hi - lo + 1) as usize;
    if n == 1 {
        let v = (2.0 * j3 + 1.0).sqrt().recip() * sign_of_power(i64::from(il1 - il2 - m3)) as f64;
        return (lo, vec![v]);
    }
    let mf = f64::from(m3);
    let x = |m1: i32| {
        let m1 = f64::from(m1);
        let m2 = -mf - m1;
        j1 * (j1 + 1.0) + j2 * (j2 + 1.0) - j3 * (j3 + 1.0) + 2.0 * m1 * m2
    };
    let a = |m1: i32| {
        let m1 = f64::from(m1);
        let m2 = -mf - m1;
        ((j1 - m1 + 1.0) * (j1 + m1) * (j2 + m2 + 1.0) * (j2 - m2)).max(0.0).sqrt()
    };
    let b = |m1: i32| {
        let m1 = f64::from(m1);
        let m2 = -mf - m1;
        ((j1 + m1 + 1.0) * (j1 - m1) * (j2 - m2 + 1.0) * (j2 + m2)).max(0.0).sqrt()
    };

    // classically allowed region: X^2 < 4AB
    let allowed: Vec<i32> = (lo..=hi).filter(|&m| x(m).powi(2) < 4.0 * a(m) * b(m)).collect();
    let mid = match (allowed.first(), allowed.last()) {
        (Some(&l), Some(&r)) => (l + r).div_euclid(2),
        _ => lo + (hi - lo) / 2,
    }
    .clamp(lo, hi);
    // forward covers [lo, mid + 1], backward covers [mid - 1, hi]
    let fwd_end = (mid + 1).min(hi);
    let bwd_end = (mid - 1).max(lo);
    let idx = |m: i32| (m - lo) as usize;

    let mut fwd = vec![0.0; n];
    fwd[0] = 1.0;
    for m in lo..fwd_end {
        let prev = if m > lo { fwd[idx(m - 1)] } else { 0.0 };
        fwd[idx(m + 1)] = -(x(m) * fwd[idx(m)] + a(m) * prev) / b(m);
        if fwd[idx(m + 1)].abs() > RESCALE_ABOVE {
            fwd[..=idx(m + 1)].iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
        }
    }
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = 1.0;
    let mut m = hi;
    while m > bwd_end {
        let next = if m < hi { bwd[idx(m + 1)] } else { 0.0 };
        bwd[idx(m - 1)] = -(x(m) * bwd[idx(m)] + b(m) * next) / a(m);
        if bwd[idx(m - 1)].abs() > RESCALE_ABOVE {
            bwd[idx(m - 1)..].iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
        }
        m -= 1;
    }
    // least-squares scale of the backward solution over the overlap
    let (mut fg, mut gg) = (0.0, 0.0);
    for m in bwd_end..=fwd_end {
        fg += fwd[idx(m)] * bwd[idx(m)];
        gg += bwd[idx(m)] * bwd[idx(m)];
    }
    let scale = fg / gg;
    let mut row: Vec<f64> = (lo..=hi)
        .map(|m| if m <= mid { fwd[idx(m)] } else { bwd[idx(m)] * scale })
        .collect();
    let norm = ((2.0 * j3 + 1.0) * row.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let top_sign = sign_of_power(i64::from(il1 - il2 - m3)) as f64;
    let orient = if row[n - 1] * top_sign < 0.0 { -1.0 } else { 1.0 };
    row.iter_mut().for_each(|v| *v *= orient / norm);
    (lo, row)
}

/// Single symbol through [`wigner_3j_row`].
pub fn wigner_3j_recurrence(t: &TripleIndex) -> f64 {
    if !t.is_admissible() {
        return 0.0;
    }
    let (lo, row) = wigner_3j_row(t.l1, t.l2, t.l3, t.m3);
    row.get((t.m1 - lo) as usize).copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_indices(lmax: u32) -> impl Iterator<Item = TripleIndex> {
        (0..=lmax).flat_map(move |l1| {
            (0..=lmax).flat_map(move |l2| {
                (0..=lmax).flat_map(move |l3| {
                    (-(l1 as i32)..=l1 as i32).flat_map(move |m1| {
                        (-(l2 as i32)..=l2 as i32).map(move |m2| TripleIndex::new(l1, l2, l3, m1, m2, -m1 - m2))
                    })
                })
            })
        })
    }

    #[test]
    fn selection_rules() {
        assert_eq!(wigner_3j(&TripleIndex::new(1, 1, 5, 0, 0, 0)), 0.0);
        assert_eq!(wigner_3j(&TripleIndex::new(2, 2, 2, 1, 1, 1)), 0.0);
        assert_eq!(wigner_3j(&TripleIndex::new(2, 2, 2, 3, -3, 0)), 0.0);
        // odd l1 + l2 + l3 with all m = 0 vanishes
        assert_eq!(wigner_3j(&TripleIndex::new(1, 1, 1, 0, 0, 0)), 0.0);
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(wigner_3j(&TripleIndex::new(1, 1, 0, 0, 0, 0)), -1.0 / 3f64.sqrt(), max_relative = 1e-15);
        // (l l 0; m -m 0) = (-1)^{l-m} / sqrt(2l+1)
        for l in 0..12u32 {
            for m in -(l as i32)..=l as i32 {
                let expected = sign_of_power(i64::from(l as i32 - m)) as f64 / f64::from(2 * l + 1).sqrt();
                assert_relative_eq!(wigner_3j(&TripleIndex::new(l, l, 0, m, -m, 0)), expected, max_relative = 1e-14);
            }
        }
        // (1 1 2; 1 -1 0) = 1/sqrt(30), (2 2 2; 0 0 0) = -sqrt(2/35)
        assert_relative_eq!(wigner_3j(&TripleIndex::new(1, 1, 2, 1, -1, 0)), 30f64.sqrt().recip(), max_relative = 1e-14);
        assert_relative_eq!(wigner_3j(&TripleIndex::new(2, 2, 2, 0, 0, 0)), -(2.0f64 / 35.0).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn symmetries_exhaustive_to_l10() {
        for t in all_indices(10).filter(TripleIndex::is_admissible) {
            let v = wigner_3j(&t);
            let parity = sign_of_power(i64::from(t.l1 + t.l2 + t.l3)) as f64;
            let cyclic = wigner_3j(&TripleIndex::new(t.l2, t.l3, t.l1, t.m2, t.m3, t.m1));
            let swapped = wigner_3j(&TripleIndex::new(t.l2, t.l1, t.l3, t.m2, t.m1, t.m3));
            let flipped = wigner_3j(&TripleIndex::new(t.l1, t.l2, t.l3, -t.m1, -t.m2, -t.m3));
            assert!((v - cyclic).abs() <= 1e-15, "{t:?}");
            assert!((v - parity * swapped).abs() <= 1e-15, "{t:?}");
            assert!((v - parity * flipped).abs() <= 1e-15, "{t:?}");
        }
    }

    #[test]
    fn orthogonality_to_l10() {
        for l1 in 0..=10u32 {
            for l2 in 0..=10u32 {
                for l3 in l1.abs_diff(l2)..=(l1 + l2) {
                    for m3 in -(l3 as i32)..=l3 as i32 {
                        let mut s = 0.0;
                        for m1 in -(l1 as i32)..=l1 as i32 {
                            let v = wigner_3j(&TripleIndex::new(l1, l2, l3, m1, -m1 - m3, m3));
                            s += v * v;
                        }
                        assert!((f64::from(2 * l3 + 1) * s - 1.0).abs() <= 1e-12, "({l1} {l2} {l3}; m3={m3})");
                    }
                }
            }
        }
    }

    #[test]
    fn recurrence_agrees_with_exact() {
        for (l1, l2, l3) in [(3u32, 4u32, 5u32), (10, 10, 0), (10, 10, 20), (17, 30, 25), (60, 45, 38), (80, 80, 80)] {
            for m3 in [-(l3 as i32), -1, 0, 2, l3 as i32] {
                if m3.unsigned_abs() > l3 {
                    continue;
                }
                let (lo, row) = wigner_3j_row(l1, l2, l3, m3);
                for (i, v) in row.iter().enumerate() {
                    let m1 = lo + i as i32;
                    let exact = wigner_3j_exact(&TripleIndex::new(l1, l2, l3, m1, -m1 - m3, m3));
                    assert!((v - exact).abs() <= 1e-12, "({l1} {l2} {l3}; {m1} {m3}): {v} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn exact_at_threshold_matches_recurrence() {
        let t = TripleIndex::new(200, 150, 120, 17, -40, 23);
        let exact = wigner_3j_exact(&t);
        let rec = wigner_3j_recurrence(&t);
        assert!((exact - rec).abs() <= 1e-12, "{exact} vs {rec}");
        assert!(exact != 0.0);
    }

    #[test]
    fn high_degree_rows_are_orthonormal() {
        let (l1, l2, l3) = (400u32, 350u32, 300u32);
        let (_, row) = wigner_3j_row(l1, l2, l3, 5);
        let s: f64 = row.iter().map(|v| v * v).sum::<f64>() * f64::from(2 * l3 + 1);
        assert!((s - 1.0).abs() < 1e-12);
        // sign-flip symmetry through the dispatcher
        let t = TripleIndex::new(l1, l2, l3, 11, -16, 5);
        let flipped = TripleIndex::new(l1, l2, l3, -11, 16, -5);
        let parity = sign_of_power(i64::from(l1 + l2 + l3)) as f64;
        assert!((wigner_3j(&t) - parity * wigner_3j(&flipped)).abs() < 1e-13);
        // (l l 0; m -m 0) closed form survives the float path
        let v = wigner_3j(&TripleIndex::new(500, 500, 0, 7, -7, 0));
        assert_relative_eq!(v, -1.0 / 1001f64.sqrt(), max_relative = 1e-12);
    }
}
