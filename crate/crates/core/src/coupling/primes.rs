//! Prime-factorised factorials for exact angular-momentum algebra.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

/// Largest argument whose factorial factorisation is tabulated.
pub const MAX_FACTORIAL: usize = 1024;

struct FactorialTable {
    primes: Vec<u32>,
    /// `exponents[n][i]` = exponent of `primes[i]` in `n!`.
    exponents: Vec<Vec<i32>>,
}

fn table() -> &'static FactorialTable {
    static TABLE: OnceLock<FactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let primes = sieve(MAX_FACTORIAL as u32);
        let exponents = (0..=MAX_FACTORIAL as u64)
            .map(|n| {
                primes
                    .iter()
                    .map(|&p| {
                        // Legendre: v_p(n!) = Σ_k floor(n / p^k)
                        let (mut acc, mut q) = (0i32, u64::from(p));
                        while q <= n {
                            acc += (n / q) as i32;
                            q *= u64::from(p);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        FactorialTable { primes, exponents }
    })
}

fn sieve(limit: u32) -> Vec<u32> {
    let mut composite = vec![false; limit as usize + 1];
    let mut primes = Vec::new();
    for n in 2..=limit as usize {
        if !composite[n] {
            primes.push(n as u32);
            let mut k = n * n;
            while k <= limit as usize {
                composite[k] = true;
                k += n;
            }
        }
    }
    primes
}

/// A rational number `∏ p_i^{e_i}` stored by its prime exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePower {
    exponents: Vec<i32>,
}

impl PrimePower {
    pub fn one() -> Self {
        Self { exponents: vec![0; table().primes.len()] }
    }

    /// `1`, tracking only the primes `≤ n`: enough for products and
    /// quotients of factorials of arguments `≤ n`.
    pub fn one_upto(n: usize) -> Self {
        let len = table().primes.partition_point(|&p| (p as usize) <= n);
        Self { exponents: vec![0; len] }
    }

    pub fn factorial(n: usize) -> Self {
        assert!(n <= MAX_FACTORIAL, "factorial argument {n} above table limit");
        Self { exponents: table().exponents[n].clone() }
    }

    pub fn mul_factorial(&mut self, n: usize) {
        for (e, f) in self.exponents.iter_mut().zip(&table().exponents[n]) {
            *e += f;
        }
    }

    pub fn div_factorial(&mut self, n: usize) {
        for (e, f) in self.exponents.iter_mut().zip(&table().exponents[n]) {
            *e -= f;
        }
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exponents
    }

    pub fn componentwise_min(&self, other: &Self) -> Self {
        Self { exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| *a.min(b)).collect() }
    }

    pub fn scaled(&self, k: i32) -> Self {
        Self { exponents: self.exponents.iter().map(|e| e * k).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| a + b).collect() }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self { exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| a - b).collect() }
    }

    /// Numerator and denominator as integers.
    pub fn to_fraction(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (&p, &e) in table().primes.iter().zip(&self.exponents) {
            if e > 0 {
                num *= BigUint::from(p).pow(e as u32);
            } else if e < 0 {
                den *= BigUint::from(p).pow((-e) as u32);
            }
        }
        (num, den)
    }

    /// The value as an integer; panics on negative exponents.
    pub fn to_integer(&self) -> BigUint {
        let (num, den) = self.to_fraction();
        assert!(den.is_one(), "prime power is not an integer");
        num
    }
}

/// `num / den` rounded to `f64` without overflowing the intermediates.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.bits() == 0 {
        return 0.0;
    }
    // scale so the integer quotient carries 64 significant bits
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let quotient = if shift > 0 { num / (den << shift as usize) } else { (num << (-shift) as usize) / den };
    let q = quotient.iter_u64_digits().fold((0.0f64, 1.0f64), |(acc, scale), digit| {
        (acc + digit as f64 * scale, scale * 18446744073709551616.0)
    });
    libm::ldexp(q.0, shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(PrimePower::factorial(0).to_integer(), BigUint::one());
        assert_eq!(PrimePower::factorial(5).to_integer(), BigUint::from(120u32));
        assert_eq!(PrimePower::factorial(12).to_integer(), BigUint::from(479_001_600u64));
    }

    #[test]
    fn ratio_conversion() {
        let big = PrimePower::factorial(600).to_integer();
        let bigger = PrimePower::factorial(601).to_integer();
        assert_eq!(ratio_to_f64(&bigger, &big), 601.0);
        assert_eq!(ratio_to_f64(&big, &bigger), 1.0 / 601.0);
        assert_eq!(ratio_to_f64(&BigUint::from(1u32), &BigUint::from(3u32)), 1.0 / 3.0);
    }
}
