//! Exact combinatorial quantities: Catalan numbers, semicircle moments and
//! the alternating binomial power sums.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C_n = binom(2n, n)/(n + 1)`.
pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n, n) / (n + 1)
}

/// Radius `2√(1 − 1/k)` of the limiting bulk semicircle.
pub fn semicircle_radius(k: usize) -> f64 {
    2.0 * (1.0 - 1.0 / k as f64).sqrt()
}

/// `ℓ`-th moment of the bulk limit: `C_{ℓ/2}·((k − 1)/k)^{ℓ/2}` for even `ℓ`,
/// zero for odd `ℓ`.
pub fn semicircle_moment(l: u32, k: usize) -> BigRational {
    if l % 2 == 1 || k == 0 {
        return BigRational::zero();
    }
    let half = l / 2;
    let ratio = BigRational::new(BigInt::from(k as u64 - 1), BigInt::from(k as u64));
    BigRational::from_integer(BigInt::from(catalan(u64::from(half)))) * Pow::pow(ratio, half)
}

/// `Σ_{j=0}^{m} (−1)^j binom(m, j) j^p` with `0^0 = 1`. This vanishes for
/// `p < m` and equals `(−1)^m m!` at `p = m`.
pub fn combinatorial_identity(m: u32, p: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=m {
        let term = BigInt::from(binomial(u64::from(m), u64::from(j))) * Pow::pow(BigInt::from(j), p);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn factorial(n: u32) -> BigUint {
    (1..=u64::from(n)).fold(BigUint::one(), |acc, i| acc * i)
}

/// `(n − 1)!!` for even `n`, the `n`-th moment of a standard Gaussian; zero
/// for odd `n`.
pub fn gaussian_moment(n: u32) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    (1..n).step_by(2).fold(BigUint::one(), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn catalan_prefix() {
        let expected = [1u32, 1, 2, 5, 14, 42, 132, 429, 1430, 4862];
        for (n, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(n as u64), BigUint::from(c));
        }
    }

    #[test]
    fn catalan_counts_dyck_paths() {
        // brute force: balanced ±1 sequences that never dip below zero
        for n in 0..8u32 {
            let len = 2 * n;
            let mut count = 0u64;
            for mask in 0u32..(1 << len) {
                let mut h = 0i32;
                let mut ok = true;
                for b in 0..len {
                    h += if mask >> b & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        ok = false;
                        break;
                    }
                }
                if ok && h == 0 {
                    count += 1;
                }
            }
            assert_eq!(catalan(u64::from(n)), BigUint::from(count));
        }
    }

    #[test]
    fn semicircle_examples() {
        assert_eq!(semicircle_moment(2, 2), rat(1, 2));
        assert_eq!(semicircle_moment(4, 2), rat(1, 2));
        assert_eq!(semicircle_moment(6, 2), rat(5, 8));
        assert_eq!(semicircle_moment(0, 7), rat(1, 1));
        for k in 1..6 {
            assert!(semicircle_moment(5, k).is_zero());
        }
    }

    #[test]
    fn semicircle_tends_to_catalan() {
        // C_{l/2}·(1 − 1/k)^{l/2} → C_{l/2}: the gap is O(1/k)
        for l in [2u32, 4, 6, 8] {
            let c = BigRational::from_integer(BigInt::from(catalan(u64::from(l / 2))));
            let mut prev_gap: Option<BigRational> = None;
            for k in [10usize, 100, 1000, 10_000] {
                let gap = &c - semicircle_moment(l, k);
                assert!(gap > BigRational::zero());
                let bound = &c * rat(i64::from(l / 2), k as i64);
                assert!(gap <= bound);
                if let Some(p) = prev_gap {
                    assert!(gap < p);
                }
                prev_gap = Some(gap);
            }
        }
    }

    #[test]
    fn semicircle_moments_match_radius_formula() {
        // (R/2)^l C_{l/2} with R = 2√(1 − 1/k)
        for k in 2..6usize {
            for l in (0..12).step_by(2) {
                let r = semicircle_radius(k);
                let expect = (r / 2.0).powi(l as i32) * catalan(u64::from(l / 2)).to_string().parse::<f64>().unwrap();
                let got = num_traits::ToPrimitive::to_f64(&semicircle_moment(l, k)).unwrap();
                assert!((expect - got).abs() < 1e-12 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn identity_examples() {
        assert_eq!(combinatorial_identity(3, 1), BigInt::from(0));
        assert_eq!(combinatorial_identity(3, 3), BigInt::from(-6));
        assert_eq!(combinatorial_identity(0, 0), BigInt::from(1));
    }

    #[test]
    fn identity_vanishes_below_m() {
        for m in 0..=12u32 {
            for p in 0..m {
                assert!(combinatorial_identity(m, p).is_zero(), "m={m} p={p}");
            }
            let signed = BigInt::from(factorial(m)) * if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(combinatorial_identity(m, m), signed);
        }
    }

    #[test]
    fn gaussian_moments() {
        let expected = [1u32, 0, 1, 0, 3, 0, 15, 0, 105];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(gaussian_moment(n as u32), BigUint::from(e));
        }
    }
}
