//! Small exact-arithmetic helpers on arbitrary-precision integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// `n!`
pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `n! / k!` for `k ≤ n`, the falling product `(k+1)(k+2)…n`.
pub fn factorial_ratio(n: u32, k: u32) -> BigInt {
    debug_assert!(k <= n);
    (k + 1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
