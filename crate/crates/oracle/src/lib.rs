//! Reference values used by the pi-forge test suites.
//!
//! Nothing here shares code with the production kernels. Digits of pi come
//! from Machin's arctangent formula evaluated with interval bounds, the
//! AGM-family sequences come from a plain high-precision evaluator built on
//! `num-bigint`'s own square root, and the BBP partial sums are exact
//! rationals.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub mod hp;

/// Bracket `[lo, hi]` of `pi * 2^bits`, both integers, with `lo < pi * 2^bits < hi`.
pub fn pi_bracket(bits: u64) -> (BigInt, BigInt) {
    let (s5, k5) = arctan_inv(5, bits);
    let (s239, k239) = arctan_inv(239, bits);
    let center = BigInt::from(16) * s5 - BigInt::from(4) * s239;
    let slack = BigInt::from(16 * (k5 + 2) + 4 * (k239 + 2));
    (&center - &slack, center + slack)
}

/// `sum_i (-1)^i floor(2^bits / (x^(2i+1) (2i+1)))` and the number of terms.
/// The true `atan(1/x) * 2^bits` lies within `terms + 2` of the sum.
fn arctan_inv(x: u64, bits: u64) -> (BigInt, u64) {
    let x2 = BigUint::from(x * x);
    let mut power = (BigUint::one() << bits) / x;
    let mut sum = BigInt::zero();
    let mut i = 0u64;
    while !power.is_zero() {
        let term = BigInt::from(&power / (2 * i + 1));
        if i.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        i += 1;
    }
    (sum, i)
}

/// `floor(pi * base^n)`, certified by the Machin bracket.
pub fn pi_floor_scaled(base: u32, n: u64) -> BigUint {
    let scale = BigUint::from(base).pow(n as u32);
    let mut bits = scale.bits() + 64;
    loop {
        let (lo, hi) = pi_bracket(bits);
        let lo_q = (lo.to_biguint().unwrap() * &scale) >> bits;
        let hi_q = (hi.to_biguint().unwrap() * &scale) >> bits;
        if lo_q == hi_q {
            return lo_q;
        }
        bits += 64;
    }
}

/// `"3."` followed by `n` digits of pi in `base` (10 or 16, hex upper-case).
pub fn pi_digits(base: u32, n: u64) -> String {
    let q = pi_floor_scaled(base, n);
    let mut text = q.to_str_radix(base).to_uppercase();
    assert_eq!(text.len() as u64, n + 1);
    text.insert(1, '.');
    text
}

/// Hexadecimal digit of pi at 1-based position `d` after the point:
/// `floor(pi * 16^d) mod 16`.
pub fn hex_digit(d: u64) -> u8 {
    (pi_floor_scaled(16, d) % 16u32).to_u8().unwrap()
}

/// All hex digits at positions `1..=n`, index 0 holding position 1.
pub fn hex_digits(n: u64) -> Vec<u8> {
    pi_digits(16, n)[2..]
        .chars()
        .map(|c| c.to_digit(16).unwrap() as u8)
        .collect()
}

/// Exact value of the first BBP partial sum scaled by `16^(d-1) 2^p`:
/// `sum_{0 <= i < d} 2^p 16^(d-1-i) / (8i + k)`.
pub fn bbp_low_exact(k: u64, d: u64, p: u32) -> BigRational {
    let mut total = BigRational::zero();
    for i in 0..d {
        let num = BigInt::one() << (p as u64 + 4 * (d - 1 - i));
        total += BigRational::new(num, BigInt::from(8 * i + k));
    }
    total
}

/// Exact value of the middle BBP partial sum over `d <= i < d + p/4`,
/// with the same scaling as [`bbp_low_exact`].
pub fn bbp_mid_exact(k: u64, d: u64, p: u32) -> BigRational {
    let mut total = BigRational::zero();
    let two_p = BigInt::one() << p as u64;
    for j in 0..(p as u64 / 4) {
        let i = d + j;
        let den = (BigInt::one() << (4 * (j + 1))) * BigInt::from(8 * i + k);
        total += BigRational::new(two_p.clone(), den);
    }
    total
}

/// Reduce `x` into `[0, modulus)` for a rational `x` and integer modulus.
pub fn rational_mod(x: &BigRational, modulus: &BigInt) -> BigRational {
    let m = BigRational::from_integer(modulus.clone());
    let q = (x / &m).floor();
    x - q * m
}

/// `true` when `a < sqrt(b)` for rationals, `b >= 0`.
pub fn lt_sqrt(a: &BigRational, b: &BigRational) -> bool {
    if a.is_negative() || a.is_zero() {
        return !(a.is_zero() && b.is_zero());
    }
    a * a < *b
}

/// `true` when `sqrt(b) < a`.
pub fn sqrt_lt(b: &BigRational, a: &BigRational) -> bool {
    if !a.is_positive() {
        return false;
    }
    *b < a * a
}

/// Integer `n` as a rational.
pub fn ratio(n: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(
        BigInt::from_biguint(Sign::Plus, n.clone()),
        BigInt::from_biguint(Sign::Plus, den.clone()),
    )
}

/// `floor(x)` for a nonnegative rational, as an unsigned integer.
pub fn floor_u(x: &BigRational) -> BigUint {
    let (q, _) = x.numer().div_mod_floor(x.denom());
    q.to_biguint().expect("nonnegative")
}
