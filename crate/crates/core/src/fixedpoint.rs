//! Fixed-point reals over arbitrary-precision integers.
//!
//! A real `x` is represented by the integer `floor(m * x)` where `m` is the
//! [`Magnifier`] of the computation. Multiplication, division and square root
//! round toward minus infinity, so each of them returns a value in
//! `(exact - 1/m, exact]`. Addition, subtraction and scaling by a small
//! integer are exact.
//!
//! Only nonnegative values are representable.

use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Smallest magnifier we accept is 1001: at least three decimal digits of
/// working precision, which the rounding lemmas assume.
pub const MIN_MAGNIFIER: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixedPointError {
    #[error("magnifier must exceed {MIN_MAGNIFIER}")]
    MagnifierTooSmall,
    #[error("operands carry different magnifiers")]
    MagnifierMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative value {0} is outside the fixed-point domain")]
    Negative(String),
    #[error("subtraction underflows below zero")]
    Underflow,
    #[error("change of magnifier must strictly decrease it (from {from} bits to {to} bits)")]
    Upscale { from: u64, to: u64 },
}

struct MagnifierInner {
    value: BigUint,
    log2: Option<u64>,
}

/// The scaling factor `m` of a fixed-point computation.
///
/// Cheap to clone; every [`FixedReal`] produced under a magnifier keeps a
/// handle to it.
#[derive(Clone)]
pub struct Magnifier {
    inner: Arc<MagnifierInner>,
}

impl Magnifier {
    pub fn new(value: BigUint) -> Result<Self, FixedPointError> {
        if value <= BigUint::from(MIN_MAGNIFIER) {
            return Err(FixedPointError::MagnifierTooSmall);
        }
        let log2 = power_of_two_exponent(&value);
        Ok(Magnifier {
            inner: Arc::new(MagnifierInner { value, log2 }),
        })
    }

    /// `m = 2^bits`; scaling then reduces to shifts.
    pub fn power_of_two(bits: u64) -> Result<Self, FixedPointError> {
        Self::new(BigUint::one() << bits)
    }

    /// `m = base^exp`.
    pub fn power(base: u32, exp: u32) -> Result<Self, FixedPointError> {
        Self::new(BigUint::from(base).pow(exp))
    }

    pub fn value(&self) -> &BigUint {
        &self.inner.value
    }

    /// `Some(k)` when the magnifier is exactly `2^k`.
    pub fn log2(&self) -> Option<u64> {
        self.inner.log2
    }

    pub fn bits(&self) -> u64 {
        self.inner.value.bits()
    }

    /// Lift a general magnifier out of the power-of-two fast path. Only
    /// useful for comparing the two code paths.
    pub fn without_fast_path(&self) -> Magnifier {
        Magnifier {
            inner: Arc::new(MagnifierInner {
                value: self.inner.value.clone(),
                log2: None,
            }),
        }
    }

    pub fn same_as(&self, other: &Magnifier) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.value == other.inner.value
    }

    /// Wrap a raw mantissa.
    pub fn real(&self, mantissa: BigUint) -> FixedReal {
        FixedReal {
            mantissa,
            magnifier: self.clone(),
        }
    }

    /// Wrap a signed mantissa, rejecting negative values.
    pub fn real_signed(&self, mantissa: BigInt) -> Result<FixedReal, FixedPointError> {
        match mantissa.sign() {
            Sign::Minus => Err(FixedPointError::Negative(mantissa.to_string())),
            _ => Ok(self.real(mantissa.magnitude().clone())),
        }
    }

    /// The exact representation of the integer `n`.
    pub fn int(&self, n: u64) -> FixedReal {
        self.real(self.value() * n)
    }

    /// `1`, represented exactly by `m`.
    pub fn one(&self) -> FixedReal {
        self.real(self.value().clone())
    }

    /// `2`, represented exactly by `2m`.
    pub fn two(&self) -> FixedReal {
        self.int(2)
    }

    /// `floor(x * y / m)`.
    pub fn mul(&self, x: &FixedReal, y: &FixedReal) -> Result<FixedReal, FixedPointError> {
        self.check(x)?;
        self.check(y)?;
        let product = &x.mantissa * &y.mantissa;
        Ok(self.real(self.unscale(product)))
    }

    /// `floor(x * m / y)`.
    pub fn div(&self, x: &FixedReal, y: &FixedReal) -> Result<FixedReal, FixedPointError> {
        self.check(x)?;
        self.check(y)?;
        if y.mantissa.is_zero() {
            return Err(FixedPointError::DivisionByZero);
        }
        Ok(self.real(self.scale_up(&x.mantissa) / &y.mantissa))
    }

    /// `isqrt(x * m)`.
    pub fn sqrt(&self, x: &FixedReal) -> Result<FixedReal, FixedPointError> {
        self.check(x)?;
        Ok(self.real(isqrt(&self.scale_up(&x.mantissa))))
    }

    /// Floor of `n / m` for an integer `n` carrying scale `m^2`.
    pub fn unscale(&self, n: BigUint) -> BigUint {
        match self.inner.log2 {
            Some(k) => n >> k,
            None => n / self.value(),
        }
    }

    fn scale_up(&self, n: &BigUint) -> BigUint {
        match self.inner.log2 {
            Some(k) => n << k,
            None => n * self.value(),
        }
    }

    fn check(&self, x: &FixedReal) -> Result<(), FixedPointError> {
        if self.same_as(&x.magnifier) {
            Ok(())
        } else {
            Err(FixedPointError::MagnifierMismatch)
        }
    }
}

impl PartialEq for Magnifier {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Magnifier {}

impl fmt::Debug for Magnifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.inner.log2 {
            Some(k) => write!(f, "Magnifier(2^{k})"),
            None => write!(f, "Magnifier({} bits)", self.bits()),
        }
    }
}

fn power_of_two_exponent(n: &BigUint) -> Option<u64> {
    let tz = n.trailing_zeros()?;
    (n.bits() == tz + 1).then_some(tz)
}

/// A nonnegative real held as `mantissa / magnifier`.
#[derive(Clone, PartialEq, Eq)]
pub struct FixedReal {
    mantissa: BigUint,
    magnifier: Magnifier,
}

impl FixedReal {
    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn into_mantissa(self) -> BigUint {
        self.mantissa
    }

    pub fn magnifier(&self) -> &Magnifier {
        &self.magnifier
    }

    pub fn checked_add(&self, other: &FixedReal) -> Result<FixedReal, FixedPointError> {
        self.magnifier.check(other)?;
        Ok(self.magnifier.real(&self.mantissa + &other.mantissa))
    }

    pub fn checked_sub(&self, other: &FixedReal) -> Result<FixedReal, FixedPointError> {
        self.magnifier.check(other)?;
        if other.mantissa > self.mantissa {
            return Err(FixedPointError::Underflow);
        }
        Ok(self.magnifier.real(&self.mantissa - &other.mantissa))
    }

    /// Exact multiplication by a small integer.
    pub fn scale(&self, factor: u64) -> FixedReal {
        self.magnifier.real(&self.mantissa * factor)
    }

    /// `floor(x / 2)` on the mantissa.
    pub fn halve(&self) -> FixedReal {
        self.magnifier.real(&self.mantissa >> 1u32)
    }

    /// Lossy view for diagnostics.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.mantissa, self.magnifier.value())
    }
}

impl fmt::Debug for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedReal({:.12} @ {:?})", self.to_f64(), self.magnifier)
    }
}

/// Re-express `x` under a smaller magnifier: `floor(x * m2 / m1)`.
///
/// The result lies in `(x - 1/m2, x]`.
pub fn change_magnifier(x: &FixedReal, target: &Magnifier) -> Result<FixedReal, FixedPointError> {
    let mantissa = rescale_mantissa(x.mantissa(), x.magnifier(), target.value())?;
    Ok(target.real(mantissa))
}

/// `floor(mantissa * to / from)` for any scale `0 < to < from`, including
/// output scales too small to serve as a working magnifier.
pub fn rescale_mantissa(
    mantissa: &BigUint,
    from: &Magnifier,
    to: &BigUint,
) -> Result<BigUint, FixedPointError> {
    if to.is_zero() || to >= from.value() {
        return Err(FixedPointError::Upscale {
            from: from.bits(),
            to: to.bits(),
        });
    }
    Ok(from.unscale(mantissa * to))
}

/// Integer square root: the `r` with `r^2 <= n < (r + 1)^2`.
///
/// Recursively computes the root of the top half of the bits, then runs the
/// decreasing Newton iteration from an upper bound, which stops exactly at
/// the floor.
pub fn isqrt(n: &BigUint) -> BigUint {
    let bits = n.bits();
    if bits <= 64 {
        return BigUint::from(isqrt_u64(n.to_u64().unwrap()));
    }
    let k = bits / 4;
    let top = isqrt(&(n >> (2 * k)));
    let mut x: BigUint = (top + 1u32) << k;
    loop {
        let y: BigUint = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// [`isqrt`] for signed input; negative values are a domain error.
pub fn isqrt_signed(n: &BigInt) -> Result<BigUint, FixedPointError> {
    match n.sign() {
        Sign::Minus => Err(FixedPointError::Negative(n.to_string())),
        _ => Ok(isqrt(n.magnitude())),
    }
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

/// A count of units in the last place, `1/m` each.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Ulp(pub BigUint);

impl Ulp {
    pub fn new(count: impl Into<BigUint>) -> Self {
        Ulp(count.into())
    }

    pub fn count(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Convert to ulps of `to`, rounding up: `ceil(count * to / from)`.
    pub fn rescaled(&self, from: &Magnifier, to: &Magnifier) -> Ulp {
        let (q, r) = (&self.0 * to.value()).div_rem(from.value());
        Ulp(if r.is_zero() { q } else { q + 1u32 })
    }
}

impl Add for Ulp {
    type Output = Ulp;
    fn add(self, rhs: Ulp) -> Ulp {
        Ulp(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Ulp> for &'a Ulp {
    type Output = Ulp;
    fn add(self, rhs: &Ulp) -> Ulp {
        Ulp(&self.0 + &rhs.0)
    }
}

impl From<u64> for Ulp {
    fn from(n: u64) -> Self {
        Ulp(BigUint::from(n))
    }
}

impl fmt::Display for Ulp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `num / den` as an `f64`, tolerant of operands far beyond `f64` range.
pub(crate) fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let (a, sa) = top_bits(num);
    let (b, sb) = top_bits(den);
    a / b * (sa as f64 - sb as f64).exp2()
}

/// `n` as `mantissa * 2^shift` with the mantissa exact in 64 bits.
fn top_bits(n: &BigUint) -> (f64, u64) {
    let shift = n.bits().saturating_sub(64);
    ((n >> shift).to_u64().unwrap() as f64, shift)
}

/// `log2(n)` as an `f64`; `None` for zero.
pub(crate) fn log2_big(n: &BigUint) -> Option<f64> {
    let bits = n.bits();
    if bits == 0 {
        return None;
    }
    let shift = bits.saturating_sub(63);
    let top = (n >> shift).to_u64().unwrap() as f64;
    Some(top.log2() + shift as f64)
}
