//! Randomised trials of the rounding lemmas and fixed-point windows, checked
//! in exact rational arithmetic. Square roots are never evaluated: every
//! comparison against `sqrt(q)` is squared first.
//!
//! Each trial draws a magnifier, an error allowance and inputs that satisfy
//! the lemma's hypotheses, runs the fixed-point kernel on the tainted
//! mantissas and returns `Err` with a description if the conclusion fails.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pi_forge::fixedpoint::{isqrt, rescale_mantissa, Magnifier};
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn big(n: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

fn qu(n: &BigUint, d: &BigUint) -> Q {
    Q::new(big(n), big(d))
}

pub fn random_big(rng: &mut impl Rng, bits: u64) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
    let n = BigUint::new(digits);
    let excess = (words as u64 * 32).saturating_sub(bits);
    n >> excess
}

/// Uniform-ish integer in `[lo, hi]`.
fn random_between(rng: &mut impl Rng, lo: &BigUint, hi: &BigUint) -> BigUint {
    let span = hi - lo + 1u32;
    lo + random_big(rng, span.bits() + 32) % span
}

/// Random magnifier: a power of two, a power of ten or an arbitrary value
/// above 1000.
pub fn random_magnifier(rng: &mut impl Rng) -> Magnifier {
    match rng.random_range(0..3) {
        0 => Magnifier::power_of_two(rng.random_range(10..200)).unwrap(),
        1 => Magnifier::power(10, rng.random_range(4..60)).unwrap(),
        _ => {
            let bits = rng.random_range(10..160);
            let v = random_big(rng, bits) | (BigUint::one() << (bits - 1));
            Magnifier::new(v.max(BigUint::from(1001u32))).unwrap()
        }
    }
}

/// Rational in `(-1, 1)`, sometimes at the extremes.
fn unit(rng: &mut impl Rng) -> Q {
    match rng.random_range(0..8) {
        0 => Q::zero(),
        1 => q((1 << 31) - 1, 1 << 31),
        2 => -q((1 << 31) - 1, 1 << 31),
        _ => Q::new(
            BigInt::from(rng.random_range(1..u32::MAX as i64)) - (1i64 << 31),
            BigInt::from(1i64 << 31),
        ),
    }
}

/// Rational in `[0, 1)`.
fn frac(rng: &mut impl Rng) -> Q {
    Q::new(rng.random_range(0..u32::MAX as i64).into(), BigInt::from(1i64 << 32))
}

#[derive(Clone, Copy)]
pub struct Range {
    pub lo: (i64, i64),
    pub hi: (i64, i64),
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Range {
    fn contains(&self, x: &Q) -> bool {
        let lo = q(self.lo.0, self.lo.1);
        let hi = q(self.hi.0, self.hi.1);
        let above = if self.lo_open { *x > lo } else { *x >= lo };
        let below = if self.hi_open { *x < hi } else { *x <= hi };
        above && below
    }
}

/// A mantissa `X` and an exact value `x` in `range` with `|X/m - x| < err`.
fn tainted(rng: &mut impl Rng, m: &Magnifier, range: Range, err: &Q) -> (BigUint, Q) {
    let mv = Q::from_integer(big(m.value()));
    let lo = ((q(range.lo.0, range.lo.1) - err) * &mv).floor();
    let hi = ((q(range.hi.0, range.hi.1) + err) * &mv).ceil();
    let lo = lo.to_integer().max(BigInt::zero()).to_biguint().unwrap();
    let hi = hi.to_integer().to_biguint().unwrap();
    loop {
        let x_m = random_between(rng, &lo, &hi);
        let h = err * unit(rng);
        let x = qu(&x_m, m.value()) - h;
        if range.contains(&x) {
            return (x_m, x);
        }
    }
}

/// `c/m` with `c` drawn from `[lo, min(m * cap, 2^40))`, so that the
/// allowance is at least `lo` ulps and strictly below `cap`.
fn allowance(rng: &mut impl Rng, m: &Magnifier, lo: i64, cap: &Q) -> Q {
    let mv = Q::from_integer(big(m.value()));
    let top = (&mv * cap).min(Q::from_integer(BigInt::one() << 40u32));
    let lo = Q::from_integer(lo.into());
    let c = &lo + (&top - &lo) * frac(rng);
    c / mv
}

fn as_q(x: &BigUint, m: &Magnifier) -> Q {
    qu(x, m.value())
}

/// `num / (den * sqrt(s)) > bound`, all positive except possibly `bound`.
fn ratio_sqrt_gt(num: &Q, den: &Q, s: &Q, bound: &Q) -> bool {
    !bound.is_positive() || num * num > bound * bound * den * den * s
}

/// `num / (den * sqrt(s)) < bound`.
fn ratio_sqrt_lt(num: &Q, den: &Q, s: &Q, bound: &Q) -> bool {
    bound.is_positive() && num * num < bound * bound * den * den * s
}

/// `y1 - e' < div(1 + (y+h), 2 sqrt(y+h)) < y1 + e'` with
/// `y1 = (1 + y) / (2 sqrt y)`.
pub fn y_error_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m = random_magnifier(rng);
    let ep = allowance(rng, &m, 2, &q(1, 10));
    let range = Range { lo: (1, 1), hi: (71, 50), lo_open: false, hi_open: false };
    let (y_m, y) = tainted(rng, &m, range, &ep);
    let yt = m.real(y_m);
    let one = m.one();
    let out = m
        .div(&one.checked_add(&yt).unwrap(), &m.sqrt(&yt).unwrap().scale(2))
        .unwrap();
    let c = as_q(out.mantissa(), &m);
    let num = Q::one() + &y;
    let two = q(2, 1);
    if ratio_sqrt_gt(&num, &two, &y, &(&c - &ep)) && ratio_sqrt_lt(&num, &two, &y, &(&c + &ep)) {
        Ok(())
    } else {
        Err(format!("y_error: m = {:?}, y = {y}, e' = {ep}, got {c}", m))
    }
}

/// `v - e' < div(1 + mul(z+h', y+h), mul(1 + (z+h'), sqrt(y+h))) < v + e'`
/// with `v = (1 + z y) / ((1 + z) sqrt y)`.
pub fn z_error_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m = random_magnifier(rng);
    let ep = allowance(rng, &m, 4, &q(1, 50));
    let yr = Range { lo: (1, 1), hi: (51, 50), lo_open: true, hi_open: true };
    let zr = Range { lo: (1, 1), hi: (6, 5), lo_open: true, hi_open: true };
    let (y_m, y) = tainted(rng, &m, yr, &ep);
    let (z_m, z) = tainted(rng, &m, zr, &ep);
    let (yt, zt) = (m.real(y_m), m.real(z_m));
    let one = m.one();
    let out = m
        .div(
            &one.checked_add(&m.mul(&zt, &yt).unwrap()).unwrap(),
            &m.mul(&one.checked_add(&zt).unwrap(), &m.sqrt(&yt).unwrap()).unwrap(),
        )
        .unwrap();
    let c = as_q(out.mantissa(), &m);
    let num = Q::one() + &z * &y;
    let den = Q::one() + &z;
    if ratio_sqrt_gt(&num, &den, &y, &(&c - &ep)) && ratio_sqrt_lt(&num, &den, &y, &(&c + &ep)) {
        Ok(())
    } else {
        Err(format!("z_error: m = {m:?}, y = {y}, z = {z}, e' = {ep}, got {c}"))
    }
}

/// `|div(1 + (y+h), 1 + (z+h')) - (1+y)/(1+z)| < 13/10 e'` with
/// `|h| < e'/2`, `|h'| < e'`.
pub fn quotient_error_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m = random_magnifier(rng);
    let ep = allowance(rng, &m, 4, &q(1, 40));
    let yr = Range { lo: (1, 1), hi: (51, 50), lo_open: true, hi_open: true };
    let zr = Range { lo: (1, 1), hi: (6, 5), lo_open: true, hi_open: true };
    let (y_m, y) = tainted(rng, &m, yr, &(&ep / q(2, 1)));
    let (z_m, z) = tainted(rng, &m, zr, &ep);
    let one = m.one();
    let out = m
        .div(
            &one.checked_add(&m.real(y_m)).unwrap(),
            &one.checked_add(&m.real(z_m)).unwrap(),
        )
        .unwrap();
    let c = as_q(out.mantissa(), &m);
    let exact = (Q::one() + &y) / (Q::one() + &z);
    if (c.clone() - exact).abs() < q(13, 10) * &ep {
        Ok(())
    } else {
        Err(format!("quotient_error: m = {m:?}, y = {y}, z = {z}, e' = {ep}, got {c}"))
    }
}

/// `|mul(p+h, v+h') - p v| < e1 + 23/20 e2`.
pub fn product_error_step_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m = random_magnifier(rng);
    let mv = Q::from_integer(big(m.value()));
    // e < e2 / 5 means e2 > 5 ulps; both allowances at most 1/100
    let e2 = {
        let lo = q(5, 1) / &mv;
        let hi = q(1, 100);
        if lo >= hi {
            return Ok(());
        }
        let mut e2 = &lo + (&hi - &lo) * frac(rng);
        if e2 == lo {
            e2 = &lo + (&hi - &lo) / q(2, 1);
        }
        e2
    };
    let e1 = match rng.random_range(0..4) {
        0 => q(1, 100),
        1 => &e2 / q(3, 1),
        _ => q(1, 100) * (Q::one() - frac(rng)),
    };
    let pr = Range { lo: (1, 2), hi: (921, 1000), lo_open: true, hi_open: true };
    let vr = Range { lo: (1, 2), hi: (1, 1), lo_open: true, hi_open: false };
    let (p_m, p) = tainted(rng, &m, pr, &e1);
    let (v_m, v) = tainted(rng, &m, vr, &e2);
    let out = m.mul(&m.real(p_m), &m.real(v_m)).unwrap();
    let c = as_q(out.mantissa(), &m);
    if (c.clone() - &p * &v).abs() < &e1 + q(23, 20) * &e2 {
        Ok(())
    } else {
        Err(format!("product_error_step: m = {m:?}, p = {p}, v = {v}, got {c}"))
    }
}

/// `x - 1/m2 < rescale(x) <= x` for `0 < m2 < m1`.
pub fn change_magnifier_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m1 = random_magnifier(rng);
    let to = random_between(rng, &BigUint::one(), &(m1.value() - 1u32));
    let x_m = random_big(rng, m1.bits() + 4);
    let out = rescale_mantissa(&x_m, &m1, &to).unwrap();
    let x = qu(&x_m, m1.value());
    let c = qu(&out, &to);
    if c <= x && x - qu(&BigUint::one(), &to) < c {
        Ok(())
    } else {
        Err(format!("change_magnifier: m1 = {m1:?}, m2 = {to}, x = {x_m}, got {out}"))
    }
}

/// `r^2 <= n < (r+1)^2` for a random integer of `bits` bits.
pub fn isqrt_trial(rng: &mut impl Rng, bits: u64) -> Result<(), String> {
    let n = random_big(rng, bits);
    let r = isqrt(&n);
    if &r * &r <= n && n < (&r + 1u32) * (&r + 1u32) {
        Ok(())
    } else {
        Err(format!("isqrt({n}) = {r}"))
    }
}

fn operands(rng: &mut impl Rng, m: &Magnifier) -> (BigUint, BigUint) {
    let span = m.bits() + rng.random_range(0..8);
    let x = random_big(rng, span);
    let y = random_big(rng, span) + 1u32;
    (x, y)
}

/// `mul`, `div` and `sqrt` each land in `(exact - 1/m, exact]`.
pub fn kernel_window_trial(rng: &mut impl Rng) -> Result<(), String> {
    let m = random_magnifier(rng);
    let mv = m.value();
    let (x, y) = operands(rng, &m);
    let (fx, fy) = (m.real(x.clone()), m.real(y.clone()));
    let p = m.mul(&fx, &fy).unwrap().into_mantissa();
    if !(&p * mv <= &x * &y && &x * &y < (&p + 1u32) * mv) {
        return Err(format!("mul: m = {m:?}, {x} * {y} -> {p}"));
    }
    let d = m.div(&fx, &fy).unwrap().into_mantissa();
    if !(&d * &y <= &x * mv && &x * mv < (&d + 1u32) * &y) {
        return Err(format!("div: m = {m:?}, {x} / {y} -> {d}"));
    }
    let s = m.sqrt(&fx).unwrap().into_mantissa();
    if !(&s * &s <= &x * mv && &x * mv < (&s + 1u32) * (&s + 1u32)) {
        return Err(format!("sqrt: m = {m:?}, sqrt {x} -> {s}"));
    }
    Ok(())
}

/// The power-of-two fast path agrees bit for bit with generic division.
pub fn fast_path_trial(rng: &mut impl Rng) -> Result<(), String> {
    let fast = Magnifier::power_of_two(rng.random_range(10..300)).unwrap();
    let slow = fast.without_fast_path();
    let (x, y) = operands(rng, &fast);
    let pair = |m: &Magnifier| {
        let (a, b) = (m.real(x.clone()), m.real(y.clone()));
        (
            m.mul(&a, &b).unwrap().into_mantissa(),
            m.div(&a, &b).unwrap().into_mantissa(),
            m.sqrt(&a).unwrap().into_mantissa(),
        )
    };
    if pair(&fast) == pair(&slow) {
        Ok(())
    } else {
        Err(format!("fast path differs at {fast:?} for {x}, {y}"))
    }
}

/// Run `trial` `count` times, collecting failures.
pub fn run<R: Rng>(
    rng: &mut R,
    count: usize,
    mut trial: impl FnMut(&mut R) -> Result<(), String>,
) -> Vec<String> {
    (0..count).filter_map(|_| trial(rng).err()).collect()
}
