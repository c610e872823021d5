//! From a fixed-point approximation to a certified digit string.
//!
//! The value is rescaled to `base^(N + g)` and split as `q * base^g + r`.
//! With a total error below `B` guard-scale ulps, every digit of `q` is a
//! digit of pi exactly when `B < r < base^g - B`; otherwise the run is
//! reported as ambiguous and no digit is vouched for.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::bbp::{find_hex_digit, Escalation};
use crate::budget::ErrorBudget;
use crate::fixedpoint::{rescale_mantissa, FixedReal, Ulp};
use crate::Error;

/// Smallest guard we use, whatever the budget.
pub const MIN_GUARD_DIGITS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    Decimal,
    Hex,
}

impl Base {
    pub fn radix(self) -> u32 {
        match self {
            Base::Decimal => 10,
            Base::Hex => 16,
        }
    }

    pub(crate) fn power(self, exp: u64) -> BigUint {
        BigUint::from(self.radix()).pow(exp.try_into().expect("digit count fits u32"))
    }
}

impl FromStr for Base {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "10" | "dec" | "decimal" => Ok(Base::Decimal),
            "16" | "hex" | "hexadecimal" => Ok(Base::Hex),
            _ => Err(Error::Config(format!("unsupported base {s:?}; use 10 or 16"))),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.radix())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Ambiguous,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Ambiguous => "ambiguous",
        }
    }
}

/// Wall-clock per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub compute: Duration,
    pub certify: Duration,
    pub render: Duration,
}

/// Outcome of the guard-window test for one guard size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardCheck {
    pub verdict: Verdict,
    /// `floor(value * base^N)` after rescaling.
    pub quotient: BigUint,
    pub remainder: BigUint,
    /// Total error in guard-scale ulps, rescale loss included.
    pub bound: Ulp,
    pub guard_digits: u32,
}

/// A rendered run and what backs it.
#[derive(Clone, Debug)]
pub struct DigitReport {
    pub verdict: Verdict,
    /// `"3."` followed by the digits. Only trustworthy when certified.
    pub text: String,
    pub digits: u64,
    pub base: Base,
    pub guard_digits: u32,
    pub guard_remainder: BigUint,
    /// Error bound `B` in guard-scale ulps.
    pub bound: Ulp,
    pub budget: ErrorBudget,
    /// `log2` of the magnifier, rounded up.
    pub magnifier_bits: u64,
    pub timings: Timings,
}

impl DigitReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// `true` when `base^g > 2 * bound`, i.e. the certification window is not
/// empty.
pub fn window_open(base: Base, guard_digits: u32, bound: &Ulp) -> bool {
    base.power(guard_digits as u64) > bound.count() * 2u32
}

/// Smallest guard size, at least [`MIN_GUARD_DIGITS`], whose window is open
/// for `bound` guard-scale ulps.
pub fn auto_guard_digits(base: Base, bound: &Ulp) -> u32 {
    let mut g = MIN_GUARD_DIGITS;
    while !window_open(base, g, bound) {
        g += 1;
    }
    g
}

/// Rescale `value` to `base^(digits + guard)` and run the window test.
///
/// `budget` is the total error of `value` in its own ulps. Fails with a
/// configuration error when the guard is too small for the budget or when
/// the value's magnifier does not exceed the output scale.
pub fn guard_check(
    value: &FixedReal,
    digits: u64,
    base: Base,
    guard_digits: u32,
    budget: &Ulp,
) -> Result<GuardCheck, Error> {
    let m = value.magnifier();
    let scale = base.power(digits + guard_digits as u64);
    if &scale >= m.value() {
        return Err(Error::Config(format!(
            "a {}-bit magnifier cannot carry {} base-{} digits",
            m.bits(),
            digits + guard_digits as u64,
            base
        )));
    }
    let rescaled = rescale_mantissa(value.mantissa(), m, &scale)?;
    let bound = Ulp(ceil_div(&(budget.count() * &scale), m.value())) + Ulp::from(1);
    if !window_open(base, guard_digits, &bound) {
        return Err(Error::Config(format!(
            "{guard_digits} guard digits cannot absorb an error of {bound} ulps"
        )));
    }
    let window = base.power(guard_digits as u64);
    let (quotient, remainder) = rescaled.div_rem(&window);
    let upper = &window - bound.count();
    let verdict = if &remainder > bound.count() && remainder < upper {
        Verdict::Certified
    } else {
        Verdict::Ambiguous
    };
    Ok(GuardCheck {
        verdict,
        quotient,
        remainder,
        bound,
        guard_digits,
    })
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Certify and render `value` with the given guard size.
pub fn certify_digits(
    value: &FixedReal,
    digits: u64,
    base: Base,
    guard_digits: u32,
    budget: &ErrorBudget,
) -> Result<DigitReport, Error> {
    certify_with_retries(value, digits, base, &[guard_digits], budget)
}

/// Try each guard size in order and keep the first certified one (or the
/// last attempt when none certifies). Each attempt is sound on its own.
pub(crate) fn certify_with_retries(
    value: &FixedReal,
    digits: u64,
    base: Base,
    guards: &[u32],
    budget: &ErrorBudget,
) -> Result<DigitReport, Error> {
    if digits == 0 {
        return Err(Error::Config("digit count must be positive".into()));
    }
    let start = Instant::now();
    let total = budget.total();
    let mut check = None;
    for &g in guards {
        let c = guard_check(value, digits, base, g, &total)?;
        let done = c.verdict == Verdict::Certified;
        check = Some(c);
        if done {
            break;
        }
    }
    let check = check.ok_or_else(|| Error::Config("no guard size to try".into()))?;
    let certify = start.elapsed();
    let start = Instant::now();
    let text = render(&check.quotient, digits, base);
    let render_time = start.elapsed();
    let mut budget = budget.clone();
    budget.rescale = Ulp::from(1);
    Ok(DigitReport {
        verdict: check.verdict,
        text,
        digits,
        base,
        guard_digits: check.guard_digits,
        guard_remainder: check.remainder,
        bound: check.bound,
        budget,
        magnifier_bits: value.magnifier().log2().unwrap_or(value.magnifier().bits()),
        timings: Timings {
            compute: Duration::ZERO,
            certify,
            render: render_time,
        },
    })
}

/// Positional rendering of `q / base^n`: integer part, `.`, then exactly
/// `n` digits (upper-case in hex).
pub fn render(q: &BigUint, n: u64, base: Base) -> String {
    let mut text = q.to_str_radix(base.radix());
    text.make_ascii_uppercase();
    let n = n as usize;
    if text.len() <= n {
        let pad = n + 1 - text.len();
        text.insert_str(0, &"0".repeat(pad));
    }
    if n > 0 {
        text.insert(text.len() - n, '.');
    }
    text
}

/// Inverse of [`render`]: returns `(q, n)`.
pub fn parse_digits(text: &str, base: Base) -> Result<(BigUint, u64), Error> {
    let text = text.trim_end_matches(['\n', '\r']);
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() {
        return Err(Error::Parse("missing integer part".into()));
    }
    let radix = base.radix();
    let mut joined = String::with_capacity(int.len() + frac.len());
    for c in int.chars().chain(frac.chars()) {
        if !c.is_digit(radix) {
            return Err(Error::Parse(format!("{c:?} is not a base-{radix} digit")));
        }
        joined.push(c);
    }
    let q = BigUint::parse_bytes(joined.as_bytes(), radix)
        .ok_or_else(|| Error::Parse("empty digit string".into()))?;
    Ok((q, frac.len() as u64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionOutcome {
    Match,
    Mismatch,
    /// The spigot could not certify a digit at this position.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionCheck {
    pub position: u64,
    pub agm_digit: u8,
    pub bbp_digit: Option<u8>,
    pub precision_bits: u32,
    pub outcome: PositionOutcome,
}

/// Per-position comparison of an AGM hex run against the spigot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossCheck {
    pub checks: Vec<PositionCheck>,
}

impl CrossCheck {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.outcome == PositionOutcome::Match)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &PositionCheck> {
        self.checks.iter().filter(|c| c.outcome == PositionOutcome::Mismatch)
    }

    pub fn inconclusive(&self) -> impl Iterator<Item = &PositionCheck> {
        self.checks.iter().filter(|c| c.outcome == PositionOutcome::Inconclusive)
    }
}

/// Compare hex digits of `hex_text` (`"3."` + digits) at the 1-based
/// `positions` with spigot-extracted digits.
pub fn crosscheck_digits(
    hex_text: &str,
    positions: &[u64],
    escalation: Escalation,
) -> Result<CrossCheck, Error> {
    let hex_text = hex_text.trim_end_matches(['\n', '\r']);
    let frac = hex_text
        .strip_prefix("3.")
        .ok_or_else(|| Error::Parse("hex run must start with \"3.\"".into()))?
        .as_bytes();
    if let Some(&bad) = positions.iter().find(|&&d| d == 0 || d > frac.len() as u64) {
        return Err(Error::Config(format!(
            "position {bad} is outside the run's 1..={} hex digits",
            frac.len()
        )));
    }
    let mut checks = Vec::with_capacity(positions.len());
    for &d in positions {
        let agm_digit = (frac[d as usize - 1] as char)
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("position {d} is not a hex digit")))?
            as u8;
        let outcome = find_hex_digit(d, escalation)?;
        let verdict = match outcome.digit {
            None => PositionOutcome::Inconclusive,
            Some(v) if v == agm_digit => PositionOutcome::Match,
            Some(_) => PositionOutcome::Mismatch,
        };
        checks.push(PositionCheck {
            position: d,
            agm_digit,
            bbp_digit: outcome.digit,
            precision_bits: *outcome.attempts.last().unwrap(),
            outcome: verdict,
        });
    }
    Ok(CrossCheck { checks })
}

/// [`crosscheck_digits`] on a certified hexadecimal run.
pub fn crosscheck(
    run: &DigitReport,
    positions: &[u64],
    escalation: Escalation,
) -> Result<CrossCheck, Error> {
    if run.base != Base::Hex {
        return Err(Error::Config("cross-checking needs a base-16 run".into()));
    }
    if !run.is_certified() {
        return Err(Error::Config("cross-checking needs a certified run".into()));
    }
    crosscheck_digits(&run.text, positions, escalation)
}

/// Digit at 1-based position `d` of a rendered run, as a number.
pub fn digit_at(text: &str, d: u64) -> Option<u8> {
    let frac = text.split_once('.')?.1.as_bytes();
    let c = *frac.get(d.checked_sub(1)?.to_usize()?)? as char;
    c.to_digit(16).map(|v| v as u8)
}
