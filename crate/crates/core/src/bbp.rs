//! Hexadecimal digits of pi at arbitrary positions with the BBP spigot.
//!
//! The scaled series `16^(d-1) 2^p S_k` is split into a low part (indices
//! `i < d`, reduced modulo `2^p` with modular exponentiation), a middle part
//! (`p/4` terms that fit in `p` bits) and a tail below one unit. Each part
//! is an under-approximation, so the four sums for `k = 1, 4, 5, 6` combine
//! into a lower bound `Y` and an upper bound `Y + 8 delta` of the scaled
//! fractional part. A digit is only reported when both bounds agree on it.
//!
//! All arithmetic is on `u64`/`u128`; the working precision is capped at 64
//! bits and positions at `2^56`, which keeps every intermediate below
//! `2^124`.

use std::ops::Range;

use rayon::prelude::*;

use crate::Error;

/// Largest supported working precision, in bits.
pub const MAX_PRECISION: u32 = 64;
/// Largest supported position.
pub const MAX_POSITION: u64 = 1 << 56;

/// The four series offsets and their weights in the digit formula.
pub const SERIES: [(u64, i64); 4] = [(1, 4), (4, -2), (5, -1), (6, -1)];

/// Target position `d` (1-based, hex digits after the point) and working
/// precision `p` in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BbpParams {
    position: u64,
    precision: u32,
}

impl BbpParams {
    pub fn new(position: u64, precision: u32) -> Result<Self, Error> {
        if position == 0 || position > MAX_POSITION {
            return Err(Error::Config(format!(
                "hex position must lie in 1..={MAX_POSITION}, got {position}"
            )));
        }
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::Config(format!(
                "precision must lie in 1..={MAX_PRECISION} bits, got {precision}"
            )));
        }
        Ok(BbpParams { position, precision })
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Error bound of one [`bbp_sum`]: `d + p/4 + 1`.
    pub fn delta(&self) -> u128 {
        self.position as u128 + (self.precision / 4) as u128 + 1
    }

    /// Both static guards: `p > 3` and `8 delta < 2^(p-4)`.
    pub fn guards_hold(&self) -> bool {
        self.precision > 3 && 8 * self.delta() < 1u128 << (self.precision - 4)
    }

    fn modulus(&self) -> u128 {
        1u128 << self.precision
    }
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn pow_mod(base: u64, exp: u64, modulus: u64) -> Result<u64, Error> {
    if modulus == 0 {
        return Err(Error::Config("modulus must be positive".into()));
    }
    if modulus == 1 {
        return Ok(0);
    }
    if modulus <= u32::MAX as u64 {
        Ok(pow_mod_narrow(base % modulus, exp, modulus))
    } else {
        Ok(pow_mod_wide(base % modulus, exp, modulus))
    }
}

fn pow_mod_narrow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn pow_mod_wide(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut base = base as u128;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u64
}

/// State of the low-sum iteration: next index and partial sum below `2^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BbpLowState {
    pub index: u64,
    pub sum: u128,
}

/// State of the middle-sum iteration: next index, current shift and sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BbpMidState {
    pub index: u64,
    pub shift: u128,
    pub sum: u128,
}

/// `floor(2^p (16^(d-1-i) mod r) / r)` with `r = 8i + k`.
fn low_term(k: u64, params: &BbpParams, i: u64) -> u128 {
    let r = 8 * i + k;
    let residue = pow_mod(16, params.position - 1 - i, r).expect("r > 0");
    ((residue as u128) << params.precision) / r as u128
}

/// One step of the low sum, keeping the sum below `2^p`.
pub fn bbp_low_step(k: u64, params: &BbpParams, st: BbpLowState) -> BbpLowState {
    debug_assert!(st.index < params.position);
    let mut sum = st.sum + low_term(k, params, st.index);
    if sum >= params.modulus() {
        sum -= params.modulus();
    }
    BbpLowState {
        index: st.index + 1,
        sum,
    }
}

/// Low sum over `0 <= i < d`, modulo `2^p`, within `d` units below the exact
/// value (modulo `2^p`).
pub fn bbp_sum_low(k: u64, params: &BbpParams) -> u128 {
    let mut st = BbpLowState { index: 0, sum: 0 };
    while st.index < params.position {
        st = bbp_low_step(k, params, st);
    }
    st.sum
}

/// Low-sum contribution of the index range `range`, modulo `2^p`.
pub fn bbp_sum_low_range(k: u64, params: &BbpParams, range: Range<u64>) -> u128 {
    let modulus = params.modulus();
    range.fold(0u128, |acc, i| {
        let s = acc + low_term(k, params, i);
        if s >= modulus {
            s - modulus
        } else {
            s
        }
    })
}

/// [`bbp_sum_low`] evaluated on `chunks` contiguous index ranges in
/// parallel and merged by modular addition. Bit-identical to the
/// sequential sum for every chunk count.
pub fn bbp_sum_low_parallel(k: u64, params: &BbpParams, chunks: usize) -> u128 {
    let d = params.position;
    let chunks = (chunks.max(1) as u64).min(d);
    let width = d.div_ceil(chunks);
    let modulus = params.modulus();
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * width;
            bbp_sum_low_range(k, params, start.min(d)..(start + width).min(d))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0, |acc, part| (acc + part) % modulus)
}

/// One step of the middle sum.
pub fn bbp_mid_step(k: u64, st: BbpMidState) -> BbpMidState {
    let r = (8 * st.index + k) as u128;
    BbpMidState {
        index: st.index + 1,
        shift: st.shift / 16,
        sum: st.sum + st.shift / r,
    }
}

/// Middle sum: `p/4` terms starting at index `d` with shift `2^(p-4)`.
/// Under-approximates the exact middle sum by less than `p/4`.
pub fn bbp_sum_mid(k: u64, params: &BbpParams) -> u128 {
    let mut st = BbpMidState {
        index: params.position,
        shift: 1u128 << params.precision.saturating_sub(4),
        sum: 0,
    };
    for _ in 0..params.precision / 4 {
        st = bbp_mid_step(k, st);
    }
    st.sum
}

/// Under-approximation of the scaled `S_k` modulo `2^p` with error below
/// [`BbpParams::delta`].
pub fn bbp_sum(k: u64, params: &BbpParams) -> u128 {
    bbp_sum_low(k, params) + bbp_sum_mid(k, params)
}

fn bbp_sum_with(k: u64, params: &BbpParams, chunks: usize) -> u128 {
    let low = if chunks <= 1 {
        bbp_sum_low(k, params)
    } else {
        bbp_sum_low_parallel(k, params, chunks)
    };
    low + bbp_sum_mid(k, params)
}

/// Everything the digit test looked at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub params: BbpParams,
    /// `None` when a static guard failed before any summation.
    pub lower_digit: Option<u8>,
    pub upper_digit: Option<u8>,
}

impl Extraction {
    pub fn digit(&self) -> Option<u8> {
        match (self.lower_digit, self.upper_digit) {
            (Some(lo), Some(hi)) if lo == hi => Some(lo),
            _ => None,
        }
    }
}

/// Run the digit test with the low sums split into `chunks` parallel ranges
/// (1 for sequential). The result does not depend on `chunks`.
pub fn extract(params: &BbpParams, chunks: usize) -> Extraction {
    let mut out = Extraction {
        params: *params,
        lower_digit: None,
        upper_digit: None,
    };
    if !params.guards_hold() {
        return out;
    }
    let sums: Vec<u128> = SERIES
        .par_iter()
        .map(|&(k, _)| bbp_sum_with(k, params, chunks))
        .collect();
    let p = params.precision;
    let delta = params.delta();
    let modulus = params.modulus();
    let negative = 2 * sums[1] + sums[2] + sums[3] + 4 * delta;
    let y = 4 * sums[0] + (9 * modulus - negative);
    let digit = |x: u128| ((x % modulus) >> (p - 4)) as u8;
    out.lower_digit = Some(digit(y));
    out.upper_digit = Some(digit(y + 8 * delta));
    out
}

/// The hex digit `floor(pi * 16^d) mod 16`, or `None` when precision `p`
/// cannot certify it. A returned digit is always correct.
pub fn pi_hex_digit(params: &BbpParams) -> Option<u8> {
    extract(params, 1).digit()
}

/// Smallest multiple of 4 above 3 that passes both static guards for
/// position `d`, plus `slack` bits.
pub fn choose_precision(position: u64, slack: u32) -> u32 {
    let mut p = 4u32;
    loop {
        let delta = position as u128 + (p / 4) as u128 + 1;
        if 8 * delta < 1u128 << (p - 4) {
            return p + slack;
        }
        p += 4;
    }
}

/// Precision escalation settings for [`find_hex_digit`].
#[derive(Clone, Copy, Debug)]
pub struct Escalation {
    /// Starting precision; `None` uses [`choose_precision`].
    pub start: Option<u32>,
    /// Highest precision tried.
    pub cap: u32,
    /// Parallel chunks for the low sums.
    pub chunks: usize,
}

impl Default for Escalation {
    fn default() -> Self {
        Escalation {
            start: None,
            cap: MAX_PRECISION,
            chunks: rayon::current_num_threads(),
        }
    }
}

/// Result of an escalating search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexDigitOutcome {
    pub position: u64,
    pub digit: Option<u8>,
    /// Precisions tried, in order; the last one produced `digit`.
    pub attempts: Vec<u32>,
}

/// Try precisions `start, start + 4, ...` up to the cap until the digit test
/// succeeds.
pub fn find_hex_digit(position: u64, opts: Escalation) -> Result<HexDigitOutcome, Error> {
    let cap = opts.cap.min(MAX_PRECISION);
    let mut p = opts.start.unwrap_or_else(|| choose_precision(position, 0));
    let mut attempts = Vec::new();
    loop {
        let params = BbpParams::new(position, p.min(cap))?;
        attempts.push(params.precision());
        let digit = extract(&params, opts.chunks).digit();
        if digit.is_some() || p >= cap {
            return Ok(HexDigitOutcome {
                position,
                digit,
                attempts,
            });
        }
        p += 4;
    }
}
