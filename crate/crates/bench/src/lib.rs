//! Deterministic inputs shared by the benchmarks.

use pi_forge::fixedpoint::{FixedReal, Magnifier};

/// `(x, y)` near `sqrt 2` and `pi_0 / 2` under a `2^bits` magnifier, so
/// every kernel works on full-width mantissas.
pub fn operands(bits: u64) -> (Magnifier, FixedReal, FixedReal) {
    let m = Magnifier::power_of_two(bits).expect("bits >= 10");
    let x = m.sqrt(&m.two()).expect("same magnifier");
    let y = m.two().checked_add(&x).expect("same magnifier").halve();
    (m, x, y)
}

/// Magnifier bits for `digits` decimal digits plus a small margin.
pub fn bits_for_decimal(digits: u64) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 64
}
