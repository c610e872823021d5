//! The Borwein product algorithm.
//!
//! With `x = 1/sqrt(2)`, the sequences
//!
//! ```text
//! y_1 = (1 + sqrt 2) / (2 * 2^(1/4))      z_1 = 2^(1/4)
//! y_{n+1} = (1 + y_n) / (2 sqrt(y_n))
//! z_{n+1} = (1 + z_n y_n) / ((1 + z_n) sqrt(y_n))
//! ```
//!
//! drive the product `pi_n = (2 + sqrt 2) * prod_{i=1..n} (1 + y_i) / (1 + z_i)`,
//! which decreases to pi with `pi_{n+1} - pi <= 4 pi_0 531^(-2^n)`.
//!
//! The fixed-point evaluation keeps the rounding error of `pi_N` below
//! `(21 N + 3)` ulps as long as the magnifier exceeds `600 N`.

use num_bigint::BigUint;

use crate::budget::{truncation_ulps, ErrorBudget, OpCount, LOG2_531, LOG10_531};
use crate::fixedpoint::{FixedReal, Magnifier, Ulp};
use crate::Error;

/// `ln(4 (2 + sqrt 2))`.
const LN_4PI0: f64 = 2.614_241_538_419_406;

/// Values carried from one iteration to the next: `y_p`, `z_p` and the
/// running product of the first `p` ratios.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorweinState {
    /// `p`, the index of `y` and `z`.
    pub iterate: u32,
    pub s2: FixedReal,
    pub y: FixedReal,
    pub z: FixedReal,
    pub prod: FixedReal,
}

/// `(sqrt 2, y_1, z_1)` in fixed point.
pub fn borwein_init(m: &Magnifier) -> Result<(FixedReal, FixedReal, FixedReal), Error> {
    let s2 = m.sqrt(&m.two())?;
    let ss2 = m.sqrt(&s2)?;
    let y1 = m.div(&m.one().checked_add(&s2)?, &ss2.scale(2))?;
    Ok((s2, y1, ss2))
}

/// One step of the `(y, z)` recurrence.
pub fn borwein_step(
    m: &Magnifier,
    y: &FixedReal,
    z: &FixedReal,
) -> Result<(FixedReal, FixedReal), Error> {
    let one = m.one();
    let sy = m.sqrt(y)?;
    let ny = m.div(&one.checked_add(y)?, &sy.scale(2))?;
    let nz = m.div(
        &one.checked_add(&m.mul(z, y)?)?,
        &m.mul(&one.checked_add(z)?, &sy)?,
    )?;
    Ok((ny, nz))
}

/// Resumable computation of `pi_N`.
#[derive(Clone, Debug)]
pub struct BorweinRun {
    magnifier: Magnifier,
    target: u32,
    state: Option<BorweinState>,
    ops: OpCount,
}

impl BorweinRun {
    /// Start a run for `pi_target`. Refuses magnifiers too small for the
    /// rounding bound to hold.
    pub fn new(m: &Magnifier, target: u32) -> Result<Self, Error> {
        check_magnifier(m, target)?;
        let mut run = BorweinRun {
            magnifier: m.clone(),
            target,
            state: None,
            ops: OpCount::default(),
        };
        if target >= 1 {
            let (s2, y, z) = borwein_init(m)?;
            let one = m.one();
            let prod = m.div(&one.checked_add(&y)?, &one.checked_add(&z)?)?;
            run.ops.sqrt += 2;
            run.ops.div += 2;
            run.state = Some(BorweinState {
                iterate: 1,
                s2,
                y,
                z,
                prod,
            });
        }
        Ok(run)
    }

    /// Continue from a saved state.
    pub fn resume(target: u32, state: BorweinState) -> Result<Self, Error> {
        let m = state.s2.magnifier().clone();
        check_magnifier(&m, target)?;
        if state.iterate == 0 || state.iterate > target {
            return Err(Error::Checkpoint(format!(
                "state at iterate {} does not belong to a run for pi_{target}",
                state.iterate
            )));
        }
        Ok(BorweinRun {
            magnifier: m,
            target,
            state: Some(state),
            ops: OpCount::default(),
        })
    }

    pub fn magnifier(&self) -> &Magnifier {
        &self.magnifier
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn state(&self) -> Option<&BorweinState> {
        self.state.as_ref()
    }

    /// Operations performed by this process (not counting resumed work).
    pub fn ops(&self) -> OpCount {
        self.ops
    }

    pub fn is_complete(&self) -> bool {
        self.state.as_ref().is_none_or(|s| s.iterate >= self.target)
    }

    /// Advance one iteration. Returns `false` once the target is reached.
    pub fn step(&mut self) -> Result<bool, Error> {
        if self.is_complete() {
            return Ok(false);
        }
        let m = &self.magnifier;
        let st = self.state.as_mut().expect("incomplete run has state");
        let (y, z) = borwein_step(m, &st.y, &st.z)?;
        let one = m.one();
        let ratio = m.div(&one.checked_add(&y)?, &one.checked_add(&z)?)?;
        st.prod = m.mul(&st.prod, &ratio)?;
        st.y = y;
        st.z = z;
        st.iterate += 1;
        self.ops.sqrt += 1;
        self.ops.div += 3;
        self.ops.mul += 3;
        Ok(true)
    }

    /// Run any remaining iterations and return `pi_target`.
    pub fn finish(mut self) -> Result<FixedReal, Error> {
        while self.step()? {}
        let m = &self.magnifier;
        match &self.state {
            None => {
                self.ops.sqrt += 1;
                Ok(m.two().checked_add(&m.sqrt(&m.two())?)?)
            }
            Some(st) => {
                self.ops.mul += 1;
                Ok(m.mul(&m.two().checked_add(&st.s2)?, &st.prod)?)
            }
        }
    }
}

fn check_magnifier(m: &Magnifier, target: u32) -> Result<(), Error> {
    if target >= 1 && *m.value() <= BigUint::from(600u64 * target as u64) {
        return Err(Error::Budget(format!(
            "magnifier must exceed {} for {target} iterations",
            600 * target as u64
        )));
    }
    Ok(())
}

/// Fixed-point approximation of `pi_n`; `pi_0 = 2 + sqrt 2`.
pub fn borwein_pi(m: &Magnifier, n: u32) -> Result<FixedReal, Error> {
    BorweinRun::new(m, n)?.finish()
}

/// Smallest `n` with `pi_{n+1}` within `10^-digits` of pi, i.e.
/// `n >= log2((digits ln 10 + ln(4 pi_0)) / ln 531)`.
///
/// The caller computes iterate `n + 1`.
pub fn borwein_iterations_for(decimal_digits: u64) -> u32 {
    let numerator = decimal_digits as f64 * std::f64::consts::LN_10 + LN_4PI0;
    let ratio = numerator / (LOG2_531 * std::f64::consts::LN_2);
    if ratio <= 1.0 {
        return 0;
    }
    // outward: a value a hair above an integer must round up
    (ratio.log2() - 1e-9).ceil().max(0.0) as u32
}

/// `log10` of the truncation bound `4 pi_0 531^(-2^(n-1))` of `pi_n`.
pub fn borwein_truncation_log10(n: u32) -> f64 {
    if n == 0 {
        // pi_0 - pi < 0.28
        return 0.28f64.log10();
    }
    LN_4PI0 / std::f64::consts::LN_10 - 2f64.powi(n as i32 - 1) * LOG10_531
}

/// Error budget of [`borwein_pi`] at iterate `n` and magnifier `m`:
/// `21 n + 3` rounding ulps plus the truncation bound in ulps.
pub fn borwein_budget(n: u32, m: &Magnifier) -> Result<ErrorBudget, Error> {
    check_magnifier(m, n)?;
    let truncation_log10 = borwein_truncation_log10(n);
    let truncation = truncation_ulps(truncation_log10 * std::f64::consts::LOG2_10, m)?;
    Ok(ErrorBudget {
        iterate: n,
        rounding: Ulp::from(21 * n as u64 + 3),
        truncation,
        rescale: Ulp::default(),
        truncation_log10,
    })
}
