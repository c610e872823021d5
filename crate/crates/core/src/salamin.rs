//! The Brent–Salamin algorithm.
//!
//! Starting from `a_0 = 1`, `b_0 = 1/sqrt(2)`, iterate the arithmetic-geometric
//! mean and form
//!
//! ```text
//! pi'_n = 4 a_n^2 / (1 - sum_{k=1..n-1} 2^(k-1) (a_{k-1} - b_{k-1})^2)
//! ```
//!
//! Apart from the `n` square roots, only halvings, exact squares and a single
//! final division are needed. The sum is kept as an exact integer at scale
//! `m^2` and rescaled once.

use num_bigint::BigUint;
use num_traits::One;

use crate::budget::{truncation_ulps, ErrorBudget, OpCount, LOG10_531};
use crate::fixedpoint::{isqrt, FixedReal, Magnifier, Ulp};
use crate::Error;

/// One AGM pair `(a_k, b_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgmPair {
    pub a: FixedReal,
    pub b: FixedReal,
}

/// `a' = floor((a + b) / 2)`, `b' = sqrt(a * b)` with both roundings down.
pub fn agm_step(m: &Magnifier, pair: &AgmPair) -> Result<AgmPair, Error> {
    let a = pair.a.checked_add(&pair.b)?.halve();
    let b = m.sqrt(&m.mul(&pair.a, &pair.b)?)?;
    Ok(AgmPair { a, b })
}

/// Run state after `k` AGM steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SalaminState {
    pub pair: AgmPair,
    /// `sum_{j < k} 2^j (a_j - b_j)^2` at scale `m^2`, exact.
    pub sum: BigUint,
    /// `2^k`, the weight of the next term.
    pub pow2: BigUint,
    pub k: u32,
}

/// Resumable computation of `pi'_N`.
#[derive(Clone, Debug)]
pub struct SalaminRun {
    magnifier: Magnifier,
    target: u32,
    state: SalaminState,
    ops: OpCount,
}

impl SalaminRun {
    pub fn new(m: &Magnifier, target: u32) -> Result<Self, Error> {
        check_magnifier(m, target)?;
        // floor(m / sqrt 2) = isqrt(floor(m^2 / 2))
        let b0 = isqrt(&((m.value() * m.value()) >> 1u32));
        let state = SalaminState {
            pair: AgmPair {
                a: m.one(),
                b: m.real(b0),
            },
            sum: BigUint::default(),
            pow2: BigUint::one(),
            k: 0,
        };
        Ok(SalaminRun {
            magnifier: m.clone(),
            target,
            state,
            ops: OpCount::default(),
        })
    }

    pub fn resume(target: u32, state: SalaminState) -> Result<Self, Error> {
        let m = state.pair.a.magnifier().clone();
        check_magnifier(&m, target)?;
        if state.k > target || state.pow2 != BigUint::one() << state.k {
            return Err(Error::Checkpoint(format!(
                "state at step {} does not belong to a run for pi'_{target}",
                state.k
            )));
        }
        Ok(SalaminRun {
            magnifier: m,
            target,
            state,
            ops: OpCount::default(),
        })
    }

    pub fn magnifier(&self) -> &Magnifier {
        &self.magnifier
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn state(&self) -> &SalaminState {
        &self.state
    }

    pub fn ops(&self) -> OpCount {
        self.ops
    }

    pub fn is_complete(&self) -> bool {
        self.state.k >= self.target
    }

    /// Advance one AGM step. Returns `false` once the target is reached.
    pub fn step(&mut self) -> Result<bool, Error> {
        if self.is_complete() {
            return Ok(false);
        }
        let st = &mut self.state;
        // the sum stops at a_{N-2} - b_{N-2}
        if st.k + 2 <= self.target {
            let diff = st.pair.a.checked_sub(&st.pair.b)?.into_mantissa();
            st.sum += &st.pow2 * &diff * &diff;
        }
        st.pair = agm_step(&self.magnifier, &st.pair)?;
        st.pow2 <<= 1u32;
        st.k += 1;
        self.ops.mul += 1;
        self.ops.sqrt += 1;
        Ok(true)
    }

    /// Run any remaining steps and return `pi'_target`.
    pub fn finish(self) -> Result<FixedReal, Error> {
        self.finish_counted().map(|(value, _)| value)
    }

    /// [`finish`](Self::finish), also reporting the operations performed by
    /// this process.
    pub fn finish_counted(mut self) -> Result<(FixedReal, OpCount), Error> {
        while self.step()? {}
        let m = &self.magnifier;
        let a = &self.state.pair.a;
        let numerator = m.mul(a, a)?.scale(4);
        let denominator = m.one().checked_sub(&m.real(m.unscale(self.state.sum.clone())))?;
        let value = m.div(&numerator, &denominator)?;
        self.ops.mul += 1;
        self.ops.div += 1;
        Ok((value, self.ops))
    }
}

/// Smallest magnifier satisfying `1/m <= 10^-(N+5) / 3^N`.
pub fn salamin_min_magnifier(target: u32) -> BigUint {
    BigUint::from(10u32).pow(target + 5) * BigUint::from(3u32).pow(target)
}

fn check_magnifier(m: &Magnifier, target: u32) -> Result<(), Error> {
    if target == 0 {
        return Err(Error::Budget("pi'_0 is not a useful iterate; need n >= 1".into()));
    }
    if *m.value() < salamin_min_magnifier(target) {
        return Err(Error::Budget(format!(
            "magnifier of {} bits is below 10^{} * 3^{target}",
            m.bits(),
            target + 5
        )));
    }
    Ok(())
}

/// Fixed-point approximation of `pi'_n`.
pub fn salamin_pi(m: &Magnifier, n: u32) -> Result<FixedReal, Error> {
    SalaminRun::new(m, n)?.finish()
}

/// Smallest `n` such that `pi'_{n+1}` is within `10^-digits / 2` of pi,
/// using `|pi'_{n+1} - pi| <= (132 + 384 2^n) 531^(-2^n)`.
///
/// The caller computes iterate `n + 1`.
pub fn salamin_iterations_for(decimal_digits: u64) -> u32 {
    let target = -(decimal_digits as f64) - 2f64.log10();
    (0u32..)
        .find(|&n| salamin_truncation_log10(n + 1) < target - 1e-9)
        .unwrap()
}

/// `log10` of the truncation bound `(132 + 384 2^(n-1)) 531^(-2^(n-1))` of
/// `pi'_n`, `n >= 1`.
pub fn salamin_truncation_log10(n: u32) -> f64 {
    let e = 2f64.powi(n as i32 - 1);
    (132.0 + 384.0 * e).log10() - e * LOG10_531
}

/// Rounding bound of `pi'_n` in ulps:
/// `ceil(160 (3/2)^n + 80 3^n + 100)`.
pub fn salamin_rounding_ulps(n: u32) -> Ulp {
    let three_n = BigUint::from(3u32).pow(n);
    let two_n = BigUint::one() << n;
    let first = (&three_n * 160u32 + &two_n - 1u32) / &two_n;
    Ulp(first + three_n * 80u32 + 100u32)
}

/// Error budget of [`salamin_pi`] at iterate `n` and magnifier `m`.
pub fn salamin_budget(n: u32, m: &Magnifier) -> Result<ErrorBudget, Error> {
    check_magnifier(m, n)?;
    let truncation_log10 = salamin_truncation_log10(n);
    let truncation = truncation_ulps(truncation_log10 * std::f64::consts::LOG2_10, m)?;
    Ok(ErrorBudget {
        iterate: n,
        rounding: salamin_rounding_ulps(n),
        truncation,
        rescale: Ulp::default(),
        truncation_log10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m64() -> Magnifier {
        Magnifier::power_of_two(64).unwrap()
    }

    #[test]
    fn agm_from_one_and_half() {
        let m = Magnifier::power_of_two(60).unwrap();
        let p0 = AgmPair {
            a: m.one(),
            b: m.one().halve(),
        };
        let p1 = agm_step(&m, &p0).unwrap();
        assert_eq!(p1.a.to_f64(), 0.75);
        assert!((p1.b.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        let p2 = agm_step(&m, &p1).unwrap();
        assert_eq!(format!("{:.4}", p2.a.to_f64()), "0.7286");
        assert!(p2.a.to_f64() > 0.7285 && p2.b.to_f64() > 0.7282 && p2.b.to_f64() < 0.7283);
    }

    #[test]
    fn agm_fixpoint() {
        let m = m64();
        let x = m.real(BigUint::from(3u64) << 61u32);
        let p = agm_step(&m, &AgmPair { a: x.clone(), b: x.clone() }).unwrap();
        assert_eq!(p.a, x);
        assert!(x.mantissa() - p.b.mantissa() <= BigUint::one());
    }

    #[test]
    fn first_iterates() {
        let m = Magnifier::power_of_two(200).unwrap();
        // 4 a_1^2 = (1 + 1/sqrt 2)^2
        let p1 = salamin_pi(&m, 1).unwrap().to_f64();
        assert!((p1 - (1.0 + 0.5f64.sqrt()).powi(2)).abs() < 1e-14);
        let p2 = salamin_pi(&m, 2).unwrap().to_f64();
        assert_eq!(format!("{p2:.5}"), "3.14058");
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(salamin_iterations_for(1_000_000), 19);
        assert!(salamin_iterations_for(10) <= 4);
        let mut last = 0;
        for d in (1..20_000).step_by(37) {
            let n = salamin_iterations_for(d);
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn rounding_formula() {
        // 160 * 1.5 + 80 * 3 + 100
        assert_eq!(salamin_rounding_ulps(1), Ulp::from(580));
        // 160 * 3.375 = 540 exactly
        assert_eq!(salamin_rounding_ulps(3), Ulp::from(540 + 2160 + 100));
        // ceil(160 * 1.5^20) = 532_042 (1.5^20 = 3325.2567...)
        let n20 = salamin_rounding_ulps(20);
        assert_eq!(n20, Ulp::from(532_042 + 80 * 3_486_784_401 + 100));
    }

    #[test]
    fn refuses_bad_requests() {
        assert!(salamin_pi(&m64(), 0).is_err());
        let small = Magnifier::new(salamin_min_magnifier(4) - 1u32).unwrap();
        assert!(salamin_pi(&small, 4).is_err());
        let ok = Magnifier::new(salamin_min_magnifier(4)).unwrap();
        assert!(salamin_pi(&ok, 4).is_ok());
    }

    #[test]
    fn single_division() {
        let m = Magnifier::power_of_two(512).unwrap();
        let (_, ops) = SalaminRun::new(&m, 7).unwrap().finish_counted().unwrap();
        assert_eq!(ops, OpCount { mul: 8, div: 1, sqrt: 7 });
    }
}
