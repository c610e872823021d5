//! Error budgets attached to an AGM run, counted in ulps of the working
//! magnifier.

use std::fmt;

use crate::fixedpoint::{log2_big, Magnifier, Ulp};
use crate::Error;

/// Logarithms of 531, the contraction base of the quadratic convergence
/// bounds.
pub(crate) const LOG2_531: f64 = 9.052_568_050_804_153;
pub(crate) const LOG10_531: f64 = 2.725_094_521_081_469;

/// Accumulated error of one algorithm run.
///
/// `rounding` covers the floor-rounded fixed-point operations, `truncation`
/// the distance between the finite iterate and pi, and `rescale` the final
/// change of magnifier (zero until the digits stage adds it).
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    /// Index of the iterate the run produces (`pi_N` or `pi'_N`).
    pub iterate: u32,
    pub rounding: Ulp,
    pub truncation: Ulp,
    pub rescale: Ulp,
    /// `log10` of the absolute truncation bound.
    pub truncation_log10: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> Ulp {
        &(&self.rounding + &self.truncation) + &self.rescale
    }

    /// Number of base-`base` digits spanned by the rounding term:
    /// `ceil(log_base(rounding))`.
    pub fn extra_digits(&self, base: u32) -> u32 {
        let mut digits = 0;
        let mut power = num_bigint::BigUint::from(1u32);
        while &power < self.rounding.count() {
            power *= base;
            digits += 1;
        }
        digits
    }
}

impl fmt::Display for ErrorBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iterate {}: rounding {} + truncation {} (1e{:.1}) + rescale {} ulps",
            self.iterate, self.rounding, self.truncation, self.truncation_log10, self.rescale
        )
    }
}

/// `ceil(bound * m)` for a bound given by its `log2`, in ulps of `m`.
///
/// Bounds below one ulp cost exactly one. A bound worth more than `2^60`
/// ulps means the iteration count is far too small for the magnifier.
pub(crate) fn truncation_ulps(bound_log2: f64, m: &Magnifier) -> Result<Ulp, Error> {
    // f64 evaluation of the bound is off by far less than this margin.
    const MARGIN: f64 = 1e-3;
    let scaled = bound_log2 + log2_big(m.value()).unwrap();
    if scaled < -MARGIN {
        return Ok(Ulp::from(1));
    }
    if scaled > 60.0 {
        return Err(Error::Budget(format!(
            "truncation error is 2^{scaled:.1} ulps; more iterations are needed"
        )));
    }
    Ok(Ulp::from((scaled + MARGIN).exp2().ceil() as u64))
}

/// Operation counts of one run, for cost audits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub mul: u32,
    pub div: u32,
    pub sqrt: u32,
}
