//! Certified digits of pi.
//!
//! Two arithmetic-geometric-mean algorithms ([`borwein`] and [`salamin`])
//! run over floor-rounded fixed-point big integers ([`fixedpoint`]) and
//! carry an explicit error budget in ulps. [`digits`] turns a run into a
//! digit string only when the budget provably cannot affect any emitted
//! digit. [`bbp`] extracts isolated hexadecimal digits for spot checks.
//!
//! ```
//! use pi_forge::{compute_digits, Algorithm, Base, DigitRequest, Verdict};
//!
//! let req = DigitRequest::new(20, Base::Decimal, Algorithm::Salamin);
//! let report = compute_digits(&req).unwrap();
//! assert_eq!(report.verdict, Verdict::Certified);
//! assert_eq!(report.text, "3.14159265358979323846");
//! ```

pub mod bbp;
pub mod borwein;
pub mod budget;
pub mod checkpoint;
pub mod digits;
pub mod fixedpoint;
pub mod pipeline;
pub mod salamin;

pub use bbp::{choose_precision, find_hex_digit, pi_hex_digit, BbpParams, Escalation, HexDigitOutcome};
pub use borwein::{borwein_budget, borwein_iterations_for, borwein_pi, BorweinRun};
pub use budget::{ErrorBudget, OpCount};
pub use checkpoint::Checkpoint;
pub use digits::{
    certify_digits, crosscheck, crosscheck_digits, render, Base, CrossCheck, DigitReport,
    PositionOutcome, Verdict,
};
pub use fixedpoint::{change_magnifier, isqrt, FixedPointError, FixedReal, Magnifier, Ulp};
pub use pipeline::{compute_digits, plan, AgmRun, Algorithm, DigitRequest, RunPlan};
pub use salamin::{salamin_budget, salamin_iterations_for, salamin_pi, SalaminRun};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    FixedPoint(#[from] FixedPointError),
    /// The requested computation cannot be certified with these parameters.
    #[error("error budget: {0}")]
    Budget(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("malformed digit text: {0}")]
    Parse(String),
}
