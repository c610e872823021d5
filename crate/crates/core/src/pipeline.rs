//! Planning and running a certified digit computation end to end.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::borwein::{borwein_budget, borwein_iterations_for, BorweinRun};
use crate::budget::ErrorBudget;
use crate::checkpoint::Checkpoint;
use crate::digits::{certify_with_retries, Base, DigitReport, MIN_GUARD_DIGITS};
use crate::fixedpoint::{FixedReal, Magnifier, Ulp};
use crate::salamin::{
    salamin_budget, salamin_iterations_for, salamin_min_magnifier, salamin_rounding_ulps,
    SalaminRun,
};
use crate::Error;

/// Extra digits beyond `N + g` carried by the magnifier, so automatic guard
/// retries up to `g + 3` fit.
const RETRY_DIGITS: u64 = 3;
/// Extra bits beyond the rounding budget.
const SLACK_BITS: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Borwein,
    Salamin,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Borwein => "borwein",
            Algorithm::Salamin => "salamin",
        }
    }

    /// Iteration count `n` for `decimal_digits`; the run
    /// computes iterate `n + 1`.
    pub fn iterations_for(self, decimal_digits: u64) -> u32 {
        match self {
            Algorithm::Borwein => borwein_iterations_for(decimal_digits),
            Algorithm::Salamin => salamin_iterations_for(decimal_digits),
        }
    }

    /// Rounding bound of iterate `n`, in ulps.
    pub fn rounding_ulps(self, n: u32) -> Ulp {
        match self {
            Algorithm::Borwein => Ulp::from(21 * n as u64 + 3),
            Algorithm::Salamin => salamin_rounding_ulps(n),
        }
    }

    /// Full error budget of iterate `n` under `m`.
    pub fn budget(self, n: u32, m: &Magnifier) -> Result<ErrorBudget, Error> {
        match self {
            Algorithm::Borwein => borwein_budget(n, m),
            Algorithm::Salamin => salamin_budget(n, m),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "borwein" => Ok(Algorithm::Borwein),
            "salamin" => Ok(Algorithm::Salamin),
            _ => Err(Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitRequest {
    pub digits: u64,
    pub base: Base,
    pub algorithm: Algorithm,
    /// `None` sizes the guard automatically and retries with larger guards.
    pub guard: Option<u32>,
}

impl DigitRequest {
    pub fn new(digits: u64, base: Base, algorithm: Algorithm) -> Self {
        DigitRequest {
            digits,
            base,
            algorithm,
            guard: None,
        }
    }

    pub fn with_guard(mut self, guard: u32) -> Self {
        self.guard = Some(guard);
        self
    }
}

/// Sizing of one run, fixed before any arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunPlan {
    pub request: DigitRequest,
    /// Iteration count `n`; the run computes iterate `n + 1`.
    pub iterations: u32,
    pub iterate: u32,
    /// The magnifier is `2^magnifier_bits`.
    pub magnifier_bits: u64,
    pub guard_digits: u32,
}

impl RunPlan {
    pub fn magnifier(&self) -> Magnifier {
        Magnifier::power_of_two(self.magnifier_bits).expect("planned magnifier is large")
    }

    /// Guard sizes to try in order.
    pub fn guard_candidates(&self) -> Vec<u32> {
        match self.request.guard {
            Some(g) => vec![g],
            None => (0..=RETRY_DIGITS as u32).map(|i| self.guard_digits + i).collect(),
        }
    }
}

fn digits_to_bits(digits: u64, base: Base) -> u64 {
    match base {
        Base::Hex => 4 * digits,
        Base::Decimal => (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 1,
    }
}

/// Choose iteration count, magnifier and guard for `req`.
///
/// The magnifier carries `N + g + 3` output digits plus the bit length of
/// the rounding budget plus a few bits of slack, and the iteration count
/// pushes truncation below one ulp of that magnifier. After rescaling, the
/// error bound is then at most 3 guard-scale ulps, which any guard of one
/// or more digits absorbs.
pub fn plan(req: &DigitRequest) -> Result<RunPlan, Error> {
    if req.digits == 0 {
        return Err(Error::Config("digit count must be positive".into()));
    }
    if req.digits > u32::MAX as u64 / 2 {
        return Err(Error::Config(format!("{} digits is beyond reach", req.digits)));
    }
    let guard = match req.guard {
        Some(0) => return Err(Error::Config("guard must be at least one digit".into())),
        Some(g) => g,
        None => MIN_GUARD_DIGITS,
    };
    let alg = req.algorithm;
    let base_bits = digits_to_bits(req.digits + guard as u64 + RETRY_DIGITS, req.base) + SLACK_BITS;
    let mut bits = base_bits;
    loop {
        let decimal = (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64 + 1;
        let iterations = alg.iterations_for(decimal);
        let iterate = iterations + 1;
        let mut next = base_bits + alg.rounding_ulps(iterate).count().bits();
        if alg == Algorithm::Salamin {
            next = next.max(salamin_min_magnifier(iterate).bits());
        }
        if next <= bits {
            return Ok(RunPlan {
                request: *req,
                iterations,
                iterate,
                magnifier_bits: bits,
                guard_digits: guard,
            });
        }
        bits = next;
    }
}

/// A run of either algorithm, steppable and checkpointable.
#[derive(Clone, Debug)]
pub enum AgmRun {
    Borwein(BorweinRun),
    Salamin(SalaminRun),
}

impl AgmRun {
    pub fn new(alg: Algorithm, m: &Magnifier, iterate: u32) -> Result<Self, Error> {
        Ok(match alg {
            Algorithm::Borwein => AgmRun::Borwein(BorweinRun::new(m, iterate)?),
            Algorithm::Salamin => AgmRun::Salamin(SalaminRun::new(m, iterate)?),
        })
    }

    pub fn start(plan: &RunPlan) -> Result<Self, Error> {
        Self::new(plan.request.algorithm, &plan.magnifier(), plan.iterate)
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AgmRun::Borwein(_) => Algorithm::Borwein,
            AgmRun::Salamin(_) => Algorithm::Salamin,
        }
    }

    pub fn magnifier(&self) -> &Magnifier {
        match self {
            AgmRun::Borwein(r) => r.magnifier(),
            AgmRun::Salamin(r) => r.magnifier(),
        }
    }

    pub fn target(&self) -> u32 {
        match self {
            AgmRun::Borwein(r) => r.target(),
            AgmRun::Salamin(r) => r.target(),
        }
    }

    /// Steps completed so far.
    pub fn progress(&self) -> u32 {
        match self {
            AgmRun::Borwein(r) => r.state().map_or(0, |s| s.iterate),
            AgmRun::Salamin(r) => r.state().k,
        }
    }

    pub fn is_complete(&self) -> bool {
        match self {
            AgmRun::Borwein(r) => r.is_complete(),
            AgmRun::Salamin(r) => r.is_complete(),
        }
    }

    pub fn step(&mut self) -> Result<bool, Error> {
        match self {
            AgmRun::Borwein(r) => r.step(),
            AgmRun::Salamin(r) => r.step(),
        }
    }

    pub fn budget(&self) -> Result<ErrorBudget, Error> {
        self.algorithm().budget(self.target(), self.magnifier())
    }

    pub fn finish(self) -> Result<FixedReal, Error> {
        match self {
            AgmRun::Borwein(r) => r.finish(),
            AgmRun::Salamin(r) => r.finish(),
        }
    }

    pub fn checkpoint(&self) -> Result<Checkpoint, Error> {
        Checkpoint::of(self)
    }

    pub fn from_checkpoint(cp: Checkpoint) -> Result<Self, Error> {
        cp.into_run()
    }
}

/// Finish `run` and certify its value for the plan's request.
pub fn finish_digits(run: AgmRun, plan: &RunPlan) -> Result<DigitReport, Error> {
    let budget = run.budget()?;
    let start = Instant::now();
    let value = run.finish()?;
    let compute = start.elapsed();
    let req = &plan.request;
    let mut report =
        certify_with_retries(&value, req.digits, req.base, &plan.guard_candidates(), &budget)?;
    report.timings.compute = compute;
    Ok(report)
}

/// Plan, run and certify in one call.
pub fn compute_digits(req: &DigitRequest) -> Result<DigitReport, Error> {
    let plan = plan(req)?;
    finish_digits(AgmRun::start(&plan)?, &plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs() {
        for alg in [Algorithm::Borwein, Algorithm::Salamin] {
            let r = compute_digits(&DigitRequest::new(10, Base::Decimal, alg)).unwrap();
            assert!(r.is_certified());
            assert_eq!(r.text, "3.1415926535");
            let r = compute_digits(&DigitRequest::new(16, Base::Hex, alg)).unwrap();
            assert_eq!(r.text, "3.243F6A8885A308D3");
        }
    }

    #[test]
    fn plan_shapes() {
        let p = plan(&DigitRequest::new(1_000_000, Base::Decimal, Algorithm::Borwein)).unwrap();
        assert_eq!(p.iterations, 19);
        assert_eq!(p.iterate, 20);
        let p = plan(&DigitRequest::new(1, Base::Decimal, Algorithm::Salamin)).unwrap();
        assert!(p.magnifier_bits >= salamin_min_magnifier(p.iterate).bits());
        assert!(plan(&DigitRequest::new(0, Base::Hex, Algorithm::Salamin)).is_err());
        assert!(plan(&DigitRequest::new(5, Base::Hex, Algorithm::Salamin).with_guard(0)).is_err());
    }

    #[test]
    fn explicit_guard_is_honoured() {
        let req = DigitRequest::new(50, Base::Decimal, Algorithm::Borwein).with_guard(2);
        let p = plan(&req).unwrap();
        assert_eq!(p.guard_candidates(), vec![2]);
        let r = compute_digits(&req).unwrap();
        assert_eq!(r.guard_digits, 2);
    }

    #[test]
    fn stepping_matches_direct() {
        let req = DigitRequest::new(40, Base::Hex, Algorithm::Salamin);
        let p = plan(&req).unwrap();
        let mut run = AgmRun::start(&p).unwrap();
        run.step().unwrap();
        run.step().unwrap();
        assert_eq!(run.progress(), 2);
        let a = finish_digits(run, &p).unwrap();
        let b = compute_digits(&req).unwrap();
        assert_eq!(a.text, b.text);
    }
}
