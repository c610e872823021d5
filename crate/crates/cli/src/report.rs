use std::fmt::Display;
use std::time::Duration;

use pi_forge::{DigitReport, RunPlan};
use serde::Serialize;

pub const SCHEMA: &str = "pi-forge/1";

/// An integer that is a JSON number when it fits in `u64` and a decimal
/// string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Count {
    Small(u64),
    Large(String),
}

impl Count {
    pub fn of(n: impl Display) -> Self {
        let s = n.to_string();
        s.parse().map(Count::Small).unwrap_or(Count::Large(s))
    }
}

/// Milliseconds per phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub plan: f64,
    pub compute: f64,
    pub certify: f64,
    pub render: f64,
    pub write: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Clone, Debug, Serialize)]
pub struct AgmReport {
    pub schema: &'static str,
    pub algorithm: &'static str,
    pub digits: u64,
    pub base: u32,
    /// Iteration count; the run computes iterate `n + 1`.
    pub n: u32,
    pub iterate: u32,
    pub magnifier_bits: u64,
    pub rounding_ulps: Count,
    pub truncation_ulps: Count,
    /// `log10` of the absolute truncation bound.
    pub truncation_log10: f64,
    pub extra_digits: u32,
    pub guard_digits: u32,
    pub guard_remainder: Count,
    /// Total error in guard-scale ulps, rescale loss included.
    pub bound_ulps: Count,
    pub verdict: &'static str,
    pub resumed_at_step: Option<u32>,
    pub threads: usize,
    pub timings_ms: PhaseTimings,
}

impl AgmReport {
    pub fn new(plan: &RunPlan, report: &DigitReport) -> Self {
        AgmReport {
            schema: SCHEMA,
            algorithm: plan.request.algorithm.as_str(),
            digits: report.digits,
            base: report.base.radix(),
            n: plan.iterations,
            iterate: plan.iterate,
            magnifier_bits: report.magnifier_bits,
            rounding_ulps: Count::of(&report.budget.rounding),
            truncation_ulps: Count::of(&report.budget.truncation),
            truncation_log10: report.budget.truncation_log10,
            extra_digits: report.budget.extra_digits(report.base.radix()),
            guard_digits: report.guard_digits,
            guard_remainder: Count::of(&report.guard_remainder),
            bound_ulps: Count::of(&report.bound),
            verdict: report.verdict.as_str(),
            resumed_at_step: None,
            threads: rayon::current_num_threads(),
            timings_ms: PhaseTimings {
                compute: ms(report.timings.compute),
                certify: ms(report.timings.certify),
                render: ms(report.timings.render),
                ..PhaseTimings::default()
            },
        }
    }

    pub fn set_plan_time(&mut self, d: Duration) {
        self.timings_ms.plan = ms(d);
    }

    pub fn set_write_time(&mut self, d: Duration) {
        self.timings_ms.write = ms(d);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
