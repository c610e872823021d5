use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use pi_forge::bbp::Escalation;
use pi_forge::digits::parse_digits;
use pi_forge::pipeline::finish_digits;
use pi_forge::{
    compute_digits, crosscheck_digits, find_hex_digit, plan, AgmRun, Algorithm, Base, Checkpoint,
    DigitRequest, PositionOutcome, Verdict,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::report::AgmReport;
use crate::{exit, AgmArgs, BbpArgs, CliError, CrosscheckArgs};

fn io(what: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let what = what.into();
    move |e| CliError::Io(what, e)
}

/// Write via a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes).map_err(io(format!("writing {}", Path::new(&tmp).display())))?;
    fs::rename(&tmp, path).map_err(io(format!("writing {}", path.display())))
}

fn load_checkpoint(path: &Path, plan: &pi_forge::RunPlan) -> Result<AgmRun, CliError> {
    let bytes = fs::read(path).map_err(io(format!("reading {}", path.display())))?;
    let cp = Checkpoint::from_bytes(&bytes)?;
    if cp.algorithm != plan.request.algorithm
        || cp.target != plan.iterate
        || &cp.magnifier != plan.magnifier().value()
    {
        return Err(CliError::Usage(format!(
            "{} belongs to a different run; remove it or change the arguments",
            path.display()
        )));
    }
    Ok(AgmRun::from_checkpoint(cp)?)
}

pub fn agm(args: &AgmArgs) -> Result<i32, CliError> {
    let start = Instant::now();
    let mut req = DigitRequest::new(args.digits, args.base, args.algo.into());
    req.guard = args.guard;
    let plan = plan(&req)?;
    let plan_time = start.elapsed();

    let start = Instant::now();
    let mut resumed = None;
    let mut run = match &args.checkpoint {
        Some(path) if path.exists() => {
            let run = load_checkpoint(path, &plan)?;
            resumed = Some(run.progress());
            run
        }
        _ => AgmRun::start(&plan)?,
    };
    let mut steps = 0u32;
    while !run.is_complete() {
        if args.halt_after == Some(steps) {
            let path = args.checkpoint.as_ref().expect("clap requires --checkpoint");
            write_atomic(path, &run.checkpoint()?.to_bytes())?;
            eprintln!(
                "halted at step {} of {}; resume with the same arguments",
                run.progress(),
                run.target()
            );
            return Ok(exit::HALTED);
        }
        run.step()?;
        steps += 1;
        if let Some(path) = &args.checkpoint {
            write_atomic(path, &run.checkpoint()?.to_bytes())?;
        }
    }
    let stepping = start.elapsed();
    let digits = finish_digits(run, &plan)?;

    let mut report = AgmReport::new(&plan, &digits);
    report.resumed_at_step = resumed;
    report.set_plan_time(plan_time);
    report.timings_ms.compute += stepping.as_secs_f64() * 1e3;

    let start = Instant::now();
    if digits.verdict == Verdict::Certified {
        let mut text = digits.text.clone();
        text.push('\n');
        match &args.output {
            Some(path) => write_atomic(path, text.as_bytes())?,
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(io("writing stdout"))?,
        }
    }
    report.set_write_time(start.elapsed());
    if let Some(path) = &args.report {
        write_atomic(path, report.to_json().as_bytes())?;
    }
    if let Some(path) = &args.checkpoint {
        if path.exists() {
            fs::remove_file(path).map_err(io(format!("removing {}", path.display())))?;
        }
    }
    eprintln!(
        "{}: {} base-{} digits, {} iterations, magnifier 2^{}, guard {}, r = {}, B = {}",
        digits.verdict.as_str(),
        digits.digits,
        digits.base,
        plan.iterate,
        digits.magnifier_bits,
        digits.guard_digits,
        digits.guard_remainder,
        digits.bound
    );
    Ok(match digits.verdict {
        Verdict::Certified => exit::OK,
        Verdict::Ambiguous => exit::AMBIGUOUS,
    })
}

fn escalation(fixed: Option<u32>, cap: u32) -> Escalation {
    let chunks = rayon::current_num_threads();
    match fixed {
        Some(p) => Escalation {
            start: Some(p),
            cap: p,
            chunks,
        },
        None => Escalation {
            start: None,
            cap,
            chunks,
        },
    }
}

pub fn bbp(args: &BbpArgs) -> Result<i32, CliError> {
    let esc = escalation(args.precision_bits, args.max_precision_bits);
    let out = find_hex_digit(args.position, esc)?;
    let bits = out.attempts.last().copied().unwrap_or_default();
    match out.digit {
        Some(v) => {
            println!("{v:X}");
            eprintln!("position {}: {v:X} at {bits} bits", args.position);
            Ok(exit::OK)
        }
        None => {
            eprintln!("position {}: inconclusive up to {bits} bits", args.position);
            Ok(exit::AMBIGUOUS)
        }
    }
}

pub fn crosscheck(args: &CrosscheckArgs) -> Result<i32, CliError> {
    let text = match &args.input {
        Some(path) => fs::read_to_string(path).map_err(io(format!("reading {}", path.display())))?,
        None => {
            let n = args.digits.expect("clap requires --digits without --input");
            let alg = args.algo.map_or(Algorithm::Salamin, Into::into);
            let run = compute_digits(&DigitRequest::new(n, Base::Hex, alg))?;
            if run.verdict != Verdict::Certified {
                eprintln!("the hex run itself is ambiguous; nothing to compare");
                return Ok(exit::AMBIGUOUS);
            }
            run.text
        }
    };
    let (_, len) = parse_digits(&text, Base::Hex)?;
    let positions: Vec<u64> = match args.random {
        Some(k) => {
            if k as u64 > len {
                return Err(CliError::Usage(format!(
                    "cannot draw {k} distinct positions from {len} digits"
                )));
            }
            let mut rng = StdRng::seed_from_u64(args.seed);
            let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, len as usize, k)
                .into_iter()
                .map(|i| i as u64 + 1)
                .collect();
            picked.sort_unstable();
            picked
        }
        None => args.positions.clone(),
    };
    let esc = escalation(None, args.max_precision_bits);
    let result = crosscheck_digits(&text, &positions, esc)?;
    for c in &result.checks {
        let spigot = c.bbp_digit.map_or("?".to_string(), |v| format!("{v:X}"));
        let outcome = match c.outcome {
            PositionOutcome::Match => "match",
            PositionOutcome::Mismatch => "MISMATCH",
            PositionOutcome::Inconclusive => "inconclusive",
        };
        println!("{:>12}  run {:X}  spigot {spigot}  {outcome}", c.position, c.agm_digit);
    }
    let mismatches = result.mismatches().count();
    let inconclusive = result.inconclusive().count();
    eprintln!(
        "{} positions: {} mismatches, {} inconclusive",
        result.checks.len(),
        mismatches,
        inconclusive
    );
    Ok(if mismatches > 0 {
        exit::MISMATCH
    } else if inconclusive > 0 {
        exit::AMBIGUOUS
    } else {
        exit::OK
    })
}

pub fn selftest() -> Result<i32, CliError> {
    let mut failed = 0;
    let mut line = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };
    let dec = [Algorithm::Borwein, Algorithm::Salamin]
        .map(|alg| compute_digits(&DigitRequest::new(50, Base::Decimal, alg)));
    let [b, s] = dec;
    let (b, s) = (b?, s?);
    line("borwein 50 decimals certified", b.verdict == Verdict::Certified);
    line("salamin 50 decimals certified", s.verdict == Verdict::Certified);
    line("algorithms agree", b.text == s.text);
    line("known prefix", b.text.starts_with("3.14159265358979323846"));

    let hex = compute_digits(&DigitRequest::new(300, Base::Hex, Algorithm::Salamin))?;
    line("salamin 300 hex digits certified", hex.verdict == Verdict::Certified);
    let positions = [1, 2, 3, 50, 150, 299, 300];
    let cc = crosscheck_digits(&hex.text, &positions, escalation(None, 64))?;
    line("spigot agrees at 7 positions", cc.all_match());
    line(
        "guard-failing precision is inconclusive",
        find_hex_digit(5, escalation(Some(4), 4))?.digit.is_none(),
    );
    Ok(if failed == 0 { exit::OK } else { exit::MISMATCH })
}
