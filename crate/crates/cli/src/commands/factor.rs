//! `cshor factor`

use compiled_shor::numtheory::{gcd, is_prime_power, shor_postprocess, NumTheoryError};
use compiled_shor::qsim::order_finding_run;
use serde::Serialize;
use serde_json::json;

use super::CliError;
use crate::args::FactorArgs;
use crate::golden::PaperDiff;
use crate::report::Report;

#[derive(Debug, Clone, Serialize)]
pub struct Attempt {
    pub a: u64,
    pub recovered_order: Option<u64>,
    pub candidates: Vec<u64>,
    pub status: String,
    pub factors: Option<(u64, u64)>,
    pub s: Option<u64>,
}

fn check_modulus(n: u64) -> Result<(), CliError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(CliError::Invalid(format!("N={n} must be odd and at least 3 (even N has the factor 2)")));
    }
    match is_prime_power(n) {
        Some((_, 1)) => Err(CliError::Invalid(format!("N={n} is prime"))),
        Some((p, k)) => Err(CliError::Invalid(format!("N={n} = {p}^{k} is a prime power"))),
        None => Ok(()),
    }
}

fn attempt(n: u64, a: u64, shots: u64, seed: u64) -> Result<Attempt, CliError> {
    let g = gcd(a, n)?;
    if g != 1 {
        let f = (g.min(n / g), g.max(n / g));
        return Ok(Attempt { a, recovered_order: None, candidates: vec![], status: "GcdShortcut".into(), factors: Some(f), s: None });
    }
    let run = order_finding_run(a, n, shots, seed)?;
    let mut candidates = run.candidates.clone();
    candidates.sort_unstable();
    candidates.dedup();
    let mut out = Attempt {
        a,
        recovered_order: run.recovered_order,
        candidates,
        status: "OrderNotRecovered".into(),
        factors: None,
        s: None,
    };
    let Some(r) = run.recovered_order else { return Ok(out) };
    match shor_postprocess(n, a, r) {
        Ok(o) => {
            out.status = format!("{:?}", o.status);
            out.factors = o.factors;
            out.s = o.s;
        }
        Err(NumTheoryError::TrivialFactors { s, .. }) => {
            out.status = "TrivialFactors".into();
            out.s = Some(s);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn describe(n: u64, t: &Attempt) -> String {
    let order = t.recovered_order.map_or("none".into(), |r| r.to_string());
    let detail = match (t.status.as_str(), t.factors, t.s) {
        ("GcdShortcut", Some((p, q)), _) => format!("gcd(a, N) > 1 already splits N: {p} x {q}"),
        (_, Some((p, q)), Some(s)) => format!("s={s}, gcd(s-1, N), gcd(s+1, N) give {p} x {q}"),
        ("MinusOneCongruence", _, Some(s)) => format!("failure MinusOneCongruence: s={s} = -1 mod {n}"),
        ("OddOrderNoSquareRoot", _, _) => "failure OddOrderNoSquareRoot: r is odd and a is not a square".into(),
        ("TrivialFactors", _, Some(s)) => format!("failure TrivialFactors: s={s}"),
        _ => "failure OrderNotRecovered: no sample yielded a valid order".into(),
    };
    format!("a={}: order {} (candidates {:?}); {}\n", t.a, order, t.candidates, detail)
}

pub fn run(args: &FactorArgs, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    if diff_paper {
        return Err(CliError::Invalid("factor has no paper table to diff".into()));
    }
    let n = args.n;
    check_modulus(n)?;
    let mut attempts = Vec::new();
    match args.a {
        Some(a) => {
            if a <= 1 || a >= n {
                return Err(CliError::Invalid(format!("base a={a} must satisfy 1 < a < N")));
            }
            attempts.push(attempt(n, a, args.shots, args.seed)?);
        }
        None => {
            for a in (2..n).filter(|&a| gcd(a, n) == Ok(1)) {
                let t = attempt(n, a, args.shots, args.seed)?;
                let done = t.factors.is_some();
                attempts.push(t);
                if done {
                    break;
                }
            }
        }
    }
    let factors = attempts.iter().find_map(|t| t.factors);
    let mut report = Report::new("factor");
    report.seed = Some(args.seed);
    report.text = format!("factoring N={n} with {} shots per base, seed {}\n", args.shots, args.seed);
    for t in &attempts {
        report.text.push_str(&describe(n, t));
    }
    report.text.push_str(&match factors {
        Some((p, q)) => format!("factors: {p} {q}\n"),
        None => format!("no factors found; last status {}\n", attempts.last().map_or("none", |t| t.status.as_str())),
    });
    report.json = json!({ "N": n, "shots": args.shots, "seed": args.seed, "attempts": attempts, "factors": factors });
    Ok((report, None))
}
