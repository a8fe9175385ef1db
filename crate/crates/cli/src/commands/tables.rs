//! `cshor tables ...`

use compiled_shor::numtheory::{allowed_periods, coprime_order_table, Semiprime};
use compiled_shor::qsim::{period_state, ProbDist};
use serde_json::json;

use super::{direction, table_for, CliError};
use crate::args::{Registers, TableSpec, TablesCmd};
use crate::golden::{self, Golden, PaperDiff};
use crate::report::{num, round12, Report};

pub fn run(cmd: &TablesCmd, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    match cmd {
        TablesCmd::Orders { n } => orders(*n, diff_paper),
        TablesCmd::AllowedPeriods { max_n } => periods(*max_n, diff_paper),
        TablesCmd::Probabilities(reg) => probabilities(*reg, diff_paper),
        TablesCmd::Separability(reg) => separability(*reg, diff_paper),
        TablesCmd::Truth(spec) => truth(spec, diff_paper),
    }
}

fn no_golden(what: &str) -> CliError {
    CliError::Invalid(format!("no bundled reference table for {what}"))
}

fn orders(n: u64, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    if Semiprime::from_n(n).is_none() {
        return Err(CliError::Invalid(format!("{n} is not a product of two distinct odd primes")));
    }
    let table = coprime_order_table(n)?;
    let mut report = Report::new(format!("orders_{n}"));
    report.text = format!("orders modulo {n}\n  a   r\n");
    let mut csv = String::from("a,r\n");
    for rec in &table {
        report.text.push_str(&format!("{:>3} {:>3}\n", rec.a, rec.r));
        csv.push_str(&format!("{},{}\n", rec.a, rec.r));
    }
    report.csv = Some(csv);
    report.json = json!({ "N": n, "orders": table });
    let diff = if diff_paper {
        let src = match n {
            21 => golden::ORDERS_21,
            33 => golden::ORDERS_33,
            _ => return Err(no_golden(&format!("orders modulo {n}"))),
        };
        let mut d = PaperDiff::new(&format!("orders_{n}"));
        let g = Golden::parse(src);
        for row in g.rows() {
            let a = row.u64("a");
            match table.iter().find(|r| r.a == a) {
                Some(rec) => d.exact(format!("a={a}"), row.get("r"), rec.r.to_string()),
                None => d.missing(format!("a={a}"), row.get("r")),
            }
        }
        if table.len() != g.len() {
            d.exact("row count".into(), &g.len().to_string(), table.len().to_string());
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}

fn periods(max_n: u64, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    let rows: Vec<(Semiprime, u64, Vec<u64>)> = Semiprime::all_below(max_n)
        .into_iter()
        .map(|s| Ok((s, s.carmichael(), allowed_periods(s.p, s.q)?)))
        .collect::<Result<_, CliError>>()?;
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    let mut report = Report::new("allowed_periods");
    report.text = format!("allowed periods for N < {max_n}\n  p   q   N  lambda  periods\n");
    let mut csv = String::from("p,q,N,lambda,periods\n");
    for (s, lambda, ps) in &rows {
        report.text.push_str(&format!("{:>3} {:>3} {:>3} {:>7}  {}\n", s.p, s.q, s.n, lambda, join(ps)));
        csv.push_str(&format!("{},{},{},{},{}\n", s.p, s.q, s.n, lambda, join(ps)));
    }
    report.csv = Some(csv);
    report.json = json!({
        "max_N": max_n,
        "rows": rows.iter().map(|(s, l, ps)| json!({"p": s.p, "q": s.q, "N": s.n, "lambda": l, "periods": ps})).collect::<Vec<_>>(),
    });
    let diff = if diff_paper {
        if max_n != 90 {
            return Err(no_golden(&format!("--max-N {max_n} (the paper covers N < 90)")));
        }
        let mut d = PaperDiff::new("allowed_periods");
        let g = Golden::parse(golden::ALLOWED_PERIODS);
        for row in g.rows() {
            let n = row.u64("N");
            match rows.iter().find(|(s, _, _)| s.n == n) {
                Some((s, l, ps)) => {
                    d.exact(format!("N={n} p,q"), &format!("{} {}", row.get("p"), row.get("q")), format!("{} {}", s.p, s.q));
                    d.exact(format!("N={n} lambda"), row.get("lambda"), l.to_string());
                    d.exact(format!("N={n} periods"), row.get("periods"), join(ps));
                }
                None => d.missing(format!("N={n}"), row.get("periods")),
            }
        }
        if rows.len() != g.len() {
            d.exact("row count".into(), &g.len().to_string(), rows.len().to_string());
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}

/// Probability rows for every period the registers can hold.
pub fn probability_rows(reg: Registers) -> Result<Vec<(u64, ProbDist<f64>)>, CliError> {
    let max_p = (1u64 << reg.m).min(1u64 << reg.k);
    (1..=max_p)
        .map(|p| Ok((p, period_state::<f64>(reg.m, reg.k, p, direction(reg.direction))?.input_probabilities())))
        .collect()
}

fn paper_registers(reg: Registers, what: &str) -> Result<(), CliError> {
    if reg.m != 3 || reg.k != 3 {
        return Err(no_golden(&format!("{what} with m={}, k={}", reg.m, reg.k)));
    }
    Ok(())
}

fn probabilities(reg: Registers, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    let rows = probability_rows(reg)?;
    let mut report = Report::new("probabilities");
    report.text = format!("P_p(k), m={} k={}\n p |", reg.m, reg.k);
    for k in 0..1u32 << reg.m {
        report.text.push_str(&format!(" {k:>6}"));
    }
    report.text.push('\n');
    let mut csv = String::from("p");
    for k in 0..1u32 << reg.m {
        csv.push_str(&format!(",{k}"));
    }
    csv.push('\n');
    for (p, d) in &rows {
        report.text.push_str(&format!("{p:>2} |"));
        csv.push_str(&p.to_string());
        for &v in d.probabilities() {
            report.text.push_str(&format!(" {v:>6.3}"));
            csv.push_str(&format!(",{}", num(v)));
        }
        report.text.push('\n');
        csv.push('\n');
    }
    report.csv = Some(csv);
    report.json = json!({
        "m": reg.m, "k": reg.k, "direction": reg.direction,
        "rows": rows.iter().map(|(p, d)| json!({"p": p, "probabilities": d.probabilities().iter().map(|&v| round12(v)).collect::<Vec<_>>()})).collect::<Vec<_>>(),
    });
    let diff = if diff_paper {
        paper_registers(reg, "probabilities")?;
        let mut d = PaperDiff::new("probabilities");
        for row in Golden::parse(golden::PROBABILITIES).rows() {
            let (p, k) = (row.u64("p"), row.u64("k") as usize);
            let computed = rows[(p - 1) as usize].1.probabilities()[k];
            d.numeric(format!("p={p} k={k}"), row.f64("probability"), computed, row.f64("tolerance"), row.is_erratum());
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}

fn separability(reg: Registers, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    let rows: Vec<(u64, f64)> =
        probability_rows(reg)?.into_iter().map(|(p, d)| (p, d.separability_index())).collect();
    let mut report = Report::new("separability");
    report.text = format!("separability index S, m={} k={}\n p  S\n", reg.m, reg.k);
    let mut csv = String::from("p,S\n");
    for (p, s) in &rows {
        report.text.push_str(&format!("{p:>2}  {s:.3}\n"));
        csv.push_str(&format!("{p},{}\n", num(*s)));
    }
    report.csv = Some(csv);
    report.json = json!({
        "m": reg.m, "k": reg.k,
        "rows": rows.iter().map(|(p, s)| json!({"p": p, "S": round12(*s)})).collect::<Vec<_>>(),
    });
    let diff = if diff_paper {
        paper_registers(reg, "separability")?;
        let mut d = PaperDiff::new("separability");
        for row in Golden::parse(golden::SEPARABILITY).rows() {
            let p = row.u64("p");
            d.numeric(format!("p={p}"), row.f64("S"), rows[(p - 1) as usize].1, row.f64("tolerance"), row.is_erratum());
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}

fn truth(spec: &TableSpec, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    if diff_paper {
        return Err(no_golden("truth tables (use `circuit verify`)"));
    }
    let built = table_for(spec)?;
    let mut report = Report::new("truth");
    report.text = format!("{}\n{}", built.g.describe(), built.table);
    let mut csv = String::from("x,y\n");
    for (x, y) in built.table.rows().iter().enumerate() {
        csv.push_str(&format!("{x},{y}\n"));
    }
    report.csv = Some(csv);
    report.json = json!({ "g": built.g, "table": built.table });
    report.files.push(("truth.json".into(), built.table.to_json()));
    Ok((report, None))
}
