//! `cshor simulate`

use compiled_shor::qsim::{
    estimate_epsilon, noisy_separability, period_state, sample, uniform_input_state, DensityMatrix, NoiseParams,
    QftDirection, QsimError, StateVector,
};
use num_complex::Complex;
use serde_json::{json, Value};

use super::{direction, figure, CliError};
use crate::args::{Direction, SimulateArgs};
use crate::golden::{self, Golden, PaperDiff};
use crate::report::{num, round12, Report};

fn build_state(args: &SimulateArgs) -> Result<(String, Option<u64>, StateVector<f64>), CliError> {
    let dir = direction(args.registers.direction);
    match (args.p, &args.id) {
        (Some(p), None) => {
            let (m, k) = (args.registers.m, args.registers.k);
            Ok((format!("p={p}"), Some(p), period_state::<f64>(m, k, p, dir)?))
        }
        (None, Some(id)) => {
            let circuit = figure(id)?.circuit();
            let (m, k) = (circuit.input_lines().len() as u32, circuit.output_lines().len() as u32);
            let state = uniform_input_state::<f64>(m, k)?.apply_circuit(&circuit)?.qft_input(dir);
            Ok((format!("circuit {id}"), None, state))
        }
        _ => Err(CliError::Invalid("give exactly one of --p or --id".into())),
    }
}

fn depolarized(rho: &DensityMatrix<f64>, eps: f64) -> Result<DensityMatrix<f64>, CliError> {
    let d = rho.dim();
    let entries = (0..d * d)
        .map(|idx| {
            let mixed = if idx / d == idx % d { (1.0 - eps) / d as f64 } else { 0.0 };
            rho.entries()[idx] * eps + Complex::new(mixed, 0.0)
        })
        .collect();
    Ok(DensityMatrix::from_entries(d, entries)?)
}

fn render_rho(rho: &DensityMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..rho.dim() {
        let cells: Vec<String> = (0..rho.dim())
            .map(|j| {
                let z = rho.entry(i, j);
                format!("{:>7.3}{:+.3}i", z.re, z.im)
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn run(args: &SimulateArgs, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    let (label, period, state) = build_state(args)?;
    let m = state.m();
    let noise = NoiseParams::new(args.epsilon)?;
    let theory = state.input_probabilities();
    let noisy = theory.depolarize(&noise);
    let s_theory = theory.separability_index();
    let s_noisy = noisy_separability(s_theory, &noise, m)?;
    let sampled = (args.shots > 0).then(|| sample(&noisy, args.shots, args.seed)).transpose()?;
    let s_observed = sampled.as_ref().map(|d| d.separability_index());
    let estimate = match estimate_epsilon(s_theory, s_observed.unwrap_or(s_noisy), m) {
        Ok(e) => Some(e),
        Err(QsimError::NoSignal(_)) => None,
        Err(e) => return Err(e.into()),
    };

    let mut report = Report::new("simulate");
    report.seed = sampled.as_ref().map(|_| args.seed);
    report.text = format!(
        "{label}, m={m} k={}, {} QFT, epsilon={}\n  k  theoretical  noisy{}\n",
        state.k(),
        match args.registers.direction {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        },
        num(args.epsilon),
        if sampled.is_some() { "  sampled" } else { "" }
    );
    let mut csv = format!("k,theoretical,noisy{}\n", if sampled.is_some() { ",sampled" } else { "" });
    for (k, (&t, &n)) in theory.probabilities().iter().zip(noisy.probabilities()).enumerate() {
        report.text.push_str(&format!("{k:>3}  {t:>11.4}  {n:>5.4}"));
        csv.push_str(&format!("{k},{},{}", num(t), num(n)));
        if let Some(s) = &sampled {
            report.text.push_str(&format!("  {:>7.4}", s.probabilities()[k]));
            csv.push_str(&format!(",{}", num(s.probabilities()[k])));
        }
        report.text.push('\n');
        csv.push('\n');
    }
    report.text.push_str(&format!("S_theory={:.4}  S_noisy={:.4}", s_theory, s_noisy));
    if let Some(s) = s_observed {
        report.text.push_str(&format!("  S_observed={s:.4} ({} shots, seed {})", args.shots, args.seed));
    }
    report.text.push('\n');
    match &estimate {
        Some(e) => report.text.push_str(&format!(
            "estimated epsilon={:.4}{}\n",
            e.epsilon,
            if e.clamped { " (clamped)" } else { "" }
        )),
        None => report.text.push_str("estimated epsilon: not identifiable (S_theory equals the fully mixed value)\n"),
    }

    let rho = if args.rho {
        let pure = state.reduce_to_input();
        let shown = if args.epsilon < 1.0 { depolarized(&pure, args.epsilon)? } else { pure };
        report.text.push_str(&format!("reduced density matrix of the input register:\n{}", render_rho(&shown)));
        Some(shown)
    } else {
        None
    };

    report.csv = Some(csv);
    let probs = |d: &[f64]| d.iter().map(|&v| round12(v)).collect::<Vec<_>>();
    report.json = json!({
        "source": label,
        "m": m,
        "k": state.k(),
        "direction": args.registers.direction,
        "epsilon": args.epsilon,
        "shots": args.shots,
        "seed": args.seed,
        "theoretical": probs(theory.probabilities()),
        "noisy": probs(noisy.probabilities()),
        "sampled": sampled.as_ref().map(|d| probs(d.probabilities())),
        "S_theory": round12(s_theory),
        "S_noisy": round12(s_noisy),
        "S_observed": s_observed.map(round12),
        "epsilon_estimate": estimate,
        "rho": rho.as_ref().map(|r| serde_json::from_str::<Value>(&r.to_json()).unwrap_or(Value::Null)),
    });
    if let Some(r) = &rho {
        report.files.push(("rho.json".into(), r.to_json()));
    }

    let diff = if diff_paper {
        let paper_setup = args.registers.m == 3
            && args.registers.k == 3
            && direction(args.registers.direction) == QftDirection::Forward
            && args.epsilon == 1.0;
        let Some(p) = period.filter(|_| paper_setup) else {
            return Err(CliError::Invalid("reference values exist only for --p with m=k=3, forward QFT, epsilon 1".into()));
        };
        let mut d = PaperDiff::new(&format!("probabilities p={p}"));
        for row in Golden::parse(golden::PROBABILITIES).rows().filter(|r| r.u64("p") == p) {
            let k = row.u64("k") as usize;
            d.numeric(format!("p={p} k={k}"), row.f64("probability"), theory.probabilities()[k], row.f64("tolerance"), row.is_erratum());
        }
        if let (Some(r), 3) = (&rho, p) {
            d.table = "probabilities p=3 + rho3".into();
            for row in Golden::parse(golden::RHO3).rows() {
                let (i, j) = (row.u64("i") as usize, row.u64("j") as usize);
                let paper = Complex::new(row.f64("re"), row.f64("im"));
                d.complex(format!("rho3({i},{j})"), paper, r.entry(i, j), row.f64("tolerance"), row.is_erratum());
            }
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}
