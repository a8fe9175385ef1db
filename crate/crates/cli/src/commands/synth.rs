//! `cshor synth`

use compiled_shor::synth::{compare_cost, synthesize_report, Route, SynthesisBudget};
use serde_json::{json, Value};

use super::{table_for, CliError};
use crate::args::SynthArgs;
use crate::golden::PaperDiff;
use crate::report::Report;

pub fn run(args: &SynthArgs, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    if diff_paper {
        return Err(CliError::Invalid("synth has no reference table to diff; the report compares against the figure".into()));
    }
    let built = table_for(&args.spec)?;
    let budget = SynthesisBudget {
        max_quantum_cost: args.max_cost,
        max_gates: args.max_gates,
        allow_negative_controls: !args.positive_only,
        exhaustive_fallback: !args.no_search,
    };
    let synth = synthesize_report(&built.table, &budget)?;
    let mismatches = synth.circuit.verify(&built.table)?;
    if !mismatches.is_empty() {
        return Err(CliError::Verification(format!("synthesized circuit fails on {} inputs", mismatches.len())));
    }
    let table = &built.table;
    let mut report = Report::new("synth");
    report.text = format!(
        "a={} N={} compile={}  {}\n{}\n{}-in/{}-out circuit, verified on all {} inputs ({})\n{}{} total={}\n",
        args.spec.a,
        args.spec.n,
        args.spec.strategy.as_str(),
        built.g.describe(),
        table,
        table.n_in(),
        table.n_out(),
        table.rows().len(),
        match synth.route {
            Route::Greedy => "affine fit + Toffoli cascades",
            Route::Exhaustive => "exhaustive search",
        },
        synth.circuit,
        synth.cost,
        synth.cost.total_cost,
    );

    let mut reference = Value::Null;
    if let Some(fig) = built.figure {
        let info = fig.info();
        let reference_circuit = fig.circuit();
        let (delta, note) = if fig.target_table() == *table {
            (compare_cost(&synth.circuit, &reference_circuit, table)?, "reference verified on the same table")
        } else {
            (
                synth.cost.quantum_cost as i64 - info.reference_cost() as i64,
                "reference circuit implements the printed table, compared by caption cost",
            )
        };
        report.text.push_str(&format!(
            "reference figure {}: qcost={} (synthesized {}{delta})  {note}\n",
            info.id,
            info.reference_cost(),
            if delta >= 0 { "+" } else { "" },
        ));
        reference = json!({ "figure": info.id, "quantum_cost": info.reference_cost(), "delta": delta, "note": note });
    }
    let circuit_json = synth.circuit.to_json();
    report.json = json!({
        "a": args.spec.a,
        "N": args.spec.n,
        "compile": args.spec.strategy,
        "g": built.g,
        "g_description": built.g.describe(),
        "table": table,
        "circuit": serde_json::from_str::<Value>(&circuit_json).unwrap_or(Value::Null),
        "cost": synth.cost,
        "route": synth.route,
        "reference": reference,
    });
    report.files.push(("circuit.json".into(), circuit_json));
    Ok((report, None))
}
