//! `cshor circuit show|verify|cost`

use compiled_shor::circuit::{Circuit, CircuitError, FigureId};
use compiled_shor::modexp_tables::TruthTable;
use serde_json::{json, Value};

use super::{figure, read_file, CliError};
use crate::args::{CircuitAction, CircuitArgs};
use crate::golden::{self, Golden, PaperDiff};
use crate::report::Report;

struct Target {
    label: String,
    circuit: Circuit,
    table: Option<TruthTable>,
    figure: Option<FigureId>,
}

fn load_table(path: &std::path::Path) -> Result<TruthTable, CliError> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: not a truth table: {e}", path.display())))
}

fn targets(args: &CircuitArgs) -> Result<Vec<Target>, CliError> {
    let override_table = args.table.as_deref().map(load_table).transpose()?;
    let from_figure = |f: FigureId| Target {
        label: f.as_str().into(),
        circuit: if args.as_drawn { f.as_drawn() } else { f.circuit() },
        table: Some(override_table.clone().unwrap_or_else(|| f.target_table())),
        figure: Some(f),
    };
    match (&args.id, &args.file, args.all) {
        (Some(id), None, false) => Ok(vec![from_figure(figure(id)?)]),
        (None, Some(path), false) => {
            let circuit = Circuit::from_json(&read_file(path)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            Ok(vec![Target { label: path.display().to_string(), circuit, table: override_table, figure: None }])
        }
        (None, None, true) => Ok(FigureId::ALL.into_iter().map(from_figure).collect()),
        _ => Err(CliError::Invalid("give exactly one of --id, --file, --all".into())),
    }
}

pub fn run(args: &CircuitArgs, diff_paper: bool) -> Result<(Report, Option<PaperDiff>), CliError> {
    let targets = targets(args)?;
    let single = targets.len() == 1;
    let mut report = Report::new(match args.action {
        CircuitAction::Show => "circuit",
        CircuitAction::Verify => "verify",
        CircuitAction::Cost => "cost",
    });
    let mut entries = Vec::new();
    let mut csv = String::from("id,n_toffoli,n_cnot,n_not,quantum_cost,total_cost\n");
    for t in &targets {
        let cost = t.circuit.cost();
        let prefix = if single { String::new() } else { format!("{}: ", t.label) };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.label, cost.n_toffoli, cost.n_cnot, cost.n_not, cost.quantum_cost, cost.total_cost
        ));
        let mut entry = json!({ "id": t.label, "cost": cost });
        match args.action {
            CircuitAction::Cost => report.text.push_str(&format!("{prefix}{cost}\n")),
            CircuitAction::Show => {
                report.text.push_str(&format!("{}\n{}{cost} total={}\n\n", t.label, t.circuit, cost.total_cost));
                entry["circuit"] = serde_json::from_str(&t.circuit.to_json()).unwrap_or(Value::Null);
            }
            CircuitAction::Verify => {
                let Some(table) = &t.table else {
                    return Err(CliError::Invalid("verifying a circuit file needs --table".into()));
                };
                match t.circuit.verify(table) {
                    Ok(m) if m.is_empty() => {
                        report.text.push_str(&format!(
                            "{prefix}verified on all {} inputs, input register restored\n",
                            table.rows().len()
                        ));
                        entry["mismatches"] = json!([]);
                    }
                    Ok(m) => {
                        report.failed = true;
                        report.text.push_str(&format!("{prefix}{} mismatching inputs\n", m.len()));
                        for mm in &m {
                            report.text.push_str(&format!("  {mm}\n"));
                        }
                        entry["mismatches"] = json!(m);
                    }
                    Err(e @ CircuitError::WidthMismatch { .. }) => {
                        report.failed = true;
                        report.text.push_str(&format!("{prefix}{e}\n"));
                        entry["error"] = json!(e.to_string());
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        entries.push(entry);
    }
    report.csv = Some(csv);
    report.json = json!({ "action": args.action, "circuits": entries });

    let diff = if diff_paper {
        let mut d = PaperDiff::new("figure_costs");
        let g = Golden::parse(golden::FIGURE_COSTS);
        for t in &targets {
            let Some(f) = t.figure else {
                return Err(CliError::Invalid(format!("no bundled paper counts for {}", t.label)));
            };
            let row = g.rows().find(|r| r.get("id") == f.as_str()).expect("every figure has a golden row");
            let cost = t.circuit.cost();
            d.exact(format!("{} N_T", t.label), row.get("n_toffoli"), cost.n_toffoli.to_string());
            d.exact(format!("{} N_CN", t.label), row.get("n_cnot"), cost.n_cnot.to_string());
            if !row.get("quantum_cost").is_empty() {
                d.exact(format!("{} qcost", t.label), row.get("quantum_cost"), cost.quantum_cost.to_string());
            }
        }
        Some(d)
    } else {
        None
    };
    Ok((report, diff))
}
