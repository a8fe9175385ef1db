//! `cshor`: table reproduction, circuit verification, synthesis, simulation
//! and factoring runs.

mod args;
mod commands;
mod golden;
mod manifest;
mod report;

use std::path::Path;

use clap::Parser;

use args::{Cli, Command, Format, TablesCmd};
use commands::CliError;
use golden::PaperDiff;
use manifest::RunManifest;
use report::Report;

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Tables(t) => format!(
            "tables {}",
            match t {
                TablesCmd::Orders { .. } => "orders",
                TablesCmd::AllowedPeriods { .. } => "allowed-periods",
                TablesCmd::Probabilities(_) => "probabilities",
                TablesCmd::Separability(_) => "separability",
                TablesCmd::Truth(_) => "truth",
            }
        ),
        Command::Circuit(_) => "circuit".into(),
        Command::Synth(_) => "synth".into(),
        Command::Simulate(_) => "simulate".into(),
        Command::Factor(_) => "factor".into(),
        Command::Replay(_) => "replay".into(),
    }
}

/// Runs a command and folds any reference diff into the report.
fn execute(cli: &Cli) -> Result<Report, CliError> {
    let diff = cli.common.diff_paper;
    let (mut report, paper): (Report, Option<PaperDiff>) = match &cli.command {
        Command::Tables(t) => commands::tables::run(t, diff)?,
        Command::Circuit(c) => commands::circuit::run(c, diff)?,
        Command::Synth(s) => commands::synth::run(s, diff)?,
        Command::Simulate(s) => commands::simulate::run(s, diff)?,
        Command::Factor(f) => commands::factor::run(f, diff)?,
        Command::Replay(_) => unreachable!("replay is dispatched separately"),
    };
    if let Some(d) = paper {
        report.failed |= !d.passed();
        report.text.push_str(&d.render());
        report.json["paper_diff"] = serde_json::to_value(&d).expect("diff serializes");
    }
    Ok(report)
}

fn parse(args: &[String]) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(std::iter::once("cshor".to_string()).chain(args.iter().cloned()))
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn emit(cli: &Cli, args: &[String], report: &Report) -> Result<i32, CliError> {
    let manifest = RunManifest {
        tool: "cshor".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command_name(&cli.command),
        args: manifest::replayable_args(args),
        params: serde_json::to_value(cli).expect("arguments serialize"),
        seed: report.seed,
        rng: report.seed.map(|_| compiled_shor::qsim::RNG_IDENTITY.to_string()),
        checksums: manifest::checksums(report),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    match cli.common.format {
        Format::Text => print!("{}", report.text),
        Format::Csv => match &report.csv {
            Some(csv) => print!("{csv}"),
            None => return Err(CliError::Invalid(format!("{} has no CSV form", manifest.command))),
        },
        Format::Json => {
            let doc = serde_json::json!({ "manifest": manifest, "result": report.json });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
        }
    }
    if let Some(dir) = &cli.common.out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        for (name, body) in manifest::artifacts(report) {
            write(&dir.join(name), &body)?;
        }
        write(&dir.join("manifest.json"), &manifest_json)?;
    }
    if let Some(path) = &cli.common.manifest {
        write(path, &manifest_json)?;
    }
    Ok(i32::from(report.failed))
}

fn replay(path: &Path) -> Result<i32, CliError> {
    let stored: RunManifest = serde_json::from_str(&commands::read_file(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: not a manifest: {e}", path.display())))?;
    let cli = parse(&stored.args).map_err(|e| CliError::Invalid(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Invalid("a manifest cannot replay a replay".into()));
    }
    let report = execute(&cli)?;
    let fresh = manifest::checksums(&report);
    let mut code = 0;
    for (name, digest) in &stored.checksums {
        match fresh.get(name) {
            Some(d) if d == digest => println!("identical  {name}"),
            Some(_) => {
                println!("DIFFERENT  {name}");
                code = 1;
            }
            None => {
                println!("MISSING    {name}");
                code = 1;
            }
        }
    }
    println!("replay of `cshor {}`: {}", stored.args.join(" "), if code == 0 { "reproduced" } else { "not reproduced" });
    Ok(code)
}

fn run(args: Vec<String>) -> i32 {
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Replay(r) => replay(&r.path),
        _ => execute(&cli).and_then(|report| emit(&cli, &args, &report)),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

fn main() {
    std::process::exit(run(std::env::args().skip(1).collect()));
}
