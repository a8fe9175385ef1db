//! Command implementations.

pub mod circuit;
pub mod factor;
pub mod simulate;
pub mod synth;
pub mod tables;

use compiled_shor::circuit::{CircuitError, FigureId};
use compiled_shor::modexp_tables::{
    build_modexp_table, ceil_log2, classical_compile, full_compile, GDescriptor, GKind, TableError, TruthTable,
};
use compiled_shor::numtheory::{multiplicative_order, NumTheoryError};
use compiled_shor::qsim::{QftDirection, QsimError};
use compiled_shor::synth::SynthError;
use thiserror::Error;

use crate::args::{Direction, Strategy, TableSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Verification(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::BudgetExhausted { .. } | SynthError::TooLarge { .. } | SynthError::NoPlan { .. } => {
                Self::Budget(e.to_string())
            }
            SynthError::Verification(_) => Self::Verification(e.to_string()),
            SynthError::Circuit(c) => Self::Circuit(c),
        }
    }
}

impl CliError {
    /// 1 verification failure, 2 invalid input, 3 budget exhaustion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Verification(_) => 1,
            Self::Budget(_) => 3,
            _ => 2,
        }
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn direction(d: Direction) -> QftDirection {
    match d {
        Direction::Forward => QftDirection::Forward,
        Direction::Inverse => QftDirection::Inverse,
    }
}

pub fn figure(id: &str) -> Result<FigureId, CliError> {
    id.parse::<FigureId>().map_err(|e| CliError::Invalid(e.to_string()))
}

/// The bundled figure drawn for this `(a, N, strategy)` triple, if any.
pub fn matching_figure(a: u64, n: u64, strategy: Strategy) -> Option<FigureId> {
    FigureId::ALL.into_iter().find(|f| {
        let info = f.info();
        info.a == a && info.n == n && info.strategy == strategy.as_str()
    })
}

/// Default input width: `ceil(log2 r)`, plus one when `r` is not a power of
/// two so that the wrap-around of the period is visible.
pub fn default_input_bits(r: u64) -> u32 {
    (ceil_log2(r) + u32::from(!r.is_power_of_two())).max(1)
}

pub struct BuiltTable {
    pub g: GDescriptor,
    pub table: TruthTable,
    pub figure: Option<FigureId>,
}

pub fn table_for(spec: &TableSpec) -> Result<BuiltTable, CliError> {
    let (a, n) = (spec.a, spec.n);
    let r = multiplicative_order(a, n)?;
    let figure = matching_figure(a, n, spec.strategy);
    if spec.strategy == Strategy::Full {
        if spec.n_in.is_some() {
            return Err(CliError::Invalid("--n-in does not apply to --compile full".into()));
        }
        let f = full_compile(a, n)?;
        return Ok(BuiltTable { g: f.g, table: f.table, figure });
    }
    if let (Some(fig), None) = (figure, spec.n_in) {
        let table = fig.definition_table();
        let g = classical_compile(&build_modexp_table(a, n, table.n_in())?, a, n, gkind(spec.strategy))?.g;
        return Ok(BuiltTable { g, table, figure });
    }
    let n_in = spec.n_in.unwrap_or_else(|| default_input_bits(r));
    let raw = build_modexp_table(a, n, n_in)?;
    let compiled = classical_compile(&raw, a, n, gkind(spec.strategy))?;
    let figure = figure.filter(|f| f.definition_table() == compiled.table);
    Ok(BuiltTable { g: compiled.g, table: compiled.table, figure })
}

fn gkind(s: Strategy) -> GKind {
    match s {
        Strategy::None | Strategy::Full => GKind::None,
        Strategy::Log => GKind::Log,
        Strategy::Affine => GKind::Affine,
        Strategy::Rank => GKind::Rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_widths_match_figures() {
        assert_eq!(default_input_bits(4), 2);
        assert_eq!(default_input_bits(2), 1);
        assert_eq!(default_input_bits(3), 3);
        assert_eq!(default_input_bits(5), 4);
    }

    #[test]
    fn figure_lookup() {
        assert_eq!(matching_figure(4, 21, Strategy::Log), Some(FigureId::F4_21Partial));
        assert_eq!(matching_figure(4, 33, Strategy::Affine), None);
    }
}
