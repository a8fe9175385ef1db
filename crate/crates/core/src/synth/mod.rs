//! Truth table to reversible circuit.
//!
//! Each output bit first receives its best affine approximation through
//! CNOT copies of input bits. The entries that approximation gets wrong are
//! then flipped by Toffolis whose controls are input XORs or values already
//! on other lines, chosen greedily. Tied affine fits and both stage orders
//! are tried and the cheapest verified circuit is kept. If that fails or
//! exceeds the budget, an exhaustive search can take over.

mod cascade;
mod linear;
mod mcx;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Control, CostReport, Gate};
use crate::modexp_tables::TruthTable;

pub use cascade::{CascadePlan, CascadeTag, Literal, RepairStep, StageOrder};
pub use linear::{fit_linear, gf2_rank, AffineForm, BitFit, LinearFit, MAX_FIT_INPUTS};
pub use mcx::{emit_mcx, mcx_toffoli_count};
pub use search::{exhaustive, SearchStats};

/// Register limit for [`synthesize`].
pub const MAX_SYNTH_BITS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("table is {n_in}-in/{n_out}-out, above the supported size")]
    TooLarge { n_in: u32, n_out: u32 },
    #[error("greedy repair stalled with {remaining} wrong output bits")]
    NoPlan { remaining: usize },
    #[error(
        "budget exhausted: best greedy cost {}, search visited {nodes} nodes up to cost {explored_bound}",
        best_cost.map_or_else(|| "none".to_string(), |c| c.to_string())
    )]
    BudgetExhausted { best_cost: Option<u64>, nodes: u64, explored_bound: u64 },
    #[error("circuit fails verification on {0} inputs")]
    Verification(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub type Result<T> = std::result::Result<T, SynthError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisBudget {
    pub max_quantum_cost: u64,
    pub max_gates: usize,
    pub allow_negative_controls: bool,
    pub exhaustive_fallback: bool,
}

impl Default for SynthesisBudget {
    fn default() -> Self {
        Self {
            max_quantum_cost: 10_000,
            max_gates: 10_000,
            allow_negative_controls: true,
            exhaustive_fallback: true,
        }
    }
}

/// Cost cap for the exhaustive fallback.
pub const SEARCH_COST_CAP: u64 = 64;
/// Node cap for the exhaustive fallback.
pub const SEARCH_NODE_LIMIT: u64 = 2_000_000;

/// How a circuit was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Greedy,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub circuit: Circuit,
    pub cost: CostReport,
    pub route: Route,
    pub fit: LinearFit,
    /// Affine forms used (index 0 = `y1`); may be tied alternatives to `fit`.
    pub forms: Vec<AffineForm>,
    pub order: StageOrder,
    pub plan: CascadePlan,
}

/// Register layout of synthesized circuits: inputs on lines `0..n_in`
/// (`x1` last), outputs after them (`y1` last).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Layout {
    pub n_in: usize,
    pub n_out: usize,
}

impl Layout {
    pub fn width(&self) -> usize {
        self.n_in + self.n_out
    }

    pub fn input_line(&self, bit: usize) -> usize {
        self.n_in - 1 - bit
    }

    pub fn output_line(&self, bit: usize) -> usize {
        self.n_in + self.n_out - 1 - bit
    }

    pub fn input_bit(&self, line: usize) -> Option<usize> {
        (line < self.n_in).then(|| self.n_in - 1 - line)
    }
}

/// Truth mask of input bit `i` over all `2^n` inputs.
pub(crate) fn var_mask(i: u32, n: u32) -> u64 {
    (0..1u64 << n).filter(|x| (x >> i) & 1 == 1).fold(0, |m, x| m | (1 << x))
}

pub(crate) fn full_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

fn column_mask(table: &TruthTable, j: u32) -> u64 {
    table.output_bit(j).iter().enumerate().fold(0, |m, (x, &b)| m | ((b as u64) << x))
}

fn check_size(table: &TruthTable) -> Result<()> {
    if table.n_in() > MAX_SYNTH_BITS || table.n_out() > MAX_SYNTH_BITS {
        return Err(SynthError::TooLarge { n_in: table.n_in(), n_out: table.n_out() });
    }
    Ok(())
}

/// Greedy Toffoli plan for the entries `fit` gets wrong, with the affine
/// copies applied first.
pub fn plan_cascades(fit: &LinearFit, table: &TruthTable) -> Result<CascadePlan> {
    check_size(table)?;
    let layout = Layout { n_in: table.n_in() as usize, n_out: table.n_out() as usize };
    let (plan, _) = run_config(table, layout, &fit.forms(), StageOrder::LinearFirst)?;
    Ok(plan)
}

fn run_config(
    table: &TruthTable,
    layout: Layout,
    forms: &[AffineForm],
    order: StageOrder,
) -> Result<(CascadePlan, Vec<Gate>)> {
    let targets: Vec<u64> = (0..table.n_out()).map(|j| column_mask(table, j)).collect();
    let mut p = cascade::Planner::new(layout, &targets);
    match order {
        StageOrder::LinearFirst => {
            p.emit_linear(forms);
            p.repair()?;
        }
        StageOrder::RepairFirst => {
            p.defer_linear(forms);
            p.repair()?;
            p.emit_linear(forms);
        }
    }
    Ok(p.plan())
}

/// Rewrites negative controls as positive ones wrapped in NOT gates.
pub fn lower_negative_controls(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.width(), c.input_lines().to_vec(), c.output_lines().to_vec(), vec![])
        .expect("same registers");
    for g in c.gates() {
        let negs: Vec<usize> = g.controls().iter().filter(|k| k.is_negative()).map(|k| k.line).collect();
        let pos: Vec<Control> = g.controls().iter().map(|k| Control::pos(k.line)).collect();
        for &l in &negs {
            out.push(Gate::not(l)).expect("in range");
        }
        out.push(Gate::new(g.kind(), pos, g.target()).expect("same shape")).expect("in range");
        for &l in negs.iter().rev() {
            out.push(Gate::not(l)).expect("in range");
        }
    }
    out
}

fn commute(a: &Gate, b: &Gate) -> bool {
    !a.controls().iter().any(|c| c.line == b.target()) && !b.controls().iter().any(|c| c.line == a.target())
}

/// Removes pairs of identical gates separated only by gates they commute with.
pub fn cancel_pairs(gates: Vec<Gate>) -> Vec<Gate> {
    let mut gates = gates;
    loop {
        let mut removed = false;
        'outer: for i in 0..gates.len() {
            for j in i + 1..gates.len() {
                if gates[j] == gates[i] {
                    gates.remove(j);
                    gates.remove(i);
                    removed = true;
                    break 'outer;
                }
                if !commute(&gates[i], &gates[j]) {
                    break;
                }
            }
        }
        if !removed {
            return gates;
        }
    }
}

fn assemble(layout: Layout, gates: Vec<Gate>, allow_neg: bool) -> Result<Circuit> {
    let mut c = Circuit::with_registers(layout.n_in, layout.n_out)?;
    for g in gates {
        c.push(g)?;
    }
    if !allow_neg {
        c = lower_negative_controls(&c);
    }
    let gates = cancel_pairs(c.gates().to_vec());
    Ok(Circuit::new(c.width(), c.input_lines().to_vec(), c.output_lines().to_vec(), gates)?)
}

fn tie_combinations(fit: &LinearFit, per_bit: usize, limit: usize) -> Vec<Vec<AffineForm>> {
    let options: Vec<&[AffineForm]> =
        fit.bits.iter().map(|b| &b.ties[..b.ties.len().min(per_bit)]).collect();
    let mut combos = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::new();
        for c in &combos {
            for f in opts {
                let mut c2 = c.clone();
                c2.push(*f);
                next.push(c2);
                if next.len() >= limit {
                    break;
                }
            }
            if next.len() >= limit {
                break;
            }
        }
        combos = next;
    }
    combos
}

fn key(c: &Circuit) -> (u64, u64, usize) {
    let cost = c.cost();
    (cost.quantum_cost, cost.total_cost, c.gates().len())
}

/// Full synthesis with plan and provenance.
pub fn synthesize_report(table: &TruthTable, budget: &SynthesisBudget) -> Result<SynthesisReport> {
    check_size(table)?;
    let layout = Layout { n_in: table.n_in() as usize, n_out: table.n_out() as usize };
    let fit = fit_linear(table)?;
    let (per_bit, limit) = if table.n_in() <= 4 { (4, 256) } else { (2, 16) };

    let mut best: Option<SynthesisReport> = None;
    for forms in tie_combinations(&fit, per_bit, limit) {
        for order in [StageOrder::LinearFirst, StageOrder::RepairFirst] {
            let Ok((plan, gates)) = run_config(table, layout, &forms, order) else { continue };
            let circuit = assemble(layout, gates, budget.allow_negative_controls)?;
            if best.as_ref().is_some_and(|b| key(&circuit) >= key(&b.circuit)) {
                continue;
            }
            let mismatches = circuit.verify(table)?.len();
            if mismatches != 0 {
                return Err(SynthError::Verification(mismatches));
            }
            best = Some(SynthesisReport {
                cost: circuit.cost(),
                circuit,
                route: Route::Greedy,
                fit: fit.clone(),
                forms: forms.clone(),
                order,
                plan,
            });
        }
    }

    let within = |r: &SynthesisReport| {
        r.cost.quantum_cost <= budget.max_quantum_cost && r.circuit.gates().len() <= budget.max_gates
    };
    if let Some(r) = best.as_ref().filter(|r| within(r)) {
        return Ok(r.clone());
    }
    let best_cost = best.as_ref().map(|r| r.cost.quantum_cost);
    if !budget.exhaustive_fallback {
        return Err(SynthError::BudgetExhausted { best_cost, nodes: 0, explored_bound: 0 });
    }
    let cap = budget.max_quantum_cost.min(SEARCH_COST_CAP);
    let (found, stats) = exhaustive(table, cap, SEARCH_NODE_LIMIT, budget.allow_negative_controls);
    match found {
        Some(circuit) if circuit.gates().len() <= budget.max_gates => {
            let mismatches = circuit.verify(table)?.len();
            if mismatches != 0 {
                return Err(SynthError::Verification(mismatches));
            }
            Ok(SynthesisReport {
                cost: circuit.cost(),
                circuit,
                route: Route::Exhaustive,
                forms: fit.forms(),
                fit,
                order: StageOrder::LinearFirst,
                plan: CascadePlan { n_in: table.n_in(), ..Default::default() },
            })
        }
        _ => Err(SynthError::BudgetExhausted {
            best_cost,
            nodes: stats.nodes,
            explored_bound: stats.explored_bound,
        }),
    }
}

/// A verified circuit computing `table` on zero-initialized outputs and
/// restoring its inputs.
pub fn synthesize(table: &TruthTable, budget: &SynthesisBudget) -> Result<Circuit> {
    synthesize_report(table, budget).map(|r| r.circuit)
}

/// `quantum_cost(circuit) - quantum_cost(reference)`.
pub fn cost_delta(circuit: &Circuit, reference: &Circuit) -> i64 {
    circuit.cost().quantum_cost as i64 - reference.cost().quantum_cost as i64
}

/// [`cost_delta`] after checking both circuits against `table`.
pub fn compare_cost(circuit: &Circuit, reference: &Circuit, table: &TruthTable) -> Result<i64> {
    for c in [circuit, reference] {
        let m = c.verify(table)?.len();
        if m != 0 {
            return Err(SynthError::Verification(m));
        }
    }
    Ok(cost_delta(circuit, reference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::FigureId;
    use crate::modexp_tables::{build_modexp_table, full_compile};

    fn default_synth(t: &TruthTable) -> SynthesisReport {
        synthesize_report(t, &SynthesisBudget::default()).unwrap()
    }

    #[test]
    fn masks() {
        assert_eq!(var_mask(0, 2), 0b1010);
        assert_eq!(var_mask(1, 2), 0b1100);
        assert_eq!(full_mask(2), 0b1111);
        assert_eq!(full_mask(6), u64::MAX);
        assert_eq!(var_mask(5, 6), 0xFFFF_FFFF_0000_0000);
    }

    #[test]
    fn linear_tables_need_only_cnots() {
        let r = default_synth(&full_compile(4, 15).unwrap().table);
        assert_eq!((r.cost.n_cnot, r.cost.n_toffoli, r.cost.quantum_cost), (1, 0, 1));
        let r = default_synth(&full_compile(2, 15).unwrap().table);
        assert_eq!((r.cost.n_cnot, r.cost.n_toffoli), (2, 0));
    }

    #[test]
    fn partial_f4_21_within_twice_reference() {
        let r = default_synth(&FigureId::F4_21Partial.definition_table());
        assert!(r.cost.quantum_cost <= 36, "{:?}", r.cost);
        assert!(r.circuit.verify(&FigureId::F4_21Partial.definition_table()).unwrap().is_empty());
    }

    #[test]
    fn f4_21_plan_starts_with_derived_controls() {
        let t = build_modexp_table(4, 21, 3).unwrap();
        let fit = fit_linear(&t).unwrap();
        let plan = plan_cascades(&fit, &t).unwrap();
        let first = &plan.steps[0];
        assert_eq!(first.flips, vec![2, 5]);
        // y5 is line 3; controls are x3 ^ x2 and x2 ^ x1.
        assert_eq!(first.target, 3);
        let mut vars: Vec<u32> = first
            .literals
            .iter()
            .map(|l| match l {
                Literal::Form { vars, neg: false, .. } => *vars,
                other => panic!("unexpected literal {other:?}"),
            })
            .collect();
        vars.sort();
        assert_eq!(vars, vec![0b011, 0b110]);
        assert_eq!(plan.cascade_flip_sizes()[0], vec![2, 1]);
    }

    #[test]
    fn zero_mismatch_plan_is_empty() {
        let t = TruthTable::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let plan = plan_cascades(&fit_linear(&t).unwrap(), &t).unwrap();
        assert!(plan.steps.is_empty());
    }

    #[test]
    fn s3_matches_reference_cost() {
        let r = default_synth(&full_compile(4, 21).unwrap().table);
        assert_eq!(r.cost.quantum_cost, 9);
    }

    #[test]
    fn negative_controls_can_be_disallowed() {
        let t = FigureId::F4_21Partial.definition_table();
        let budget = SynthesisBudget { allow_negative_controls: false, ..Default::default() };
        let c = synthesize(&t, &budget).unwrap();
        assert!(c.gates().iter().all(|g| g.controls().iter().all(|k| !k.is_negative())));
        assert!(c.verify(&t).unwrap().is_empty());
    }

    #[test]
    fn tight_budget_without_fallback_fails() {
        let t = FigureId::F4_21.definition_table();
        let budget = SynthesisBudget { max_quantum_cost: 5, exhaustive_fallback: false, ..Default::default() };
        assert!(matches!(synthesize(&t, &budget), Err(SynthError::BudgetExhausted { .. })));
    }

    #[test]
    fn tight_budget_falls_back_to_search() {
        let t = TruthTable::new(2, 1, vec![0, 0, 0, 1]).unwrap();
        let budget = SynthesisBudget { max_quantum_cost: 6, ..Default::default() };
        let r = synthesize_report(&t, &budget).unwrap();
        assert!(r.cost.quantum_cost <= 6);
        assert!(r.circuit.verify(&t).unwrap().is_empty());
    }

    #[test]
    fn deterministic() {
        let t = FigureId::F4_33Full.definition_table();
        let a = synthesize(&t, &SynthesisBudget::default()).unwrap();
        let b = synthesize(&t, &SynthesisBudget::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cost_comparison() {
        let fig5 = FigureId::F4_21.circuit();
        let mut other = Circuit::with_registers(3, 5).unwrap();
        for _ in 0..8 {
            other.push(Gate::toffoli(Control::pos(0), Control::pos(1), 3)).unwrap();
        }
        for _ in 0..5 {
            other.push(Gate::cnot(Control::pos(0), 4)).unwrap();
        }
        assert_eq!(cost_delta(&fig5, &other), -29);
        let t = FigureId::F4_21.definition_table();
        assert_eq!(compare_cost(&fig5, &fig5, &t).unwrap(), 0);
        assert!(matches!(compare_cost(&fig5, &other, &t), Err(SynthError::Verification(_))));
    }

    #[test]
    fn cancel_pairs_respects_dependencies() {
        let a = Gate::cnot(Control::pos(0), 1);
        let b = Gate::cnot(Control::pos(1), 2);
        assert_eq!(cancel_pairs(vec![a.clone(), b.clone(), a.clone()]).len(), 3);
        let c = Gate::cnot(Control::pos(3), 2);
        assert!(cancel_pairs(vec![a.clone(), c, a]).len() == 1);
    }
}
