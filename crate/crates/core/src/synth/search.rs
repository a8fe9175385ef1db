//! Iterative-deepening search over gate sequences, ordered by cost.
//!
//! States are per-line truth masks, so one node stands for the circuit's
//! action on every input at once. The heuristic counts lines that still
//! differ from their goal; each gate changes one line, so it never
//! overestimates.

use super::{full_mask, var_mask, Layout};
use crate::circuit::{Circuit, Control, Gate, GateKind};
use crate::modexp_tables::TruthTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Largest cost bound fully explored.
    pub explored_bound: u64,
}

struct Ctx<'a> {
    gates: &'a [Gate],
    goal: &'a [u64],
    full: u64,
    nodes: u64,
    node_limit: u64,
    path: Vec<usize>,
}

fn weight(g: &Gate) -> u64 {
    match g.kind() {
        GateKind::Toffoli => 6,
        GateKind::Cnot | GateKind::Not => 1,
    }
}

fn fire_mask(g: &Gate, state: &[u64], full: u64) -> u64 {
    g.controls().iter().fold(full, |m, c| {
        let v = state[c.line];
        m & if c.is_negative() { !v & full } else { v }
    })
}

fn h(state: &[u64], goal: &[u64]) -> u64 {
    state.iter().zip(goal).filter(|(a, b)| a != b).count() as u64
}

enum Outcome {
    Found,
    Next(u64),
    Aborted,
}

fn dfs(ctx: &mut Ctx, state: &mut Vec<u64>, spent: u64, bound: u64) -> Outcome {
    let est = spent + h(state, ctx.goal);
    if est > bound {
        return Outcome::Next(est);
    }
    if est == spent {
        return Outcome::Found;
    }
    ctx.nodes += 1;
    if ctx.nodes > ctx.node_limit {
        return Outcome::Aborted;
    }
    let mut next = u64::MAX;
    for gi in 0..ctx.gates.len() {
        if ctx.path.last() == Some(&gi) {
            continue;
        }
        let g = &ctx.gates[gi];
        let fire = fire_mask(g, state, ctx.full);
        if fire == 0 {
            continue;
        }
        let t = g.target();
        state[t] ^= fire;
        ctx.path.push(gi);
        let r = dfs(ctx, state, spent + weight(g), bound);
        if let Outcome::Found = r {
            return Outcome::Found;
        }
        ctx.path.pop();
        state[t] ^= fire;
        match r {
            Outcome::Found | Outcome::Aborted => return r,
            Outcome::Next(b) => next = next.min(b),
        }
    }
    Outcome::Next(next)
}

fn gate_set(width: usize, allow_neg: bool) -> Vec<Gate> {
    let pols: &[bool] = if allow_neg { &[false, true] } else { &[false] };
    let ctl = |l: usize, neg: bool| if neg { Control::neg(l) } else { Control::pos(l) };
    let mut gates: Vec<Gate> = (0..width).map(Gate::not).collect();
    for t in 0..width {
        for c in (0..width).filter(|&c| c != t) {
            for &n in pols {
                gates.push(Gate::cnot(ctl(c, n), t));
            }
        }
    }
    for t in 0..width {
        for a in 0..width {
            for b in a + 1..width {
                if a == t || b == t {
                    continue;
                }
                for &na in pols {
                    for &nb in pols {
                        gates.push(Gate::toffoli(ctl(a, na), ctl(b, nb), t));
                    }
                }
            }
        }
    }
    gates
}

/// Searches for a circuit realizing `table` with total cost (Toffoli 6,
/// CNOT 1, NOT 1) at most `cap`, visiting at most `node_limit` nodes.
pub fn exhaustive(
    table: &TruthTable,
    cap: u64,
    node_limit: u64,
    allow_neg: bool,
) -> (Option<Circuit>, SearchStats) {
    let layout = Layout { n_in: table.n_in() as usize, n_out: table.n_out() as usize };
    let n = table.n_in();
    let width = layout.width();
    let full = full_mask(n);
    let mut state = vec![0u64; width];
    let mut goal = vec![0u64; width];
    for i in 0..layout.n_in {
        state[layout.input_line(i)] = var_mask(i as u32, n);
        goal[layout.input_line(i)] = var_mask(i as u32, n);
    }
    for j in 0..layout.n_out {
        goal[layout.output_line(j)] = table
            .output_bit(j as u32)
            .iter()
            .enumerate()
            .fold(0, |m, (x, &b)| m | ((b as u64) << x));
    }
    let gates = gate_set(width, allow_neg);
    let mut ctx = Ctx { gates: &gates, goal: &goal, full, nodes: 0, node_limit, path: Vec::new() };
    let mut bound = h(&state, &goal);
    let mut explored = 0;
    while bound <= cap {
        match dfs(&mut ctx, &mut state, 0, bound) {
            Outcome::Found => {
                let mut c = Circuit::with_registers(layout.n_in, layout.n_out).expect("valid layout");
                for &gi in &ctx.path {
                    c.push(gates[gi].clone()).expect("lines in range");
                }
                return (Some(c), SearchStats { nodes: ctx.nodes, explored_bound: bound });
            }
            Outcome::Aborted => break,
            Outcome::Next(b) => {
                explored = bound;
                bound = b;
            }
        }
    }
    (None, SearchStats { nodes: ctx.nodes, explored_bound: explored })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_single_cnot() {
        let t = TruthTable::new(1, 1, vec![0, 1]).unwrap();
        let (c, _) = exhaustive(&t, 8, 10_000, true);
        let c = c.unwrap();
        assert_eq!(c.gates().len(), 1);
        assert!(c.verify(&t).unwrap().is_empty());
    }

    #[test]
    fn finds_two_bit_identity() {
        let t = TruthTable::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let (c, _) = exhaustive(&t, 8, 100_000, true);
        let c = c.unwrap();
        assert_eq!(c.cost().quantum_cost, 2);
        assert!(c.verify(&t).unwrap().is_empty());
    }

    #[test]
    fn finds_single_toffoli() {
        let t = TruthTable::new(2, 1, vec![0, 0, 0, 1]).unwrap();
        let (c, _) = exhaustive(&t, 8, 1_000_000, true);
        let c = c.unwrap();
        assert_eq!(c.cost().n_toffoli, 1);
        assert!(c.verify(&t).unwrap().is_empty());
    }

    #[test]
    fn gives_up_within_node_limit() {
        let t = TruthTable::new(3, 3, vec![0, 1, 2, 3, 4, 5, 6, 0]).unwrap();
        let (c, stats) = exhaustive(&t, 64, 1_000, true);
        assert!(c.is_none());
        assert!(stats.nodes <= 1_001);
    }
}
