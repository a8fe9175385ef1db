//! Greedy Toffoli repair of the bits the affine stage gets wrong.
//!
//! Every line's current value is tracked as a truth mask over all inputs
//! (bit `x` of the mask is the line's value on input `x`). A repair step
//! XORs the AND of one or more literals into an output line. Literals are
//! existing line values or affine combinations of inputs, the latter
//! computed in place on an input line and undone after the gate.

use serde::{Deserialize, Serialize};

use super::linear::AffineForm;
use super::mcx::{emit_mcx, mcx_toffoli_count};
use super::{full_mask, var_mask, Layout, Result, SynthError};
use crate::circuit::{Control, Gate};

/// One control of a repair step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Literal {
    /// The current value of a line.
    Line { line: usize, neg: bool },
    /// XOR of input bits. With a host, the XOR is built on that input line
    /// for the duration of the gate; without one, each bit is CNOT-ed
    /// straight into the target.
    Form { vars: u32, neg: bool, host: Option<usize> },
}

impl Literal {
    fn neg(&self) -> bool {
        match self {
            Self::Line { neg, .. } | Self::Form { neg, .. } => *neg,
        }
    }
}

/// Position of a Toffoli inside a cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeTag {
    pub cascade: usize,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairStep {
    pub target: usize,
    pub literals: Vec<Literal>,
    /// Inputs whose target bit this step flips, ascending.
    pub flips: Vec<u64>,
    pub cost: u64,
    pub cascade: Option<CascadeTag>,
}

impl RepairStep {
    pub fn is_toffoli(&self) -> bool {
        self.literals.len() == 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CascadePlan {
    pub n_in: u32,
    pub steps: Vec<RepairStep>,
    /// Step indices of each cascade, first level first.
    pub cascades: Vec<Vec<usize>>,
}

impl CascadePlan {
    /// Flip-set sizes of each cascade.
    pub fn cascade_flip_sizes(&self) -> Vec<Vec<usize>> {
        self.cascades
            .iter()
            .map(|c| c.iter().map(|&i| self.steps[i].flips.len()).collect())
            .collect()
    }
}

/// Whether the linear copies are emitted before or after the repair steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageOrder {
    LinearFirst,
    RepairFirst,
}

#[derive(Debug, Clone, Copy)]
struct Source {
    lit: Literal,
    mask: u64,
}

#[derive(Debug, Clone)]
struct Candidate {
    target: usize,
    literals: Vec<Literal>,
    flips: u64,
    gain: i64,
    cost: u64,
    negs: usize,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (-self.gain, self.cost, self.negs) < (-other.gain, other.cost, other.negs)
    }
}

/// Mutable synthesis state for one configuration.
pub(crate) struct Planner {
    layout: Layout,
    full: u64,
    cur: Vec<u64>,
    goal: Vec<u64>,
    pending: Vec<u64>,
    forms: Vec<u32>,
    pub(crate) gates: Vec<Gate>,
    pub(crate) steps: Vec<RepairStep>,
}

impl Planner {
    pub(crate) fn new(layout: Layout, targets: &[u64]) -> Self {
        let n = layout.n_in as u32;
        let width = layout.width();
        let mut cur = vec![0u64; width];
        let mut goal = vec![0u64; width];
        for i in 0..layout.n_in {
            cur[layout.input_line(i)] = var_mask(i as u32, n);
            goal[layout.input_line(i)] = var_mask(i as u32, n);
        }
        for (j, &t) in targets.iter().enumerate() {
            goal[layout.output_line(j)] = t;
        }
        let forms = (0..1u32 << n).filter(|v| v.count_ones() >= 2).collect();
        Self {
            layout,
            full: full_mask(n),
            cur,
            goal,
            pending: vec![0; width],
            forms,
            gates: Vec::new(),
            steps: Vec::new(),
        }
    }

    fn form_mask(&self, vars: u32) -> u64 {
        (0..self.layout.n_in as u32)
            .filter(|i| (vars >> i) & 1 == 1)
            .fold(0, |m, i| m ^ var_mask(i, self.layout.n_in as u32))
    }

    /// Records affine forms to be copied into the outputs later.
    pub(crate) fn defer_linear(&mut self, forms: &[AffineForm]) {
        for (j, f) in forms.iter().enumerate() {
            let line = self.layout.output_line(j);
            self.pending[line] = self.affine_mask(f);
        }
    }

    fn affine_mask(&self, f: &AffineForm) -> u64 {
        let m = self.form_mask(f.vars);
        if f.constant {
            m ^ self.full
        } else {
            m
        }
    }

    /// Emits CNOT/NOT copies of the affine forms into the outputs.
    pub(crate) fn emit_linear(&mut self, forms: &[AffineForm]) {
        for (j, f) in forms.iter().enumerate() {
            let t = self.layout.output_line(j);
            for i in f.var_indices().collect::<Vec<_>>().into_iter().rev() {
                self.gates.push(Gate::cnot(Control::pos(self.layout.input_line(i)), t));
            }
            if f.constant {
                self.gates.push(Gate::not(t));
            }
            self.cur[t] ^= self.affine_mask(f);
            self.pending[t] = 0;
        }
    }

    fn residual(&self, line: usize) -> u64 {
        self.goal[line] ^ self.cur[line] ^ self.pending[line]
    }

    pub(crate) fn remaining(&self) -> usize {
        (0..self.layout.n_out)
            .map(|j| self.residual(self.layout.output_line(j)).count_ones() as usize)
            .sum()
    }

    fn sources(&self, target: usize) -> Vec<Source> {
        let mut out = Vec::new();
        for line in 0..self.layout.width() {
            let m = self.cur[line];
            if line == target || m == 0 || m == self.full {
                continue;
            }
            for neg in [false, true] {
                out.push(Source { lit: Literal::Line { line, neg }, mask: if neg { !m & self.full } else { m } });
            }
        }
        for &vars in &self.forms {
            let m = self.form_mask(vars);
            for neg in [false, true] {
                out.push(Source {
                    lit: Literal::Form { vars, neg, host: None },
                    mask: if neg { !m & self.full } else { m },
                });
            }
        }
        out
    }

    fn form_cost(vars: u32) -> u64 {
        2 * (vars.count_ones() as u64 - 1)
    }

    /// Picks input lines on which to build the form literals of a Toffoli,
    /// returning the literals in build order.
    fn assign_hosts(&self, a: Literal, b: Literal) -> Option<Vec<Literal>> {
        let host_bit = |line: usize| self.layout.input_bit(line);
        let line_of = |lit: &Literal| match lit {
            Literal::Line { line, .. } => Some(*line),
            Literal::Form { .. } => None,
        };
        let vars_of = |lit: &Literal| match lit {
            Literal::Form { vars, .. } => Some(*vars),
            Literal::Line { .. } => None,
        };
        let with_host = |lit: Literal, host: usize| match lit {
            Literal::Form { vars, neg, .. } => Literal::Form { vars, neg, host: Some(host) },
            other => other,
        };
        let bits_of = |vars: u32| (0..self.layout.n_in).filter(move |i| (vars >> i) & 1 == 1);
        match (vars_of(&a), vars_of(&b)) {
            (None, None) => Some(vec![a, b]),
            (Some(va), None) | (None, Some(va)) => {
                let (form, other) = if vars_of(&a).is_some() { (a, b) } else { (b, a) };
                let blocked = line_of(&other).and_then(host_bit);
                let h = bits_of(va).find(|&i| Some(i) != blocked)?;
                Some(vec![with_host(form, self.layout.input_line(h)), other])
            }
            (Some(va), Some(vb)) => {
                for (first, second, vf, vs) in [(a, b, va, vb), (b, a, vb, va)] {
                    let h1 = bits_of(vf).find(|&i| (vs >> i) & 1 == 0);
                    if let Some(h1) = h1 {
                        if let Some(h2) = bits_of(vs).find(|&i| i != h1) {
                            return Some(vec![
                                with_host(first, self.layout.input_line(h1)),
                                with_host(second, self.layout.input_line(h2)),
                            ]);
                        }
                    }
                }
                None
            }
        }
    }

    fn consider(best: &mut Option<Candidate>, cand: Candidate) {
        if cand.gain > 0 && best.as_ref().is_none_or(|b| cand.better_than(b)) {
            *best = Some(cand);
        }
    }

    fn gain(flips: u64, residual: u64) -> i64 {
        (flips & residual).count_ones() as i64 - (flips & !residual).count_ones() as i64
    }

    /// Best candidate using at most two literals.
    fn best_small(&self) -> Option<Candidate> {
        let mut best: Option<Candidate> = None;
        for j in 0..self.layout.n_out {
            let target = self.layout.output_line(j);
            let r = self.residual(target);
            if r == 0 {
                continue;
            }
            let sources = self.sources(target);
            for s in &sources {
                let cost = match s.lit {
                    Literal::Line { .. } => 1,
                    Literal::Form { vars, .. } => vars.count_ones() as u64,
                };
                Self::consider(
                    &mut best,
                    Candidate {
                        target,
                        literals: vec![s.lit],
                        flips: s.mask,
                        gain: Self::gain(s.mask, r),
                        cost,
                        negs: s.lit.neg() as usize,
                    },
                );
            }
            for (ia, a) in sources.iter().enumerate() {
                for b in &sources[ia + 1..] {
                    let flips = a.mask & b.mask;
                    if flips == 0 || flips == a.mask || flips == b.mask {
                        continue;
                    }
                    let gain = Self::gain(flips, r);
                    if gain <= 0 {
                        continue;
                    }
                    let cost = 6 + [a.lit, b.lit]
                        .iter()
                        .map(|l| match l {
                            Literal::Form { vars, .. } => Self::form_cost(*vars),
                            Literal::Line { .. } => 0,
                        })
                        .sum::<u64>();
                    if best.as_ref().is_some_and(|bst| (-gain, cost) > (-bst.gain, bst.cost)) {
                        continue;
                    }
                    if let (Literal::Line { line: la, .. }, Literal::Line { line: lb, .. }) = (a.lit, b.lit) {
                        if la == lb {
                            continue;
                        }
                    }
                    let Some(literals) = self.assign_hosts(a.lit, b.lit) else { continue };
                    let negs = a.lit.neg() as usize + b.lit.neg() as usize;
                    Self::consider(&mut best, Candidate { target, literals, flips, gain, cost, negs });
                }
            }
        }
        best
    }

    /// Best product of three or more input literals.
    fn best_cube(&self) -> Option<Candidate> {
        let n = self.layout.n_in;
        let width = self.layout.width();
        let mut best: Option<Candidate> = None;
        for j in 0..self.layout.n_out {
            let target = self.layout.output_line(j);
            let r = self.residual(target);
            if r == 0 {
                continue;
            }
            for support in 1u32..1 << n {
                let k = support.count_ones() as usize;
                if k < 3 || width < k + 2 {
                    continue;
                }
                for negs in 0u32..1 << n {
                    if negs & !support != 0 {
                        continue;
                    }
                    let mut flips = self.full;
                    let mut literals = Vec::new();
                    for i in (0..n).rev().filter(|i| (support >> i) & 1 == 1) {
                        let neg = (negs >> i) & 1 == 1;
                        let m = var_mask(i as u32, n as u32);
                        flips &= if neg { !m } else { m };
                        literals.push(Literal::Line { line: self.layout.input_line(i), neg });
                    }
                    let cost = 6 * mcx_toffoli_count(k);
                    let gain = Self::gain(flips, r);
                    Self::consider(
                        &mut best,
                        Candidate { target, literals, flips, gain, cost, negs: negs.count_ones() as usize },
                    );
                }
            }
        }
        best
    }

    fn emit_step(&mut self, c: &Candidate) -> Result<()> {
        let t = c.target;
        match c.literals.as_slice() {
            [Literal::Line { line, neg }] => {
                let ctl = if *neg { Control::neg(*line) } else { Control::pos(*line) };
                self.gates.push(Gate::cnot(ctl, t));
            }
            [Literal::Form { vars, neg, .. }] => {
                for i in (0..self.layout.n_in).rev().filter(|i| (vars >> i) & 1 == 1) {
                    self.gates.push(Gate::cnot(Control::pos(self.layout.input_line(i)), t));
                }
                if *neg {
                    self.gates.push(Gate::not(t));
                }
            }
            [a, b] => {
                let mut build = Vec::new();
                let mut controls = Vec::new();
                for lit in [a, b] {
                    match *lit {
                        Literal::Line { line, neg } => {
                            controls.push(if neg { Control::neg(line) } else { Control::pos(line) })
                        }
                        Literal::Form { vars, neg, host } => {
                            let host = host.expect("toffoli forms have hosts");
                            let hb = self.layout.input_bit(host).expect("host is an input line");
                            for i in (0..self.layout.n_in).rev().filter(|&i| i != hb && (vars >> i) & 1 == 1) {
                                build.push(Gate::cnot(Control::pos(self.layout.input_line(i)), host));
                            }
                            controls.push(if neg { Control::neg(host) } else { Control::pos(host) });
                        }
                    }
                }
                self.gates.extend(build.iter().cloned());
                self.gates.push(Gate::toffoli(controls[0], controls[1], t));
                self.gates.extend(build.into_iter().rev());
            }
            lits => {
                let controls: Vec<Control> = lits
                    .iter()
                    .map(|l| match *l {
                        Literal::Line { line, neg } => {
                            if neg {
                                Control::neg(line)
                            } else {
                                Control::pos(line)
                            }
                        }
                        Literal::Form { .. } => unreachable!("cubes use line literals"),
                    })
                    .collect();
                emit_mcx(&controls, t, self.layout.width(), &mut self.gates)
                    .ok_or(SynthError::NoPlan { remaining: self.remaining() })?;
            }
        }
        self.cur[t] ^= c.flips;
        self.steps.push(RepairStep {
            target: t,
            literals: c.literals.clone(),
            flips: (0..64).filter(|x| (c.flips >> x) & 1 == 1).collect(),
            cost: c.cost,
            cascade: None,
        });
        Ok(())
    }

    /// Runs greedy repair until every output matches (after pending copies).
    pub(crate) fn repair(&mut self) -> Result<()> {
        let limit = 4 * self.layout.n_out * (1 << self.layout.n_in) + 4;
        for _ in 0..limit {
            if self.remaining() == 0 {
                return Ok(());
            }
            let cand = self
                .best_small()
                .or_else(|| self.best_cube())
                .ok_or(SynthError::NoPlan { remaining: self.remaining() })?;
            self.emit_step(&cand)?;
        }
        Err(SynthError::NoPlan { remaining: self.remaining() })
    }

    /// Groups Toffoli steps into cascades: a step continues a cascade when
    /// one control is the line last written by that cascade's previous step
    /// and it flips half as many entries; otherwise a step flipping
    /// `2^(n-2)` entries starts a new cascade. Other Toffolis stay standalone.
    pub(crate) fn plan(mut self) -> (CascadePlan, Vec<Gate>) {
        let n = self.layout.n_in;
        let mut writer: Vec<Option<usize>> = vec![None; self.layout.width()];
        let mut cascades: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.steps.len() {
            let step = &self.steps[i];
            let size = step.flips.len();
            let mut tag = None;
            if step.is_toffoli() && n >= 2 {
                for lit in &step.literals {
                    if let Literal::Line { line, .. } = lit {
                        if let Some(prev) = writer[*line] {
                            if let Some(pt) = self.steps[prev].cascade {
                                let prev_size = self.steps[prev].flips.len();
                                let is_tail = cascades[pt.cascade].last() == Some(&prev);
                                if is_tail && prev_size >= 2 && size * 2 == prev_size {
                                    tag = Some(CascadeTag { cascade: pt.cascade, level: pt.level + 1 });
                                    break;
                                }
                            }
                        }
                    }
                }
                if tag.is_none() && size == 1 << (n - 2) {
                    tag = Some(CascadeTag { cascade: cascades.len(), level: 0 });
                    cascades.push(Vec::new());
                }
            }
            if let Some(t) = tag {
                cascades[t.cascade].push(i);
            }
            let target = step.target;
            self.steps[i].cascade = tag;
            writer[target] = Some(i);
        }
        let plan = CascadePlan { n_in: n as u32, steps: self.steps, cascades };
        (plan, self.gates)
    }
}
