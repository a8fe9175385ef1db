//! Reversible circuits over NOT, CNOT and Toffoli gates.
//!
//! Lines are numbered from 0 at the top of a drawing. Which lines form the
//! input and output registers, and their bit significance, is carried by
//! [`Circuit::input_lines`] and [`Circuit::output_lines`] (most significant
//! first, so the last entry is `x1`/`y1`).

mod library;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modexp_tables::TruthTable;

pub use library::{FigureId, FigureInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("{kind:?} gate needs {expected} controls, got {got}")]
    ControlCount { kind: GateKind, expected: usize, got: usize },
    #[error("gate target {0} is also a control")]
    TargetIsControl(usize),
    #[error("gate uses line {0} twice as a control")]
    RepeatedControl(usize),
    #[error("line {line} is outside a circuit of width {width}")]
    LineOutOfRange { line: usize, width: usize },
    #[error("line {0} appears more than once in the registers")]
    RegisterOverlap(usize),
    #[error("circuit registers are {circuit_in}-in/{circuit_out}-out, table is {table_in}-in/{table_out}-out")]
    WidthMismatch { circuit_in: usize, circuit_out: usize, table_in: u32, table_out: u32 },
    #[error("width {width} exceeds the limit of {limit} lines")]
    TooWide { width: usize, limit: usize },
    #[error("unknown circuit id `{0}`")]
    UnknownId(String),
    #[error("invalid circuit JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

/// Widest circuit that [`Circuit::to_permutation`] will expand.
pub const MAX_PERMUTATION_WIDTH: usize = 20;
/// Widest circuit overall; line values are packed into a `u64`.
pub const MAX_WIDTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "RawControl", into = "RawControl")]
pub struct Control {
    pub line: usize,
    pub polarity: Polarity,
}

#[derive(Serialize, Deserialize)]
struct RawControl {
    line: usize,
    #[serde(default)]
    neg: bool,
}

impl From<RawControl> for Control {
    fn from(raw: RawControl) -> Self {
        let polarity = if raw.neg { Polarity::Negative } else { Polarity::Positive };
        Self { line: raw.line, polarity }
    }
}

impl From<Control> for RawControl {
    fn from(c: Control) -> Self {
        Self { line: c.line, neg: c.polarity == Polarity::Negative }
    }
}

impl Control {
    pub fn pos(line: usize) -> Self {
        Self { line, polarity: Polarity::Positive }
    }

    pub fn neg(line: usize) -> Self {
        Self { line, polarity: Polarity::Negative }
    }

    pub fn is_negative(&self) -> bool {
        self.polarity == Polarity::Negative
    }

    /// True when the packed line state activates this control.
    pub fn active(&self, state: u64) -> bool {
        let bit = (state >> self.line) & 1 == 1;
        bit != self.is_negative()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl GateKind {
    pub fn control_count(self) -> usize {
        match self {
            Self::Not => 0,
            Self::Cnot => 1,
            Self::Toffoli => 2,
        }
    }

    /// Quantum-cost weight: Toffoli 6, CNOT 1, NOT 1.
    pub fn weight(self) -> u64 {
        match self {
            Self::Not | Self::Cnot => 1,
            Self::Toffoli => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGate", into = "RawGate")]
pub struct Gate {
    kind: GateKind,
    controls: Vec<Control>,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGate {
    kind: GateKind,
    #[serde(default)]
    controls: Vec<Control>,
    target: usize,
}

impl TryFrom<RawGate> for Gate {
    type Error = CircuitError;
    fn try_from(raw: RawGate) -> Result<Self> {
        Gate::new(raw.kind, raw.controls, raw.target)
    }
}

impl From<Gate> for RawGate {
    fn from(g: Gate) -> Self {
        Self { kind: g.kind, controls: g.controls, target: g.target }
    }
}

impl Gate {
    pub fn new(kind: GateKind, controls: Vec<Control>, target: usize) -> Result<Self> {
        if controls.len() != kind.control_count() {
            return Err(CircuitError::ControlCount {
                kind,
                expected: kind.control_count(),
                got: controls.len(),
            });
        }
        if controls.iter().any(|c| c.line == target) {
            return Err(CircuitError::TargetIsControl(target));
        }
        if let [a, b] = controls.as_slice() {
            if a.line == b.line {
                return Err(CircuitError::RepeatedControl(a.line));
            }
        }
        Ok(Self { kind, controls, target })
    }

    pub fn not(target: usize) -> Self {
        Self { kind: GateKind::Not, controls: Vec::new(), target }
    }

    /// Panics if `control.line == target`.
    pub fn cnot(control: Control, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control], target).expect("valid cnot")
    }

    /// Panics on repeated or overlapping lines.
    pub fn toffoli(c1: Control, c2: Control, target: usize) -> Self {
        Self::new(GateKind::Toffoli, vec![c1, c2], target).expect("valid toffoli")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn lines(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|c| c.line).chain(std::iter::once(self.target))
    }

    /// Applies the gate to a packed line state (bit `i` = line `i`).
    pub fn apply(&self, state: u64) -> u64 {
        if self.controls.iter().all(|c| c.active(state)) {
            state ^ (1 << self.target)
        } else {
            state
        }
    }
}

/// Flips `bits[gate.target]` iff every control matches its polarity.
pub fn apply_gate(bits: &[bool], gate: &Gate) -> Vec<bool> {
    let mut out = bits.to_vec();
    let fire = gate.controls.iter().all(|c| bits[c.line] != c.is_negative());
    if fire {
        out[gate.target] = !out[gate.target];
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostReport {
    pub n_toffoli: u64,
    pub n_cnot: u64,
    pub n_not: u64,
    /// `6 * n_toffoli + n_cnot`; NOT gates are free, as in the figure captions.
    pub quantum_cost: u64,
    /// `quantum_cost + n_not`.
    pub total_cost: u64,
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N_T={} N_CN={} qcost={}",
            self.n_toffoli, self.n_cnot, self.quantum_cost
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub y: u64,
    pub input_after: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub x: u64,
    pub expected_y: u64,
    pub actual_y: u64,
    pub input_after: u64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={}: expected y={}, got y={}, input_after={}",
            self.x, self.expected_y, self.actual_y, self.input_after
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit", into = "RawCircuit")]
pub struct Circuit {
    width: usize,
    input_lines: Vec<usize>,
    output_lines: Vec<usize>,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct RawCircuit {
    width: usize,
    input_lines: Vec<usize>,
    output_lines: Vec<usize>,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = CircuitError;
    fn try_from(raw: RawCircuit) -> Result<Self> {
        Circuit::new(raw.width, raw.input_lines, raw.output_lines, raw.gates)
    }
}

impl From<Circuit> for RawCircuit {
    fn from(c: Circuit) -> Self {
        Self {
            width: c.width,
            input_lines: c.input_lines,
            output_lines: c.output_lines,
            gates: c.gates,
        }
    }
}

impl Circuit {
    pub fn new(
        width: usize,
        input_lines: Vec<usize>,
        output_lines: Vec<usize>,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(CircuitError::TooWide { width, limit: MAX_WIDTH });
        }
        let mut seen = BTreeSet::new();
        for &line in input_lines.iter().chain(&output_lines) {
            if line >= width {
                return Err(CircuitError::LineOutOfRange { line, width });
            }
            if !seen.insert(line) {
                return Err(CircuitError::RegisterOverlap(line));
            }
        }
        let mut circuit = Self { width, input_lines, output_lines, gates: Vec::new() };
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }

    /// Circuit whose inputs occupy lines `0..n_in` and outputs `n_in..n_in+n_out`,
    /// each listed most significant first.
    pub fn with_registers(n_in: usize, n_out: usize) -> Result<Self> {
        Self::new(n_in + n_out, (0..n_in).collect(), (n_in..n_in + n_out).collect(), Vec::new())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(line) = gate.lines().find(|&l| l >= self.width) {
            return Err(CircuitError::LineOutOfRange { line, width: self.width });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input_lines(&self) -> &[usize] {
        &self.input_lines
    }

    pub fn output_lines(&self) -> &[usize] {
        &self.output_lines
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Line holding input bit `j` (0 = `x1`).
    pub fn input_line(&self, j: usize) -> usize {
        self.input_lines[self.input_lines.len() - 1 - j]
    }

    /// Line holding output bit `j` (0 = `y1`).
    pub fn output_line(&self, j: usize) -> usize {
        self.output_lines[self.output_lines.len() - 1 - j]
    }

    fn pack(lines: &[usize], value: u64) -> u64 {
        lines
            .iter()
            .rev()
            .enumerate()
            .fold(0, |s, (j, &line)| s | (((value >> j) & 1) << line))
    }

    fn unpack(lines: &[usize], state: u64) -> u64 {
        lines
            .iter()
            .rev()
            .enumerate()
            .fold(0, |v, (j, &line)| v | (((state >> line) & 1) << j))
    }

    /// Packed line state with `x` on the input lines and zeros elsewhere.
    pub fn load_input(&self, x: u64) -> u64 {
        Self::pack(&self.input_lines, x)
    }

    pub fn run(&self, state: u64) -> u64 {
        self.gates.iter().fold(state, |s, g| g.apply(s))
    }

    pub fn evaluate(&self, x: u64) -> Evaluation {
        let end = self.run(self.load_input(x));
        Evaluation {
            y: Self::unpack(&self.output_lines, end),
            input_after: Self::unpack(&self.input_lines, end),
        }
    }

    /// Every input where the circuit disagrees with `table` or fails to restore
    /// the input register.
    pub fn verify(&self, table: &TruthTable) -> Result<Vec<Mismatch>> {
        if self.input_lines.len() != table.n_in() as usize
            || self.output_lines.len() != table.n_out() as usize
        {
            return Err(CircuitError::WidthMismatch {
                circuit_in: self.input_lines.len(),
                circuit_out: self.output_lines.len(),
                table_in: table.n_in(),
                table_out: table.n_out(),
            });
        }
        Ok(table
            .rows()
            .iter()
            .enumerate()
            .filter_map(|(x, &expected_y)| {
                let x = x as u64;
                let e = self.evaluate(x);
                (e.y != expected_y || e.input_after != x).then_some(Mismatch {
                    x,
                    expected_y,
                    actual_y: e.y,
                    input_after: e.input_after,
                })
            })
            .collect())
    }

    pub fn cost(&self) -> CostReport {
        let count = |k| self.gates.iter().filter(|g| g.kind == k).count() as u64;
        let (n_toffoli, n_cnot, n_not) =
            (count(GateKind::Toffoli), count(GateKind::Cnot), count(GateKind::Not));
        let quantum_cost = GateKind::Toffoli.weight() * n_toffoli + n_cnot;
        CostReport { n_toffoli, n_cnot, n_not, quantum_cost, total_cost: quantum_cost + n_not }
    }

    /// Same registers, gates in reverse order (the inverse circuit).
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.gates.reverse();
        c
    }

    /// `perm[s]` is the final basis state when every line is loaded from `s`
    /// (bit `i` of `s` = line `i`).
    pub fn to_permutation(&self) -> Result<Vec<usize>> {
        if self.width > MAX_PERMUTATION_WIDTH {
            return Err(CircuitError::TooWide { width: self.width, limit: MAX_PERMUTATION_WIDTH });
        }
        Ok((0..1u64 << self.width).map(|s| self.run(s) as usize).collect())
    }

    fn label(&self, line: usize) -> String {
        if let Some(i) = self.input_lines.iter().position(|&l| l == line) {
            format!("x{}", self.input_lines.len() - i)
        } else if let Some(i) = self.output_lines.iter().position(|&l| l == line) {
            format!("y{}", self.output_lines.len() - i)
        } else {
            format!("l{line}")
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| CircuitError::Json(e.to_string()))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |lines: &[usize]| {
            lines
                .iter()
                .map(|&l| format!("{}@{}", self.label(l), l))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "width {}", self.width)?;
        writeln!(f, "inputs  {}", names(&self.input_lines))?;
        writeln!(f, "outputs {}", names(&self.output_lines))?;
        for (i, g) in self.gates.iter().enumerate() {
            let ctrls: Vec<String> = g
                .controls
                .iter()
                .map(|c| format!("{}{}", if c.is_negative() { "!" } else { "" }, self.label(c.line)))
                .collect();
            let kind = match g.kind {
                GateKind::Not => "not",
                GateKind::Cnot => "cnot",
                GateKind::Toffoli => "toffoli",
            };
            if ctrls.is_empty() {
                writeln!(f, "{:>3} {kind} {}", i + 1, self.label(g.target))?;
            } else {
                writeln!(f, "{:>3} {kind} {} -> {}", i + 1, ctrls.join(", "), self.label(g.target))?;
            }
        }
        Ok(())
    }
}
