//! Hand-built circuits for the eight reference functions.
//!
//! Gate lists are transcribed top line first. Two drawings do not compute
//! their tables as drawn; the stored circuits use the same gates in a
//! corrected order and the literal drawings stay available through
//! [`FigureId::as_drawn`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Control, Gate};
use crate::modexp_tables::{
    build_modexp_table, classical_compile, full_compile, printed_f4_33, GKind, TruthTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FigureId {
    /// `2^x mod 15`, 2 inputs, 4 outputs.
    F2_15,
    /// Fully compiled `2^x mod 15`.
    F2_15Full,
    /// `4^x mod 15`, 1 input, 3 outputs.
    F4_15,
    /// Fully compiled `4^x mod 15`.
    F4_15Full,
    /// `4^x mod 21`, 3 inputs, 5 outputs.
    F4_21,
    /// `log_4(4^x mod 21)`, 3 inputs, 2 outputs.
    F4_21Partial,
    /// Fully compiled `4^x mod 21`.
    F4_21Full,
    /// Fully compiled `(4^x mod 33 - 1) / 3`.
    F4_33Full,
}

/// Static facts about a reference circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FigureInfo {
    pub id: &'static str,
    pub a: u64,
    pub n: u64,
    pub strategy: &'static str,
    pub caption_toffoli: u64,
    pub caption_cnot: u64,
}

impl FigureInfo {
    pub fn reference_cost(&self) -> u64 {
        6 * self.caption_toffoli + self.caption_cnot
    }
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        Self::F2_15,
        Self::F2_15Full,
        Self::F4_15,
        Self::F4_15Full,
        Self::F4_21,
        Self::F4_21Partial,
        Self::F4_21Full,
        Self::F4_33Full,
    ];

    pub fn info(self) -> FigureInfo {
        let (id, a, n, strategy, caption_toffoli, caption_cnot) = match self {
            Self::F2_15 => ("f2_15", 2, 15, "none", 1, 7),
            Self::F2_15Full => ("f2_15_full", 2, 15, "full", 0, 2),
            Self::F4_15 => ("f4_15", 4, 15, "none", 0, 2),
            Self::F4_15Full => ("f4_15_full", 4, 15, "full", 0, 1),
            Self::F4_21 => ("f4_21", 4, 21, "none", 2, 12),
            Self::F4_21Partial => ("f4_21_partial", 4, 21, "log", 2, 6),
            Self::F4_21Full => ("f4_21_full", 4, 21, "full", 1, 3),
            Self::F4_33Full => ("f4_33_full", 4, 33, "full", 3, 7),
        };
        FigureInfo { id, a, n, strategy, caption_toffoli, caption_cnot }
    }

    pub fn as_str(self) -> &'static str {
        self.info().id
    }

    /// The stored (verified) circuit.
    pub fn circuit(self) -> Circuit {
        match self {
            Self::F4_21Full => f4_21_full(false),
            Self::F4_33Full => f4_33_full(false),
            other => other.as_drawn(),
        }
    }

    /// The gate list exactly as drawn, including drawings that do not compute
    /// their table.
    pub fn as_drawn(self) -> Circuit {
        match self {
            Self::F2_15 => f2_15(),
            Self::F2_15Full => f2_15_full(),
            Self::F4_15 => f4_15(),
            Self::F4_15Full => f4_15_full(),
            Self::F4_21 => f4_21(),
            Self::F4_21Partial => f4_21_partial(),
            Self::F4_21Full => f4_21_full(true),
            Self::F4_33Full => f4_33_full(true),
        }
    }

    /// Whether the literal drawing differs from the stored circuit.
    pub fn has_drawing_erratum(self) -> bool {
        self.as_drawn() != self.circuit()
    }

    /// The table obtained from the function definition.
    pub fn definition_table(self) -> TruthTable {
        let info = self.info();
        let (a, n) = (info.a, info.n);
        let built = |n_in| build_modexp_table(a, n, n_in).expect("reference parameters are valid");
        match self {
            Self::F2_15 => built(2),
            Self::F4_15 => built(1).narrowed(),
            Self::F4_21 => built(3),
            Self::F4_21Partial => classical_compile(&built(3), a, n, GKind::Log)
                .expect("log compiles")
                .table,
            Self::F2_15Full | Self::F4_15Full | Self::F4_21Full | Self::F4_33Full => {
                full_compile(a, n).expect("reference parameters are valid").table
            }
        }
    }

    /// The table the stored circuit implements. This is the definition table
    /// except for `f4_33_full`, whose circuit computes the printed table.
    pub fn target_table(self) -> TruthTable {
        match self {
            Self::F4_33Full => printed_f4_33(),
            other => other.definition_table(),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| CircuitError::UnknownId(s.to_string()))
    }
}

fn p(line: usize) -> Control {
    Control::pos(line)
}

fn cx(c: usize, t: usize) -> Gate {
    Gate::cnot(p(c), t)
}

fn ccx(a: Control, b: Control, t: usize) -> Gate {
    Gate::toffoli(a, b, t)
}

fn build(width: usize, n_in: usize, gates: Vec<Gate>) -> Circuit {
    Circuit::new(width, (0..n_in).collect(), (n_in..width).collect(), gates)
        .expect("library circuits are well formed")
}

// x2 x1 | y4 y3 y2 y1
fn f2_15() -> Circuit {
    build(
        6,
        2,
        vec![
            ccx(p(0), p(1), 2),
            Gate::not(5),
            cx(0, 5),
            cx(1, 5),
            cx(2, 5),
            cx(2, 4),
            cx(2, 3),
            cx(1, 4),
            cx(0, 3),
        ],
    )
}

// x2 x1 | y2 y1
fn f2_15_full() -> Circuit {
    build(4, 2, vec![cx(0, 2), cx(1, 3)])
}

// x1 | y3 y2 y1
fn f4_15() -> Circuit {
    build(4, 1, vec![cx(0, 1), Gate::not(3), cx(0, 3)])
}

// x1 | y1
fn f4_15_full() -> Circuit {
    build(2, 1, vec![cx(0, 1)])
}

// x3 x2 x1 | y5 y4 y3 y2 y1
fn f4_21() -> Circuit {
    build(
        8,
        3,
        vec![
            cx(1, 5),
            cx(2, 5),
            cx(1, 7),
            cx(0, 7),
            ccx(p(5), p(7), 3),
            cx(0, 7),
            cx(1, 7),
            ccx(p(0), p(3), 7),
            cx(3, 5),
            cx(7, 5),
            cx(0, 5),
            Gate::not(7),
            cx(2, 7),
            cx(1, 7),
            cx(0, 7),
        ],
    )
}

// x3 x2 x1 | y2 y1
fn f4_21_partial() -> Circuit {
    build(
        5,
        3,
        vec![
            cx(1, 0),
            cx(1, 2),
            ccx(p(0), p(2), 3),
            cx(1, 0),
            ccx(Control::neg(0), p(3), 4),
            cx(2, 4),
            cx(0, 4),
            cx(1, 2),
        ],
    )
}

// x2 x1 | y2 y1. As drawn the x2 -> y2 copy comes first, which makes the
// Toffoli fire on the wrong row; moving it last gives the intended table.
fn f4_21_full(as_drawn: bool) -> Circuit {
    let copy = cx(0, 2);
    let body = [cx(1, 3), ccx(p(0), p(3), 2), cx(2, 3)];
    let gates = if as_drawn {
        std::iter::once(copy).chain(body).collect()
    } else {
        body.into_iter().chain(std::iter::once(copy)).collect()
    };
    build(4, 2, gates)
}

// x3 x2 x1 | y4 y3 y2 y1. As drawn, the x1 -> x3 restore sits before the
// y3 update; the stored order moves it after the x3 -> y4 copy.
fn f4_33_full(as_drawn: bool) -> Circuit {
    let g = [
        cx(2, 1),
        cx(2, 0),
        ccx(p(0), p(1), 3),
        cx(2, 0),
        cx(2, 1),
        ccx(p(1), p(3), 4),
        ccx(Control::neg(0), p(2), 6),
        cx(0, 3),
        cx(1, 4),
        cx(1, 6),
    ];
    let order: [usize; 10] = if as_drawn {
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
    } else {
        [0, 1, 2, 4, 5, 7, 3, 6, 8, 9]
    };
    build(7, 3, order.iter().map(|&i| g[i].clone()).collect())
}
