//! Modular-exponentiation truth tables and the classical compilation layer.
//!
//! A [`TruthTable`] is a total map from `n_in`-bit inputs to `n_out`-bit
//! outputs. Bit 1 (the least significant bit) of a value is the bottom-most
//! `x1`/`y1` column when rendered.
//!
//! Classical compilation replaces each raw residue `y = a^x mod N` by a
//! smaller integer `g(y)`, shrinking the output register. Three remappings are
//! supported: integer logarithm base `a`, an affine map `(y - c) / d`, and a
//! rank map (flagged non-simple).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::{self, mod_pow, NumTheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error("table has {got} rows, expected 2^{n_in} = {expected}")]
    RowCount { n_in: u32, got: usize, expected: usize },
    #[error("row {x} value {y} does not fit in {n_out} output bits")]
    ValueTooWide { x: usize, y: u64, n_out: u32 },
    #[error("register width {0} is out of range")]
    WidthOutOfRange(u32),
    #[error("output {y} is not an exact power of {base}")]
    NotAPower { y: u64, base: u64 },
    #[error("no affine map (y - c) / d with d <= {max_d} fits the outputs")]
    NoAffineMap { max_d: u64 },
}

pub type Result<T> = std::result::Result<T, TableError>;

/// Largest input or output register this module will materialize.
pub const MAX_REGISTER_BITS: u32 = 20;

/// Number of bits needed to write `v` (at least one).
pub fn bits_for(v: u64) -> u32 {
    (64 - v.leading_zeros()).max(1)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Exact map from each `x` in `[0, 2^n_in)` to `rows[x]` in `[0, 2^n_out)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct TruthTable {
    n_in: u32,
    n_out: u32,
    rows: Vec<u64>,
}

#[derive(Deserialize)]
struct RawTable {
    n_in: u32,
    n_out: u32,
    rows: Vec<u64>,
}

impl TryFrom<RawTable> for TruthTable {
    type Error = TableError;
    fn try_from(raw: RawTable) -> Result<Self> {
        TruthTable::new(raw.n_in, raw.n_out, raw.rows)
    }
}

impl TruthTable {
    pub fn new(n_in: u32, n_out: u32, rows: Vec<u64>) -> Result<Self> {
        if n_in > MAX_REGISTER_BITS {
            return Err(TableError::WidthOutOfRange(n_in));
        }
        if n_out > MAX_REGISTER_BITS {
            return Err(TableError::WidthOutOfRange(n_out));
        }
        let expected = 1usize << n_in;
        if rows.len() != expected {
            return Err(TableError::RowCount { n_in, got: rows.len(), expected });
        }
        if let Some((x, &y)) = rows.iter().enumerate().find(|(_, &y)| y >> n_out != 0) {
            return Err(TableError::ValueTooWide { x, y, n_out });
        }
        Ok(Self { n_in, n_out, rows })
    }

    /// Builds a table from a function over the input domain; `n_out` is the
    /// width of the largest value produced.
    pub fn from_fn(n_in: u32, f: impl Fn(u64) -> u64) -> Result<Self> {
        if n_in > MAX_REGISTER_BITS {
            return Err(TableError::WidthOutOfRange(n_in));
        }
        let rows: Vec<u64> = (0..1u64 << n_in).map(f).collect();
        let n_out = bits_for(rows.iter().copied().max().unwrap_or(0));
        Self::new(n_in, n_out, rows)
    }

    pub fn n_in(&self) -> u32 {
        self.n_in
    }

    pub fn n_out(&self) -> u32 {
        self.n_out
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, x: u64) -> Option<u64> {
        self.rows.get(x as usize).copied()
    }

    /// Output bit `j` (0 = least significant) as a column over all inputs.
    pub fn output_bit(&self, j: u32) -> Vec<bool> {
        self.rows.iter().map(|&y| (y >> j) & 1 == 1).collect()
    }

    /// Same rows with the output register trimmed to the bits actually used.
    pub fn narrowed(&self) -> Self {
        let n_out = bits_for(self.rows.iter().copied().max().unwrap_or(0));
        Self { n_in: self.n_in, n_out, rows: self.rows.clone() }
    }

    /// Same rows with a wider (or equal) output register.
    pub fn with_output_width(&self, n_out: u32) -> Result<Self> {
        Self::new(self.n_in, n_out, self.rows.clone())
    }

    /// Renders aligned columns: `x_n .. x_1 | y_m .. y_1`, one row per input.
    pub fn render(&self) -> String {
        self.to_string()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head_in: Vec<String> = (1..=self.n_in).rev().map(|i| format!("x{i}")).collect();
        let head_out: Vec<String> = (1..=self.n_out).rev().map(|i| format!("y{i}")).collect();
        writeln!(f, "{} | {}", head_in.join(" "), head_out.join(" "))?;
        for (x, &y) in self.rows.iter().enumerate() {
            let xs: Vec<String> = head_in
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let bit = (x >> (self.n_in as usize - 1 - i)) & 1;
                    format!("{:>w$}", bit, w = h.len())
                })
                .collect();
            let ys: Vec<String> = head_out
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let bit = (y >> (self.n_out as usize - 1 - i)) & 1;
                    format!("{:>w$}", bit, w = h.len())
                })
                .collect();
            writeln!(f, "{} | {}", xs.join(" "), ys.join(" "))?;
        }
        Ok(())
    }
}

/// The remapping `g` applied to raw residues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GDescriptor {
    None,
    Log { base: u64 },
    Affine { c: u64, d: u64 },
    /// Maps the i-th smallest raw value to `i`; `values` is that sorted list.
    Rank { values: Vec<u64> },
}

/// Strategy selector for [`classical_compile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GKind {
    None,
    Log,
    Affine,
    Rank,
}

impl GDescriptor {
    pub fn kind(&self) -> GKind {
        match self {
            Self::None => GKind::None,
            Self::Log { .. } => GKind::Log,
            Self::Affine { .. } => GKind::Affine,
            Self::Rank { .. } => GKind::Rank,
        }
    }

    /// Rank maps are not simple closed-form functions of `y`.
    pub fn is_simple(&self) -> bool {
        !matches!(self, Self::Rank { .. })
    }

    /// `g(y)`, or `None` if `y` is outside the map's domain.
    pub fn apply(&self, y: u64) -> Option<u64> {
        match self {
            Self::None => Some(y),
            Self::Log { base } => exact_log(y, *base),
            Self::Affine { c, d } => (y >= *c && (y - c).is_multiple_of(*d)).then(|| (y - c) / d),
            Self::Rank { values } => values.binary_search(&y).ok().map(|i| i as u64),
        }
    }

    /// `g^{-1}(v)`.
    pub fn invert(&self, v: u64) -> Option<u64> {
        match self {
            Self::None => Some(v),
            Self::Log { base } => base.checked_pow(u32::try_from(v).ok()?),
            Self::Affine { c, d } => v.checked_mul(*d)?.checked_add(*c),
            Self::Rank { values } => values.get(v as usize).copied(),
        }
    }

    /// Human-readable form such as `g(y) = (y - 1) / 3`.
    pub fn describe(&self) -> String {
        match self {
            Self::None => "g(y) = y".into(),
            Self::Log { base } => format!("g(y) = log_{base}(y)"),
            Self::Affine { c, d } => format!("g(y) = (y - {c}) / {d}"),
            Self::Rank { .. } => "g(y) = rank(y) [non-simple]".into(),
        }
    }
}

fn exact_log(y: u64, base: u64) -> Option<u64> {
    if base < 2 || y == 0 {
        return None;
    }
    let (mut v, mut e) = (y, 0u64);
    while v % base == 0 {
        v /= base;
        e += 1;
    }
    (v == 1).then_some(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompileLevel {
    Uncompiled,
    Partial,
    Full,
}

/// A modular-exponentiation table together with the remapping that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledFunction {
    pub a: u64,
    pub n: u64,
    pub r: u64,
    pub g: GDescriptor,
    pub table: TruthTable,
    pub level: CompileLevel,
}

impl CompiledFunction {
    /// Reconstructs the raw residues `a^x mod N` from the table via `g^{-1}`.
    pub fn raw_residues(&self) -> Option<Vec<u64>> {
        self.table.rows().iter().map(|&v| self.g.invert(v)).collect()
    }
}

/// `x -> a^x mod N` over `[0, 2^n_in)`, with `ceil(log2 N)` output bits.
pub fn build_modexp_table(a: u64, n: u64, n_in: u32) -> Result<TruthTable> {
    numtheory::multiplicative_order(a, n)?;
    if n_in == 0 || n_in > MAX_REGISTER_BITS {
        return Err(TableError::WidthOutOfRange(n_in));
    }
    let rows = (0..1u64 << n_in).map(|x| mod_pow(a, x, n)).collect();
    TruthTable::new(n_in, ceil_log2(n), rows)
}

fn distinct_outputs(table: &TruthTable) -> Vec<u64> {
    let mut v = table.rows().to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Finds the affine map `(y - c) / d` with the smallest largest image,
/// then smallest `d`, over `d` in `1..=max_d`; `c` is the common residue
/// `y mod d`, which must lie in `0..d`.
pub fn best_affine(outputs: &[u64], max_d: u64) -> Option<(u64, u64)> {
    let min = *outputs.iter().min()?;
    let max = *outputs.iter().max()?;
    let mut best: Option<(u64, u64, u64)> = None;
    for d in 1..=max_d.max(1) {
        let c = min % d;
        if outputs.iter().any(|&y| y % d != c) {
            continue;
        }
        let top = (max - c) / d;
        if best.is_none_or(|(t, _, _)| top < t) {
            best = Some((top, d, c));
        }
    }
    best.map(|(_, d, c)| (c, d))
}

fn make_descriptor(kind: GKind, outputs: &[u64], a: u64, n: u64) -> Result<GDescriptor> {
    Ok(match kind {
        GKind::None => GDescriptor::None,
        GKind::Log => {
            if let Some(&y) = outputs.iter().find(|&&y| exact_log(y, a).is_none()) {
                return Err(TableError::NotAPower { y, base: a });
            }
            GDescriptor::Log { base: a }
        }
        GKind::Affine => {
            let (c, d) = best_affine(outputs, n).ok_or(TableError::NoAffineMap { max_d: n })?;
            GDescriptor::Affine { c, d }
        }
        GKind::Rank => GDescriptor::Rank { values: outputs.to_vec() },
    })
}

/// Applies `g` of the requested kind to every output of a table built by
/// [`build_modexp_table`] for the same `a`, `N`.
pub fn classical_compile(
    table: &TruthTable,
    a: u64,
    n: u64,
    strategy: GKind,
) -> Result<CompiledFunction> {
    let r = numtheory::multiplicative_order(a, n)?;
    let outputs = distinct_outputs(table);
    let g = make_descriptor(strategy, &outputs, a, n)?;
    let rows: Vec<u64> = table
        .rows()
        .iter()
        .map(|&y| g.apply(y).expect("descriptor validated against outputs"))
        .collect();
    let mapped = match strategy {
        GKind::None => TruthTable::new(table.n_in(), table.n_out(), rows)?,
        _ => TruthTable::from_fn(table.n_in(), |x| rows[x as usize])?,
    };
    let level = if strategy == GKind::None {
        CompileLevel::Uncompiled
    } else {
        CompileLevel::Partial
    };
    Ok(CompiledFunction { a, n, r, g, table: mapped, level })
}

/// One period of `g(a^x mod N)` on `ceil(log2 r)` input bits, wrapping `x`
/// modulo `r`. `g` is the first valid of Log, Affine, Rank.
pub fn full_compile(a: u64, n: u64) -> Result<CompiledFunction> {
    let r = numtheory::multiplicative_order(a, n)?;
    let period: Vec<u64> = (0..r).map(|x| mod_pow(a, x, n)).collect();
    let mut outputs = period.clone();
    outputs.sort_unstable();
    let g = [GKind::Log, GKind::Affine, GKind::Rank]
        .into_iter()
        .find_map(|k| make_descriptor(k, &outputs, a, n).ok())
        .expect("rank map always exists");
    full_compile_with(a, n, r, &period, g)
}

/// As [`full_compile`] but with an explicit remapping kind.
pub fn full_compile_as(a: u64, n: u64, kind: GKind) -> Result<CompiledFunction> {
    let r = numtheory::multiplicative_order(a, n)?;
    let period: Vec<u64> = (0..r).map(|x| mod_pow(a, x, n)).collect();
    let mut outputs = period.clone();
    outputs.sort_unstable();
    let g = make_descriptor(kind, &outputs, a, n)?;
    full_compile_with(a, n, r, &period, g)
}

fn full_compile_with(
    a: u64,
    n: u64,
    r: u64,
    period: &[u64],
    g: GDescriptor,
) -> Result<CompiledFunction> {
    let n_in = ceil_log2(r).max(1);
    let table = TruthTable::from_fn(n_in, |x| {
        g.apply(period[(x % r) as usize]).expect("descriptor validated")
    })?;
    Ok(CompiledFunction { a, n, r, g, table, level: CompileLevel::Full })
}

/// The fully compiled `4^x mod 33` table as printed alongside its circuit.
/// It differs from [`full_compile`]`(4, 33)` at `x = 3` (12 instead of 10).
pub fn printed_f4_33() -> TruthTable {
    TruthTable::new(3, 4, vec![0, 1, 5, 12, 8, 0, 1, 5]).expect("static table")
}

/// Smallest `r >= 1` with `rows[x] == rows[x + r]` wherever both exist; the
/// domain size if nothing shorter repeats.
pub fn period_of(table: &TruthTable) -> u64 {
    let rows = table.rows();
    let len = rows.len();
    (1..len)
        .find(|&r| (0..len - r).all(|x| rows[x] == rows[x + r]))
        .unwrap_or(len) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn modexp_examples() {
        let t = build_modexp_table(2, 15, 2).unwrap();
        assert_eq!(t.rows(), &[1, 2, 4, 8]);
        assert_eq!(t.n_out(), 4);
        let t = build_modexp_table(4, 21, 3).unwrap();
        assert_eq!(t.rows(), &[1, 4, 16, 1, 4, 16, 1, 4]);
        assert_eq!(t.n_out(), 5);
        let t = build_modexp_table(4, 15, 1).unwrap();
        assert_eq!(t.rows(), &[1, 4]);
        assert_eq!(t.narrowed().n_out(), 3);
        assert!(matches!(
            build_modexp_table(3, 21, 2),
            Err(TableError::NumTheory(NumTheoryError::NotCoprime { .. }))
        ));
    }

    #[test]
    fn classical_compile_examples() {
        let t = build_modexp_table(2, 15, 2).unwrap();
        let c = classical_compile(&t, 2, 15, GKind::Log).unwrap();
        assert_eq!(c.table.rows(), &[0, 1, 2, 3]);
        assert_eq!(c.table.n_out(), 2);

        let t = build_modexp_table(4, 33, 3).unwrap();
        let c = classical_compile(&t, 4, 33, GKind::Affine).unwrap();
        assert_eq!(c.g, GDescriptor::Affine { c: 1, d: 3 });
        assert_eq!(&c.table.rows()[..5], &[0, 1, 5, 10, 8]);
        assert_eq!(c.table.n_out(), 4);

        let t = build_modexp_table(4, 21, 3).unwrap();
        let c = classical_compile(&t, 4, 21, GKind::Log).unwrap();
        assert_eq!(c.table.rows(), &[0, 1, 2, 0, 1, 2, 0, 1]);
        assert_eq!(c.level, CompileLevel::Partial);
    }

    #[test]
    fn compile_errors() {
        let t = build_modexp_table(4, 33, 3).unwrap();
        assert_eq!(
            classical_compile(&t, 4, 33, GKind::Log),
            Err(TableError::NotAPower { y: 25, base: 4 })
        );
    }

    #[test]
    fn rank_is_flagged_non_simple() {
        let t = build_modexp_table(2, 21, 3).unwrap();
        let c = classical_compile(&t, 2, 21, GKind::Rank).unwrap();
        assert!(!c.g.is_simple());
        assert_eq!(c.table.rows(), &[0, 1, 2, 3, 5, 4, 0, 1]);
    }

    #[test]
    fn full_compile_examples() {
        let c = full_compile(4, 21).unwrap();
        assert_eq!((c.table.n_in(), c.table.n_out()), (2, 2));
        assert_eq!(c.table.rows(), &[0, 1, 2, 0]);
        let c = full_compile(4, 15).unwrap();
        assert_eq!((c.table.n_in(), c.table.n_out()), (1, 1));
        assert_eq!(c.table.rows(), &[0, 1]);
        let c = full_compile(2, 15).unwrap();
        assert_eq!(c.table.rows(), &[0, 1, 2, 3]);
        let c = full_compile(4, 33).unwrap();
        assert_eq!(c.g, GDescriptor::Affine { c: 1, d: 3 });
        assert_eq!(c.table.rows(), &[0, 1, 5, 10, 8, 0, 1, 5]);
    }

    #[test]
    fn period_examples() {
        assert_eq!(period_of(&build_modexp_table(4, 21, 3).unwrap()), 3);
        assert_eq!(period_of(&TruthTable::new(2, 2, vec![0, 1, 2, 3]).unwrap()), 4);
        assert_eq!(period_of(&TruthTable::new(2, 1, vec![1, 1, 1, 1]).unwrap()), 1);
    }

    #[test]
    fn render_layout() {
        let t = TruthTable::new(1, 3, vec![1, 4]).unwrap();
        assert_eq!(t.render(), "x1 | y3 y2 y1\n 0 |  0  0  1\n 1 |  1  0  0\n");
    }

    #[test]
    fn json_schema() {
        let t = TruthTable::new(1, 1, vec![0, 1]).unwrap();
        assert_eq!(t.to_json(), r#"{"n_in":1,"n_out":1,"rows":[0,1]}"#);
        let bad: std::result::Result<TruthTable, _> =
            serde_json::from_str(r#"{"n_in":1,"n_out":1,"rows":[0,2]}"#);
        assert!(bad.is_err());
    }

    fn coprime_pairs() -> impl Strategy<Value = (u64, u64)> {
        (3u64..80, 0u64..1000).prop_filter_map("coprime", |(n, s)| {
            let a = 2 + s % (n - 2);
            (numtheory::gcd(a, n).ok() == Some(1)).then_some((a, n))
        })
    }

    proptest! {
        #[test]
        fn period_matches_order((a, n) in coprime_pairs()) {
            let r = numtheory::multiplicative_order(a, n).unwrap();
            let n_in = ceil_log2(2 * r).max(1);
            let t = build_modexp_table(a, n, n_in).unwrap();
            prop_assert_eq!(period_of(&t), r);
        }

        #[test]
        fn g_round_trips_and_is_injective((a, n) in coprime_pairs(), kind in prop_oneof![
            Just(GKind::None), Just(GKind::Log), Just(GKind::Affine), Just(GKind::Rank)
        ]) {
            let t = build_modexp_table(a, n, 4).unwrap();
            if let Ok(c) = classical_compile(&t, a, n, kind) {
                prop_assert_eq!(c.raw_residues().unwrap(), t.rows().to_vec());
                for x in 0..t.rows().len() {
                    for z in 0..t.rows().len() {
                        prop_assert_eq!(
                            t.rows()[x] == t.rows()[z],
                            c.table.rows()[x] == c.table.rows()[z]
                        );
                    }
                }
            } else {
                prop_assert_eq!(kind, GKind::Log);
            }
        }
    }
}
