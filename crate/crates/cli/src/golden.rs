//! Bundled paper values and the `--diff-paper` comparison.

use num_complex::Complex;
use serde::Serialize;

use crate::report::num;

pub const ORDERS_21: &str = include_str!("../golden/orders_21.csv");
pub const ORDERS_33: &str = include_str!("../golden/orders_33.csv");
pub const ALLOWED_PERIODS: &str = include_str!("../golden/allowed_periods.csv");
pub const PROBABILITIES: &str = include_str!("../golden/probabilities.csv");
pub const SEPARABILITY: &str = include_str!("../golden/separability.csv");
pub const RHO3: &str = include_str!("../golden/rho3.csv");
pub const FIGURE_COSTS: &str = include_str!("../golden/figure_costs.csv");

/// A golden CSV: header plus rows, addressed by column name.
pub struct Golden {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Golden {
    pub fn parse(src: &str) -> Self {
        let mut lines = src.lines().filter(|l| !l.trim().is_empty());
        let split = |l: &str| l.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>();
        let header = lines.next().map(split).unwrap_or_default();
        let rows = lines.map(split).collect();
        Self { header, rows }
    }

    pub fn rows(&self) -> impl Iterator<Item = GoldenRow<'_>> {
        self.rows.iter().map(move |cells| GoldenRow { header: &self.header, cells })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

pub struct GoldenRow<'a> {
    header: &'a [String],
    cells: &'a [String],
}

impl GoldenRow<'_> {
    pub fn get(&self, column: &str) -> &str {
        self.header
            .iter()
            .position(|h| h == column)
            .and_then(|i| self.cells.get(i))
            .map_or("", String::as_str)
    }

    pub fn f64(&self, column: &str) -> f64 {
        self.get(column).parse().unwrap_or(f64::NAN)
    }

    pub fn u64(&self, column: &str) -> u64 {
        self.get(column).parse().unwrap_or(u64::MAX)
    }

    pub fn is_erratum(&self) -> bool {
        self.get("note") == "erratum"
    }
}

/// One compared entry.
#[derive(Debug, Clone, Serialize)]
pub struct DiffEntry {
    pub key: String,
    pub paper: String,
    pub computed: String,
    pub within_tolerance: bool,
    /// Marked as a known misprint in the golden file.
    pub erratum: bool,
}

impl DiffEntry {
    /// A recorded erratum must still disagree; anything else must agree.
    pub fn passes(&self) -> bool {
        self.within_tolerance != self.erratum
    }
}

/// Slack added to every tolerance so that exact half-unit roundings compare equal.
const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Default, Serialize)]
pub struct PaperDiff {
    pub table: String,
    pub entries: Vec<DiffEntry>,
}

impl PaperDiff {
    pub fn new(table: &str) -> Self {
        Self { table: table.into(), entries: Vec::new() }
    }

    pub fn exact(&mut self, key: String, paper: &str, computed: String) {
        let within_tolerance = paper == computed;
        self.entries.push(DiffEntry { key, paper: paper.into(), computed, within_tolerance, erratum: false });
    }

    pub fn numeric(&mut self, key: String, paper: f64, computed: f64, tolerance: f64, erratum: bool) {
        let within_tolerance = (paper - computed).abs() <= tolerance + ROUNDING_SLACK;
        self.entries.push(DiffEntry { key, paper: num(paper), computed: num(computed), within_tolerance, erratum });
    }

    /// Real and imaginary parts must each be within `tolerance`.
    pub fn complex(&mut self, key: String, paper: Complex<f64>, computed: Complex<f64>, tolerance: f64, erratum: bool) {
        let close = |a: f64, b: f64| (a - b).abs() <= tolerance + ROUNDING_SLACK;
        let within_tolerance = close(paper.re, computed.re) && close(paper.im, computed.im);
        let show = |z: Complex<f64>| format!("{}{}{}i", num(z.re), if z.im < 0.0 { "-" } else { "+" }, num(z.im.abs()));
        self.entries.push(DiffEntry { key, paper: show(paper), computed: show(computed), within_tolerance, erratum });
    }

    pub fn missing(&mut self, key: String, paper: &str) {
        self.entries.push(DiffEntry {
            key,
            paper: paper.into(),
            computed: "missing".into(),
            within_tolerance: false,
            erratum: false,
        });
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(DiffEntry::passes)
    }

    pub fn render(&self) -> String {
        let failures: Vec<&DiffEntry> = self.entries.iter().filter(|e| !e.passes()).collect();
        let errata: Vec<&DiffEntry> = self.entries.iter().filter(|e| e.erratum && e.passes()).collect();
        let mut out = format!(
            "reference diff [{}]: {} entries, {} mismatches, {} known errata\n",
            self.table,
            self.entries.len(),
            failures.len(),
            errata.len()
        );
        for e in &failures {
            let why = if e.erratum { "recorded erratum no longer reproduces" } else { "mismatch" };
            out.push_str(&format!("  {why}: {} reference={} computed={}\n", e.key, e.paper, e.computed));
        }
        for e in &errata {
            out.push_str(&format!("  known erratum: {} reference={} computed={}\n", e.key, e.paper, e.computed));
        }
        out.push_str(if failures.is_empty() { "reference diff: PASS\n" } else { "reference diff: FAIL\n" });
        out
    }
}
