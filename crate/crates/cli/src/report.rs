//! Command results and number formatting.

use serde_json::Value;

/// Output of one command before rendering.
#[derive(Debug, Clone, Default)]
pub struct Report {
    /// Base name for artifacts written with `--out`.
    pub name: String,
    pub text: String,
    pub csv: Option<String>,
    pub json: Value,
    /// Verification or paper-diff failure.
    pub failed: bool,
    /// Additional artifacts as `(file name, contents)`.
    pub files: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), json: Value::Null, ..Default::default() }
    }
}

/// Rounds to 12 decimals and trims trailing zeros, so values such as
/// `0.12499999999999997` print as `0.125`.
pub fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".into(),
        _ => s.into(),
    }
}

/// Rounds for JSON output the same way as [`num`].
pub fn round12(x: f64) -> f64 {
    num(x).parse().unwrap_or(x)
}
