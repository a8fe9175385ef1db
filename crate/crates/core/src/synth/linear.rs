//! Best affine GF(2) approximation of each output bit.

use serde::{Deserialize, Serialize};

use super::{Result, SynthError};
use crate::modexp_tables::TruthTable;

/// Largest input register [`fit_linear`] accepts.
pub const MAX_FIT_INPUTS: u32 = 8;

/// `constant ^ XOR of x_{i+1} for each set bit i of vars`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct AffineForm {
    pub vars: u32,
    pub constant: bool,
}

impl AffineForm {
    pub const ZERO: Self = Self { vars: 0, constant: false };

    pub fn new(vars: u32, constant: bool) -> Self {
        Self { vars, constant }
    }

    pub fn terms(&self) -> u32 {
        self.vars.count_ones() + self.constant as u32
    }

    pub fn eval(&self, x: u64) -> bool {
        ((x as u32 & self.vars).count_ones() & 1 == 1) != self.constant
    }

    /// Input bit indices used, lowest first.
    pub fn var_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(|i| (self.vars >> i) & 1 == 1)
    }

    /// Renders as e.g. `x3 ^ x2 ^ x1 ^ 1`, or `0` for the zero form.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> =
            self.var_indices().collect::<Vec<_>>().iter().rev().map(|i| format!("x{}", i + 1)).collect();
        if self.constant {
            parts.push("1".into());
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ^ ")
        }
    }
}

/// Affine fit of one output bit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitFit {
    pub form: AffineForm,
    /// Inputs where `form` disagrees with the table, ascending.
    pub mismatches: Vec<u64>,
    /// Every form with the same mismatch count, best first (starts with `form`).
    pub ties: Vec<AffineForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFit {
    pub n_in: u32,
    /// Index 0 is `y1`.
    pub bits: Vec<BitFit>,
    /// GF(2) rank of the chosen forms' variable vectors.
    pub rank: u32,
}

impl LinearFit {
    pub fn total_mismatches(&self) -> usize {
        self.bits.iter().map(|b| b.mismatches.len()).sum()
    }

    pub fn forms(&self) -> Vec<AffineForm> {
        self.bits.iter().map(|b| b.form).collect()
    }
}

/// GF(2) rank of a set of bit vectors.
pub fn gf2_rank(vectors: impl IntoIterator<Item = u32>) -> u32 {
    let mut basis: Vec<u32> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len() as u32
}

/// Scores all `2^(n_in+1)` affine forms against each output bit and keeps
/// the one with fewest mismatches, then fewest terms, then smallest
/// `(vars, constant)`.
pub fn fit_linear(table: &TruthTable) -> Result<LinearFit> {
    let n_in = table.n_in();
    if n_in > MAX_FIT_INPUTS {
        return Err(SynthError::TooLarge { n_in, n_out: table.n_out() });
    }
    let mut candidates: Vec<AffineForm> = (0..1u32 << n_in)
        .flat_map(|vars| [AffineForm::new(vars, false), AffineForm::new(vars, true)])
        .collect();
    candidates.sort_by_key(|f| (f.terms(), f.vars, f.constant));

    let bits: Vec<BitFit> = (0..table.n_out())
        .map(|j| {
            let column = table.output_bit(j);
            let misses = |f: &AffineForm| -> Vec<u64> {
                (0..column.len() as u64).filter(|&x| f.eval(x) != column[x as usize]).collect()
            };
            let scored: Vec<(usize, AffineForm)> =
                candidates.iter().map(|f| (misses(f).len(), *f)).collect();
            let best = scored.iter().map(|(m, _)| *m).min().unwrap_or(0);
            let ties: Vec<AffineForm> =
                scored.iter().filter(|(m, _)| *m == best).map(|(_, f)| *f).collect();
            let form = ties[0];
            BitFit { form, mismatches: misses(&form), ties }
        })
        .collect();
    let rank = gf2_rank(bits.iter().map(|b| b.form.vars));
    Ok(LinearFit { n_in, bits, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modexp_tables::{build_modexp_table, period_of};
    use proptest::prelude::*;

    #[test]
    fn f4_21_fit() {
        let t = build_modexp_table(4, 21, 3).unwrap();
        let fit = fit_linear(&t).unwrap();
        // y3 (index 2): x3 ^ x2 ^ x1, wrong only at x = 2.
        assert_eq!(fit.bits[2].form, AffineForm::new(0b111, false));
        assert_eq!(fit.bits[2].mismatches, vec![2]);
        // y1: x3 ^ x2 ^ x1 ^ 1, wrong only at x = 5.
        assert_eq!(fit.bits[0].form, AffineForm::new(0b111, true));
        assert_eq!(fit.bits[0].mismatches, vec![5]);
        for j in [1, 3] {
            assert_eq!(fit.bits[j].form, AffineForm::ZERO);
            assert!(fit.bits[j].mismatches.is_empty());
        }
        assert_eq!(fit.bits[2].form.describe(), "x3 ^ x2 ^ x1");
        assert_eq!(fit.rank, 1);
    }

    #[test]
    fn exact_linear_tables_have_no_mismatches() {
        let id = TruthTable::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        let fit = fit_linear(&id).unwrap();
        assert_eq!(fit.total_mismatches(), 0);
        assert_eq!(fit.rank, 2);
    }

    #[test]
    fn ties_are_ordered() {
        let t = TruthTable::new(2, 1, vec![1, 0, 0, 0]).unwrap();
        let fit = fit_linear(&t).unwrap();
        assert_eq!(
            fit.bits[0].ties,
            vec![
                AffineForm::ZERO,
                AffineForm::new(0b01, true),
                AffineForm::new(0b10, true),
                AffineForm::new(0b11, true)
            ]
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(gf2_rank([0b011, 0b110, 0b101]), 2);
        assert_eq!(gf2_rank([0b001, 0b010, 0b100]), 3);
        assert_eq!(gf2_rank([0, 0]), 0);
    }

    fn odd_periodic_table() -> impl Strategy<Value = TruthTable> {
        (2u32..=5, 0u64..3, Just((0..8u64).collect::<Vec<_>>()).prop_shuffle()).prop_filter_map(
            "period fits twice",
            |(n_in, i, perm)| {
                let p = 2 * i + 3;
                (p <= 1 << (n_in - 1)).then(|| {
                    TruthTable::new(n_in, 3, (0..1u64 << n_in).map(|x| perm[(x % p) as usize]).collect())
                        .unwrap()
                })
            },
        )
    }

    proptest! {
        #[test]
        fn odd_period_needs_nonlinear_repair(t in odd_periodic_table()) {
            prop_assert!(period_of(&t) % 2 == 1 && period_of(&t) > 1);
            prop_assert!(fit_linear(&t).unwrap().total_mismatches() > 0);
        }

        #[test]
        fn mismatch_sets_are_exact(rows in proptest::collection::vec(0u64..8, 8)) {
            let t = TruthTable::new(3, 3, rows).unwrap();
            let fit = fit_linear(&t).unwrap();
            for (j, b) in fit.bits.iter().enumerate() {
                let col = t.output_bit(j as u32);
                let expect: Vec<u64> = (0..8).filter(|&x| b.form.eval(x) != col[x as usize]).collect();
                prop_assert_eq!(&b.mismatches, &expect);
                prop_assert!(b.ties.contains(&b.form));
            }
        }
    }
}
