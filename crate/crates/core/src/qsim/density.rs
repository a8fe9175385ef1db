//! Reduced density matrices of the input register.

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::dist::ProbDist;
use super::{QsimError, Result};
use crate::scalar::Real;

/// Hermiticity and trace tolerance.
pub const DENSITY_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted as nonnegative.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl<T: Real> DensityMatrix<T> {
    pub(crate) fn from_entries_unchecked(dim: usize, entries: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    /// Validated constructor: Hermitian, unit trace, positive semidefinite.
    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(QsimError::LengthMismatch { expected: dim * dim, got: entries.len() });
        }
        let rho = Self { dim, entries };
        rho.validate()?;
        Ok(rho)
    }

    /// Checks the density-matrix conditions and returns the spectrum.
    pub fn validate(&self) -> Result<Vec<f64>> {
        let herm = self.hermiticity_error();
        if herm > DENSITY_TOLERANCE {
            return Err(QsimError::NotHermitian(herm));
        }
        let tr = self.trace().to_f64_lossy();
        if (tr - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(QsimError::TraceNotOne(tr));
        }
        let spectrum = self.spectrum();
        let min = spectrum.first().copied().unwrap_or(0.0);
        if min < EIGENVALUE_FLOOR || spectrum.iter().any(|l| !l.is_finite()) {
            return Err(QsimError::NotPositive(min));
        }
        Ok(spectrum)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.entry(i, i).re)
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.entry(i, j) - self.entry(j, i).conj()).norm().to_f64_lossy();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.entry(i, i).re).collect()
    }

    /// Diagonal as a probability distribution.
    pub fn input_probabilities(&self) -> ProbDist<T> {
        ProbDist::new_unchecked(self.diagonal())
    }

    /// Eigenvalues in ascending order, computed in `f64` on the Hermitian
    /// part. Entries below roundoff relative to the largest are zeroed
    /// first; nalgebra's tridiagonalization can overflow on them.
    pub fn spectrum(&self) -> Vec<f64> {
        let scale = self.entries.iter().map(|z| z.norm().to_f64_lossy()).fold(0.0, f64::max);
        let cutoff = scale * f64::EPSILON * 16.0;
        let flush = |v: f64| if v.abs() < cutoff { 0.0 } else { v };
        let a = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let (x, y) = (self.entry(i, j), self.entry(j, i).conj());
            let re = (x.re + y.re).to_f64_lossy() * 0.5;
            let im = (x.im + y.im).to_f64_lossy() * 0.5;
            Complex::new(flush(re), flush(im))
        });
        let mut values: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Von Neumann entropy in bits, ignoring eigenvalues below `1e-15`.
    pub fn entropy_bits(&self) -> f64 {
        self.spectrum().iter().filter(|&&l| l > 1e-15).map(|&l| -l * l.log2()).sum()
    }

    /// `{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major.
    pub fn to_json(&self) -> String {
        let entries = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = self.entry(i, j);
                        [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                    })
                    .collect()
            })
            .collect();
        serde_json::to_string(&DensityJson { dim: self.dim, entries }).expect("plain data serializes")
    }
}

impl DensityMatrix<f64> {
    pub fn from_json(s: &str) -> Result<Self> {
        let parsed: DensityJson = serde_json::from_str(s).map_err(|e| QsimError::Json(e.to_string()))?;
        if parsed.entries.len() != parsed.dim || parsed.entries.iter().any(|r| r.len() != parsed.dim) {
            return Err(QsimError::LengthMismatch { expected: parsed.dim * parsed.dim, got: parsed.entries.len() });
        }
        let entries = parsed.entries.into_iter().flatten().map(|[re, im]| Complex::new(re, im)).collect();
        Self::from_entries(parsed.dim, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::qft::QftDirection;
    use crate::qsim::state::{period_state, uniform_input_state};
    use proptest::prelude::*;

    #[test]
    fn rho3_spot_entries() {
        let rho = period_state::<f64>(3, 3, 3, QftDirection::Forward).unwrap().reduce_to_input();
        assert!((rho.entry(0, 0).re - 0.344).abs() <= 0.0005);
        let e = rho.entry(3, 2);
        assert!((e.re + 0.102).abs() <= 0.0005 && (e.im - 0.042).abs() <= 0.0005);
        rho.validate().unwrap();
    }

    #[test]
    fn period_eight_is_maximally_mixed() {
        let rho = period_state::<f64>(3, 3, 8, QftDirection::Forward).unwrap().reduce_to_input();
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { 0.125 } else { 0.0 };
                assert!((rho.entry(i, j) - Complex::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        assert!((rho.entropy_bits() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn product_state_is_pure() {
        let rho = uniform_input_state::<f64>(3, 2).unwrap().reduce_to_input();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let spec = rho.spectrum();
        assert!((spec[7] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut e = vec![Complex::new(0.0, 0.0); 4];
        e[0] = Complex::new(0.5, 0.0);
        e[3] = Complex::new(0.5, 0.0);
        e[1] = Complex::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::from_entries(2, e), Err(QsimError::NotHermitian(_))));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let e = vec![
            Complex::new(0.5, 0.0),
            Complex::new(0.9, 0.0),
            Complex::new(0.9, 0.0),
            Complex::new(0.5, 0.0),
        ];
        assert!(matches!(DensityMatrix::from_entries(2, e), Err(QsimError::NotPositive(_))));
    }

    #[test]
    fn spectrum_finite_with_roundoff_entries() {
        let state = uniform_input_state::<f64>(8, 4).unwrap().apply_modexp(2, 15).unwrap();
        let spec = state.qft_input(QftDirection::Forward).reduce_to_input().validate().unwrap();
        assert!(spec.iter().all(|l| l.is_finite()));
        assert!(spec[252..].iter().all(|l| (l - 0.25).abs() < 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let rho = period_state::<f64>(2, 2, 3, QftDirection::Forward).unwrap().reduce_to_input();
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert_eq!(back, rho);
    }

    proptest! {
        #[test]
        fn reduced_state_is_valid(m in 1u32..=5, k in 1u32..=3, p_seed in 0u64..1000) {
            let p = 1 + p_seed % (1u64 << m).min(1u64 << k);
            let state = period_state::<f64>(m, k, p, QftDirection::Forward).unwrap();
            let rho = state.reduce_to_input();
            prop_assert!(rho.validate().is_ok());
            let diag = rho.diagonal();
            let probs = state.input_probabilities();
            for (a, b) in diag.iter().zip(probs.probabilities()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn spectrum_invariant_under_qft(m in 1u32..=5, k in 1u32..=3, p_seed in 0u64..1000) {
            let p = 1 + p_seed % (1u64 << m).min(1u64 << k);
            let before = uniform_input_state::<f64>(m, k).unwrap().apply_period_map(p).unwrap();
            let after = before.qft_input(QftDirection::Forward);
            let (sa, sb) = (before.reduce_to_input().spectrum(), after.reduce_to_input().spectrum());
            for (a, b) in sa.iter().zip(&sb) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
