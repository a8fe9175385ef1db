//! Dense two-register state vectors.

use num_complex::Complex;

use super::density::DensityMatrix;
use super::dist::ProbDist;
use super::qft::{dft_in_place, QftDirection};
use super::{QsimError, Result, MAX_QUBITS};
use crate::circuit::Circuit;
use crate::numtheory::{self, mod_pow};
use crate::scalar::Real;

/// Amplitudes over an `m`-qubit input register and a `k`-qubit output
/// register; basis index = `input * 2^k + output`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    m: u32,
    k: u32,
    amplitudes: Vec<Complex<T>>,
}

/// Norm tolerance for a scalar type: about `1e-12` for `f64`.
pub fn norm_tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(1e4)
}

fn check_registers(m: u32, k: u32) -> Result<()> {
    if m + k > MAX_QUBITS {
        return Err(QsimError::RegisterTooLarge { m, k, limit: MAX_QUBITS });
    }
    Ok(())
}

impl<T: Real> StateVector<T> {
    pub fn from_amplitudes(m: u32, k: u32, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_registers(m, k)?;
        if amplitudes.len() != 1 << (m + k) {
            return Err(QsimError::LengthMismatch { expected: 1 << (m + k), got: amplitudes.len() });
        }
        let s = Self { m, k, amplitudes };
        let norm = s.norm_sqr();
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(QsimError::NotNormalized(norm.to_f64_lossy()));
        }
        Ok(s)
    }

    /// `|0>` on both registers.
    pub fn zero(m: u32, k: u32) -> Result<Self> {
        check_registers(m, k)?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << (m + k)];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self { m, k, amplitudes })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, input: usize, output: usize) -> Complex<T> {
        self.amplitudes[(input << self.k) | output]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    fn map_basis(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.amplitudes.len()];
        for (s, &a) in self.amplitudes.iter().enumerate() {
            out[f(s)] = a;
        }
        Self { m: self.m, k: self.k, amplitudes: out }
    }

    /// `|x>|y> -> |x>|y XOR f(x)>`; `values[x]` must fit in `k` bits.
    pub fn apply_function_map(&self, values: &[u64]) -> Result<Self> {
        if values.len() != 1 << self.m {
            return Err(QsimError::LengthMismatch { expected: 1 << self.m, got: values.len() });
        }
        if let Some(&v) = values.iter().find(|&&v| v >> self.k != 0) {
            return Err(QsimError::ValueTooWide { value: v, k: self.k });
        }
        let k = self.k;
        let low = (1usize << k) - 1;
        Ok(self.map_basis(|s| {
            let x = s >> k;
            (x << k) | ((s & low) ^ values[x] as usize)
        }))
    }

    /// `|j>|y> -> |j>|y XOR (j mod p)>`.
    pub fn apply_period_map(&self, p: u64) -> Result<Self> {
        if p == 0 || p > 1 << self.m || (p - 1) >> self.k != 0 {
            return Err(QsimError::PeriodOutOfRange { p, m: self.m, k: self.k });
        }
        let values: Vec<u64> = (0..1u64 << self.m).map(|j| j % p).collect();
        self.apply_function_map(&values)
    }

    /// `|x>|y> -> |x>|y XOR (a^x mod N)>`.
    pub fn apply_modexp(&self, a: u64, n: u64) -> Result<Self> {
        numtheory::check_base(a, n)?;
        let values: Vec<u64> = (0..1u64 << self.m).map(|x| mod_pow(a, x, n)).collect();
        self.apply_function_map(&values)
    }

    /// Permutes amplitudes by the circuit's action. The circuit's input and
    /// output registers must cover all its lines and match `m` and `k`.
    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        let (ni, no) = (circuit.input_lines().len(), circuit.output_lines().len());
        if ni != self.m as usize || no != self.k as usize || circuit.width() != ni + no {
            return Err(QsimError::WidthMismatch { m: self.m, k: self.k, circuit_width: circuit.width() });
        }
        let perm = circuit.to_permutation()?;
        let k = self.k as usize;
        let lines_to_index = |state: usize| -> usize {
            let mut idx = 0;
            for j in 0..ni {
                idx |= ((state >> circuit.input_line(j)) & 1) << (k + j);
            }
            for j in 0..no {
                idx |= ((state >> circuit.output_line(j)) & 1) << j;
            }
            idx
        };
        let index_to_lines = |idx: usize| -> usize {
            let mut state = 0;
            for j in 0..ni {
                state |= ((idx >> (k + j)) & 1) << circuit.input_line(j);
            }
            for j in 0..no {
                state |= ((idx >> j) & 1) << circuit.output_line(j);
            }
            state
        };
        Ok(self.map_basis(|s| lines_to_index(perm[index_to_lines(s)])))
    }

    /// QFT on the input register, identity on the output register.
    pub fn qft_input(&self, direction: QftDirection) -> Self {
        let big_m = 1usize << self.m;
        let kk = 1usize << self.k;
        let mut out = self.amplitudes.clone();
        let mut column = vec![Complex::new(T::zero(), T::zero()); big_m];
        for y in 0..kk {
            for (j, c) in column.iter_mut().enumerate() {
                *c = self.amplitudes[j * kk + y];
            }
            dft_in_place(&mut column, direction);
            for (j, c) in column.iter().enumerate() {
                out[j * kk + y] = *c;
            }
        }
        Self { m: self.m, k: self.k, amplitudes: out }
    }

    /// Partial trace over the output register.
    pub fn reduce_to_input(&self) -> DensityMatrix<T> {
        let dim = 1usize << self.m;
        let kk = 1usize << self.k;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex::new(T::zero(), T::zero());
                for y in 0..kk {
                    acc = acc + self.amplitudes[i * kk + y] * self.amplitudes[j * kk + y].conj();
                }
                entries[i * dim + j] = acc;
            }
        }
        DensityMatrix::from_entries_unchecked(dim, entries)
    }

    /// Marginal distribution of the input register.
    pub fn input_probabilities(&self) -> ProbDist<T> {
        let kk = 1usize << self.k;
        let probs = (0..1usize << self.m)
            .map(|x| self.amplitudes[x * kk..(x + 1) * kk].iter().fold(T::zero(), |a, z| a + z.norm_sqr()))
            .collect();
        ProbDist::new_unchecked(probs)
    }
}

/// `2^{-m/2} sum_x |x>|0>`.
pub fn uniform_input_state<T: Real>(m: u32, k: u32) -> Result<StateVector<T>> {
    check_registers(m, k)?;
    let amp = T::one() / T::lit((1u64 << m) as f64).sqrt();
    let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << (m + k)];
    for x in 0..1usize << m {
        amplitudes[x << k] = Complex::new(amp, T::zero());
    }
    Ok(StateVector { m, k, amplitudes })
}

/// The toy-model pipeline: uniform input, `x -> x mod p`, forward QFT.
pub fn period_state<T: Real>(m: u32, k: u32, p: u64, direction: QftDirection) -> Result<StateVector<T>> {
    Ok(uniform_input_state::<T>(m, k)?.apply_period_map(p)?.qft_input(direction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::FigureId;
    use proptest::prelude::*;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn uniform_examples() {
        let s = uniform_input_state::<f64>(1, 0).unwrap();
        let h = 0.5f64.sqrt();
        assert!(s.amplitudes().iter().all(|z| close(*z, Complex::new(h, 0.0), 1e-15)));
        let s = uniform_input_state::<f64>(3, 3).unwrap();
        assert_eq!(s.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 8);
        let s = uniform_input_state::<f64>(0, 2).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));
        assert!(matches!(uniform_input_state::<f64>(11, 10), Err(QsimError::RegisterTooLarge { .. })));
    }

    #[test]
    fn period_map_examples() {
        let s = uniform_input_state::<f64>(3, 3).unwrap().apply_period_map(3).unwrap();
        let a = 8f64.sqrt().recip();
        for j in 0..8 {
            assert!(close(s.amplitude(j, j % 3), Complex::new(a, 0.0), 1e-15));
        }
        let s = uniform_input_state::<f64>(3, 3).unwrap().apply_period_map(8).unwrap();
        for j in 0..8 {
            assert!(close(s.amplitude(j, j), Complex::new(a, 0.0), 1e-15));
        }
        let s = uniform_input_state::<f64>(3, 3).unwrap().apply_period_map(1).unwrap();
        assert!((s.reduce_to_input().purity() - 1.0).abs() < 1e-12);
        assert!(uniform_input_state::<f64>(3, 1).unwrap().apply_period_map(3).is_err());
    }

    #[test]
    fn phi3_origin_amplitude() {
        let s = period_state::<f64>(3, 3, 3, QftDirection::Forward).unwrap();
        assert!(close(s.amplitude(0, 0), Complex::new(3.0 / 8.0, 0.0), 1e-15));
        let c = 8f64.sqrt().recip() * 8f64.sqrt().recip();
        // |1>_i |0>_o coefficient 0.293 (1 - i) / sqrt(8), times the 1/sqrt(8) input norm
        let expect = Complex::new(1.0 - 0.5f64.sqrt(), -(1.0 - 0.5f64.sqrt())) * c;
        assert!(close(s.amplitude(1, 0), expect, 1e-15));
    }

    #[test]
    fn circuit_matches_function_map() {
        let base = uniform_input_state::<f64>(2, 4).unwrap();
        let via_circuit = base.apply_circuit(&FigureId::F2_15.circuit()).unwrap();
        let direct = base.apply_modexp(2, 15).unwrap();
        for (a, b) in via_circuit.amplitudes().iter().zip(direct.amplitudes()) {
            assert!(close(*a, *b, 1e-15));
        }
        let base = uniform_input_state::<f64>(3, 2).unwrap();
        let partial = base.apply_circuit(&FigureId::F4_21Partial.circuit()).unwrap();
        let mapped = base.apply_period_map(3).unwrap();
        for (a, b) in partial.amplitudes().iter().zip(mapped.amplitudes()) {
            assert!(close(*a, *b, 1e-15));
        }
        assert!(base.apply_circuit(&FigureId::F2_15.circuit()).is_err());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let base = uniform_input_state::<f64>(2, 2).unwrap().apply_period_map(3).unwrap();
        let c = Circuit::with_registers(2, 2).unwrap();
        assert_eq!(base.apply_circuit(&c).unwrap(), base);
    }

    #[test]
    fn f32_instantiation() {
        let s = period_state::<f32>(3, 3, 3, QftDirection::Forward).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-5);
        let p = s.input_probabilities();
        assert!((p.probabilities()[0] - 0.34375).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn norm_preserved(m in 1u32..=5, k in 1u32..=3, p_seed in 0u64..1000, inverse in any::<bool>()) {
            let p = 1 + p_seed % (1u64 << m).min(1u64 << k);
            let dir = if inverse { QftDirection::Inverse } else { QftDirection::Forward };
            let s = uniform_input_state::<f64>(m, k).unwrap().apply_period_map(p).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let q = s.qft_input(dir);
            prop_assert!((q.norm_sqr() - 1.0).abs() < 1e-12);
            let back = q.qft_input(if inverse { QftDirection::Forward } else { QftDirection::Inverse });
            for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
