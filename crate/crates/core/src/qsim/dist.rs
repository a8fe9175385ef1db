//! Measurement distributions, depolarizing noise and the separability index.

use std::fmt::Display;

use serde::{Deserialize, Serialize};

use super::{QsimError, Result};
use crate::scalar::{Field, Real};

/// Distribution over `[0, 2^m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist<F> {
    probabilities: Vec<F>,
}

/// Depolarizing strength: 1 leaves the state unchanged, 0 is fully mixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams<F> {
    epsilon: F,
}

/// `2^-40`, built exactly so it also works for rationals.
fn slack<F: Field>() -> F {
    F::one() / F::pow2(40)
}

fn log2_len(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(QsimError::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

impl<F: Field> NoiseParams<F> {
    pub fn new(epsilon: F) -> Result<Self> {
        if epsilon < F::zero() || epsilon > F::one() {
            return Err(QsimError::EpsilonOutOfRange(format!("{epsilon:?}")));
        }
        Ok(Self { epsilon })
    }

    pub fn noiseless() -> Self {
        Self { epsilon: F::one() }
    }

    pub fn epsilon(&self) -> &F {
        &self.epsilon
    }
}

impl<F: Field> ProbDist<F> {
    pub(crate) fn new_unchecked(probabilities: Vec<F>) -> Self {
        Self { probabilities }
    }

    /// Checks length `2^m`, entries in `[0, 1]` and sum within `2^-40` of 1.
    pub fn new(probabilities: Vec<F>) -> Result<Self> {
        log2_len(probabilities.len())?;
        let tol = slack::<F>();
        for (index, p) in probabilities.iter().enumerate() {
            if *p < -tol.clone() || *p > F::one() + tol.clone() {
                return Err(QsimError::InvalidProbability { index, value: format!("{p:?}") });
            }
        }
        let sum = probabilities.iter().cloned().fold(F::zero(), |a, b| a + b);
        if (sum.clone() - F::one()).abs_val() > tol {
            return Err(QsimError::SumNotOne(format!("{sum:?}")));
        }
        Ok(Self { probabilities })
    }

    pub fn uniform(m: u32) -> Self {
        let p = F::one() / F::pow2(m);
        Self { probabilities: vec![p; 1 << m] }
    }

    pub fn probabilities(&self) -> &[F] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Number of qubits `m` with `len = 2^m`.
    pub fn qubits(&self) -> u32 {
        self.probabilities.len().trailing_zeros()
    }

    pub fn sum(&self) -> F {
        self.probabilities.iter().cloned().fold(F::zero(), |a, b| a + b)
    }

    /// `P'(k) = (1 - eps) / 2^m + eps P(k)`.
    pub fn depolarize(&self, noise: &NoiseParams<F>) -> Self {
        let eps = noise.epsilon.clone();
        let floor = (F::one() - eps.clone()) / F::pow2(self.qubits());
        let probabilities = self.probabilities.iter().map(|p| floor.clone() + eps.clone() * p.clone()).collect();
        Self { probabilities }
    }

    /// `S = sum_k P(k)^2`.
    pub fn separability_index(&self) -> F {
        self.probabilities.iter().fold(F::zero(), |a, p| a + p.clone() * p.clone())
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> F {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a.clone() - b.clone()).abs_val())
            .fold(F::zero(), |m, d| if d > m { d } else { m })
    }
}

impl<F: Field + Display> ProbDist<F> {
    /// `k,probability` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.probabilities.iter().enumerate() {
            out.push_str(&format!("{k},{p}\n"));
        }
        out
    }
}

impl<F: Field + Serialize> ProbDist<F> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// `S' = eps^2 S + (1 - eps^2) / 2^m`, the separability index after
/// depolarizing a distribution whose index is `S`.
pub fn noisy_separability<F: Field>(s: F, noise: &NoiseParams<F>, m: u32) -> Result<F> {
    let floor = F::one() / F::pow2(m);
    let tol = slack::<F>();
    if s < floor.clone() - tol.clone() || s > F::one() + tol {
        return Err(QsimError::SeparabilityOutOfRange(format!("{s:?}")));
    }
    let e2 = noise.epsilon.clone() * noise.epsilon.clone();
    Ok(e2.clone() * s + (F::one() - e2) * floor)
}

/// The printed polynomial `eps^2 S + (1 - eps)(1 + 15 eps) / 64`, kept for
/// comparison only; it disagrees with [`noisy_separability`] for `eps < 1`.
pub fn printed_noisy_separability<F: Field>(s: F, noise: &NoiseParams<F>) -> F {
    let eps = noise.epsilon.clone();
    let fifteen = F::pow2(4) - F::one();
    eps.clone() * eps.clone() * s + (F::one() - eps.clone()) * (F::one() + fifteen * eps) / F::pow2(6)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEstimate<T> {
    pub epsilon: T,
    /// Set when `S_observed` fell outside `[1/2^m, S_theory]` and was clamped.
    pub clamped: bool,
}

/// Inverts [`noisy_separability`]: `eps = sqrt((S_obs - 2^-m) / (S_th - 2^-m))`.
pub fn estimate_epsilon<T: Real>(s_theory: T, s_observed: T, m: u32) -> Result<EpsilonEstimate<T>> {
    let floor = T::one() / <T as Field>::pow2(m);
    let tol = slack::<T>();
    if s_theory <= floor + tol || s_theory > T::one() + tol {
        return Err(QsimError::NoSignal(s_theory.to_f64_lossy()));
    }
    let clamped_obs = s_observed.max(floor).min(s_theory);
    let clamped = (clamped_obs - s_observed).abs() > tol;
    let epsilon = ((clamped_obs - floor) / (s_theory - floor)).sqrt().min(T::one());
    Ok(EpsilonEstimate { epsilon, clamped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Q = Ratio<i64>;

    fn p2() -> ProbDist<f64> {
        ProbDist::new(vec![0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn constructor_checks() {
        assert!(ProbDist::new(vec![0.5, 0.4]).is_err());
        assert!(ProbDist::new(vec![1.5, -0.5]).is_err());
        assert!(ProbDist::new(vec![0.5, 0.25, 0.25]).is_err());
        assert!(NoiseParams::new(1.5).is_err());
        assert!(NoiseParams::new(-0.1).is_err());
    }

    #[test]
    fn depolarize_examples() {
        let d = p2();
        assert_eq!(d.depolarize(&NoiseParams::new(1.0).unwrap()), d);
        let mixed = d.depolarize(&NoiseParams::new(0.0).unwrap());
        assert!(mixed.probabilities().iter().all(|&p| p == 0.125));
        let half = d.depolarize(&NoiseParams::new(0.5).unwrap());
        assert_eq!(half.probabilities()[0], 0.3125);
    }

    #[test]
    fn noisy_separability_examples() {
        let s = 0.5;
        assert_eq!(noisy_separability(s, &NoiseParams::new(1.0).unwrap(), 3).unwrap(), 0.5);
        assert_eq!(noisy_separability(s, &NoiseParams::new(0.0).unwrap(), 3).unwrap(), 0.125);
        assert_eq!(noisy_separability(s, &NoiseParams::new(0.5).unwrap(), 3).unwrap(), 0.21875);
        assert!(noisy_separability(0.1, &NoiseParams::new(0.5).unwrap(), 3).is_err());
        assert!(noisy_separability(1.1, &NoiseParams::new(0.5).unwrap(), 3).is_err());
    }

    #[test]
    fn printed_form_differs_at_zero() {
        let v: f64 = printed_noisy_separability(0.5, &NoiseParams::new(0.0).unwrap());
        assert_eq!(v, 1.0 / 64.0);
        let v: f64 = printed_noisy_separability(0.5, &NoiseParams::new(1.0).unwrap());
        assert_eq!(v, 0.5);
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(estimate_epsilon(0.5f64, 0.5, 3).unwrap().epsilon, 1.0);
        assert_eq!(estimate_epsilon(0.5f64, 0.125, 3).unwrap().epsilon, 0.0);
        assert!((estimate_epsilon(0.5f64, 0.21875, 3).unwrap().epsilon - 0.5).abs() < 1e-15);
        assert!(estimate_epsilon(0.125f64, 0.125, 3).is_err());
        let c = estimate_epsilon(0.5f64, 0.6, 3).unwrap();
        assert!(c.clamped && c.epsilon == 1.0);
        let c = estimate_epsilon(0.5f64, 0.1, 3).unwrap();
        assert!(c.clamped && c.epsilon == 0.0);
    }

    #[test]
    fn exact_rational_instantiation() {
        let d: ProbDist<Q> = ProbDist::new(vec![Q::new(1, 2), Q::new(0, 1), Q::new(1, 4), Q::new(1, 4)]).unwrap();
        let eps = NoiseParams::new(Q::new(1, 3)).unwrap();
        let brute = d.depolarize(&eps).separability_index();
        let closed = noisy_separability(d.separability_index(), &eps, 2).unwrap();
        assert_eq!(brute, closed);
    }

    #[test]
    fn csv_and_json() {
        let d = ProbDist::new(vec![0.25f64; 4]).unwrap();
        assert_eq!(d.to_csv(), "k,probability\n0,0.25\n1,0.25\n2,0.25\n3,0.25\n");
        assert_eq!(d.to_json(), r#"{"probabilities":[0.25,0.25,0.25,0.25]}"#);
    }

    fn random_dist(m: u32) -> impl Strategy<Value = ProbDist<f64>> {
        proptest::collection::vec(0.0f64..1.0, 1usize << m).prop_map(|w| {
            let total: f64 = w.iter().sum::<f64>() + 1e-9;
            let mut p: Vec<f64> = w.iter().map(|x| (x + 1e-9 / w.len() as f64) / total).collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            ProbDist::new(p).unwrap()
        })
    }

    proptest! {
        #[test]
        fn closed_form_matches_entrywise(d in random_dist(3), eps in 0.0f64..=1.0) {
            let noise = NoiseParams::new(eps).unwrap();
            let brute = d.depolarize(&noise).separability_index();
            let closed = noisy_separability(d.separability_index(), &noise, 3).unwrap();
            prop_assert!((brute - closed).abs() < 1e-12);
        }

        #[test]
        fn closed_form_exact(ws in proptest::collection::vec(1i64..20, 4), num in 0i64..=12) {
            let total: i64 = ws.iter().sum();
            let d: ProbDist<Q> = ProbDist::new(ws.iter().map(|&w| Q::new(w, total)).collect()).unwrap();
            let noise = NoiseParams::new(Q::new(num, 12)).unwrap();
            prop_assert_eq!(
                d.depolarize(&noise).separability_index(),
                noisy_separability(d.separability_index(), &noise, 2).unwrap()
            );
        }

        #[test]
        fn estimate_inverts_noise(s in 0.13f64..=1.0, eps in 0.0f64..=1.0) {
            let noisy = noisy_separability(s, &NoiseParams::new(eps).unwrap(), 3).unwrap();
            let est = estimate_epsilon(s, noisy, 3).unwrap();
            // near eps = 0 the square root amplifies rounding, so compare eps^2 there
            let sq_err = (est.epsilon * est.epsilon - eps * eps).abs();
            prop_assert!((est.epsilon - eps).abs() < 1e-10 || sq_err < 1e-12);
        }

        #[test]
        fn depolarized_dist_stays_valid(d in random_dist(4), eps in 0.0f64..=1.0) {
            let out = d.depolarize(&NoiseParams::new(eps).unwrap());
            prop_assert!(ProbDist::new(out.probabilities().to_vec()).is_ok());
        }
    }
}
