//! Seeded measurement sampling and the end-to-end order-finding run.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist::ProbDist;
use super::qft::QftDirection;
use super::state::uniform_input_state;
use super::{QsimError, Result, MAX_QUBITS};
use crate::modexp_tables::ceil_log2;
use crate::numtheory::{self, combine_order_candidates, continued_fraction_order};
use crate::scalar::Real;

/// Generator behind every seeded draw.
pub const RNG_IDENTITY: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.9) + WeightedIndex (rand 0.9)";

/// Draws `shots` outcomes from `dist` with ChaCha8 seeded by `seed`.
pub fn sample_outcomes<T: Real>(dist: &ProbDist<T>, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(QsimError::ZeroShots);
    }
    let weights: Vec<f64> = dist.probabilities().iter().map(|p| p.to_f64_lossy().max(0.0)).collect();
    let index = WeightedIndex::new(&weights).map_err(|e| QsimError::Sampling(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| index.sample(&mut rng) as u64).collect())
}

/// Per-outcome counts of a seeded draw.
pub fn sample_counts<T: Real>(dist: &ProbDist<T>, shots: u64, seed: u64) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; dist.len()];
    for k in sample_outcomes(dist, shots, seed)? {
        counts[k as usize] += 1;
    }
    Ok(counts)
}

/// Empirical distribution `counts / shots`.
pub fn sample<T: Real>(dist: &ProbDist<T>, shots: u64, seed: u64) -> Result<ProbDist<f64>> {
    let counts = sample_counts(dist, shots, seed)?;
    Ok(ProbDist::new_unchecked(counts.iter().map(|&c| c as f64 / shots as f64).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFindingRun {
    pub a: u64,
    pub n: u64,
    /// Input-register qubits, `2^m >= N^2`.
    pub m: u32,
    /// Output-register qubits, `ceil(log2 N)`.
    pub k: u32,
    pub samples: Vec<u64>,
    /// Continued-fraction denominators, one per informative sample.
    pub candidates: Vec<u64>,
    pub recovered_order: Option<u64>,
}

/// Register sizes for order finding modulo `n`.
pub fn order_finding_registers(n: u64) -> (u32, u32) {
    (ceil_log2(n * n), ceil_log2(n))
}

/// Simulates order finding for `a` modulo `n`: uniform input, modular
/// exponentiation, forward QFT, `shots` seeded measurements, continued
/// fractions on each outcome and lcm-combination of the candidates.
pub fn order_finding_run(a: u64, n: u64, shots: u64, seed: u64) -> Result<OrderFindingRun> {
    numtheory::check_base(a, n)?;
    let (m, k) = order_finding_registers(n);
    if m + k > MAX_QUBITS {
        return Err(QsimError::RegisterTooLarge { m, k, limit: MAX_QUBITS });
    }
    let dist = uniform_input_state::<f64>(m, k)?
        .apply_modexp(a, n)?
        .qft_input(QftDirection::Forward)
        .input_probabilities();
    let samples = sample_outcomes(&dist, shots, seed)?;
    let m_size = 1u64 << m;
    let candidates: Vec<u64> = samples.iter().filter_map(|&s| continued_fraction_order(s, m_size, n)).collect();
    let recovered_order = combine_order_candidates(a, n, &candidates);
    Ok(OrderFindingRun { a, n, m, k, samples, candidates, recovered_order })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_stays_put() {
        let d = ProbDist::new(vec![0.0f64, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(sample(&d, 100, 7).unwrap().probabilities(), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let d = ProbDist::new(vec![0.1f64, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(sample_outcomes(&d, 500, 3).unwrap(), sample_outcomes(&d, 500, 3).unwrap());
        assert_ne!(sample_outcomes(&d, 500, 3).unwrap(), sample_outcomes(&d, 500, 4).unwrap());
        assert!(sample(&d, 0, 0).is_err());
    }

    #[test]
    fn million_shots_converge() {
        let d = crate::qsim::period_state::<f64>(3, 3, 3, QftDirection::Forward).unwrap().input_probabilities();
        let e = sample(&d, 1_000_000, 0).unwrap();
        assert!(e.max_abs_diff(&d) < 0.005);
    }

    #[test]
    fn recovers_small_orders() {
        assert_eq!(order_finding_run(2, 15, 200, 0).unwrap().recovered_order, Some(4));
        assert_eq!(order_finding_run(4, 15, 200, 0).unwrap().recovered_order, Some(2));
        assert_eq!(order_finding_run(4, 21, 500, 0).unwrap().recovered_order, Some(3));
    }

    #[test]
    fn register_sizes() {
        assert_eq!(order_finding_registers(15), (8, 4));
        assert_eq!(order_finding_registers(21), (9, 5));
        assert!(matches!(order_finding_run(2, 91, 10, 0), Err(QsimError::RegisterTooLarge { .. })));
        assert!(order_finding_run(3, 15, 10, 0).is_err());
    }
}
