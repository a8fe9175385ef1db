//! Dense state-vector simulation of the order-finding pipeline: register
//! preparation, function maps and circuits, the input-register QFT, reduced
//! density matrices, measurement statistics and depolarizing noise.

pub mod density;
pub mod dist;
pub mod qft;
pub mod sampling;
pub mod state;

use thiserror::Error;

use crate::circuit::CircuitError;
use crate::numtheory::NumTheoryError;

pub use density::DensityMatrix;
pub use dist::{estimate_epsilon, noisy_separability, printed_noisy_separability, EpsilonEstimate, NoiseParams, ProbDist};
pub use qft::QftDirection;
pub use sampling::{order_finding_run, sample, sample_counts, sample_outcomes, OrderFindingRun, RNG_IDENTITY};
pub use state::{period_state, uniform_input_state, StateVector};

/// Largest `m + k` the dense simulator accepts.
pub const MAX_QUBITS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsimError {
    #[error("registers of {m} + {k} qubits exceed the {limit}-qubit limit")]
    RegisterTooLarge { m: u32, k: u32, limit: u32 },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state norm is {0}, not 1")]
    NotNormalized(f64),
    #[error("value {value} does not fit in a {k}-qubit output register")]
    ValueTooWide { value: u64, k: u32 },
    #[error("period {p} is out of range for registers m={m}, k={k}")]
    PeriodOutOfRange { p: u64, m: u32, k: u32 },
    #[error("circuit of width {circuit_width} does not match registers m={m}, k={k}")]
    WidthMismatch { m: u32, k: u32, circuit_width: usize },
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, not 1")]
    TraceNotOne(f64),
    #[error("matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability { index: usize, value: String },
    #[error("probabilities sum to {0}, not 1")]
    SumNotOne(String),
    #[error("epsilon {0} is outside [0, 1]")]
    EpsilonOutOfRange(String),
    #[error("separability index {0} is outside [2^-m, 1]")]
    SeparabilityOutOfRange(String),
    #[error("theoretical separability {0} equals the fully mixed value, so noise cannot be estimated")]
    NoSignal(f64),
    #[error("shots must be positive")]
    ZeroShots,
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

pub type Result<T> = std::result::Result<T, QsimError>;
