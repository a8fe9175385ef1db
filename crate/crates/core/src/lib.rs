//! Compiled modular exponentiation for small instances of Shor's algorithm:
//! number theory, truth tables, reversible circuits, synthesis and a dense
//! state-vector simulator.

pub mod circuit;
pub mod modexp_tables;
pub mod numtheory;
pub mod scalar;
pub mod synth;
pub mod qsim;

/// Double-precision state vector.
pub type StateVector64 = qsim::StateVector<f64>;
/// Single-precision state vector.
pub type StateVector32 = qsim::StateVector<f32>;
/// Double-precision reduced density matrix.
pub type DensityMatrix64 = qsim::DensityMatrix<f64>;
/// Double-precision probability distribution.
pub type ProbDist64 = qsim::ProbDist<f64>;
