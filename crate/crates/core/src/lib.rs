//! Exact integer Hamiltonian cellular automata.
//!
//! The [`automaton`] module runs the integer recursion exactly, in both time
//! directions. [`continuum`] maps sampled trajectories onto bandlimited waves
//! and checks the continuum equations they satisfy. [`qmbridge`] turns a
//! floating-point Hermitian Hamiltonian into a Gaussian-integer automaton and
//! compares the two evolutions. [`cli`] is the batch front end.
//!
//! Integer code is generic over [`ExactInt`] and floating-point code over
//! [`Real`]; the aliases below pick the usual instantiations.

pub mod automaton;
pub mod cli;
pub mod continuum;
pub mod exactmath;
pub mod qmbridge;
pub mod scalar;

pub use num_bigint::BigInt;

pub use scalar::{ExactInt, Real};

/// Arbitrary-precision Gaussian integer.
pub type Gaussian = exactmath::GaussianInteger<BigInt>;
/// Arbitrary-precision Gaussian-integer matrix.
pub type GaussianMat = exactmath::GaussianMatrix<BigInt>;
/// Arbitrary-precision integer matrix.
pub type IntMat = exactmath::IntMatrix<BigInt>;
pub type Parts = exactmath::HamiltonianParts<BigInt>;
pub type Spec = automaton::AutomatonSpec<BigInt>;
pub type CaSlice = automaton::Slice<BigInt>;
pub type Pair = automaton::StatePair<BigInt>;
pub type Traj = automaton::Trajectory<BigInt>;

/// Checked 64-bit fast path; panics on overflow instead of wrapping.
pub type FastSpec = automaton::AutomatonSpec<i64>;
pub type FastTraj = automaton::Trajectory<i64>;

pub type Wave64 = continuum::SampledWave<f64>;
pub type Spectrum64 = continuum::Spectrum<f64>;
