//! Simulation toolkit for quantum memory devices.
//!
//! The core is generic over the real scalar ([`Scalar`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64` (and `f32`
//! where a lower-precision variant is useful).

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod scalar;
pub mod memdev;
pub mod metrics;
pub mod qmasm;
pub mod qram;
pub mod statevec;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Seedable generator used for every stochastic operation.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the simulation generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    <SimRng as rand::SeedableRng>::seed_from_u64(seed)
}

pub type StateVector = statevec::StateVector<f64>;
pub type StateVectorF32 = statevec::StateVector<f32>;
pub type GateSpec = statevec::GateSpec<f64>;
pub type GateSpecF32 = statevec::GateSpec<f32>;
pub type RunResult = qmasm::RunResult<f64>;
