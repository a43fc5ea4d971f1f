//! Shapley value estimation through the odd component of a set function.
//!
//! The crate bundles exact oracles (brute-force Shapley values, Möbius and
//! Fourier transforms), a paired coalition sampler, constrained weighted
//! regression in the unanimity and Fourier bases, a gradient-boosted-tree
//! proxy with exact spectral extraction, and the estimators built on them.
//! See the `examples/` directory for one runnable program per capability.

pub mod bench;
pub mod coalition;
pub mod error;
pub mod estimators;
pub mod game;
pub mod io;
pub mod proxy;
pub mod regression;
pub mod rng;
pub mod sampling;
pub mod transforms;

pub use coalition::Coalition;
pub use error::{Error, Result};
pub use game::{Game, GameTable, ValueFunction};
pub use transforms::{Attribution, Basis, CoefficientMap};
