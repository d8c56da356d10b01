//! Classical and simulated-quantum toolkit for knapsack-structured
//! optimization: unit-commitment reduction, knapsack baselines and exact
//! oracles, a dense statevector simulator, copula-QAOA circuits, training
//! and benchmarking metrics.
//!
//! Numerical code is generic over [`Scalar`] (`f32`, `f64`). The `*64`
//! aliases below fix the scalar to `f64`, which is what file formats and
//! the command-line tool use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod copqaoa;
pub mod error;
pub mod knapsack;
pub mod qsim;
pub mod seed;
pub mod train;
pub mod uc;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type KnapsackInstance64 = knapsack::KnapsackInstance<f64>;
pub type KnapsackInstance32 = knapsack::KnapsackInstance<f32>;
pub type SolveResult64 = knapsack::SolveResult<f64>;
