//! Executable fine-grained reductions between k-SAT, orthogonal vectors /
//! bichromatic subset query, {0,1}-coefficient lattice problems, bichromatic
//! closest pair and approximate nearest neighbour, with exact arithmetic and
//! brute-force oracles for every problem.

pub mod barrier;
pub mod bench;
pub mod budget;
pub mod error;
pub mod instances;
pub mod metric;
pub mod oracles;
pub mod reductions;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
