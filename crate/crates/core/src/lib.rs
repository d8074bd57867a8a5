//! Stein's method toolkit: probability metrics, characterizing operators and their solutions,
//! bias couplings, error-bound calculators, concentration bounds and exact oracles for the
//! classic applications (random graphs, runs, urns, permutations, branching trees).

pub mod error;
pub mod dist;
pub mod quad;
pub mod metrics;
pub mod stein_eq;
pub mod couplings;
pub mod models;
pub mod bounds;
pub mod concentration;
pub mod harness;

pub use error::{Result, SteinError};
