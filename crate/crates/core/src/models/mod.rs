//! Generators, couplers and exact oracles for the worked applications.

pub mod antivoter;
pub mod coupon;
pub mod curie_weiss;
pub mod er;
pub mod geometric_sum;
pub mod gw_spine;
pub mod head_runs;
pub mod hypergeometric;
pub mod permutations;
pub mod uniform_attachment;
