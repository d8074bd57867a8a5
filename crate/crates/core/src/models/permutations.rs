//! Fixed points of uniform random permutations and the random-transposition pair.

use rand::Rng;

use crate::dist::{sample_uniform_permutation, FinitePmf, KahanAcc, RngStream};
use crate::error::{invalid, Result};

pub fn fixed_points(perm: &[usize]) -> u64 {
    perm.iter().enumerate().filter(|(i, p)| *i == **p).count() as u64
}

pub fn two_cycles(perm: &[usize]) -> u64 {
    perm.iter().enumerate().filter(|(i, p)| **p > *i && perm[**p] == *i).count() as u64
}

pub fn permutation_fixed_points(n: usize, rng: &mut RngStream) -> Result<u64> {
    if n < 2 {
        return Err(invalid(format!("need n ≥ 2, got {n}")));
    }
    Ok(fixed_points(&sample_uniform_permutation(n, rng)?))
}

/// P(W=j) = (1/j!) Σ_{i=0}^{n−j} (−1)^i / i!
pub fn fp_exact_pmf(n: usize) -> Result<FinitePmf> {
    if n < 2 {
        return Err(invalid(format!("need n ≥ 2, got {n}")));
    }
    let mut inv_fact = vec![1.0f64; n + 1];
    for i in 1..=n {
        inv_fact[i] = inv_fact[i - 1] / i as f64;
    }
    let probs: Vec<f64> = (0..=n)
        .map(|j| {
            let mut acc = KahanAcc::default();
            for i in 0..=(n - j) {
                acc.add(if i % 2 == 0 { inv_fact[i] } else { -inv_fact[i] });
            }
            (inv_fact[j] * acc.value()).max(0.0)
        })
        .collect();
    FinitePmf::from_noisy(0, probs, 0.0)
}

/// One step of the transposition chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FpStep {
    pub w: u64,
    pub w_next: u64,
    pub w2: u64,
    /// (n − W − 2W₂)/C(n,2)
    pub up_prob: f64,
    /// W(n − W)/C(n,2)
    pub down_prob: f64,
}

/// Random walk on permutations by right multiplication with a uniform transposition,
/// started from the uniform (stationary) law.
#[derive(Clone, Debug)]
pub struct FixedPointsChain {
    perm: Vec<usize>,
}

impl FixedPointsChain {
    pub fn new(n: usize, rng: &mut RngStream) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("need n ≥ 2, got {n}")));
        }
        Ok(FixedPointsChain { perm: sample_uniform_permutation(n, rng)? })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn step(&mut self, rng: &mut RngStream) -> FpStep {
        let n = self.perm.len();
        let w = fixed_points(&self.perm);
        let w2 = two_cycles(&self.perm);
        let pairs = (n * (n - 1) / 2) as f64;
        let up_prob = (n as f64 - w as f64 - 2.0 * w2 as f64) / pairs;
        let down_prob = (w * (n as u64 - w)) as f64 / pairs;
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        self.perm.swap(i, j);
        FpStep { w, w_next: fixed_points(&self.perm), w2, up_prob, down_prob }
    }
}
