//! Critical Galton–Watson processes and the size-biased spine tree, which contains coupled
//! copies of Y_n = (Z_n | Z_n > 0) and its equilibrium transform.

use rand::Rng;
use serde::Serialize;

use crate::couplings::size_bias_pmf;
use crate::dist::{sample_uniform01, FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

#[derive(Clone, Debug)]
pub struct GwOffspring {
    pmf: FinitePmf,
    biased: FinitePmf,
}

impl GwOffspring {
    pub fn new(pmf: FinitePmf) -> Result<Self> {
        if pmf.min_support() < 0 {
            return Err(invalid("offspring counts are nonnegative"));
        }
        if pmf.tail_mass() > 1e-12 {
            return Err(invalid("offspring law must have (numerically) finite support"));
        }
        let mean = pmf.mean();
        if (mean - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("offspring mean must be 1 (critical), got {mean}")));
        }
        if !(pmf.variance() > 0.0) {
            return Err(invalid("offspring variance must be positive"));
        }
        let biased = size_bias_pmf(&pmf)?;
        Ok(GwOffspring { pmf, biased })
    }
    pub fn pmf(&self) -> &FinitePmf {
        &self.pmf
    }
    pub fn size_biased(&self) -> &FinitePmf {
        &self.biased
    }
    pub fn sigma2(&self) -> f64 {
        self.pmf.variance()
    }

    /// Generation size after `gens` generations started from `start` individuals.
    pub fn generation(&self, start: u64, gens: usize, rng: &mut RngStream) -> u64 {
        let mut z = start;
        for _ in 0..gens {
            if z == 0 {
                break;
            }
            z = (0..z).map(|_| self.pmf.sample(rng) as u64).sum();
        }
        z
    }
}

/// P(Z_n > 0) from the generating-function recursion q_k = φ(q_{k−1}), q_0 = 0.
pub fn gw_survival(offspring: &FinitePmf, n: usize) -> f64 {
    let mut q = 0.0f64;
    for _ in 0..n {
        q = offspring.expect(|k| q.powi(k as i32));
    }
    1.0 - q
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelStats {
    /// offspring count of v_{j−1} (size biased)
    pub x: u64,
    pub l: u64,
    pub r: u64,
    /// the resampled R*_{n,j}
    pub r_star: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpineTreeStats {
    pub n: usize,
    pub s_n: u64,
    pub l_n: u64,
    pub r_n: u64,
    pub levels: Vec<LevelStats>,
    /// Y_n realized as R*_n
    pub y: u64,
    /// Y_n^e = R_n − U
    pub y_e: f64,
}

// offspring of v_{j−1}, position of v_j, and generation-n descendants left and right of it
fn spine_level(off: &GwOffspring, remaining: usize, rng: &mut RngStream) -> Result<(u64, u64, u64)> {
    let k = off.biased.sample(rng) as u64;
    if k == 0 {
        return Err(SteinError::ModelBug("size-biased offspring count was zero".into()));
    }
    let pos = rng.random_range(0..k);
    let l = off.generation(pos, remaining, rng);
    let r = off.generation(k - 1 - pos, remaining, rng);
    Ok((k, l, r))
}

pub fn gw_spine_tree(off: &GwOffspring, n: usize, rng: &mut RngStream) -> Result<SpineTreeStats> {
    if n == 0 {
        return Err(invalid("generation must be at least 1"));
    }
    let mut levels = Vec::with_capacity(n);
    for j in 1..=n {
        let (x, l, r) = spine_level(off, n - j, rng)?;
        let r_star = if l == 0 {
            r
        } else {
            // independent copy of R_{n,j} conditioned on L_{n,j} = 0, by rejection
            let mut tries = 0u64;
            loop {
                let (_, l2, r2) = spine_level(off, n - j, rng)?;
                if l2 == 0 {
                    break r2;
                }
                tries += 1;
                if tries > 10_000_000 {
                    return Err(SteinError::ModelBug("conditioning event L_{n,j}=0 too rare".into()));
                }
            }
        };
        levels.push(LevelStats { x, l, r, r_star });
    }
    let l_n: u64 = levels.iter().map(|s| s.l).sum();
    let r_n: u64 = 1 + levels.iter().map(|s| s.r).sum::<u64>();
    let y: u64 = 1 + levels.iter().map(|s| s.r_star).sum::<u64>();
    let u = sample_uniform01(rng);
    Ok(SpineTreeStats { n, s_n: l_n + r_n, l_n, r_n, levels, y, y_e: r_n as f64 - u })
}
