//! Red balls in a sample drawn without replacement.

use rand::Rng;

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{ln_choose, FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

/// N balls of which `n_red` are red; a sample of size m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hypergeometric {
    pub total: usize,
    pub n_red: usize,
    pub m: usize,
}

impl Hypergeometric {
    pub fn new(total: usize, n_red: usize, m: usize) -> Result<Self> {
        if n_red < 1 || m < 1 || n_red > total || m > total {
            return Err(invalid(format!("need 1 ≤ n_red, m ≤ N; got N={total}, n_red={n_red}, m={m}")));
        }
        Ok(Hypergeometric { total, n_red, m })
    }

    pub fn mean(&self) -> f64 {
        (self.n_red * self.m) as f64 / self.total as f64
    }

    /// nm(N−n)(N−m)/(N²(N−1))
    pub fn variance(&self) -> f64 {
        let (nn, n, m) = (self.total as f64, self.n_red as f64, self.m as f64);
        if self.total < 2 {
            return 0.0;
        }
        n * m * (nn - n) * (nn - m) / (nn * nn * (nn - 1.0))
    }

    pub fn exact_pmf(&self) -> Result<FinitePmf> {
        let (nn, n, m) = (self.total as u64, self.n_red as u64, self.m as u64);
        let lo = (n + m).saturating_sub(nn);
        let hi = n.min(m);
        let denom = ln_choose(nn, m);
        let probs: Vec<f64> = (lo..=hi).map(|j| (ln_choose(n, j) + ln_choose(nn - n, m - j) - denom).exp()).collect();
        FinitePmf::from_noisy(lo as i64, probs, 0.0)
    }

    fn sample_set(&self, rng: &mut RngStream) -> Vec<usize> {
        // partial Fisher–Yates; balls 0..n_red are red
        let mut balls: Vec<usize> = (0..self.total).collect();
        for i in 0..self.m {
            let j = rng.random_range(i..self.total);
            balls.swap(i, j);
        }
        balls.truncate(self.m);
        balls
    }

    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        self.sample_set(rng).iter().filter(|b| **b < self.n_red).count() as u64
    }

    /// Pick red ball I uniformly; if it is not in the sample, add it and put back a uniformly
    /// chosen sampled ball. Other red indicators can only drop.
    pub fn size_bias_coupler(&self, rng: &mut RngStream) -> Result<CouplingDraw> {
        let mut sample = self.sample_set(rng);
        let w = sample.iter().filter(|b| **b < self.n_red).count();
        let i = rng.random_range(0..self.n_red);
        let before = sample.clone();
        if !sample.contains(&i) {
            let out = rng.random_range(0..self.m);
            sample[out] = i;
        }
        for j in 0..self.n_red {
            if j != i && sample.contains(&j) && !before.contains(&j) {
                return Err(SteinError::ModelBug(format!("red ball {j} entered the sample under the coupling")));
            }
        }
        let ws = sample.iter().filter(|b| **b < self.n_red).count();
        Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias).with("I", i as f64))
    }
}
