//! Curie–Weiss spins under the single-site Gibbs sampler.

use rand::Rng;

use crate::dist::{ln_choose, FinitePmf, RngStream};
use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SpinConfig {
    spins: Vec<i8>,
    sum: i64,
    pub beta: f64,
    pub h: f64,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>, beta: f64, h: f64) -> Result<Self> {
        if spins.len() < 2 {
            return Err(invalid("need at least two sites"));
        }
        if spins.iter().any(|s| *s != 1 && *s != -1) {
            return Err(invalid("spins must be ±1"));
        }
        let sum = spins.iter().map(|s| *s as i64).sum();
        Ok(SpinConfig { spins, sum, beta, h })
    }
    pub fn n(&self) -> usize {
        self.spins.len()
    }
    pub fn spins(&self) -> &[i8] {
        &self.spins
    }
    pub fn magnetization(&self) -> f64 {
        self.sum as f64 / self.n() as f64
    }

    // β m_i + β h with m_i = (1/n) Σ_{j≠i} σ_j
    fn field(&self, own: i8) -> f64 {
        let n = self.n() as f64;
        self.beta * (self.sum - own as i64) as f64 / n + self.beta * self.h
    }

    /// f(σ) = m − (1/n) Σ_i tanh(β m_i + β h)
    pub fn f_stat(&self) -> f64 {
        let n = self.n() as f64;
        let plus = ((self.n() as i64 + self.sum) / 2) as f64;
        let minus = n - plus;
        self.magnetization() - (plus * self.field(1).tanh() + minus * self.field(-1).tanh()) / n
    }

    /// Resample one uniform site from its conditional law; returns (site, old, new).
    pub fn gibbs_step(&mut self, rng: &mut RngStream) -> (usize, i8, i8) {
        let i = rng.random_range(0..self.n());
        let old = self.spins[i];
        let p_plus = 0.5 * (1.0 + self.field(old).tanh());
        let new = if rng.random_bool(p_plus.clamp(0.0, 1.0)) { 1 } else { -1 };
        self.spins[i] = new;
        self.sum += (new - old) as i64;
        (i, old, new)
    }

    pub fn sweep(&mut self, rng: &mut RngStream) {
        for _ in 0..self.n() {
            self.gibbs_step(rng);
        }
    }
}

/// Gibbs sampler from an iid uniform start after `burn_in` single-site steps.
pub fn curie_weiss_gibbs(n: usize, beta: f64, h: f64, burn_in: usize, rng: &mut RngStream) -> Result<SpinConfig> {
    if n < 2 {
        return Err(invalid("need at least two sites"));
    }
    if !beta.is_finite() || !h.is_finite() || beta < 0.0 {
        return Err(invalid("β must be finite and nonnegative, h finite"));
    }
    let spins = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let mut c = SpinConfig::new(spins, beta, h)?;
    for _ in 0..burn_in {
        c.gibbs_step(rng);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CwPair {
    /// F(σ, σ′) = Σ_i (σ_i − σ′_i)
    pub big_f: f64,
    pub f_before: f64,
    pub f_after: f64,
}

pub fn cw_pair_step(config: &mut SpinConfig, rng: &mut RngStream) -> CwPair {
    let f_before = config.f_stat();
    let (_, old, new) = config.gibbs_step(rng);
    CwPair { big_f: (old - new) as f64, f_before, f_after: config.f_stat() }
}

/// Exact stationary law of the number of + spins:
/// P(k) ∝ C(n,k) exp{(β/2n)(s² − n) + βhs}, s = 2k − n.
pub fn cw_exact_plus_count(n: usize, beta: f64, h: f64) -> Result<FinitePmf> {
    if n < 2 {
        return Err(invalid("need at least two sites"));
    }
    let nf = n as f64;
    let logw: Vec<f64> = (0..=n)
        .map(|k| {
            let s = 2.0 * k as f64 - nf;
            ln_choose(n as u64, k as u64) + beta / (2.0 * nf) * (s * s - nf) + beta * h * s
        })
        .collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    FinitePmf::from_noisy(0, w.iter().map(|x| x / z).collect(), 0.0)
}
