//! Head runs: de-clumped counts of runs of length ≥ k, their exact law by dynamic
//! programming, and the cyclic window count used for concentration.

use rand::Rng;

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

fn check(n: usize, p: f64, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(invalid(format!("run length must lie in [1, n], got k={k}, n={n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("head probability must lie in [0,1], got {p}")));
    }
    Ok(())
}

/// Number of maximal head runs of length ≥ k (each run counted once).
pub fn head_runs_count(bits: &[bool], k: usize) -> Result<u64> {
    if k < 1 || k > bits.len() {
        return Err(invalid(format!("run length must lie in [1, n], got k={k}, n={}", bits.len())));
    }
    let mut count = 0;
    let mut streak = 0;
    for &b in bits {
        if b {
            streak += 1;
            if streak == k {
                count += 1;
            }
        } else {
            streak = 0;
        }
    }
    Ok(count)
}

/// λ = p^k((n−k)(1−p) + 1)
pub fn head_runs_mean(n: usize, p: f64, k: usize) -> f64 {
    p.powi(k as i32) * ((n - k) as f64 * (1.0 - p) + 1.0)
}

pub const HEAD_RUNS_MAX_N: usize = 4096;

/// Exact law by dynamic programming over (current streak capped at k, count).
pub fn head_runs_exact_pmf(n: usize, p: f64, k: usize) -> Result<FinitePmf> {
    check(n, p, k)?;
    if n > HEAD_RUNS_MAX_N {
        return Err(SteinError::OracleInfeasible(format!("head-run DP capped at n={HEAD_RUNS_MAX_N}, requested n={n}")));
    }
    let max_count = n / (k + 1) + 1;
    let q = 1.0 - p;
    // state[s][c]
    let mut cur = vec![vec![0.0; max_count + 1]; k + 1];
    cur[0][0] = 1.0;
    for _ in 0..n {
        let mut next = vec![vec![0.0; max_count + 1]; k + 1];
        for s in 0..=k {
            for c in 0..=max_count {
                let m = cur[s][c];
                if m == 0.0 {
                    continue;
                }
                next[0][c] += m * q;
                if s + 1 == k {
                    next[k][c + 1] += m * p;
                } else {
                    next[(s + 1).min(k)][c] += m * p;
                }
            }
        }
        cur = next;
    }
    let mut probs = vec![0.0; max_count + 1];
    for row in &cur {
        for (c, m) in row.iter().enumerate() {
            probs[c] += m;
        }
    }
    FinitePmf::from_noisy(0, probs, 0.0)
}

pub fn head_runs_sampler(n: usize, p: f64, k: usize, rng: &mut RngStream) -> Result<u64> {
    check(n, p, k)?;
    let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
    head_runs_count(&bits, k)
}

/// Dependency neighborhoods of the de-clumped indicators: for each i, the indices j whose
/// windows overlap or abut window i (|i−j| ≤ k), with p_i and p_ij = E[X_i X_j].
pub fn head_runs_neighborhoods(n: usize, p: f64, k: usize) -> Result<(Vec<f64>, Vec<Vec<(usize, f64)>>)> {
    check(n, p, k)?;
    let m = n - k + 1;
    let pk = p.powi(k as i32);
    let pi: Vec<f64> = (0..m).map(|i| if i == 0 { pk } else { (1.0 - p) * pk }).collect();
    let mut nbhd = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::new();
        for j in i.saturating_sub(k)..(i + k + 1).min(m) {
            // de-clumped indicators within distance k cannot both be 1
            let pij = if i == j { pi[i] } else { 0.0 };
            row.push((j, pij));
        }
        nbhd.push(row);
    }
    Ok((pi, nbhd))
}

/// Windows of k heads on a cycle of n coins: W = Σ_i Π_{j=i}^{i+k−1} Y_j, indices mod n.
pub fn cyclic_runs_count(bits: &[bool], k: usize) -> Result<u64> {
    let n = bits.len();
    if k < 1 || k > n {
        return Err(invalid(format!("window length must lie in [1, n], got k={k}, n={n}")));
    }
    Ok((0..n).filter(|&i| (0..k).all(|j| bits[(i + j) % n])).count() as u64)
}

/// μ = n p^k and σ² = μ(1 − p^k + 2 Σ_{i=1}^{k−1}(p^i − p^k)).
pub fn cyclic_runs_moments(n: usize, p: f64, k: usize) -> (f64, f64) {
    let pk = p.powi(k as i32);
    let mu = n as f64 * pk;
    let s: f64 = (1..k).map(|i| p.powi(i as i32) - pk).sum();
    (mu, mu * (1.0 - pk + 2.0 * s))
}

/// Force the window at a uniformly chosen start to be all heads. X^s ≥ X and the count
/// changes by at most 2k − 1.
pub fn cyclic_runs_size_bias_coupler(n: usize, p: f64, k: usize, rng: &mut RngStream) -> Result<CouplingDraw> {
    check(n, p, k)?;
    let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(p)).collect();
    let w = cyclic_runs_count(&bits, k)?;
    let i = rng.random_range(0..n);
    for j in 0..k {
        bits[(i + j) % n] = true;
    }
    let ws = cyclic_runs_count(&bits, k)?;
    if ws < w || ws - w > 2 * k as u64 - 1 {
        return Err(SteinError::ModelBug(format!("window coupling moved count from {w} to {ws}")));
    }
    Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias).with("I", i as f64))
}
