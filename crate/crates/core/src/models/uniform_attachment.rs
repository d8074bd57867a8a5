//! Uniform attachment: in-degree of a uniformly chosen node.

use rand::Rng;

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

pub const UA_MAX_N: usize = 2000;

/// Grow the graph (node 1 starts with a loop; node m links to a uniform node among 1..m)
/// and return the in-degree of a uniform node.
pub fn uniform_attachment_indegree(n: usize, rng: &mut RngStream) -> Result<u64> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut indeg = vec![0u64; n];
    indeg[0] = 1;
    for m in 2..=n {
        indeg[rng.random_range(0..m)] += 1;
    }
    Ok(indeg[rng.random_range(0..n)])
}

/// μ_i = 1/(n − i + 1), i = 1..n
fn mu(n: usize, i: usize) -> f64 {
    1.0 / (n - i + 1) as f64
}

/// Exact law of W = Σ_{i≤N} X_i with N uniform on {1..n}, averaging the Poisson-binomial
/// prefix laws.
pub fn ua_exact_pmf(n: usize) -> Result<FinitePmf> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n > UA_MAX_N {
        return Err(SteinError::OracleInfeasible(format!("convolution oracle capped at n={UA_MAX_N}, requested n={n}")));
    }
    let mut prefix = vec![1.0];
    let mut avg = vec![0.0; n + 1];
    for i in 1..=n {
        let m = mu(n, i);
        let mut next = vec![0.0; prefix.len() + 1];
        for (k, q) in prefix.iter().enumerate() {
            next[k] += q * (1.0 - m);
            next[k + 1] += q * m;
        }
        prefix = next;
        for (k, q) in prefix.iter().enumerate() {
            avg[k] += q / n as f64;
        }
    }
    FinitePmf::from_noisy(0, avg, 0.0)
}

/// (W, W^e) = (Σ_{i≤N} X_i, Σ_{i<N} X_i); they differ by X_N.
pub fn ua_equilibrium_coupler(n: usize, rng: &mut RngStream) -> Result<CouplingDraw> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let big_n = rng.random_range(1..=n);
    let mut we = 0u64;
    for i in 1..big_n {
        we += rng.random_bool(mu(n, i)) as u64;
    }
    let x_n = rng.random_bool(mu(n, big_n)) as u64;
    Ok(CouplingDraw::new((we + x_n) as f64, we as f64, CouplingKind::DiscreteEquilibrium)
        .with("N", big_n as f64)
        .with("x_n", x_n as f64))
}

/// E|W − W^e| = (1/n) Σ_i (n − i + 1)^{−1} = H_n / n
pub fn ua_mean_abs_diff(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum::<f64>() / n as f64
}
