//! The anti-voter chain on an r-regular graph.

use rand::Rng;
use serde::Serialize;

use crate::couplings::MeanEstimate;
use crate::dist::{FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    adj: Vec<Vec<usize>>,
    r: usize,
}

impl RegularGraph {
    /// Validates symmetry, regularity, and rejects bipartite graphs and cycles.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at {u}")));
            }
            if adj[u].contains(&v) {
                return Err(invalid(format!("repeated edge ({u},{v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        let r = adj.first().map(|a| a.len()).unwrap_or(0);
        if n < 3 || r == 0 || adj.iter().any(|a| a.len() != r) {
            return Err(invalid("graph must be r-regular with r ≥ 1 and n ≥ 3"));
        }
        let g = RegularGraph { adj, r };
        if !g.connected() {
            return Err(invalid("graph must be connected"));
        }
        if r == 2 {
            return Err(invalid("degenerate graph: a cycle"));
        }
        if g.bipartite() {
            return Err(invalid("degenerate graph: bipartite"));
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::from_edges(n, &edges)
    }

    /// One "u v" edge per line, 0-indexed; blank lines and '#' comments ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(SteinError::Config(format!("line {}: expected 'u v'", ln + 1)));
            }
            let parse = |s: &str| s.parse::<usize>().map_err(|_| SteinError::Config(format!("line {}: bad vertex '{s}'", ln + 1)));
            let (u, v) = (parse(parts[0])?, parse(parts[1])?);
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v));
        }
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    fn connected(&self) -> bool {
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|s| *s)
    }

    fn bipartite(&self) -> bool {
        let mut color = vec![-1i8; self.n()];
        color[0] = 0;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if color[u] < 0 {
                    color[u] = 1 - color[v];
                    stack.push(u);
                } else if color[u] == color[v] {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct AntiVoter {
    graph: RegularGraph,
    x: Vec<i8>,
    sum: i64,
}

impl AntiVoter {
    pub fn new(graph: RegularGraph, x: Vec<i8>) -> Result<Self> {
        if x.len() != graph.n() || x.iter().any(|s| *s != 1 && *s != -1) {
            return Err(invalid("labels must be ±1, one per vertex"));
        }
        let sum = x.iter().map(|s| *s as i64).sum();
        Ok(AntiVoter { graph, x, sum })
    }

    pub fn random_start(graph: RegularGraph, rng: &mut RngStream) -> Result<Self> {
        let x = (0..graph.n()).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        Self::new(graph, x)
    }

    /// Σ_i X_i
    pub fn sum(&self) -> i64 {
        self.sum
    }

    /// Q = Σ_i Σ_{j∈N_i} X_i X_j
    pub fn q(&self) -> i64 {
        (0..self.graph.n())
            .map(|i| self.graph.neighbors(i).iter().map(|&j| (self.x[i] * self.x[j]) as i64).sum::<i64>())
            .sum()
    }

    /// Pick a uniform vertex and a uniform neighbor; set the vertex to the opposite of the
    /// neighbor. Returns the sums before and after.
    pub fn step(&mut self, rng: &mut RngStream) -> (i64, i64) {
        let before = self.sum;
        let v = rng.random_range(0..self.graph.n());
        let nb = self.graph.neighbors(v);
        let u = nb[rng.random_range(0..nb.len())];
        let new = -self.x[u];
        self.sum += (new - self.x[v]) as i64;
        self.x[v] = new;
        (before, self.sum)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AntiVoterRun {
    pub steps: usize,
    /// E[Σ X_i] (batch means)
    pub mean: MeanEstimate,
    /// σ_n² = Var(Σ X_i), from the batch-means second moment
    pub sigma2: f64,
    pub sigma2_ci: f64,
    pub var_q: f64,
    pub var_q_ci: f64,
}

/// Long-run estimates of σ_n² and Var(Q), with 2.576-se batch-means radii.
pub fn antivoter_chain(graph: RegularGraph, burn_in: usize, steps: usize, rng: &mut RngStream) -> Result<AntiVoterRun> {
    if steps < 1000 {
        return Err(SteinError::InsufficientSamples { need: 1000, got: steps });
    }
    let mut chain = AntiVoter::random_start(graph, rng)?;
    for _ in 0..burn_in {
        chain.step(rng);
    }
    let mut s = Vec::with_capacity(steps);
    let mut q = Vec::with_capacity(steps);
    for _ in 0..steps {
        chain.step(rng);
        s.push(chain.sum() as f64);
        q.push(chain.q() as f64);
    }
    let mean = MeanEstimate::batch_means(&s, 50);
    let qm = MeanEstimate::batch_means(&q, 50);
    let s2: Vec<f64> = s.iter().map(|x| (x - mean.mean).powi(2)).collect();
    let q2: Vec<f64> = q.iter().map(|x| (x - qm.mean).powi(2)).collect();
    let sig = MeanEstimate::batch_means(&s2, 50);
    let vq = MeanEstimate::batch_means(&q2, 50);
    Ok(AntiVoterRun { steps, mean, sigma2: sig.mean, sigma2_ci: 2.576 * sig.se, var_q: vq.mean, var_q_ci: 2.576 * vq.se })
}

/// Exact stationary law of Σ X_i for the chain on K_n. The number k of +1 labels is a
/// birth–death chain on {1, …, n−1} (0 and n are transient) with
/// π(k+1)/π(k) = (n−k)(n−k−1)/((k+1)k).
pub fn antivoter_complete_stationary(n: usize) -> Result<FinitePmf> {
    if !(3..=10_000).contains(&n) {
        return Err(invalid(format!("need 3 ≤ n ≤ 10000, got {n}")));
    }
    // log weights to keep large n finite
    let mut lw = vec![f64::NEG_INFINITY; n + 1];
    lw[1] = 0.0;
    for k in 1..n - 1 {
        let (nk, kf) = ((n - k) as f64, k as f64);
        lw[k + 1] = lw[k] + (nk * (nk - 1.0)).ln() - ((kf + 1.0) * kf).ln();
    }
    let top = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = lw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = w.iter().sum();
    // S = 2k − n; odd offsets between consecutive k are filled with zero mass
    let mut probs = vec![0.0; 2 * n + 1];
    for (k, wk) in w.iter().enumerate() {
        probs[2 * k] = wk / z;
    }
    FinitePmf::from_noisy(-(n as i64), probs, 0.0)
}
