//! Erdős–Rényi graphs: subgraph, isolated-vertex and degree counts, brute-force oracles,
//! and the monotone size-bias couplers.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{choose, FinitePmf, RngStream};
use crate::error::{invalid, Result, SteinError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErGraph {
    n: usize,
    adj: Vec<bool>,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability must lie in [0,1], got {p}")));
    }
    Ok(())
}

impl ErGraph {
    pub fn empty(n: usize) -> Self {
        ErGraph { n, adj: vec![false; n * n] }
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }
    pub fn set_edge(&mut self, i: usize, j: usize, on: bool) {
        assert!(i != j, "no self-loops");
        self.adj[i * self.n + j] = on;
        self.adj[j * self.n + i] = on;
    }
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v * self.n..(v + 1) * self.n].iter().filter(|b| **b).count()
    }
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.has_edge(v, u)).collect()
    }
    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|b| **b).count() / 2
    }
    pub fn clear_vertex(&mut self, v: usize) {
        for u in 0..self.n {
            if u != v {
                self.set_edge(v, u, false);
            }
        }
    }
    /// Graph from a bitmask over the pairs (0,1),(0,2),…,(n−2,n−1).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut g = ErGraph::empty(n);
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> bit & 1 == 1 {
                    g.set_edge(i, j, true);
                }
                bit += 1;
            }
        }
        g
    }
}

pub fn er_sample(n: usize, p: f64, rng: &mut RngStream) -> Result<ErGraph> {
    check_p(p)?;
    let mut g = ErGraph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

pub fn er_triangles(g: &ErGraph) -> u64 {
    let n = g.n;
    let mut c = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                continue;
            }
            for k in j + 1..n {
                if g.has_edge(i, k) && g.has_edge(j, k) {
                    c += 1;
                }
            }
        }
    }
    c
}

pub fn er_isolated(g: &ErGraph) -> u64 {
    (0..g.n).filter(|&v| g.degree(v) == 0).count() as u64
}

/// Number of vertices of degree exactly d.
pub fn er_degree_d(g: &ErGraph, d: usize) -> u64 {
    (0..g.n).filter(|&v| g.degree(v) == d).count() as u64
}

/// Number of distinct k-cycles (as subgraphs). Cost O(n^k); intended for n ≤ 12.
pub fn er_kcycles(g: &ErGraph, k: usize) -> Result<u64> {
    if k < 3 || k > g.n {
        return Err(invalid(format!("cycle length must lie in [3, n], got k={k}, n={}", g.n)));
    }
    let mut count = 0u64;
    let mut path = Vec::with_capacity(k);
    let mut used = vec![false; g.n];
    for s in 0..g.n {
        path.clear();
        path.push(s);
        used[s] = true;
        extend_cycles(g, k, s, &mut path, &mut used, &mut count);
        used[s] = false;
    }
    // every cycle is found once per direction from its smallest vertex
    Ok(count / 2)
}

fn extend_cycles(g: &ErGraph, k: usize, s: usize, path: &mut Vec<usize>, used: &mut [bool], count: &mut u64) {
    let last = *path.last().unwrap();
    if path.len() == k {
        if g.has_edge(last, s) {
            *count += 1;
        }
        return;
    }
    for v in s + 1..g.n {
        if !used[v] && g.has_edge(last, v) {
            used[v] = true;
            path.push(v);
            extend_cycles(g, k, s, path, used, count);
            path.pop();
            used[v] = false;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErStatistic {
    Edges,
    Triangles,
    Isolated,
    Degree(usize),
    DegreeAtLeast(usize),
    DegreeAtMost(usize),
    KCycles(usize),
}

pub fn er_statistic(g: &ErGraph, stat: ErStatistic) -> Result<u64> {
    Ok(match stat {
        ErStatistic::Edges => g.edge_count() as u64,
        ErStatistic::Triangles => er_triangles(g),
        ErStatistic::Isolated => er_isolated(g),
        ErStatistic::Degree(d) => er_degree_d(g, d),
        ErStatistic::DegreeAtLeast(d) => (0..g.n).filter(|&v| g.degree(v) >= d).count() as u64,
        ErStatistic::DegreeAtMost(d) => (0..g.n).filter(|&v| g.degree(v) <= d).count() as u64,
        ErStatistic::KCycles(k) => er_kcycles(g, k)?,
    })
}

pub const ER_EXACT_MAX_N: usize = 6;

/// Exact pmf of a statistic by enumerating all 2^{C(n,2)} graphs.
pub fn er_exact_statistic_pmf(n: usize, p: f64, stat: ErStatistic) -> Result<FinitePmf> {
    check_p(p)?;
    if n > ER_EXACT_MAX_N {
        return Err(SteinError::OracleInfeasible(format!(
            "graph enumeration capped at n={ER_EXACT_MAX_N}, requested n={n}"
        )));
    }
    let m = n * n.saturating_sub(1) / 2;
    let mut mass: BTreeMap<u64, f64> = BTreeMap::new();
    for mask in 0u64..(1u64 << m) {
        let e = mask.count_ones() as i32;
        let w = p.powi(e) * (1.0 - p).powi(m as i32 - e);
        if w == 0.0 {
            continue;
        }
        let g = ErGraph::from_mask(n, mask);
        *mass.entry(er_statistic(&g, stat)?).or_insert(0.0) += w;
    }
    let top = *mass.keys().next_back().unwrap_or(&0);
    let mut probs = vec![0.0; top as usize + 1];
    for (k, v) in mass {
        probs[k as usize] = v;
    }
    FinitePmf::from_noisy(0, probs, 0.0)
}

/// |Γ_α^t| for H a k-cycle in K_n: copies β ≠ α with exactly t edges not in α, t = 1..k−1.
pub fn kcycle_overlap_counts(n: usize, k: usize) -> Result<Vec<u64>> {
    if k < 3 || k > n {
        return Err(invalid(format!("cycle length must lie in [3, n], got k={k}, n={n}")));
    }
    if n > 12 {
        return Err(SteinError::OracleInfeasible(format!("cycle enumeration capped at n=12, requested n={n}")));
    }
    let cycles = all_cycles(n, k);
    let alpha = &cycles[0];
    let mut counts = vec![0u64; k];
    for beta in &cycles[1..] {
        let outside = beta.iter().filter(|e| !alpha.contains(e)).count();
        if outside >= 1 && outside < k {
            counts[outside] += 1;
        }
    }
    Ok(counts[1..].to_vec())
}

// edge sets of all k-cycles of K_n, each edge as (min, max)
fn all_cycles(n: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut path = vec![];
    fn rec(n: usize, k: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        if path.len() == k {
            // fix direction: second vertex smaller than last
            if path[1] < path[k - 1] {
                let mut edges: Vec<(usize, usize)> = (0..k)
                    .map(|i| {
                        let (a, b) = (path[i], path[(i + 1) % k]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                edges.sort();
                out.push(edges);
            }
            return;
        }
        for v in path[0] + 1..n {
            if !path.contains(&v) {
                path.push(v);
                rec(n, k, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        path.clear();
        path.push(s);
        rec(n, k, &mut path, &mut out);
    }
    out
}

/// Number of k-cycles in K_n: C(n,k)(k−1)!/2.
pub fn kcycle_copies(n: usize, k: usize) -> f64 {
    let mut f = 1.0;
    for i in 1..k {
        f *= i as f64;
    }
    choose(n as u64, k as u64) * f / 2.0
}

/// Size-bias coupling for the isolated-vertex count: erase all edges at a uniformly chosen
/// vertex I. The coupled count never decreases at any other vertex.
pub fn er_isolated_size_bias_coupler(n: usize, p: f64, rng: &mut RngStream) -> Result<CouplingDraw> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut g = er_sample(n, p, rng)?;
    let before: Vec<bool> = (0..n).map(|v| g.degree(v) == 0).collect();
    let w = before.iter().filter(|b| **b).count();
    let i = rng.random_range(0..n);
    g.clear_vertex(i);
    let after: Vec<bool> = (0..n).map(|v| g.degree(v) == 0).collect();
    for j in 0..n {
        if before[j] && !after[j] {
            return Err(SteinError::ModelBug(format!("vertex {j} lost isolation under the coupling")));
        }
    }
    let ws = after.iter().filter(|b| **b).count();
    Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias)
        .with("I", i as f64)
        .with("x_i", before[i] as u8 as f64))
}

/// Size-bias coupling for k-cycle counts: add the edges of a uniformly chosen copy α of the
/// k-cycle. Counts can only increase.
pub fn er_kcycle_size_bias_coupler(n: usize, p: f64, k: usize, rng: &mut RngStream) -> Result<CouplingDraw> {
    if k < 3 || k > n {
        return Err(invalid(format!("cycle length must lie in [3, n], got k={k}, n={n}")));
    }
    let mut g = er_sample(n, p, rng)?;
    let w = er_kcycles(&g, k)?;
    let perm = crate::dist::sample_uniform_permutation(n, rng)?;
    let alpha = &perm[..k];
    let present = (0..k).all(|i| g.has_edge(alpha[i], alpha[(i + 1) % k]));
    for i in 0..k {
        g.set_edge(alpha[i], alpha[(i + 1) % k], true);
    }
    let ws = er_kcycles(&g, k)?;
    if ws < w {
        return Err(SteinError::ModelBug("cycle count decreased after adding edges".into()));
    }
    Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias).with("x_alpha", present as u8 as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeMode {
    AtLeast,
    AtMost,
}

fn binomial_conditional(n: u64, p: f64, d: usize, mode: DegreeMode, rng: &mut RngStream) -> Result<usize> {
    // rejection from Bin(n, p) restricted to the target side; callers only reach this when
    // that side has positive probability
    let b = Binomial::new(n, p).map_err(|e| invalid(e.to_string()))?;
    for _ in 0..10_000_000 {
        let k = b.sample(rng) as usize;
        let ok = match mode {
            DegreeMode::AtLeast => k >= d,
            DegreeMode::AtMost => k <= d,
        };
        if ok {
            return Ok(k);
        }
    }
    Err(SteinError::ModelBug("conditional degree law too thin for rejection".into()))
}

/// Size-bias coupling for the number of vertices with degree ≥ d (or ≤ d): at a uniformly
/// chosen vertex v, move its degree into the target set by adding (or erasing) uniformly
/// chosen edges, with the new degree drawn from the conditional binomial law. Edges are
/// only added (resp. erased), so the coupling is monotone.
pub fn er_degree_size_bias_coupler(n: usize, p: f64, d: usize, mode: DegreeMode, rng: &mut RngStream) -> Result<CouplingDraw> {
    if n < 2 || d > n - 1 {
        return Err(invalid(format!("degree {d} out of range for n={n}")));
    }
    check_p(p)?;
    let impossible = match mode {
        DegreeMode::AtLeast => p == 0.0 && d > 0,
        DegreeMode::AtMost => p == 1.0 && d < n - 1,
    };
    if impossible {
        return Err(invalid("statistic is identically zero; size bias undefined"));
    }
    let stat = match mode {
        DegreeMode::AtLeast => ErStatistic::DegreeAtLeast(d),
        DegreeMode::AtMost => ErStatistic::DegreeAtMost(d),
    };
    let mut g = er_sample(n, p, rng)?;
    let w = er_statistic(&g, stat)?;
    let v = rng.random_range(0..n);
    let deg = g.degree(v);
    let inside = match mode {
        DegreeMode::AtLeast => deg >= d,
        DegreeMode::AtMost => deg <= d,
    };
    if !inside {
        let target = binomial_conditional((n - 1) as u64, p, d, mode, rng)?;
        match mode {
            DegreeMode::AtLeast => {
                let mut free: Vec<usize> = (0..n).filter(|&u| u != v && !g.has_edge(v, u)).collect();
                for _ in deg..target {
                    let idx = rng.random_range(0..free.len());
                    let u = free.swap_remove(idx);
                    g.set_edge(v, u, true);
                }
            }
            DegreeMode::AtMost => {
                let mut nb = g.neighbors(v);
                for _ in target..deg {
                    let idx = rng.random_range(0..nb.len());
                    let u = nb.swap_remove(idx);
                    g.set_edge(v, u, false);
                }
            }
        }
    }
    let ws = er_statistic(&g, stat)?;
    Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias).with("I", v as f64))
}

/// Closed-form mean and variance of the triangle count.
pub fn triangle_moments(n: usize, p: f64) -> (f64, f64) {
    let c = choose(n as u64, 3);
    let p3 = p * p * p;
    let mean = c * p3;
    let var = c * p3 * (1.0 - p3 + 3.0 * (n as f64 - 3.0) * p * p * (1.0 - p));
    (mean, var)
}

/// Closed-form mean and variance of the isolated-vertex count.
pub fn isolated_moments(n: usize, p: f64) -> (f64, f64) {
    let nf = n as f64;
    let q = 1.0 - p;
    let mean = nf * q.powi(n as i32 - 1);
    let var = mean * (1.0 + (nf * p - 1.0) * q.powi(n as i32 - 2));
    (mean, var)
}
