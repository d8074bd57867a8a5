//! Error-bound calculators, one per approximation theorem.
//!
//! Calculators never sample. Stochastic inputs arrive as [`Estimate`]s carrying their
//! provenance; Monte Carlo confidence radii are pushed through the formula by evaluating it
//! at each input's upper edge (every formula here is monotone in its estimated inputs).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dist::{choose, TargetLaw};
use crate::error::{invalid, Result};
use crate::metrics::Metric;
use crate::models::er::{kcycle_copies, kcycle_overlap_counts};
use crate::models::head_runs::head_runs_mean;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    McEstimate { ci_radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub provenance: Provenance,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, provenance: Provenance::Exact }
    }
    pub fn mc(value: f64, ci_radius: f64) -> Self {
        Estimate { value, provenance: Provenance::McEstimate { ci_radius } }
    }
    pub fn ci_radius(&self) -> f64 {
        match self.provenance {
            Provenance::Exact => 0.0,
            Provenance::McEstimate { ci_radius } => ci_radius,
        }
    }
}

impl From<f64> for Estimate {
    fn from(v: f64) -> Self {
        Estimate::exact(v)
    }
}

/// Sample moments with 99% normal-theory CI radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: Estimate,
    pub variance: Estimate,
    pub abs3: Estimate,
    pub m4: Estimate,
    pub custom: BTreeMap<String, Estimate>,
}

const Z99: f64 = 2.576;

fn mean_estimate(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 { xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Estimate::mc(m, Z99 * (v / n).sqrt())
}

impl MomentSummary {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(crate::SteinError::InsufficientSamples { need: 2, got: xs.len() });
        }
        let mean = mean_estimate(xs);
        let sq: Vec<f64> = xs.iter().map(|x| (x - mean.value).powi(2)).collect();
        let var = mean_estimate(&sq);
        let abs3 = mean_estimate(&xs.iter().map(|x| x.abs().powi(3)).collect::<Vec<_>>());
        let m4 = mean_estimate(&xs.iter().map(|x| x.powi(4)).collect::<Vec<_>>());
        Ok(MomentSummary { mean, variance: var, abs3, m4, custom: BTreeMap::new() })
    }

    pub fn with_custom(mut self, name: &str, xs: &[f64]) -> Self {
        if !xs.is_empty() {
            self.custom.insert(name.to_string(), mean_estimate(xs));
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub metric: Metric,
    pub target: TargetLaw,
    pub value: f64,
    /// radius induced by Monte Carlo inputs; 0 when every input is exact
    pub ci_radius: f64,
    pub inputs: BTreeMap<String, Estimate>,
    /// the formula's addends, in display order
    pub terms: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn upper(&self) -> f64 {
        self.value + self.ci_radius
    }
    pub fn is_vacuous(&self) -> bool {
        matches!(self.metric, Metric::Tv | Metric::Kolmogorov) && self.value > 1.0
    }
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

struct Calc {
    id: &'static str,
    metric: Metric,
    target: TargetLaw,
    inputs: Vec<(&'static str, Estimate)>,
    notes: Vec<String>,
}

impl Calc {
    fn new(id: &'static str, metric: Metric, target: TargetLaw) -> Self {
        Calc { id, metric, target, inputs: Vec::new(), notes: Vec::new() }
    }
    fn input(mut self, name: &'static str, e: impl Into<Estimate>) -> Self {
        self.inputs.push((name, e.into()));
        self
    }
    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    /// `f` maps input values (in declaration order) to named addends.
    fn finish<F>(self, f: F) -> Result<BoundReport>
    where
        F: Fn(&[f64]) -> Vec<(&'static str, f64)>,
    {
        for (name, e) in &self.inputs {
            if !e.value.is_finite() || !(e.ci_radius() >= 0.0) {
                return Err(invalid(format!("{}: input {name} is not a finite estimate", self.id)));
            }
        }
        let x: Vec<f64> = self.inputs.iter().map(|(_, e)| e.value).collect();
        let terms = f(&x);
        let value: f64 = terms.iter().map(|(_, v)| v).sum();
        if !value.is_finite() || value < 0.0 {
            return Err(invalid(format!("{}: bound evaluated to {value}; inputs inconsistent", self.id)));
        }
        let mut ci = 0.0;
        for (i, (_, e)) in self.inputs.iter().enumerate() {
            let r = e.ci_radius();
            if r > 0.0 {
                let mut y = x.clone();
                y[i] += r;
                ci += (f(&y).iter().map(|(_, v)| v).sum::<f64>() - value).abs();
            }
        }
        let mut notes = self.notes;
        if matches!(self.metric, Metric::Tv | Metric::Kolmogorov) && value > 1.0 {
            notes.push("vacuous: exceeds 1".into());
        }
        Ok(BoundReport {
            theorem_id: self.id.to_string(),
            metric: self.metric,
            target: self.target,
            value,
            ci_radius: ci,
            inputs: self.inputs.into_iter().map(|(n, e)| (n.to_string(), e)).collect(),
            terms: terms.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            notes,
        })
    }
}

fn need_nonneg(id: &str, name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(invalid(format!("{id}: {name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn need_pos(id: &str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{id}: {name} must be finite and positive, got {v}")));
    }
    Ok(())
}

fn need_prob(id: &str, name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(format!("{id}: {name} must lie in [0,1], got {v}")));
    }
    Ok(())
}

fn need_a(id: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(invalid(format!("{id}: a must lie in (0,1], got {a}")));
    }
    Ok(())
}

// ---- normal target ----

/// Berry–Esseen for iid sums: 1.88·E|X₁|³/√n.
pub fn be_iid(abs3: impl Into<Estimate>, n: u64) -> Result<BoundReport> {
    let abs3 = abs3.into();
    if abs3.value < 1.0 - 1e-12 {
        return Err(invalid(format!("be_iid: E|X|³ = {} < 1 is inconsistent with unit variance", abs3.value)));
    }
    if n == 0 {
        return Err(invalid("be_iid: n must be at least 1"));
    }
    Calc::new("be_iid", Metric::Kolmogorov, TargetLaw::Normal)
        .input("abs3", abs3)
        .input("n", n as f64)
        .finish(|x| vec![("berry_esseen", 1.88 * x[0] / x[1].sqrt())])
}

/// n^{−3/2}ΣE|X_i|³ + √2/(√π n)·√(ΣE X_i⁴)
pub fn wass_iid_sum(abs3: &[f64], m4: &[f64]) -> Result<BoundReport> {
    let id = "wass_iid_sum";
    if abs3.is_empty() || abs3.len() != m4.len() {
        return Err(invalid(format!("{id}: need equal-length nonempty moment lists")));
    }
    for v in abs3.iter().chain(m4) {
        need_nonneg(id, "moment", *v)?;
    }
    Calc::new(id, Metric::Wasserstein, TargetLaw::Normal)
        .input("n", abs3.len() as f64)
        .input("sum_abs3", abs3.iter().sum::<f64>())
        .input("sum_m4", m4.iter().sum::<f64>())
        .finish(|x| {
            let n = x[0];
            vec![
                ("third_moment", x[1] / n.powf(1.5)),
                ("fourth_moment", 2f64.sqrt() / (std::f64::consts::PI.sqrt() * n) * x[2].sqrt()),
            ]
        })
}

/// (D²/σ³)ΣE|X_i|³ + (√26 D^{3/2}/(√π σ²))√(ΣE X_i⁴); the two addends are kept in `terms`.
pub fn wass_dependency(abs3: &[f64], m4: &[f64], d: f64, sigma: f64) -> Result<BoundReport> {
    let id = "wass_dependency";
    if abs3.is_empty() || abs3.len() != m4.len() {
        return Err(invalid(format!("{id}: need equal-length nonempty moment lists")));
    }
    if !(d >= 1.0) {
        return Err(invalid(format!("{id}: D must be at least 1")));
    }
    need_pos(id, "σ", sigma)?;
    wass_dependency_sums(abs3.iter().sum(), m4.iter().sum(), d, sigma)
}

fn wass_dependency_sums(sum_abs3: f64, sum_m4: f64, d: f64, sigma: f64) -> Result<BoundReport> {
    Calc::new("wass_dependency", Metric::Wasserstein, TargetLaw::Normal)
        .input("D", d)
        .input("sigma", sigma)
        .input("sum_abs3", sum_abs3)
        .input("sum_m4", sum_m4)
        .finish(|x| {
            let (d, s) = (x[0], x[1]);
            vec![
                ("third_moment", d * d / s.powi(3) * x[2]),
                ("fourth_moment", 26f64.sqrt() * d.powf(1.5) / (std::f64::consts::PI.sqrt() * s * s) * x[3].sqrt()),
            ]
        })
}

/// Triangle counts in G(n,p) through local dependence, with D = 3n − 8 and
/// E|X_i|^k = p³(1−p³)[(1−p³)^{k−1} + p^{3(k−1)}].
pub fn wass_triangles(n: usize, p: f64) -> Result<BoundReport> {
    let id = "wass_triangles";
    if n < 3 {
        return Err(invalid(format!("{id}: need n ≥ 3")));
    }
    need_prob(id, "p", p)?;
    let p3 = p.powi(3);
    let copies = choose(n as u64, 3);
    let var = copies * p3 * (1.0 - p3 + 3.0 * (n as f64 - 3.0) * p * p * (1.0 - p));
    if !(var > 0.0) {
        return Err(invalid(format!("{id}: Var(T) = 0 at p={p}")));
    }
    let abs3 = copies * p3 * (1.0 - p3) * ((1.0 - p3).powi(2) + p3.powi(2));
    let m4 = copies * p3 * (1.0 - p3) * ((1.0 - p3).powi(3) + p3.powi(3));
    let mut r = wass_dependency_sums(abs3, m4, 3.0 * n as f64 - 8.0, var.sqrt())?;
    r.theorem_id = id.into();
    r.notes.push("displayed with a Kolmogorov label; the invoked theorem bounds dW, so this is reported as dW".into());
    Ok(r)
}

/// √Var(E[(W′−W)²|W])/(√(2π)a) + E|W′−W|³/(3a)
pub fn wass_exch_pair(a: f64, var_cond_sq: impl Into<Estimate>, abs3_diff: impl Into<Estimate>) -> Result<BoundReport> {
    need_a("wass_exch_pair", a)?;
    let (v, d) = (var_cond_sq.into(), abs3_diff.into());
    need_nonneg("wass_exch_pair", "var_cond_sq", v.value)?;
    need_nonneg("wass_exch_pair", "abs3_diff", d.value)?;
    Calc::new("wass_exch_pair", Metric::Wasserstein, TargetLaw::Normal)
        .input("a", a)
        .input("var_cond_sq", v)
        .input("abs3_diff", d)
        .finish(|x| {
            vec![
                ("conditional_variance", x[1].max(0.0).sqrt() / ((2.0 * std::f64::consts::PI).sqrt() * x[0])),
                ("cubic_difference", x[2] / (3.0 * x[0])),
            ]
        })
}

/// Anti-voter chain on an r-regular graph: 4n/(3σ³) + √Var(Q)/(rσ²√(2π)).
pub fn wass_antivoter(n: usize, r: usize, sigma2: impl Into<Estimate>, var_q: impl Into<Estimate>) -> Result<BoundReport> {
    let id = "wass_antivoter";
    let (s2, vq) = (sigma2.into(), var_q.into());
    need_pos(id, "σ²", s2.value)?;
    need_nonneg(id, "Var(Q)", vq.value)?;
    if n < 3 || r == 0 {
        return Err(invalid(format!("{id}: need n ≥ 3 and r ≥ 1")));
    }
    // σ enters with a negative power, so its conservative edge is the lower one
    let s2 = match s2.provenance {
        Provenance::Exact => s2,
        Provenance::McEstimate { ci_radius } => Estimate::mc(s2.value, ci_radius.min(s2.value * 0.999)),
    };
    let lo = s2.value - s2.ci_radius();
    let mut rep = Calc::new(id, Metric::Wasserstein, TargetLaw::Normal)
        .input("n", n as f64)
        .input("r", r as f64)
        .input("sigma2", Estimate::exact(s2.value))
        .input("var_q", vq)
        .finish(|x| {
            let (n, r, s2) = (x[0], x[1], x[2]);
            vec![
                ("jump_size", 4.0 * n / (3.0 * s2.powf(1.5))),
                ("q_variance", x[3].sqrt() / (r * s2 * (2.0 * std::f64::consts::PI).sqrt())),
            ]
        })?;
    if s2.ci_radius() > 0.0 {
        let at_lo = 4.0 * n as f64 / (3.0 * lo.powf(1.5))
            + (vq.value + vq.ci_radius()).sqrt() / (r as f64 * lo * (2.0 * std::f64::consts::PI).sqrt());
        rep.ci_radius = at_lo - rep.value;
        rep.inputs.insert("sigma2".into(), s2);
    }
    Ok(rep)
}

/// (μ/σ²)√(2/π)√Var(E[X^s−X|X]) + (μ/σ³)E[(X^s−X)²]
pub fn wass_size_bias(mu: f64, sigma2: f64, var_cond: impl Into<Estimate>, sq_diff: impl Into<Estimate>) -> Result<BoundReport> {
    let id = "wass_size_bias";
    need_pos(id, "μ", mu)?;
    need_pos(id, "σ²", sigma2)?;
    let (v, s) = (var_cond.into(), sq_diff.into());
    need_nonneg(id, "var_cond", v.value)?;
    need_nonneg(id, "sq_diff", s.value)?;
    Calc::new(id, Metric::Wasserstein, TargetLaw::Normal)
        .input("mu", mu)
        .input("sigma2", sigma2)
        .input("var_cond", v)
        .input("sq_diff", s)
        .finish(|x| {
            let (mu, s2) = (x[0], x[1]);
            vec![
                ("conditional_variance", mu / s2 * (2.0 / std::f64::consts::PI).sqrt() * x[2].max(0.0).sqrt()),
                ("square_difference", mu / s2.powf(1.5) * x[3]),
            ]
        })
}

/// 2E|W^z − W|
pub fn wass_zero_bias(e_abs_diff: impl Into<Estimate>) -> Result<BoundReport> {
    let e = e_abs_diff.into();
    need_nonneg("wass_zero_bias", "E|W^z−W|", e.value)?;
    Calc::new("wass_zero_bias", Metric::Wasserstein, TargetLaw::Normal)
        .input("e_abs_diff", e)
        .finish(|x| vec![("zero_bias", 2.0 * x[0])])
}

/// (1 + 1/√(2π) + √(2π)/4)δ when |W^z − W| ≤ δ.
pub fn kolm_zero_bias(delta: f64) -> Result<BoundReport> {
    need_nonneg("kolm_zero_bias", "δ", delta)?;
    let s = (2.0 * std::f64::consts::PI).sqrt();
    Calc::new("kolm_zero_bias", Metric::Kolmogorov, TargetLaw::Normal)
        .input("delta", delta)
        .finish(|x| vec![("zero_bias", (1.0 + 1.0 / s + s / 4.0) * x[0])])
}

/// √Var(E[(W′−W)²|W])/(2a) + δ³/(2a) + 3δ/2 when |W′ − W| ≤ δ.
pub fn kolm_exch_pair(a: f64, var_cond_sq: impl Into<Estimate>, delta: f64) -> Result<BoundReport> {
    need_a("kolm_exch_pair", a)?;
    need_nonneg("kolm_exch_pair", "δ", delta)?;
    let v = var_cond_sq.into();
    need_nonneg("kolm_exch_pair", "var_cond_sq", v.value)?;
    Calc::new("kolm_exch_pair", Metric::Kolmogorov, TargetLaw::Normal)
        .input("a", a)
        .input("var_cond_sq", v)
        .input("delta", delta)
        .finish(|x| {
            vec![
                ("conditional_variance", x[1].max(0.0).sqrt() / (2.0 * x[0])),
                ("cubic_jump", x[2].powi(3) / (2.0 * x[0])),
                ("jump", 1.5 * x[2]),
            ]
        })
}

// ---- Poisson target ----

fn min1_inv(lambda: f64) -> f64 {
    1f64.min(1.0 / lambda)
}

fn check_ps(id: &str, ps: &[f64]) -> Result<f64> {
    for p in ps {
        need_prob(id, "p_i", *p)?;
    }
    let lambda: f64 = ps.iter().sum();
    if !(lambda > 0.0) {
        return Err(invalid(format!("{id}: λ = Σp_i must be positive")));
    }
    Ok(lambda)
}

/// min{1, λ^{−1}}Σp_i²
pub fn tv_small_numbers(ps: &[f64]) -> Result<BoundReport> {
    let lambda = check_ps("tv_small_numbers", ps)?;
    Calc::new("tv_small_numbers", Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("sum_p2", ps.iter().map(|p| p * p).sum::<f64>())
        .finish(|x| vec![("small_numbers", min1_inv(x[0]) * x[1])])
}

/// min{1, λ^{−1}}(ΣΣ_{j∈N_i} p_i p_j + ΣΣ_{j∈N_i∖{i}} p_ij). `nbhd[i]` lists (j, p_ij).
pub fn tv_dependency_poisson(ps: &[f64], nbhd: &[Vec<(usize, f64)>]) -> Result<BoundReport> {
    let id = "tv_dependency_poisson";
    let lambda = check_ps(id, ps)?;
    if nbhd.len() != ps.len() {
        return Err(invalid(format!("{id}: {} neighborhoods for {} indicators", nbhd.len(), ps.len())));
    }
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (i, row) in nbhd.iter().enumerate() {
        for &(j, pij) in row {
            if j >= ps.len() {
                return Err(invalid(format!("{id}: neighbor {j} of {i} out of range")));
            }
            if !pij.is_finite() {
                return Err(invalid(format!("{id}: p_ij missing for ({i},{j})")));
            }
            b1 += ps[i] * ps[j];
            if j != i {
                b2 += pij;
            }
        }
        if !row.iter().any(|(j, _)| *j == i) {
            return Err(invalid(format!("{id}: neighborhood of {i} must contain {i}")));
        }
    }
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("b1", b1)
        .input("b2", b2)
        .finish(|x| vec![("b1", min1_inv(x[0]) * x[1]), ("b2", min1_inv(x[0]) * x[2])])
}

/// λ²(2k+1)/(n−k+1) + 2λp^k with λ = p^k((n−k)(1−p)+1).
pub fn tv_head_runs(n: usize, p: f64, k: usize) -> Result<BoundReport> {
    let id = "tv_head_runs";
    if k < 1 || k > n {
        return Err(invalid(format!("{id}: need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    need_prob(id, "p", p)?;
    let lambda = head_runs_mean(n, p, k);
    if !(lambda > 0.0) {
        return Err(invalid(format!("{id}: λ = 0 at p={p}")));
    }
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("n", n as f64)
        .input("k", k as f64)
        .input("p", p)
        .input("lambda", lambda)
        .finish(|x| {
            let (n, k, l) = (x[0], x[1], x[3]);
            vec![("neighborhood", l * l * (2.0 * k + 1.0) / (n - k + 1.0)), ("boundary", 2.0 * l * x[2].powf(k))]
        })
}

/// min{1, λ}·E|W + 1 − W^s|
pub fn tv_size_bias_poisson(lambda: f64, e_abs: impl Into<Estimate>) -> Result<BoundReport> {
    need_pos("tv_size_bias_poisson", "λ", lambda)?;
    let e = e_abs.into();
    need_nonneg("tv_size_bias_poisson", "E|W+1−W^s|", e.value)?;
    Calc::new("tv_size_bias_poisson", Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("e_abs", e)
        .finish(|x| vec![("size_bias", x[0].min(1.0) * x[1])])
}

/// min{1, λ^{−1}}(Var(W) − λ + 2Σp_i²), for monotone increasing couplings.
pub fn tv_size_bias_increasing(lambda: f64, variance: f64, sum_p2: f64) -> Result<BoundReport> {
    let id = "tv_size_bias_increasing";
    need_pos(id, "λ", lambda)?;
    need_nonneg(id, "Var", variance)?;
    need_nonneg(id, "Σp_i²", sum_p2)?;
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("variance", variance)
        .input("sum_p2", sum_p2)
        .finish(|x| vec![("excess_variance", min1_inv(x[0]) * (x[1] - x[0] + 2.0 * x[2]))])
}

/// A subgraph H through its edge count, its number of copies in K_n and the overlap counts
/// |Γ_α^t| (copies with exactly t edges outside α), t = 1..e_H − 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgraphDescriptor {
    pub name: String,
    pub edges: usize,
    pub copies: f64,
    pub overlaps: Vec<f64>,
}

impl SubgraphDescriptor {
    pub fn edge(n: usize) -> Self {
        SubgraphDescriptor { name: "edge".into(), edges: 1, copies: choose(n as u64, 2), overlaps: vec![] }
    }
    pub fn triangle(n: usize) -> Self {
        let t2 = 3.0 * (n as f64 - 3.0);
        SubgraphDescriptor { name: "triangle".into(), edges: 3, copies: choose(n as u64, 3), overlaps: vec![0.0, t2] }
    }
    /// Overlap counts by enumeration (n ≤ 12).
    pub fn kcycle(n: usize, k: usize) -> Result<Self> {
        let o = kcycle_overlap_counts(n, k)?;
        Ok(SubgraphDescriptor {
            name: format!("{k}-cycle"),
            edges: k,
            copies: kcycle_copies(n, k),
            overlaps: o.into_iter().map(|c| c as f64).collect(),
        })
    }
}

/// min{1, λ}(p^{e_H} + Σ_t |Γ_α^t|(p^t − p^{e_H}))
pub fn tv_subgraph(p: f64, h: &SubgraphDescriptor) -> Result<BoundReport> {
    let id = "tv_subgraph";
    need_prob(id, "p", p)?;
    if h.edges == 0 || h.overlaps.len() + 1 != h.edges {
        return Err(invalid(format!("{id}: need |Γ_α^t| for t = 1..{}", h.edges.saturating_sub(1))));
    }
    let e = h.edges as i32;
    let lambda = h.copies * p.powi(e);
    need_pos(id, "λ", lambda)?;
    let overlap: f64 = h.overlaps.iter().enumerate().map(|(i, g)| g * (p.powi(i as i32 + 1) - p.powi(e))).sum();
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("p_eh", p.powi(e))
        .input("overlap", overlap)
        .finish(|x| vec![("self", x[0].min(1.0) * x[1]), ("overlap", x[0].min(1.0) * x[2])])
        .map(|mut r| {
            r.notes.push(format!("H = {}", h.name));
            r
        })
}

/// min{1, λ}(1 − Var(W)/λ), for monotone decreasing couplings.
pub fn tv_size_bias_decreasing(lambda: f64, variance: f64) -> Result<BoundReport> {
    let id = "tv_size_bias_decreasing";
    need_pos(id, "λ", lambda)?;
    need_nonneg(id, "Var", variance)?;
    if variance > lambda * (1.0 + 1e-12) {
        return Err(invalid(format!("{id}: Var = {variance} exceeds λ = {lambda}, impossible under a decreasing coupling")));
    }
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("variance", variance)
        .finish(|x| vec![("variance_deficit", x[0].min(1.0) * (1.0 - x[1] / x[0]).max(0.0))])
}

/// Red balls among m drawn from N containing n red.
pub fn tv_hypergeometric(total: usize, n_red: usize, m: usize) -> Result<BoundReport> {
    if n_red < 1 || m < 1 || n_red > total || m > total || total < 2 {
        return Err(invalid("tv_hypergeometric: need 1 ≤ n, m ≤ N and N ≥ 2"));
    }
    let (nn, n, m) = (total as f64, n_red as f64, m as f64);
    let lambda = n * m / nn;
    let var = n * m * (nn - n) * (nn - m) / (nn * nn * (nn - 1.0));
    let mut r = tv_size_bias_decreasing(lambda, var)?;
    r.theorem_id = "tv_hypergeometric".into();
    r.notes.push(format!(
        "closed form {:.12}",
        lambda.min(1.0) * (n / (nn - 1.0) + m / (nn - 1.0) - n * m / (nn * (nn - 1.0)) - 1.0 / (nn - 1.0))
    ));
    Ok(r)
}

/// Empty boxes after k uniform balls into n boxes:
/// min{1,λ}((1−1/n)^k + (n−1)[(1−1/n)^k − (1−1/(n−1))^k]).
pub fn tv_coupon(n: usize, k: usize) -> Result<BoundReport> {
    if n < 2 {
        return Err(invalid("tv_coupon: need at least two boxes"));
    }
    let nf = n as f64;
    let a = (1.0 - 1.0 / nf).powi(k as i32);
    let b = (1.0 - 1.0 / (nf - 1.0)).powi(k as i32);
    let lambda = nf * a;
    Calc::new("tv_coupon", Metric::Tv, TargetLaw::Poisson { lambda })
        .input("n", nf)
        .input("k", k as f64)
        .input("lambda", lambda)
        .finish(|x| vec![("coupon", x[2].min(1.0) * (a + (x[0] - 1.0) * (a - b)))])
}

/// min{1, λ^{−1/2}}(E|λ − cP(W′=W+1|F)| + E|W − cP(W′=W−1|F)|)
pub fn tv_exch_pair_poisson(lambda: f64, c: f64, cond_up: impl Into<Estimate>, cond_down: impl Into<Estimate>) -> Result<BoundReport> {
    let id = "tv_exch_pair_poisson";
    need_pos(id, "λ", lambda)?;
    let (u, d) = (cond_up.into(), cond_down.into());
    need_nonneg(id, "cond_up", u.value)?;
    need_nonneg(id, "cond_down", d.value)?;
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("lambda", lambda)
        .input("c", c)
        .input("cond_up", u)
        .input("cond_down", d)
        .finish(|x| {
            let f = 1f64.min(x[0].powf(-0.5));
            vec![("birth", f * x[2]), ("death", f * x[3])]
        })
}

/// Fixed points of a uniform permutation under random transpositions, c = (n−1)/2:
/// E|1 − cP(up)| = E[W + 2W₂]/n = 2/n and E|W − cP(down)| = E[W²]/n = 2/n.
pub fn tv_fixed_points(n: usize) -> Result<BoundReport> {
    if n < 2 {
        return Err(invalid("tv_fixed_points: need n ≥ 2"));
    }
    let nf = n as f64;
    let mut r = tv_exch_pair_poisson(1.0, (nf - 1.0) / 2.0, 2.0 / nf, 2.0 / nf)?;
    r.theorem_id = "tv_fixed_points".into();
    Ok(r)
}

/// Vertices of degree ≥ d (q₁) or ≤ d (q₂) in G(n,p).
pub fn tv_degree_vertices(n: usize, p: f64, d: usize, mode: crate::models::er::DegreeMode) -> Result<BoundReport> {
    use crate::models::er::DegreeMode;
    let id = "tv_degree_vertices";
    if n < 2 || d > n - 1 {
        return Err(invalid(format!("{id}: need 0 ≤ d ≤ n−1, got d={d}, n={n}")));
    }
    need_prob(id, "p", p)?;
    let m = (n - 1) as u64;
    let b = |k: u64| choose(m, k) * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
    let bd = b(d as u64);
    let (q, num, den) = match mode {
        DegreeMode::AtLeast => {
            let q: f64 = (d as u64..=m).map(b).sum();
            (q, (d * d) as f64 * (1.0 - p) * bd * bd, m as f64 * p * q)
        }
        DegreeMode::AtMost => {
            let q: f64 = (0..=d as u64).map(b).sum();
            let e = (n - d - 1) as f64;
            (q, e * e * p * bd * bd, m as f64 * (1.0 - p) * q)
        }
    };
    let q = q.min(1.0);
    let lambda = n as f64 * q;
    need_pos(id, "λ = nq", lambda)?;
    let second = if num == 0.0 { 0.0 } else { num / den };
    Calc::new(id, Metric::Tv, TargetLaw::Poisson { lambda })
        .input("q", q)
        .input("correction", second)
        .finish(|x| vec![("q", x[0]), ("correction", x[1])])
        .map(|mut r| {
            r.notes.push(format!("{mode:?} d={d}"));
            r
        })
}

// ---- exponential and geometric targets ----

/// 2E|W^e − W| against Exp(1)
pub fn wass_equilibrium(e_abs: impl Into<Estimate>) -> Result<BoundReport> {
    let e = e_abs.into();
    need_nonneg("wass_equilibrium", "E|W^e−W|", e.value)?;
    Calc::new("wass_equilibrium", Metric::Wasserstein, TargetLaw::Exponential)
        .input("e_abs", e)
        .finish(|x| vec![("equilibrium", 2.0 * x[0])])
}

/// Geometric sums: 2p(E|X_M − X_M^e| + E|N − M|) when the first expectation is supplied,
/// else the relaxed 2p(1 + μ₂/2 + E|N − M|).
pub fn wass_geometric_sum(p: f64, mu2: f64, e_nm: impl Into<Estimate>, e_xme: Option<Estimate>) -> Result<BoundReport> {
    let id = "wass_geometric_sum";
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("{id}: p must lie in (0,1], got {p}")));
    }
    need_nonneg(id, "μ₂", mu2)?;
    let e_nm = e_nm.into();
    need_nonneg(id, "E|N−M|", e_nm.value)?;
    let c = Calc::new(id, Metric::Wasserstein, TargetLaw::Exponential).input("p", p).input("mu2", mu2).input("e_nm", e_nm);
    match e_xme {
        Some(e) => {
            need_nonneg(id, "E|X_M−X_M^e|", e.value)?;
            c.input("e_xme", e)
                .note("tight form")
                .finish(|x| vec![("increment", 2.0 * x[0] * x[3]), ("count", 2.0 * x[0] * x[2])])
        }
        None => c
            .note("relaxed form")
            .finish(|x| vec![("increment", 2.0 * x[0] * (1.0 + x[1] / 2.0)), ("count", 2.0 * x[0] * x[2])]),
    }
}

/// 2(1 − p)E|W^e − W| against Geo0(p)
pub fn tv_discrete_equilibrium(p: f64, e_abs: impl Into<Estimate>) -> Result<BoundReport> {
    let id = "tv_discrete_equilibrium";
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("{id}: p must lie in (0,1], got {p}")));
    }
    let e = e_abs.into();
    need_nonneg(id, "E|W^e−W|", e.value)?;
    Calc::new(id, Metric::Tv, TargetLaw::Geometric0 { p })
        .input("p", p)
        .input("e_abs", e)
        .finish(|x| vec![("equilibrium", 2.0 * (1.0 - x[0]) * x[1])])
}

/// In-degree of a uniform node in uniform attachment: 2(log n + 1)/n against Geo0(1/2).
pub fn tv_uniform_attachment(n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(invalid("tv_uniform_attachment: need n ≥ 1"));
    }
    Calc::new("tv_uniform_attachment", Metric::Tv, TargetLaw::Geometric0 { p: 0.5 })
        .input("n", n as f64)
        .finish(|x| vec![("uniform_attachment", 2.0 * (x[0].ln() + 1.0) / x[0])])
}

/// Registered calculator ids with a one-line description of their inputs.
pub const THEOREMS: &[(&str, &str)] = &[
    ("be_iid", "abs3, n"),
    ("wass_iid_sum", "abs3[], m4[]"),
    ("wass_dependency", "abs3[], m4[], D, sigma"),
    ("wass_triangles", "n, p"),
    ("wass_exch_pair", "a, var_cond_sq, abs3_diff"),
    ("wass_antivoter", "n, r, sigma2, var_q"),
    ("wass_size_bias", "mu, sigma2, var_cond, sq_diff"),
    ("wass_zero_bias", "e_abs_diff"),
    ("kolm_zero_bias", "delta"),
    ("kolm_exch_pair", "a, var_cond_sq, delta"),
    ("tv_small_numbers", "p[]"),
    ("tv_head_runs", "n, p, k"),
    ("tv_size_bias_poisson", "lambda, e_abs"),
    ("tv_size_bias_increasing", "lambda, variance, sum_p2"),
    ("tv_triangles", "n, p"),
    ("tv_kcycles", "n, p, k"),
    ("tv_size_bias_decreasing", "lambda, variance"),
    ("tv_hypergeometric", "N, n, m"),
    ("tv_coupon", "n, k"),
    ("tv_exch_pair_poisson", "lambda, c, cond_up, cond_down"),
    ("tv_fixed_points", "n"),
    ("tv_degree_vertices", "n, p, d, mode"),
    ("wass_equilibrium", "e_abs"),
    ("wass_geometric_sum", "p, mu2, e_nm, [e_xme]"),
    ("tv_discrete_equilibrium", "p, e_abs"),
    ("tv_uniform_attachment", "n"),
];
