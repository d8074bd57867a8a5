//! Bias transforms (size, zero, equilibrium, discrete equilibrium), exchangeable pairs, and
//! Monte Carlo identity checks that certify each construction.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::dist::{sample_uniform01, Atoms, Categorical, FinitePmf, KahanAcc, RngStream};
use crate::error::{invalid, Result, SteinError};
use crate::stein_eq::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    SizeBias,
    ZeroBias,
    Equilibrium,
    DiscreteEquilibrium,
    ExchangeablePair,
}

/// One joint draw of W and its transformed companion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingDraw {
    pub w: f64,
    pub companion: f64,
    pub kind: CouplingKind,
    pub aux: BTreeMap<String, f64>,
}

impl CouplingDraw {
    pub fn new(w: f64, companion: f64, kind: CouplingKind) -> Self {
        CouplingDraw { w, companion, kind, aux: BTreeMap::new() }
    }
    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.aux.insert(key.to_string(), v);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteinPairSpec {
    a: f64,
}

impl SteinPairSpec {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(invalid(format!("Stein pair rate must lie in (0,1], got {a}")));
        }
        Ok(SteinPairSpec { a })
    }
    pub fn a(&self) -> f64 {
        self.a
    }
}

// ---------------------------------------------------------------------------
// size bias

/// P(X^s = k) = k P(X = k) / μ.
pub fn size_bias_pmf(p: &FinitePmf) -> Result<FinitePmf> {
    if p.min_support() < 0 {
        return Err(invalid("size bias needs nonnegative support"));
    }
    let mu = p.mean();
    if !(mu > 0.0) {
        return Err(invalid("size bias needs a positive mean"));
    }
    let probs: Vec<f64> = p.iter().map(|(k, q)| k as f64 * q / mu).collect();
    FinitePmf::from_noisy(p.offset(), probs, 0.0)
}

/// Σ_k k p_k g(k) − μ Σ_k q_k g(k) for q the size-biased pmf; zero up to rounding.
pub fn size_bias_identity_exact(p: &FinitePmf, g: impl Fn(f64) -> f64) -> Result<f64> {
    let q = size_bias_pmf(p)?;
    let lhs = p.expect(|k| k as f64 * g(k as f64));
    let rhs = p.mean() * q.expect(|k| g(k as f64));
    Ok(lhs - rhs)
}

/// Summands X_1..X_n with known means and a way to build X^{(i)}.
pub trait SizeBiasSummands {
    fn means(&self) -> Vec<f64>;
    fn sample(&self, rng: &mut RngStream) -> Vec<f64>;
    /// X^{(i)}: coordinate i replaced by its size-biased value, the others drawn from their
    /// conditional law given it, reusing `x` where the construction allows.
    fn companion(&self, _x: &[f64], _i: usize, _rng: &mut RngStream) -> Result<Vec<f64>> {
        Err(invalid("summand model supplies no conditional-law sampler"))
    }
}

/// Independent integer-valued summands.
#[derive(Clone, Debug)]
pub struct IndependentSummands {
    pmfs: Vec<FinitePmf>,
    biased: Vec<FinitePmf>,
}

impl IndependentSummands {
    pub fn new(pmfs: Vec<FinitePmf>) -> Result<Self> {
        if pmfs.is_empty() {
            return Err(invalid("at least one summand required"));
        }
        let biased = pmfs.iter().map(size_bias_pmf).collect::<Result<Vec<_>>>()?;
        Ok(IndependentSummands { pmfs, biased })
    }
    pub fn bernoulli(ps: &[f64]) -> Result<Self> {
        let pmfs = ps
            .iter()
            .map(|&p| FinitePmf::new(0, vec![1.0 - p, p], 0.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pmfs)
    }
}

impl SizeBiasSummands for IndependentSummands {
    fn means(&self) -> Vec<f64> {
        self.pmfs.iter().map(|p| p.mean()).collect()
    }
    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.pmfs.iter().map(|p| p.sample(rng) as f64).collect()
    }
    fn companion(&self, x: &[f64], i: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        y[i] = self.biased[i].sample(rng) as f64;
        Ok(y)
    }
}

/// Pick I with P(I=i) ∝ μ_i, size-bias coordinate I, and sum.
pub fn size_bias_sum_coupler(model: &dyn SizeBiasSummands, rng: &mut RngStream) -> Result<CouplingDraw> {
    let means = model.means();
    if means.iter().any(|m| *m < 0.0) {
        return Err(invalid("summands must be nonnegative"));
    }
    let pick = Categorical::new(&means)?;
    let x = model.sample(rng);
    let i = pick.sample(rng);
    let y = model.companion(&x, i, rng)?;
    let w: f64 = x.iter().sum();
    let ws: f64 = y.iter().sum();
    Ok(CouplingDraw::new(w, ws, CouplingKind::SizeBias).with("I", i as f64).with("x_i", x[i]).with("x_i_s", y[i]))
}

// ---------------------------------------------------------------------------
// zero bias

/// Piecewise-constant zero-bias density p^z(w) = σ^{-2} E[W 1[W > w]] of a mean-zero
/// discrete law.
#[derive(Clone, Debug)]
pub struct ZeroBiasDensity {
    knots: Vec<f64>,
    /// density on (knots[j], knots[j+1])
    heights: Vec<f64>,
    /// CDF at knots[j]
    cdf: Vec<f64>,
}

impl ZeroBiasDensity {
    pub fn value(&self, w: f64) -> f64 {
        if w <= self.knots[0] || w >= *self.knots.last().unwrap() {
            return 0.0;
        }
        let j = self.knots.partition_point(|k| *k <= w) - 1;
        self.heights[j]
    }
    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }
    /// Inverse of the piecewise-linear CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let total = self.total_mass();
        let target = u * total;
        let j = self.cdf.partition_point(|c| *c <= target).clamp(1, self.cdf.len() - 1) - 1;
        let h = self.heights[j];
        if h <= 0.0 {
            return self.knots[j];
        }
        (self.knots[j] + (target - self.cdf[j]) / h).min(self.knots[j + 1])
    }
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(sample_uniform01(rng))
    }
}

pub fn zero_bias_density(law: &Atoms) -> Result<ZeroBiasDensity> {
    let mean = law.mean();
    if mean.abs() > 1e-10 {
        return Err(invalid(format!("zero bias needs mean zero, got {mean:e}")));
    }
    let var = law.variance();
    if !(var > 0.0) {
        return Err(invalid("zero bias needs positive variance"));
    }
    let knots = law.points.clone();
    let mut heights = Vec::with_capacity(knots.len().saturating_sub(1));
    // E[W 1[W > w]] on (x_j, x_{j+1}) is the sum over atoms above x_j
    let mut upper = KahanAcc::default();
    for (x, p) in law.points.iter().zip(&law.probs) {
        upper.add(x * p);
    }
    for j in 0..knots.len() - 1 {
        upper.add(-knots[j] * law.probs[j]);
        heights.push((upper.value() / var).max(0.0));
    }
    let mut cdf = vec![0.0];
    let mut acc = KahanAcc::default();
    for j in 0..heights.len() {
        acc.add(heights[j] * (knots[j + 1] - knots[j]));
        cdf.push(acc.value());
    }
    Ok(ZeroBiasDensity { knots, heights, cdf })
}

pub fn zero_bias_density_pmf(p: &FinitePmf) -> Result<ZeroBiasDensity> {
    zero_bias_density(&p.to_atoms(1.0, 0.0))
}

/// Independent mean-zero summands with Σσ_i² = 1, ready for zero-bias coupling.
#[derive(Clone, Debug)]
pub struct ZeroBiasSum {
    laws: Vec<Atoms>,
    pickers: Vec<Categorical>,
    densities: Vec<ZeroBiasDensity>,
    index: Categorical,
}

impl ZeroBiasSum {
    pub fn new(laws: Vec<Atoms>) -> Result<Self> {
        if laws.is_empty() {
            return Err(invalid("at least one summand required"));
        }
        let vars: Vec<f64> = laws.iter().map(|a| a.variance()).collect();
        let total: f64 = vars.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("summand variances must sum to 1, got {total}")));
        }
        let densities = laws.iter().map(zero_bias_density).collect::<Result<Vec<_>>>()?;
        let pickers = laws.iter().map(|a| Categorical::new(&a.probs)).collect::<Result<Vec<_>>>()?;
        Ok(ZeroBiasSum { index: Categorical::new(&vars)?, laws, pickers, densities })
    }

    /// n iid ±n^{-1/2} coins.
    pub fn rademacher(n: usize) -> Result<Self> {
        let s = 1.0 / (n as f64).sqrt();
        Self::new(vec![Atoms::new(vec![(-s, 0.5), (s, 0.5)], 0.0)?; n])
    }
}

/// W^z = W − X_I + X_I^z with P(I=i) = σ_i².
pub fn zero_bias_sum_coupler(model: &ZeroBiasSum, rng: &mut RngStream) -> Result<CouplingDraw> {
    let x: Vec<f64> = model.laws.iter().zip(&model.pickers).map(|(a, c)| a.points[c.sample(rng)]).collect();
    let i = model.index.sample(rng);
    let xz = model.densities[i].sample(rng);
    let w: f64 = x.iter().sum();
    Ok(CouplingDraw::new(w, w - x[i] + xz, CouplingKind::ZeroBias).with("I", i as f64).with("x_i", x[i]).with("x_i_z", xz))
}

// ---------------------------------------------------------------------------
// equilibrium

/// W^e = U·W^s with U uniform on (0,1). The sampler returns (w, w^s) on one space.
pub fn equilibrium_coupler<F>(x_s_sampler: &mut F, rng: &mut RngStream) -> Result<CouplingDraw>
where
    F: FnMut(&mut RngStream) -> Result<(f64, f64)>,
{
    let (w, ws) = x_s_sampler(rng)?;
    let u = sample_uniform01(rng);
    Ok(CouplingDraw::new(w, u * ws, CouplingKind::Equilibrium).with("w_s", ws).with("u", u))
}

/// W^e uniform on {0, …, W^s − 1}.
pub fn discrete_equilibrium_coupler<F>(x_s_sampler: &mut F, rng: &mut RngStream) -> Result<CouplingDraw>
where
    F: FnMut(&mut RngStream) -> Result<(i64, i64)>,
{
    let (w, ws) = x_s_sampler(rng)?;
    if ws <= 0 {
        return Err(SteinError::ModelBug(format!("size-biased draw {ws} must be positive")));
    }
    let e = rng.random_range(0..ws);
    Ok(CouplingDraw::new(w as f64, e as f64, CouplingKind::DiscreteEquilibrium).with("w_s", ws as f64))
}

// ---------------------------------------------------------------------------
// statistics

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> MeanEstimate {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = crate::dist::kahan_sum(xs.iter().copied()) / n as f64;
        if n < 2 {
            return MeanEstimate { mean, se: f64::INFINITY, n };
        }
        let ss = crate::dist::kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
        MeanEstimate { mean, se: (ss / ((n - 1) as f64 * n as f64)).sqrt(), n }
    }

    /// Batch-means estimate for serially correlated samples.
    pub fn batch_means(xs: &[f64], batches: usize) -> MeanEstimate {
        let b = batches.max(2).min(xs.len().max(2));
        let size = xs.len() / b;
        if size == 0 {
            return Self::from_samples(xs);
        }
        let means: Vec<f64> = (0..b).map(|j| xs[j * size..(j + 1) * size].iter().sum::<f64>() / size as f64).collect();
        let mut est = Self::from_samples(&means);
        est.n = xs.len();
        est
    }

    /// |mean − target| ≤ k·se; a zero standard error passes only on an exact hit.
    pub fn within(&self, target: f64, k: f64) -> bool {
        let dev = (self.mean - target).abs();
        if self.se == 0.0 {
            dev <= 1e-12 * (1.0 + target.abs())
        } else {
            dev <= k * self.se
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub target: f64,
    pub estimate: MeanEstimate,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub coupling: String,
    pub draws: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
    pub fn worst_z(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| if c.estimate.se > 0.0 { (c.estimate.mean - c.target).abs() / c.estimate.se } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

pub const PASS_SE: f64 = 4.0;
pub const MIN_IDENTITY_DRAWS: usize = 1000;

fn need(draws: usize) -> Result<()> {
    if draws < MIN_IDENTITY_DRAWS {
        return Err(SteinError::InsufficientSamples { need: MIN_IDENTITY_DRAWS, got: draws });
    }
    Ok(())
}

fn report(coupling: &str, draws: &[CouplingDraw], suite: &[TestFunction], stat: impl Fn(&TestFunction, &CouplingDraw) -> f64) -> IdentityReport {
    let checks = suite
        .iter()
        .map(|h| {
            let d: Vec<f64> = draws.iter().map(|c| stat(h, c)).collect();
            let estimate = MeanEstimate::from_samples(&d);
            IdentityCheck { name: h.label(), target: 0.0, pass: estimate.within(0.0, PASS_SE), estimate }
        })
        .collect();
    IdentityReport { coupling: coupling.to_string(), draws: draws.len(), checks }
}

fn deriv(h: &TestFunction, w: f64) -> Result<f64> {
    h.derivative(w).ok_or_else(|| invalid(format!("{} has no derivative", h.label())))
}

/// E[W g(W)] − μ E[g(W^s)] per draw.
pub fn check_size_bias(draws: &[CouplingDraw], mu: f64, suite: &[TestFunction]) -> Result<IdentityReport> {
    need(draws.len())?;
    Ok(report("size_bias", draws, suite, |h, c| c.w * h.value(c.w) - mu * h.value(c.companion)))
}

/// E[W g(W)] − σ² E[g′(W^z)] per draw, smooth g only.
pub fn check_zero_bias(draws: &[CouplingDraw], sigma2: f64, suite: &[TestFunction]) -> Result<IdentityReport> {
    need(draws.len())?;
    for h in suite {
        deriv(h, 0.0)?;
    }
    Ok(report("zero_bias", draws, suite, |h, c| c.w * h.value(c.w) - sigma2 * h.derivative(c.companion).unwrap()))
}

/// E[f(W)] − f(0) − μ E[f′(W^e)] per draw, smooth f only.
pub fn check_equilibrium(draws: &[CouplingDraw], mu: f64, suite: &[TestFunction]) -> Result<IdentityReport> {
    need(draws.len())?;
    for h in suite {
        deriv(h, 0.0)?;
    }
    Ok(report("equilibrium", draws, suite, |h, c| h.value(c.w) - h.value(0.0) - mu * h.derivative(c.companion).unwrap()))
}

/// p E[f(W)] − (1−p) E[Δf(W^e)] per draw with f = g − g(0).
pub fn check_discrete_equilibrium(draws: &[CouplingDraw], p: f64, suite: &[TestFunction]) -> Result<IdentityReport> {
    need(draws.len())?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("p must lie in (0,1], got {p}")));
    }
    Ok(report("discrete_equilibrium", draws, suite, |h, c| {
        let g0 = h.value(0.0);
        p * (h.value(c.w) - g0) - (1.0 - p) * (h.value(c.companion + 1.0) - h.value(c.companion))
    }))
}

/// Draw `n` couplings from a closure.
pub fn collect_draws<F>(n: usize, rng: &mut RngStream, mut f: F) -> Result<Vec<CouplingDraw>>
where
    F: FnMut(&mut RngStream) -> Result<CouplingDraw>,
{
    (0..n).map(|_| f(rng)).collect()
}

// ---------------------------------------------------------------------------
// exchangeable pairs

#[derive(Clone, Debug, Serialize)]
pub struct ExchangeableReport {
    pub a: f64,
    pub draws: usize,
    /// E[tanh(W′) − tanh(W)]
    pub antisymmetric: MeanEstimate,
    /// per-batch slope of W′−W on W
    pub slope: MeanEstimate,
    /// E[(W′−W)²] − 2a σ̂²
    pub second_moment_gap: MeanEstimate,
    pub sigma2_hat: f64,
    pub mean_sq_diff: f64,
    pub pass_antisymmetric: bool,
    pub pass_slope: bool,
    pub pass_second_moment: bool,
}

impl ExchangeableReport {
    pub fn pass(&self) -> bool {
        self.pass_antisymmetric && self.pass_slope && self.pass_second_moment
    }
}

pub const PAIR_BATCHES: usize = 50;

/// Three statistics of an a-Stein pair, all with batch-means standard errors so that
/// Markov-chain pair samplers are handled.
pub fn exchangeable_pair_check<F>(mut sampler: F, a: f64, n_draws: usize, rng: &mut RngStream) -> Result<ExchangeableReport>
where
    F: FnMut(&mut RngStream) -> Result<(f64, f64)>,
{
    let spec = SteinPairSpec::new(a)?;
    if n_draws < MIN_IDENTITY_DRAWS {
        return Err(SteinError::InsufficientSamples { need: MIN_IDENTITY_DRAWS, got: n_draws });
    }
    let mut ws = Vec::with_capacity(n_draws);
    let mut ds = Vec::with_capacity(n_draws);
    let mut anti = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let (w, w2) = sampler(rng)?;
        ws.push(w);
        ds.push(w2 - w);
        anti.push(w2.tanh() - w.tanh());
    }
    let antisymmetric = MeanEstimate::batch_means(&anti, PAIR_BATCHES);

    let size = n_draws / PAIR_BATCHES;
    let mut slopes = Vec::with_capacity(PAIR_BATCHES);
    for b in 0..PAIR_BATCHES {
        let w = &ws[b * size..(b + 1) * size];
        let d = &ds[b * size..(b + 1) * size];
        let mw = w.iter().sum::<f64>() / size as f64;
        let md = d.iter().sum::<f64>() / size as f64;
        let cov: f64 = w.iter().zip(d).map(|(x, y)| (x - mw) * (y - md)).sum();
        let var: f64 = w.iter().map(|x| (x - mw) * (x - mw)).sum();
        slopes.push(if var > 0.0 { cov / var } else { 0.0 });
    }
    let slope = MeanEstimate::from_samples(&slopes);

    let mw = crate::dist::kahan_sum(ws.iter().copied()) / n_draws as f64;
    let sigma2_hat = crate::dist::kahan_sum(ws.iter().map(|x| (x - mw) * (x - mw))) / (n_draws - 1) as f64;
    let gap: Vec<f64> = ws.iter().zip(&ds).map(|(w, d)| d * d - 2.0 * spec.a() * (w - mw) * (w - mw)).collect();
    let second_moment_gap = MeanEstimate::batch_means(&gap, PAIR_BATCHES);
    let mean_sq_diff = ds.iter().map(|d| d * d).sum::<f64>() / n_draws as f64;

    Ok(ExchangeableReport {
        a,
        draws: n_draws,
        pass_antisymmetric: antisymmetric.within(0.0, PASS_SE),
        pass_slope: slope.within(-a, PASS_SE),
        pass_second_moment: second_moment_gap.within(0.0, PASS_SE),
        antisymmetric,
        slope,
        second_moment_gap,
        sigma2_hat,
        mean_sq_diff,
    })
}

/// Index-replacement pair for a sum of n iid summands: draw the summands, then resample
/// one uniformly chosen coordinate. Each call is an independent draw of (W, W′)·scale.
pub fn iid_replacement_pair<S>(n: usize, mut draw: S, scale: f64) -> impl FnMut(&mut RngStream) -> Result<(f64, f64)>
where
    S: FnMut(&mut RngStream) -> f64,
{
    let mut xs = vec![0.0; n];
    move |rng: &mut RngStream| {
        for x in xs.iter_mut() {
            *x = draw(rng);
        }
        let w: f64 = xs.iter().sum();
        let i = rng.random_range(0..n);
        let w2 = w - xs[i] + draw(rng);
        Ok((w * scale, w2 * scale))
    }
}
