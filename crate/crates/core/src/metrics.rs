//! Total variation, Kolmogorov and Wasserstein distances, exact and estimated.
//!
//! Tail mass carried by a `FinitePmf` is always charged in the worst-case direction, so an
//! "exact" value is a certified upper bound up to the truncation tolerance. For dW the tail
//! is charged at unit transport distance per unit mass, which is an approximation for
//! unbounded tails but is below 1e-11 for every builder output.

use serde::Serialize;

use crate::dist::{Atoms, FinitePmf, KahanAcc, TargetLaw, DEFAULT_TOL};
use crate::error::{invalid, Result, SteinError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Metric {
    #[serde(rename = "dTV")]
    Tv,
    #[serde(rename = "dK")]
    Kolmogorov,
    #[serde(rename = "dW")]
    Wasserstein,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::Tv => "dTV",
            Metric::Kolmogorov => "dK",
            Metric::Wasserstein => "dW",
        }
    }

    pub fn parse(s: &str) -> Result<Metric> {
        match s.to_ascii_lowercase().as_str() {
            "dtv" | "tv" => Ok(Metric::Tv),
            "dk" | "kolmogorov" => Ok(Metric::Kolmogorov),
            "dw" | "wasserstein" => Ok(Metric::Wasserstein),
            other => Err(invalid(format!("unknown metric {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exact,
    Estimated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricValue {
    pub metric: Metric,
    pub value: f64,
    pub mode: Mode,
    pub ci_radius: f64,
}

impl MetricValue {
    fn exact(metric: Metric, value: f64) -> Self {
        let value = match metric {
            Metric::Tv | Metric::Kolmogorov => value.clamp(0.0, 1.0),
            Metric::Wasserstein => value.max(0.0),
        };
        MetricValue { metric, value, mode: Mode::Exact, ci_radius: 0.0 }
    }
    pub fn upper(&self) -> f64 {
        self.value + self.ci_radius
    }
}

pub fn dtv_discrete(p: &FinitePmf, q: &FinitePmf) -> MetricValue {
    let lo = p.min_support().min(q.min_support());
    let hi = p.max_support().max(q.max_support());
    let mut acc = KahanAcc::default();
    for k in lo..=hi {
        acc.add((p.pmf(k) - q.pmf(k)).abs());
    }
    MetricValue::exact(Metric::Tv, 0.5 * (acc.value() + p.tail_mass() + q.tail_mass()))
}

pub fn dk_discrete_vs_discrete(p: &FinitePmf, q: &FinitePmf) -> MetricValue {
    let lo = p.min_support().min(q.min_support());
    let hi = p.max_support().max(q.max_support());
    let (mut fp, mut fq) = (KahanAcc::default(), KahanAcc::default());
    let mut sup: f64 = 0.0;
    for k in lo..=hi {
        fp.add(p.pmf(k));
        fq.add(q.pmf(k));
        sup = sup.max((fp.value() - fq.value()).abs());
    }
    MetricValue::exact(Metric::Kolmogorov, sup + p.tail_mass().max(q.tail_mass()))
}

pub fn dk_discrete_vs_target(p: &FinitePmf, law: &TargetLaw) -> Result<MetricValue> {
    law.validate()?;
    if law.is_discrete() {
        let q = law.pmf(DEFAULT_TOL)?;
        return Ok(dk_discrete_vs_discrete(p, &q));
    }
    dk_atoms_vs_continuous(&p.to_atoms(1.0, 0.0), law)
}

/// sup |F_P − G| for a discrete P against a continuous G: on each gap between atoms F_P is
/// constant and G monotone, so only the two ends of the gap matter.
pub fn dk_atoms_vs_continuous(a: &Atoms, law: &TargetLaw) -> Result<MetricValue> {
    if law.is_discrete() {
        return Err(invalid("continuous target expected"));
    }
    let cum = a.cumulative();
    let mut sup = law.cdf(a.points[0]);
    for i in 0..a.points.len() {
        let c = cum[i];
        sup = sup.max((c - law.cdf(a.points[i])).abs());
        let right = if i + 1 < a.points.len() { law.cdf(a.points[i + 1]) } else { 1.0 };
        sup = sup.max((c - right).abs());
    }
    Ok(MetricValue::exact(Metric::Kolmogorov, sup + a.tail_mass))
}

pub fn dw_integer_supported(p: &FinitePmf, q: &FinitePmf) -> MetricValue {
    let lo = p.min_support().min(q.min_support());
    let hi = p.max_support().max(q.max_support());
    let (mut fp, mut fq) = (KahanAcc::default(), KahanAcc::default());
    let mut acc = KahanAcc::default();
    for k in lo..hi {
        fp.add(p.pmf(k));
        fq.add(q.pmf(k));
        acc.add((fp.value() - fq.value()).abs());
    }
    MetricValue::exact(Metric::Wasserstein, acc.value() + p.tail_mass() + q.tail_mass())
}

pub fn dw_discrete_vs_target(p: &FinitePmf, law: &TargetLaw) -> Result<MetricValue> {
    law.validate()?;
    if law.is_discrete() {
        let q = law.pmf(DEFAULT_TOL)?;
        return Ok(dw_integer_supported(p, &q));
    }
    dw_atoms_vs_continuous(&p.to_atoms(1.0, 0.0), law)
}

// ∫_{-∞}^x G for the continuous targets
fn cdf_antiderivative(law: &TargetLaw, x: f64) -> f64 {
    match law {
        TargetLaw::Normal => x * law.cdf(x) + crate::dist::normal_pdf(x),
        TargetLaw::Exponential => {
            if x <= 0.0 {
                0.0
            } else {
                x + (-x).exp_m1()
            }
        }
        _ => f64::NAN,
    }
}

// ∫_x^∞ (1 − G)
fn survival_integral(law: &TargetLaw, x: f64) -> f64 {
    match law {
        TargetLaw::Normal => crate::dist::normal_pdf(x) - x * crate::dist::normal_sf(x),
        TargetLaw::Exponential => {
            if x <= 0.0 {
                1.0 - x
            } else {
                (-x).exp()
            }
        }
        _ => f64::NAN,
    }
}

// ∫_a^b |c − G| with G continuous and nondecreasing
fn gap_integral(law: &TargetLaw, c: f64, a: f64, b: f64) -> f64 {
    let ga = law.cdf(a);
    let gb = law.cdf(b);
    let ig = |x: f64| cdf_antiderivative(law, x);
    let above = |lo: f64, hi: f64| (ig(hi) - ig(lo)) - c * (hi - lo); // ∫ (G − c)
    if c <= ga {
        above(a, b).max(0.0)
    } else if c >= gb {
        (-above(a, b)).max(0.0)
    } else {
        let x = law.quantile(c).clamp(a, b);
        (-above(a, x)).max(0.0) + above(x, b).max(0.0)
    }
}

/// ∫ |F_P − G| computed piecewise in closed form: on each gap between atoms the integrand
/// is |c − G(x)| which integrates through the antiderivative of G and the quantile at level c.
pub fn dw_atoms_vs_continuous(a: &Atoms, law: &TargetLaw) -> Result<MetricValue> {
    if law.is_discrete() {
        return Err(invalid("continuous target expected"));
    }
    let cum = a.cumulative();
    let n = a.points.len();
    let mut acc = KahanAcc::default();
    // below the first atom F_P = 0
    acc.add(cdf_antiderivative(law, a.points[0]));
    for i in 0..n - 1 {
        acc.add(gap_integral(law, cum[i], a.points[i], a.points[i + 1]));
    }
    acc.add(survival_integral(law, a.points[n - 1]));
    Ok(MetricValue::exact(Metric::Wasserstein, acc.value() + a.tail_mass))
}

/// dK ≤ √(2 C dW) when the target has density bounded by C.
pub fn dk_from_dw_bound(dw: f64, density_bound: f64) -> Result<f64> {
    if !(density_bound > 0.0) {
        return Err(invalid(format!("density bound must be positive, got {density_bound}")));
    }
    if !(dw >= 0.0) {
        return Err(invalid(format!("dW must be nonnegative, got {dw}")));
    }
    Ok((2.0 * density_bound * dw).sqrt())
}

/// (2/π)^{1/4} √dW, the normal specialization.
pub fn dk_from_dw_normal(dw: f64) -> Result<f64> {
    dk_from_dw_bound(dw, 1.0 / (2.0 * std::f64::consts::PI).sqrt())
}

pub const MIN_MC_SAMPLES: usize = 1000;
const Z99: f64 = 2.575_829_303_548_901;

/// What an empirical sample is compared with.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    Samples(&'a [f64]),
    Law(TargetLaw),
}

fn dkw_radius(n: usize) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt()
}

// 99% pointwise band integrated over the sample range
fn dw_radius(atoms: &Atoms, n: usize) -> f64 {
    let cum = atoms.cumulative();
    let mut acc = 0.0;
    for i in 0..atoms.points.len() - 1 {
        let f = cum[i].min(1.0);
        acc += (f * (1.0 - f) / n as f64).sqrt() * (atoms.points[i + 1] - atoms.points[i]);
    }
    Z99 * acc
}

fn integer_counts(samples: &[f64]) -> Result<FinitePmf> {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for &x in samples {
        if x.fract() != 0.0 || !x.is_finite() {
            return Err(invalid("dTV estimation needs integer-valued samples"));
        }
        lo = lo.min(x as i64);
        hi = hi.max(x as i64);
    }
    let mut counts = vec![0u64; (hi - lo + 1) as usize];
    for &x in samples {
        counts[(x as i64 - lo) as usize] += 1;
    }
    FinitePmf::from_counts(lo, &counts)
}

fn tv_radius(pmf: &FinitePmf, n: usize) -> f64 {
    0.5 * Z99 * pmf.probs().iter().map(|&p| (p * (1.0 - p) / n as f64).sqrt()).sum::<f64>()
}

/// Plug-in estimate with a 99% confidence radius: DKW for dK, an integrated pointwise band
/// for dW, and a summed binomial band for the histogram dTV estimator.
pub fn estimate_metric_mc(samples: &[f64], reference: Reference<'_>, metric: Metric) -> Result<MetricValue> {
    if samples.len() < MIN_MC_SAMPLES {
        return Err(SteinError::InsufficientSamples { need: MIN_MC_SAMPLES, got: samples.len() });
    }
    let n = samples.len();
    let (value, ci) = match (metric, reference) {
        (Metric::Kolmogorov, Reference::Law(law)) => {
            let a = Atoms::empirical(samples)?;
            let v = if law.is_discrete() {
                dk_discrete_vs_discrete(&integer_counts(samples)?, &law.pmf(DEFAULT_TOL)?).value
            } else {
                dk_atoms_vs_continuous(&a, &law)?.value
            };
            (v, dkw_radius(n))
        }
        (Metric::Kolmogorov, Reference::Samples(other)) => {
            if other.len() < MIN_MC_SAMPLES {
                return Err(SteinError::InsufficientSamples { need: MIN_MC_SAMPLES, got: other.len() });
            }
            (two_sample_dk(samples, other), dkw_radius(n) + dkw_radius(other.len()))
        }
        (Metric::Wasserstein, Reference::Law(law)) => {
            let a = Atoms::empirical(samples)?;
            let v = if law.is_discrete() {
                dw_integer_supported(&integer_counts(samples)?, &law.pmf(DEFAULT_TOL)?).value
            } else {
                dw_atoms_vs_continuous(&a, &law)?.value
            };
            (v, dw_radius(&a, n))
        }
        (Metric::Wasserstein, Reference::Samples(other)) => {
            if other.len() < MIN_MC_SAMPLES {
                return Err(SteinError::InsufficientSamples { need: MIN_MC_SAMPLES, got: other.len() });
            }
            let a = Atoms::empirical(samples)?;
            let b = Atoms::empirical(other)?;
            (two_sample_dw(samples, other), dw_radius(&a, n) + dw_radius(&b, other.len()))
        }
        (Metric::Tv, Reference::Law(law)) => {
            if !law.is_discrete() {
                return Err(invalid("dTV against a continuous law is identically 1 for discrete samples"));
            }
            let emp = integer_counts(samples)?;
            (dtv_discrete(&emp, &law.pmf(DEFAULT_TOL)?).value, tv_radius(&emp, n))
        }
        (Metric::Tv, Reference::Samples(other)) => {
            if other.len() < MIN_MC_SAMPLES {
                return Err(SteinError::InsufficientSamples { need: MIN_MC_SAMPLES, got: other.len() });
            }
            let a = integer_counts(samples)?;
            let b = integer_counts(other)?;
            (dtv_discrete(&a, &b).value, tv_radius(&a, n) + tv_radius(&b, other.len()))
        }
    };
    Ok(MetricValue { metric, value, mode: Mode::Estimated, ci_radius: ci })
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn two_sample_dk(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            _ => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

fn two_sample_dw(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut pts: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (mut i, mut j) = (0, 0);
    let mut acc = KahanAcc::default();
    for w in pts.windows(2) {
        while i < a.len() && a[i] <= w[0] {
            i += 1;
        }
        while j < b.len() && b[j] <= w[0] {
            j += 1;
        }
        acc.add((i as f64 / na - j as f64 / nb).abs() * (w[1] - w[0]));
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{binomial_pmf, poisson_pmf};

    #[test]
    fn point_masses() {
        let d0 = FinitePmf::point_mass(0);
        let d1 = FinitePmf::point_mass(1);
        let d3 = FinitePmf::point_mass(3);
        assert_eq!(dtv_discrete(&d0, &d1).value, 1.0);
        assert_eq!(dw_integer_supported(&d0, &d3).value, 3.0);
        assert_eq!(dw_integer_supported(&d0, &d1).value, 1.0);
        assert_eq!(dtv_discrete(&d0, &d0).value, 0.0);
    }

    #[test]
    fn binomial_vs_poisson() {
        let b = binomial_pmf(2, 0.5).unwrap();
        let p = poisson_pmf(1.0, 1e-12).unwrap();
        let v = dtv_discrete(&b, &p).value;
        assert!((v - 0.198_181).abs() < 1e-6, "{v}");
    }

    #[test]
    fn continuous_targets() {
        let d1 = FinitePmf::point_mass(1);
        let d0 = FinitePmf::point_mass(0);
        let w = dw_discrete_vs_target(&d1, &TargetLaw::Exponential).unwrap().value;
        assert!((w - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
        let w0 = dw_discrete_vs_target(&d0, &TargetLaw::Exponential).unwrap().value;
        assert!((w0 - 1.0).abs() < 1e-15);
        let k0 = dk_discrete_vs_target(&d0, &TargetLaw::Exponential).unwrap().value;
        assert_eq!(k0, 1.0);
        // point mass at 0 against N(0,1): dW = E|Z| = √(2/π)
        let wn = dw_discrete_vs_target(&d0, &TargetLaw::Normal).unwrap().value;
        assert!((wn - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dk_from_dw() {
        let v = dk_from_dw_normal(0.01).unwrap();
        assert!((v - (2.0 / std::f64::consts::PI).powf(0.25) * 0.1).abs() < 1e-15);
        assert!(dk_from_dw_bound(0.1, 0.0).is_err());
    }

    #[test]
    fn too_few_samples() {
        let x = vec![0.0; 10];
        assert!(matches!(
            estimate_metric_mc(&x, Reference::Samples(&x), Metric::Kolmogorov),
            Err(SteinError::InsufficientSamples { .. })
        ));
    }
}
