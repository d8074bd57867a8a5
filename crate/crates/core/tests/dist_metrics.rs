use proptest::prelude::*;
use stein::dist::*;
use stein::metrics::*;
use stein::SteinError;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn pmf_from(offset: i64, w: &[f64]) -> FinitePmf {
    let s: f64 = w.iter().sum();
    FinitePmf::new(offset, w.iter().map(|x| x / s).collect(), 0.0).unwrap()
}

#[test]
fn pmf_validation() {
    assert!(FinitePmf::new(0, vec![0.5, 0.6], 0.0).is_err());
    assert!(FinitePmf::new(0, vec![-0.1, 1.1], 0.0).is_err());
    assert!(FinitePmf::new(0, vec![0.5, 0.4], 0.1).is_ok());
    assert!(binomial_pmf(3, 1.5).is_err());
    assert!(poisson_pmf(-1.0, 1e-12).is_err());
    let b = binomial_pmf(10, 0.3).unwrap();
    assert!(close(b.mean(), 3.0, 1e-12) && close(b.variance(), 2.1, 1e-12));
    let c = b.convolve(&binomial_pmf(5, 0.3).unwrap()).unwrap();
    let d = binomial_pmf(15, 0.3).unwrap();
    assert!(dtv_discrete(&c, &d).value < 1e-14);
}

#[test]
fn poisson_binomial_matches_binomial() {
    let pb = poisson_binomial_pmf(&[0.2; 12]).unwrap();
    assert!(dtv_discrete(&pb, &binomial_pmf(12, 0.2).unwrap()).value < 1e-14);
}

#[test]
fn point_mass_distances() {
    let a = FinitePmf::point_mass(2);
    let b = FinitePmf::point_mass(5);
    assert_eq!(dtv_discrete(&a, &b).value, 1.0);
    assert_eq!(dk_discrete_vs_discrete(&a, &b).value, 1.0);
    assert!(close(dw_integer_supported(&a, &b).value, 3.0, 1e-15));
    assert_eq!(dtv_discrete(&a, &a).value, 0.0);

    let zero = FinitePmf::point_mass(0).to_atoms(1.0, 0.0);
    assert!(close(dw_atoms_vs_continuous(&zero, &TargetLaw::Normal).unwrap().value, (2.0 / std::f64::consts::PI).sqrt(), 1e-10));
    assert!(close(dk_atoms_vs_continuous(&zero, &TargetLaw::Normal).unwrap().value, 0.5, 1e-15));
    assert!(close(dw_atoms_vs_continuous(&zero, &TargetLaw::Exponential).unwrap().value, 1.0, 1e-10));
    assert!(close(dk_atoms_vs_continuous(&zero, &TargetLaw::Exponential).unwrap().value, 1.0, 1e-15));
}

#[test]
fn tail_mass_is_charged() {
    let p = FinitePmf::new(0, vec![0.5, 0.4], 0.1).unwrap();
    let q = FinitePmf::new(0, vec![0.5, 0.5], 0.0).unwrap();
    assert!(dtv_discrete(&p, &q).value >= 0.1 - 1e-15);
}

#[test]
fn normal_functions() {
    assert!(close(normal_cdf(0.0).unwrap(), 0.5, 1e-16));
    assert!(close(normal_cdf(1.959_963_984_540_054).unwrap(), 0.975, 1e-14));
    assert!(close(normal_sf(8.0), 6.220_960_574_271_785e-16, 1e-28));
    for u in [1e-10, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
        assert!(close(normal_cdf(normal_quantile(u)).unwrap(), u, 1e-12 * u.max(1e-3)));
    }
    // Mills ratio tends to 1/x
    assert!(close(mills_ratio(30.0) * 30.0, 1.0, 2e-3));
}

#[test]
fn combinatorics() {
    assert!(close(choose(10, 3), 120.0, 1e-9));
    assert_eq!(choose(3, 5), 0.0);
    assert!(close(ln_factorial(20), (2_432_902_008_176_640_000f64).ln(), 1e-12));
    let big: Vec<f64> = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000)).collect();
    assert!(close(kahan_sum(big.iter().copied()), 1.0 + 1e-12, 1e-16));
}

#[test]
fn streams_are_independent_and_reproducible() {
    use rand::Rng;
    let mut a = RngStream::new(3, 1);
    let mut b = RngStream::new(3, 1);
    let mut c = RngStream::new(3, 2);
    let xa: Vec<u64> = (0..8).map(|_| a.random()).collect();
    let xb: Vec<u64> = (0..8).map(|_| b.random()).collect();
    let xc: Vec<u64> = (0..8).map(|_| c.random()).collect();
    assert_eq!(xa, xb);
    assert_ne!(xa, xc);
}

#[test]
fn monte_carlo_estimates() {
    let mut rng = RngStream::new(5, 0);
    let xs: Vec<f64> = (0..20_000).map(|_| normal_quantile(sample_uniform01(&mut rng).clamp(1e-300, 1.0 - 1e-16))).collect();
    for m in [Metric::Kolmogorov, Metric::Wasserstein] {
        let v = estimate_metric_mc(&xs, Reference::Law(TargetLaw::Normal), m).unwrap();
        assert!(v.value <= v.ci_radius, "{m:?}: {} vs radius {}", v.value, v.ci_radius);
    }
    assert!(matches!(
        estimate_metric_mc(&xs[..10], Reference::Law(TargetLaw::Normal), Metric::Kolmogorov),
        Err(SteinError::InsufficientSamples { .. })
    ));
    assert!(estimate_metric_mc(&xs, Reference::Law(TargetLaw::Poisson { lambda: 1.0 }), Metric::Tv).is_err());
}

#[test]
fn dk_from_dw_is_monotone() {
    let a = dk_from_dw_normal(0.01).unwrap();
    let b = dk_from_dw_normal(0.04).unwrap();
    assert!(close(b, 2.0 * a, 1e-12));
    assert!(dk_from_dw_bound(0.1, 0.0).is_err());
}

proptest! {
    #[test]
    fn metric_invariants(
        w1 in prop::collection::vec(0.01f64..1.0, 1..10),
        w2 in prop::collection::vec(0.01f64..1.0, 1..10),
        w3 in prop::collection::vec(0.01f64..1.0, 1..10),
        o1 in -3i64..3, o2 in -3i64..3, o3 in -3i64..3,
    ) {
        let (p, q, r) = (pmf_from(o1, &w1), pmf_from(o2, &w2), pmf_from(o3, &w3));
        let tv = dtv_discrete(&p, &q).value;
        let dk = dk_discrete_vs_discrete(&p, &q).value;
        let dw = dw_integer_supported(&p, &q).value;
        prop_assert!((0.0..=1.0 + 1e-15).contains(&tv));
        prop_assert!(close(tv, dtv_discrete(&q, &p).value, 1e-15));
        prop_assert!(dk <= tv + 1e-15);
        // on the integers, distance between atoms is at least 1
        prop_assert!(tv <= dw + 1e-12);
        prop_assert!(dtv_discrete(&p, &r).value <= tv + dtv_discrete(&q, &r).value + 1e-14);
        prop_assert!(dw_integer_supported(&p, &r).value <= dw + dw_integer_supported(&q, &r).value + 1e-12);
        // shifting both laws changes nothing
        let ps = pmf_from(o1 + 7, &w1);
        let qs = pmf_from(o2 + 7, &w2);
        prop_assert!(close(dw_integer_supported(&ps, &qs).value, dw, 1e-12));
    }

    #[test]
    fn discrete_targets_agree(lambda in 0.1f64..15.0, n in 1u64..40) {
        let b = binomial_pmf(n, lambda.min(n as f64 * 0.9) / n as f64).unwrap();
        let law = TargetLaw::Poisson { lambda };
        let po = law.pmf(DEFAULT_TOL).unwrap();
        let direct = dk_discrete_vs_discrete(&b, &po).value;
        let via = dk_discrete_vs_target(&b, &law).unwrap().value;
        prop_assert!(close(direct, via, 1e-10));
        prop_assert!(close(dw_integer_supported(&b, &po).value, dw_discrete_vs_target(&b, &law).unwrap().value, 1e-9));
    }

    #[test]
    fn convolution_adds_moments(w1 in prop::collection::vec(0.01f64..1.0, 1..8), w2 in prop::collection::vec(0.01f64..1.0, 1..8)) {
        let (p, q) = (pmf_from(0, &w1), pmf_from(-2, &w2));
        let c = p.convolve(&q).unwrap();
        prop_assert!(close(c.mean(), p.mean() + q.mean(), 1e-12));
        prop_assert!(close(c.variance(), p.variance() + q.variance(), 1e-11));
    }
}
