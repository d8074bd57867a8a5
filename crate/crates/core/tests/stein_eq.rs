use proptest::prelude::*;
use stein::dist::{normal_cdf, TargetLaw};
use stein::stein_eq::*;

fn families() -> Vec<TargetLaw> {
    vec![
        TargetLaw::Normal,
        TargetLaw::Poisson { lambda: 2.0 },
        TargetLaw::Exponential,
        TargetLaw::Geometric0 { p: 0.5 },
    ]
}

#[test]
fn operator_mean_zero_over_suite() {
    for fam in families() {
        for h in standard_suite() {
            let f = operator_argument(&fam, &h).unwrap();
            let e = expected_operator(&fam, f.as_ref()).unwrap_or_else(|e| panic!("{} {}: {e}", fam.name(), h.label()));
            assert!(e.abs() <= 1e-8, "{} {}: {e:e}", fam.name(), h.label());
        }
    }
}

// fourth-order centered difference
fn d5(f: &dyn Fn(f64) -> f64, w: f64, h: f64) -> f64 {
    (-f(w + 2.0 * h) + 8.0 * f(w + h) - 8.0 * f(w - h) + f(w - 2.0 * h)) / (12.0 * h)
}

#[test]
fn normal_fx_solves_equation() {
    for &x in &[-2.0, -0.3, 0.0, 1.0, 3.5] {
        for i in 0..81 {
            let w = -8.0 + 0.2 * i as f64 + 0.013;
            if (w - x).abs() < 0.05 {
                continue;
            }
            let f = |t: f64| normal_solution_fx(x, t).unwrap();
            let lhs = d5(&f, w, 1e-3) - w * f(w);
            let rhs = (w <= x) as u8 as f64 - normal_cdf(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "x={x} w={w} {lhs} {rhs}");
        }
    }
}

#[test]
fn normal_fx_value_at_origin() {
    let v = normal_solution_fx(0.0, 0.0).unwrap();
    assert!((v - 0.626_657_068_657_750_1).abs() < 1e-15);
}

#[test]
fn normal_fh_matches_fx_for_indicator() {
    let h = TestFunction::IndicatorHalfline { x: 0.7 };
    let sol = NormalSolution::new(h).unwrap();
    for &w in &[-5.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
        let a = sol.value(w).unwrap();
        let b = normal_solution_fx(0.7, w).unwrap();
        assert!((a - b).abs() < 1e-10, "{w}: {a} {b}");
    }
}

#[test]
fn exponential_solution_identity_function() {
    let h = TestFunction::Polynomial { coeffs: [0.0, 1.0, 0.0, 0.0] };
    for &x in &[0.0, 0.5, 2.0, 7.0] {
        let f = exponential_solution_fh(&h, x).unwrap();
        assert!((f + x).abs() < 1e-9, "{x}: {f}");
    }
}

#[test]
fn exponential_solution_residual() {
    let h = TestFunction::LipschitzHat { center: 1.5, slope: 0.5 };
    let sol = ExponentialSolution::new(h.clone()).unwrap();
    for &x in &[0.2, 0.7, 1.2, 2.0, 4.0, 9.0] {
        let f = |t: f64| sol.value(t).unwrap();
        let resid = d5(&f, x, 1e-3) - f(x) - (h.value(x) - sol.eh);
        assert!(resid.abs() < 1e-8, "{x}: {resid:e}");
    }
    // indicator closed form: e^{w−x} − e^{−x} below x, 1 − e^{−x} above
    let s = ExponentialSolution::new(TestFunction::IndicatorHalfline { x: 1.0 }).unwrap();
    let e1 = (-1.0f64).exp();
    assert!((s.value(0.4).unwrap() - ((0.4f64 - 1.0).exp() - e1)).abs() < 1e-10);
    assert!((s.value(3.0).unwrap() - (1.0 - e1)).abs() < 1e-10);
}

fn poisson_p(lambda: f64, j: u64) -> f64 {
    let mut p = (-lambda).exp();
    for i in 1..=j {
        p *= lambda / i as f64;
    }
    p
}

#[test]
fn poisson_solution_residual() {
    let a = IntegerSet::finite([0, 2, 3, 9]);
    for &lambda in &[0.5, 1.0, 5.0, 12.0] {
        let pa: f64 = [0, 2, 3, 9].iter().map(|&j| poisson_p(lambda, j)).sum();
        for k in 0..40u64 {
            let lhs = lambda * poisson_solution_fa(lambda, &a, k + 1).unwrap()
                - k as f64 * poisson_solution_fa(lambda, &a, k).unwrap();
            let rhs = a.contains(k) as u8 as f64 - pa;
            assert!((lhs - rhs).abs() < 1e-9, "λ={lambda} k={k}: {lhs} {rhs}");
        }
    }
}

#[test]
fn poisson_complement_negates() {
    let a = IntegerSet::finite([1, 4, 5]);
    for k in 0..20 {
        let f = poisson_solution_fa(3.0, &a, k).unwrap();
        let g = poisson_solution_fa(3.0, &a.complement(), k).unwrap();
        assert!((f + g).abs() < 1e-14);
    }
}

#[test]
fn geometric_solution_residual() {
    let a = IntegerSet::cofinite([1, 2, 6]);
    for &p in &[0.1, 0.5, 0.9] {
        let q: f64 = 1.0 - p;
        // P(Z ∈ A) = 1 − Σ_{i∈{1,2,6}} p q^i
        let pa = 1.0 - [1, 2, 6].iter().map(|&i| p * q.powi(i)).sum::<f64>();
        for k in 0..30u64 {
            let f0 = geometric_solution_fa(p, &a, k).unwrap();
            let f1 = geometric_solution_fa(p, &a, k + 1).unwrap();
            let lhs = q * (f1 - f0) - p * f0;
            let rhs = a.contains(k) as u8 as f64 - pa;
            assert!((lhs - rhs).abs() < 1e-12, "p={p} k={k}");
        }
    }
}

#[test]
fn norm_certification_all_families() {
    for fam in [
        TargetLaw::Normal,
        TargetLaw::Exponential,
        TargetLaw::Poisson { lambda: 0.5 },
        TargetLaw::Poisson { lambda: 1.0 },
        TargetLaw::Poisson { lambda: 5.0 },
        TargetLaw::Geometric0 { p: 0.3 },
    ] {
        let rep = certify_solution_norms(&fam, &CertGrid::default_for(&fam)).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{} {}: {} > {}", rep.family, c.name, c.grid_max, c.constant);
        }
    }
}

#[test]
fn poisson_increment_bound_is_nearly_attained() {
    // sup_A |Δf_A| is attained at A = {k} for k near λ
    let rep = certify_solution_norms(&TargetLaw::Poisson { lambda: 1.0 }, &CertGrid::default_for(&TargetLaw::Poisson { lambda: 1.0 })).unwrap();
    let d = rep.checks.iter().find(|c| c.name == "|Δf_A|").unwrap();
    assert!(d.grid_max > 0.5 * d.constant);
}

#[test]
fn rejects_bad_parameters() {
    assert!(poisson_solution_fa(-1.0, &IntegerSet::empty(), 2).is_err());
    assert!(geometric_solution_fa(1.0, &IntegerSet::empty(), 2).is_err());
    assert!(exponential_solution_fh(&TestFunction::Exponential { theta: 0.0 }, -1.0).is_err());
    assert!(TestFunction::hat(0.0, 2.0).is_err());
    assert!(normal_solution_fx(f64::NAN, 0.0).is_err());
}

proptest! {
    #[test]
    fn fx_bounded(x in -8.0f64..8.0, w in -30.0f64..30.0) {
        let v = normal_solution_fx(x, w).unwrap();
        prop_assert!(v >= 0.0 && v <= (std::f64::consts::PI / 2.0).sqrt() + 1e-12);
        prop_assert!(normal_solution_fx_derivative(x, w).abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn poisson_fa_bounded(lambda in 0.1f64..20.0, mask in 0u32..4096, k in 0u64..60) {
        let a = IntegerSet::finite((0..12u64).filter(|i| mask >> i & 1 == 1));
        let f = poisson_solution_fa(lambda, &a, k).unwrap();
        prop_assert!(f.abs() <= 1.0f64.min(lambda.powf(-0.5)) + 1e-9);
    }
}
