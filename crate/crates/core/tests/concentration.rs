use proptest::prelude::*;
use rand::Rng;
use stein::concentration::*;
use stein::dist::{normal_quantile, sample_uniform_permutation, RngStream};
use stein::models::curie_weiss::{cw_exact_plus_count, curie_weiss_gibbs};
use stein::models::head_runs::{cyclic_runs_count, cyclic_runs_moments};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn chernoff_examples() {
    let normal = |th: f64| (th * th / 2.0).exp();
    for t in [1.0, 2.0, 3.0] {
        let r = chernoff_bound(normal, t, (0.0, 10.0), Some(t)).unwrap();
        assert!(close(r.value, (-t * t / 2.0).exp(), 1e-12) && close(r.theta, t, 1e-6), "t={t}");
        // without the analytic start the search still lands on θ = t
        let r = chernoff_bound(normal, t, (0.0, 10.0), None).unwrap();
        assert!(close(r.value, (-t * t / 2.0).exp(), 1e-12));
    }
    assert!(close(chernoff_bound(normal, 0.0, (0.0, 5.0), None).unwrap().value, 1.0, 1e-15));
    // centered Poisson, λ = 1, t = 2: minimizer log 3, value e²/27
    let lambda: f64 = 1.0;
    let pois = |th: f64| (lambda * (th.exp() - 1.0 - th)).exp();
    let r = chernoff_bound(pois, 2.0, (0.0, 5.0), Some(3f64.ln())).unwrap();
    let want = (-2.0 * (3f64.ln() - 1.0) - 3f64.ln()).exp();
    assert!(close(r.value, want, 1e-12) && close(want, 2f64.exp() / 27.0, 1e-15));
    assert!(close(r.theta, 3f64.ln(), 1e-6));
    assert!(chernoff_bound(|_| f64::INFINITY, 1.0, (0.0, 1.0), None).is_err());
    assert!(chernoff_bound(normal, 1.0, (1.0, 0.0), None).is_err());
}

#[test]
fn exchangeable_pair_tails() {
    let (u, l) = exch_pair_tails(0.0, 1.0, 1.0).unwrap();
    assert!(close(u, (-0.5f64).exp(), 1e-15) && close(l, u, 1e-15));
    assert_eq!(exch_pair_tails(0.3, 1.0, 0.0).unwrap(), (1.0, 1.0));
    assert!(exch_pair_tails(0.0, 0.0, 1.0).is_err());
    assert!(exch_pair_tails(-1.0, 1.0, 1.0).is_err());
    for t in [0.5, 1.0, 4.0] {
        let (u, l) = exch_pair_tails(0.7, 2.0, t).unwrap();
        assert!(l <= u);
        assert_eq!(generalized_exch_tails(0.7, 2.0, t).unwrap(), (u, l));
    }
    // Curie–Weiss plug-in B = 0, C = 2(1+β)/n on f(σ)
    let (n, beta) = (100.0, 0.5);
    let c = 2.0 * (1.0 + beta) / n;
    let (u, _) = generalized_exch_tails(0.0, c, 0.1).unwrap();
    assert!(close(u, (-0.01 / (2.0 * c)).exp(), 1e-15));
}

#[test]
fn curie_weiss_bound_values() {
    assert!(close(curie_weiss_concentration(0.5, 0.0, 100, 0.0).unwrap(), 2.0, 1e-15));
    let v = curie_weiss_concentration(0.5, 0.0, 100, 2.0).unwrap();
    assert!(close(v, 2.0 * (-4.0f64 / 6.0).exp(), 1e-15) && close(v, 1.027, 1e-3));
    assert!(curie_weiss_concentration(0.0, 0.0, 100, 1.0).is_err());
    assert!(curie_weiss_concentration(0.5, 0.0, 1, 1.0).is_err());
}

#[test]
fn size_bias_and_hoeffding_values() {
    let (u, l) = size_bias_tails(2.0, 2.0, 5.0, 1.0, true, true).unwrap();
    assert!(close(l.unwrap(), (-1.0f64 / 10.0).exp(), 1e-15));
    assert!(close(u.unwrap(), (-1.0 / (2.0 * (5.0 + 5.0 / (2.0 * 2f64.sqrt())))).exp(), 1e-15));
    assert_eq!(size_bias_tails(2.0, 2.0, 5.0, 0.0, true, false).unwrap(), (None, Some(1.0)));
    assert!(size_bias_tails(2.0, 2.0, 5.0, 1.0, false, false).is_err());
    assert!(size_bias_tails(2.0, 2.0, 0.0, 1.0, true, true).is_err());

    let zero = vec![vec![0.0; 10]; 10];
    for t in [0.5, 1.0, 3.0] {
        assert!(close(hoeffding_combinatorial(&zero, t).unwrap(), 2.0 * (-t / 2.0f64).exp(), 1e-15));
    }
    let id: Vec<Vec<f64>> = (0..10).map(|i| (0..10).map(|j| (i == j) as u8 as f64).collect()).collect();
    assert!(close(hoeffding_combinatorial(&id, 2.0).unwrap(), 2.0 * (-4.0f64 / 8.0).exp(), 1e-15));
    assert!(hoeffding_combinatorial(&[vec![1.5]], 1.0).is_err());
    assert!(hoeffding_combinatorial(&[vec![0.5, 0.5]], 1.0).is_err());
}

#[test]
fn wilson_interval_sanity() {
    let (lo, hi) = wilson_interval(0, 10_000, 2.576);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 1e-3);
    let (lo, hi) = wilson_interval(5_000, 10_000, 2.576);
    assert!(lo < 0.5 && hi > 0.5 && close(hi - 0.5, 0.5 - lo, 1e-12));
}

#[test]
fn normal_chernoff_is_sound() {
    let mut rng = RngStream::new(21, 0);
    let rep = empirical_tail_check(
        "normal",
        |r: &mut RngStream| Ok(normal_quantile(r.random::<f64>().clamp(1e-300, 1.0 - 1e-16))),
        |t| Ok((-t * t / 2.0).exp()),
        &[1.0, 2.0, 3.0],
        100_000,
        &mut rng,
    )
    .unwrap();
    assert!(rep.all_sound(), "{rep:?}");
    assert!(close(rep.empirical_freq[0], 0.1587, 0.01));
    let constant = empirical_tail_check("constant", |_: &mut RngStream| Ok(0.5), |_| Ok(0.0), &[0.6, 1.0], 10_000, &mut rng).unwrap();
    assert!(constant.empirical_freq.iter().all(|f| *f == 0.0));
    assert!(empirical_tail_check("few", |_: &mut RngStream| Ok(0.0), |_| Ok(1.0), &[1.0], 100, &mut rng).is_err());
}

#[test]
fn hoeffding_is_sound() {
    let mut rng = RngStream::new(22, 0);
    let a: Vec<Vec<f64>> = (0..10).map(|_| (0..10).map(|_| rng.random::<f64>()).collect()).collect();
    let grid = [0.5, 1.0, 1.5, 2.0, 3.0];
    let rep = empirical_tail_check(
        "hoeffding",
        |r: &mut RngStream| Ok(hoeffding_statistic(&a, &sample_uniform_permutation(10, r)?).abs()),
        |t| hoeffding_combinatorial(&a, t),
        &grid,
        10_000,
        &mut rng,
    )
    .unwrap();
    assert!(rep.all_sound(), "{rep:?}");
    assert!(rep.bound.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn curie_weiss_is_sound() {
    let (n, beta, h) = (100usize, 0.5, 0.0);
    let mut rng = RngStream::new(23, 0);
    let mut c = curie_weiss_gibbs(n, beta, h, 100 * n, &mut rng).unwrap();
    let grid = [1.0, 2.0, 3.0];
    // event |m − tanh(βm + βh)| − β/n ≥ t/√n, rescaled so the threshold is t
    let stat = |m: f64| ((m - (beta * m + beta * h).tanh()).abs() - beta / n as f64) * (n as f64).sqrt();
    let rep = empirical_tail_check(
        "curie-weiss",
        |r: &mut RngStream| {
            for _ in 0..2 {
                c.sweep(r);
            }
            Ok(stat(c.magnetization()))
        },
        |t| curie_weiss_concentration(beta, h, n, t),
        &grid,
        10_000,
        &mut rng,
    )
    .unwrap();
    assert!(rep.all_sound(), "{rep:?}");
    // the exact probability under the magnetization law also sits below the bound
    let law = cw_exact_plus_count(n, beta, h).unwrap();
    for &t in &grid {
        let exact: f64 = law.iter().filter(|(k, _)| stat((2 * k - n as i64) as f64 / n as f64) >= t).map(|(_, p)| p).sum();
        assert!(exact <= curie_weiss_concentration(beta, h, n, t).unwrap());
    }
}

#[test]
fn head_run_size_bias_tails_are_sound() {
    let (n, k, p) = (100usize, 3usize, 0.5);
    let (mu, var) = cyclic_runs_moments(n, p, k);
    let s = var.sqrt();
    let c = (2 * k - 1) as f64;
    let grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let mut rng = RngStream::new(24, 0);
    let draw = |r: &mut RngStream| -> stein::Result<f64> {
        let bits: Vec<bool> = (0..n).map(|_| r.random_bool(p)).collect();
        Ok((cyclic_runs_count(&bits, k)? as f64 - mu) / s)
    };
    let up = empirical_tail_check("runs upper", draw, |t| Ok(size_bias_tails(mu, var, c, t, true, true)?.0.unwrap()), &grid, 20_000, &mut rng).unwrap();
    let lo = empirical_tail_check("runs lower", |r: &mut RngStream| Ok(-draw(r)?), |t| Ok(size_bias_tails(mu, var, c, t, true, true)?.1.unwrap()), &grid, 20_000, &mut rng).unwrap();
    assert!(up.all_sound() && lo.all_sound(), "{up:?} {lo:?}");
}

proptest! {
    #[test]
    fn tail_bounds_nonincreasing(b in 0.0f64..3.0, c in 0.01f64..3.0, t in 0.01f64..10.0, dt in 0.0f64..2.0) {
        let (u1, l1) = exch_pair_tails(b, c, t).unwrap();
        let (u2, l2) = exch_pair_tails(b, c, t + dt).unwrap();
        prop_assert!(u2 <= u1 + 1e-15 && l2 <= l1 + 1e-15);
        prop_assert!(l1 <= u1 + 1e-15);
        let beta = c;
        prop_assert!(curie_weiss_concentration(beta, 0.0, 50, t + dt).unwrap() <= curie_weiss_concentration(beta, 0.0, 50, t).unwrap());
    }
}
