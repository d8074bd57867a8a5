use std::collections::BTreeSet;

use proptest::prelude::*;
use stein::bounds::*;
use stein::metrics::Metric;
use stein::models::er::{triangle_moments, DegreeMode};
use stein::models::head_runs::head_runs_neighborhoods;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[test]
fn berry_esseen_arithmetic() {
    let r = be_iid(1.0, 100).unwrap();
    assert!(close(r.value, 0.188, 1e-15));
    assert_eq!(r.metric, Metric::Kolmogorov);
    assert!(close(be_iid(1.0, 400).unwrap().value, 0.094, 1e-15));
    assert!(close(be_iid(1.3, 4 * 37).unwrap().value * 2.0, be_iid(1.3, 37).unwrap().value, 1e-15));
    assert!(be_iid(0.9, 10).is_err());
    assert!(be_iid(1.0, 0).is_err());
}

#[test]
fn iid_sum_arithmetic() {
    let r = wass_iid_sum(&[1.0; 100], &[1.0; 100]).unwrap();
    assert!(close(r.value, 0.1 + SQRT_2_OVER_PI * 0.1, 1e-14), "{}", r.value);
    assert!(close(r.value, 0.1798, 1e-4));
    let one = wass_iid_sum(&[1.0], &[1.0]).unwrap();
    assert!(close(one.value, 1.0 + SQRT_2_OVER_PI, 1e-14));
    assert_eq!(wass_iid_sum(&[0.0; 5], &[0.0; 5]).unwrap().value, 0.0);
    assert!(wass_iid_sum(&[], &[]).is_err());
    assert!(wass_iid_sum(&[1.0], &[1.0, 1.0]).is_err());
}

#[test]
fn dependency_arithmetic() {
    let n = 64usize;
    let a = wass_dependency(&vec![1.0; n], &vec![1.0; n], 1.0, (n as f64).sqrt()).unwrap();
    let iid = wass_iid_sum(&vec![1.0; n], &vec![1.0; n]).unwrap();
    // same third-moment term; the fourth-moment constant differs (√26 vs √2)
    assert!(close(a.term("third_moment").unwrap(), iid.term("third_moment").unwrap(), 1e-15));
    let b = wass_dependency(&vec![1.0; n], &vec![1.0; n], 2.0, (n as f64).sqrt()).unwrap();
    assert!(close(b.term("third_moment").unwrap(), 4.0 * a.term("third_moment").unwrap(), 1e-15));
    assert!(close(b.term("fourth_moment").unwrap(), 8f64.sqrt() * a.term("fourth_moment").unwrap(), 1e-14));
    assert!(wass_dependency(&[1.0], &[1.0], 1.0, 0.0).is_err());
    assert!(wass_dependency(&[1.0], &[1.0], 0.5, 1.0).is_err());

    let t = wass_triangles(10, 0.5).unwrap();
    let (_, var) = triangle_moments(10, 0.5);
    let p3: f64 = 0.125;
    let s = var.sqrt();
    let d = 22.0;
    let want = d * d / s.powi(3) * 120.0 * p3 * (1.0 - p3) * ((1.0 - p3).powi(2) + p3.powi(2))
        + 26f64.sqrt() * d.powf(1.5) / (std::f64::consts::PI.sqrt() * s * s) * (120.0 * p3 * (1.0 - p3) * ((1.0 - p3).powi(3) + p3.powi(3))).sqrt();
    assert!(close(t.value, want, 1e-12));
    assert_eq!(t.metric, Metric::Wasserstein);
    assert!(!t.notes.is_empty());
}

#[test]
fn exchangeable_pair_normal() {
    assert_eq!(wass_exch_pair(0.5, 0.0, 0.0).unwrap().value, 0.0);
    assert!(wass_exch_pair(0.0, 0.0, 0.0).is_err());
    assert!(wass_exch_pair(1.5, 0.0, 0.0).is_err());
    // iid Rademacher, replace one coordinate: a = 1/n, E[(W′−W)²|W] = 2/n, E|W′−W|³ = 4n^{−3/2}
    let f = |n: f64| wass_exch_pair(1.0 / n, 0.0, 4.0 * n.powf(-1.5)).unwrap().value;
    assert!(close(f(100.0), 4.0 / 30.0, 1e-14));
    assert!(close(f(400.0) * 2.0, f(100.0), 1e-14));
    // anti-voter form
    let r = wass_antivoter(8, 7, 4.0, 9.0).unwrap();
    let want = 32.0 / 24.0 + 3.0 / (7.0 * 4.0 * (2.0 * std::f64::consts::PI).sqrt());
    assert!(close(r.value, want, 1e-14));
    let mc = wass_antivoter(8, 7, Estimate::mc(4.0, 0.5), Estimate::mc(9.0, 1.0)).unwrap();
    assert!(close(mc.value, want, 1e-14) && mc.ci_radius > 0.0);
}

#[test]
fn size_and_zero_bias_normal() {
    assert_eq!(wass_size_bias(2.0, 1.5, 0.0, 0.0).unwrap().value, 0.0);
    let a = wass_size_bias(2.0, 1.5, 0.3, 0.4).unwrap();
    let b = wass_size_bias(2.0, 1.5, 0.3, 0.8).unwrap();
    assert!(close(b.term("square_difference").unwrap(), 2.0 * a.term("square_difference").unwrap(), 1e-15));
    assert!(wass_size_bias(0.0, 1.0, 0.0, 0.0).is_err());
    assert_eq!(wass_zero_bias(0.0).unwrap().value, 0.0);
    let n: f64 = 25.0;
    assert!(wass_zero_bias(2.0 / n.sqrt()).unwrap().value <= 4.0 / n.sqrt() + 1e-15);
    let z = wass_zero_bias(Estimate::mc(0.1, 0.01)).unwrap();
    assert!(close(z.ci_radius, 0.02, 1e-15) && close(z.upper(), 0.22, 1e-15));
    assert_eq!(kolm_zero_bias(0.0).unwrap().value, 0.0);
    let k = kolm_zero_bias(0.1).unwrap().value;
    let s = (2.0 * std::f64::consts::PI).sqrt();
    assert!(close(k, 0.1 * (1.0 + 1.0 / s + s / 4.0), 1e-15) && close(k, 0.2026, 1e-4), "{k}");
    assert!(close(kolm_zero_bias(0.05).unwrap().value * 2.0, k, 1e-15));
    assert_eq!(kolm_exch_pair(0.3, 0.0, 0.0).unwrap().value, 0.0);
    let big = kolm_exch_pair(0.25, 0.0, 3.0).unwrap();
    assert!(big.term("cubic_jump").unwrap() > big.term("jump").unwrap());
    assert!(kolm_exch_pair(-0.1, 0.0, 0.0).is_err());
}

#[test]
fn small_numbers_and_dependency() {
    let ps = vec![0.1; 10];
    assert!(close(tv_small_numbers(&ps).unwrap().value, 0.1, 1e-15));
    assert!(close(tv_small_numbers(&[1.0]).unwrap().value, 1.0, 1e-15));
    assert!(tv_small_numbers(&[0.0, 0.0]).is_err());
    let selfish: Vec<Vec<(usize, f64)>> = (0..10).map(|i| vec![(i, 0.1)]).collect();
    assert!(close(tv_dependency_poisson(&ps, &selfish).unwrap().value, 0.1, 1e-15));
    // two dependent indicators with P(both)=0.05
    let toy = tv_dependency_poisson(&[0.2, 0.3], &[vec![(0, 0.2), (1, 0.05)], vec![(1, 0.3), (0, 0.05)]]).unwrap();
    let b1 = 0.04 + 0.06 + 0.09 + 0.06;
    assert!(close(toy.value, b1 + 0.1, 1e-15));
    assert!(tv_dependency_poisson(&[0.2], &[vec![(0, f64::NAN)]]).is_err());
    assert!(tv_dependency_poisson(&[0.2, 0.3], &[vec![(0, 0.2)]]).is_err());
}

#[test]
fn head_runs_bound() {
    let r = tv_head_runs(20, 0.5, 3).unwrap();
    let lambda = 1.1875;
    assert!(close(r.inputs["lambda"].value, lambda, 1e-15));
    assert!(close(r.value, lambda * lambda * 7.0 / 18.0 + 2.0 * lambda * 0.125, 1e-14));
    assert!(close(r.value, 0.8452, 1e-4));
    assert!(tv_head_runs(10, 0.6, 10).unwrap().value < 0.05);
    assert!(tv_head_runs(5, 0.5, 6).is_err());
    // the generic dependency bound with the de-clumped neighborhoods never exceeds the display
    for &(n, p, k) in &[(20, 0.5, 3), (100, 0.3, 4), (50, 0.7, 6), (12, 0.5, 1)] {
        let (pi, nb) = head_runs_neighborhoods(n, p, k).unwrap();
        let generic = tv_dependency_poisson(&pi, &nb).unwrap();
        let display = tv_head_runs(n, p, k).unwrap();
        assert!(generic.value <= display.value + 1e-12, "n={n} k={k}: {} > {}", generic.value, display.value);
    }
}

#[test]
fn triangles_and_subgraphs() {
    let (n, p) = (10, 0.1);
    let (lambda, var) = triangle_moments(n, p);
    assert!(close(lambda, 0.12, 1e-15));
    let inc = tv_size_bias_increasing(lambda, var, 120.0 * p.powi(6)).unwrap();
    let sub = tv_subgraph(p, &SubgraphDescriptor::triangle(n)).unwrap();
    let display = 0.12 * (0.001 + 21.0 * 0.01 * 0.9);
    assert!(close(inc.value, display, 1e-14) && close(sub.value, display, 1e-14), "{} {}", inc.value, sub.value);
    assert!(close(display, 0.0228, 1e-12));
    let e = tv_subgraph(0.2, &SubgraphDescriptor::edge(6)).unwrap();
    assert!(close(e.value, 0.2, 1e-15));
    assert!(tv_subgraph(0.3, &SubgraphDescriptor { name: "bad".into(), edges: 3, copies: 5.0, overlaps: vec![1.0] }).is_err());
    assert!(close(tv_size_bias_increasing(2.0, 2.0, 0.0).unwrap().value, 0.0, 1e-15));
}

// all 4-cycles of K_n as edge sets
fn four_cycles(n: usize) -> Vec<BTreeSet<(usize, usize)>> {
    let e = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let vs = [a, b, c, d];
                    if (0..4).any(|i| (i + 1..4).any(|j| vs[i] == vs[j])) {
                        continue;
                    }
                    let s: BTreeSet<_> = [e(a, b), e(b, c), e(c, d), e(d, a)].into_iter().collect();
                    out.insert(s);
                }
            }
        }
    }
    out.into_iter().collect()
}

#[test]
fn four_cycle_overlaps_by_brute_force() {
    let all = four_cycles(7);
    assert_eq!(all.len(), 105);
    let alpha = &all[0];
    let mut counts = [0.0; 3];
    for c in &all {
        let outside = c.difference(alpha).count();
        if (1..4).contains(&outside) {
            counts[outside - 1] += 1.0;
        }
    }
    let d = SubgraphDescriptor::kcycle(7, 4).unwrap();
    assert_eq!(d.copies, 105.0);
    assert_eq!(d.overlaps, counts.to_vec());
    assert!(tv_subgraph(0.2, &d).unwrap().value > 0.0);
}

#[test]
fn decreasing_couplings() {
    assert_eq!(tv_size_bias_decreasing(1.5, 1.5).unwrap().value, 0.0);
    assert!(tv_size_bias_decreasing(1.0, 1.5).is_err());
    let h = tv_hypergeometric(20, 5, 6).unwrap();
    let (nn, n, m) = (20.0, 5.0, 6.0);
    let display = f64::min(1.0, n * m / nn) * (n / (nn - 1.0) + m / (nn - 1.0) - n * m / (nn * (nn - 1.0)) - 1.0 / (nn - 1.0));
    assert!(close(h.value, display, 1e-14));
    // coupon: the display equals min{1,λ}(1 − Var/λ) with the closed-form variance
    for &(n, k) in &[(8usize, 16usize), (20, 40), (5, 3)] {
        let nf = n as f64;
        let a = (1.0 - 1.0 / nf).powi(k as i32);
        let lambda = nf * a;
        let var = lambda * (1.0 - a) + nf * (nf - 1.0) * ((1.0 - 2.0 / nf).powi(k as i32) - a * a);
        let via = tv_size_bias_decreasing(lambda, var).unwrap();
        assert!(close(tv_coupon(n, k).unwrap().value, via.value, 1e-12), "n={n} k={k}");
    }
}

#[test]
fn poisson_exchangeable_pairs() {
    assert_eq!(tv_exch_pair_poisson(2.0, 1.0, 0.0, 0.0).unwrap().value, 0.0);
    assert!(close(tv_fixed_points(10).unwrap().value, 0.4, 1e-15));
    // resample a uniform coordinate of independent indicators, c = n: enumerate states
    let ps = [0.1, 0.3, 0.05, 0.2, 0.15, 0.25];
    let n = ps.len();
    let lambda: f64 = ps.iter().sum();
    let (mut up, mut down) = (0.0, 0.0);
    for mask in 0u32..(1 << n) {
        let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let prob: f64 = (0..n).map(|i| if x[i] { ps[i] } else { 1.0 - ps[i] }).product();
        let w = x.iter().filter(|b| **b).count() as f64;
        let pu: f64 = (0..n).filter(|&i| !x[i]).map(|i| ps[i]).sum::<f64>() / n as f64;
        let pd: f64 = (0..n).filter(|&i| x[i]).map(|i| 1.0 - ps[i]).sum::<f64>() / n as f64;
        up += prob * (lambda - n as f64 * pu).abs();
        down += prob * (w - n as f64 * pd).abs();
    }
    let r = tv_exch_pair_poisson(lambda, n as f64, up, down).unwrap();
    let s2: f64 = ps.iter().map(|p| p * p).sum();
    assert!(close(r.value, 2.0 * f64::min(1.0, lambda.powf(-0.5)) * s2, 1e-14));
}

#[test]
fn degree_vertices() {
    let (n, p) = (10usize, 0.2f64);
    let r = tv_degree_vertices(n, p, 0, DegreeMode::AtMost).unwrap();
    let q2 = 0.8f64.powi(9);
    let b0 = q2;
    let want = q2 + 81.0 * p * b0 * b0 / (9.0 * 0.8 * q2);
    assert!(close(r.value, want, 1e-14));
    assert!(close(r.inputs["q"].value, q2, 1e-15));
    let z = tv_degree_vertices(n, 0.0, 2, DegreeMode::AtMost).unwrap();
    assert!(close(z.inputs["q"].value, 1.0, 1e-15) && close(z.value, 1.0, 1e-15));
    let top = tv_degree_vertices(n, p, 9, DegreeMode::AtLeast).unwrap();
    let q1 = p.powi(9);
    assert!(close(top.inputs["q"].value, q1, 1e-20));
    assert!(close(top.value, q1 + 81.0 * 0.8 * q1 * q1 / (9.0 * p * q1), 1e-15));
    assert!(tv_degree_vertices(n, p, 10, DegreeMode::AtLeast).is_err());
    assert!(tv_degree_vertices(n, 0.0, 3, DegreeMode::AtLeast).is_err());
}

#[test]
fn exponential_and_geometric() {
    assert_eq!(wass_equilibrium(0.0).unwrap().value, 0.0);
    for p in [0.2, 0.05] {
        assert!(close(wass_equilibrium(p / 2.0).unwrap().value, p, 1e-15));
        let tight = wass_geometric_sum(p, 1.0, 0.0, Some(Estimate::exact(0.5))).unwrap();
        assert!(close(tight.value, p, 1e-15));
        let relaxed = wass_geometric_sum(p, 4.0 / 3.0, 0.0, None).unwrap();
        assert!(close(relaxed.value, 10.0 * p / 3.0, 1e-14));
        assert!(tight.value <= relaxed.value);
    }
    assert!(close(wass_geometric_sum(0.1, 2.0, 0.0, Some(Estimate::exact(0.0))).unwrap().value, 0.0, 1e-15));
    assert!(wass_geometric_sum(0.0, 1.0, 0.0, None).is_err());
    assert_eq!(tv_discrete_equilibrium(1.0, 3.0).unwrap().value, 0.0);
    assert_eq!(tv_discrete_equilibrium(0.3, 0.0).unwrap().value, 0.0);
    assert!(close(tv_uniform_attachment(100).unwrap().value, 0.1121, 1e-4));
    let one = tv_uniform_attachment(1).unwrap();
    assert!(close(one.value, 2.0, 1e-15) && one.is_vacuous());
}

#[test]
fn every_theorem_id_is_unique() {
    let ids: BTreeSet<_> = THEOREMS.iter().map(|(id, _)| *id).collect();
    assert_eq!(ids.len(), THEOREMS.len());
}

#[test]
fn moment_summary_from_samples() {
    let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let m = MomentSummary::from_samples(&xs).unwrap();
    assert!(close(m.mean.value, 0.0, 1e-15));
    assert!(close(m.abs3.value, 1.0, 1e-15) && close(m.m4.value, 1.0, 1e-15));
    assert!(m.mean.ci_radius() > 0.0);
    assert!(MomentSummary::from_samples(&[1.0]).is_err());
}

proptest! {
    #[test]
    fn monotone_in_inputs(a in 0.01f64..1.0, x in 0.0f64..5.0, y in 0.0f64..5.0, dx in 0.0f64..1.0) {
        prop_assert!(wass_exch_pair(a, x + dx, y).unwrap().value >= wass_exch_pair(a, x, y).unwrap().value);
        prop_assert!(wass_exch_pair(a, x, y + dx).unwrap().value >= wass_exch_pair(a, x, y).unwrap().value);
        prop_assert!(kolm_exch_pair(a, x, y + dx).unwrap().value >= kolm_exch_pair(a, x, y).unwrap().value);
        prop_assert!(wass_size_bias(1.0 + x, 1.0, y, dx).unwrap().value >= 0.0);
        prop_assert!(tv_size_bias_poisson(1.0 + x, y + dx).unwrap().value >= tv_size_bias_poisson(1.0 + x, y).unwrap().value);
        prop_assert!(wass_zero_bias(x + dx).unwrap().value >= wass_zero_bias(x).unwrap().value);
    }

    #[test]
    fn head_runs_bound_nonnegative(n in 2usize..500, k in 1usize..8, p in 0.01f64..0.99) {
        let k = k.min(n);
        let r = tv_head_runs(n, p, k).unwrap();
        prop_assert!(r.value >= 0.0 && r.value.is_finite());
    }
}
