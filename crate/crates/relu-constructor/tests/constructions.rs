mod common;

use common::oracle;
use rand::Rng;
use relu_constructor::bounds::{mid_budget, monomial_budget, point_fitter_budget, product_budget, step_budget};
use relu_constructor::constructions::*;
use relu_constructor::multiindex::monomial;
use relu_constructor::net::Network;

const SLACK: f64 = 1e-9;

fn eval1(net: &Network, x: f64) -> f64 {
    net.evaluate_scalar(&[x]).unwrap()
}

/// Builder output against the independent dense evaluator.
fn check_oracle(net: &Network, pts: &[Vec<f64>]) {
    for x in pts {
        let a = net.evaluate(x).unwrap();
        let b = oracle::forward(net, x);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()), "{u} vs {v}");
        }
    }
}

// ---------- Ω ----------

#[test]
fn omega_examples() {
    let r = OmegaRegion::new(1, 2, 0.1).unwrap();
    assert!(omega_membership(&[0.45], &r));
    assert!(!omega_membership(&[0.30], &r));
    assert!(!omega_membership(&[0.5], &r));
    let one = OmegaRegion::new(2, 1, 0.2).unwrap();
    for x in [0.0, 0.3, 0.99, 1.0] {
        assert!(!omega_membership(&[x, x], &one));
    }
    assert!(OmegaRegion::new(1, 2, 0.2).is_err());
    assert!(OmegaRegion::new(1, 2, 0.0).is_err());
    assert!((r.measure_bound() - 0.2).abs() < 1e-15);
}

#[test]
fn omega_measure_within_bound() {
    let r = OmegaRegion::new(2, 7, 1.0 / 30.0).unwrap();
    let mut rng = common::rng(3);
    let n = 200_000;
    let hits = (0..n).filter(|_| omega_membership(&[rng.random(), rng.random()], &r)).count();
    assert!((hits as f64 / n as f64) <= r.measure_bound() + 0.01);
}

// ---------- step ----------

#[test]
fn step_trivial_and_examples() {
    let net = build_step_net(1, 1, 1, 1.0 / 3.0, Profile::Simple).unwrap();
    for i in 0..=10 {
        assert_eq!(eval1(&net, i as f64 / 10.0), 0.0);
    }
    assert_eq!(step_cells(4, 1, 1).unwrap(), 16);
    for p in [Profile::Simple, Profile::PaperBudget] {
        let net = build_step_net(4, 1, 1, 1.0 / 48.0, p).unwrap();
        assert!((eval1(&net, 0.5) - 8.0).abs() < 1e-9);
    }
    assert!(build_step_net(4, 1, 1, 1.0 / 47.0, Profile::Simple).is_err());
    assert!(build_step_net(4, 1, 1, 0.0, Profile::Simple).is_err());
}

fn check_step(net: &Network, k: u64, delta: f64) {
    let kf = k as f64;
    for c in 0..k {
        assert!((eval1(net, c as f64 / kf) - c as f64).abs() <= SLACK, "K={k} at {c}/K");
        let hi = (c + 1) as f64 / kf - if c + 1 < k { delta } else { 0.0 };
        for j in 0..10 {
            let x = c as f64 / kf + (hi - c as f64 / kf) * j as f64 / 9.0;
            let v = eval1(net, x);
            assert!((v - c as f64).abs() <= SLACK, "K={k}, cell {c}, x={x}: {v}");
        }
    }
}

#[test]
fn step_exact_for_all_small_k() {
    for k in 1..=256u64 {
        let delta = 1.0 / (3.0 * k as f64);
        check_step(&build_step_net_k(k, delta, None).unwrap(), k, delta);
        for radix in [3, 5, 7] {
            check_step(&build_step_net_k(k, delta / 2.0, Some(radix)).unwrap(), k, delta / 2.0);
        }
    }
}

#[test]
fn step_paper_budget() {
    for d in 1..=3u32 {
        for n in 1..=12 {
            for m in 1..=12 {
                let k = step_cells(n, m, d).unwrap();
                let delta = 1.0 / (3.0 * k as f64);
                let net = build_step_net(n, m, d, delta, Profile::PaperBudget).unwrap();
                assert!(step_budget(n, m, d).unwrap().admits(&net.stats()), "N={n} M={m} d={d}");
                if d == 1 && n <= 4 && m <= 4 {
                    check_step(&net, k, delta);
                }
            }
        }
    }
}

// ---------- point fitter ----------

fn fitter_error(net: &Network, xi: &[f64]) -> f64 {
    xi.iter().enumerate().map(|(i, &v)| (eval1(net, i as f64) - v).abs()).fold(0.0, f64::max)
}

#[test]
fn fitter_examples() {
    for profile in [Profile::Simple, Profile::PaperBudget] {
        let zeros = vec![0.0; 16];
        let net = build_point_fitter(&zeros, 2, 2, 1, profile).unwrap();
        assert!(fitter_error(&net, &zeros) <= 1.0 / 16.0);
        let ramp: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
        let net = build_point_fitter(&ramp, 2, 2, 1, profile).unwrap();
        assert!(fitter_error(&net, &ramp) <= 1.0 / 16.0 + SLACK);
        let half = vec![0.5; 36];
        let net = build_point_fitter(&half, 2, 3, 2, profile).unwrap();
        assert!(fitter_error(&net, &half) <= 1.0 / 1296.0 + SLACK);
    }
}

#[test]
fn fitter_rejects_bad_values() {
    assert!(build_point_fitter(&[0.0; 15], 2, 2, 1, Profile::Simple).is_err());
    let mut v = vec![0.5; 16];
    v[3] = 1.2;
    assert!(build_point_fitter(&v, 2, 2, 1, Profile::Simple).is_err());
    v[3] = -0.1;
    assert!(build_point_fitter(&v, 2, 2, 1, Profile::Simple).is_err());
}

#[test]
fn fitter_enumeration_and_range() {
    let mut rng = common::rng(21);
    for (n, m) in [(2u64, 3u64), (2, 6), (4, 3), (4, 6)] {
        let p = (n * n * m * m) as usize;
        let xi: Vec<f64> = (0..p).map(|_| rng.random()).collect();
        for s in [1u32, 2] {
            let bound = (n as f64).powi(-2 * s as i32) * (m as f64).powi(-2 * s as i32);
            for profile in [Profile::Simple, Profile::PaperBudget] {
                let net = build_point_fitter(&xi, n, m, s, profile).unwrap();
                assert!(fitter_error(&net, &xi) <= bound + SLACK);
                if profile == Profile::PaperBudget {
                    assert!(point_fitter_budget(n, m, s).unwrap().admits(&net.stats()));
                }
                for _ in 0..200 {
                    let v = eval1(&net, rng.random_range(-50.0..(p as f64 + 50.0)));
                    assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}

#[test]
fn multi_fitter_chunks_agree() {
    let mut rng = common::rng(5);
    let vals: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|_| rng.random()).collect()).collect();
    let wide = build_multi_fitter(&vals, None).unwrap();
    let narrow = build_multi_fitter(&vals, Some(12)).unwrap();
    assert!(narrow.stats().width <= 12);
    assert!(narrow.depth() > 2);
    for i in 0..50 {
        let a = wide.evaluate(&[i as f64]).unwrap();
        let b = narrow.evaluate(&[i as f64]).unwrap();
        for j in 0..3 {
            assert!((a[j] - vals[j][i]).abs() < 1e-12);
            assert!((b[j] - vals[j][i]).abs() < 1e-12);
        }
    }
    check_oracle(&narrow, &(0..60).map(|i| vec![i as f64 * 0.9 - 3.0]).collect::<Vec<_>>());
    assert!(build_multi_fitter(&vals, Some(8)).is_err());
}

// ---------- product ----------

fn product_grid_error(net: &Network, a: f64, b: f64, per_axis: usize) -> f64 {
    let mut worst = 0f64;
    for i in 0..per_axis {
        for j in 0..per_axis {
            let x = a + (b - a) * i as f64 / (per_axis - 1) as f64;
            let y = a + (b - a) * j as f64 / (per_axis - 1) as f64;
            worst = worst.max((net.evaluate_scalar(&[x, y]).unwrap() - x * y).abs());
        }
    }
    worst
}

#[test]
fn product_examples() {
    for profile in [Profile::Simple, Profile::PaperBudget] {
        let net = build_product_net(2, 6, -1.0, 1.0, profile).unwrap();
        assert_eq!(net.evaluate_scalar(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(product_grid_error(&net, -1.0, 1.0, 201) <= 0.375);
        let net = build_product_net(4, 8, -1.0, 1.0, profile).unwrap();
        assert!(product_grid_error(&net, -1.0, 1.0, 201) <= 24.0 * 4f64.powi(-8) + SLACK);
    }
    assert!(build_product_net(2, 2, 1.0, 1.0, Profile::Simple).is_err());
    assert!(build_product_net(2, 2, 1.0, -1.0, Profile::Simple).is_err());
}

#[test]
fn product_lemma_grid_and_budget() {
    for n in [2u64, 4] {
        for m in [3u64, 6] {
            for (a, b) in [(-1.0, 1.0), (0.0, 1.0), (-3.0, 0.5)] {
                let bound = 6.0 * (b - a) * (b - a) * (n as f64).powf(-(m as f64));
                for profile in [Profile::Simple, Profile::PaperBudget] {
                    let net = build_product_net(n, m, a, b, profile).unwrap();
                    // Doubling the resolution must not uncover a violation.
                    for per_axis in [101, 201] {
                        assert!(product_grid_error(&net, a, b, per_axis) <= bound + SLACK);
                    }
                    if profile == Profile::PaperBudget {
                        assert!(product_budget(n, m).unwrap().admits(&net.stats()), "N={n} M={m}");
                    }
                }
            }
        }
    }
}

#[test]
fn product_error_matches_closed_form() {
    for (r, l) in [(2, 1), (2, 3), (4, 2), (6, 1), (8, 2)] {
        let p = ProductParams::new(r, l).unwrap();
        let net = build_product_net_with(p, -1.0, 1.0).unwrap();
        let err = product_grid_error(&net, -1.0, 1.0, 161);
        let bound = product_error_bound(p, -1.0, 1.0);
        assert!(err <= bound + 1e-12, "r={r} L={l}: {err} > {bound}");
        // The bound is attained up to grid resolution on the diagonal.
        assert!(err >= 0.5 * bound, "r={r} L={l}: {err} vs {bound}");
        check_oracle(&net, &[vec![0.3, -0.7], vec![1.0, 1.0], vec![-0.2, 0.9]]);
    }
    assert!(ProductParams::new(3, 1).is_err());
    assert!(ProductParams::new(2, 0).is_err());
}

// ---------- monomial ----------

fn monomial_grid_error(net: &Network, alpha: &[u32], per_axis: usize) -> f64 {
    let d = alpha.len();
    let total = per_axis.pow(d as u32);
    let mut worst = 0f64;
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rest = idx;
        for xi in x.iter_mut() {
            *xi = (rest % per_axis) as f64 / (per_axis - 1) as f64;
            rest /= per_axis;
        }
        let v = net.evaluate_scalar(&x).unwrap();
        assert!((-1.0..=1.0).contains(&v));
        worst = worst.max((v - monomial(alpha, &x)).abs());
    }
    worst
}

#[test]
fn monomial_examples() {
    for profile in [Profile::Simple, Profile::PaperBudget] {
        let net = build_monomial_net(&[1, 0], 3, 3, profile).unwrap();
        assert_eq!(net.depth(), 0);
        assert_eq!(monomial_grid_error(&net, &[1, 0], 21), 0.0);
        let net = build_monomial_net(&[2, 0], 1, 1, profile).unwrap();
        assert!(monomial_grid_error(&net, &[2, 0], 101) <= 18.0 * 2f64.powi(-14) + SLACK);
        let net = build_monomial_net(&[1, 1, 1], 2, 1, profile).unwrap();
        assert!(monomial_grid_error(&net, &[1, 1, 1], 21) <= 27.0 * 3f64.powi(-21) + SLACK);
    }
    assert!(build_monomial_net(&[0, 0], 1, 1, Profile::Simple).is_err());
    assert!(build_monomial_net(&[], 1, 1, Profile::Simple).is_err());
}

#[test]
fn monomial_lemma_bounds_and_budget() {
    let alphas: [&[u32]; 6] = [&[1, 0, 0], &[0, 2, 0], &[1, 1, 0], &[3, 0, 0], &[1, 1, 1], &[2, 0, 1]];
    for n in [1u64, 2, 4] {
        for m in [1u64, 3] {
            for alpha in alphas {
                let k: u32 = alpha.iter().sum();
                let bound = 9.0 * k as f64 * ((n + 1) as f64).powf(-7.0 * (k as f64) * m as f64);
                for profile in [Profile::Simple, Profile::PaperBudget] {
                    let net = build_monomial_net(alpha, n, m, profile).unwrap();
                    assert!(monomial_grid_error(&net, alpha, 15) <= bound + SLACK, "{alpha:?} N={n} M={m}");
                    if profile == Profile::PaperBudget {
                        assert!(monomial_budget(k, n, m).unwrap().admits(&net.stats()), "{alpha:?} N={n} M={m}");
                    }
                }
            }
        }
    }
}

// ---------- mid ----------

#[test]
fn mid_examples_and_shape() {
    let net = build_mid_net();
    assert_eq!(net.evaluate_scalar(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
    let st = net.stats();
    assert_eq!((st.width, st.depth), (14, 2));
    assert!(mid_budget().admits(&st));
    let mut rng = common::rng(9);
    for _ in 0..1000 {
        let t: f64 = rng.random_range(-100.0..100.0);
        assert!((net.evaluate_scalar(&[t, t, t]).unwrap() - t).abs() <= 1e-12 * (1.0 + t.abs()));
    }
}

#[test]
fn mid_matches_sorting() {
    let net = build_mid_net();
    let mut rng = common::rng(10);
    let mut pts = Vec::new();
    for _ in 0..100_000 {
        let mut v: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
        let x = v.clone();
        v.sort_by(f64::total_cmp);
        assert!((net.evaluate_scalar(&x).unwrap() - v[1]).abs() <= 1e-12);
        if pts.len() < 50 {
            pts.push(x);
        }
    }
    check_oracle(&net, &pts);
}
