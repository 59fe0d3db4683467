mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::oracle;
use relu_constructor::bounds::{holder_bound, uniform_bound};
use relu_constructor::constructions::*;
use relu_constructor::targets::*;
use relu_constructor::Error;

fn target(kind: BuiltinTarget, d: usize, beta: f64) -> HolderTarget {
    builtin_target(kind, d, beta, 1.0).unwrap()
}

fn quick_grid() -> GridSpec {
    GridSpec { per_axis: Some(41), random_points: 500, seed: 1 }
}

#[test]
fn constant_target_is_reproduced() {
    for beta in [0.5f64, 1.0, 2.0, 3.0] {
        for d in 1..=2 {
            let s = beta.ceil() - 1.0;
            for nm in 1..=3u64 {
                let t = target(BuiltinTarget::Constant, d, beta);
                let (_, c) = build_holder_approximant(&t, nm, nm, &ApproxOptions::default()).unwrap();
                assert!(c.pass);
                assert!(c.measured <= 2.0 * (nm as f64 * nm as f64).powf(-2.0 * (s + 1.0)), "{c:?}");
            }
        }
    }
}

#[test]
fn identity_target_examples() {
    let t = target(BuiltinTarget::Affine, 1, 1.0);
    let (_, c) = build_holder_approximant(&t, 2, 2, &ApproxOptions::default()).unwrap();
    assert!((c.bound - 1.125).abs() < 1e-12);
    assert!(c.pass && c.measured <= 1.125);
    let (_, c) = build_uniform_approximant(&t, 2, 2, &ApproxOptions::default()).unwrap();
    assert!((c.bound - 1.1875).abs() < 1e-12);
    assert!(c.pass);
    assert_eq!(c.grid.excluded, 0);
    assert_eq!(c.shift_convention.as_deref(), Some("max_gap"));
}

#[test]
fn bound_values() {
    assert!((holder_bound(2.0, 2, 1.0, 2, 2).unwrap() - 18.0).abs() < 1e-12);
    for (beta, d, n, m) in [(0.5, 1, 1, 1), (2.5, 3, 4, 2), (3.0, 2, 7, 5)] {
        let h = holder_bound(beta, d, 1.3, n, m).unwrap();
        let u = uniform_bound(beta, d, 1.3, n, m).unwrap();
        assert!((u / h - 19.0 / 18.0).abs() < 1e-14);
        assert!(holder_bound(beta, d, 1.3, n + 1, m).unwrap() <= h);
        assert!(holder_bound(beta, d, 1.3, n, m + 1).unwrap() <= h);
    }
}

#[test]
fn grid_k_convention() {
    assert_eq!(holder_grid_k(1, 2, 2).unwrap(), 16);
    assert_eq!(holder_grid_k(2, 3, 3).unwrap(), 9);
    assert_eq!(holder_grid_k(3, 3, 3).unwrap(), 5);
    assert_eq!(holder_grid_k(3, 1, 1).unwrap(), 1);
    for d in 1..=4usize {
        for nm in 1..=20u64 {
            let k = holder_grid_k(d, nm, 1).unwrap();
            assert!((k as u128).pow(d as u32) >= (nm as u128).pow(2));
            assert!(((k - 1) as u128).pow(d as u32) < (nm as u128).pow(2));
        }
    }
}

#[test]
fn certification_grid_spec() {
    let g = GridSpec::default();
    assert_eq!(g.lattice_per_axis(1), 201);
    assert_eq!(g.lattice_per_axis(2), 101);
    assert_eq!(g.lattice_per_axis(3), 67);
    assert!(g.lattice_per_axis(6).pow(6) <= MAX_LATTICE);
    let pts = grid_points(2, &GridSpec { per_axis: Some(3), random_points: 4, seed: 0 });
    assert_eq!(pts.len(), (9 + 4) * 2);
    assert_eq!(&pts[..4], &[0.0, 0.0, 0.5, 0.0]);
    assert!(passes(1.0 + 5e-10, 1.0));
    assert!(!passes(1.0 + 2e-9, 1.0));
    assert!(!passes(f64::NAN, 1.0));
}

#[test]
fn holder_grid_subset_certifies() {
    for beta in [0.5, 1.0, 2.0, 3.0] {
        for d in 1..=2 {
            for nm in [1u64, 3] {
                for kind in [BuiltinTarget::CosineProduct, BuiltinTarget::Poly] {
                    let t = target(kind, d, beta);
                    let opts = ApproxOptions { grid: quick_grid(), ..Default::default() };
                    let (_, c) = build_holder_approximant(&t, nm, nm, &opts).unwrap();
                    assert!(c.pass, "{c:?}");
                    assert!(c.grid.excluded > 0 || c.k == 1);
                }
            }
        }
    }
}

#[test]
fn uniform_subset_certifies() {
    for beta in [1.0, 3.0] {
        for d in 1..=2 {
            let t = target(BuiltinTarget::CosineProduct, d, beta);
            for shift in [ShiftConvention::SmoothnessScaled, ShiftConvention::MaxGap] {
                let opts = ApproxOptions { shift, grid: quick_grid(), ..Default::default() };
                let (_, c) = build_uniform_approximant(&t, 2, 2, &opts).unwrap();
                assert!(c.pass, "{c:?}");
            }
        }
    }
    let t = target(BuiltinTarget::Poly, 1, 2.0);
    let opts = ApproxOptions { shift: ShiftConvention::Explicit(0.5), ..Default::default() };
    assert!(build_uniform_approximant(&t, 2, 2, &opts).is_err());
}

#[test]
fn paper_budget_profile_fits() {
    for (beta, d, n, m) in [(0.5, 2, 2, 2), (1.0, 1, 3, 3), (2.0, 2, 2, 3), (3.0, 1, 2, 2), (3.0, 2, 1, 1)] {
        let t = target(BuiltinTarget::CosineProduct, d, beta);
        let opts = ApproxOptions { profile: Profile::PaperBudget, grid: quick_grid(), ..Default::default() };
        let (net, c) = build_holder_approximant(&t, n, m, &opts).unwrap();
        let b = c.budget.unwrap();
        assert!(b.admits(&net.stats()) && c.pass, "{c:?}");
        if d == 1 {
            let opts = ApproxOptions { shift: ShiftConvention::SmoothnessScaled, ..opts };
            let (net, c) = build_uniform_approximant(&t, n, m, &opts).unwrap();
            assert!(c.budget.unwrap().admits(&net.stats()) && c.pass, "{c:?}");
        }
    }
}

#[test]
fn missing_derivatives() {
    let full = target(BuiltinTarget::CosineProduct, 2, 2.0);
    let bare = full.without_partials();
    match build_holder_approximant(&bare, 2, 2, &ApproxOptions::default()) {
        Err(Error::MissingDerivative { alpha, .. }) => assert_eq!(alpha.iter().sum::<u32>(), 1),
        other => panic!("expected a missing-derivative error, got {other:?}"),
    }
    let opts = ApproxOptions { finite_differences: true, grid: quick_grid(), ..Default::default() };
    let (_, c) = build_holder_approximant(&bare, 2, 2, &opts).unwrap();
    assert_eq!(c.derivatives, DerivativeSource::FiniteDifferences);
    assert!(c.pass);
    let (_, c) = build_holder_approximant(&full, 2, 2, &opts).unwrap();
    assert_eq!(c.derivatives, DerivativeSource::Analytic);
    // β ≤ 1 never needs derivatives.
    let eval: ScalarFn = Arc::new(|x: &[f64]| 0.5 * x[0]);
    let lip = HolderTarget::new("half", 1, 1.0, 1.0, eval, BTreeMap::new()).unwrap();
    let (_, c) = build_holder_approximant(&lip, 2, 2, &ApproxOptions::default()).unwrap();
    assert_eq!(c.derivatives, DerivativeSource::NotNeeded);
}

#[test]
fn certificate_json_fields() {
    let t = target(BuiltinTarget::Poly, 2, 2.0);
    let opts = ApproxOptions { grid: quick_grid(), ..Default::default() };
    let (_, c) = build_holder_approximant(&t, 2, 1, &opts).unwrap();
    let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    for key in ["profile", "N", "M", "beta", "d", "B0", "bound", "measured", "pass", "stats", "budget"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["profile"], "simple");
    assert_eq!(v["N"], 2);
    let back: ApproxCertificate = serde_json::from_value(v).unwrap();
    assert_eq!(back, c);
}

#[test]
fn constructed_nets_match_oracle() {
    let t = target(BuiltinTarget::CosineProduct, 2, 3.0);
    let (net, _) = build_holder_approximant(&t, 2, 2, &ApproxOptions { grid: quick_grid(), ..Default::default() }).unwrap();
    let mut rng = common::rng(4);
    for _ in 0..200 {
        let x = common::random_point(&mut rng, 2, -0.1, 1.1);
        let a = net.evaluate_scalar(&x).unwrap();
        let b = oracle::forward(&net, &x)[0];
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn outputs_stay_in_range() {
    let t = target(BuiltinTarget::CosineProduct, 1, 2.0);
    let (net, _) = build_holder_approximant(&t, 2, 2, &ApproxOptions::default()).unwrap();
    for i in -100..=200 {
        let v = net.evaluate_scalar(&[i as f64 / 100.0]).unwrap();
        assert!(v.abs() <= t.b0());
    }
}

#[test]
fn profile_names() {
    assert_eq!("paper-budget".parse::<Profile>().unwrap(), Profile::PaperBudget);
    assert_eq!(Profile::Simple.to_string(), "simple");
    assert!("fast".parse::<Profile>().is_err());
    assert_eq!(serde_json::to_string(&Profile::PaperBudget).unwrap(), "\"paper-budget\"");
}
