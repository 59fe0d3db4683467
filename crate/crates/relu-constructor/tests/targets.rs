mod common;

use std::f64::consts::{PI, TAU};

use relu_constructor::multiindex::{multi_indices, order};
use relu_constructor::targets::*;

const BETAS: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];

#[test]
fn builtins_pass_holder_spot_check() {
    for kind in BuiltinTarget::ALL {
        for &beta in &BETAS {
            for d in 1..=3 {
                let b0 = 1.5;
                let t = match builtin_target(kind, d, beta, b0) {
                    Ok(t) => t,
                    Err(_) => {
                        assert!(kind == BuiltinTarget::AbsPower && beta > 1.0);
                        continue;
                    }
                };
                let per_axis = [0, 41, 21, 11][d];
                let chk = holder_spot_check(&t, per_axis, 10_000, 7);
                assert!(chk.pass, "{} β={beta} d={d}: {chk:?}", kind.name());
                assert!(!chk.used_finite_differences || kind == BuiltinTarget::AbsPower);
            }
        }
    }
}

#[test]
fn constant_target_has_zero_partials() {
    let t = builtin_target(BuiltinTarget::Constant, 2, 3.0, 2.0).unwrap();
    for a in multi_indices(2, 2).iter().filter(|a| order(a) > 0) {
        assert_eq!(t.partial(a, &[0.3, 0.8]), Some(0.0));
    }
    assert!((t.eval(&[0.1, 0.2]) - 0.6).abs() < 1e-15);
}

#[test]
fn affine_needs_unit_b0() {
    assert!(builtin_target(BuiltinTarget::Affine, 2, 1.0, 0.5).is_err());
    let t = builtin_target(BuiltinTarget::Affine, 2, 1.0, 1.0).unwrap();
    assert!((t.eval(&[0.2, 0.6]) - 0.4).abs() < 1e-15);
}

#[test]
fn abs_power_rules() {
    assert!(builtin_target(BuiltinTarget::AbsPower, 1, 1.5, 1.0).is_err());
    // Hölder constant 1 in d=1: the two-point ratio approaches but never exceeds 1.
    let t = builtin_target(BuiltinTarget::AbsPower, 1, 0.5, 1.0).unwrap();
    let chk = holder_spot_check(&t, 201, 10_000, 3);
    assert!(chk.max_ratio <= 1.0 + 1e-12 && chk.max_ratio > 0.9, "{chk:?}");
}

#[test]
fn unknown_target_name() {
    assert!("bump".parse::<BuiltinTarget>().is_err());
    assert_eq!("cosine_product".parse::<BuiltinTarget>().unwrap(), BuiltinTarget::CosineProduct);
}

#[test]
fn cosine_partials_match_finite_differences() {
    let t = builtin_target(BuiltinTarget::CosineProduct, 2, 3.0, 1.0).unwrap();
    let bare = t.without_partials();
    assert_eq!(bare.missing_partials().len(), 5);
    let x = [0.31, 0.77];
    for a in multi_indices(2, 2) {
        let exact = t.partial(&a, &x).unwrap();
        let (fd, used) = bare.partial_or_fd(&a, &x);
        assert_eq!(used, order(&a) > 0);
        assert!((exact - fd).abs() < 1e-4, "{a:?}: {exact} vs {fd}");
    }
}

#[test]
fn cosine_product_closed_form() {
    let t = builtin_target(BuiltinTarget::CosineProduct, 1, 1.0, 1.0).unwrap();
    // s = 0, r = 1: c = 1/max(1, π) = 1/π.
    assert!((t.eval(&[0.0]) - 1.0 / PI).abs() < 1e-15);
    let t = builtin_target(BuiltinTarget::CosineProduct, 1, 0.5, 1.0).unwrap();
    assert!((t.eval(&[0.0]) - 1.0 / (2f64.sqrt() * PI.sqrt())).abs() < 1e-15);
}

#[test]
fn custom_target_validation() {
    use std::collections::BTreeMap;
    use std::sync::Arc;
    let eval: ScalarFn = Arc::new(|x| x[0]);
    let mut p: BTreeMap<Vec<u32>, ScalarFn> = BTreeMap::new();
    p.insert(vec![2], Arc::new(|_| 0.0));
    assert!(HolderTarget::new("x", 1, 1.5, 1.0, eval.clone(), p).is_err());
    assert!(HolderTarget::new("x", 1, 1.5, -1.0, eval.clone(), BTreeMap::new()).is_err());
    assert!(HolderTarget::new("x", 0, 1.5, 1.0, eval, BTreeMap::new()).is_err());
}

#[test]
fn cube_sampler_mean() {
    let xs = sample_x(&SupportSpec::cube(2), 100_000, 11).unwrap();
    for j in 0..2 {
        let mean = xs.iter().map(|x| x[j]).sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.02);
    }
    assert!(xs.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn circle_points_lie_on_manifold() {
    let spec = SupportSpec::circle(10, 5, 0.0);
    for x in sample_x(&spec, 200, 1).unwrap() {
        assert!(x.iter().all(|v| (0.1..=0.9).contains(v)));
        assert!(distance_to_support(&spec, &x).unwrap() < 1e-9);
    }
}

#[test]
fn torus_points_lie_on_manifold() {
    let spec = SupportSpec::ManifoldNeighborhood { d: 6, intrinsic_dim: 2, embedding_seed: 3, rho: 0.0 };
    for x in sample_x(&spec, 30, 2).unwrap() {
        assert!(distance_to_support(&spec, &x).unwrap() < 1e-9);
    }
}

#[test]
fn neighborhood_points_within_rho() {
    let spec = SupportSpec::circle(10, 5, 0.05);
    let xs = sample_x(&spec, 300, 9).unwrap();
    let mut far = 0f64;
    for x in &xs {
        assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        let dist = distance_to_support(&spec, x).unwrap();
        assert!(dist <= 0.05 + 1e-9, "{dist}");
        far = far.max(dist);
    }
    assert!(far > 0.03);
}

#[test]
fn circle_parameter_is_uniform() {
    let spec = SupportSpec::circle(10, 5, 0.0);
    let n = 100_000;
    let mut theta: Vec<f64> = sample_x(&spec, n, 4)
        .unwrap()
        .iter()
        .map(|x| ((x[1] - 0.5).atan2(x[0] - 0.5)).rem_euclid(TAU) / TAU)
        .collect();
    theta.sort_by(f64::total_cmp);
    let ks = theta
        .iter()
        .enumerate()
        .map(|(i, &t)| ((i + 1) as f64 / n as f64 - t).abs().max((t - i as f64 / n as f64).abs()))
        .fold(0.0, f64::max);
    assert!(ks < 0.02, "{ks}");
}

#[test]
fn support_validation() {
    assert!(sample_x(&SupportSpec::circle(10, 0, 1.0), 5, 0).is_err());
    assert!(sample_x(&SupportSpec::circle(1, 0, 0.0), 5, 0).is_err());
    assert!(sample_x(&SupportSpec::ManifoldNeighborhood { d: 3, intrinsic_dim: 2, embedding_seed: 0, rho: 0.0 }, 5, 0).is_err());
    assert!(sample_x(&SupportSpec::cube(2), 0, 0).is_err());
    let flat = SupportSpec::MinkowskiSet { d: 2, set: MinkowskiSet::Flat { k: 3 } };
    assert!(sample_x(&flat, 5, 0).is_err());
}

#[test]
fn minkowski_sets() {
    let seg = SupportSpec::MinkowskiSet { d: 5, set: MinkowskiSet::Segment { seed: 2 } };
    for x in sample_x(&seg, 100, 0).unwrap() {
        assert!(x.iter().all(|v| (0.1 - 1e-12..=0.9 + 1e-12).contains(v)));
        assert!(distance_to_support(&seg, &x).unwrap() < 1e-12);
    }
    let cantor = SupportSpec::MinkowskiSet { d: 3, set: MinkowskiSet::Cantor { factors: 2 } };
    assert!((cantor.intrinsic_dim() - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-15);
    for x in sample_x(&cantor, 100, 0).unwrap() {
        // No sample falls in the first removed middle third.
        assert!(x[0] <= 1.0 / 3.0 + 1e-12 || x[0] >= 2.0 / 3.0 - 1e-12);
        assert_eq!(x[2], 0.5);
    }
}

#[test]
fn sampling_is_seed_deterministic() {
    let specs = [
        SupportSpec::cube(3),
        SupportSpec::circle(6, 1, 0.1),
        SupportSpec::MinkowskiSet { d: 4, set: MinkowskiSet::Cantor { factors: 1 } },
    ];
    for s in &specs {
        let a = sample_x(s, 50, 77).unwrap();
        let b = sample_x(s, 50, 77).unwrap();
        assert!(a.iter().flatten().zip(b.iter().flatten()).all(|(p, q)| p.to_bits() == q.to_bits()));
        assert_ne!(a, sample_x(s, 50, 78).unwrap());
    }
}

#[test]
fn noiseless_dataset_is_exact() {
    let t = builtin_target(BuiltinTarget::Poly, 2, 2.0, 1.0).unwrap();
    let ds = generate_dataset(&t, &SupportSpec::cube(2), &NoiseSpec::None, 100, 1).unwrap();
    for (x, y) in ds.x.iter().zip(&ds.y) {
        assert_eq!(*y, t.eval(x));
    }
}

#[test]
fn gaussian_noise_is_centered() {
    let t = builtin_target(BuiltinTarget::Constant, 1, 1.0, 1.0).unwrap();
    let n = 100_000;
    let ds = generate_dataset(&t, &SupportSpec::cube(1), &NoiseSpec::Gaussian { scale: 0.1 }, n, 5).unwrap();
    let mean = ds.x.iter().zip(&ds.y).map(|(x, y)| y - t.eval(x)).sum::<f64>() / n as f64;
    assert!(mean.abs() <= 4.0 * 0.1 / (n as f64).sqrt());
}

#[test]
fn laplace_variance() {
    let t = builtin_target(BuiltinTarget::Constant, 1, 1.0, 1.0).unwrap();
    let n = 100_000;
    let s = 0.3;
    let ds = generate_dataset(&t, &SupportSpec::cube(1), &NoiseSpec::Laplace { scale: s }, n, 6).unwrap();
    let eta: Vec<f64> = ds.x.iter().zip(&ds.y).map(|(x, y)| y - t.eval(x)).collect();
    let mean = eta.iter().sum::<f64>() / n as f64;
    let var = eta.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((var / (2.0 * s * s) - 1.0).abs() < 0.1, "{var}");
}

#[test]
fn covariates_do_not_depend_on_noise() {
    let t = builtin_target(BuiltinTarget::Poly, 2, 2.0, 1.0).unwrap();
    let a = generate_dataset(&t, &SupportSpec::cube(2), &NoiseSpec::None, 20, 3).unwrap();
    let b = generate_dataset(&t, &SupportSpec::cube(2), &NoiseSpec::Gaussian { scale: 1.0 }, 20, 3).unwrap();
    assert_eq!(a.x, b.x);
}

#[test]
fn dataset_dimension_mismatch() {
    let t = builtin_target(BuiltinTarget::Poly, 2, 2.0, 1.0).unwrap();
    assert!(generate_dataset(&t, &SupportSpec::cube(3), &NoiseSpec::None, 5, 0).is_err());
    assert!(generate_dataset(&t, &SupportSpec::cube(2), &NoiseSpec::Gaussian { scale: -1.0 }, 5, 0).is_err());
}

#[test]
fn csv_round_trip() {
    let dir = std::env::temp_dir().join(format!("rc-targets-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("data.csv");
    let t = builtin_target(BuiltinTarget::CosineProduct, 3, 2.0, 1.0).unwrap();
    let support = SupportSpec::cube(3);
    let noise = NoiseSpec::Laplace { scale: 0.2 };
    let ds = generate_dataset(&t, &support, &noise, 64, 8).unwrap();
    let meta = DatasetMeta { target: t.name().into(), beta: 2.0, b0: 1.0, support, noise, n: 64, seed: 8 };
    ds.write_csv(&path, &meta).unwrap();
    let back = Dataset::read_csv(&path).unwrap();
    assert_eq!(back, ds);
    let text = std::fs::read_to_string(sidecar_path(&path)).unwrap();
    let meta_back: DatasetMeta = serde_json::from_str(&text).unwrap();
    assert_eq!(meta_back, meta);
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("x1,x2,x3,y\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}
