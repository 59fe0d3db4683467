mod common;

use common::{oracle, random_net, random_point, random_shaped_net, random_widths, rng};
use proptest::prelude::*;
use rand::Rng;
use relu_constructor::net::{self, clip, compose, parallelize, Layer, Network, NetworkStats};
use relu_constructor::Error;

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

#[test]
fn identity_net_returns_its_input() {
    let id = Network::identity(2);
    assert_eq!(id.evaluate(&[0.3, 0.7]).unwrap(), vec![0.3, 0.7]);
}

#[test]
fn relu_zeroes_negative_preactivation() {
    let hidden = Layer::new(1, 1, vec![1.0], vec![-0.5]).unwrap();
    let out = Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap();
    let net = Network::new(1, vec![hidden, out], None).unwrap();
    assert_eq!(net.evaluate(&[0.2]).unwrap(), vec![0.0]);
}

#[test]
fn wrong_input_length_is_rejected() {
    let net = Network::identity(3);
    assert!(matches!(net.evaluate(&[1.0]), Err(Error::DimensionMismatch { expected: 3, got: 1 })));
}

#[test]
fn three_layer_net_matches_oracle_on_100_inputs() {
    let mut r = rng(1);
    let net = random_net(&mut r, &[4, 7, 5, 6, 2]);
    for _ in 0..100 {
        let x = random_point(&mut r, 4, -2.0, 2.0);
        assert!(close(&net.evaluate(&x).unwrap(), &oracle::forward(&net, &x), 1e-12));
    }
}

#[test]
fn evaluation_matches_oracle_on_1000_random_nets() {
    let mut r = rng(2);
    for _ in 0..1000 {
        let d = r.random_range(1..5);
        let out = r.random_range(1..4);
        let widths = random_widths(&mut r, d, out);
        let net = random_net(&mut r, &widths);
        let x = random_point(&mut r, d, -3.0, 3.0);
        assert!(close(&net.evaluate(&x).unwrap(), &oracle::forward(&net, &x), 1e-12));
    }
}

#[test]
fn batch_evaluation_agrees_with_pointwise() {
    let mut r = rng(3);
    let net = random_net(&mut r, &[3, 8, 8, 2]);
    let pts: Vec<f64> = (0..3 * 500).map(|_| r.random_range(-1.0..1.0)).collect();
    let batch = net.evaluate_rows(&pts).unwrap();
    for (i, x) in pts.chunks(3).enumerate() {
        assert_eq!(&batch[2 * i..2 * i + 2], net.evaluate(x).unwrap().as_slice());
    }
}

#[test]
fn compose_with_identity_is_transparent() {
    let mut r = rng(4);
    let f = random_net(&mut r, &[3, 5, 4, 2]);
    let g = compose(&Network::identity(2), &f).unwrap();
    assert_eq!(g.depth(), f.depth());
    for _ in 0..100 {
        let x = random_point(&mut r, 3, -2.0, 2.0);
        assert!(close(&g.evaluate(&x).unwrap(), &f.evaluate(&x).unwrap(), 1e-12));
    }
}

#[test]
fn composing_two_single_hidden_layer_nets_gives_depth_two() {
    let mut r = rng(5);
    let f = random_net(&mut r, &[2, 4, 3]);
    let g = random_net(&mut r, &[3, 6, 1]);
    assert_eq!(compose(&g, &f).unwrap().depth(), 2);
}

#[test]
fn compose_matches_sequential_oracle() {
    let mut r = rng(6);
    for _ in 0..200 {
        let d = r.random_range(1..4);
        let mid = r.random_range(1..4);
        let f = random_shaped_net(&mut r, d, mid);
        let g = random_shaped_net(&mut r, mid, 2);
        let gf = compose(&g, &f).unwrap();
        assert_eq!(gf.depth(), g.depth() + f.depth());
        let x = random_point(&mut r, d, -2.0, 2.0);
        let expect = oracle::forward(&g, &oracle::forward(&f, &x));
        assert!(close(&gf.evaluate(&x).unwrap(), &expect, 1e-12));
    }
}

#[test]
fn composition_is_associative_at_evaluation_level() {
    let mut r = rng(7);
    for _ in 0..100 {
        let f = random_shaped_net(&mut r, 3, 2);
        let g = random_shaped_net(&mut r, 2, 4);
        let h = random_shaped_net(&mut r, 4, 1);
        let left = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        let right = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let x = random_point(&mut r, 3, -2.0, 2.0);
        assert!(close(&left.evaluate(&x).unwrap(), &right.evaluate(&x).unwrap(), 1e-10));
    }
}

#[test]
fn compose_rejects_dimension_mismatch() {
    let f = Network::identity(3);
    let g = Network::identity(2);
    assert!(compose(&g, &f).is_err());
}

#[test]
fn compose_realizes_inner_evaluation_clip() {
    // inner: x ↦ 3x with an evaluation-time cap at 1; outer: identity
    let inner = Network::affine(1, 1, vec![3.0], vec![0.0]).unwrap().with_clip_bound(Some(1.0)).unwrap();
    let composed = compose(&Network::identity(1), &inner).unwrap();
    assert_eq!(composed.clip_bound(), None);
    for x in [-2.0, -0.2, 0.1, 0.3, 5.0] {
        let expect = (3.0f64 * x).clamp(-1.0, 1.0);
        assert!((composed.evaluate(&[x]).unwrap()[0] - expect).abs() < 1e-15);
    }
}

#[test]
fn parallelize_single_net_is_identity_operation() {
    let mut r = rng(8);
    let f = random_net(&mut r, &[2, 5, 3, 2]);
    let p = parallelize(std::slice::from_ref(&f)).unwrap();
    for _ in 0..100 {
        let x = random_point(&mut r, 2, -2.0, 2.0);
        assert_eq!(p.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
    }
}

#[test]
fn parallel_width_adds_up() {
    let mut r = rng(9);
    let nets: Vec<_> = (0..3).map(|_| random_net(&mut r, &[2, 3, 3, 1])).collect();
    assert!(parallelize(&nets).unwrap().stats().width >= 9);
}

#[test]
fn parallelize_matches_concatenated_oracles_with_padding() {
    let mut r = rng(10);
    for _ in 0..200 {
        let d = r.random_range(1..4);
        let count = r.random_range(1..5);
        let nets: Vec<_> = (0..count)
            .map(|_| {
                let out = r.random_range(1..3);
                random_shaped_net(&mut r, d, out)
            })
            .collect();
        let p = parallelize(&nets).unwrap();
        assert_eq!(p.depth(), nets.iter().map(Network::depth).max().unwrap());
        let x = random_point(&mut r, d, -2.0, 2.0);
        let expect: Vec<f64> = nets.iter().flat_map(|n| oracle::forward(n, &x)).collect();
        assert!(close(&p.evaluate(&x).unwrap(), &expect, 1e-12));
    }
}

#[test]
fn parallelize_rejects_empty_and_mismatched_inputs() {
    assert!(parallelize(&[]).is_err());
    assert!(parallelize(&[Network::identity(1), Network::identity(2)]).is_err());
}

#[test]
fn stats_hand_count() {
    let mut r = rng(11);
    let net = random_net(&mut r, &[2, 3, 3, 1]);
    assert_eq!(net.stats(), NetworkStats { width: 3, depth: 2, size: 25, neurons: 6 });
    let linear = Network::identity(4).stats();
    assert_eq!((linear.depth, linear.neurons), (0, 0));
}

#[test]
fn rectangle_size_formula() {
    let mut r = rng(12);
    let net = random_net(&mut r, &[2, 4, 4, 4, 4, 4, 1]);
    assert_eq!(net.stats().size, 97);
    assert_eq!(NetworkStats::rectangle_size(2, 4, 5), 97);
    let s = net.stats();
    assert!(s.width.max(s.depth) <= s.size);
}

#[test]
fn clip_saturates_constant_net() {
    let five = Network::constant(2, &[5.0]).unwrap();
    let c = clip(&five, 1.0).unwrap();
    let mut r = rng(13);
    for _ in 0..50 {
        assert_eq!(c.evaluate(&random_point(&mut r, 2, -3.0, 3.0)).unwrap(), vec![1.0]);
    }
}

#[test]
fn clip_is_transparent_inside_the_band_and_adds_one_layer() {
    let mut r = rng(14);
    let f = random_net(&mut r, &[1, 6, 6, 1]);
    let b = 0.8;
    let c = clip(&f, b).unwrap();
    assert_eq!(c.depth(), f.depth() + 1);
    for i in 0..=2000 {
        let x = -3.0 + 6.0 * i as f64 / 2000.0;
        let v = f.evaluate(&[x]).unwrap()[0];
        let w = c.evaluate(&[x]).unwrap()[0];
        if v.abs() < b {
            assert!((v - w).abs() <= 1e-12, "x={x}: {v} vs {w}");
        } else {
            assert!((w.abs() - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn clipped_nets_never_exceed_the_bound() {
    let mut r = rng(15);
    let f = random_net(&mut r, &[3, 8, 8, 1]);
    let c = clip(&f, 0.25).unwrap();
    let pts: Vec<f64> = (0..3 * 1_000_000).map(|_| r.random_range(-10.0..10.0)).collect();
    let out = c.evaluate_rows(&pts).unwrap();
    assert!(out.iter().all(|v| v.abs() <= 0.25));
}

#[test]
fn clip_rejects_nonpositive_bound() {
    assert!(clip(&Network::identity(1), 0.0).is_err());
    assert!(clip(&Network::identity(1), -1.0).is_err());
}

#[test]
fn clipped_branches_do_not_grow_when_stacked() {
    let mut r = rng(16);
    let f = clip(&random_net(&mut r, &[2, 4, 1]), 1.0).unwrap();
    let g = clip(&random_net(&mut r, &[2, 4, 1]), 1.0).unwrap();
    let p = parallelize(&[f.clone(), g]).unwrap();
    assert_eq!(p.depth(), f.depth());
}

fn bits(net: &Network) -> Vec<u64> {
    net.layers()
        .iter()
        .flat_map(|l| l.weights().iter().chain(l.bias()).map(|v| v.to_bits()))
        .chain(net.clip_bound().map(f64::to_bits))
        .collect()
}

#[test]
fn serialization_round_trips_bit_exactly() {
    let mut r = rng(17);
    for i in 0..300 {
        let d = r.random_range(1..5);
        let mut netw = random_shaped_net(&mut r, d, 2);
        // awkward values: subnormals, negative zero, long mantissas
        let dim = netw.input_dim();
        let mut layers = netw.layers().to_vec();
        let mut w = layers[0].weights().to_vec();
        w[0] = match i % 4 {
            0 => -0.0,
            1 => 5e-324,
            2 => 0.1 + 0.2,
            _ => std::f64::consts::PI * 1e300,
        };
        layers[0] = Layer::new(layers[0].rows(), layers[0].cols(), w, layers[0].bias().to_vec()).unwrap();
        let clipb = if i % 2 == 0 { Some(r.random_range(0.0..3.0)) } else { None };
        netw = Network::new(dim, layers, clipb).unwrap();
        let bytes = net::serialize(&netw);
        let back = net::deserialize(&bytes).unwrap();
        assert_eq!(bits(&netw), bits(&back));
        assert_eq!(net::serialize(&back), bytes);
    }
}

#[test]
fn serialized_scalar_count_equals_size() {
    let mut r = rng(18);
    let netw = random_net(&mut r, &[3, 5, 7, 2]);
    let v: serde_json::Value = serde_json::from_slice(&net::serialize(&netw)).unwrap();
    let count: usize = v["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["weights"].as_array().unwrap().len() + l["bias"].as_array().unwrap().len())
        .sum();
    assert_eq!(count, netw.stats().size);
}

#[test]
fn empty_layer_payload_is_rejected() {
    let payload = br#"{"version":1,"input_dim":2,"clip_bound":null,"layers":[]}"#;
    assert!(matches!(net::deserialize(payload), Err(Error::Parse(_))));
}

#[test]
fn version_mismatch_is_rejected_with_diagnostic() {
    let payload = br#"{"version":7,"input_dim":1,"clip_bound":null,"layers":[{"rows":1,"cols":1,"weights":[1.0],"bias":[0.0]}]}"#;
    let err = net::deserialize(payload).unwrap_err();
    assert!(matches!(err, Error::Version { found: 7, expected: 1 }));
    assert!(err.to_string().contains("version 7"));
}

#[test]
fn inconsistent_payloads_are_rejected() {
    let bad_chain = br#"{"version":1,"input_dim":1,"clip_bound":null,"layers":[{"rows":2,"cols":1,"weights":[1.0,1.0],"bias":[0,0]},{"rows":1,"cols":3,"weights":[1,1,1],"bias":[0]}]}"#;
    assert!(matches!(net::deserialize(bad_chain), Err(Error::Parse(_))));
    let unknown = br#"{"version":1,"input_dim":1,"clip_bound":null,"extra":1,"layers":[{"rows":1,"cols":1,"weights":[1.0],"bias":[0.0]}]}"#;
    assert!(matches!(net::deserialize(unknown), Err(Error::Parse(_))));
    assert!(matches!(net::deserialize(b"not json"), Err(Error::Parse(_))));
}

proptest! {
    #[test]
    fn roundtrip_preserves_arbitrary_finite_weights(ws in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 6)) {
        let l1 = Layer::new(3, 1, ws[..3].to_vec(), ws[3..6].to_vec()).unwrap();
        let l2 = Layer::new(1, 3, ws[..3].to_vec(), vec![ws[5]]).unwrap();
        let n = Network::new(1, vec![l1, l2], None).unwrap();
        let back = net::deserialize(&net::serialize(&n)).unwrap();
        prop_assert_eq!(bits(&n), bits(&back));
    }

    #[test]
    fn parallel_then_sum_equals_sum_of_evaluations(seed in 0u64..10_000, x in -3.0f64..3.0) {
        let mut r = rng(seed);
        let f = random_shaped_net(&mut r, 1, 1);
        let g = random_shaped_net(&mut r, 1, 1);
        let sum = compose(&Network::affine(1, 2, vec![1.0, 1.0], vec![0.0]).unwrap(), &parallelize(&[f.clone(), g.clone()]).unwrap()).unwrap();
        let expect = oracle::forward(&f, &[x])[0] + oracle::forward(&g, &[x])[0];
        prop_assert!((sum.evaluate(&[x]).unwrap()[0] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
    }
}
