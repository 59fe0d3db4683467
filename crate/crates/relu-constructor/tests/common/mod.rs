#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relu_constructor::net::{Layer, Network};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dense network with the given layer widths (first entry = input dim).
pub fn random_net(rng: &mut ChaCha8Rng, widths: &[usize]) -> Network {
    let layers = widths
        .windows(2)
        .map(|w| {
            let (cols, rows) = (w[0], w[1]);
            let weights = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
            let bias = (0..rows).map(|_| rng.random_range(-0.5..0.5)).collect();
            Layer::new(rows, cols, weights, bias).unwrap()
        })
        .collect();
    Network::new(widths[0], layers, None).unwrap()
}

pub fn random_widths(rng: &mut ChaCha8Rng, input: usize, output: usize) -> Vec<usize> {
    let hidden = rng.random_range(0..4);
    let mut w = vec![input];
    for _ in 0..hidden {
        w.push(rng.random_range(1..7));
    }
    w.push(output);
    w
}

pub fn random_point(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn random_shaped_net(rng: &mut ChaCha8Rng, input: usize, output: usize) -> Network {
    let widths = random_widths(rng, input, output);
    random_net(rng, &widths)
}
