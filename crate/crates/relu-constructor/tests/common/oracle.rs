//! Test-only reference implementations, coded independently of the library paths
//! they check.

use relu_constructor::net::Network;

/// Straight-line forward pass: column-major accumulation over the dense weights,
/// no sparsity shortcut, no shared scratch.
pub fn forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let mut act: Vec<f64> = x.to_vec();
    let n = net.layers().len();
    for (i, layer) in net.layers().iter().enumerate() {
        let mut next = layer.bias().to_vec();
        for c in 0..layer.cols() {
            let xc = act[c];
            for (r, slot) in next.iter_mut().enumerate() {
                *slot += layer.weights()[r * layer.cols() + c] * xc;
            }
        }
        if i + 1 < n {
            for v in next.iter_mut() {
                *v = v.max(0.0);
            }
        }
        act = next;
    }
    if let Some(b) = net.clip_bound() {
        act.iter_mut().for_each(|v| *v = v.max(-b).min(b));
    }
    act
}
