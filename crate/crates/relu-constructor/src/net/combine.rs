//! Composition, parallel stacking and output clipping.

use super::{Layer, Network};
use crate::error::{Error, Result};

/// `out = outer ∘ inner` as one affine map: `W = W_o W_i`, `b = W_o b_i + b_o`.
fn merge_affine(outer: &Layer, inner: &Layer) -> Layer {
    let (q, m, p) = (outer.rows(), outer.cols(), inner.cols());
    debug_assert_eq!(m, inner.rows());
    let mut merged = Layer::zeros(q, p);
    let (w, b) = merged.parts_mut();
    for r in 0..q {
        let dst = &mut w[r * p..(r + 1) * p];
        let mut bias = outer.bias()[r];
        for (j, &wo) in outer.row(r).iter().enumerate() {
            if wo == 0.0 {
                continue;
            }
            for (d, &wi) in dst.iter_mut().zip(inner.row(j)) {
                *d += wo * wi;
            }
            bias += wo * inner.bias()[j];
        }
        b[r] = bias;
    }
    merged
}

/// Whether the last two layers are exactly the pattern produced by [`clip`] with bound `b`,
/// so the evaluation-time clamp is already enforced by the weights.
fn clip_is_structural(net: &Network, b: f64) -> bool {
    let layers = net.layers();
    if layers.len() < 2 {
        return false;
    }
    let last = &layers[layers.len() - 1];
    let prev = &layers[layers.len() - 2];
    let pattern = last.rows() == 1
        && last.cols() == 2
        && last.weights() == [1.0, -1.0]
        && last.bias() == [-b]
        && prev.rows() == 2;
    if !pattern || prev.row(0) != prev.row(1) {
        return false;
    }
    let gap = prev.bias()[0] - prev.bias()[1];
    (gap - 2.0 * b).abs() <= 1e-12 * (1.0 + prev.bias()[0].abs() + prev.bias()[1].abs())
}

/// Turns an evaluation-time clip bound into ReLU layers (`σ(t+B) − σ(t−B) − B` per output).
fn materialize_clip(net: &Network) -> Network {
    let Some(b) = net.clip_bound() else {
        return net.clone();
    };
    if clip_is_structural(net, b) {
        return net.with_clip_bound(None).expect("same layers");
    }
    let (d, mut layers, _) = net.clone().into_layers();
    let last = layers.pop().expect("nonempty");
    let (m, p) = (last.rows(), last.cols());
    let mut hidden = Layer::zeros(2 * m, p);
    let mut out = Layer::zeros(m, 2 * m);
    {
        let (w, bias) = hidden.parts_mut();
        for i in 0..m {
            w[2 * i * p..(2 * i + 1) * p].copy_from_slice(last.row(i));
            w[(2 * i + 1) * p..(2 * i + 2) * p].copy_from_slice(last.row(i));
            bias[2 * i] = last.bias()[i] + b;
            bias[2 * i + 1] = last.bias()[i] - b;
        }
    }
    {
        let (w, bias) = out.parts_mut();
        for i in 0..m {
            w[i * 2 * m + 2 * i] = 1.0;
            w[i * 2 * m + 2 * i + 1] = -1.0;
            bias[i] = -b;
        }
    }
    layers.push(hidden);
    layers.push(out);
    Network::new(d, layers, None).expect("materialized clip is well formed")
}

/// Evaluates `outer(inner(x))`.
///
/// The last affine map of `inner` and the first of `outer` are merged into one
/// layer, so the hidden-layer count of the result is `D_outer + D_inner`. An
/// evaluation-time clip bound on `inner` is first realized as ReLU units.
pub fn compose(outer: &Network, inner: &Network) -> Result<Network> {
    if outer.input_dim() != inner.output_dim() {
        return Err(Error::DimensionMismatch { expected: outer.input_dim(), got: inner.output_dim() });
    }
    let inner = materialize_clip(inner);
    let (d, mut layers, _) = inner.into_layers();
    let inner_last = layers.pop().expect("nonempty");
    let mut outer_layers = outer.layers().iter();
    let first = outer_layers.next().expect("nonempty");
    layers.push(merge_affine(first, &inner_last));
    layers.extend(outer_layers.cloned());
    Network::new(d, layers, outer.clip_bound())
}

/// Extends `net` to exactly `depth` hidden layers by routing its outputs through
/// identity channels `y = σ(y) − σ(−y)`.
fn pad_to_depth(net: &Network, depth: usize) -> Network {
    let have = net.depth();
    if have == depth {
        return net.clone();
    }
    assert!(have < depth);
    let (d, mut layers, clip) = net.clone().into_layers();
    let last = layers.pop().expect("nonempty");
    let (m, p) = (last.rows(), last.cols());
    let mut split = Layer::zeros(2 * m, p);
    {
        let (w, b) = split.parts_mut();
        for i in 0..m {
            for (j, &v) in last.row(i).iter().enumerate() {
                w[i * p + j] = v;
                w[(m + i) * p + j] = -v;
            }
            b[i] = last.bias()[i];
            b[m + i] = -last.bias()[i];
        }
    }
    layers.push(split);
    for _ in 0..depth - have - 1 {
        layers.push(Layer::identity(2 * m));
    }
    let mut join = Layer::zeros(m, 2 * m);
    {
        let (w, _) = join.parts_mut();
        for i in 0..m {
            w[i * 2 * m + i] = 1.0;
            w[i * 2 * m + m + i] = -1.0;
        }
    }
    layers.push(join);
    Network::new(d, layers, clip).expect("padding keeps the chain")
}

/// Runs several networks on the same input and concatenates their outputs.
///
/// Shallower networks are padded with identity channels so that all branches have
/// the depth of the deepest one; each layer of the result is block diagonal
/// (the first layer stacks the branches' input maps).
pub fn parallelize(nets: &[Network]) -> Result<Network> {
    let first = nets.first().ok_or_else(|| Error::invalid("parallelize needs at least one network"))?;
    let d = first.input_dim();
    if let Some(bad) = nets.iter().find(|n| n.input_dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.input_dim() });
    }
    if nets.len() == 1 {
        return Ok(materialize_clip(first));
    }
    let depth = nets.iter().map(Network::depth).max().expect("nonempty");
    let padded: Vec<Network> = nets.iter().map(|n| pad_to_depth(&materialize_clip(n), depth)).collect();

    let mut layers = Vec::with_capacity(depth + 1);
    for li in 0..=depth {
        let blocks: Vec<&Layer> = padded.iter().map(|n| &n.layers()[li]).collect();
        let rows: usize = blocks.iter().map(|l| l.rows()).sum();
        let cols: usize = if li == 0 { d } else { blocks.iter().map(|l| l.cols()).sum() };
        let mut layer = Layer::zeros(rows, cols);
        let (w, b) = layer.parts_mut();
        let (mut r0, mut c0) = (0, 0);
        for blk in blocks {
            for r in 0..blk.rows() {
                let dst = (r0 + r) * cols + c0;
                w[dst..dst + blk.cols()].copy_from_slice(blk.row(r));
                b[r0 + r] = blk.bias()[r];
            }
            r0 += blk.rows();
            if li > 0 {
                c0 += blk.cols();
            }
        }
        layers.push(layer);
    }
    Network::new(d, layers, None)
}

/// Caps a scalar network at `[-b, b]` with one extra hidden layer of two units:
/// `σ(f + b) − σ(f − b) − b`. The evaluation-time bound is also recorded.
pub fn clip(net: &Network, b: f64) -> Result<Network> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::invalid(format!("clip bound must be positive and finite, got {b}")));
    }
    if net.output_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: net.output_dim() });
    }
    let base = materialize_clip(net);
    let (d, mut layers, _) = base.into_layers();
    let last = layers.pop().expect("nonempty");
    let p = last.cols();
    let mut hidden = Layer::zeros(2, p);
    {
        let (w, bias) = hidden.parts_mut();
        w[..p].copy_from_slice(last.row(0));
        w[p..].copy_from_slice(last.row(0));
        bias[0] = last.bias()[0] + b;
        bias[1] = last.bias()[0] - b;
    }
    layers.push(hidden);
    layers.push(Layer::new(1, 2, vec![1.0, -1.0], vec![-b])?);
    Network::new(d, layers, Some(b))
}
