//! Trainable rectangle MLP with hand-written reverse-mode gradients.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::net::{Layer, Network};

/// `depth` hidden ReLU layers of `width` units, one linear output, clamp at `clip`.
///
/// Parameters are stored flat, layer by layer, weights row-major then biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    input_dim: usize,
    width: usize,
    depth: usize,
    clip: f64,
    params: Vec<f64>,
}

struct Shape {
    rows: usize,
    cols: usize,
    offset: usize,
}

impl Mlp {
    pub fn zeros(input_dim: usize, width: usize, depth: usize, clip: f64) -> Result<Self> {
        if input_dim == 0 || width == 0 || depth == 0 {
            return Err(Error::invalid("MLP dimensions must be positive"));
        }
        if !(clip > 0.0) {
            return Err(Error::invalid(format!("clip bound must be positive, got {clip}")));
        }
        let n = width * (input_dim + 1) + (depth - 1) * (width * width + width) + width + 1;
        Ok(Mlp { input_dim, width, depth, clip, params: vec![0.0; n] })
    }

    /// He-scaled Gaussian weights. First-layer biases put each unit's kink at a
    /// uniform point of the box `[lo, hi]`; other biases start at 0.
    pub fn he_init<R: Rng + ?Sized>(
        input_dim: usize,
        width: usize,
        depth: usize,
        clip: f64,
        lo: &[f64],
        hi: &[f64],
        rng: &mut R,
    ) -> Result<Self> {
        let mut net = Mlp::zeros(input_dim, width, depth, clip)?;
        if lo.len() != input_dim || hi.len() != input_dim {
            return Err(Error::DimensionMismatch { expected: input_dim, got: lo.len().min(hi.len()) });
        }
        let shapes = net.shapes();
        for (l, sh) in shapes.iter().enumerate() {
            let hidden = l < depth;
            let std = if hidden { (2.0 / sh.cols as f64).sqrt() } else { (1.0 / sh.cols as f64).sqrt() };
            let normal = Normal::new(0.0, std).expect("positive std");
            let (w, b) = net.params[sh.offset..sh.offset + sh.rows * (sh.cols + 1)].split_at_mut(sh.rows * sh.cols);
            for v in w.iter_mut() {
                *v = normal.sample(rng);
            }
            if l == 0 {
                for (r, bias) in b.iter_mut().enumerate() {
                    let row = &w[r * sh.cols..(r + 1) * sh.cols];
                    *bias = -row
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(&wi, (&a, &c))| wi * if c > a { rng.random_range(a..c) } else { a })
                        .sum::<f64>();
                }
            }
        }
        Ok(net)
    }

    fn shapes(&self) -> Vec<Shape> {
        let mut out = Vec::with_capacity(self.depth + 1);
        let mut offset = 0;
        let mut cols = self.input_dim;
        for l in 0..=self.depth {
            let rows = if l == self.depth { 1 } else { self.width };
            out.push(Shape { rows, cols, offset });
            offset += rows * (cols + 1);
            cols = rows;
        }
        out
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn clip(&self) -> f64 {
        self.clip
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Clamped output at one point.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut scratch = Scratch::new(self);
        self.forward(x, &mut scratch).clamp(-self.clip, self.clip)
    }

    /// Unclamped forward pass; keeps every layer's activations in `scratch`.
    fn forward(&self, x: &[f64], s: &mut Scratch) -> f64 {
        debug_assert_eq!(x.len(), self.input_dim);
        let shapes = self.shapes();
        s.acts[0].copy_from_slice(x);
        for (l, sh) in shapes.iter().enumerate() {
            let (w, b) = self.params[sh.offset..sh.offset + sh.rows * (sh.cols + 1)].split_at(sh.rows * sh.cols);
            let (head, tail) = s.acts.split_at_mut(l + 1);
            let input = &head[l];
            let out = &mut tail[0];
            for r in 0..sh.rows {
                let row = &w[r * sh.cols..(r + 1) * sh.cols];
                let z = b[r] + row.iter().zip(input.iter()).map(|(a, c)| a * c).sum::<f64>();
                out[r] = if l < self.depth { z.max(0.0) } else { z };
            }
        }
        s.acts[self.depth + 1][0]
    }

    /// Training objective on `(xs, ys)` and its gradient: the mean squared error of
    /// the unclamped output. The clamp has zero slope where it is active, so training
    /// through it can stall; the clamped risk is used for snapshot selection instead.
    pub fn loss_and_gradient(&self, xs: &[&[f64]], ys: &[f64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let mut s = Scratch::new(self);
        let loss = self.accumulate(xs, ys, &mut grad, &mut s);
        (loss, grad)
    }

    pub(crate) fn accumulate(&self, xs: &[&[f64]], ys: &[f64], grad: &mut [f64], s: &mut Scratch) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let shapes = self.shapes();
        let n = xs.len() as f64;
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let err = self.forward(x, s) - y;
            loss += err * err;
            s.delta[self.depth][0] = 2.0 * err / n;
            for l in (0..=self.depth).rev() {
                let sh = &shapes[l];
                let (w, gb) = {
                    let w_range = sh.offset..sh.offset + sh.rows * sh.cols;
                    (w_range, sh.offset + sh.rows * sh.cols)
                };
                let input = &s.acts[l];
                let delta = &s.delta[l];
                for r in 0..sh.rows {
                    let dr = delta[r];
                    if dr == 0.0 {
                        continue;
                    }
                    let g = &mut grad[w.start + r * sh.cols..w.start + (r + 1) * sh.cols];
                    for (gi, &a) in g.iter_mut().zip(input.iter()) {
                        *gi += dr * a;
                    }
                    grad[gb + r] += dr;
                }
                if l > 0 {
                    let (lower, upper) = s.delta.split_at_mut(l);
                    let below = &mut lower[l - 1];
                    let delta = &upper[0];
                    below.iter_mut().for_each(|v| *v = 0.0);
                    let wts = &self.params[w];
                    for r in 0..sh.rows {
                        let dr = delta[r];
                        if dr == 0.0 {
                            continue;
                        }
                        for (b, &wi) in below.iter_mut().zip(&wts[r * sh.cols..(r + 1) * sh.cols]) {
                            *b += dr * wi;
                        }
                    }
                    for (b, &a) in below.iter_mut().zip(s.acts[l].iter()) {
                        if a <= 0.0 {
                            *b = 0.0;
                        }
                    }
                }
            }
        }
        loss / n
    }

    /// Mean squared error of the clamped output.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let mut s = Scratch::new(self);
        let sum: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| {
                let e = self.forward(x, &mut s).clamp(-self.clip, self.clip) - y;
                e * e
            })
            .sum();
        sum / xs.len() as f64
    }

    /// The same function as a [`Network`] carrying the clip bound.
    pub fn to_network(&self) -> Network {
        let layers = self
            .shapes()
            .iter()
            .map(|sh| {
                let (w, b) = self.params[sh.offset..sh.offset + sh.rows * (sh.cols + 1)].split_at(sh.rows * sh.cols);
                Layer::new(sh.rows, sh.cols, w.to_vec(), b.to_vec()).expect("shapes agree")
            })
            .collect();
        Network::new(self.input_dim, layers, Some(self.clip)).expect("rectangle MLP is well formed")
    }
}

pub(crate) struct Scratch {
    acts: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
}

impl Scratch {
    pub(crate) fn new(net: &Mlp) -> Self {
        let mut acts = vec![vec![0.0; net.input_dim]];
        acts.extend((0..net.depth).map(|_| vec![0.0; net.width]));
        acts.push(vec![0.0]);
        let mut delta: Vec<Vec<f64>> = (0..net.depth).map(|_| vec![0.0; net.width]).collect();
        delta.push(vec![0.0]);
        Scratch { acts, delta }
    }
}
