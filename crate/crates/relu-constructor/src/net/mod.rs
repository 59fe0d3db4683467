//! Explicit feedforward ReLU networks.
//!
//! A [`Network`] is the map `L_D ∘ σ ∘ L_{D-1} ∘ ⋯ ∘ σ ∘ L_0` where every `L_i` is
//! an affine layer stored as a dense row-major matrix plus a bias vector and `σ`
//! is the entrywise ReLU. An optional clip bound caps the output at evaluation.
//!
//! Storage is dense (constructions keep their zeros) so that size accounting is
//! literal, but evaluation walks a compressed copy of the nonzero pattern built
//! once at construction time.
//!
//! ```
//! use relu_constructor::net::{Layer, Network};
//!
//! // x ↦ relu(x - 0.5)
//! let hidden = Layer::new(1, 1, vec![1.0], vec![-0.5]).unwrap();
//! let readout = Layer::new(1, 1, vec![1.0], vec![0.0]).unwrap();
//! let net = Network::new(1, vec![hidden, readout], None).unwrap();
//! assert_eq!(net.evaluate(&[0.2]).unwrap(), vec![0.0]);
//! assert_eq!(net.evaluate(&[0.75]).unwrap(), vec![0.25]);
//! ```

pub(crate) mod builder;
mod combine;
mod io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use combine::{clip, compose, parallelize};
pub use io::{deserialize, serialize, FORMAT_VERSION};

#[inline]
pub(crate) fn relu(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        0.0
    }
}

/// One affine map `z ↦ W z + b` with `W` of shape `rows × cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("layer shape {rows}x{cols} has an empty side")));
        }
        if weights.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: weights.len() });
        }
        if bias.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, got: bias.len() });
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("layer coefficients must be finite"));
        }
        Ok(Layer { rows, cols, weights, bias })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Layer { rows, cols, weights: vec![0.0; rows * cols], bias: vec![0.0; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut l = Layer::zeros(n, n);
        for i in 0..n {
            l.weights[i * n + i] = 1.0;
        }
        l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major weights, `rows * cols` entries.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.cols + col]
    }

    pub(crate) fn row(&self, row: usize) -> &[f64] {
        &self.weights[row * self.cols..(row + 1) * self.cols]
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.weights, &mut self.bias)
    }

    fn param_count(&self) -> usize {
        self.rows * (self.cols + 1)
    }
}

/// Nonzero pattern of one layer in compressed-row form.
#[derive(Clone, Debug, Default)]
struct Kernel {
    row_start: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl Kernel {
    fn from_layer(layer: &Layer) -> Self {
        let mut k = Kernel { row_start: Vec::with_capacity(layer.rows + 1), ..Default::default() };
        k.row_start.push(0);
        for r in 0..layer.rows {
            for (c, &w) in layer.row(r).iter().enumerate() {
                if w != 0.0 {
                    k.col.push(c as u32);
                    k.val.push(w);
                }
            }
            k.row_start.push(k.col.len());
        }
        k
    }

    #[inline]
    fn apply(&self, bias: &[f64], input: &[f64], out: &mut Vec<f64>, activate: bool) {
        out.clear();
        for (r, &b) in bias.iter().enumerate() {
            let mut acc = b;
            for k in self.row_start[r]..self.row_start[r + 1] {
                acc += self.val[k] * input[self.col[k] as usize];
            }
            out.push(if activate { relu(acc) } else { acc });
        }
    }
}

/// Width, depth, size and neuron count of a network.
///
/// `depth` counts hidden layers, `width` is the widest hidden layer (0 when there is
/// none), `size` counts every stored weight and bias, and `neurons` sums the hidden widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub width: usize,
    pub depth: usize,
    pub size: usize,
    pub neurons: usize,
}

impl NetworkStats {
    /// Componentwise `width <= other.width && depth <= other.depth`.
    pub fn fits_within(&self, budget: &NetworkStats) -> bool {
        self.width <= budget.width && self.depth <= budget.depth
    }

    /// Parameter count of a fully connected rectangle with `input_dim` inputs,
    /// `depth >= 1` hidden layers of `width` units and one output.
    pub fn rectangle_size(input_dim: usize, width: usize, depth: usize) -> usize {
        assert!(depth >= 1, "a rectangle needs at least one hidden layer");
        width * (input_dim + 1) + (width * width + width) * (depth - 1) + width + 1
    }
}

/// An explicit ReLU network. Immutable once built.
#[derive(Clone, Debug)]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
    clip_bound: Option<f64>,
    kernels: Vec<Kernel>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.input_dim == other.input_dim
            && self.clip_bound == other.clip_bound
            && self.layers == other.layers
    }
}

impl Network {
    /// Builds a network from its affine layers. ReLU acts between consecutive layers.
    pub fn new(input_dim: usize, layers: Vec<Layer>, clip_bound: Option<f64>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be positive"));
        }
        let first = layers.first().ok_or_else(|| Error::invalid("a network needs at least one layer"))?;
        if first.cols != input_dim {
            return Err(Error::DimensionMismatch { expected: input_dim, got: first.cols });
        }
        for pair in layers.windows(2) {
            if pair[1].cols != pair[0].rows {
                return Err(Error::DimensionMismatch { expected: pair[0].rows, got: pair[1].cols });
            }
        }
        if let Some(b) = clip_bound {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::invalid(format!("clip bound must be finite and nonnegative, got {b}")));
            }
        }
        let kernels = layers.iter().map(Kernel::from_layer).collect();
        Ok(Network { input_dim, layers, clip_bound, kernels })
    }

    /// The identity map on `R^d` as a single linear layer.
    pub fn identity(d: usize) -> Self {
        Network::new(d, vec![Layer::identity(d)], None).expect("identity is well formed")
    }

    /// A single affine layer (no hidden layers).
    pub fn affine(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        Network::new(cols, vec![Layer::new(rows, cols, weights, bias)?], None)
    }

    /// The constant map `x ↦ values` on `R^input_dim`.
    pub fn constant(input_dim: usize, values: &[f64]) -> Result<Self> {
        Network::affine(values.len(), input_dim, vec![0.0; values.len() * input_dim], values.to_vec())
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.rows).unwrap_or(0)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn clip_bound(&self) -> Option<f64> {
        self.clip_bound
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Returns a copy whose outputs are clamped to `[-b, b]` at evaluation time.
    pub fn with_clip_bound(&self, b: Option<f64>) -> Result<Self> {
        Network::new(self.input_dim, self.layers.clone(), b)
    }

    pub(crate) fn into_layers(self) -> (usize, Vec<Layer>, Option<f64>) {
        (self.input_dim, self.layers, self.clip_bound)
    }

    pub fn stats(&self) -> NetworkStats {
        let hidden = &self.layers[..self.layers.len() - 1];
        NetworkStats {
            width: hidden.iter().map(|l| l.rows).max().unwrap_or(0),
            depth: hidden.len(),
            size: self.layers.iter().map(Layer::param_count).sum(),
            neurons: hidden.iter().map(|l| l.rows).sum(),
        }
    }

    /// Evaluates the network at one point.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: x.len() });
        }
        let mut bufs = (Vec::new(), Vec::new());
        Ok(self.forward(x, &mut bufs).to_vec())
    }

    /// Evaluates a scalar-output network at one point.
    pub fn evaluate_scalar(&self, x: &[f64]) -> Result<f64> {
        if self.output_dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.output_dim() });
        }
        Ok(self.evaluate(x)?[0])
    }

    /// Evaluates at many points stored row-major in `points` (stride `input_dim`),
    /// returning outputs row-major (stride `output_dim`). Runs on the rayon pool.
    pub fn evaluate_rows(&self, points: &[f64]) -> Result<Vec<f64>> {
        if points.len() % self.input_dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim * (points.len() / self.input_dim + 1),
                got: points.len(),
            });
        }
        let out: Vec<Vec<f64>> = points
            .par_chunks(self.input_dim)
            .with_min_len(64)
            .map_init(|| (Vec::new(), Vec::new()), |bufs, x| self.forward(x, bufs).to_vec())
            .collect();
        Ok(out.concat())
    }

    pub(crate) fn forward<'a>(&self, x: &[f64], bufs: &'a mut (Vec<f64>, Vec<f64>)) -> &'a [f64] {
        let (a, b) = bufs;
        a.clear();
        a.extend_from_slice(x);
        let last = self.layers.len() - 1;
        for (i, (layer, kernel)) in self.layers.iter().zip(&self.kernels).enumerate() {
            kernel.apply(&layer.bias, a, b, i < last);
            std::mem::swap(a, b);
        }
        if let Some(bound) = self.clip_bound {
            for v in a.iter_mut() {
                *v = v.clamp(-bound, bound);
            }
        }
        a
    }
}
