//! Layer-by-layer assembly of sparse constructions.
//!
//! A [`Lin`] is an affine form over the units of the current frontier (the inputs
//! before any hidden layer was added). [`Builder::hidden`] turns a list of forms
//! into a new ReLU layer and returns forms that refer to the new units.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Layer, Network};
use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Lin {
    terms: BTreeMap<usize, f64>,
    c: f64,
}

impl Lin {
    pub fn unit(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(i, 1.0);
        Lin { terms, c: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Lin { terms: BTreeMap::new(), c }
    }

    pub fn zero() -> Self {
        Lin::default()
    }

    pub fn shift(mut self, c: f64) -> Self {
        self.c += c;
        self
    }

    fn axpy(&mut self, k: f64, other: &Lin) {
        for (&i, &w) in &other.terms {
            *self.terms.entry(i).or_insert(0.0) += k * w;
        }
        self.c += k * other.c;
    }

    /// Sum of `k_i * forms_i`.
    pub fn combine<'a>(parts: impl IntoIterator<Item = (f64, &'a Lin)>) -> Lin {
        let mut out = Lin::zero();
        for (k, l) in parts {
            out.axpy(k, l);
        }
        out
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(mut self, rhs: Lin) -> Lin {
        self.axpy(1.0, &rhs);
        self
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(mut self, rhs: Lin) -> Lin {
        self.axpy(-1.0, &rhs);
        self
    }
}

impl Mul<f64> for Lin {
    type Output = Lin;
    fn mul(mut self, k: f64) -> Lin {
        for w in self.terms.values_mut() {
            *w *= k;
        }
        self.c *= k;
        self
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self * -1.0
    }
}

pub(crate) struct Builder {
    input_dim: usize,
    width: usize,
    layers: Vec<Layer>,
}

impl Builder {
    pub fn new(input_dim: usize) -> Self {
        Builder { input_dim, width: input_dim, layers: Vec::new() }
    }

    pub fn inputs(&self) -> Vec<Lin> {
        (0..self.input_dim).map(Lin::unit).collect()
    }

    fn dense(&self, forms: &[Lin]) -> Layer {
        let mut layer = Layer::zeros(forms.len(), self.width);
        let cols = self.width;
        let (w, b) = layer.parts_mut();
        for (r, f) in forms.iter().enumerate() {
            for (&c, &v) in &f.terms {
                assert!(c < cols, "form refers to unit {c} outside a frontier of width {cols}");
                w[r * cols + c] = v;
            }
            b[r] = f.c;
        }
        layer
    }

    /// Adds a hidden layer whose pre-activations are `forms`; returns the new units.
    pub fn hidden(&mut self, forms: &[Lin]) -> Vec<Lin> {
        assert!(!forms.is_empty(), "hidden layers need at least one unit");
        let layer = self.dense(forms);
        self.width = forms.len();
        self.layers.push(layer);
        (0..forms.len()).map(Lin::unit).collect()
    }

    pub fn finish(self, outputs: &[Lin]) -> Result<Network> {
        let last = self.dense(outputs);
        let mut layers = self.layers;
        layers.push(last);
        Network::new(self.input_dim, layers, None)
    }
}
