//! Empirical risk minimization on synthetic data, excess-risk estimation and rate sweeps.
//!
//! The estimator is approximated by Adam on a rectangle MLP; the best parameter
//! snapshot (by empirical risk on the training set) is returned.

mod mlp;
mod sweep;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::ArchitecturePlan;
use crate::error::{Error, Result};
use crate::net::Network;
use crate::targets::{sample_x, Dataset, HolderTarget, SupportSpec};

pub use mlp::Mlp;
pub use sweep::{rate_sweep, DEGENERATE_LEVEL, PointEstimate, ProjectionSetup, RateReport, ReplicateResult, SweepConfig};

/// Cosine decay from `initial` to `final` over all optimizer steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningRate {
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_rate: f64,
}

impl LearningRate {
    pub fn at(&self, step: usize, total: usize) -> f64 {
        let t = if total <= 1 { 1.0 } else { step as f64 / (total - 1) as f64 };
        self.final_rate + 0.5 * (self.initial - self.final_rate) * (1.0 + (std::f64::consts::PI * t).cos())
    }
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate { initial: 1e-2, final_rate: 1e-4 }
    }
}

/// Multipliers applied to the planned width and depth before training.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeKnob {
    pub width: f64,
    pub depth: f64,
}

impl Default for SizeKnob {
    fn default() -> Self {
        SizeKnob { width: 1.0, depth: 1.0 }
    }
}

impl SizeKnob {
    /// Trained `(width, depth)`: the planned values scaled and rounded, at least 1.
    pub fn apply(&self, plan: &ArchitecturePlan) -> (usize, usize) {
        let scale = |v: u64, k: f64| ((v as f64 * k).round() as usize).max(1);
        (scale(plan.width, self.width), scale(plan.depth, self.depth))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub plan: ArchitecturePlan,
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub learning_rate: LearningRate,
    pub seed: u64,
    /// Label truncation level `β_n`; `None` leaves labels untouched.
    #[serde(default)]
    pub truncation: Option<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub size: SizeKnob,
    /// Lower bound on optimizer steps; small datasets get extra epochs.
    #[serde(default)]
    pub min_steps: usize,
}

fn default_batch() -> usize {
    64
}

fn default_replicates() -> usize {
    1
}

impl TrainConfig {
    pub fn new(plan: ArchitecturePlan, epochs: usize, seed: u64) -> Self {
        TrainConfig {
            plan,
            epochs,
            batch_size: default_batch(),
            learning_rate: LearningRate::default(),
            seed,
            truncation: None,
            replicates: default_replicates(),
            size: SizeKnob::default(),
            min_steps: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.replicates == 0 {
            return Err(Error::invalid("epochs, batch_size and replicates must be positive"));
        }
        if let Some(b) = self.truncation {
            if !(b > 0.0) {
                return Err(Error::invalid(format!("truncation level must be positive, got {b}")));
            }
        }
        let lr = self.learning_rate;
        if !(lr.initial > 0.0 && lr.final_rate >= 0.0 && lr.initial.is_finite() && lr.final_rate.is_finite()) {
            return Err(Error::invalid("learning rates must be finite, initial > 0 and final >= 0"));
        }
        if !(self.size.width > 0.0 && self.size.depth > 0.0) {
            return Err(Error::invalid("size multipliers must be positive"));
        }
        Ok(())
    }
}

/// `(1/n)Σ(Yᵢ − f(Xᵢ))²`.
pub fn empirical_risk(net: &Network, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("empirical risk of an empty dataset"));
    }
    let mut sum = 0.0;
    for (x, &y) in data.x.iter().zip(&data.y) {
        let e = net.evaluate_scalar(x)? - y;
        sum += e * e;
    }
    Ok(sum / data.len() as f64)
}

/// Labels clamped to `[−β_n, β_n]`; `f64::INFINITY` is the identity.
pub fn truncate_labels(data: &Dataset, level: f64) -> Result<Dataset> {
    if !(level > 0.0) {
        return Err(Error::invalid(format!("truncation level must be positive, got {level}")));
    }
    Ok(Dataset { x: data.x.clone(), y: data.y.iter().map(|y| y.clamp(-level, level)).collect() })
}

/// Per-coordinate min and max of the covariates.
fn bounding_box(xs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let d = xs[0].len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in xs {
        for i in 0..d {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
    }
    (lo, hi)
}

/// Adam state.
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Adam { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for ((p, g), (m, v)) in params.iter_mut().zip(grad).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            *m = Self::B1 * *m + (1.0 - Self::B1) * g;
            *v = Self::B2 * *v + (1.0 - Self::B2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
        }
    }
}

/// Outcome of one training run.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub mlp: Mlp,
    pub initial_risk: f64,
    /// Empirical risk of the returned snapshot (on the possibly truncated labels).
    pub risk: f64,
    pub best_epoch: usize,
}

impl TrainedModel {
    pub fn network(&self) -> Network {
        self.mlp.to_network()
    }
}

/// Trains a rectangle MLP of the plan's shape (after the size knob) with Adam.
pub fn train_erm(data: &Dataset, config: &TrainConfig) -> Result<Network> {
    Ok(train_model(data, config)?.network())
}

/// [`train_erm`] with the training diagnostics.
pub fn train_model(data: &Dataset, config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("cannot train on an empty dataset"));
    }
    let d = data.dim();
    if config.plan.d_eff as usize != d {
        return Err(Error::DimensionMismatch { expected: config.plan.d_eff as usize, got: d });
    }
    let data = match config.truncation {
        Some(level) => truncate_labels(data, level)?,
        None => data.clone(),
    };
    let (width, depth) = config.size.apply(&config.plan);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi) = bounding_box(&data.x);
    let mut net = Mlp::he_init(d, width, depth, config.plan.clip_bound, &lo, &hi, &mut rng)?;

    let n = data.len();
    let batch = config.batch_size.min(n);
    let per_epoch = n.div_ceil(batch);
    let epochs = config.epochs.max(config.min_steps.div_ceil(per_epoch));
    let total = per_epoch * epochs;
    let initial_risk = net.loss(&data.x, &data.y);
    if !initial_risk.is_finite() {
        return Err(Error::Divergence("initial empirical risk is not finite".into()));
    }
    let mut best = (initial_risk, net.params().to_vec(), 0);
    let mut adam = Adam::new(net.num_params());
    let mut grad = vec![0.0; net.num_params()];
    let mut scratch = mlp::Scratch::new(&net);
    let mut order: Vec<usize> = (0..n).collect();
    let mut step = 0;
    let mut bx: Vec<&[f64]> = Vec::with_capacity(batch);
    let mut by = Vec::with_capacity(batch);
    for epoch in 1..=epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            bx.clear();
            by.clear();
            for &i in chunk {
                bx.push(&data.x[i]);
                by.push(data.y[i]);
            }
            let loss = net.accumulate(&bx, &by, &mut grad, &mut scratch);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence(format!("non-finite loss or gradient at epoch {epoch}, step {step}")));
            }
            let lr = config.learning_rate.at(step, total);
            adam.step(net.params_mut(), &grad, lr);
            step += 1;
        }
        let risk = net.loss(&data.x, &data.y);
        if !risk.is_finite() {
            return Err(Error::Divergence(format!("empirical risk became non-finite at epoch {epoch}")));
        }
        if risk < best.0 {
            best = (risk, net.params().to_vec(), epoch);
        }
    }
    net.params_mut().copy_from_slice(&best.1);
    Ok(TrainedModel { mlp: net, initial_risk, risk: best.0, best_epoch: best.2 })
}

/// Monte Carlo estimate of `‖f̂ − f₀‖²` under the covariate law, from `m` fresh samples.
pub fn excess_risk_mc(net: &Network, target: &HolderTarget, support: &SupportSpec, m: usize, seed: u64) -> Result<f64> {
    Ok(excess_risk_mc_detail(net, target, support, m, seed)?.0)
}

/// Estimate and its standard error `sd/√m`.
pub fn excess_risk_mc_detail(
    net: &Network,
    target: &HolderTarget,
    support: &SupportSpec,
    m: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::invalid("Monte Carlo sample size must be at least 1"));
    }
    if net.input_dim() != support.dim() || target.dim() != support.dim() {
        return Err(Error::DimensionMismatch { expected: support.dim(), got: net.input_dim() });
    }
    let xs = sample_x(support, m, seed)?;
    let mut sq = Vec::with_capacity(m);
    for x in &xs {
        let e = net.evaluate_scalar(x)? - target.eval(x);
        sq.push(e * e);
    }
    let mean = sq.iter().sum::<f64>() / m as f64;
    let var = if m > 1 { sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64 } else { 0.0 };
    Ok((mean, (var / m as f64).sqrt()))
}
