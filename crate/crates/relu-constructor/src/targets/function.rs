//! Hölder-smooth target functions with derivative access.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::bounds::{smoothness, Smoothness};
use crate::error::{Error, Result};
use crate::multiindex::{multi_indices, order};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Step used by the central-difference fallback for missing partials.
pub const FD_STEP: f64 = 1e-5;

/// A function on `[0,1]^d` with declared smoothness `β` and norm bound `B₀`.
#[derive(Clone)]
pub struct HolderTarget {
    name: String,
    d: usize,
    beta: f64,
    b0: f64,
    eval: ScalarFn,
    partials: BTreeMap<Vec<u32>, ScalarFn>,
}

impl fmt::Debug for HolderTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolderTarget")
            .field("name", &self.name)
            .field("d", &self.d)
            .field("beta", &self.beta)
            .field("b0", &self.b0)
            .field("partials", &self.partials.keys().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinTarget {
    Constant,
    Affine,
    CosineProduct,
    Poly,
    AbsPower,
}

impl BuiltinTarget {
    pub const ALL: [BuiltinTarget; 5] = [
        BuiltinTarget::Constant,
        BuiltinTarget::Affine,
        BuiltinTarget::CosineProduct,
        BuiltinTarget::Poly,
        BuiltinTarget::AbsPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinTarget::Constant => "constant",
            BuiltinTarget::Affine => "affine",
            BuiltinTarget::CosineProduct => "cosine_product",
            BuiltinTarget::Poly => "poly",
            BuiltinTarget::AbsPower => "abs_power",
        }
    }
}

impl std::str::FromStr for BuiltinTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BuiltinTarget::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown target `{s}`")))
    }
}

impl HolderTarget {
    /// Wraps user-supplied evaluators. `partials` may omit any multi-index; the
    /// zero multi-index is always served by `eval`.
    pub fn new(
        name: impl Into<String>,
        d: usize,
        beta: f64,
        b0: f64,
        eval: ScalarFn,
        partials: BTreeMap<Vec<u32>, ScalarFn>,
    ) -> Result<Self> {
        let sm = smoothness(beta)?;
        if d == 0 {
            return Err(Error::invalid("target dimension must be positive"));
        }
        if !(b0.is_finite() && b0 > 0.0) {
            return Err(Error::invalid(format!("B0 must be positive and finite, got {b0}")));
        }
        for alpha in partials.keys() {
            if alpha.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: alpha.len() });
            }
            if order(alpha) > sm.s {
                return Err(Error::invalid(format!("partial {alpha:?} exceeds the smoothness order {}", sm.s)));
            }
        }
        Ok(HolderTarget { name: name.into(), d, beta, b0, eval, partials })
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.d
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn b0(&self) -> f64 {
        self.b0
    }
    pub fn smoothness(&self) -> Smoothness {
        smoothness(self.beta).expect("validated at construction")
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Analytic partial `∂^α f(x)` if one was supplied.
    pub fn partial(&self, alpha: &[u32], x: &[f64]) -> Option<f64> {
        if order(alpha) == 0 {
            return Some(self.eval(x));
        }
        self.partials.get(alpha).map(|f| f(x))
    }

    /// Multi-indices of order `1..=s` that have no analytic evaluator.
    pub fn missing_partials(&self) -> Vec<Vec<u32>> {
        multi_indices(self.d, self.smoothness().s)
            .into_iter()
            .filter(|a| order(a) > 0 && !self.partials.contains_key(a))
            .collect()
    }

    /// `∂^α f(x)`, by central differences with step [`FD_STEP`] when no analytic
    /// evaluator exists. The flag reports whether differences were used.
    pub fn partial_or_fd(&self, alpha: &[u32], x: &[f64]) -> (f64, bool) {
        if let Some(v) = self.partial(alpha, x) {
            return (v, false);
        }
        // Peel one derivative off and difference the lower-order partial.
        let i = alpha.iter().position(|&a| a > 0).expect("order > 0 here");
        let mut lower = alpha.to_vec();
        lower[i] -= 1;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += FD_STEP;
        xm[i] -= FD_STEP;
        let (fp, _) = self.partial_or_fd(&lower, &xp);
        let (fm, _) = self.partial_or_fd(&lower, &xm);
        ((fp - fm) / (2.0 * FD_STEP), true)
    }

    /// The same function with all analytic partials dropped.
    pub fn without_partials(&self) -> Self {
        HolderTarget { partials: BTreeMap::new(), ..self.clone() }
    }
}

fn arc(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

/// The built-in members of the Hölder ball.
///
/// - `constant`: `0.3·B₀`.
/// - `affine`: `Σxᵢ/d`, which needs `B₀ ≥ 1`.
/// - `cosine_product`: `c·Π cos(πxᵢ)` with `c = B₀ / max(π^s, 2^{1−r}π^{s+r}d^{r/2})`.
/// - `poly`: `B₀·½(mean x)²`.
/// - `abs_power`: `B₀·|mean x − ½|^β`, only for `β ≤ 1`.
pub fn builtin_target(kind: BuiltinTarget, d: usize, beta: f64, b0: f64) -> Result<HolderTarget> {
    let sm = smoothness(beta)?;
    if d == 0 {
        return Err(Error::invalid("target dimension must be positive"));
    }
    if !(b0.is_finite() && b0 > 0.0) {
        return Err(Error::invalid(format!("B0 must be positive and finite, got {b0}")));
    }
    let s = sm.s;
    let alphas: Vec<Vec<u32>> = multi_indices(d, s).into_iter().filter(|a| order(a) > 0).collect();
    let mut partials: BTreeMap<Vec<u32>, ScalarFn> = BTreeMap::new();
    let df = d as f64;
    let eval: ScalarFn = match kind {
        BuiltinTarget::Constant => {
            for a in alphas {
                partials.insert(a, arc(|_| 0.0));
            }
            let c = 0.3 * b0;
            arc(move |_| c)
        }
        BuiltinTarget::Affine => {
            if b0 < 1.0 {
                return Err(Error::invalid(format!("the affine target needs B0 >= 1, got {b0}")));
            }
            for a in alphas {
                let v = if order(&a) == 1 { 1.0 / df } else { 0.0 };
                partials.insert(a, arc(move |_| v));
            }
            arc(move |x| x.iter().sum::<f64>() / df)
        }
        BuiltinTarget::CosineProduct => {
            let r = sm.r;
            let sf = f64::from(s);
            let c = b0 / PI.powf(sf).max(2f64.powf(1.0 - r) * PI.powf(sf + r) * df.powf(r / 2.0));
            for a in alphas {
                let a2 = a.clone();
                let scale = c * PI.powi(order(&a) as i32);
                partials.insert(
                    a,
                    arc(move |x| {
                        scale * x.iter().zip(&a2).map(|(&xi, &ai)| (PI * xi + f64::from(ai) * PI / 2.0).cos()).product::<f64>()
                    }),
                );
            }
            arc(move |x| c * x.iter().map(|&xi| (PI * xi).cos()).product::<f64>())
        }
        BuiltinTarget::Poly => {
            // f = B₀/2·m², m = mean x; ∂ᵢf = B₀m/d, ∂ᵢ∂ⱼf = B₀/d².
            for a in alphas {
                let f: ScalarFn = match order(&a) {
                    1 => arc(move |x| b0 * x.iter().sum::<f64>() / df / df),
                    2 => arc(move |_| b0 / (df * df)),
                    _ => arc(|_| 0.0),
                };
                partials.insert(a, f);
            }
            arc(move |x| {
                let m = x.iter().sum::<f64>() / df;
                0.5 * b0 * m * m
            })
        }
        BuiltinTarget::AbsPower => {
            if beta > 1.0 {
                return Err(Error::invalid(format!("abs_power is only defined for β ≤ 1, got {beta}")));
            }
            arc(move |x| b0 * (x.iter().sum::<f64>() / df - 0.5).abs().powf(beta))
        }
    };
    HolderTarget::new(kind.name(), d, beta, b0, eval, partials)
}

/// Result of a grid/pair scan of the Hölder norm.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HolderCheck {
    /// `max_{‖α‖₁≤s} |∂^α f|` over the grid.
    pub max_partial: f64,
    /// Largest `|∂^α f(x)−∂^α f(y)|/‖x−y‖₂^r` over the random pairs, `‖α‖₁ = s`.
    pub max_ratio: f64,
    pub used_finite_differences: bool,
    pub pass: bool,
}

/// Spot-checks the declared norm on a lattice and on `pairs` random pairs.
pub fn holder_spot_check(target: &HolderTarget, per_axis: usize, pairs: usize, seed: u64) -> HolderCheck {
    let d = target.dim();
    let sm = target.smoothness();
    let alphas = multi_indices(d, sm.s);
    let per_axis = per_axis.max(2);
    let total = per_axis.saturating_pow(d as u32).min(1 << 20);
    let mut fd = false;
    let mut max_partial = 0f64;
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rest = idx;
        for xi in x.iter_mut() {
            *xi = (rest % per_axis) as f64 / (per_axis - 1) as f64;
            rest /= per_axis;
        }
        for a in &alphas {
            let (v, used) = target.partial_or_fd(a, &x);
            fd |= used;
            max_partial = max_partial.max(v.abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top: Vec<&Vec<u32>> = alphas.iter().filter(|a| order(a) == sm.s).collect();
    let mut max_ratio = 0f64;
    let mut y = vec![0.0; d];
    for _ in 0..pairs {
        for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
            *xi = rng.random::<f64>();
            *yi = rng.random::<f64>();
        }
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist < 1e-9 {
            continue;
        }
        for a in &top {
            let (fx, u1) = target.partial_or_fd(a, &x);
            let (fy, u2) = target.partial_or_fd(a, &y);
            fd |= u1 || u2;
            max_ratio = max_ratio.max((fx - fy).abs() / dist.powf(sm.r));
        }
    }
    let tol = target.b0() + 1e-6;
    HolderCheck { max_partial, max_ratio, used_finite_differences: fd, pass: max_partial <= tol && max_ratio <= tol }
}
