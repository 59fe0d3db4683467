//! Product and monomial nets built from composed zigzags.
//!
//! For `u ∈ [0,1]` let `T` be the zigzag with `r` teeth (`r` even) and `b` the
//! piecewise-linear interpolant of `u(1−u)` at the nodes `j/r`. Then
//! `q_L(u) = u − Σ_{k<L} r^{−2k} b(T^k(u))` interpolates `u²` on the grid of
//! spacing `r^{−L}`, so `0 ≤ q_L(u) − u² ≤ r^{−2L}/4`. Products use
//! `xy = c² + 2hc·s + h²(s² − t²)` with `s, t ∈ [−1,1]` the rescaled sum and difference.

use serde::{Deserialize, Serialize};

use super::Profile;
use crate::error::{Error, Result};
use crate::multiindex::order;
use crate::net::builder::{Builder, Lin};
use crate::net::Network;

/// Zigzag teeth `r` (even) and number of composed layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductParams {
    pub r: u32,
    pub layers: u32,
}

impl ProductParams {
    pub fn new(r: u32, layers: u32) -> Result<Self> {
        if r < 2 || r % 2 == 1 {
            return Err(Error::invalid(format!("zigzag teeth must be even and at least 2, got {r}")));
        }
        if layers == 0 {
            return Err(Error::invalid("a product net needs at least one layer"));
        }
        Ok(ProductParams { r, layers })
    }
}

/// Largest even number `≤ x`, at least 2.
fn even_at_least_two(x: u64) -> u32 {
    let e = x.min(u64::from(u32::MAX - 1)) as u32;
    (e - e % 2).max(2)
}

/// Guaranteed sup error on `[a,b]²`: `(b−a)²·r^{−2L}/16`.
pub fn product_error_bound(p: ProductParams, a: f64, b: f64) -> f64 {
    (b - a).powi(2) * f64::from(p.r).powi(-2 * p.layers as i32) / 16.0
}

/// Layers past this point only shrink the truncation error below f64 resolution.
const MAX_SIMPLE_LAYERS: u32 = 28;

/// Fewest layers with `r = 2` whose error `(b−a)²·4^{−L}/16` is at most `tol`.
pub(crate) fn simple_product_layers(tol: f64, width_sq: f64) -> u32 {
    let mut l = 1;
    while l < MAX_SIMPLE_LAYERS && width_sq * 4f64.powi(-(l as i32)) / 16.0 > tol {
        l += 1;
    }
    l
}

/// Appends a product gadget for `x·y` with `x, y ∈ [lo, hi]`. Each `carry` form must be
/// nonnegative; it is passed through one unit per layer. Returns the product (an
/// affine form of the last layer) and the carried signals.
pub(crate) fn product_gadget(
    b: &mut Builder,
    x: &Lin,
    y: &Lin,
    lo: f64,
    hi: f64,
    p: ProductParams,
    carry: &[Lin],
) -> (Lin, Vec<Lin>) {
    let r = p.r as usize;
    let rf = f64::from(p.r);
    let c = (lo + hi) / 2.0;
    let h = (hi - lo) / 2.0;
    let s = (x.clone() + y.clone()).shift(-2.0 * c) * (1.0 / (2.0 * h));
    let t = (x.clone() - y.clone()) * (1.0 / (2.0 * h));
    let tooth = |j: usize| if j == 0 { rf } else if j % 2 == 1 { -2.0 * rf } else { 2.0 * rf };
    let bump = |j: usize| if j == 0 { 1.0 - 1.0 / rf } else { -2.0 / rf };

    let mut forms = Vec::with_capacity(4 * r + carry.len());
    for w in [&s, &t] {
        for sign in [1.0, -1.0] {
            for j in 0..r {
                forms.push(w.clone() * sign - Lin::constant(j as f64 / rf));
            }
        }
    }
    forms.extend(carry.iter().cloned());
    let units = b.hidden(&forms);
    // |w| − j/r through σ(w − j/r) + σ(−w − j/r).
    let fold = |base: usize, j: usize| units[base + j].clone() + units[base + r + j].clone();
    let (su, tu) = (0, 2 * r);
    let mut zu = Lin::combine((0..r).map(|j| (tooth(j), &units[su + j])).chain((0..r).map(|j| (tooth(j), &units[su + r + j]))));
    let mut zv = Lin::combine((0..r).map(|j| (tooth(j), &units[tu + j])).chain((0..r).map(|j| (tooth(j), &units[tu + r + j]))));
    let bu = Lin::combine((0..r).flat_map(|j| [(bump(j), &units[su + j]), (bump(j), &units[su + r + j])]));
    let bv = Lin::combine((0..r).flat_map(|j| [(bump(j), &units[tu + j]), (bump(j), &units[tu + r + j])]));
    let mut acc = (units[su].clone() - units[su + r].clone()) * (2.0 * h * c)
        + (fold(su, 0) - bu - fold(tu, 0) + bv) * (h * h);
    acc = acc.shift(c * c);
    let mut carried: Vec<Lin> = units[4 * r..].to_vec();

    for k in 1..p.layers {
        let mut forms = Vec::with_capacity(2 * r + 2 + carried.len());
        for z in [&zu, &zv] {
            for j in 0..r {
                forms.push(z.clone() - Lin::constant(j as f64 / rf));
            }
        }
        forms.push(acc.clone());
        forms.push(-acc.clone());
        forms.extend(carried.iter().cloned());
        let units = b.hidden(&forms);
        zu = Lin::combine((0..r).map(|j| (tooth(j), &units[j])));
        zv = Lin::combine((0..r).map(|j| (tooth(j), &units[r + j])));
        let bu = Lin::combine((0..r).map(|j| (bump(j), &units[j])));
        let bv = Lin::combine((0..r).map(|j| (bump(j), &units[r + j])));
        let weight = h * h * rf.powi(-2 * k as i32);
        acc = units[2 * r].clone() - units[2 * r + 1].clone() - (bu - bv) * weight;
        carried = units[2 * r + 2..].to_vec();
    }
    (acc, carried)
}

/// Product net on `[a,b]²` meeting `6(b−a)²N^{−M}`.
///
/// Paper budget: `r = 2⌊⌊(9N+1)/4⌋/2⌋` (at least 2) teeth and `L = M` layers, so the
/// width is `4r ≤ 9N+1`. Simple: `r = 2` and the fewest layers meeting the bound.
pub fn build_product_net(n: u64, m: u64, a: f64, b: f64, profile: Profile) -> Result<Network> {
    if n == 0 || m == 0 {
        return Err(Error::invalid(format!("N and M must be positive (got N={n}, M={m})")));
    }
    let params = match profile {
        Profile::PaperBudget => {
            let layers = u32::try_from(m).map_err(|_| Error::invalid("M is too large"))?;
            ProductParams::new(even_at_least_two(n.saturating_mul(9).saturating_add(1) / 4), layers)?
        }
        Profile::Simple => ProductParams::new(2, simple_product_layers(6.0 * (n as f64).powf(-(m as f64)), 1.0))?,
    };
    build_product_net_with(params, a, b)
}

pub fn build_product_net_with(params: ProductParams, a: f64, b: f64) -> Result<Network> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid(format!("product interval needs a < b, got [{a}, {b}]")));
    }
    let params = ProductParams::new(params.r, params.layers)?;
    let mut builder = Builder::new(2);
    let inputs = builder.inputs();
    let (out, _) = product_gadget(&mut builder, &inputs[0], &inputs[1], a, b, params, &[]);
    builder.finish(&[out])
}

/// Teeth and layers per product for a monomial of degree `k`.
fn monomial_params(k: u32, n: u64, m: u64, profile: Profile) -> Result<ProductParams> {
    match profile {
        Profile::PaperBudget => {
            let r = even_at_least_two(n.saturating_mul(9).saturating_add(10) / 4);
            // r^{2L} ≥ (N+1)^{7kM} makes the chained error at most (k−1)/16·(N+1)^{−7kM}.
            let need = 7.0 * f64::from(k) * m as f64 * ((n + 1) as f64).ln() / (2.0 * f64::from(r).ln());
            let layers = need.ceil().max(1.0);
            if layers > f64::from(u32::MAX) {
                return Err(Error::invalid("monomial depth overflows"));
            }
            ProductParams::new(r, layers as u32)
        }
        Profile::Simple => {
            let kf = f64::from(k);
            let target = 9.0 * kf * ((n + 1) as f64).powf(-7.0 * kf * m as f64) / (kf - 1.0);
            ProductParams::new(2, simple_product_layers(target, 1.0))
        }
    }
}

/// Net for `x^α` on `[0,1]^d`, clamped to `[0,1]`, meeting `9k(N+1)^{−7kM}` with
/// `k = ‖α‖₁`. Degree one is the exact coordinate map.
///
/// The factors are multiplied left to right; coordinates still needed later ride
/// along as one unit each. The paper-budget profile uses `r = 2⌊⌊(9N+10)/4⌋/2⌋`
/// teeth, so each layer has at most `4r + k − 2 ≤ 9(N+1)+k−1` units.
pub fn build_monomial_net(alpha: &[u32], n: u64, m: u64, profile: Profile) -> Result<Network> {
    if alpha.is_empty() {
        return Err(Error::invalid("multi-index must have at least one coordinate"));
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid(format!("N and M must be positive (got N={n}, M={m})")));
    }
    let k = order(alpha);
    if k == 0 {
        return Err(Error::invalid("the zero multi-index is the constant 1; use a constant net"));
    }
    monomial_net_with(alpha, monomial_params(k, n, m, profile)?)
}

/// Monomial net with explicit product parameters for every factor.
pub(crate) fn monomial_net_with(alpha: &[u32], params: ProductParams) -> Result<Network> {
    let d = alpha.len();
    let mut b = Builder::new(d);
    let inputs = b.inputs();
    let factors: Vec<usize> = alpha.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize)).collect();
    if factors.is_empty() {
        return Err(Error::invalid("the zero multi-index is the constant 1; use a constant net"));
    }
    if factors.len() == 1 {
        return b.finish(&[inputs[factors[0]].clone()]);
    }
    // Current form of each coordinate that is still needed.
    let mut coords: Vec<Option<Lin>> = inputs.into_iter().map(Some).collect();
    let mut prod = coords[factors[0]].clone().expect("input");
    for step in 1..factors.len() {
        let y = coords[factors[step]].clone().expect("still carried");
        let mut later: Vec<usize> = factors[step + 1..].to_vec();
        later.dedup();
        let carry: Vec<Lin> = later.iter().map(|&i| coords[i].clone().expect("still carried")).collect();
        let (out, carried) = product_gadget(&mut b, &prod, &y, 0.0, 1.0, params, &carry);
        coords = vec![None; d];
        for (i, l) in later.into_iter().zip(carried) {
            coords[i] = Some(l);
        }
        prod = out;
    }
    let units = b.hidden(&[prod.clone(), prod.shift(-1.0)]);
    b.finish(&[units[0].clone() - units[1].clone()])
}
