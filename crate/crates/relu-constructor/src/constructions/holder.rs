//! Assembled approximants for Hölder targets.
//!
//! `φ₀` localizes `x` to a cell `θ/K` of a uniform grid with step nets, reads the
//! scaled Taylor coefficients `∂^α f(θ/K)` from point fitters indexed by the cell,
//! forms the monomials of `x − θ/K`, and sums the products. Off the thin region `Ω`
//! the result is a Taylor polynomial of `f` around the cell corner. The uniform
//! approximant takes medians of `3^d` shifted copies of `φ₀`, which removes `Ω`.

use serde::{Deserialize, Serialize};

use super::certify::{measure, passes, ApproxCertificate, CertificateKind, DerivativeSource, GridSpec};
use super::fitter::build_multi_fitter;
use super::mid::build_mid_net;
use super::product::{build_monomial_net, build_product_net_with, monomial_net_with, simple_product_layers, ProductParams};
use super::step::build_step_net_k;
use super::{check_delta, OmegaRegion, Profile};
use crate::bounds::{
    holder_bound, holder_budget, ilog2_ceil, int_root_floor, uniform_bound, uniform_budget, Budget,
};
use crate::error::{Error, Result};
use crate::multiindex::{factorial, multi_indices};
use crate::net::{clip, compose, parallelize, Network};
use crate::targets::HolderTarget;

/// Which shift the uniform approximant uses between its shifted copies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "convention", content = "value")]
pub enum ShiftConvention {
    /// `1/(3K)`, the largest admissible gap width.
    MaxGap,
    /// `1/(3K^{β∨1})`, which keeps the shift error below the approximation error.
    SmoothnessScaled,
    Explicit(f64),
}

impl ShiftConvention {
    pub fn value(self, k: u64, beta: f64) -> f64 {
        let kf = k as f64;
        match self {
            ShiftConvention::MaxGap => 1.0 / (3.0 * kf),
            ShiftConvention::SmoothnessScaled => 1.0 / (3.0 * kf.powf(beta.max(1.0))),
            ShiftConvention::Explicit(v) => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShiftConvention::MaxGap => "max_gap",
            ShiftConvention::SmoothnessScaled => "smoothness_scaled",
            ShiftConvention::Explicit(_) => "explicit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxOptions {
    pub profile: Profile,
    /// Width of the gaps of `Ω` for the plain approximant; defaults to `1/(3K)`.
    pub delta: Option<f64>,
    /// Shift of the uniform approximant, also used as the gap width of its copies.
    pub shift: ShiftConvention,
    /// Use central differences for partial derivatives the target does not provide.
    pub finite_differences: bool,
    pub grid: GridSpec,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            profile: Profile::Simple,
            delta: None,
            shift: ShiftConvention::MaxGap,
            finite_differences: false,
            grid: GridSpec::default(),
        }
    }
}

/// Smallest `K` with `K^d ≥ (NM)²`, so that `K^{−β} ≤ (NM)^{−2β/d}`.
pub fn holder_grid_k(d: usize, n: u64, m: u64) -> Result<u64> {
    if d == 0 || n == 0 || m == 0 {
        return Err(Error::invalid(format!("d, N and M must be positive (got d={d}, N={n}, M={m})")));
    }
    let nm = n.checked_mul(m).ok_or_else(|| Error::invalid("N·M overflows"))?;
    let target = u128::from(nm) * u128::from(nm);
    let d32 = u32::try_from(d).map_err(|_| Error::invalid("dimension too large"))?;
    let mut k = if target <= u128::from(u64::MAX) { int_root_floor(target as u64, d32) } else { 1 }.max(1);
    while u128::from(k).checked_pow(d32).is_some_and(|p| p < target) {
        k += 1;
    }
    Ok(k)
}

/// Largest cell count `K^d` the builders accept.
const MAX_CELLS: u64 = 4_000_000;

struct Plan {
    alphas: Vec<Vec<u32>>,
    derivatives: DerivativeSource,
    /// Scaled coefficients `(∂^α f(θ/K)/B₀ + 1)/2`, one vector per α, indexed by cell.
    xi: Vec<Vec<f64>>,
}

fn plan(target: &HolderTarget, k: u64, finite_differences: bool) -> Result<Plan> {
    let d = target.dim();
    let s = target.smoothness().s;
    let alphas = multi_indices(d, s);
    let cells = u32::try_from(d)
        .ok()
        .and_then(|d| k.checked_pow(d))
        .filter(|&c| c <= MAX_CELLS)
        .ok_or_else(|| Error::invalid(format!("K^d = {k}^{d} cells exceeds the limit of {MAX_CELLS}")))?;
    let missing = target.missing_partials();
    let derivatives = if s == 0 {
        DerivativeSource::NotNeeded
    } else if missing.is_empty() {
        DerivativeSource::Analytic
    } else if finite_differences {
        DerivativeSource::FiniteDifferences
    } else {
        return Err(Error::MissingDerivative { target: target.name().to_string(), alpha: missing[0].clone() });
    };
    let b0 = target.b0();
    let kf = k as f64;
    let mut xi = vec![Vec::with_capacity(cells as usize); alphas.len()];
    let mut theta = vec![0.0; d];
    for idx in 0..cells {
        let mut rest = idx;
        for t in theta.iter_mut() {
            *t = (rest % k) as f64 / kf;
            rest /= k;
        }
        for (a, out) in alphas.iter().zip(xi.iter_mut()) {
            let (v, _) = target.partial_or_fd(a, &theta);
            // Rounding or difference noise may leave the Hölder ball slightly.
            out.push(((v / b0 + 1.0) / 2.0).clamp(0.0, 1.0));
        }
    }
    Ok(Plan { alphas, derivatives, xi })
}

fn selector(rows: &[Vec<(usize, f64)>], cols: usize, bias: Vec<f64>) -> Network {
    let mut w = vec![0.0; rows.len() * cols];
    for (r, terms) in rows.iter().enumerate() {
        for &(c, v) in terms {
            w[r * cols + c] += v;
        }
    }
    Network::affine(rows.len(), cols, w, bias).expect("consistent shapes")
}

/// `x ↦ (cl(x), k(x))`: the coordinates clamped to `[0,1]` and their cell indices.
fn localize(d: usize, k: u64, delta: f64, radix: Option<u64>) -> Result<Network> {
    let clamp = {
        let mut w1 = vec![0.0; 2 * d * d];
        let mut b1 = vec![0.0; 2 * d];
        let mut w2 = vec![0.0; d * 2 * d];
        for i in 0..d {
            w1[2 * i * d + i] = 1.0;
            w1[(2 * i + 1) * d + i] = 1.0;
            b1[2 * i + 1] = -1.0;
            w2[i * 2 * d + 2 * i] = 1.0;
            w2[i * 2 * d + 2 * i + 1] = -1.0;
        }
        Network::new(
            d,
            vec![
                crate::net::Layer::new(2 * d, d, w1, b1)?,
                crate::net::Layer::new(d, 2 * d, w2, vec![0.0; d])?,
            ],
            None,
        )?
    };
    let step = build_step_net_k(k, delta, radix)?;
    let mut branches = vec![clamp.clone()];
    for i in 0..d {
        let pick = selector(&[vec![(i, 1.0)]], d, vec![0.0]);
        branches.push(compose(&step, &compose(&pick, &clamp)?)?);
    }
    parallelize(&branches)
}

/// `(cl, k) ↦ (σ(ψ), σ(y₁), …, σ(y_d))` with `ψ = Σ k_j K^{j−1}` and `y = cl − k/K`.
/// The narrow layer keeps the fan-in of the wide fitter layer small.
fn bottleneck(d: usize, k: u64) -> Result<Network> {
    let kf = k as f64;
    let mut rows = vec![(0..d).map(|j| (d + j, kf.powi(j as i32))).collect::<Vec<_>>()];
    for i in 0..d {
        rows.push(vec![(i, 1.0), (d + i, -1.0 / kf)]);
    }
    let first = selector(&rows, 2 * d, vec![0.0; d + 1]);
    let (_, mut layers, _) = first.into_layers();
    layers.push(crate::net::Layer::identity(d + 1));
    Network::new(2 * d, layers, None)
}

struct Assembly {
    net: Network,
    k: u64,
    derivatives: DerivativeSource,
}

/// Builds `φ₀` with gap width `delta` (validated against `K`).
fn assemble(target: &HolderTarget, n: u64, m: u64, delta: Option<f64>, opts: &ApproxOptions) -> Result<Assembly> {
    let d = target.dim();
    let beta = target.beta();
    let b0 = target.b0();
    let s = target.smoothness().s;
    let k = holder_grid_k(d, n, m)?;
    let delta = delta.unwrap_or(1.0 / (3.0 * k as f64));
    check_delta(k, delta)?;
    let plan = plan(target, k, opts.finite_differences)?;
    let t = plan.alphas.len();
    let profile = opts.profile;

    let radix = match profile {
        Profile::Simple => None,
        Profile::PaperBudget => Some(2 * int_root_floor(n, d as u32) + 1),
    };
    let stage_a = compose(&bottleneck(d, k)?, &localize(d, k, delta, radix)?)?;

    let width_cap = match profile {
        Profile::Simple => None,
        Profile::PaperBudget => {
            let w = 16u128 * d as u128 * (u128::from(s) + 1) * (u128::from(n) + 1) * u128::from(ilog2_ceil(8 * n));
            Some(usize::try_from(w).unwrap_or(usize::MAX))
        }
    };
    // Component tolerance for the simple profile, in units of B₀.
    let bound = holder_bound(beta, d, b0, n, m)?;
    let tol = bound / b0 * 1e-3 / t as f64;

    let fitter = build_multi_fitter(&plan.xi, width_cap)?;
    let mut b_branches = vec![compose(&fitter, &selector(&[vec![(0, 1.0)]], d + 1, vec![0.0]))?];
    let y_pick = selector(&(1..=d).map(|i| vec![(i, 1.0)]).collect::<Vec<_>>(), d + 1, vec![0.0; d]);
    for alpha in plan.alphas.iter().skip(1) {
        let mono = match profile {
            Profile::Simple => monomial_net_with(alpha, ProductParams::new(2, simple_product_layers(tol, 1.0))?)?,
            Profile::PaperBudget => build_monomial_net(alpha, n, m, profile)?,
        };
        b_branches.push(compose(&mono, &y_pick)?);
    }
    let stage_b = parallelize(&b_branches)?;

    // Inputs: φ_α for all α, then P_α for α ≠ 0.
    let width_c = 2 * t - 1;
    let prod_params = match profile {
        Profile::Simple => ProductParams::new(2, simple_product_layers(tol, 4.0))?,
        Profile::PaperBudget => {
            let r = (9 * n + 1) / 4;
            ProductParams::new((r - r % 2).max(2) as u32, u32::try_from(m).map_err(|_| Error::invalid("M too large"))?)?
        }
    };
    let product = build_product_net_with(prod_params, -1.0, 1.0)?;
    let mut c_branches = vec![selector(&[vec![(0, 2.0)]], width_c, vec![-1.0])];
    for (i, alpha) in plan.alphas.iter().enumerate().skip(1) {
        let inv = 1.0 / factorial(alpha)? as f64;
        let pick = selector(&[vec![(i, 2.0 * inv)], vec![(t + i - 1, 1.0)]], width_c, vec![-inv, 0.0]);
        c_branches.push(compose(&product, &pick)?);
    }
    let stage_c = parallelize(&c_branches)?;
    let total = selector(&[(0..t).map(|i| (i, b0)).collect()], t, vec![0.0]);

    let net = compose(&total, &compose(&stage_c, &compose(&stage_b, &stage_a)?)?)?;
    let net = clip(&net, b0)?;
    Ok(Assembly { net, k, derivatives: plan.derivatives })
}

fn check_budget(net: &Network, budget: Budget, what: &str) -> Result<()> {
    if budget.admits(&net.stats()) {
        Ok(())
    } else {
        let st = net.stats();
        Err(Error::BudgetExceeded(format!(
            "{what} has width {} and depth {} but the budget is width {} and depth {}",
            st.width, st.depth, budget.width, budget.depth
        )))
    }
}

fn check_counts(n: u64, m: u64) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::invalid(format!("N and M must be positive (got N={n}, M={m})")));
    }
    Ok(())
}

/// `φ₀` for `target` with parameters `N, M`, certified off `Ω(K, δ)`.
pub fn build_holder_approximant(
    target: &HolderTarget,
    n: u64,
    m: u64,
    opts: &ApproxOptions,
) -> Result<(Network, ApproxCertificate)> {
    check_counts(n, m)?;
    let asm = assemble(target, n, m, opts.delta, opts)?;
    let s = target.smoothness().s;
    let budget = match opts.profile {
        Profile::Simple => None,
        Profile::PaperBudget => {
            let b = holder_budget(s, target.dim() as u32, n, m)?;
            check_budget(&asm.net, b, "the approximant")?;
            Some(b)
        }
    };
    let delta = opts.delta.unwrap_or(1.0 / (3.0 * asm.k as f64));
    let omega = OmegaRegion::new(target.dim(), asm.k, delta)?;
    let bound = holder_bound(target.beta(), target.dim(), target.b0(), n, m)?;
    let (measured, grid) = measure(&asm.net, target, Some(&omega), &opts.grid)?;
    let cert = ApproxCertificate {
        kind: CertificateKind::Holder,
        target: target.name().to_string(),
        profile: opts.profile,
        n,
        m,
        beta: target.beta(),
        d: target.dim(),
        b0: target.b0(),
        bound,
        measured,
        pass: passes(measured, bound),
        stats: asm.net.stats(),
        budget,
        k: asm.k,
        delta,
        shift: None,
        shift_convention: None,
        grid,
        derivatives: asm.derivatives,
    };
    Ok((asm.net, cert))
}

/// Medians of `3^d` copies of `φ₀` at `x + δv`, `v ∈ {−1,0,1}^d`, taken one
/// coordinate at a time; certified on the whole cube.
pub fn build_uniform_approximant(
    target: &HolderTarget,
    n: u64,
    m: u64,
    opts: &ApproxOptions,
) -> Result<(Network, ApproxCertificate)> {
    check_counts(n, m)?;
    let d = target.dim();
    let k = holder_grid_k(d, n, m)?;
    let shift = opts.shift.value(k, target.beta());
    check_delta(k, shift)?;
    let asm = assemble(target, n, m, Some(shift), opts)?;
    let copies_n = 3usize.checked_pow(d as u32).filter(|&c| c <= 729).ok_or_else(|| {
        Error::invalid(format!("3^d shifted copies for d = {d} exceeds the supported 729"))
    })?;
    let mut copies = Vec::with_capacity(copies_n);
    for idx in 0..copies_n {
        let mut rest = idx;
        let mut bias = vec![0.0; d];
        for b in bias.iter_mut() {
            *b = ((rest % 3) as f64 - 1.0) * shift;
            rest /= 3;
        }
        let move_x = selector(&(0..d).map(|i| vec![(i, 1.0)]).collect::<Vec<_>>(), d, bias);
        copies.push(compose(&asm.net, &move_x)?);
    }
    let mut net = parallelize(&copies)?;
    let mid = build_mid_net();
    let mut width = copies_n;
    while width > 1 {
        let groups: Vec<Network> = (0..width / 3)
            .map(|g| compose(&mid, &selector(&[vec![(3 * g, 1.0)], vec![(3 * g + 1, 1.0)], vec![(3 * g + 2, 1.0)]], width, vec![0.0; 3])))
            .collect::<Result<_>>()?;
        net = compose(&parallelize(&groups)?, &net)?;
        width /= 3;
    }
    let s = target.smoothness().s;
    let budget = match opts.profile {
        Profile::Simple => None,
        Profile::PaperBudget => {
            let b = uniform_budget(s, d as u32, n, m)?;
            check_budget(&net, b, "the uniform approximant")?;
            Some(b)
        }
    };
    let bound = uniform_bound(target.beta(), d, target.b0(), n, m)?;
    let (measured, grid) = measure(&net, target, None, &opts.grid)?;
    let cert = ApproxCertificate {
        kind: CertificateKind::Uniform,
        target: target.name().to_string(),
        profile: opts.profile,
        n,
        m,
        beta: target.beta(),
        d,
        b0: target.b0(),
        bound,
        measured,
        pass: passes(measured, bound),
        stats: net.stats(),
        budget,
        k,
        delta: shift,
        shift: Some(shift),
        shift_convention: Some(opts.shift.name().to_string()),
        grid,
        derivatives: asm.derivatives,
    };
    Ok((net, cert))
}
