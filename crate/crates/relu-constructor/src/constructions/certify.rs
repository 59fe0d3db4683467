//! Grid certification of approximants against their closed-form bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{omega_membership, OmegaRegion, Profile};
use crate::bounds::Budget;
use crate::error::{Error, Result};
use crate::net::{Network, NetworkStats};
use crate::targets::HolderTarget;

/// Slack added to the bound before comparing.
pub const CERT_SLACK: f64 = 1e-9;

/// Cap on the number of lattice points.
pub const MAX_LATTICE: usize = 1_000_000;

/// Lattice with `per_axis` points per coordinate (default `1 + ⌊200/d⌋`, reduced
/// until the lattice has at most 10⁶ points) plus `random_points` seeded uniform points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub per_axis: Option<usize>,
    pub random_points: usize,
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { per_axis: None, random_points: 10_000, seed: 0 }
    }
}

impl GridSpec {
    pub fn lattice_per_axis(&self, d: usize) -> usize {
        let mut p = self.per_axis.unwrap_or(1 + 200 / d.max(1)).max(1);
        while p > 1 && p.checked_pow(d as u32).is_none_or(|v| v > MAX_LATTICE) {
            p -= 1;
        }
        p
    }
}

/// Row-major points of the grid in `[0,1]^d`: the lattice first, then the random points.
pub fn grid_points(d: usize, spec: &GridSpec) -> Vec<f64> {
    let p = spec.lattice_per_axis(d);
    let total = p.pow(d as u32);
    let mut pts = Vec::with_capacity((total + spec.random_points) * d);
    for idx in 0..total {
        let mut rest = idx;
        for _ in 0..d {
            let i = rest % p;
            rest /= p;
            pts.push(if p == 1 { 0.5 } else { i as f64 / (p - 1) as f64 });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..spec.random_points * d {
        pts.push(rng.random::<f64>());
    }
    pts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifferences,
    NotNeeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Holder,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub per_axis: usize,
    pub random_points: usize,
    pub seed: u64,
    /// Whether points of `Ω` were skipped.
    pub excludes_omega: bool,
    pub evaluated: usize,
    pub excluded: usize,
}

/// Closed-form bound next to the measured sup error of one constructed approximant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    pub kind: CertificateKind,
    pub target: String,
    pub profile: Profile,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub beta: f64,
    pub d: usize,
    #[serde(rename = "B0")]
    pub b0: f64,
    pub bound: f64,
    pub measured: f64,
    pub pass: bool,
    pub stats: NetworkStats,
    pub budget: Option<Budget>,
    #[serde(rename = "K")]
    pub k: u64,
    /// Gap width of `Ω` (for the uniform approximant, of its shifted copies).
    pub delta: f64,
    pub shift: Option<f64>,
    pub shift_convention: Option<String>,
    pub grid: GridReport,
    pub derivatives: DerivativeSource,
}

impl ApproxCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

/// `pass ⟺ measured ≤ bound + 1e−9`; a NaN measurement fails.
pub fn passes(measured: f64, bound: f64) -> bool {
    measured <= bound + CERT_SLACK
}

/// `max |net(x) − f(x)|` over row-major `points`; NaN outputs count as infinite error.
pub fn sup_error(net: &Network, target: &HolderTarget, points: &[f64]) -> Result<f64> {
    let d = target.dim();
    if net.input_dim() != d || net.output_dim() != 1 {
        return Err(Error::DimensionMismatch { expected: d, got: net.input_dim() });
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let out = net.evaluate_rows(points)?;
    Ok(points
        .par_chunks(d)
        .zip(out.par_iter())
        .map(|(x, &y)| {
            let e = (y - target.eval(x)).abs();
            if e.is_nan() { f64::INFINITY } else { e }
        })
        .reduce(|| 0.0, f64::max))
}

/// Measured sup error off `Ω` (`omega = Some`) or on the whole grid.
pub fn measure(
    net: &Network,
    target: &HolderTarget,
    omega: Option<&OmegaRegion>,
    grid: &GridSpec,
) -> Result<(f64, GridReport)> {
    let d = target.dim();
    let all = grid_points(d, grid);
    let total = all.len() / d;
    let kept: Vec<f64> = match omega {
        Some(o) => all.chunks(d).filter(|x| !omega_membership(x, o)).flatten().copied().collect(),
        None => all,
    };
    let evaluated = kept.len() / d;
    let measured = sup_error(net, target, &kept)?;
    let report = GridReport {
        per_axis: grid.lattice_per_axis(d),
        random_points: grid.random_points,
        seed: grid.seed,
        excludes_omega: omega.is_some(),
        evaluated,
        excluded: total - evaluated,
    };
    Ok((measured, report))
}
