//! Architecture planners: width and depth that attain the optimal regression rate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::budget::ilog2_ceil;
use super::smoothness;
use crate::error::{Error, Result};
use crate::net::NetworkStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanProfile {
    DeepFixedWidth,
    WideFixedDepth,
    DeepAndWide,
    RectangleMinSize,
    Manifold,
    Minkowski,
}

impl PlanProfile {
    pub const ALL: [PlanProfile; 6] = [
        PlanProfile::DeepFixedWidth,
        PlanProfile::WideFixedDepth,
        PlanProfile::DeepAndWide,
        PlanProfile::RectangleMinSize,
        PlanProfile::Manifold,
        PlanProfile::Minkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlanProfile::DeepFixedWidth => "deep_fixed_width",
            PlanProfile::WideFixedDepth => "wide_fixed_depth",
            PlanProfile::DeepAndWide => "deep_and_wide",
            PlanProfile::RectangleMinSize => "rectangle_min_size",
            PlanProfile::Manifold => "manifold",
            PlanProfile::Minkowski => "minkowski",
        }
    }
}

impl fmt::Display for PlanProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlanProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PlanProfile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown plan profile `{s}`")))
    }
}

/// Optional planner inputs.
///
/// `n_param` is the free `N` of the deep-fixed-width and manifold profiles and
/// `m_param` the free `M` of the wide-fixed-depth profile; both default to 1.
/// Supplying one to a profile that has no such parameter is an error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanAux {
    #[serde(default)]
    pub n_param: Option<u64>,
    #[serde(default)]
    pub m_param: Option<u64>,
    #[serde(default = "default_clip")]
    pub clip_bound: f64,
}

fn default_clip() -> f64 {
    1.0
}

impl Default for PlanAux {
    fn default() -> Self {
        PlanAux { n_param: None, m_param: None, clip_bound: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchitecturePlan {
    #[serde(rename = "W")]
    pub width: u64,
    #[serde(rename = "D")]
    pub depth: u64,
    #[serde(rename = "S_estimate")]
    pub size_estimate: u128,
    #[serde(rename = "U_estimate")]
    pub neuron_estimate: u64,
    #[serde(rename = "B")]
    pub clip_bound: f64,
    pub profile: PlanProfile,
    pub beta: f64,
    pub d_eff: u32,
    pub n: u64,
    pub n_param: Option<u64>,
    pub m_param: Option<u64>,
}

/// Ceiling that treats values within rounding noise of an integer as that integer.
pub(crate) fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn to_count(x: f64, what: &str) -> Result<u64> {
    if (0.0..1.8e19).contains(&x) {
        Ok(x as u64)
    } else {
        Err(Error::invalid(format!("{what} does not fit a 64-bit count")))
    }
}

fn checked(parts: &[u64]) -> Result<u64> {
    parts
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p))
        .ok_or_else(|| Error::invalid("planned architecture overflows a 64-bit count"))
}

/// `⌈t·log₂(8t)⌉` with `t = n^e`.
fn ceil_t_log(n: u64, e: f64) -> Result<u64> {
    let log2_t = e * (n as f64).log2();
    let t = log2_t.exp2();
    to_count(ceil_snapped(t * (3.0 + log2_t)), "n^e·log₂(8n^e)")
}

/// `N⌈log₂8N⌉`.
fn n_log(n: u64) -> Result<u64> {
    let l = n.checked_mul(8).map(ilog2_ceil).ok_or_else(|| Error::invalid("N is too large"))?;
    checked(&[n, u64::from(l)])
}

/// Log-free growth exponent of the network size in `n` for each profile.
pub fn size_exponent(profile: PlanProfile, beta: f64, d_eff: f64) -> f64 {
    let base = d_eff / (d_eff + 2.0 * beta);
    match profile {
        PlanProfile::WideFixedDepth => base,
        PlanProfile::DeepAndWide => 0.75 * base,
        _ => 0.5 * base,
    }
}

/// Relative efficiency of two profiles with the logarithmic factors dropped:
/// `size_exponent(second) / size_exponent(first)`.
pub fn nre_profiles(first: PlanProfile, second: PlanProfile, beta: f64, d_eff: f64) -> Result<f64> {
    smoothness(beta)?;
    if !(d_eff.is_finite() && d_eff >= 1.0) {
        return Err(Error::invalid(format!("d_eff must be at least 1, got {d_eff}")));
    }
    Ok(size_exponent(second, beta, d_eff) / size_exponent(first, beta, d_eff))
}

pub fn plan_architecture(beta: f64, d_eff: u32, n: u64, profile: PlanProfile, aux: PlanAux) -> Result<ArchitecturePlan> {
    let sm = smoothness(beta)?;
    if d_eff == 0 {
        return Err(Error::invalid("d_eff must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("sample size n must be at least 1"));
    }
    if !(aux.clip_bound.is_finite() && aux.clip_bound > 0.0) {
        return Err(Error::invalid(format!("clip bound must be positive, got {}", aux.clip_bound)));
    }
    let uses_n = matches!(profile, PlanProfile::DeepFixedWidth | PlanProfile::Manifold);
    let uses_m = profile == PlanProfile::WideFixedDepth;
    if aux.n_param.is_some() && !uses_n {
        return Err(Error::invalid(format!("profile {profile} takes no N parameter")));
    }
    if aux.m_param.is_some() && !uses_m {
        return Err(Error::invalid(format!("profile {profile} takes no M parameter")));
    }
    if aux.n_param == Some(0) || aux.m_param == Some(0) {
        return Err(Error::invalid("N and M must be at least 1"));
    }

    let s1 = u64::from(sm.s) + 1;
    let d = u64::from(d_eff);
    let dp = d.checked_pow(sm.s + 1).ok_or_else(|| Error::invalid("d^{s+1} overflows"))?;
    let e = f64::from(d_eff) / (2.0 * (f64::from(d_eff) + 2.0 * beta));
    let deep = || -> Result<u64> { checked(&[21, s1, s1, ceil_t_log(n, e)?]) };

    let (n_param, m_param) = (uses_n.then(|| aux.n_param.unwrap_or(1)), uses_m.then(|| aux.m_param.unwrap_or(1)));
    let (width, depth) = match profile {
        PlanProfile::DeepFixedWidth | PlanProfile::Manifold => {
            (checked(&[38, s1, s1, dp, n_log(n_param.expect("set"))?])?, deep()?)
        }
        PlanProfile::WideFixedDepth => {
            let m = m_param.expect("set");
            (checked(&[38, s1, s1, dp, ceil_t_log(n, e)?])?, checked(&[21, s1, s1, n_log(m)?])?)
        }
        PlanProfile::DeepAndWide => {
            let k = to_count(ceil_snapped((e / 2.0 * (n as f64).log2()).exp2()), "n^{d/4(d+2β)}")?.max(1);
            (checked(&[38, s1, s1, dp, n_log(k)?])?, checked(&[21, s1, s1, n_log(k)?])?)
        }
        PlanProfile::RectangleMinSize => (checked(&[114, s1, s1, dp])?, deep()?),
        PlanProfile::Minkowski => {
            let three = 3u64.checked_pow(d_eff).ok_or_else(|| Error::invalid("3^{d0} overflows"))?;
            (checked(&[114, s1, s1, three, dp])?, deep()?)
        }
    };

    let size = {
        let (w, dd, de) = (u128::from(width), u128::from(depth), u128::from(d));
        w * (de + 1) + (w * w + w) * (dd - 1) + w + 1
    };
    debug_assert!(width > 1 << 20 || size == NetworkStats::rectangle_size(d as usize, width as usize, depth as usize) as u128);
    Ok(ArchitecturePlan {
        width,
        depth,
        size_estimate: size,
        neuron_estimate: checked(&[width, depth])?,
        clip_bound: aux.clip_bound,
        profile,
        beta,
        d_eff,
        n,
        n_param,
        m_param,
    })
}
