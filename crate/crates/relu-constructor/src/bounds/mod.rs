//! Closed-form error bounds, complexity calculators and architecture planners.
//!
//! Everything here is plain arithmetic on the smoothness `β`, the dimension and the
//! network size parameters. Constants the theory leaves unspecified (the `C₀` of the
//! stochastic term, the pseudo-dimension bracket constants) are caller inputs.

mod budget;
mod plan;

pub use budget::{
    holder_budget, ilog2_ceil, int_root_floor, mid_budget, monomial_budget, point_fitter_budget, product_budget,
    step_budget, uniform_budget, Budget,
};
pub use plan::{nre_profiles, plan_architecture, size_exponent, ArchitecturePlan, PlanAux, PlanProfile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `β = s + r` with `s` the largest integer strictly below `β` and `r ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub beta: f64,
    pub s: u32,
    pub r: f64,
}

/// Largest order of factorial the constructions support.
pub const MAX_ORDER: u32 = 8;

pub fn smoothness(beta: f64) -> Result<Smoothness> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("smoothness β must be positive and finite, got {beta}")));
    }
    let s = beta.ceil() - 1.0;
    if s > f64::from(u32::MAX) {
        return Err(Error::invalid(format!("smoothness β = {beta} is too large")));
    }
    Ok(Smoothness { beta, s: s as u32, r: beta - s })
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_counts(d: usize, n: u64, m: u64) -> Result<()> {
    if d == 0 || n == 0 || m == 0 {
        return Err(Error::invalid(format!("d, N and M must be at least 1 (got d={d}, N={n}, M={m})")));
    }
    Ok(())
}

/// Sup-norm bound off the trifling region for the constructed approximant:
/// `18 B₀ (s+1)² d^{s+(β∨1)/2} (NM)^{−2β/d}`.
pub fn holder_bound(beta: f64, d: usize, b0: f64, n: u64, m: u64) -> Result<f64> {
    let sm = smoothness(beta)?;
    check_positive("B0", b0)?;
    check_counts(d, n, m)?;
    let s1 = f64::from(sm.s) + 1.0;
    let d = d as f64;
    let nm = n as f64 * m as f64;
    Ok(18.0 * b0 * s1 * s1 * d.powf(f64::from(sm.s) + beta.max(1.0) / 2.0) * nm.powf(-2.0 * beta / d))
}

/// Sup-norm bound on the whole cube for the mid-smoothed approximant, `19/18` of [`holder_bound`].
pub fn uniform_bound(beta: f64, d: usize, b0: f64, n: u64, m: u64) -> Result<f64> {
    Ok(holder_bound(beta, d, b0, n, m)? / 18.0 * 19.0)
}

/// Approximation term of the excess-risk bound:
/// `324 B₀² (s+1)⁴ d^{2s+β∨1} (NM)^{−4β/d}`, the square of [`holder_bound`].
pub fn approx_bound_term(beta: f64, d: usize, b0: f64, n: u64, m: u64) -> Result<f64> {
    let sm = smoothness(beta)?;
    check_positive("B0", b0)?;
    check_counts(d, n, m)?;
    let s1 = f64::from(sm.s) + 1.0;
    let d = d as f64;
    let nm = n as f64 * m as f64;
    Ok(324.0
        * b0
        * b0
        * s1.powi(4)
        * d.powf(2.0 * f64::from(sm.s) + beta.max(1.0))
        * nm.powf(-4.0 * beta / d))
}

/// `C₀ B² (ln n)³ S D ln S / n`.
pub fn stochastic_bound(b: f64, n: f64, s: f64, d: f64, c0: f64) -> Result<f64> {
    if !(n.is_finite() && n >= 2.0) {
        return Err(Error::invalid(format!("sample size must be at least 2, got {n}")));
    }
    check_positive("B", b)?;
    check_positive("S", s)?;
    check_positive("D", d)?;
    if !(c0.is_finite() && c0 >= 0.0) {
        return Err(Error::invalid(format!("C0 must be nonnegative, got {c0}")));
    }
    Ok(c0 * b * b * n.ln().powi(3) * s * d * s.ln() / n)
}

/// `(c·S·D·ln(S/D), C·S·D·ln S)`.
pub fn pdim_bracket(s: f64, d: f64, c_lo: f64, c_hi: f64) -> Result<(f64, f64)> {
    check_positive("c", c_lo)?;
    check_positive("C", c_hi)?;
    if !(d.is_finite() && d >= 1.0) {
        return Err(Error::invalid(format!("depth must be at least 1, got {d}")));
    }
    if !(s.is_finite() && s > d) {
        return Err(Error::invalid(format!("size S = {s} must exceed depth D = {d} (log(S/D) ≤ 0)")));
    }
    Ok((c_lo * s * d * (s / d).ln(), c_hi * s * d * s.ln()))
}

/// Natural log of the covering-number bound `(4eBn²/Pdim)^Pdim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringLogBound {
    pub value: f64,
    /// `false` when `pdim > 2n`, outside the regime where the bound is proved.
    pub in_regime: bool,
}

pub fn covering_log_bound(b: f64, n: f64, pdim: f64) -> Result<CoveringLogBound> {
    if !(b.is_finite() && b >= 1.0) {
        return Err(Error::invalid(format!("B must be at least 1, got {b}")));
    }
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::invalid(format!("n must be at least 1, got {n}")));
    }
    if !(pdim.is_finite() && pdim >= 1.0) {
        return Err(Error::invalid(format!("pseudo-dimension must be at least 1, got {pdim}")));
    }
    let log_base = (4.0 * b).ln() + 1.0 + 2.0 * n.ln() - pdim.ln();
    Ok(CoveringLogBound { value: pdim * log_base, in_regime: pdim <= 2.0 * n })
}

/// Excess-risk split `total = stochastic + 2·approximation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub stochastic: f64,
    pub approximation: f64,
    pub total: f64,
    pub stochastic_share: f64,
    pub approximation_share: f64,
}

/// Shares are fractions of `total`; when both terms vanish they are reported as one half each.
pub fn decomposition_report(stochastic: f64, approximation: f64) -> Result<DecompositionReport> {
    for (name, v) in [("stochastic term", stochastic), ("approximation term", approximation)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("{name} must be nonnegative and finite, got {v}")));
        }
    }
    let total = stochastic + 2.0 * approximation;
    let (ss, sa) = if total > 0.0 { (stochastic / total, 2.0 * approximation / total) } else { (0.5, 0.5) };
    Ok(DecompositionReport { stochastic, approximation, total, stochastic_share: ss, approximation_share: sa })
}

/// Network relative efficiency `ln S₂ / ln S₁`.
pub fn nre(s1: f64, s2: f64) -> Result<f64> {
    if !(s1.is_finite() && s1 > 1.0 && s2.is_finite() && s2 > 1.0) {
        return Err(Error::invalid(format!("sizes must exceed 1, got S1={s1}, S2={s2}")));
    }
    Ok(s2.ln() / s1.ln())
}

/// Optimal-rate exponent `−2β/(d+2β)` of the excess risk in `n`.
pub fn rate_exponent(beta: f64, d_eff: f64) -> f64 {
    -2.0 * beta / (d_eff + 2.0 * beta)
}
