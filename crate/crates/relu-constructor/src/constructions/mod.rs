//! Explicit constructions: step nets, point fitters, product and monomial nets, the
//! three-input median, and the assembled Hölder approximants with certificates.
//!
//! Every builder comes in two profiles. [`Profile::Simple`] uses whatever shallow
//! realization meets the error contract. [`Profile::PaperBudget`] uses deeper
//! compositions and must fit the width/depth budgets of [`crate::bounds`].

mod certify;
mod fitter;
mod holder;
mod mid;
mod product;
mod step;

pub use certify::{
    grid_points, measure, passes, sup_error, ApproxCertificate, CertificateKind, DerivativeSource, GridReport, GridSpec,
    CERT_SLACK, MAX_LATTICE,
};
pub use fitter::{build_multi_fitter, build_point_fitter};
pub use holder::{
    build_holder_approximant, build_uniform_approximant, holder_grid_k, ApproxOptions, ShiftConvention,
};
pub use mid::build_mid_net;
pub use product::{
    build_monomial_net, build_product_net, build_product_net_with, product_error_bound, ProductParams,
};
pub use step::{build_step_net, build_step_net_k, step_cells};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    #[default]
    #[serde(rename = "simple")]
    Simple,
    #[serde(rename = "paper-budget")]
    PaperBudget,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Simple => "simple",
            Profile::PaperBudget => "paper-budget",
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Profile::Simple),
            "paper-budget" | "paper_budget" => Ok(Profile::PaperBudget),
            _ => Err(Error::invalid(format!("unknown profile `{s}` (expected simple or paper-budget)"))),
        }
    }
}

/// The trifling region: points with a coordinate in some gap `(k/K − δ, k/K)`, `1 ≤ k < K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRegion {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: u64,
    pub delta: f64,
}

impl OmegaRegion {
    pub fn new(d: usize, k: u64, delta: f64) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::invalid(format!("Ω needs d >= 1 and K >= 1 (got d={d}, K={k})")));
        }
        check_delta(k, delta)?;
        Ok(OmegaRegion { d, k, delta })
    }

    /// Upper bound `dKδ` on the Lebesgue measure.
    pub fn measure_bound(&self) -> f64 {
        self.d as f64 * self.k as f64 * self.delta
    }
}

/// `0 < δ ≤ 1/(3K)`, with a relative slack of `1e−12` for rounding in `1/(3K)` itself.
pub(crate) fn check_delta(k: u64, delta: f64) -> Result<()> {
    let max = 1.0 / (3.0 * k as f64);
    if delta.is_finite() && delta > 0.0 && delta <= max * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::invalid(format!("δ = {delta} must lie in (0, 1/(3K)] = (0, {max}] for K = {k}")))
    }
}

pub fn omega_membership(x: &[f64], region: &OmegaRegion) -> bool {
    let kf = region.k as f64;
    x.iter().any(|&xi| {
        // Only the gap just left of the next grid line can contain xi; the floor may be
        // off by one after rounding, so both neighbors are checked.
        let j = (xi * kf).floor();
        [j, j + 1.0].into_iter().any(|k| k >= 1.0 && k <= kf - 1.0 && xi > k / kf - region.delta && xi < k / kf)
    })
}
