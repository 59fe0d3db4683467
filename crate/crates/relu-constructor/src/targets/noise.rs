//! Additive noise models; both non-trivial kinds are sub-exponential.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    None,
    /// `N(0, scale²)`.
    Gaussian { scale: f64 },
    /// Laplace with density `exp(−|t|/scale)/(2·scale)`, variance `2·scale²`.
    Laplace { scale: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian { scale } | NoiseSpec::Laplace { scale } => {
                if scale.is_finite() && scale >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("noise scale must be nonnegative and finite, got {scale}")))
                }
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { scale } => scale * scale,
            NoiseSpec::Laplace { scale } => 2.0 * scale * scale,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { scale } => {
                Normal::new(0.0, scale).expect("validated scale").sample(rng)
            }
            NoiseSpec::Laplace { scale } => {
                // Inverse CDF on u ∈ (−½, ½).
                let u: f64 = rng.random::<f64>() - 0.5;
                -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
            }
        }
    }
}
