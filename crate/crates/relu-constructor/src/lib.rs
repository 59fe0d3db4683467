//! Explicit ReLU network constructions with certified sup-norm bounds, architecture
//! planners derived from nonparametric regression rates, and desk-scale experiments.
//!
//! Modules:
//! - [`net`]: dense ReLU networks, composition, parallel stacking, clipping, JSON I/O.
//! - [`constructions`]: step nets, point fitters, product and monomial nets, and the
//!   certified Hölder approximants.
//! - [`targets`]: builtin Hölder targets, covariate supports, noise and datasets.
//! - [`projection`]: random projections, distortion audits, box-counting dimension.
//! - [`bounds`]: closed-form error bounds, budgets and architecture planners.
//! - [`erm`]: MLP training by empirical risk minimization and rate sweeps.
//!
//! The guide under `book/` walks through each module.

extern crate self as relu_constructor;

pub mod error;
pub mod bounds;
pub mod constructions;
pub mod erm;
pub mod multiindex;
pub mod net;
pub mod projection;
pub mod targets;

pub use error::{Error, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/approximants.md")]
    mod approximants {}
    #[doc = include_str!("../../../book/src/planning.md")]
    mod planning {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
