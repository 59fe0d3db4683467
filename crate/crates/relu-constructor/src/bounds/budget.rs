//! Width/depth budgets quoted for each explicit construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::NetworkStats;

/// Upper limits on hidden width and hidden-layer count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub width: usize,
    pub depth: usize,
}

impl Budget {
    pub fn admits(&self, stats: &NetworkStats) -> bool {
        stats.width <= self.width && stats.depth <= self.depth
    }
}

/// Smallest `k` with `2^k ≥ x` (`x ≥ 1`).
pub fn ilog2_ceil(x: u64) -> u32 {
    assert!(x >= 1, "ilog2_ceil needs x >= 1");
    if x == 1 {
        0
    } else {
        (x - 1).ilog2() + 1
    }
}

/// Largest `q` with `q^k ≤ n`.
pub fn int_root_floor(n: u64, k: u32) -> u64 {
    assert!(k >= 1, "root order must be positive");
    if k == 1 || n <= 1 {
        return n;
    }
    let mut q = (n as f64).powf(1.0 / f64::from(k)).round() as u64;
    let fits = |q: u64| q.checked_pow(k).is_some_and(|p| p <= n);
    while !fits(q) {
        q -= 1;
    }
    while fits(q + 1) {
        q += 1;
    }
    q
}

fn overflow(what: &str) -> Error {
    Error::invalid(format!("{what} budget overflows a 64-bit count"))
}

fn mul(parts: &[u64], what: &str) -> Result<u64> {
    parts.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).ok_or_else(|| overflow(what))
}

fn pos(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        Err(Error::invalid(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

fn budget(width: u64, depth: u64, what: &str) -> Result<Budget> {
    Ok(Budget {
        width: usize::try_from(width).map_err(|_| overflow(what))?,
        depth: usize::try_from(depth).map_err(|_| overflow(what))?,
    })
}

/// Step net: width `4⌊N^{1/d}⌋+3`, depth `4M+5`.
pub fn step_budget(n: u64, m: u64, d: u32) -> Result<Budget> {
    pos("N", n)?;
    pos("M", m)?;
    pos("d", u64::from(d))?;
    let w = mul(&[4, int_root_floor(n, d)], "step")? + 3;
    let depth = mul(&[4, m], "step")? + 5;
    budget(w, depth, "step")
}

/// Point fitter: width `16s(N+1)⌈log₂8N⌉`, depth `5(M+2)⌈log₂4M⌉`.
pub fn point_fitter_budget(n: u64, m: u64, s: u32) -> Result<Budget> {
    pos("N", n)?;
    pos("M", m)?;
    pos("s", u64::from(s))?;
    let ln = u64::from(ilog2_ceil(n.checked_mul(8).ok_or_else(|| overflow("fitter"))?));
    let lm = u64::from(ilog2_ceil(m.checked_mul(4).ok_or_else(|| overflow("fitter"))?));
    let w = mul(&[16, u64::from(s), n + 1, ln], "fitter")?;
    let depth = mul(&[5, m + 2, lm], "fitter")?;
    budget(w, depth, "fitter")
}

/// Product net: width `9N+1`, depth `M`.
pub fn product_budget(n: u64, m: u64) -> Result<Budget> {
    pos("N", n)?;
    pos("M", m)?;
    budget(mul(&[9, n], "product")? + 1, m, "product")
}

/// Monomial of degree `k`: width `9(N+1)+k−1`, depth `7k²M`.
pub fn monomial_budget(k: u32, n: u64, m: u64) -> Result<Budget> {
    pos("k", u64::from(k))?;
    pos("N", n)?;
    pos("M", m)?;
    let k = u64::from(k);
    budget(mul(&[9, n + 1], "monomial")? + k - 1, mul(&[7, k, k, m], "monomial")?, "monomial")
}

/// Approximant off the trifling region: width `38(s+1)²d^{s+1}N⌈log₂8N⌉`,
/// depth `21(s+1)²M⌈log₂8M⌉`.
pub fn holder_budget(s: u32, d: u32, n: u64, m: u64) -> Result<Budget> {
    pos("d", u64::from(d))?;
    pos("N", n)?;
    pos("M", m)?;
    let s1 = u64::from(s) + 1;
    let dp = u64::from(d).checked_pow(s + 1).ok_or_else(|| overflow("approximant"))?;
    let ln = u64::from(ilog2_ceil(n.checked_mul(8).ok_or_else(|| overflow("approximant"))?));
    let lm = u64::from(ilog2_ceil(m.checked_mul(8).ok_or_else(|| overflow("approximant"))?));
    let w = mul(&[38, s1, s1, dp, n, ln], "approximant")?;
    let depth = mul(&[21, s1, s1, m, lm], "approximant")?;
    budget(w, depth, "approximant")
}

/// Uniform approximant: the [`holder_budget`] width times `3^d`, depth plus `2d`.
pub fn uniform_budget(s: u32, d: u32, n: u64, m: u64) -> Result<Budget> {
    let base = holder_budget(s, d, n, m)?;
    let three = 3usize.checked_pow(d).ok_or_else(|| overflow("uniform"))?;
    Ok(Budget {
        width: base.width.checked_mul(three).ok_or_else(|| overflow("uniform"))?,
        depth: base.depth + 2 * d as usize,
    })
}

/// Median of three: width 14, depth 2.
pub fn mid_budget() -> Budget {
    Budget { width: 14, depth: 2 }
}
