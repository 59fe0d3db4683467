//! Point-fitting nets: `φ(i) = ξ_i` at the integers `0..P`, with `0 ≤ φ ≤ 1` everywhere.
//!
//! `φ` is the piecewise-linear interpolant of the values, constant outside `[0, P−1]`,
//! followed by the clamp `σ(g) − σ(g−1)`. Values are reproduced exactly up to rounding.

use super::Profile;
use crate::bounds::point_fitter_budget;
use crate::error::{Error, Result};
use crate::net::builder::{Builder, Lin};
use crate::net::Network;

/// Fits `values` at `i = 0..N²M²−1`.
///
/// The paper-budget profile spreads the breakpoints over as many layers as the
/// budget width requires and fails with [`Error::BudgetExceeded`] if the depth does
/// not fit.
pub fn build_point_fitter(values: &[f64], n: u64, m: u64, s: u32, profile: Profile) -> Result<Network> {
    if n == 0 || m == 0 || s == 0 {
        return Err(Error::invalid(format!("N, M and s must be positive (got N={n}, M={m}, s={s})")));
    }
    let expected = (n as u128 * m as u128).pow(2);
    if values.len() as u128 != expected {
        return Err(Error::invalid(format!("expected N²M² = {expected} values, got {}", values.len())));
    }
    match profile {
        Profile::Simple => build_multi_fitter(&[values.to_vec()], None),
        Profile::PaperBudget => {
            let budget = point_fitter_budget(n, m, s)?;
            let net = build_multi_fitter(&[values.to_vec()], Some(budget.width))?;
            if !budget.admits(&net.stats()) {
                return Err(Error::BudgetExceeded(format!(
                    "point fitter needs depth {} but the budget is {}",
                    net.depth(),
                    budget.depth
                )));
            }
            Ok(net)
        }
    }
}

/// Fits several value vectors of a common length `P` at once; output `j` fits `values[j]`.
///
/// With `width_cap = None` all `P` breakpoint units sit in one layer. With a cap,
/// layers hold `cap − 2 − 2T` breakpoints each and pass the input and the `T`
/// partial sums along in `±` pairs.
pub fn build_multi_fitter(values: &[Vec<f64>], width_cap: Option<usize>) -> Result<Network> {
    let t = values.len();
    let p = values.first().map_or(0, Vec::len);
    if t == 0 || p == 0 {
        return Err(Error::invalid("point fitter needs at least one nonempty value vector"));
    }
    for v in values {
        if v.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: v.len() });
        }
        if let Some(bad) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(format!("fitted values must lie in [0, 1], got {bad}")));
        }
    }
    // Slope change at each breakpoint i = 0..P−1.
    let kinks: Vec<Vec<f64>> = values
        .iter()
        .map(|v| {
            let slope = |i: usize| if i == 0 || i >= p { 0.0 } else { v[i] - v[i - 1] };
            (0..p).map(|i| slope(i + 1) - slope(i)).collect()
        })
        .collect();
    let chunk = match width_cap {
        None => p,
        Some(cap) => {
            if cap < 2 * t + 3 {
                return Err(Error::BudgetExceeded(format!("width {cap} cannot carry {t} fitted outputs")));
            }
            cap - 2 - 2 * t
        }
    };
    let mut b = Builder::new(1);
    let mut x = b.inputs().remove(0);
    let mut acc: Option<Vec<Lin>> = None;
    let starts: Vec<usize> = (0..p).step_by(chunk.max(1)).collect();
    let single = p == 1;
    for (ci, &start) in starts.iter().enumerate() {
        let end = (start + chunk).min(p);
        let last = ci + 1 == starts.len();
        // P = 1 needs no breakpoint at all.
        let idx: Vec<usize> = if single { Vec::new() } else { (start..end).collect() };
        let mut forms: Vec<Lin> = idx.iter().map(|&i| x.clone().shift(-(i as f64))).collect();
        if !last {
            forms.push(x.clone());
            forms.push(-x.clone());
        }
        if let Some(a) = &acc {
            for f in a {
                forms.push(f.clone());
                forms.push(-f.clone());
            }
        }
        if forms.is_empty() {
            break;
        }
        let units = b.hidden(&forms);
        let mut next = idx.len();
        if !last {
            x = units[next].clone() - units[next + 1].clone();
            next += 2;
        }
        let prev: Vec<Lin> = match &acc {
            Some(_) => (0..t).map(|j| units[next + 2 * j].clone() - units[next + 2 * j + 1].clone()).collect(),
            None => values.iter().map(|v| Lin::constant(v[0])).collect(),
        };
        acc = Some(
            prev.into_iter()
                .zip(&kinks)
                .map(|(a, k)| a + Lin::combine(idx.iter().enumerate().map(|(u, &i)| (k[i], &units[u]))))
                .collect(),
        );
    }
    let g = acc.unwrap_or_else(|| values.iter().map(|v| Lin::constant(v[0])).collect());
    let clamp: Vec<Lin> = g.iter().flat_map(|f| [f.clone(), f.clone().shift(-1.0)]).collect();
    let units = b.hidden(&clamp);
    let outs: Vec<Lin> = (0..t).map(|j| units[2 * j].clone() - units[2 * j + 1].clone()).collect();
    b.finish(&outs)
}
