//! Step nets `ψ(x) = k` on `[k/K, (k+1)/K − δ]`.

use super::{check_delta, Profile};
use crate::bounds::int_root_floor;
use crate::error::{Error, Result};
use crate::net::builder::{Builder, Lin};
use crate::net::Network;

/// `K = ⌊N^{1/d}⌋²·⌊M^{2/d}⌋`.
pub fn step_cells(n: u64, m: u64, d: u32) -> Result<u64> {
    if n == 0 || m == 0 || d == 0 {
        return Err(Error::invalid(format!("N, M and d must be positive (got N={n}, M={m}, d={d})")));
    }
    let m2 = m.checked_mul(m).ok_or_else(|| Error::invalid("M² overflows"))?;
    let a = int_root_floor(n, d);
    a.checked_mul(a)
        .and_then(|v| v.checked_mul(int_root_floor(m2, d)))
        .ok_or_else(|| Error::invalid("cell count overflows"))
}

/// Step net with `K = ⌊N^{1/d}⌋²⌊M^{2/d}⌋` cells.
///
/// The simple profile is one layer of `2(K−1)` ramp units. The paper-budget profile
/// reads the cell index digit by digit in radix `2⌊N^{1/d}⌋+1`.
pub fn build_step_net(n: u64, m: u64, d: u32, delta: f64, profile: Profile) -> Result<Network> {
    let k = step_cells(n, m, d)?;
    let radix = match profile {
        Profile::Simple => None,
        Profile::PaperBudget => Some(2 * int_root_floor(n, d) + 1),
    };
    build_step_net_k(k, delta, radix)
}

/// Step net for an arbitrary cell count `K`.
///
/// With `radix = Some(J)` the index is extracted in `⌈log_J K⌉` layers of at most
/// `2J` units. Each layer subtracts the cells it has counted from a running
/// position `t ≥ 0` and adds them to an accumulator.
pub fn build_step_net_k(k: u64, delta: f64, radix: Option<u64>) -> Result<Network> {
    if k == 0 {
        return Err(Error::invalid("the cell count K must be positive"));
    }
    check_delta(k, delta)?;
    let mut b = Builder::new(1);
    if k == 1 {
        return b.finish(&[Lin::zero()]);
    }
    let j = match radix {
        None => k,
        Some(j) if j >= 2 => j.min(k),
        Some(j) => return Err(Error::invalid(format!("radix must be at least 2, got {j}"))),
    };
    // Smallest L with J^L ≥ K, and q_1 = J^{L−1}.
    let mut levels = 1u32;
    let mut q = 1u64;
    while q.saturating_mul(j) < k {
        q *= j;
        levels += 1;
    }
    let kf = k as f64;
    let mut t = b.inputs().remove(0);
    let mut acc: Option<Lin> = None;
    for level in 1..=levels {
        let thresholds: Vec<u64> = (1..j).map(|i| i * q).take_while(|&p| p < k).collect();
        let mut forms = Vec::with_capacity(2 * thresholds.len() + 2);
        for &p in &thresholds {
            let z = (t.clone() - Lin::constant(p as f64 / kf)) * (1.0 / delta);
            forms.push(z.clone().shift(1.0));
            forms.push(z);
        }
        let last = level == levels;
        if !last {
            forms.push(t.clone());
            if level == 1 {
                // Pin the last cell to its left end: it has no gap on the right, and
                // lower digits would otherwise see a ramp that belongs past cell K−1.
                forms.push(t.clone().shift(-((k - 1) as f64) / kf));
            }
        }
        if let Some(a) = &acc {
            forms.push(a.clone());
        }
        let units = b.hidden(&forms);
        let ramps = Lin::combine(
            units[..2 * thresholds.len()].chunks(2).flat_map(|u| [(1.0, &u[0]), (-1.0, &u[1])]),
        );
        let mut next = 2 * thresholds.len();
        let qf = q as f64;
        if !last {
            t = units[next].clone() - ramps.clone() * (qf / kf);
            next += 1;
            if level == 1 {
                t = t - units[next].clone();
                next += 1;
            }
        }
        let carried = if acc.is_some() { units[next].clone() } else { Lin::zero() };
        acc = Some(carried + ramps * qf);
        q /= j.max(1);
    }
    b.finish(&[acc.expect("at least one level")])
}
