//! Multi-indices `α ∈ ℕ₀^d` and exact factorials.

use crate::bounds::MAX_ORDER;
use crate::error::{Error, Result};

/// All `α` with `‖α‖₁ ≤ max_order`, grouped by order and lexicographically
/// descending within an order (`(1,0) < (0,1)` in this listing).
pub fn multi_indices(d: usize, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for order in 0..=max_order {
        let mut cur = vec![0u32; d];
        fill(&mut cur, 0, order, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        fill(cur, pos + 1, left - v, out);
    }
    cur[pos] = 0;
}

pub fn order(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

/// `α! = Π α_i!`, exact for orders up to [`MAX_ORDER`].
pub fn factorial(alpha: &[u32]) -> Result<u64> {
    if order(alpha) > MAX_ORDER {
        return Err(Error::invalid(format!("multi-index order {} exceeds the supported {MAX_ORDER}", order(alpha))));
    }
    Ok(alpha.iter().map(|&a| (1..=u64::from(a)).product::<u64>()).product())
}

/// Number of multi-indices of order at most `s` in `d` variables, `C(d+s, s)`.
pub fn count(d: usize, s: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=u128::from(s) {
        c = c * (d as u128 + i) / i;
    }
    c as usize
}

/// `x^α`.
pub fn monomial(alpha: &[u32], x: &[f64]) -> f64 {
    alpha.iter().zip(x).map(|(&a, &v)| v.powi(a as i32)).product()
}
