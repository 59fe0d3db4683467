//! The median of three inputs, exactly, in two hidden layers of width 14.

use crate::net::builder::{Builder, Lin};
use crate::net::Network;

/// Units for `max(a, b) = ½(σ(a+b) − σ(−a−b) + σ(a−b) + σ(b−a))`.
fn max_forms(a: &Lin, b: &Lin) -> [Lin; 4] {
    let s = a.clone() + b.clone();
    let t = a.clone() - b.clone();
    [s.clone(), -s, t.clone(), -t]
}

fn max_value(u: &[Lin]) -> Lin {
    (u[0].clone() - u[1].clone() + u[2].clone() + u[3].clone()) * 0.5
}

/// `mid(a,b,c) = (a+b+c) − max(a,b,c) − min(a,b,c)`.
///
/// Layer one: `max(a,b)` (4), `±c` for the max (2), `max(−a,−b)` (4), `±c` for the
/// min (2) and `±(a+b+c)` (2). Layer two: the two outer maxima (4 each) and the
/// carried sum (2). No unit is shared between the max and min branches.
pub fn build_mid_net() -> Network {
    let mut b = Builder::new(3);
    let x = b.inputs();
    let (a, bb, c) = (&x[0], &x[1], &x[2]);
    let sum = a.clone() + bb.clone() + c.clone();
    let mut forms: Vec<Lin> = Vec::with_capacity(14);
    forms.extend(max_forms(a, bb));
    forms.extend([c.clone(), -c.clone()]);
    forms.extend(max_forms(&-a.clone(), &-bb.clone()));
    forms.extend([c.clone(), -c.clone()]);
    forms.extend([sum.clone(), -sum]);
    let u = b.hidden(&forms);
    let hi_ab = max_value(&u[0..4]);
    let c1 = u[4].clone() - u[5].clone();
    let neg_lo_ab = max_value(&u[6..10]);
    let c2 = u[10].clone() - u[11].clone();
    let sum = u[12].clone() - u[13].clone();
    let mut forms: Vec<Lin> = Vec::with_capacity(10);
    forms.extend(max_forms(&hi_ab, &c1));
    forms.extend(max_forms(&neg_lo_ab, &-c2));
    forms.extend([sum.clone(), -sum]);
    let v = b.hidden(&forms);
    let max3 = max_value(&v[0..4]);
    let neg_min3 = max_value(&v[4..8]);
    let sum = v[8].clone() - v[9].clone();
    b.finish(&[sum - max3 + neg_min3]).expect("fixed shapes are consistent")
}
