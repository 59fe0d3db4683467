//! Covariate supports: the cube, neighborhoods of embedded curves and tori, and
//! low-dimensional sets with known Minkowski dimension.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupportSpec {
    Cube { d: usize },
    /// `ρ`-neighborhood of a circle (`intrinsic_dim = 1`) or torus (`2`).
    ManifoldNeighborhood { d: usize, intrinsic_dim: usize, embedding_seed: u64, rho: f64 },
    MinkowskiSet { d: usize, set: MinkowskiSet },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum MinkowskiSet {
    /// Segment through the cube center in a seeded direction.
    Segment { seed: u64 },
    /// `[0.1, 0.9]^k` in the first `k` coordinates, the rest fixed at ½.
    Flat { k: usize },
    /// Product of `factors` middle-third Cantor sets, the rest fixed at ½.
    Cantor { factors: usize },
}

impl SupportSpec {
    pub fn cube(d: usize) -> Self {
        SupportSpec::Cube { d }
    }

    pub fn circle(d: usize, embedding_seed: u64, rho: f64) -> Self {
        SupportSpec::ManifoldNeighborhood { d, intrinsic_dim: 1, embedding_seed, rho }
    }

    pub fn dim(&self) -> usize {
        match *self {
            SupportSpec::Cube { d } | SupportSpec::ManifoldNeighborhood { d, .. } | SupportSpec::MinkowskiSet { d, .. } => d,
        }
    }

    /// Dimension of the underlying set (ignoring a manifold's `ρ` thickening).
    pub fn intrinsic_dim(&self) -> f64 {
        match self {
            SupportSpec::Cube { d } => *d as f64,
            SupportSpec::ManifoldNeighborhood { intrinsic_dim, .. } => *intrinsic_dim as f64,
            SupportSpec::MinkowskiSet { set, .. } => match set {
                MinkowskiSet::Segment { .. } => 1.0,
                MinkowskiSet::Flat { k } => *k as f64,
                MinkowskiSet::Cantor { factors } => *factors as f64 * 2f64.ln() / 3f64.ln(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("support dimension must be positive"));
        }
        match self {
            SupportSpec::Cube { .. } => Ok(()),
            SupportSpec::ManifoldNeighborhood { intrinsic_dim, rho, .. } => {
                if !(rho.is_finite() && *rho >= 0.0 && *rho < 1.0) {
                    return Err(Error::invalid(format!("neighborhood radius must lie in [0, 1), got {rho}")));
                }
                if !matches!(intrinsic_dim, 1 | 2) {
                    return Err(Error::invalid(format!("intrinsic dimension must be 1 or 2, got {intrinsic_dim}")));
                }
                if *intrinsic_dim >= d {
                    return Err(Error::invalid(format!(
                        "intrinsic dimension {intrinsic_dim} must be below the ambient dimension {d}"
                    )));
                }
                if *intrinsic_dim == 2 && d < 4 {
                    return Err(Error::invalid(format!("the torus embedding needs d >= 4, got {d}")));
                }
                Ok(())
            }
            SupportSpec::MinkowskiSet { set, .. } => match *set {
                MinkowskiSet::Segment { .. } => Ok(()),
                MinkowskiSet::Flat { k } | MinkowskiSet::Cantor { factors: k } if k == 0 || k > d => {
                    Err(Error::invalid(format!("set dimension parameter {k} must lie in 1..={d}")))
                }
                _ => Ok(()),
            },
        }
    }
}

/// Smooth closed embedding `[0, 2π)^{d_M} → [0.1, 0.9]^d`.
///
/// Coordinate `j` is `0.5 + 0.4 cos(⟨f_j, θ⟩ + φ_j)` with integer frequency vector `f_j`.
/// The leading coordinates are `cos θ_i, sin θ_i` pairs so the map is injective.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    freqs: Vec<Vec<f64>>,
    phases: Vec<f64>,
}

impl Embedding {
    pub fn new(d: usize, intrinsic_dim: usize, seed: u64) -> Result<Self> {
        SupportSpec::ManifoldNeighborhood { d, intrinsic_dim, embedding_seed: seed, rho: 0.0 }.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut freqs = Vec::with_capacity(d);
        let mut phases = Vec::with_capacity(d);
        for i in 0..intrinsic_dim {
            let mut f = vec![0.0; intrinsic_dim];
            f[i] = 1.0;
            freqs.push(f.clone());
            phases.push(0.0);
            freqs.push(f);
            phases.push(-PI / 2.0);
        }
        while freqs.len() < d {
            let f: Vec<f64> = (0..intrinsic_dim).map(|_| f64::from(rng.random_range(0..=3u8))).collect();
            let f = if f.iter().all(|&v| v == 0.0) { vec![1.0; intrinsic_dim] } else { f };
            freqs.push(f);
            phases.push(rng.random_range(0.0..TAU));
        }
        Ok(Embedding { freqs, phases })
    }

    pub fn ambient_dim(&self) -> usize {
        self.freqs.len()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.freqs[0].len()
    }

    fn arg(&self, j: usize, theta: &[f64]) -> f64 {
        self.freqs[j].iter().zip(theta).map(|(f, t)| f * t).sum::<f64>() + self.phases[j]
    }

    pub fn map(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.ambient_dim()).map(|j| 0.5 + 0.4 * self.arg(j, theta).cos()).collect()
    }

    /// Euclidean distance from `x` to the embedded manifold: coarse parameter grid
    /// followed by Gauss–Newton refinement of the best few candidates.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let dm = self.intrinsic_dim();
        let per_axis: usize = if dm == 1 { 2048 } else { 96 };
        let mut cands: Vec<(f64, Vec<f64>)> = Vec::new();
        let total = per_axis.pow(dm as u32);
        let mut theta = vec![0.0; dm];
        for idx in 0..total {
            let mut rest = idx;
            for t in theta.iter_mut() {
                *t = (rest % per_axis) as f64 * TAU / per_axis as f64;
                rest /= per_axis;
            }
            let dist = self.sq_dist(x, &theta);
            if cands.len() < 4 || dist < cands[3].0 {
                cands.push((dist, theta.clone()));
                cands.sort_by(|a, b| a.0.total_cmp(&b.0));
                cands.truncate(4);
            }
        }
        cands.into_iter().map(|(_, t)| self.refine(x, t)).fold(f64::INFINITY, f64::min).sqrt()
    }

    fn sq_dist(&self, x: &[f64], theta: &[f64]) -> f64 {
        (0..self.ambient_dim()).map(|j| (0.5 + 0.4 * self.arg(j, theta).cos() - x[j]).powi(2)).sum()
    }

    fn refine(&self, x: &[f64], mut theta: Vec<f64>) -> f64 {
        let dm = self.intrinsic_dim();
        let mut best = self.sq_dist(x, &theta);
        for _ in 0..60 {
            // Gauss–Newton normal equations JᵀJ δ = −Jᵀr, at most 2×2.
            let mut jtj = [[0.0; 2]; 2];
            let mut jtr = [0.0; 2];
            for j in 0..self.ambient_dim() {
                let a = self.arg(j, &theta);
                let res = 0.5 + 0.4 * a.cos() - x[j];
                let g = -0.4 * a.sin();
                for p in 0..dm {
                    let jp = g * self.freqs[j][p];
                    jtr[p] += jp * res;
                    for q in 0..dm {
                        jtj[p][q] += jp * g * self.freqs[j][q];
                    }
                }
            }
            let step: Vec<f64> = if dm == 1 {
                if jtj[0][0] <= 0.0 {
                    break;
                }
                vec![-jtr[0] / jtj[0][0]]
            } else {
                let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
                if det.abs() < 1e-300 {
                    break;
                }
                vec![
                    -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det,
                    -(jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det,
                ]
            };
            let mut t = 1.0;
            let mut moved = false;
            while t > 1e-6 {
                let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, b)| a + t * b).collect();
                let v = self.sq_dist(x, &trial);
                if v < best {
                    best = v;
                    theta = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        best
    }
}

/// Draws `n` points from the support. Deterministic in `(spec, n, seed)`.
pub fn sample_x(spec: &SupportSpec, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim();
    let out = match spec {
        SupportSpec::Cube { .. } => (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect(),
        SupportSpec::ManifoldNeighborhood { intrinsic_dim, embedding_seed, rho, .. } => {
            let emb = Embedding::new(d, *intrinsic_dim, *embedding_seed)?;
            (0..n)
                .map(|_| {
                    let theta: Vec<f64> = (0..*intrinsic_dim).map(|_| rng.random_range(0.0..TAU)).collect();
                    let mut x = emb.map(&theta);
                    if *rho > 0.0 {
                        let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                        let norm = dir.iter().map(|v: &f64| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                        let len = rho * rng.random::<f64>();
                        for (xi, di) in x.iter_mut().zip(&dir) {
                            // Clamping onto the cube cannot move a point further from the manifold.
                            *xi = (*xi + len * di / norm).clamp(0.0, 1.0);
                        }
                    }
                    x
                })
                .collect()
        }
        SupportSpec::MinkowskiSet { set, .. } => match *set {
            MinkowskiSet::Segment { seed: dir_seed } => {
                let (center, half) = segment_geometry(d, dir_seed);
                (0..n)
                    .map(|_| {
                        let t = rng.random_range(-1.0..=1.0);
                        center.iter().zip(&half).map(|(c, h)| c + t * h).collect()
                    })
                    .collect()
            }
            MinkowskiSet::Flat { k } => (0..n)
                .map(|_| (0..d).map(|i| if i < k { 0.1 + 0.8 * rng.random::<f64>() } else { 0.5 }).collect())
                .collect(),
            MinkowskiSet::Cantor { factors } => (0..n)
                .map(|_| {
                    (0..d)
                        .map(|i| {
                            if i >= factors {
                                return 0.5;
                            }
                            // 34 ternary digits in {0, 2} reach below f64 resolution on [0, 1].
                            let mut v = 0.0;
                            let mut scale = 1.0 / 3.0;
                            for _ in 0..34 {
                                if rng.random::<bool>() {
                                    v += 2.0 * scale;
                                }
                                scale /= 3.0;
                            }
                            v
                        })
                        .collect()
                })
                .collect(),
        },
    };
    Ok(out)
}

/// Center ½ and half-length vector of the seeded segment; endpoints stay in `[0.1, 0.9]^d`.
fn segment_geometry(d: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let max = u.iter().fold(0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    for v in u.iter_mut() {
        *v *= 0.4 / max;
    }
    (vec![0.5; d], u)
}

/// Distance from `x` to the support's underlying set (for manifolds, to the
/// embedded manifold itself). Cantor sets are not supported.
pub fn distance_to_support(spec: &SupportSpec, x: &[f64]) -> Result<f64> {
    spec.validate()?;
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: x.len() });
    }
    match spec {
        SupportSpec::Cube { .. } => {
            Ok(x.iter().map(|&v| (v - v.clamp(0.0, 1.0)).powi(2)).sum::<f64>().sqrt())
        }
        SupportSpec::ManifoldNeighborhood { d, intrinsic_dim, embedding_seed, .. } => {
            Ok(Embedding::new(*d, *intrinsic_dim, *embedding_seed)?.distance(x))
        }
        SupportSpec::MinkowskiSet { d, set } => match *set {
            MinkowskiSet::Segment { seed } => {
                let (c, h) = segment_geometry(*d, seed);
                let hh: f64 = h.iter().map(|v| v * v).sum();
                let t = (x.iter().zip(&c).zip(&h).map(|((xi, ci), hi)| (xi - ci) * hi).sum::<f64>() / hh).clamp(-1.0, 1.0);
                Ok(x.iter().zip(&c).zip(&h).map(|((xi, ci), hi)| (xi - ci - t * hi).powi(2)).sum::<f64>().sqrt())
            }
            MinkowskiSet::Flat { k } => Ok(x
                .iter()
                .enumerate()
                .map(|(i, &v)| if i < k { (v - v.clamp(0.1, 0.9)).powi(2) } else { (v - 0.5).powi(2) })
                .sum::<f64>()
                .sqrt()),
            MinkowskiSet::Cantor { .. } => Err(Error::invalid("no distance oracle for Cantor sets")),
        },
    }
}
