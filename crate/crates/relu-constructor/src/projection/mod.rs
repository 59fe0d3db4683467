//! Random linear projections, distortion audits and box-counting dimension estimates.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Layer, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionKind {
    /// Independent signs `±1/√d₀`.
    RademacherScaled,
    /// Orthonormal rows scaled by `√(d/d₀)`, so `AAᵀ = (d/d₀) I`.
    OrthoScaled,
}

impl std::str::FromStr for ProjectionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher_scaled" | "rademacher" => Ok(ProjectionKind::RademacherScaled),
            "ortho_scaled" | "ortho" => Ok(ProjectionKind::OrthoScaled),
            _ => Err(Error::invalid(format!("unknown projection kind `{s}`"))),
        }
    }
}

impl std::fmt::Display for ProjectionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProjectionKind::RademacherScaled => "rademacher_scaled",
            ProjectionKind::OrthoScaled => "ortho_scaled",
        })
    }
}

/// A `d₀ × d` matrix acting as `x ↦ Ax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMap {
    pub kind: ProjectionKind,
    /// `None` when the map was read back from a network file.
    pub seed: Option<u64>,
    pub d: usize,
    pub d0: usize,
    /// Row-major, `d0 * d` entries.
    pub matrix: Vec<f64>,
}

pub fn make_projector(kind: ProjectionKind, d: usize, d0: usize, seed: u64) -> Result<ProjectionMap> {
    if d0 == 0 || d0 > d {
        return Err(Error::invalid(format!("projected dimension must satisfy 1 <= d0 <= d, got d0={d0}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix = match kind {
        ProjectionKind::RademacherScaled => {
            let v = 1.0 / (d0 as f64).sqrt();
            (0..d0 * d).map(|_| if rng.random::<bool>() { v } else { -v }).collect()
        }
        ProjectionKind::OrthoScaled => {
            let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d0);
            while rows.len() < d0 {
                let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                // Modified Gram–Schmidt, applied twice for orthogonality at rounding level.
                for _ in 0..2 {
                    for r in &rows {
                        let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                        for (vi, ri) in v.iter_mut().zip(r) {
                            *vi -= dot * ri;
                        }
                    }
                }
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    continue;
                }
                rows.push(v.into_iter().map(|a| a / norm).collect());
            }
            let scale = (d as f64 / d0 as f64).sqrt();
            rows.into_iter().flatten().map(|a| a * scale).collect()
        }
    };
    Ok(ProjectionMap { kind, seed: Some(seed), d, d0, matrix })
}

impl ProjectionMap {
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(self.matrix.chunks(self.d).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn apply_all(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.apply(x)).collect()
    }

    /// `max |AAᵀ − (d/d₀)I|` over all entries.
    pub fn gram_deviation(&self) -> f64 {
        let target = self.d as f64 / self.d0 as f64;
        let rows: Vec<&[f64]> = self.matrix.chunks(self.d).collect();
        let mut worst = 0f64;
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate() {
                let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                let want = if i == j { target } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    /// The map as a network with no hidden layer.
    pub fn to_network(&self) -> Network {
        Network::new(self.d, vec![Layer::new(self.d0, self.d, self.matrix.clone(), vec![0.0; self.d0]).expect("shape")], None)
            .expect("single linear layer")
    }

    /// Reads back a map written with [`ProjectionMap::to_network`]. The kind is
    /// recognized from the entries; the seed is not recoverable.
    pub fn from_network(net: &Network) -> Result<Self> {
        if net.depth() != 0 || net.layers()[0].bias().iter().any(|&b| b != 0.0) {
            return Err(Error::invalid("a projection must be a single linear layer without bias"));
        }
        let layer = &net.layers()[0];
        let (d0, d) = (layer.rows(), layer.cols());
        if d0 == 0 || d0 > d {
            return Err(Error::invalid(format!("projection shape {d0}×{d} needs 1 <= d0 <= d")));
        }
        let v = 1.0 / (d0 as f64).sqrt();
        let kind = if layer.weights().iter().all(|w| w.abs() == v) {
            ProjectionKind::RademacherScaled
        } else {
            ProjectionKind::OrthoScaled
        };
        Ok(ProjectionMap { kind, seed: None, d, d0, matrix: layer.weights().to_vec() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pairs_used: usize,
    /// Coincident pairs, which have no ratio.
    pub skipped: usize,
}

impl DistortionReport {
    pub fn spread(&self) -> f64 {
        self.max_ratio - self.min_ratio
    }
}

/// Extremes of `‖A(x−y)‖²/‖x−y‖²` over the pairs.
pub fn distortion_audit(proj: &ProjectionMap, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<DistortionReport> {
    let ratios: Vec<Option<f64>> = pairs
        .par_iter()
        .map(|(x, y)| {
            if x.len() != proj.d || y.len() != proj.d {
                return Err(Error::DimensionMismatch { expected: proj.d, got: x.len().max(y.len()) });
            }
            let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let den: f64 = diff.iter().map(|v| v * v).sum();
            if den == 0.0 {
                return Ok(None);
            }
            let num: f64 = proj.apply(&diff)?.iter().map(|v| v * v).sum();
            Ok(Some(num / den))
        })
        .collect::<Result<_>>()?;
    let used: Vec<f64> = ratios.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::invalid("every pair is coincident; no distortion ratio is defined"));
    }
    Ok(DistortionReport {
        min_ratio: used.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: used.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        pairs_used: used.len(),
        skipped: ratios.len() - used.len(),
    })
}

/// `count` pairs drawn uniformly (with replacement) from `points`.
pub fn random_pairs(points: &[Vec<f64>], count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if points.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let i = rng.random_range(0..points.len());
            let j = rng.random_range(0..points.len());
            (points[i].clone(), points[j].clone())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// `(ε, N(ε))` in the order the radii were given.
    pub counts: Vec<(f64, usize)>,
}

impl MinkowskiEstimate {
    /// CSV with header `radius,count`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["radius", "count"])?;
        for (r, c) in &self.counts {
            w.write_record([format!("{r:?}"), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Size of a greedy `ε`-net: a point becomes a center unless it lies within `ε` of
/// an existing center. The centers are `ε`-separated and cover every point.
pub fn greedy_net_size(points: &[Vec<f64>], eps: f64) -> usize {
    let eps2 = eps * eps;
    let mut centers: Vec<&[f64]> = Vec::new();
    for p in points {
        let covered = centers.iter().any(|c| c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= eps2);
        if !covered {
            centers.push(p);
        }
    }
    centers.len()
}

/// Box-counting slope of `ln N(ε)` against `ln(1/ε)` over strictly decreasing radii.
///
/// A net for a smaller radius also covers at every larger radius, so each count is
/// reported as the minimum over itself and all smaller radii; the counts are then
/// non-increasing in `ε`.
pub fn estimate_minkowski_dim(points: &[Vec<f64>], radii: &[f64]) -> Result<MinkowskiEstimate> {
    if radii.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 radii, got {}", radii.len())));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("radii must be positive and strictly decreasing"));
    }
    if points.is_empty() {
        return Err(Error::invalid("need at least one point"));
    }
    let raw: Vec<usize> = radii.par_iter().map(|&r| greedy_net_size(points, r)).collect();
    let mut counts = raw.clone();
    for i in (0..counts.len() - 1).rev() {
        counts[i] = counts[i].min(counts[i + 1]);
    }
    let xs: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(MinkowskiEstimate { slope, intercept, counts: radii.iter().copied().zip(counts).collect() })
}

/// Ordinary least-squares line `y ≈ a·x + b`, returned as `(a, b)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// `d₀ = ⌈c·d_M·ln(d/δ)/δ²⌉`; the constant `c` is left to the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct D0Selection {
    pub raw: f64,
    /// `min(raw, d)`, at least 1.
    pub d0: usize,
    pub clamped: bool,
}

pub fn select_d0(intrinsic_dim: f64, d: usize, delta: f64, c: f64) -> Result<D0Selection> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("distortion δ must lie in (0, 1), got {delta}")));
    }
    if !(c.is_finite() && c > 0.0 && intrinsic_dim.is_finite() && intrinsic_dim > 0.0) || d == 0 {
        return Err(Error::invalid("c, the intrinsic dimension and d must be positive"));
    }
    let raw = (c * intrinsic_dim * (d as f64 / delta).ln() / (delta * delta)).ceil();
    let d0 = if raw >= d as f64 { d } else { (raw as usize).max(1) };
    Ok(D0Selection { raw, d0, clamped: raw > d as f64 })
}
