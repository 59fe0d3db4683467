//! Convergence-rate sweeps over a grid of sample sizes.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{excess_risk_mc, train_model, LearningRate, SizeKnob, TrainConfig};
use crate::bounds::{plan_architecture, rate_exponent, PlanAux, PlanProfile};
use crate::error::{Error, Result};
use crate::net::compose;
use crate::projection::{least_squares, make_projector, ProjectionKind};
use crate::targets::{generate_dataset, Dataset, HolderTarget, NoiseSpec, SupportSpec};

/// Mean excess risk below this level at every `n` marks the fit as degenerate.
pub const DEGENERATE_LEVEL: f64 = 1e-6;

/// A frozen linear projection applied before the trained network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSetup {
    pub kind: ProjectionKind,
    pub d0: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Planner profile; by default chosen from the support kind.
    #[serde(default)]
    pub profile: Option<PlanProfile>,
    #[serde(default)]
    pub plan_aux: PlanAux,
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub learning_rate: LearningRate,
    #[serde(default)]
    pub size: SizeKnob,
    #[serde(default)]
    pub min_steps: usize,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Truncate labels at `c·ln n` when set.
    #[serde(default)]
    pub truncation_c: Option<f64>,
    #[serde(default)]
    pub projection: Option<ProjectionSetup>,
    #[serde(default = "default_mc")]
    pub mc_samples: usize,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

fn default_batch() -> usize {
    64
}

fn default_mc() -> usize {
    20_000
}

fn default_bootstrap() -> usize {
    1000
}

impl SweepConfig {
    pub fn new(epochs: usize, replicates: usize, seed: u64) -> Self {
        SweepConfig {
            profile: None,
            plan_aux: PlanAux::default(),
            epochs,
            batch_size: default_batch(),
            learning_rate: LearningRate::default(),
            size: SizeKnob::default(),
            min_steps: 0,
            replicates,
            seed,
            truncation_c: None,
            projection: None,
            mc_samples: default_mc(),
            bootstrap: default_bootstrap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub n: usize,
    pub replicate: usize,
    /// `None` when training diverged.
    pub excess_risk: Option<f64>,
    pub train_risk: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub diverged: usize,
    /// Planned shape before the size knob.
    pub planned_width: u64,
    pub planned_depth: u64,
    pub width: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub target: String,
    pub beta: f64,
    pub d: usize,
    pub d_eff: usize,
    pub profile: PlanProfile,
    pub projection: Option<ProjectionSetup>,
    pub size: SizeKnob,
    pub n_values: Vec<usize>,
    pub estimates: Vec<PointEstimate>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub target_exponent: f64,
    pub slope_ci: [f64; 2],
    pub degenerate: bool,
    /// Mean excess risk at the largest `n` is below the one at the smallest.
    pub decreasing: bool,
    pub replicates: Vec<ReplicateResult>,
}

/// Seed for one (role, n, replicate) job.
fn job_seed(base: u64, role: u64, n: usize, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(role << 56 ^ (n as u64) << 20 ^ rep as u64);
    rng.random()
}

fn default_profile(support: &SupportSpec) -> PlanProfile {
    match support {
        SupportSpec::Cube { .. } => PlanProfile::RectangleMinSize,
        SupportSpec::ManifoldNeighborhood { .. } => PlanProfile::Manifold,
        SupportSpec::MinkowskiSet { .. } => PlanProfile::Minkowski,
    }
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let sd = if v.len() > 1 { (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt() } else { 0.0 };
    (m, sd)
}

fn log_slope(ns: &[usize], means: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    least_squares(&xs, &ys)
}

/// Trains at every `n`, estimates the excess risk and fits `log(mean error) ~ log n`.
pub fn rate_sweep(
    target: &HolderTarget,
    support: &SupportSpec,
    noise: &NoiseSpec,
    n_values: &[usize],
    config: &SweepConfig,
) -> Result<RateReport> {
    if n_values.len() < 4 {
        return Err(Error::invalid("a rate sweep needs at least 4 sample sizes"));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) || n_values[0] == 0 {
        return Err(Error::invalid("sample sizes must be positive and strictly increasing"));
    }
    if config.replicates < 3 {
        return Err(Error::invalid("a rate sweep needs at least 3 replicates"));
    }
    if config.mc_samples == 0 || config.bootstrap == 0 {
        return Err(Error::invalid("mc_samples and bootstrap must be positive"));
    }
    if let Some(c) = config.truncation_c {
        if !(c > 0.0) {
            return Err(Error::invalid("truncation constant must be positive"));
        }
    }
    support.validate()?;
    noise.validate()?;
    let d = support.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: target.dim() });
    }
    let projector = config.projection.map(|p| make_projector(p.kind, d, p.d0, p.seed)).transpose()?;
    let d_eff = projector.as_ref().map_or(d, |p| p.d0);
    let profile = config.profile.unwrap_or_else(|| default_profile(support));
    let beta = target.beta();

    let plans = n_values
        .iter()
        .map(|&n| plan_architecture(beta, d_eff as u32, n as u64, profile, config.plan_aux))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> =
        (0..n_values.len()).flat_map(|i| (0..config.replicates).map(move |r| (i, r))).collect();
    let results: Vec<Result<ReplicateResult>> = jobs
        .par_iter()
        .map(|&(i, rep)| {
            let n = n_values[i];
            let data = generate_dataset(target, support, noise, n, job_seed(config.seed, 1, n, rep))?;
            let train_data = match &projector {
                Some(p) => Dataset { x: p.apply_all(&data.x)?, y: data.y },
                None => data,
            };
            let train = TrainConfig {
                plan: plans[i].clone(),
                epochs: config.epochs,
                batch_size: config.batch_size,
                learning_rate: config.learning_rate,
                seed: job_seed(config.seed, 2, n, rep),
                truncation: config.truncation_c.map(|c| c * (n as f64).ln()),
                replicates: config.replicates,
                size: config.size,
                min_steps: config.min_steps,
            };
            let model = match train_model(&train_data, &train) {
                Ok(m) => m,
                Err(Error::Divergence(_)) => {
                    return Ok(ReplicateResult { n, replicate: rep, excess_risk: None, train_risk: None })
                }
                Err(e) => return Err(e),
            };
            let mut net = model.network();
            if let Some(p) = &projector {
                net = compose(&net, &p.to_network())?;
            }
            let err = excess_risk_mc(&net, target, support, config.mc_samples, job_seed(config.seed, 3, 0, rep))?;
            Ok(ReplicateResult { n, replicate: rep, excess_risk: Some(err), train_risk: Some(model.risk) })
        })
        .collect();
    let replicates = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut estimates = Vec::with_capacity(n_values.len());
    let mut per_n: Vec<Vec<f64>> = Vec::with_capacity(n_values.len());
    for (i, &n) in n_values.iter().enumerate() {
        let rows: Vec<&ReplicateResult> = replicates.iter().filter(|r| r.n == n).collect();
        let ok: Vec<f64> = rows.iter().filter_map(|r| r.excess_risk).collect();
        let diverged = rows.len() - ok.len();
        if 2 * diverged > rows.len() {
            return Err(Error::Divergence(format!("{diverged} of {} replicates diverged at n = {n}", rows.len())));
        }
        let (mean, sd) = mean_sd(&ok);
        let (width, depth) = config.size.apply(&plans[i]);
        estimates.push(PointEstimate {
            n,
            mean,
            sd,
            diverged,
            planned_width: plans[i].width,
            planned_depth: plans[i].depth,
            width,
            depth,
        });
        per_n.push(ok);
    }

    let means: Vec<f64> = estimates.iter().map(|e| e.mean).collect();
    let degenerate = means.iter().all(|&m| m < DEGENERATE_LEVEL) || means.iter().any(|&m| !(m > 0.0));
    let (slope, intercept) = log_slope(n_values, &means);

    let mut rng = ChaCha8Rng::seed_from_u64(job_seed(config.seed, 4, 0, 0));
    let mut boot: Vec<f64> = (0..config.bootstrap)
        .map(|_| {
            let m: Vec<f64> = per_n
                .iter()
                .map(|v| (0..v.len()).map(|_| v[rng.random_range(0..v.len())]).sum::<f64>() / v.len() as f64)
                .collect();
            log_slope(n_values, &m).0
        })
        .filter(|s| s.is_finite())
        .collect();
    boot.sort_by(f64::total_cmp);
    let slope_ci = if boot.is_empty() {
        [f64::NAN, f64::NAN]
    } else {
        let q = |p: f64| boot[((p * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
        [q(0.025), q(0.975)]
    };

    Ok(RateReport {
        target: target.name().to_string(),
        beta,
        d,
        d_eff,
        profile,
        projection: config.projection,
        size: config.size,
        n_values: n_values.to_vec(),
        decreasing: means.last() < means.first(),
        estimates,
        fitted_slope: slope,
        intercept,
        target_exponent: rate_exponent(beta, d_eff as f64),
        slope_ci,
        degenerate,
        replicates,
    })
}

impl RateReport {
    /// `n,replicate,excess_risk` rows; diverged replicates have an empty value.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["n", "replicate", "excess_risk"])?;
        for r in &self.replicates {
            let v = r.excess_risk.map(|e| e.to_string()).unwrap_or_default();
            w.write_record([r.n.to_string(), r.replicate.to_string(), v])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Slope, CI, target exponent and the per-n summary.
    pub fn summary_json(&self) -> String {
        let v = serde_json::json!({
            "target": self.target,
            "beta": self.beta,
            "d": self.d,
            "d_eff": self.d_eff,
            "profile": self.profile,
            "projection": self.projection,
            "size": self.size,
            "fitted_slope": self.fitted_slope,
            "intercept": self.intercept,
            "slope_ci": self.slope_ci,
            "target_exponent": self.target_exponent,
            "degenerate": self.degenerate,
            "decreasing": self.decreasing,
            "estimates": self.estimates,
        });
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    /// Two columns `n mean` for a log-log plot.
    pub fn write_plot_data(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "# n mean_excess_risk")?;
        for e in &self.estimates {
            writeln!(f, "{} {}", e.n, e.mean)?;
        }
        f.flush()?;
        Ok(())
    }

    /// gnuplot script plotting `data_file` with the fitted line.
    pub fn gnuplot_script(&self, data_file: &str) -> String {
        format!(
            "set logscale xy\nset xlabel 'n'\nset ylabel 'excess risk'\nf(x) = exp({c}) * x**({s})\n\
             plot '{data_file}' using 1:2 with linespoints title 'mean excess risk', f(x) title 'slope {s:.3}'\n",
            c = self.intercept,
            s = self.fitted_slope,
        )
    }
}
