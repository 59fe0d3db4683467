//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use relu_constructor::bounds::{holder_bound, nre as nre_sizes, nre_profiles, plan_architecture, uniform_bound, PlanAux, PlanProfile};
use relu_constructor::constructions::{
    build_holder_approximant, build_uniform_approximant, measure, passes, ApproxCertificate, ApproxOptions,
    CertificateKind, GridSpec, OmegaRegion, Profile, ShiftConvention,
};
use relu_constructor::erm::{rate_sweep, SweepConfig};
use relu_constructor::net::{deserialize, serialize};
use relu_constructor::projection::{distortion_audit, estimate_minkowski_dim, make_projector, random_pairs, ProjectionKind};
use relu_constructor::targets::{builtin_target, generate_dataset, sample_x, Dataset, DatasetMeta, HolderTarget, NoiseSpec, SupportSpec};
use serde::{Deserialize, Serialize};

use crate::config::{invalid, load_value, parse, pick, require, resolve_seed, CliError};
use crate::table::{sci, Table};
use crate::{
    ApproxBuildArgs, ApproxVerifyArgs, DatasetGenArgs, MinkowskiArgs, NreArgs, PlanArgs, ProjectArgs, SweepRateArgs,
};

pub enum Status {
    Ok,
    CertificationFailed,
}

pub struct Context {
    config: Option<serde_json::Value>,
    seed_flag: Option<u64>,
}

impl Context {
    pub fn new(config: Option<PathBuf>, seed_flag: Option<u64>) -> Result<Self, CliError> {
        let config = config.map(|p| load_value(&p)).transpose()?;
        Ok(Context { config, seed_flag })
    }

    fn config<T: serde::de::DeserializeOwned + Default>(&self) -> Result<T, CliError> {
        match &self.config {
            Some(v) => parse(v.clone()),
            None => Ok(T::default()),
        }
    }

    fn seed(&self, config: Option<u64>) -> Result<u64, CliError> {
        resolve_seed(self.seed_flag, config)
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display())))
}

fn target_from(name: &str, d: usize, beta: f64, b0: f64) -> Result<HolderTarget, CliError> {
    Ok(builtin_target(name.parse()?, d, beta, b0)?)
}

/// Builtin target by name; `d` may come from the support.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TargetConfig {
    name: String,
    beta: f64,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default = "one", alias = "B0")]
    b0: f64,
}

fn one() -> f64 {
    1.0
}

impl TargetConfig {
    fn build(&self, support_dim: usize) -> Result<HolderTarget, CliError> {
        if let Some(d) = self.d {
            if d != support_dim {
                return Err(invalid(format!("target dimension {d} does not match the support dimension {support_dim}")));
            }
        }
        target_from(&self.name, support_dim, self.beta, self.b0)
    }
}

// ---------------------------------------------------------------- approx-build

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseConfig {
    target: Option<String>,
    beta: Option<f64>,
    d: Option<usize>,
    #[serde(alias = "B0")]
    b0: Option<f64>,
    #[serde(alias = "N")]
    n: Option<u64>,
    #[serde(alias = "M")]
    m: Option<u64>,
    kind: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    per_axis: Option<usize>,
    random_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxBuildConfig {
    target: Option<String>,
    beta: Option<f64>,
    d: Option<usize>,
    #[serde(alias = "B0")]
    b0: Option<f64>,
    #[serde(alias = "N")]
    n: Option<u64>,
    #[serde(alias = "M")]
    m: Option<u64>,
    kind: Option<String>,
    profile: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    shift: Option<ShiftConvention>,
    delta: Option<f64>,
    finite_differences: Option<bool>,
    grid: Option<GridConfig>,
    cases: Option<Vec<CaseConfig>>,
}

fn parse_kind(s: &str) -> Result<CertificateKind, CliError> {
    match s {
        "holder" => Ok(CertificateKind::Holder),
        "uniform" => Ok(CertificateKind::Uniform),
        _ => Err(invalid(format!("unknown certificate kind `{s}` (expected holder or uniform)"))),
    }
}

fn kind_name(k: CertificateKind) -> &'static str {
    match k {
        CertificateKind::Holder => "holder",
        CertificateKind::Uniform => "uniform",
    }
}

pub fn certificate_table(certs: &[ApproxCertificate]) -> String {
    let mut t = Table::new(&["case", "kind", "target", "beta", "d", "N", "M", "K", "W", "D", "bound", "measured", "pass"]);
    for (i, c) in certs.iter().enumerate() {
        t.row(vec![
            i.to_string(),
            kind_name(c.kind).into(),
            c.target.clone(),
            c.beta.to_string(),
            c.d.to_string(),
            c.n.to_string(),
            c.m.to_string(),
            c.k.to_string(),
            c.stats.width.to_string(),
            c.stats.depth.to_string(),
            sci(c.bound),
            sci(c.measured),
            if c.pass { "yes" } else { "NO" }.into(),
        ]);
    }
    t.render()
}

pub fn approx_build(ctx: &Context, a: ApproxBuildArgs) -> Result<Status, CliError> {
    let cfg: ApproxBuildConfig = ctx.config()?;
    let flag_case = CaseConfig { target: a.target, beta: a.beta, d: a.d, b0: a.b0, n: a.n, m: a.m, kind: a.kind };
    let cases: Vec<CaseConfig> = match cfg.cases {
        Some(cases) => {
            let any_flag = flag_case.target.is_some()
                || flag_case.beta.is_some()
                || flag_case.d.is_some()
                || flag_case.b0.is_some()
                || flag_case.n.is_some()
                || flag_case.m.is_some()
                || flag_case.kind.is_some();
            let any_top = cfg.target.is_some()
                || cfg.beta.is_some()
                || cfg.d.is_some()
                || cfg.b0.is_some()
                || cfg.n.is_some()
                || cfg.m.is_some()
                || cfg.kind.is_some();
            if any_flag || any_top {
                return Err(invalid("`cases` cannot be combined with single-case flags or keys"));
            }
            if cases.is_empty() {
                return Err(invalid("`cases` is empty"));
            }
            cases
        }
        None => vec![CaseConfig {
            target: pick("target", flag_case.target, cfg.target)?,
            beta: pick("beta", flag_case.beta, cfg.beta)?,
            d: pick("d", flag_case.d, cfg.d)?,
            b0: pick("b0", flag_case.b0, cfg.b0)?,
            n: pick("n", flag_case.n, cfg.n)?,
            m: pick("m", flag_case.m, cfg.m)?,
            kind: pick("kind", flag_case.kind, cfg.kind)?,
        }],
    };
    let profile: Profile = match pick("profile", a.profile, cfg.profile)? {
        Some(p) => p.parse()?,
        None => Profile::Simple,
    };
    let out = pick("out", a.out, cfg.out)?.unwrap_or_else(|| PathBuf::from("approx-out"));
    let grid_cfg = cfg.grid.unwrap_or_default();
    let grid = GridSpec {
        per_axis: grid_cfg.per_axis,
        random_points: grid_cfg.random_points.unwrap_or(GridSpec::default().random_points),
        seed: ctx.seed(cfg.seed)?,
    };
    let opts = ApproxOptions {
        profile,
        delta: cfg.delta,
        shift: cfg.shift.unwrap_or(ShiftConvention::MaxGap),
        finite_differences: cfg.finite_differences.unwrap_or(false),
        grid,
    };

    // validate every case before building anything
    let mut plans = Vec::with_capacity(cases.len());
    for (i, c) in cases.iter().enumerate() {
        let name = require(&format!("cases[{i}].target"), c.target.clone())?;
        let beta = require(&format!("cases[{i}].beta"), c.beta)?;
        let d = require(&format!("cases[{i}].d"), c.d)?;
        let n = require(&format!("cases[{i}].n"), c.n)?;
        let m = require(&format!("cases[{i}].m"), c.m)?;
        let kind = parse_kind(c.kind.as_deref().unwrap_or("holder"))?;
        let target = target_from(&name, d, beta, c.b0.unwrap_or(1.0))?;
        plans.push((target, n, m, kind));
    }

    let mut certs = Vec::with_capacity(plans.len());
    for (i, (target, n, m, kind)) in plans.iter().enumerate() {
        let (net, cert) = match kind {
            CertificateKind::Holder => build_holder_approximant(target, *n, *m, &opts)?,
            CertificateKind::Uniform => build_uniform_approximant(target, *n, *m, &opts)?,
        };
        write(&out.join(format!("case_{i:03}_network.json")), &serialize(&net))?;
        write(&out.join(format!("case_{i:03}_certificate.json")), (cert.to_json() + "\n").as_bytes())?;
        certs.push(cert);
    }
    let table = certificate_table(&certs);
    write(&out.join("certificates.txt"), table.as_bytes())?;
    print!("{table}");
    Ok(if certs.iter().all(|c| c.pass) { Status::Ok } else { Status::CertificationFailed })
}

// ---------------------------------------------------------------- approx-verify

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxVerifyConfig {
    network: Option<PathBuf>,
    certificate: Option<PathBuf>,
}

pub fn approx_verify(ctx: &Context, a: ApproxVerifyArgs) -> Result<Status, CliError> {
    let cfg: ApproxVerifyConfig = ctx.config()?;
    let net_path = require("network", pick("network", a.network, cfg.network)?)?;
    let cert_path = require("certificate", pick("certificate", a.certificate, cfg.certificate)?)?;
    let net = deserialize(&fs::read(&net_path).map_err(|e| invalid(format!("cannot read {}: {e}", net_path.display())))?)?;
    let text = fs::read_to_string(&cert_path).map_err(|e| invalid(format!("cannot read {}: {e}", cert_path.display())))?;
    let cert: ApproxCertificate = serde_json::from_str(&text).map_err(|e| invalid(format!("certificate: {e}")))?;

    let mut problems = Vec::new();
    let bound = match cert.kind {
        CertificateKind::Holder => holder_bound(cert.beta, cert.d, cert.b0, cert.n, cert.m)?,
        CertificateKind::Uniform => uniform_bound(cert.beta, cert.d, cert.b0, cert.n, cert.m)?,
    };
    if bound.to_bits() != cert.bound.to_bits() {
        problems.push(format!("bound field {} does not match the recomputed bound {bound}", cert.bound));
    }
    let target = target_from(&cert.target, cert.d, cert.beta, cert.b0)?;
    let grid = GridSpec { per_axis: Some(cert.grid.per_axis), random_points: cert.grid.random_points, seed: cert.grid.seed };
    let omega = if cert.grid.excludes_omega { Some(OmegaRegion::new(cert.d, cert.k, cert.delta)?) } else { None };
    let (measured, report) = measure(&net, &target, omega.as_ref(), &grid)?;
    if measured.to_bits() != cert.measured.to_bits() {
        problems.push(format!("measured field {} does not match the re-measured error {measured}", cert.measured));
    }
    if report.evaluated != cert.grid.evaluated {
        problems.push(format!("grid evaluated {} points, certificate says {}", report.evaluated, cert.grid.evaluated));
    }
    let pass = passes(measured, bound);
    if pass != cert.pass {
        problems.push(format!("pass field {} does not match the recomputed verdict {pass}", cert.pass));
    }
    if net.stats() != cert.stats {
        problems.push("network shape does not match the certificate".into());
    }
    let mut t = Table::new(&["field", "certificate", "recomputed"]);
    t.row(vec!["bound".into(), sci(cert.bound), sci(bound)]);
    t.row(vec!["measured".into(), sci(cert.measured), sci(measured)]);
    t.row(vec!["pass".into(), cert.pass.to_string(), pass.to_string()]);
    print!("{}", t.render());
    for p in &problems {
        eprintln!("mismatch: {p}");
    }
    Ok(if problems.is_empty() && pass { Status::Ok } else { Status::CertificationFailed })
}

// ---------------------------------------------------------------- sweep-rate

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRateConfig {
    target: TargetConfig,
    support: SupportSpec,
    #[serde(default = "no_noise")]
    noise: NoiseSpec,
    n_values: Vec<usize>,
    sweep: serde_json::Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    out: Option<PathBuf>,
}

fn no_noise() -> NoiseSpec {
    NoiseSpec::None
}

pub fn sweep_rate(ctx: &Context, a: SweepRateArgs) -> Result<Status, CliError> {
    let raw = ctx.config.clone().ok_or_else(|| invalid("sweep-rate needs --config"))?;
    let cfg: SweepRateConfig = parse(raw)?;
    if cfg.sweep.get("seed").is_some() {
        return Err(invalid("set the sweep seed with the top-level `seed` key or --seed"));
    }
    let mut sweep: SweepConfig = parse(cfg.sweep)?;
    sweep.seed = ctx.seed(cfg.seed)?;
    let out = pick("out", a.out, cfg.out)?.unwrap_or_else(|| PathBuf::from("sweep-out"));
    let target = cfg.target.build(cfg.support.dim())?;
    let report = rate_sweep(&target, &cfg.support, &cfg.noise, &cfg.n_values, &sweep)?;
    fs::create_dir_all(&out)?;
    report.write_csv(&out.join("rate.csv"))?;
    write(&out.join("summary.json"), (report.summary_json() + "\n").as_bytes())?;
    report.write_plot_data(&out.join("rate.dat"))?;
    write(&out.join("rate.gp"), report.gnuplot_script("rate.dat").as_bytes())?;

    let mut t = Table::new(&["n", "mean", "sd", "W", "D", "diverged"]);
    for e in &report.estimates {
        t.row(vec![e.n.to_string(), sci(e.mean), sci(e.sd), e.width.to_string(), e.depth.to_string(), e.diverged.to_string()]);
    }
    print!("{}", t.render());
    println!(
        "slope {:.4} (95% CI {:.4} .. {:.4}), target exponent {:.4}{}",
        report.fitted_slope,
        report.slope_ci[0],
        report.slope_ci[1],
        report.target_exponent,
        if report.degenerate { ", degenerate fit" } else { "" }
    );
    Ok(Status::Ok)
}

// ---------------------------------------------------------------- plan / nre

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanConfig {
    beta: Option<f64>,
    d: Option<u32>,
    n: Option<u64>,
    profile: Option<String>,
    n_param: Option<u64>,
    m_param: Option<u64>,
    clip: Option<f64>,
    out: Option<PathBuf>,
}

pub fn plan(ctx: &Context, a: PlanArgs) -> Result<Status, CliError> {
    let cfg: PlanConfig = ctx.config()?;
    let beta = require("beta", pick("beta", a.beta, cfg.beta)?)?;
    let d = require("d", pick("d", a.d, cfg.d)?)?;
    let n = require("n", pick("n", a.n, cfg.n)?)?;
    let profile: PlanProfile = require("profile", pick("profile", a.profile, cfg.profile)?)?.parse()?;
    let aux = PlanAux {
        n_param: pick("n_param", a.n_param, cfg.n_param)?,
        m_param: pick("m_param", a.m_param, cfg.m_param)?,
        clip_bound: pick("clip", a.clip, cfg.clip)?.unwrap_or(1.0),
    };
    let p = plan_architecture(beta, d, n, profile, aux)?;
    let mut t = Table::new(&["profile", "beta", "d_eff", "n", "W", "D", "S_estimate", "U_estimate"]);
    t.row(vec![
        p.profile.to_string(),
        p.beta.to_string(),
        p.d_eff.to_string(),
        p.n.to_string(),
        p.width.to_string(),
        p.depth.to_string(),
        p.size_estimate.to_string(),
        p.neuron_estimate.to_string(),
    ]);
    print!("{}", t.render());
    let json = serde_json::to_string_pretty(&p).expect("plans serialize") + "\n";
    if let Some(out) = pick("out", a.out, cfg.out)? {
        write(&out.join("plan.json"), json.as_bytes())?;
    }
    Ok(Status::Ok)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NreConfig {
    sizes: Option<Vec<f64>>,
    profiles: Option<Vec<String>>,
    beta: Option<f64>,
    d: Option<f64>,
}

/// `Debug` formatting keeps a trailing `.0` on integral values.
fn number(x: f64) -> String {
    format!("{x:?}")
}

pub fn nre(ctx: &Context, a: NreArgs) -> Result<Status, CliError> {
    let cfg: NreConfig = ctx.config()?;
    let sizes = pick("sizes", (!a.sizes.is_empty()).then_some(a.sizes), cfg.sizes)?;
    let profiles = pick("profiles", a.profiles, cfg.profiles)?;
    let value = match (sizes, profiles) {
        (Some(_), Some(_)) => return Err(invalid("give either two sizes or two profiles, not both")),
        (Some(s), None) => {
            if s.len() != 2 {
                return Err(invalid(format!("nre takes exactly two sizes, got {}", s.len())));
            }
            nre_sizes(s[0], s[1])?
        }
        (None, Some(p)) => {
            if p.len() != 2 {
                return Err(invalid("--profiles takes exactly two names"));
            }
            let beta = require("beta", pick("beta", a.beta, cfg.beta)?)?;
            let d = require("d", pick("d", a.d, cfg.d)?)?;
            nre_profiles(p[0].parse()?, p[1].parse()?, beta, d)?
        }
        (None, None) => return Err(invalid("nre needs two sizes or --profiles")),
    };
    println!("{}", number(value));
    Ok(Status::Ok)
}

// ---------------------------------------------------------------- project / minkowski

/// Points from a CSV file (columns `x1..xd`, an optional `y` is dropped).
fn read_points(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let headers = r.headers().map_err(|e| invalid(e.to_string()))?.clone();
    let keep: Vec<usize> = headers.iter().enumerate().filter(|(_, h)| *h != "y").map(|(i, _)| i).collect();
    let mut pts = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let x = keep
            .iter()
            .map(|&i| rec[i].trim().parse::<f64>().map_err(|_| invalid(format!("{}: `{}` is not a number", path.display(), &rec[i]))))
            .collect::<Result<Vec<f64>, _>>()?;
        pts.push(x);
    }
    if pts.is_empty() {
        return Err(invalid(format!("{} has no points", path.display())));
    }
    Ok(pts)
}

/// Points from `input`, or sampled from `support`.
fn points_from(
    input: Option<PathBuf>,
    support: Option<SupportSpec>,
    count: Option<usize>,
    seed: u64,
) -> Result<Option<Vec<Vec<f64>>>, CliError> {
    match (input, support) {
        (Some(_), Some(_)) => Err(invalid("give either `input` or `support`, not both")),
        (Some(p), None) => {
            if count.is_some() {
                return Err(invalid("`points` only applies to a sampled support"));
            }
            Ok(Some(read_points(&p)?))
        }
        (None, Some(s)) => Ok(Some(sample_x(&s, count.unwrap_or(2000), seed)?)),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectConfig {
    kind: Option<ProjectionKind>,
    d: Option<usize>,
    d0: Option<usize>,
    seed: Option<u64>,
    input: Option<PathBuf>,
    support: Option<SupportSpec>,
    points: Option<usize>,
    pairs: Option<usize>,
    out: Option<PathBuf>,
}

pub fn project(ctx: &Context, a: ProjectArgs) -> Result<Status, CliError> {
    let cfg: ProjectConfig = ctx.config()?;
    let kind_flag = a.kind.map(|k| k.parse::<ProjectionKind>()).transpose()?;
    let kind = pick("kind", kind_flag, cfg.kind)?.unwrap_or(ProjectionKind::OrthoScaled);
    let seed = ctx.seed(cfg.seed)?;
    let points = points_from(pick("input", a.input, cfg.input)?, cfg.support, cfg.points, seed)?;
    let d_given = pick("d", a.d, cfg.d)?;
    let d = match (&points, d_given) {
        (Some(p), Some(d)) if p[0].len() != d => {
            return Err(invalid(format!("points have dimension {}, but d = {d}", p[0].len())))
        }
        (Some(p), _) => p[0].len(),
        (None, Some(d)) => d,
        (None, None) => return Err(invalid("missing `d` (or points to take it from)")),
    };
    let d0 = require("d0", pick("d0", a.d0, cfg.d0)?)?;
    let proj = make_projector(kind, d, d0, seed)?;
    let out = pick("out", a.out, cfg.out)?.unwrap_or_else(|| PathBuf::from("project-out"));
    write(&out.join("projector.json"), &serialize(&proj.to_network()))?;
    let mut t = Table::new(&["kind", "d", "d0", "seed", "gram_deviation", "min_ratio", "max_ratio", "pairs"]);
    let mut row = vec![
        kind.to_string(),
        d.to_string(),
        d0.to_string(),
        seed.to_string(),
        sci(proj.gram_deviation()),
    ];
    if let Some(pts) = points {
        let pairs = random_pairs(&pts, pick("pairs", a.pairs, cfg.pairs)?.unwrap_or(10_000), seed);
        let rep = distortion_audit(&proj, &pairs)?;
        write(&out.join("distortion.json"), (serde_json::to_string_pretty(&rep).expect("serializes") + "\n").as_bytes())?;
        row.extend([format!("{:.6}", rep.min_ratio), format!("{:.6}", rep.max_ratio), rep.pairs_used.to_string()]);
    } else {
        row.extend(["-".into(), "-".into(), "0".into()]);
    }
    t.row(row);
    print!("{}", t.render());
    Ok(Status::Ok)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MinkowskiConfig {
    input: Option<PathBuf>,
    support: Option<SupportSpec>,
    points: Option<usize>,
    seed: Option<u64>,
    radii: Option<Vec<f64>>,
    out: Option<PathBuf>,
}

pub fn minkowski(ctx: &Context, a: MinkowskiArgs) -> Result<Status, CliError> {
    let cfg: MinkowskiConfig = ctx.config()?;
    let seed = ctx.seed(cfg.seed)?;
    let points = points_from(pick("input", a.input, cfg.input)?, cfg.support, cfg.points, seed)?
        .ok_or_else(|| invalid("minkowski needs `input` or `support`"))?;
    let radii = pick("radii", a.radii, cfg.radii)?.unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
    let est = estimate_minkowski_dim(&points, &radii)?;
    let mut t = Table::new(&["radius", "count"]);
    for (r, c) in &est.counts {
        t.row(vec![r.to_string(), c.to_string()]);
    }
    print!("{}", t.render());
    println!("slope {:.4}", est.slope);
    if let Some(out) = pick("out", a.out, cfg.out)? {
        fs::create_dir_all(&out)?;
        est.write_csv(&out.join("covering_counts.csv"))?;
        let summary = serde_json::json!({ "slope": est.slope, "intercept": est.intercept, "points": points.len() });
        write(&out.join("minkowski.json"), (serde_json::to_string_pretty(&summary).expect("serializes") + "\n").as_bytes())?;
    }
    Ok(Status::Ok)
}

// ---------------------------------------------------------------- dataset-gen

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetGenConfig {
    target: Option<String>,
    beta: Option<f64>,
    d: Option<usize>,
    #[serde(alias = "B0")]
    b0: Option<f64>,
    n: Option<usize>,
    support: Option<SupportSpec>,
    noise: Option<NoiseSpec>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

pub fn dataset_gen(ctx: &Context, a: DatasetGenArgs) -> Result<Status, CliError> {
    let cfg: DatasetGenConfig = ctx.config()?;
    let name = require("target", pick("target", a.target, cfg.target)?)?;
    let beta = require("beta", pick("beta", a.beta, cfg.beta)?)?;
    let b0 = pick("b0", a.b0, cfg.b0)?.unwrap_or(1.0);
    let n = require("n", pick("n", a.n, cfg.n)?)?;
    let d_given = pick("d", a.d, cfg.d)?;
    let support = match (cfg.support, d_given) {
        (Some(s), Some(d)) if s.dim() != d => {
            return Err(invalid(format!("support dimension {} does not match d = {d}", s.dim())))
        }
        (Some(s), _) => s,
        (None, Some(d)) => SupportSpec::cube(d),
        (None, None) => return Err(invalid("missing `d` (or a support to take it from)")),
    };
    let noise = cfg.noise.unwrap_or(NoiseSpec::None);
    let seed = ctx.seed(cfg.seed)?;
    let out = require("out", pick("out", a.out, cfg.out)?)?;
    let target = target_from(&name, support.dim(), beta, b0)?;
    let data: Dataset = generate_dataset(&target, &support, &noise, n, seed)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let meta = DatasetMeta { target: name, beta, b0, support, noise, n, seed };
    data.write_csv(&out, &meta)?;
    println!("wrote {} rows to {}", data.len(), out.display());
    Ok(Status::Ok)
}
