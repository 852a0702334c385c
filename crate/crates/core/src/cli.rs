//! The `hitrun` experiment runner: subcommands, JSON configuration, and
//! CSV/JSON outputs.
//!
//! Every command reads an optional JSON config (unknown keys are rejected),
//! applies `--seed`, writes `resolved_config.json` plus its own outputs into
//! `--out`, and exits with 0 on success, 1 on a runtime failure and 2 on a
//! configuration error.

use crate::chains::{run_chain, ChainConfig, ChainKind, KernelGrid};
use crate::diagnostics::{
    dirichlet_halfspace, estimate_f_u, f_u_lower_bound, k_r_mass, mixing_curve, s_conductance, warm_start, MixingSpec,
    PartitionSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{cap_bound, cap_fraction, in_k_r, ConvexBody, KrClass};
use crate::localization::{
    box_axis_mass, default_step, lipschitz_check_1d, run_sl_path, sample_rho, sl_step,
    variance_supermartingale_check, Grid1D, InnerBudget, SLState, SlPathConfig,
};
use crate::logconcave1d::{self, Density1D};
use crate::rng::{stream, STREAM_DERIVATION};
use crate::stats::{mean_var, top_covariance_eigen};
use crate::targets::Target;
use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(name = "hitrun", version, about = "Hit-and-run sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads for replica-parallel commands.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run one chain and write its trace.
    Sample,
    /// Run the verification checks and write a JSON report.
    Verify,
    /// Simulate stochastic localization paths.
    Sl,
    /// Measure marginal TV along independent replicas.
    Mix,
    /// Estimate the s-conductance of a halfspace partition.
    Conductance,
    /// Tabulate the one-dimensional logconcave checks.
    Logconcave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Cube { dim: usize, half_width: f64 },
    Simplex { dim: usize, scale: f64 },
    Hpolytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Ellipsoid { center: Vec<f64>, shape: Vec<Vec<f64>> },
}

impl Default for BodySpec {
    fn default() -> Self {
        BodySpec::Cube { dim: 2, half_width: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HintsSpec {
    pub r_inscribed: Option<f64>,
    pub r_circum: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    #[default]
    Uniform,
    TruncatedGaussian { beta: Vec<f64>, m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKindSpec {
    HitAndRun,
    BallWalk,
    ExactResample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSpec {
    pub kind: ChainKindSpec,
    /// Ball-walk radius; ignored by other kernels.
    pub delta: f64,
    pub lazy: bool,
    pub max_chord_retries: u32,
    pub n_steps: u64,
    pub thin: u64,
    /// Start point; the body's interior point when omitted.
    pub init: Option<Vec<f64>>,
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec {
            kind: ChainKindSpec::HitAndRun,
            delta: 0.1,
            lazy: false,
            max_chord_retries: crate::chains::DEFAULT_MAX_CHORD_RETRIES,
            n_steps: 1000,
            thin: 1,
            init: None,
        }
    }
}

impl ChainSpec {
    pub fn config(&self) -> ChainConfig {
        let kind = match self.kind {
            ChainKindSpec::HitAndRun => ChainKind::HitAndRun,
            ChainKindSpec::BallWalk => ChainKind::BallWalk { delta: self.delta },
            ChainKindSpec::ExactResample => ChainKind::ExactResample,
        };
        ChainConfig { kind, lazy: self.lazy, max_chord_retries: self.max_chord_retries }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridShape {
    Gaussian,
    Uniform,
    Laplace,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OneDSpec {
    pub omega0: GridShape,
    pub n_cells: usize,
    pub sigma2: f64,
    pub alpha: f64,
    pub n_paths: usize,
    pub n_steps: usize,
}

impl Default for OneDSpec {
    fn default() -> Self {
        OneDSpec { omega0: GridShape::Uniform, n_cells: 4096, sigma2: 1.0, alpha: 4.0, n_paths: 200, n_steps: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlSpec {
    /// Euler step; `min(1/64, T/256)` with `T` the last checkpoint when
    /// omitted.
    pub h: Option<f64>,
    pub checkpoints: Vec<f64>,
    pub n_paths: usize,
    pub inner_samples: usize,
    pub inner_burn_in: usize,
    pub checkpoint_samples: usize,
    pub checkpoint_thin: usize,
    /// Tracked event `{x : a·x ≤ b}`; `a = e₁` when omitted.
    pub event_normal: Option<Vec<f64>>,
    pub event_offset: f64,
    pub one_d: Option<OneDSpec>,
}

impl Default for SlSpec {
    fn default() -> Self {
        SlSpec {
            h: None,
            checkpoints: vec![1.0, 2.0, 4.0],
            n_paths: 10,
            inner_samples: 256,
            inner_burn_in: 64,
            checkpoint_samples: 2000,
            checkpoint_thin: 2,
            event_normal: None,
            event_offset: 0.0,
            one_d: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixSpec {
    /// Warmness of the initial distribution.
    pub warm_m: f64,
    /// Direction of the warm-start cut; `e₁` when omitted.
    pub warm_normal: Option<Vec<f64>>,
    pub checkpoints: Vec<u64>,
    pub n_replicas: usize,
    pub n_bins: usize,
    pub epsilon: f64,
}

impl Default for MixSpec {
    fn default() -> Self {
        MixSpec { warm_m: 2.0, warm_normal: None, checkpoints: vec![10, 100], n_replicas: 2000, n_bins: 20, epsilon: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConductanceSpec {
    /// Partition normal; `e₁` when omitted.
    pub normal: Option<Vec<f64>>,
    pub offset: f64,
    pub s: f64,
    pub n_samples: usize,
}

impl Default for ConductanceSpec {
    fn default() -> Self {
        ConductanceSpec { normal: None, offset: 0.0, s: 0.0, n_samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Gaussian { sigma: f64 },
    Uniform { a: f64, b: f64 },
    Laplace { scale: f64 },
    Logistic { scale: f64 },
}

impl DensitySpec {
    fn density(&self) -> Density1D {
        match *self {
            DensitySpec::Gaussian { sigma } => Density1D::Gaussian { sigma },
            DensitySpec::Uniform { a, b } => Density1D::Uniform { a, b },
            DensitySpec::Laplace { scale } => Density1D::Laplace { scale },
            DensitySpec::Logistic { scale } => Density1D::Logistic { scale },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogconcaveSpec {
    pub densities: Vec<DensitySpec>,
    pub deltas: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl Default for LogconcaveSpec {
    fn default() -> Self {
        LogconcaveSpec {
            densities: vec![
                DensitySpec::Gaussian { sigma: 1.0 },
                DensitySpec::Uniform { a: 0.0, b: 1.0 },
                DensitySpec::Laplace { scale: 1.0 },
                DensitySpec::Logistic { scale: 1.0 },
            ],
            deltas: vec![0.05, 0.1, 0.3],
            t_grid: (0..=16).map(|k| k as f64 * 0.5).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub kernel_samples: usize,
    pub kernel_bins: usize,
    /// Replaces the bound of the named checks.
    pub bounds: BTreeMap<String, f64>,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec { kernel_samples: 200_000, kernel_bins: 30, bounds: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub body: BodySpec,
    pub body_hints: HintsSpec,
    pub target: TargetSpec,
    pub chain: ChainSpec,
    pub sl: SlSpec,
    pub mix: MixSpec,
    pub conductance: ConductanceSpec,
    pub logconcave: LogconcaveSpec,
    pub verify: VerifySpec,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive and finite")))
    }
}

fn nonzero(name: &str, v: usize) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive")))
    }
}

impl ExperimentConfig {
    /// Parses and validates a JSON config.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_body(&self) -> Result<Arc<ConvexBody>> {
        let body = match &self.body {
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::Box { lower, upper } => ConvexBody::boxed(lower.clone(), upper.clone()),
            BodySpec::Cube { dim, half_width } => ConvexBody::cube(*dim, *half_width),
            BodySpec::Simplex { dim, scale } => ConvexBody::simplex(*dim, *scale),
            BodySpec::Hpolytope { normals, offsets } => ConvexBody::hpolytope(normals.clone(), offsets.clone()),
            BodySpec::Ellipsoid { center, shape } => {
                let n = center.len();
                if shape.len() != n || shape.iter().any(|r| r.len() != n) {
                    return Err(config_err("ellipsoid shape must be n×n"));
                }
                ConvexBody::ellipsoid(center.clone(), DMatrix::from_fn(n, n, |i, j| shape[i][j]))
            }
        }
        .and_then(|b| b.with_hints(self.body_hints.r_inscribed, self.body_hints.r_circum))
        .map_err(|e| config_err(format!("body: {e}")))?;
        Ok(Arc::new(body))
    }

    pub fn build_target(&self, body: &Arc<ConvexBody>) -> Result<Target> {
        match &self.target {
            TargetSpec::Uniform => Ok(Target::uniform(body.clone())),
            TargetSpec::TruncatedGaussian { beta, m } => Target::truncated_gaussian(body.clone(), beta.clone(), *m)
                .map_err(|e| config_err(format!("target: {e}"))),
        }
    }

    /// Range checks on every numeric field.
    pub fn validate(&self) -> Result<()> {
        let body = self.build_body()?;
        let n = body.dim();
        self.build_target(&body)?;
        let c = &self.chain;
        if c.kind == ChainKindSpec::BallWalk {
            positive("chain.delta", c.delta)?;
        }
        nonzero("chain.max_chord_retries", c.max_chord_retries as usize)?;
        nonzero("chain.thin", c.thin as usize)?;
        if let Some(init) = &c.init {
            if init.len() != n {
                return Err(config_err("chain.init has wrong dimension"));
            }
        }
        let s = &self.sl;
        if let Some(h) = s.h {
            positive("sl.h", h)?;
        }
        if s.checkpoints.is_empty() || s.checkpoints.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(config_err("sl.checkpoints must be positive"));
        }
        if s.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("sl.checkpoints must be strictly increasing"));
        }
        nonzero("sl.n_paths", s.n_paths)?;
        nonzero("sl.inner_samples", s.inner_samples)?;
        nonzero("sl.checkpoint_thin", s.checkpoint_thin)?;
        if s.checkpoint_samples < 2 {
            return Err(config_err("sl.checkpoint_samples must be at least 2"));
        }
        if let Some(a) = &s.event_normal {
            if a.len() != n {
                return Err(config_err("sl.event_normal has wrong dimension"));
            }
        }
        if !s.event_offset.is_finite() {
            return Err(config_err("sl.event_offset must be finite"));
        }
        if let Some(o) = &s.one_d {
            if o.n_cells < crate::localization::MIN_GRID_CELLS {
                return Err(config_err("sl.one_d.n_cells must be at least 64"));
            }
            positive("sl.one_d.sigma2", o.sigma2)?;
            positive("sl.one_d.alpha", o.alpha)?;
            if o.n_paths < 2 {
                return Err(config_err("sl.one_d.n_paths must be at least 2"));
            }
            nonzero("sl.one_d.n_steps", o.n_steps)?;
        }
        let m = &self.mix;
        if !(m.warm_m >= 1.0 && m.warm_m.is_finite()) {
            return Err(config_err("mix.warm_m must be at least 1"));
        }
        if let Some(a) = &m.warm_normal {
            if a.len() != n {
                return Err(config_err("mix.warm_normal has wrong dimension"));
            }
        }
        if m.checkpoints.is_empty() || m.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("mix.checkpoints must be nonempty and strictly increasing"));
        }
        if m.n_replicas < crate::diagnostics::MIN_TV_SAMPLES {
            return Err(config_err("mix.n_replicas must be at least 1000"));
        }
        nonzero("mix.n_bins", m.n_bins)?;
        positive("mix.epsilon", m.epsilon)?;
        let k = &self.conductance;
        if let Some(a) = &k.normal {
            if a.len() != n || a.iter().all(|v| *v == 0.0) {
                return Err(config_err("conductance.normal must be nonzero with the body's dimension"));
            }
        }
        if !k.offset.is_finite() {
            return Err(config_err("conductance.offset must be finite"));
        }
        if !(0.0..0.5).contains(&k.s) {
            return Err(config_err("conductance.s must lie in [0, 1/2)"));
        }
        if k.n_samples < 2 {
            return Err(config_err("conductance.n_samples must be at least 2"));
        }
        let l = &self.logconcave;
        for d in &l.densities {
            d.density().validate_params().map_err(|e| config_err(e.to_string()))?;
        }
        if l.deltas.iter().any(|d| !(*d > 0.0 && *d <= 1.0 / std::f64::consts::E)) {
            return Err(config_err("logconcave.deltas must lie in (0, 1/e]"));
        }
        if l.t_grid.is_empty() || l.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(config_err("logconcave.t_grid must be nonempty and nonnegative"));
        }
        nonzero("verify.kernel_samples", self.verify.kernel_samples)?;
        nonzero("verify.kernel_bins", self.verify.kernel_bins)?;
        if self.verify.bounds.values().any(|b| !b.is_finite()) {
            return Err(config_err("verify.bounds must be finite"));
        }
        Ok(())
    }

    /// Fills every defaulted field with its effective value.
    pub fn resolved(&self) -> Result<Self> {
        let body = self.build_body()?;
        let n = body.dim();
        let mut r = self.clone();
        let e1 = |n: usize| -> Vec<f64> { (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect() };
        r.chain.init.get_or_insert_with(|| body.interior_point().to_vec());
        let last = *r.sl.checkpoints.last().expect("validated nonempty");
        r.sl.h.get_or_insert(default_step(last));
        r.sl.event_normal.get_or_insert_with(|| e1(n));
        r.mix.warm_normal.get_or_insert_with(|| e1(n));
        r.conductance.normal.get_or_insert_with(|| e1(n));
        Ok(r)
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    text.push('\n');
    write_file(dir, name, &text)
}

/// Runs one command with an already resolved config.
pub fn execute(command: Command, config: &ExperimentConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_json(out, "resolved_config.json", config)?;
    match command {
        Command::Sample => cmd_sample(config, out),
        Command::Verify => cmd_verify(config, out),
        Command::Sl => cmd_sl(config, out),
        Command::Mix => cmd_mix(config, out),
        Command::Conductance => cmd_conductance(config, out),
        Command::Logconcave => cmd_logconcave(config, out),
    }
}

#[derive(Serialize)]
struct SampleSummary<'a> {
    seed: u64,
    rng_streams: &'static str,
    acceptance: Option<f64>,
    degenerate_count: u64,
    stats: &'a crate::chains::ChainStats,
}

fn cmd_sample(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let body = config.build_body()?;
    let target = config.build_target(&body)?;
    let c = &config.chain;
    let init = c.init.clone().unwrap_or_else(|| body.interior_point().to_vec());
    let run = run_chain(&c.config(), &target, &init, c.n_steps, c.thin, stream(config.seed, 0, "sample"))?;
    let n = body.dim();
    let mut csv = String::from("step");
    for i in 0..n {
        write!(csv, ",x_{i}").unwrap();
    }
    csv.push_str(",moved\n");
    for row in &run.rows {
        write!(csv, "{}", row.step).unwrap();
        for v in &row.x {
            write!(csv, ",{}", fmt_f(*v)).unwrap();
        }
        writeln!(csv, ",{}", row.moved as u8).unwrap();
    }
    write_file(out, "trace.csv", &csv)?;
    write_json(
        out,
        "summary.json",
        &SampleSummary {
            seed: config.seed,
            rng_streams: STREAM_DERIVATION,
            acceptance: run.stats.acceptance_rate,
            degenerate_count: run.stats.degenerate_redraws,
            stats: &run.stats,
        },
    )
}

fn event_normal(config: &ExperimentConfig, n: usize) -> Vec<f64> {
    config
        .sl
        .event_normal
        .clone()
        .unwrap_or_else(|| (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect())
}

fn grid_for(shape: GridShape, n_cells: usize) -> Result<Grid1D> {
    let d = match shape {
        GridShape::Gaussian => Density1D::Gaussian { sigma: 1.0 },
        GridShape::Uniform => return Grid1D::uniform(-3f64.sqrt(), 3f64.sqrt(), n_cells),
        GridShape::Laplace => Density1D::Laplace { scale: 1.0 },
        GridShape::Logistic => Density1D::Logistic { scale: 1.0 },
    };
    logconcave1d::to_unit_grid(&d, n_cells)
}

fn cmd_sl(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let body = config.build_body()?;
    let base = Target::uniform(body.clone());
    let s = &config.sl;
    let last = *s.checkpoints.last().expect("validated nonempty");
    let path_cfg = SlPathConfig {
        h: s.h.unwrap_or(default_step(last)),
        checkpoints: s.checkpoints.clone(),
        inner_chain: config.chain.config(),
        budget: InnerBudget { n_samples: s.inner_samples, burn_in: s.inner_burn_in },
        checkpoint_samples: s.checkpoint_samples,
        checkpoint_thin: s.checkpoint_thin,
        event_normal: event_normal(config, body.dim()),
        event_offset: s.event_offset,
    };
    let paths: Vec<_> = (0..s.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream(config.seed, p as u64, "sl");
            run_sl_path(&base, &path_cfg, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("path,t");
    for i in 0..body.dim() {
        write!(csv, ",c_{i}").unwrap();
    }
    csv.push_str(",top_eigen,top_eigen_se,event_mass\n");
    for (p, rows) in paths.iter().enumerate() {
        for r in rows {
            write!(csv, "{p},{}", fmt_f(r.t)).unwrap();
            for v in &r.c {
                write!(csv, ",{}", fmt_f(*v)).unwrap();
            }
            writeln!(csv, ",{},{},{}", fmt_f(r.top_eigen.value), fmt_f(r.top_eigen.se), fmt_f(r.event_mass)).unwrap();
        }
    }
    write_file(out, "sl_trace.csv", &csv)?;
    if let Some(o) = &s.one_d {
        let omega0 = grid_for(o.omega0, o.n_cells)?;
        let mut rng = stream(config.seed, 0, "sl1d");
        let curve = variance_supermartingale_check(&omega0, o.sigma2, o.alpha, o.n_paths, o.n_steps, &mut rng)?;
        let mut csv = String::from("t,mean,variance,variance_se,right_mass\n");
        for k in 0..curve.times.len() {
            writeln!(
                csv,
                "{},{},{},{},{}",
                fmt_f(curve.times[k]),
                fmt_f(curve.mean_center[k]),
                fmt_f(curve.mean_variance[k]),
                fmt_f(curve.se[k]),
                fmt_f(curve.mean_right_mass[k])
            )
            .unwrap();
        }
        write_file(out, "sl1d.csv", &csv)?;
    }
    Ok(())
}

fn cmd_mix(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let body = config.build_body()?;
    let target = config.build_target(&body)?;
    let m = &config.mix;
    let n = body.dim();
    let normal = m.warm_normal.clone().unwrap_or_else(|| (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect());
    let mut rng = stream(config.seed, 0, "warm");
    let warm = warm_start(&body, m.warm_m, &normal, 100_000, &mut rng)?;
    let spec = MixingSpec {
        checkpoints: m.checkpoints.clone(),
        n_replicas: m.n_replicas,
        n_bins: m.n_bins,
        epsilon: m.epsilon,
    };
    let mut report = mixing_curve(&config.chain.config(), &target, |r| warm.sample(r), &spec, config.seed)?;
    let k = &config.conductance;
    let part = PartitionSpec::halfspace(k.normal.clone().unwrap_or(normal), k.offset)?;
    let mut rng = stream(config.seed, 0, "mix/conductance");
    let phi = s_conductance(&config.chain.config(), &target, &part, k.s, k.n_samples, &mut rng)?;
    report.dirichlet = Some(dirichlet_halfspace(&target, &part, k.n_samples, &mut rng)?);
    let mut csv = String::from("step,tv,se,phi_s\n");
    for k in 0..report.steps.len() {
        writeln!(csv, "{},{},{},{}", report.steps[k], fmt_f(report.tv[k]), fmt_f(report.se[k]), fmt_f(phi.phi)).unwrap();
    }
    report.phi_s = Some(phi);
    write_file(out, "mixing.csv", &csv)?;
    write_json(out, "mixing.json", &report)
}

fn cmd_conductance(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let body = config.build_body()?;
    let target = config.build_target(&body)?;
    let k = &config.conductance;
    let n = body.dim();
    let normal = k.normal.clone().unwrap_or_else(|| (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect());
    let part = PartitionSpec::halfspace(normal, k.offset)?;
    let mut rng = stream(config.seed, 0, "conductance");
    let c = s_conductance(&config.chain.config(), &target, &part, k.s, k.n_samples, &mut rng)?;
    write_json(out, "conductance.json", &c)
}

fn cmd_logconcave(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let l = &config.logconcave;
    let densities: Vec<Density1D> = l.densities.iter().map(DensitySpec::density).collect();
    let rows = logconcave1d::run_suite(&densities, &l.deltas, &l.t_grid)?;
    let mut csv = String::from("density,check,delta,value,bound,margin,pass\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.density,
            r.check,
            r.delta.map(fmt_f).unwrap_or_default(),
            fmt_f(r.value),
            fmt_f(r.bound),
            fmt_f(r.margin),
            r.passed
        )
        .unwrap();
    }
    write_file(out, "logconcave.csv", &csv)?;
    write_json(out, "logconcave.json", &rows)?;
    if rows.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Error::Step("a logconcave check failed".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One entry of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyEntry {
    pub id: String,
    pub anchor: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub rng_streams: &'static str,
    pub all_pass: bool,
    pub checks: Vec<VerifyEntry>,
}

struct Checks<'a> {
    overrides: &'a BTreeMap<String, f64>,
    entries: Vec<VerifyEntry>,
}

impl Checks<'_> {
    fn push(&mut self, id: impl Into<String>, anchor: &str, value: f64, relation: Relation, bound: f64) {
        let id = id.into();
        let bound = self.overrides.get(&id).copied().unwrap_or(bound);
        let pass = match relation {
            Relation::AtMost => value <= bound,
            Relation::AtLeast => value >= bound,
        };
        self.entries.push(VerifyEntry { id, anchor: anchor.to_string(), value, relation, bound, pass });
    }
}

fn logconcave_anchor(check: &str) -> &'static str {
    match check {
        "max_density" => "Lemma isotropic_1d_max",
        "density_at_zero" => "Lemma isotropic_1d_zero",
        "tail" => "Lemma isotropic_logconcave_tail",
        "quantile_density" => "Lemma isotropic_1d_delta_quantile_large",
        "quantile_derivative" => "Lemma isotropic_1d_delta_quantile_derivative_bounded",
        _ => "Appendix A (Cheeger constant)",
    }
}

/// Builds the verification report for the configured body and target.
pub fn verify_report(config: &ExperimentConfig) -> Result<VerifyReport> {
    let body = config.build_body()?;
    let target = config.build_target(&body)?;
    let n = body.dim();
    let seed = config.seed;
    let center = body.interior_point().to_vec();
    let mut checks = Checks { overrides: &config.verify.bounds, entries: Vec::new() };

    if n == 2 || n == 3 {
        let mut rng = stream(seed, 0, "verify/kernel");
        let grid = KernelGrid { bins: config.verify.kernel_bins, ..KernelGrid::default_for(n) };
        let k = crate::chains::empirical_kernel_tv(&center, &target, config.verify.kernel_samples, &grid, &mut rng)?;
        checks.push("kernel_tv", "Eq. hit-and-run_transition", k.tv, Relation::AtMost, k.noise_floor + 0.01);
    }

    {
        let t = 4.0;
        let nu = Target::truncated_gaussian(body.clone(), center.clone(), t)?;
        let run = run_chain(&ChainConfig::hit_and_run(), &nu, &center, 20_000 * 5, 5, stream(seed, 0, "verify/bl"))?;
        let eig = top_covariance_eigen(&run.samples()[1..], 20);
        checks.push("cov_bl_t4", "Eq. COV-bl", eig.value, Relation::AtMost, 1.0 / t + 5.0 * eig.se);
    }

    {
        let a = event_normal(config, n);
        let b = crate::geometry::dot(&a, &center);
        let mut rng = stream(seed, 0, "verify/mu_e");
        let reference: Vec<f64> = (0..20_000)
            .map(|_| body.sample_uniform(&mut rng, 1_000_000).map(|x| (crate::geometry::dot(&a, &x) <= b) as u8 as f64))
            .collect::<Result<_>>()?;
        let (mu_e, var_e) = mean_var(&reference);
        let budget = InnerBudget { n_samples: 64, burn_in: 16 };
        let base = Target::uniform(body.clone());
        let axis_event = body.as_box().is_some() && a.iter().filter(|v| **v != 0.0).count() == 1;
        let values: Vec<f64> = (0..40u64)
            .into_par_iter()
            .map(|p| -> Result<f64> {
                let mut rng = stream(seed, p, "verify/sl");
                let mut state = SLState::new(&body, ChainConfig::hit_and_run(), budget);
                for _ in 0..64 {
                    sl_step(&mut state, 1.0 / 64.0, &base, &mut rng)?;
                }
                if axis_event {
                    let i = a.iter().position(|v| *v != 0.0).expect("one nonzero");
                    let above = box_axis_mass(&state, &body, i, b / a[i])?;
                    return Ok(if a[i] > 0.0 { 1.0 - above } else { above });
                }
                let xs = state.sample_current(&body, 64, 500, 2, &mut rng)?;
                Ok(xs.iter().filter(|x| crate::geometry::dot(&a, x) <= b).count() as f64 / xs.len() as f64)
            })
            .collect::<Result<_>>()?;
        let (m, v) = mean_var(&values);
        let se = (v / values.len() as f64 + var_e / reference.len() as f64).sqrt();
        checks.push("sl_martingale_t1", "Eq. mu_t_sde", (m - mu_e).abs(), Relation::AtMost, 3.0 * se);
    }

    {
        let r = 1.0 / (32.0 * (n as f64).sqrt());
        let mut rng = stream(seed, 0, "verify/fu");
        if in_k_r(&body, &center, r, 20_000, &mut rng)? == KrClass::In {
            let nu = Target::truncated_gaussian(body.clone(), center.clone(), n as f64)?;
            let f = estimate_f_u(&nu, &center, 4000, &mut rng)?;
            checks.push("f_u_lower_bound", "Lemma F_u_lower_bound", f.value, Relation::AtLeast, f_u_lower_bound(r, n));
        }
    }

    if body.inscribed_radius().is_some_and(|r| r >= 1.0 - 1e-12) {
        let mut rng = stream(seed, 0, "verify/kr");
        let k = k_r_mass(&body, 0.05, 400, 4000, &mut rng)?;
        checks.push("k_r_mass", "Lemma K_r_size", k.estimate.value, Relation::AtLeast, k.bound - 3.0 * k.estimate.se);
    }

    {
        let mut rng = stream(seed, 0, "verify/cap");
        let c = cap_fraction(100, 0.2, 200_000, &mut rng)?;
        checks.push("cap_n100", "Eq. sphere_cap_area", c.value, Relation::AtMost, cap_bound(100, 0.2) + 5.0 * c.se);
    }

    {
        let omega0 = Grid1D::uniform(-3f64.sqrt(), 3f64.sqrt(), 4096)?;
        let h: Vec<f64> = omega0.centers().map(|z| if z > 0.0 { 1.0 } else { 0.0 }).collect();
        let mut rng = stream(seed, 0, "verify/lipschitz");
        let pairs: Vec<(f64, f64)> = (0..200)
            .map(|_| -> Result<(f64, f64)> {
                let y = sample_rho(&omega0, 1.0, 1.0, &mut rng)?;
                let d: f64 = rand::Rng::random_range(&mut rng, -0.5..0.5);
                Ok((y, y + d))
            })
            .collect::<Result<_>>()?;
        let ratio = lipschitz_check_1d(&omega0, 1.0, 1.0, &h, &pairs)?;
        checks.push("lipschitz_1d", "Lemma lipschitzness_of_G", ratio, Relation::AtMost, 1.02);

        let g = Grid1D::uniform(-3f64.sqrt(), 3f64.sqrt(), 512)?;
        let curve = variance_supermartingale_check(&g, 1.0, 4.0, 100, 64, &mut rng)?;
        checks.push("variance_supermartingale", "Eq. mo_sde", curve.worst_increase_in_se(), Relation::AtMost, 3.0);
    }

    {
        let l = LogconcaveSpec::default();
        let densities: Vec<Density1D> = l.densities.iter().map(DensitySpec::density).collect();
        for r in logconcave1d::run_suite(&densities, &l.deltas, &l.t_grid)? {
            let id = match r.delta {
                Some(d) => format!("logconcave/{}/{}/delta={d}", r.density, r.check),
                None => format!("logconcave/{}/{}", r.density, r.check),
            };
            // margins are oriented so that nonnegative means the bound holds
            let tol = if r.check == "quantile_derivative" || r.check == "cheeger" {
                logconcave1d::GRID_TOL
            } else {
                logconcave1d::CLOSED_FORM_TOL
            };
            checks.push(id, logconcave_anchor(r.check), r.margin, Relation::AtLeast, -tol);
        }
    }

    let all_pass = checks.entries.iter().all(|e| e.pass);
    Ok(VerifyReport { seed, rng_streams: STREAM_DERIVATION, all_pass, checks: checks.entries })
}

fn cmd_verify(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let report = verify_report(config)?;
    write_json(out, "verify.json", &report)?;
    let failing: Vec<&str> = report.checks.iter().filter(|e| !e.pass).map(|e| e.id.as_str()).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Error::Step(format!("failing checks: {}", failing.join(", "))))
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        _ => 1,
    }
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.resolved()
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return 2;
        }
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = load_config(cli.config.as_deref(), cli.seed).and_then(|cfg| execute(cli.command, &cfg, &cli.out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = ExperimentConfig::default().resolved().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"sede": 1}"#), Err(Error::Config(_))));
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"chain": {"kind": "hit_and_run", "step": 3}}"#),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn ranges_are_checked() {
        assert!(ExperimentConfig::from_json(r#"{"chain": {"thin": 0}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"body": {"kind": "ball", "center": [0, 0], "radius": -1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"target": {"kind": "truncated_gaussian", "beta": [0], "m": 1}}"#)
            .is_err());
        assert!(ExperimentConfig::from_json(r#"{"conductance": {"s": 0.7}}"#).is_err());
    }
}
