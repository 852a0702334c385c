//! Mixing and conductance measurements: marginal TV, warm starts,
//! s-conductance, the Lovász–Simonovits bound, the `F_u` step-size quantile,
//! transition overlap and `K_r` mass.

use crate::chains::{
    histogram_noise_floor, kernel_cell_masses, ChainConfig, ChainState, KernelGrid, Scratch,
};
use crate::error::{Error, Result};
use crate::geometry::{dot, fill_uniform_direction, in_k_r, BodyKind, ConvexBody, KrClass};
use crate::rng::{stream, StreamRng};
use crate::stats::{mean_var, Estimate};
use crate::targets::{ChordLaw, Target, TargetKind};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::beta::beta_reg;
use std::sync::Arc;

const EXACT_MAX_TRIES: usize = 1_000_000;

/// Halfspace partition `S₁ = {x ∈ K : a·x ≤ b}`, `S₂ = K \ S₁`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSpec {
    normal: Vec<f64>,
    offset: f64,
}

impl PartitionSpec {
    /// Rescales `(a, b)` so that `|a| = 1`.
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let norm = dot(&normal, &normal).sqrt();
        if !(norm > 0.0 && norm.is_finite()) || !offset.is_finite() {
            return Err(Error::usage("partition normal must be nonzero and finite"));
        }
        Ok(PartitionSpec { normal: normal.iter().map(|v| v / norm).collect(), offset: offset / norm })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn in_s1(&self, x: &[f64]) -> bool {
        dot(&self.normal, x) <= self.offset
    }
}

/// Analytic one-dimensional marginal of a reference law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MarginalRef {
    Uniform { a: f64, b: f64 },
    /// A coordinate of the uniform law on the `dim`-ball.
    BallCoordinate { center: f64, radius: f64, dim: usize },
    TruncNormal { center: f64, std: f64, a: f64, b: f64 },
}

impl MarginalRef {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            MarginalRef::Uniform { a, b } | MarginalRef::TruncNormal { a, b, .. } => (a, b),
            MarginalRef::BallCoordinate { center, radius, .. } => (center - radius, center + radius),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            MarginalRef::Uniform { a, b } => ChordLaw::UniformSegment { a, b }.cdf(x),
            MarginalRef::TruncNormal { center, std, a, b } => ChordLaw::TruncGauss1D { center, std, a, b }.cdf(x),
            MarginalRef::BallCoordinate { center, radius, dim } => {
                // (1 + s)/2 ~ Beta((n+1)/2, (n+1)/2) for s = (x − c)/r
                let s = ((x - center) / radius).clamp(-1.0, 1.0);
                let p = 0.5 * (dim as f64 + 1.0);
                beta_reg(p, p, 0.5 * (1.0 + s))
            }
        }
    }

    /// Per-axis marginals of a target whose marginals have closed forms:
    /// uniform on a box or ball, or a truncated Gaussian on a box.
    pub fn for_target(target: &Target) -> Result<Vec<MarginalRef>> {
        let body = target.body();
        if !body.cuts().is_empty() {
            return Err(Error::usage("no closed-form marginals for a cut body"));
        }
        match (target.kind(), body.kind()) {
            (TargetKind::Uniform, BodyKind::Box { lower, upper }) => {
                Ok(lower.iter().zip(upper).map(|(&a, &b)| MarginalRef::Uniform { a, b }).collect())
            }
            (TargetKind::Uniform, BodyKind::Ball { center, radius }) => Ok(center
                .iter()
                .map(|&c| MarginalRef::BallCoordinate { center: c, radius: *radius, dim: body.dim() })
                .collect()),
            (TargetKind::TruncatedGaussian { beta, m }, BodyKind::Box { lower, upper }) => Ok(beta
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&c, (&a, &b))| MarginalRef::TruncNormal { center: c, std: 1.0 / m.sqrt(), a, b })
                .collect()),
            _ => Err(Error::usage("no closed-form marginals for this target")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalTv {
    /// Largest per-axis binned TV.
    pub tv: f64,
    /// Delta-method standard error of the TV on the worst axis.
    pub se: f64,
    pub per_axis: Vec<f64>,
    /// Expected binned TV of a sample of this size drawn from the reference.
    pub noise_floor: f64,
    /// Half the binned TV between the two halves of the sample.
    pub self_split: f64,
}

pub const MIN_TV_SAMPLES: usize = 1000;

fn binned(values: impl Iterator<Item = f64>, lo: f64, hi: f64, n_bins: usize) -> (Vec<f64>, f64, usize) {
    let mut counts = vec![0.0; n_bins];
    let mut outside = 0.0;
    let mut total = 0usize;
    let w = (hi - lo) / n_bins as f64;
    for v in values {
        total += 1;
        if v < lo || v > hi {
            outside += 1.0;
        } else {
            counts[(((v - lo) / w) as usize).min(n_bins - 1)] += 1.0;
        }
    }
    (counts, outside, total)
}

/// Binned TV between one axis of the samples and its reference marginal,
/// with the delta-method standard error.
fn axis_tv(values: &[f64], reference: &MarginalRef, n_bins: usize) -> (f64, f64, f64) {
    let (lo, hi) = reference.support();
    let (counts, outside, total) = binned(values.iter().copied(), lo, hi, n_bins);
    let nf = total as f64;
    let w = (hi - lo) / n_bins as f64;
    let q: Vec<f64> = (0..n_bins)
        .map(|k| reference.cdf(lo + (k + 1) as f64 * w) - reference.cdf(lo + k as f64 * w))
        .collect();
    let mut tv = outside / nf;
    // TV = ½ Σ_b s_b (p̂_b − q_b) with s_b the sign; the outside bin has s = +1.
    let mut m1 = outside / nf;
    let mut m2 = outside / nf;
    for (c, qb) in counts.iter().zip(&q) {
        let p = c / nf;
        tv += (p - qb).abs();
        let s = if p >= *qb { 1.0 } else { -1.0 };
        m1 += s * p;
        m2 += p;
    }
    let se = 0.5 * ((m2 - m1 * m1).max(0.0) / nf).sqrt();
    (0.5 * tv, se, histogram_noise_floor(&q, total))
}

/// Largest per-axis binned TV between the samples and the reference
/// marginals.
pub fn tv_marginal(samples: &[Vec<f64>], reference: &[MarginalRef], n_bins: usize) -> Result<MarginalTv> {
    if samples.len() < MIN_TV_SAMPLES {
        return Err(Error::usage(format!("tv_marginal needs at least {MIN_TV_SAMPLES} samples")));
    }
    if n_bins == 0 {
        return Err(Error::usage("n_bins must be positive"));
    }
    let n = reference.len();
    if samples.iter().any(|s| s.len() != n) {
        return Err(Error::usage("samples and reference differ in dimension"));
    }
    let half = samples.len() / 2;
    let mut out = MarginalTv { tv: 0.0, se: 0.0, per_axis: Vec::with_capacity(n), noise_floor: 0.0, self_split: 0.0 };
    for (i, r) in reference.iter().enumerate() {
        let values: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        let (tv, se, floor) = axis_tv(&values, r, n_bins);
        if tv >= out.tv {
            out.tv = tv;
            out.se = se;
        }
        out.noise_floor = out.noise_floor.max(floor);
        let (lo, hi) = r.support();
        let (a, ao, _) = binned(values[..half].iter().copied(), lo, hi, n_bins);
        let (b, bo, _) = binned(values[half..2 * half].iter().copied(), lo, hi, n_bins);
        let split = 0.5
            * (a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() + (ao - bo).abs())
            / half as f64;
        out.self_split = out.self_split.max(0.5 * split);
        out.per_axis.push(tv);
    }
    Ok(out)
}

/// Uniform law on `{x ∈ K : a·x ≤ q}` with `q` chosen so the piece has
/// measure `1/M`; its density against the uniform law on `K` is `M`.
#[derive(Debug, Clone)]
pub struct WarmStart {
    pub m: f64,
    pub normal: Vec<f64>,
    pub q: f64,
    piece: Arc<ConvexBody>,
}

impl WarmStart {
    pub fn body(&self) -> &Arc<ConvexBody> {
        &self.piece
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        self.piece.sample_uniform(rng, EXACT_MAX_TRIES)
    }
}

/// `M`-warm start along the direction `normal`. For a box cut along a
/// coordinate axis the level `q` is exact; otherwise it is the empirical
/// `1/M` quantile of `a·X` over `n_mc` uniform draws.
pub fn warm_start<R: Rng + ?Sized>(
    body: &Arc<ConvexBody>,
    m: f64,
    normal: &[f64],
    n_mc: usize,
    rng: &mut R,
) -> Result<WarmStart> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::usage("warmness M must be at least 1"));
    }
    let part = PartitionSpec::halfspace(normal.to_vec(), 0.0)?;
    let a = part.normal.clone();
    if a.len() != body.dim() {
        return Err(Error::usage("normal has wrong dimension"));
    }
    if m == 1.0 {
        return Ok(WarmStart { m, normal: a, q: f64::INFINITY, piece: body.clone() });
    }
    let axis = a.iter().position(|v| (v.abs() - 1.0).abs() < 1e-15);
    if let (Some((lower, upper)), Some(i)) = (body.as_box(), axis) {
        let (mut lo, mut hi) = (lower.to_vec(), upper.to_vec());
        let width = hi[i] - lo[i];
        let q;
        if a[i] > 0.0 {
            hi[i] = lo[i] + width / m;
            q = hi[i];
        } else {
            lo[i] = hi[i] - width / m;
            q = -lo[i];
        }
        if !(hi[i] - lo[i] > 1e-12 * width) {
            return Err(Error::Range("warm-start piece is numerically empty".into()));
        }
        return Ok(WarmStart { m, normal: a, q, piece: Arc::new(ConvexBody::boxed(lo, hi)?) });
    }
    if n_mc == 0 {
        return Err(Error::usage("n_mc must be positive"));
    }
    let mut proj = Vec::with_capacity(n_mc);
    for _ in 0..n_mc {
        proj.push(dot(&body.sample_uniform(rng, EXACT_MAX_TRIES)?, &a));
    }
    proj.sort_by(f64::total_cmp);
    let k = (n_mc as f64 / m).round() as usize;
    if k == 0 {
        return Err(Error::Range("warm-start piece is numerically empty".into()));
    }
    let q = 0.5 * (proj[k - 1] + proj[k.min(n_mc - 1)]);
    let piece = body
        .cut(a.clone(), q)
        .map_err(|_| Error::Range("warm-start piece is numerically empty".into()))?;
    Ok(WarmStart { m, normal: a, q, piece: Arc::new(piece) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conductance {
    pub phi: f64,
    pub se: f64,
    /// Estimate of `∫_{S₁} P_{x→S₂} dν`.
    pub numerator: Estimate,
    /// Estimate of `ν(S₁)`.
    pub measure_s1: Estimate,
    /// Samples came from a long chain rather than exact draws.
    pub approximate: bool,
}

/// Draws from `ν`: exact when feasible, otherwise thinned long-chain states.
fn target_draws(target: &Target, n: usize, rng: &mut StreamRng) -> Result<(Vec<Vec<f64>>, bool)> {
    let exact_ok = target.body().as_box().is_some() || target.dim() <= 8;
    if exact_ok {
        let draws = (0..n).map(|_| target.sample_exact(rng, EXACT_MAX_TRIES)).collect::<Result<_>>()?;
        return Ok((draws, false));
    }
    let cfg = ChainConfig::hit_and_run();
    let mut state = ChainState::new(target.body().interior_point().to_vec(), rng.clone());
    let d = target.dim();
    for _ in 0..100 * d * d {
        state.step(&cfg, target)?;
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..d {
            state.step(&cfg, target)?;
        }
        out.push(state.x.clone());
    }
    *rng = state.rng;
    Ok((out, true))
}

/// Monte Carlo s-conductance of one halfspace partition:
/// `∫_{S₁} P_{x→S₂} dν / (min(ν(S₁), ν(S₂)) − s)`.
pub fn s_conductance(
    config: &ChainConfig,
    target: &Target,
    partition: &PartitionSpec,
    s: f64,
    n_samples: usize,
    rng: &mut StreamRng,
) -> Result<Conductance> {
    config.validate()?;
    if !(0.0..0.5).contains(&s) {
        return Err(Error::usage("s must lie in [0, 1/2)"));
    }
    if n_samples < 2 {
        return Err(Error::usage("need at least two samples"));
    }
    if partition.normal.len() != target.dim() {
        return Err(Error::usage("partition has wrong dimension"));
    }
    let (draws, approximate) = target_draws(target, n_samples, rng)?;
    let in_s1: Vec<bool> = draws.iter().map(|x| partition.in_s1(x)).collect();
    let p1 = in_s1.iter().filter(|b| **b).count() as f64 / n_samples as f64;
    if !(p1 > s && p1 < 1.0 - s) {
        return Err(Error::Precondition(format!(
            "partition measure {p1:.4} lies outside ({s}, {})",
            1.0 - s
        )));
    }
    let mut escape = Vec::with_capacity(n_samples);
    let mut state = ChainState::new(vec![0.0; target.dim()], rng.clone());
    for (x, &inside) in draws.iter().zip(&in_s1) {
        if inside {
            state.x.copy_from_slice(x);
            state.step(config, target)?;
            escape.push(if partition.in_s1(&state.x) { 0.0 } else { 1.0 });
        } else {
            escape.push(0.0);
        }
    }
    *rng = state.rng;
    let small_is_s1 = p1 <= 0.5;
    let d: Vec<f64> = in_s1.iter().map(|&b| if b == small_is_s1 { 1.0 } else { 0.0 }).collect();
    let a_bar = mean_var(&escape).0;
    let denom = mean_var(&d).0 - s;
    let phi = a_bar / denom;
    let g: Vec<f64> = escape.iter().zip(&d).map(|(a, di)| (a - phi * di) / denom).collect();
    let se = (mean_var(&g).1 / n_samples as f64).sqrt();
    Ok(Conductance {
        phi,
        se,
        numerator: Estimate::from_values(&escape),
        measure_s1: Estimate::from_proportion(in_s1.iter().filter(|b| **b).count(), n_samples),
        approximate,
    })
}

/// Probability that one hit-and-run step from `x` along the unit direction
/// `theta` lands in `S₂`.
fn escape_probability(target: &Target, partition: &PartitionSpec, x: &[f64], theta: &[f64]) -> f64 {
    let (lo, hi) = target.body().chord_params(x, theta);
    if !(hi > lo) {
        return 0.0;
    }
    let law = target.chord_law(x, theta, lo, hi);
    let slope = dot(&partition.normal, theta);
    let gap = partition.offset - dot(&partition.normal, x);
    if slope == 0.0 {
        return if gap < 0.0 { 1.0 } else { 0.0 };
    }
    let cut = gap / slope;
    if slope > 0.0 {
        1.0 - law.cdf(cut)
    } else {
        law.cdf(cut)
    }
}

/// Dirichlet form `ℰ(1_{S₁}, 1_{S₁}) = ∫_{S₁} P_{x→S₂} dν` of the
/// (non-lazy) hit-and-run kernel, from exact target draws. The escape
/// probability along each sampled chord is evaluated in closed form.
pub fn dirichlet_halfspace(
    target: &Target,
    partition: &PartitionSpec,
    n_samples: usize,
    rng: &mut StreamRng,
) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(Error::usage("need at least two samples"));
    }
    let (draws, _) = target_draws(target, n_samples, rng)?;
    let mut theta = vec![0.0; target.dim()];
    let values: Vec<f64> = draws
        .iter()
        .map(|x| {
            if !partition.in_s1(x) {
                return 0.0;
            }
            fill_uniform_direction(rng, &mut theta);
            escape_probability(target, partition, x, &theta)
        })
        .collect();
    Ok(Estimate::from_values(&values))
}

/// Lovász–Simonovits bound `M s + M (1 − φ²/2)^N`, with the power taken in
/// the log domain.
pub fn ls_bound(m: f64, s: f64, phi_s: f64, n: u64) -> f64 {
    m * s + m * (n as f64 * (-0.5 * phi_s * phi_s).ln_1p()).exp()
}

pub const F_U_LEVEL: f64 = 1.0 / 8.0;

/// Empirical `1/8`-quantile of the one-step displacement `|Y − u|` of
/// hit-and-run, with a bootstrap standard error.
pub fn estimate_f_u(target: &Target, u: &[f64], n_samples: usize, rng: &mut StreamRng) -> Result<Estimate> {
    if n_samples < 8 {
        return Err(Error::usage("need at least eight samples"));
    }
    if !target.body().membership(u)? {
        return Err(Error::domain("F_u base point lies outside the body"));
    }
    let n = u.len();
    let mut scratch = Scratch::new(n);
    let mut y = u.to_vec();
    let mut dist = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        y.copy_from_slice(u);
        crate::chains::hit_and_run_in_place(&mut y, &mut scratch, target, 16, rng)?;
        dist.push(y.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
    }
    let k = ((F_U_LEVEL * n_samples as f64).ceil() as usize).clamp(1, n_samples) - 1;
    let mut work = dist.clone();
    let value = *work.select_nth_unstable_by(k, f64::total_cmp).1;
    const BOOT: usize = 200;
    let mut boots = Vec::with_capacity(BOOT);
    for _ in 0..BOOT {
        for w in work.iter_mut() {
            *w = dist[rng.random_range(0..n_samples)];
        }
        boots.push(*work.select_nth_unstable_by(k, f64::total_cmp).1);
    }
    Ok(Estimate { value, se: mean_var(&boots).1.sqrt(), n_samples })
}

/// Lower bound `(1/128)·min{2r, 1/(8√n)}` on `F_u` for `u ∈ K_r`.
pub fn f_u_lower_bound(r: f64, n: usize) -> f64 {
    (2.0 * r).min(1.0 / (8.0 * (n as f64).sqrt())) / 128.0
}

/// TV distance between the one-step hit-and-run laws from `u` and from `v`,
/// by grid quadrature of the transition density (binned, so a lower bound
/// on the exact distance that tightens as the grid is refined).
pub fn kernel_overlap_tv(target: &Target, u: &[f64], v: &[f64], grid: &KernelGrid) -> Result<f64> {
    if u == v {
        if !target.body().membership(u)? {
            return Err(Error::domain("kernel base point lies outside the body"));
        }
        return Ok(0.0);
    }
    let pu = kernel_cell_masses(u, target, grid)?;
    let pv = kernel_cell_masses(v, target, grid)?;
    Ok((0.5 * pu.iter().zip(&pv).map(|(a, b)| (a - b).abs()).sum::<f64>()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub steps: Vec<u64>,
    pub tv: Vec<f64>,
    pub se: Vec<f64>,
    pub noise_floor: Vec<f64>,
    /// First checkpoint with TV at most `epsilon`.
    pub mixing_time: Option<u64>,
    pub epsilon: f64,
    pub phi_s: Option<Conductance>,
    pub dirichlet: Option<Estimate>,
}

impl MixingReport {
    /// Largest increase in TV between consecutive checkpoints, in units of
    /// the combined standard error.
    pub fn worst_increase_in_se(&self) -> f64 {
        self.tv
            .windows(2)
            .zip(self.se.windows(2))
            .map(|(t, s)| {
                let se = (s[0] * s[0] + s[1] * s[1]).sqrt().max(1e-300);
                (t[1] - t[0]) / se
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Settings for [`mixing_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixingSpec {
    pub checkpoints: Vec<u64>,
    pub n_replicas: usize,
    pub n_bins: usize,
    pub epsilon: f64,
}

/// Runs independent replicas from `init` and measures marginal TV against
/// the target's analytic marginals at each checkpoint. Replica `i` uses the
/// stream `(seed, i, "mix")`; results do not depend on the thread count.
pub fn mixing_curve<F>(
    config: &ChainConfig,
    target: &Target,
    init: F,
    spec: &MixingSpec,
    seed: u64,
) -> Result<MixingReport>
where
    F: Fn(&mut StreamRng) -> Result<Vec<f64>> + Sync,
{
    config.validate()?;
    if spec.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage("checkpoints must be strictly increasing"));
    }
    let reference = MarginalRef::for_target(target)?;
    let last = spec.checkpoints.last().copied().unwrap_or(0);
    let per_replica: Vec<Vec<Vec<f64>>> = (0..spec.n_replicas)
        .into_par_iter()
        .map(|i| -> Result<Vec<Vec<f64>>> {
            let mut rng = stream(seed, i as u64, "mix");
            let x0 = init(&mut rng)?;
            let mut state = ChainState::new(x0, rng);
            let mut snaps = Vec::with_capacity(spec.checkpoints.len());
            let mut next = 0;
            for step in 0..=last {
                if step > 0 {
                    state.step(config, target)?;
                }
                if next < spec.checkpoints.len() && spec.checkpoints[next] == step {
                    snaps.push(state.x.clone());
                    next += 1;
                }
            }
            Ok(snaps)
        })
        .collect::<Result<_>>()?;
    let mut report = MixingReport {
        steps: spec.checkpoints.clone(),
        tv: Vec::new(),
        se: Vec::new(),
        noise_floor: Vec::new(),
        mixing_time: None,
        epsilon: spec.epsilon,
        phi_s: None,
        dirichlet: None,
    };
    for (k, &step) in spec.checkpoints.iter().enumerate() {
        let samples: Vec<Vec<f64>> = per_replica.iter().map(|r| r[k].clone()).collect();
        let tv = tv_marginal(&samples, &reference, spec.n_bins)?;
        if report.mixing_time.is_none() && tv.tv <= spec.epsilon {
            report.mixing_time = Some(step);
        }
        report.tv.push(tv.tv);
        report.se.push(tv.se);
        report.noise_floor.push(tv.noise_floor);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KrMass {
    /// Fraction of uniform draws classified in `K_r`; undecided draws count
    /// as out.
    pub estimate: Estimate,
    pub undecided: usize,
    /// `1 − 2√n r`.
    pub bound: f64,
}

/// Fraction of the uniform measure of `K` lying in `K_r`. Requires a body
/// known to contain a unit ball (inscribed-radius hint at least 1).
pub fn k_r_mass<R: Rng + ?Sized>(
    body: &ConvexBody,
    r: f64,
    n_samples: usize,
    n_lambda: usize,
    rng: &mut R,
) -> Result<KrMass> {
    match body.inscribed_radius() {
        Some(rad) if rad >= 1.0 - 1e-12 => {}
        _ => return Err(Error::Precondition("body is not known to contain a unit ball".into())),
    }
    if n_samples == 0 {
        return Err(Error::usage("need at least one sample"));
    }
    let mut inside = 0usize;
    let mut undecided = 0usize;
    for _ in 0..n_samples {
        let u = body.sample_uniform(rng, EXACT_MAX_TRIES)?;
        match in_k_r(body, &u, r, n_lambda, rng)? {
            KrClass::In => inside += 1,
            KrClass::Undecided => undecided += 1,
            KrClass::Out => {}
        }
    }
    Ok(KrMass {
        estimate: Estimate::from_proportion(inside, n_samples),
        undecided,
        bound: 1.0 - 2.0 * (body.dim() as f64).sqrt() * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Arc<ConvexBody> {
        Arc::new(ConvexBody::cube(2, 1.0).unwrap())
    }

    #[test]
    fn ls_bound_values() {
        assert!((ls_bound(2.0, 0.05, 0.1, 0) - 2.1).abs() < 1e-15);
        let v = ls_bound(2.0, 0.05, 0.1, 1000);
        assert!((v - (0.1 + 2.0 * 0.995f64.powi(1000))).abs() < 1e-12);
        assert!((v - 0.1133).abs() < 1e-4);
        assert!((ls_bound(2.0, 0.05, 0.1, u64::MAX / 2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn tv_marginal_shifted_uniform_is_half() {
        let mut rng = stream(1, 0, "tv");
        let samples: Vec<Vec<f64>> = (0..100_000).map(|_| vec![rng.random::<f64>()]).collect();
        let tv = tv_marginal(&samples, &[MarginalRef::Uniform { a: 0.5, b: 1.5 }], 20).unwrap();
        assert!((tv.tv - 0.5).abs() < 0.02, "{tv:?}");
        assert!(tv_marginal(&samples[..10], &[MarginalRef::Uniform { a: 0.0, b: 1.0 }], 20).is_err());
    }

    #[test]
    fn ball_coordinate_cdf() {
        let r = MarginalRef::BallCoordinate { center: 0.0, radius: 1.0, dim: 2 };
        // disc: P(X ≤ 0) = 1/2, and P(X ≤ x) = 1/2 + (x√(1−x²) + asin x)/π
        assert!((r.cdf(0.0) - 0.5).abs() < 1e-12);
        let x: f64 = 0.4;
        let exact = 0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / std::f64::consts::PI;
        assert!((r.cdf(x) - exact).abs() < 1e-12);
    }

    #[test]
    fn warm_start_halves_the_box() {
        let mut rng = stream(2, 0, "warm");
        let w = warm_start(&square(), 2.0, &[1.0, 0.0], 0, &mut rng).unwrap();
        assert_eq!(w.q, 0.0);
        for _ in 0..1000 {
            let x = w.sample(&mut rng).unwrap();
            assert!(x[0] <= 0.0 && square().contains(&x));
        }
        let w1 = warm_start(&square(), 1.0, &[1.0, 0.0], 0, &mut rng).unwrap();
        assert!(Arc::ptr_eq(w1.body(), &square()) || w1.q.is_infinite());
        assert!(matches!(warm_start(&square(), 1e300, &[1.0, 0.0], 0, &mut rng), Err(Error::Range(_))));
    }

    #[test]
    fn independence_kernel_conductance() {
        let t = Target::uniform(square());
        let part = PartitionSpec::halfspace(vec![1.0, 0.0], 0.0).unwrap();
        let mut rng = stream(3, 0, "cond");
        let c = s_conductance(&ChainConfig::exact_resample(), &t, &part, 0.0, 40_000, &mut rng).unwrap();
        assert!((c.phi - 0.5).abs() < 3.0 * c.se + 1e-3, "{c:?}");
        let c = s_conductance(&ChainConfig::exact_resample(), &t, &part, 0.05, 40_000, &mut rng).unwrap();
        assert!((c.phi - 0.25 / 0.45).abs() < 3.0 * c.se + 1e-3, "{c:?}");
        let far = PartitionSpec::halfspace(vec![1.0, 0.0], -0.95).unwrap();
        assert!(matches!(
            s_conductance(&ChainConfig::exact_resample(), &t, &far, 0.05, 2000, &mut rng),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn f_u_on_disc_is_an_eighth() {
        let t = Target::uniform(Arc::new(ConvexBody::unit_ball(2).unwrap()));
        let mut rng = stream(4, 0, "fu");
        let est = estimate_f_u(&t, &[0.0, 0.0], 40_000, &mut rng).unwrap();
        assert!((est.value - 0.125).abs() < 0.005, "{est:?}");
        assert!(est.se > 0.0 && est.se < 0.005);
    }

    #[test]
    fn overlap_of_identical_points_is_zero() {
        let t = Target::uniform(square());
        let g = KernelGrid { bins: 20, angular: 512 };
        assert_eq!(kernel_overlap_tv(&t, &[0.1, 0.2], &[0.1, 0.2], &g).unwrap(), 0.0);
    }

    #[test]
    fn k_r_mass_needs_unit_ball() {
        let mut rng = stream(5, 0, "kr");
        assert!(matches!(k_r_mass(&Arc::new(ConvexBody::cube(2, 0.5).unwrap()), 0.05, 10, 100, &mut rng), Err(Error::Precondition(_))));
    }
}
