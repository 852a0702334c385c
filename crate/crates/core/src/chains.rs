//! Hit-and-run and ball-walk Markov chains, the lazy wrapper, the run loop,
//! and the closed-form hit-and-run transition density.

use crate::error::{Error, Result};
use crate::geometry::{dot, fill_uniform_direction};
use crate::rng::StreamRng;
use crate::special::unit_ball_volume;
use crate::targets::{Target, TargetKind};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_MAX_CHORD_RETRIES: u32 = 16;

/// Proposal cap for exact target draws inside a chain step.
const EXACT_MAX_TRIES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainKind {
    HitAndRun,
    /// Ball walk with step radius `delta` (Metropolis-corrected for
    /// non-uniform targets).
    BallWalk { delta: f64 },
    /// Independent exact draw from the target at every step.
    ExactResample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub kind: ChainKind,
    pub lazy: bool,
    pub max_chord_retries: u32,
}

impl ChainConfig {
    pub fn hit_and_run() -> Self {
        ChainConfig { kind: ChainKind::HitAndRun, lazy: false, max_chord_retries: DEFAULT_MAX_CHORD_RETRIES }
    }

    pub fn ball_walk(delta: f64) -> Self {
        ChainConfig { kind: ChainKind::BallWalk { delta }, ..Self::hit_and_run() }
    }

    pub fn exact_resample() -> Self {
        ChainConfig { kind: ChainKind::ExactResample, ..Self::hit_and_run() }
    }

    pub fn lazy(mut self, lazy: bool) -> Self {
        self.lazy = lazy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let ChainKind::BallWalk { delta } = self.kind {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::usage("ball walk delta must be positive"));
            }
        }
        if self.max_chord_retries == 0 {
            return Err(Error::usage("max_chord_retries must be positive"));
        }
        Ok(())
    }
}

/// What happened during one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub moved: bool,
    /// The lazy coin kept the chain in place.
    pub lazy_stay: bool,
    /// A ball-walk proposal was made and accepted.
    pub accepted: Option<bool>,
    pub chord_redraws: u32,
}

/// Reusable buffers for the in-place steps.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    theta: Vec<f64>,
    y: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Scratch { theta: vec![0.0; n], y: vec![0.0; n] }
    }
}

/// One hit-and-run move of `x`, in place. Returns the number of directions
/// redrawn because their chord was numerically degenerate.
pub(crate) fn hit_and_run_in_place<R: Rng + ?Sized>(
    x: &mut [f64],
    scratch: &mut Scratch,
    target: &Target,
    max_retries: u32,
    rng: &mut R,
) -> Result<u32> {
    let body = target.body();
    let min_length = 1e-12 * body.circum_radius();
    let mut redraws = 0u32;
    loop {
        fill_uniform_direction(rng, &mut scratch.theta);
        let (lo, hi) = body.chord_params(x, &scratch.theta);
        if hi - lo >= min_length && lo.is_finite() && hi.is_finite() {
            let law = target.chord_law(x, &scratch.theta, lo, hi);
            let mut t = law.sample(rng);
            // Rounding can put an endpoint draw a hair outside; pull it back
            // toward x, which is inside.
            let mut shrink = 1e-12;
            loop {
                for ((y, xi), th) in scratch.y.iter_mut().zip(x.iter()).zip(&scratch.theta) {
                    *y = xi + t * th;
                }
                if body.contains(&scratch.y) {
                    break;
                }
                if shrink >= 1.0 {
                    scratch.y.copy_from_slice(x);
                    break;
                }
                t *= 1.0 - shrink;
                shrink *= 16.0;
            }
            x.copy_from_slice(&scratch.y);
            return Ok(redraws);
        }
        redraws += 1;
        if redraws > max_retries {
            return Err(Error::Step(format!(
                "chord degenerate after {max_retries} direction redraws"
            )));
        }
    }
}

/// One ball-walk move of `x`, in place; returns whether the proposal was
/// accepted.
pub(crate) fn ball_walk_in_place<R: Rng + ?Sized>(
    x: &mut [f64],
    scratch: &mut Scratch,
    target: &Target,
    delta: f64,
    rng: &mut R,
) -> bool {
    let n = x.len();
    fill_uniform_direction(rng, &mut scratch.theta);
    let radius = delta * rng.random::<f64>().powf(1.0 / n as f64);
    for ((y, xi), th) in scratch.y.iter_mut().zip(x.iter()).zip(&scratch.theta) {
        *y = xi + radius * th;
    }
    if !target.body().contains(&scratch.y) {
        return false;
    }
    let accept = match target.kind() {
        TargetKind::Uniform => true,
        TargetKind::TruncatedGaussian { .. } => {
            let log_ratio = target.log_density_inside(&scratch.y) - target.log_density_inside(x);
            log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
        }
    };
    if accept {
        x.copy_from_slice(&scratch.y);
    }
    accept
}

fn check_start(target: &Target, x: &[f64]) -> Result<()> {
    if !target.body().membership(x)? {
        return Err(Error::domain("chain state lies outside the body"));
    }
    Ok(())
}

/// One hit-and-run step from `x`.
pub fn hit_and_run_step<R: Rng + ?Sized>(x: &[f64], target: &Target, rng: &mut R) -> Result<Vec<f64>> {
    check_start(target, x)?;
    let mut y = x.to_vec();
    let mut scratch = Scratch::new(x.len());
    hit_and_run_in_place(&mut y, &mut scratch, target, DEFAULT_MAX_CHORD_RETRIES, rng)?;
    Ok(y)
}

/// One ball-walk step from `x`; the flag reports acceptance.
pub fn ball_walk_step<R: Rng + ?Sized>(
    x: &[f64],
    target: &Target,
    delta: f64,
    rng: &mut R,
) -> Result<(Vec<f64>, bool)> {
    check_start(target, x)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::usage("ball walk delta must be positive"));
    }
    let mut y = x.to_vec();
    let mut scratch = Scratch::new(x.len());
    let accepted = ball_walk_in_place(&mut y, &mut scratch, target, delta, rng);
    Ok((y, accepted))
}

/// Lazy version of `inner`: returns `x` unchanged with probability 1/2.
pub fn lazy_step<R, F>(x: &[f64], rng: &mut R, inner: F) -> Result<Vec<f64>>
where
    R: Rng + ?Sized,
    F: FnOnce(&mut R) -> Result<Vec<f64>>,
{
    if rng.random::<bool>() {
        Ok(x.to_vec())
    } else {
        inner(rng)
    }
}

/// Current point, step counter and private RNG stream of one chain replica.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub x: Vec<f64>,
    pub steps_taken: u64,
    pub rng: StreamRng,
    scratch: Scratch,
}

impl ChainState {
    pub fn new(x: Vec<f64>, rng: StreamRng) -> Self {
        let n = x.len();
        ChainState { x, steps_taken: 0, rng, scratch: Scratch::new(n) }
    }

    /// Advances the chain one step. The state must lie in the target's body.
    pub fn step(&mut self, config: &ChainConfig, target: &Target) -> Result<StepOutcome> {
        let mut out = StepOutcome::default();
        self.steps_taken += 1;
        if config.lazy && self.rng.random::<bool>() {
            out.lazy_stay = true;
            return Ok(out);
        }
        match config.kind {
            ChainKind::HitAndRun => {
                out.chord_redraws = hit_and_run_in_place(
                    &mut self.x,
                    &mut self.scratch,
                    target,
                    config.max_chord_retries,
                    &mut self.rng,
                )?;
                out.moved = true;
            }
            ChainKind::BallWalk { delta } => {
                let acc = ball_walk_in_place(&mut self.x, &mut self.scratch, target, delta, &mut self.rng);
                out.accepted = Some(acc);
                out.moved = acc;
            }
            ChainKind::ExactResample => {
                self.x = target.sample_exact(&mut self.rng, EXACT_MAX_TRIES)?;
                out.moved = true;
            }
        }
        Ok(out)
    }
}

/// One recorded state of a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub x: Vec<f64>,
    /// Whether the chain moved since the previous recorded row.
    pub moved: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ChainStats {
    pub n_steps: u64,
    pub moves: u64,
    pub lazy_stays: u64,
    pub proposals: u64,
    pub accepted: u64,
    /// Ball-walk acceptance rate; `None` for other kernels.
    pub acceptance_rate: Option<f64>,
    pub degenerate_redraws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRun {
    pub rows: Vec<TraceRow>,
    pub stats: ChainStats,
}

impl ChainRun {
    pub fn samples(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.x.clone()).collect()
    }
}

/// Runs `n_steps` steps from `init`, recording the initial state and every
/// `thin`-th state after it.
pub fn run_chain(
    config: &ChainConfig,
    target: &Target,
    init: &[f64],
    n_steps: u64,
    thin: u64,
    rng: StreamRng,
) -> Result<ChainRun> {
    config.validate()?;
    if thin == 0 {
        return Err(Error::usage("thin must be positive"));
    }
    check_start(target, init)?;
    let mut state = ChainState::new(init.to_vec(), rng);
    let mut rows = vec![TraceRow { step: 0, x: init.to_vec(), moved: false }];
    let mut stats = ChainStats { n_steps, ..Default::default() };
    let mut moved_since = false;
    for step in 1..=n_steps {
        let out = state.step(config, target)?;
        stats.moves += out.moved as u64;
        stats.lazy_stays += out.lazy_stay as u64;
        stats.degenerate_redraws += out.chord_redraws as u64;
        if let Some(acc) = out.accepted {
            stats.proposals += 1;
            stats.accepted += acc as u64;
        }
        moved_since |= out.moved;
        if step % thin == 0 {
            rows.push(TraceRow { step, x: state.x.clone(), moved: moved_since });
            moved_since = false;
        }
    }
    if let ChainKind::BallWalk { .. } = config.kind {
        stats.acceptance_rate =
            Some(if stats.proposals == 0 { 0.0 } else { stats.accepted as f64 / stats.proposals as f64 });
    }
    Ok(ChainRun { rows, stats })
}

/// `2 / (n π_n)`.
fn kernel_prefactor(n: usize) -> f64 {
    2.0 / (n as f64 * unit_ball_volume(n))
}

/// The hit-and-run transition density `p(u, x)` with respect to Lebesgue
/// measure, for `u ≠ x`.
pub fn transition_density(u: &[f64], x: &[f64], target: &Target) -> Result<f64> {
    let n = target.dim();
    if u.len() != n || x.len() != n {
        return Err(Error::usage("points have wrong dimension"));
    }
    let body = target.body();
    if !body.contains(u) {
        return Err(Error::domain("kernel base point lies outside the body"));
    }
    let diff: Vec<f64> = x.iter().zip(u).map(|(a, b)| a - b).collect();
    let d = dot(&diff, &diff).sqrt();
    if d == 0.0 {
        return Err(Error::Singular("transition density evaluated at x = u".into()));
    }
    if !body.contains(x) {
        return Ok(0.0);
    }
    let theta: Vec<f64> = diff.iter().map(|v| v / d).collect();
    let (lo, hi) = body.chord_params(u, &theta);
    let law = target.chord_law(u, &theta, lo, hi);
    Ok(kernel_prefactor(n) * law.log_density(d.min(hi)).exp() / law.mass() / d.powi(n as i32 - 1))
}

/// Resolution of the kernel quadrature used by [`empirical_kernel_tv`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelGrid {
    /// Histogram cells per axis over the body's bounding box.
    pub bins: usize,
    /// Angular resolution: number of ray directions in 2-D, number of polar
    /// bands in 3-D (with twice as many azimuths).
    pub angular: usize,
}

impl KernelGrid {
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => KernelGrid { bins: 50, angular: 1 << 16 },
            _ => KernelGrid { bins: 16, angular: 192 },
        }
    }
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Directions and their solid-angle weights for ray quadrature.
fn ray_directions(n: usize, angular: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        2 => (0..angular)
            .map(|k| {
                let a = 2.0 * PI * (k as f64 + 0.5) / angular as f64;
                (vec![a.cos(), a.sin()], 2.0 * PI / angular as f64)
            })
            .collect(),
        _ => {
            let n_az = 2 * angular;
            let w = 4.0 * PI / (angular * n_az) as f64;
            let mut out = Vec::with_capacity(angular * n_az);
            for i in 0..angular {
                // equal-area bands in cos(polar angle)
                let c = -1.0 + 2.0 * (i as f64 + 0.5) / angular as f64;
                let s = (1.0 - c * c).sqrt();
                for j in 0..n_az {
                    let a = 2.0 * PI * (j as f64 + 0.5) / n_az as f64;
                    out.push((vec![s * a.cos(), s * a.sin(), c], w));
                }
            }
            out
        }
    }
}

fn cell_index(x: &[f64], lower: &[f64], width: &[f64], bins: usize) -> usize {
    let mut idx = 0;
    for i in (0..x.len()).rev() {
        let c = (((x[i] - lower[i]) / width[i]).floor().max(0.0) as usize).min(bins - 1);
        idx = idx * bins + c;
    }
    idx
}

/// Probability of each bounding-box cell under one hit-and-run step from `u`.
///
/// Integrates `transition_density(u, ·)` in polar coordinates around `u`:
/// along each ray the integrand `p(u, u + rθ) r^{n−1}` is smooth, the ray is
/// split exactly where it crosses grid planes, and each piece is integrated
/// by 5-point Gauss–Legendre.
pub(crate) fn kernel_cell_masses(u: &[f64], target: &Target, grid: &KernelGrid) -> Result<Vec<f64>> {
    let n = target.dim();
    if !(n == 2 || n == 3) {
        return Err(Error::usage("kernel quadrature supports dimension 2 or 3 only"));
    }
    if u.len() != n {
        return Err(Error::usage("point has wrong dimension"));
    }
    if grid.bins == 0 || grid.angular == 0 {
        return Err(Error::usage("kernel grid must be nonempty"));
    }
    let body = target.body();
    if !body.contains(u) {
        return Err(Error::domain("kernel base point lies outside the body"));
    }
    let (lower, upper) = body.bounding_box();
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, h)| (h - l) / grid.bins as f64).collect();
    let pref = kernel_prefactor(n);
    let mut masses = vec![0.0; grid.bins.pow(n as u32)];
    let mut breaks: Vec<f64> = Vec::new();
    let mut mid = vec![0.0; n];
    for (theta, weight) in ray_directions(n, grid.angular) {
        let (lo, hi) = body.chord_params(u, &theta);
        if !(hi > 0.0) {
            continue;
        }
        let law = target.chord_law(u, &theta, lo, hi);
        let scale = weight * pref / law.mass();
        breaks.clear();
        breaks.push(0.0);
        breaks.push(hi);
        for i in 0..n {
            if theta[i] == 0.0 {
                continue;
            }
            let end = u[i] + hi * theta[i];
            let (a, b) = if end > u[i] { (u[i], end) } else { (end, u[i]) };
            let k0 = ((a - lower[i]) / width[i]).floor() as i64 + 1;
            let k1 = ((b - lower[i]) / width[i]).ceil() as i64 - 1;
            for k in k0.max(1)..=k1.min(grid.bins as i64 - 1) {
                let r = (lower[i] + k as f64 * width[i] - u[i]) / theta[i];
                if r > 0.0 && r < hi {
                    breaks.push(r);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        for w in breaks.windows(2) {
            let (r0, r1) = (w[0], w[1]);
            if r1 <= r0 {
                continue;
            }
            let half = 0.5 * (r1 - r0);
            let centre = 0.5 * (r0 + r1);
            let mut acc = 0.0;
            for (z, gw) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
                acc += gw * law.log_density(centre + half * z).exp();
            }
            for i in 0..n {
                mid[i] = u[i] + centre * theta[i];
            }
            masses[cell_index(&mid, lower, &width, grid.bins)] += scale * half * acc;
        }
    }
    Ok(masses)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTv {
    pub tv: f64,
    /// Expected TV between a multinomial histogram of this size and its own
    /// cell probabilities.
    pub noise_floor: f64,
    /// Total quadrature mass; 1 up to quadrature error.
    pub quadrature_mass: f64,
    pub n_samples: usize,
}

/// Expected `½ Σ |p̂ − q|` for `N` multinomial draws, by the normal
/// approximation `E|p̂ − q| ≈ √(2q(1−q)/(πN))`.
pub(crate) fn histogram_noise_floor(probs: &[f64], n: usize) -> f64 {
    0.5 * probs
        .iter()
        .map(|&q| {
            let q = q.clamp(0.0, 1.0);
            (2.0 * q * (1.0 - q) / (PI * n as f64)).sqrt()
        })
        .sum::<f64>()
}

/// Histogram of one-step hit-and-run draws from `u` over the kernel grid.
pub(crate) fn one_step_histogram<R: Rng + ?Sized>(
    u: &[f64],
    target: &Target,
    n_samples: usize,
    bins: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let n = u.len();
    let (lower, upper) = target.body().bounding_box();
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, h)| (h - l) / bins as f64).collect();
    let mut counts = vec![0u64; bins.pow(n as u32)];
    let mut scratch = Scratch::new(n);
    let mut y = u.to_vec();
    for _ in 0..n_samples {
        y.copy_from_slice(u);
        hit_and_run_in_place(&mut y, &mut scratch, target, DEFAULT_MAX_CHORD_RETRIES, rng)?;
        counts[cell_index(&y, lower, &width, bins)] += 1;
    }
    Ok(counts)
}

/// TV distance between a histogram of `n_samples` one-step hit-and-run draws
/// from `u` and the grid-integrated transition density.
pub fn empirical_kernel_tv<R: Rng + ?Sized>(
    u: &[f64],
    target: &Target,
    n_samples: usize,
    grid: &KernelGrid,
    rng: &mut R,
) -> Result<KernelTv> {
    if n_samples == 0 {
        return Err(Error::usage("need at least one sample"));
    }
    let probs = kernel_cell_masses(u, target, grid)?;
    let counts = one_step_histogram(u, target, n_samples, grid.bins, rng)?;
    let tv = 0.5
        * probs
            .iter()
            .zip(&counts)
            .map(|(q, &c)| (c as f64 / n_samples as f64 - q).abs())
            .sum::<f64>();
    Ok(KernelTv {
        tv,
        noise_floor: histogram_noise_floor(&probs, n_samples),
        quadrature_mass: probs.iter().sum(),
        n_samples,
    })
}

/// TV distance between two histograms over the same cells.
pub fn histogram_tv(a: &[u64], b: &[u64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::usage("histograms have different cell counts"));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::usage("empty histogram"));
    }
    Ok(0.5
        * a.iter()
            .zip(b)
            .map(|(&x, &y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
            .sum::<f64>())
}

/// Histogram of `n_samples` one-step hit-and-run draws from `u` on a
/// `bins`-per-axis grid over the bounding box.
pub fn kernel_histogram<R: Rng + ?Sized>(
    u: &[f64],
    target: &Target,
    n_samples: usize,
    bins: usize,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if bins == 0 {
        return Err(Error::usage("bins must be positive"));
    }
    if !target.body().membership(u)? {
        return Err(Error::domain("kernel base point lies outside the body"));
    }
    one_step_histogram(u, target, n_samples, bins, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;
    use crate::rng::stream;
    use std::sync::Arc;

    fn disc() -> Arc<ConvexBody> {
        Arc::new(ConvexBody::unit_ball(2).unwrap())
    }

    fn square() -> Arc<ConvexBody> {
        Arc::new(ConvexBody::cube(2, 1.0).unwrap())
    }

    #[test]
    fn density_closed_forms() {
        let t = Target::uniform(disc());
        let p = transition_density(&[0.0, 0.0], &[0.5, 0.0], &t).unwrap();
        assert!((p - 1.0 / PI).abs() < 1e-12);
        let t = Target::uniform(square());
        let p = transition_density(&[0.5, 0.0], &[-0.5, 0.0], &t).unwrap();
        assert!((p - 0.5 / PI).abs() < 1e-12);
        assert!(matches!(transition_density(&[0.1, 0.1], &[0.1, 0.1], &t), Err(Error::Singular(_))));
        assert_eq!(transition_density(&[0.0, 0.0], &[2.0, 0.0], &t).unwrap(), 0.0);
    }

    #[test]
    fn lazy_coin_is_fair() {
        let mut rng = stream(3, 0, "lazy");
        let n = 1_000_000;
        let stays = (0..n)
            .filter(|_| lazy_step(&[0.0], &mut rng, |_| Ok(vec![1.0])).unwrap()[0] == 0.0)
            .count();
        assert!((stays as f64 / n as f64 - 0.5).abs() < 0.0015);
    }

    #[test]
    fn ball_walk_at_center_always_moves() {
        let t = Target::uniform(disc());
        let mut rng = stream(4, 0, "bw");
        for _ in 0..1000 {
            let (_, acc) = ball_walk_step(&[0.0, 0.0], &t, 0.1, &mut rng).unwrap();
            assert!(acc);
        }
    }

    #[test]
    fn ball_walk_corner_acceptance_is_a_quarter() {
        let t = Target::uniform(square());
        let mut rng = stream(5, 0, "bw");
        let n = 40_000;
        let acc = (0..n).filter(|_| ball_walk_step(&[1.0, 1.0], &t, 1e-6, &mut rng).unwrap().1).count();
        assert!((acc as f64 / n as f64 - 0.25).abs() < 0.01);
    }

    #[test]
    fn run_chain_records_init_and_is_deterministic() {
        let t = Target::uniform(square());
        let cfg = ChainConfig::hit_and_run();
        let run = run_chain(&cfg, &t, &[0.0, 0.0], 0, 1, stream(1, 0, "c")).unwrap();
        assert_eq!(run.rows.len(), 1);
        assert_eq!(run.rows[0].x, vec![0.0, 0.0]);
        let a = run_chain(&cfg, &t, &[0.0, 0.0], 100, 10, stream(1, 0, "c")).unwrap();
        let b = run_chain(&cfg, &t, &[0.0, 0.0], 100, 10, stream(1, 0, "c")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 11);
        assert!(matches!(
            run_chain(&cfg, &t, &[3.0, 0.0], 1, 1, stream(1, 0, "c")),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ball_walk_reports_acceptance() {
        let t = Target::uniform(square());
        let run = run_chain(&ChainConfig::ball_walk(0.5), &t, &[0.0, 0.0], 2000, 1, stream(2, 0, "c")).unwrap();
        let rate = run.stats.acceptance_rate.unwrap();
        assert!(rate > 0.5 && rate < 1.0);
        let hr = run_chain(&ChainConfig::hit_and_run(), &t, &[0.0, 0.0], 10, 1, stream(2, 0, "c")).unwrap();
        assert!(hr.stats.acceptance_rate.is_none());
    }

    #[test]
    fn kernel_quadrature_has_unit_mass() {
        let t = Target::uniform(disc());
        let g = KernelGrid { bins: 20, angular: 4096 };
        let m: f64 = kernel_cell_masses(&[0.3, 0.0], &t, &g).unwrap().iter().sum();
        assert!((m - 1.0).abs() < 1e-9, "{m}");
        let t = Target::truncated_gaussian(Arc::new(ConvexBody::cube(3, 1.0).unwrap()), vec![0.5, 0.0, 0.0], 4.0)
            .unwrap();
        let g = KernelGrid { bins: 8, angular: 32 };
        let m: f64 = kernel_cell_masses(&[0.2, 0.1, -0.3], &t, &g).unwrap().iter().sum();
        assert!((m - 1.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn kernel_tv_rejects_unsupported_dimension() {
        let t = Target::uniform(Arc::new(ConvexBody::cube(4, 1.0).unwrap()));
        let mut rng = stream(0, 0, "k");
        let g = KernelGrid::default_for(4);
        assert!(matches!(empirical_kernel_tv(&[0.0; 4], &t, 10, &g, &mut rng), Err(Error::Usage(_))));
    }

    #[test]
    fn exact_resample_kernel_moves_every_step() {
        let t = Target::uniform(square());
        let run = run_chain(&ChainConfig::exact_resample(), &t, &[0.0, 0.0], 50, 1, stream(9, 0, "c")).unwrap();
        assert_eq!(run.stats.moves, 50);
    }
}
