//! Stochastic localization with identity driving matrix, and the
//! one-dimensional localization process on a grid.
//!
//! With identity driving matrix the localized measure at time `t > 0` is the
//! truncated Gaussian `μ_t = ν_{c_t/t, t}` and `μ_0` is uniform on the body.
//! The path `c_t` follows `dc = dW + b(μ_t) dt`, where `b` is the center of
//! mass, simulated by Euler–Maruyama with a hit-and-run estimate of `b`.

use crate::chains::{hit_and_run_in_place, ChainConfig, ChainState, Scratch};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::rng::StreamRng;
use crate::stats::{mean_var, top_covariance_eigen, Estimate, TopEigen};
use crate::targets::{Target, TargetKind};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::f64::consts::SQRT_2;
use std::sync::Arc;

/// Cap on rejection proposals for direct draws.
const DIRECT_MAX_TRIES: usize = 1_000_000;

/// Hit-and-run budget used to estimate `b(μ_t)` at each Euler step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerBudget {
    pub n_samples: usize,
    pub burn_in: usize,
}

impl Default for InnerBudget {
    fn default() -> Self {
        InnerBudget { n_samples: 256, burn_in: 64 }
    }
}

/// Default Euler step for a run of total duration `t_total`.
pub fn default_step(t_total: f64) -> f64 {
    (1.0 / 64.0f64).min(t_total / 256.0)
}

/// State of one stochastic localization path.
///
/// The inner hit-and-run chain is persistent: each Euler step continues from
/// the point where the previous estimate of `b(μ_t)` stopped.
#[derive(Debug, Clone)]
pub struct SLState {
    pub c: Vec<f64>,
    pub t: f64,
    pub inner_chain: ChainConfig,
    pub budget: InnerBudget,
    inner_x: Vec<f64>,
}

impl SLState {
    pub fn new(body: &ConvexBody, inner_chain: ChainConfig, budget: InnerBudget) -> Self {
        SLState {
            c: vec![0.0; body.dim()],
            t: 0.0,
            inner_chain,
            budget,
            inner_x: body.interior_point().to_vec(),
        }
    }

    /// `μ_t`: uniform at `t = 0`, otherwise `ν_{c/t, t}`.
    pub fn measure(&self, body: &Arc<ConvexBody>) -> Result<Target> {
        if self.t == 0.0 {
            return Ok(Target::uniform(body.clone()));
        }
        let beta = self.c.iter().map(|v| v / self.t).collect();
        Target::truncated_gaussian(body.clone(), beta, self.t)
    }

    /// Current point of the inner chain.
    pub fn inner_point(&self) -> &[f64] {
        &self.inner_x
    }

    /// Continues the inner chain on `μ_t` for the burn-in and then
    /// `n_samples` steps, recording every `thin`-th state.
    pub fn sample_current(
        &mut self,
        body: &Arc<ConvexBody>,
        burn_in: usize,
        n_samples: usize,
        thin: usize,
        rng: &mut StreamRng,
    ) -> Result<Vec<Vec<f64>>> {
        let target = self.measure(body)?;
        let mut state = ChainState::new(std::mem::take(&mut self.inner_x), rng.clone());
        for _ in 0..burn_in {
            state.step(&self.inner_chain, &target)?;
        }
        let thin = thin.max(1);
        let mut out = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            for _ in 0..thin {
                state.step(&self.inner_chain, &target)?;
            }
            out.push(state.x.clone());
        }
        self.inner_x = state.x;
        *rng = state.rng;
        Ok(out)
    }
}

/// Hit-and-run estimate of the center of mass of `μ_t`, reusing the
/// persistent inner chain. Allocation-free in the step loop.
fn center_of_mass(state: &mut SLState, body: &Arc<ConvexBody>, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let target = state.measure(body)?;
    let n = body.dim();
    let mut scratch = Scratch::new(n);
    let retries = state.inner_chain.max_chord_retries;
    let mut sum = vec![0.0; n];
    let x = &mut state.inner_x;
    let hit_and_run = matches!(state.inner_chain.kind, crate::chains::ChainKind::HitAndRun) && !state.inner_chain.lazy;
    if hit_and_run {
        for _ in 0..state.budget.burn_in {
            hit_and_run_in_place(x, &mut scratch, &target, retries, rng)?;
        }
        for _ in 0..state.budget.n_samples {
            hit_and_run_in_place(x, &mut scratch, &target, retries, rng)?;
            sum.iter_mut().zip(x.iter()).for_each(|(s, v)| *s += v);
        }
    } else {
        let samples = state.sample_current(body, state.budget.burn_in, state.budget.n_samples, 1, rng)?;
        for p in &samples {
            sum.iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
    }
    let k = state.budget.n_samples.max(1) as f64;
    Ok(sum.into_iter().map(|s| s / k).collect())
}

/// One Euler–Maruyama step `c ← c + √h ξ + h b̂`, `t ← t + h`.
///
/// `base` must be the uniform target on the body being localized.
pub fn sl_step(state: &mut SLState, h: f64, base: &Target, rng: &mut StreamRng) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::usage("Euler step h must be positive"));
    }
    if !matches!(base.kind(), TargetKind::Uniform) {
        return Err(Error::usage("localization starts from a uniform target"));
    }
    if state.budget.n_samples == 0 {
        return Err(Error::usage("inner sample budget must be positive"));
    }
    let body = base.body_arc();
    let b_hat = center_of_mass(state, body, rng)?;
    let sh = h.sqrt();
    for (ci, bi) in state.c.iter_mut().zip(&b_hat) {
        let xi: f64 = StandardNormal.sample(rng);
        *ci += sh * xi + h * bi;
    }
    state.t += h;
    Ok(())
}

/// Exact draw of `X + Z` with `X` uniform on the body and `Z ~ N(0, I/T)`,
/// the law of `c_T / T`.
pub fn direct_ct_sample<R: Rng + ?Sized>(body: &ConvexBody, big_t: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(big_t > 0.0 && big_t.is_finite()) {
        return Err(Error::usage("T must be positive"));
    }
    let mut x = body.sample_uniform(rng, DIRECT_MAX_TRIES)?;
    let s = 1.0 / big_t.sqrt();
    for v in x.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v += s * z;
    }
    Ok(x)
}

/// Runs one localization path to time `t_total` with step `h` and returns
/// `c_T / T`.
pub fn simulate_ct_over_t(
    base: &Target,
    t_total: f64,
    h: f64,
    inner_chain: ChainConfig,
    budget: InnerBudget,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    let mut state = SLState::new(base.body(), inner_chain, budget);
    let n_steps = (t_total / h).round().max(1.0) as usize;
    let h = t_total / n_steps as f64;
    for _ in 0..n_steps {
        sl_step(&mut state, h, base, rng)?;
    }
    Ok(state.c.iter().map(|c| c / state.t).collect())
}

pub const SHELL_INNER: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const SHELL_OUTER: f64 = SQRT_2;

/// Budget for the hit-and-run shell estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellBudget {
    pub burn_in: usize,
    pub thin: usize,
}

impl ShellBudget {
    pub fn default_for(n: usize) -> Self {
        ShellBudget { burn_in: 200 * n, thin: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellMass {
    /// Hit-and-run estimate with batch-means standard error.
    pub chain: Estimate,
    /// Independent estimate from exact draws, when rejection is feasible.
    pub exact: Option<Estimate>,
}

fn in_shell(x: &[f64], beta: &[f64]) -> bool {
    let d2: f64 = x.iter().zip(beta).map(|(a, b)| (a - b) * (a - b)).sum();
    d2 > SHELL_INNER * SHELL_INNER && d2 < SHELL_OUTER * SHELL_OUTER
}

/// A starting point for a chain on `ν_{β,m}`: the nearest point of the box
/// (pulled slightly inside) for boxes, the interior point otherwise.
fn warm_point(body: &ConvexBody, beta: &[f64]) -> Vec<f64> {
    if let Some((lower, upper)) = body.as_box() {
        return beta
            .iter()
            .zip(lower.iter().zip(upper))
            .map(|(b, (l, u))| {
                let inset = 1e-9 * (u - l);
                b.clamp(l + inset, u - inset)
            })
            .collect();
    }
    body.interior_point().to_vec()
}

/// `P(1/√2 < |x − β| < √2)` for `x ~ ν_{β,n}` with `n` the dimension.
pub fn shell_mass(
    body: &Arc<ConvexBody>,
    beta: &[f64],
    n_samples: usize,
    budget: ShellBudget,
    rng: &mut StreamRng,
) -> Result<ShellMass> {
    let n = body.dim();
    if n_samples == 0 {
        return Err(Error::usage("shell_mass needs at least one sample"));
    }
    let target = Target::truncated_gaussian(body.clone(), beta.to_vec(), n as f64)?;
    let mut x = warm_point(body, beta);
    let mut scratch = Scratch::new(n);
    for _ in 0..budget.burn_in {
        hit_and_run_in_place(&mut x, &mut scratch, &target, 16, rng)?;
    }
    let mut hits = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        for _ in 0..budget.thin.max(1) {
            hit_and_run_in_place(&mut x, &mut scratch, &target, 16, rng)?;
        }
        hits.push(if in_shell(&x, beta) { 1.0 } else { 0.0 });
    }
    let (mean, _) = mean_var(&hits);
    let chain = Estimate { value: mean, se: crate::stats::batch_means_se(&hits, 20), n_samples };

    let exact = if body.as_box().is_some() || n <= 8 {
        let mut inside = 0usize;
        let mut ok = true;
        for _ in 0..n_samples {
            match target.sample_exact(rng, DIRECT_MAX_TRIES) {
                Ok(y) => inside += in_shell(&y, beta) as usize,
                Err(Error::Efficiency(_)) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        ok.then(|| Estimate::from_proportion(inside, n_samples))
    } else {
        None
    };
    Ok(ShellMass { chain, exact })
}

/// Checkpoint summary along a localization path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlTraceRow {
    pub t: f64,
    pub c: Vec<f64>,
    pub top_eigen: TopEigen,
    /// Fraction of the checkpoint samples in `{x : a·x ≤ b}`.
    pub event_mass: f64,
}

/// Settings for [`run_sl_path`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlPathConfig {
    pub h: f64,
    pub checkpoints: Vec<f64>,
    pub inner_chain: ChainConfig,
    pub budget: InnerBudget,
    /// Samples of `μ_t` drawn at each checkpoint.
    pub checkpoint_samples: usize,
    pub checkpoint_thin: usize,
    /// Halfspace `a·x ≤ b` whose `μ_t` mass is tracked.
    pub event_normal: Vec<f64>,
    pub event_offset: f64,
}

/// Simulates one path and summarizes `μ_t` at each checkpoint.
pub fn run_sl_path(base: &Target, config: &SlPathConfig, rng: &mut StreamRng) -> Result<Vec<SlTraceRow>> {
    if config.checkpoints.windows(2).any(|w| w[1] <= w[0]) || config.checkpoints.iter().any(|t| *t < 0.0) {
        return Err(Error::usage("checkpoints must be nonnegative and strictly increasing"));
    }
    if config.event_normal.len() != base.dim() {
        return Err(Error::usage("event normal has wrong dimension"));
    }
    if config.checkpoint_samples < 2 {
        return Err(Error::usage("need at least two checkpoint samples"));
    }
    let body = base.body_arc();
    let mut state = SLState::new(body, config.inner_chain, config.budget);
    let mut rows = Vec::with_capacity(config.checkpoints.len());
    for &target_t in &config.checkpoints {
        while state.t < target_t - 1e-12 {
            let h = config.h.min(target_t - state.t);
            sl_step(&mut state, h, base, rng)?;
        }
        let samples =
            state.sample_current(body, config.budget.burn_in, config.checkpoint_samples, config.checkpoint_thin, rng)?;
        let top_eigen = top_covariance_eigen(&samples, 20);
        let inside = samples
            .iter()
            .filter(|x| crate::geometry::dot(x, &config.event_normal) <= config.event_offset)
            .count();
        rows.push(SlTraceRow {
            t: state.t,
            c: state.c.clone(),
            top_eigen,
            event_mass: inside as f64 / samples.len() as f64,
        });
    }
    Ok(rows)
}

/// Mass of `{x_axis > threshold}` under `μ_t` for a box, in closed form.
pub fn box_axis_mass(state: &SLState, body: &Arc<ConvexBody>, axis: usize, threshold: f64) -> Result<f64> {
    let (lower, upper) = body
        .as_box()
        .ok_or_else(|| Error::usage("closed-form axis mass needs an uncut box"))?;
    if axis >= body.dim() {
        return Err(Error::usage("axis out of range"));
    }
    let (l, u) = (lower[axis], upper[axis]);
    let law = match state.measure(body)?.kind() {
        TargetKind::Uniform => crate::targets::ChordLaw::UniformSegment { a: l, b: u },
        TargetKind::TruncatedGaussian { beta, m } => {
            crate::targets::ChordLaw::TruncGauss1D { center: beta[axis], std: 1.0 / m.sqrt(), a: l, b: u }
        }
    };
    Ok(1.0 - law.cdf(threshold))
}

/// A probability measure on an equally spaced grid, stored as cell masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid1D {
    z_min: f64,
    z_max: f64,
    mass: Vec<f64>,
}

pub const MIN_GRID_CELLS: usize = 64;

impl Grid1D {
    /// Normalises `mass` to sum to one.
    pub fn new(z_min: f64, z_max: f64, mass: Vec<f64>) -> Result<Self> {
        if !(z_min < z_max) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::usage("grid bounds must be finite with z_min < z_max"));
        }
        if mass.len() < MIN_GRID_CELLS {
            return Err(Error::usage(format!("grid needs at least {MIN_GRID_CELLS} cells")));
        }
        if mass.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
            return Err(Error::usage("grid masses must be finite and nonnegative"));
        }
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Underflow("grid has zero total mass".into()));
        }
        Ok(Grid1D { z_min, z_max, mass: mass.into_iter().map(|m| m / total).collect() })
    }

    /// Discretises a density by its values at cell centers.
    pub fn from_density<F: Fn(f64) -> f64>(z_min: f64, z_max: f64, n_cells: usize, density: F) -> Result<Self> {
        let dz = (z_max - z_min) / n_cells as f64;
        let mass = (0..n_cells).map(|i| density(z_min + (i as f64 + 0.5) * dz)).collect();
        Self::new(z_min, z_max, mass)
    }

    pub fn standard_normal(n_cells: usize, half_width: f64) -> Result<Self> {
        Self::from_density(-half_width, half_width, n_cells, |z| (-0.5 * z * z).exp())
    }

    /// Uniform on `[a, b]` with cells exactly covering the interval.
    pub fn uniform(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        Self::new(a, b, vec![1.0; n_cells])
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn n_cells(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / self.mass.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.z_min + (i as f64 + 0.5) * self.spacing()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.mass.len()).map(|i| self.center(i))
    }

    pub fn mean(&self) -> f64 {
        self.centers().zip(&self.mass).map(|(z, m)| z * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.centers().zip(&self.mass).map(|(z, m)| (z - mu) * (z - mu) * m).sum()
    }

    /// A cell center drawn with probability equal to its mass.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, m) in self.mass.iter().enumerate() {
            acc += m;
            if u < acc {
                return self.center(i);
            }
        }
        let last = self.mass.iter().rposition(|m| *m > 0.0).unwrap_or(self.mass.len() - 1);
        self.center(last)
    }

    /// Half the L¹ distance between two grids on the same cells.
    pub fn tv(&self, other: &Grid1D) -> Result<f64> {
        if self.mass.len() != other.mass.len() || self.z_min != other.z_min || self.z_max != other.z_max {
            return Err(Error::usage("grids differ"));
        }
        Ok(0.5 * self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }
}

/// Gaussian tilt `exp(−(tau/2)(z − y)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tilt1DParams {
    pub y: f64,
    /// Accumulated time times `σ²`.
    pub tau: f64,
    pub sigma2: f64,
    /// Total duration of the 1-D process.
    pub alpha: f64,
}

impl Tilt1DParams {
    pub fn validate(&self) -> Result<()> {
        if !self.y.is_finite() {
            return Err(Error::usage("tilt center must be finite"));
        }
        if !(self.sigma2 > 0.0 && self.alpha > 0.0) {
            return Err(Error::usage("sigma2 and alpha must be positive"));
        }
        if !(self.tau >= 0.0) || self.tau > self.alpha * self.sigma2 * (1.0 + 1e-12) {
            return Err(Error::usage("tau must lie in [0, alpha·sigma2]"));
        }
        Ok(())
    }
}

/// `ω0(z)·exp(−(tau/2)(z − y)²)`, renormalised.
pub fn tilt_1d(omega0: &Grid1D, params: &Tilt1DParams) -> Result<Grid1D> {
    params.validate()?;
    tilt_log(omega0, |z| -0.5 * params.tau * (z - params.y) * (z - params.y))
}

/// Multiplies cell masses by `exp(log_weight(center))` and renormalises in
/// the log domain.
fn tilt_log<F: Fn(f64) -> f64>(omega0: &Grid1D, log_weight: F) -> Result<Grid1D> {
    let logs: Vec<f64> = omega0
        .centers()
        .zip(&omega0.mass)
        .map(|(z, &m)| if m > 0.0 { log_weight(z) } else { f64::NEG_INFINITY })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() || top < -708.0 {
        return Err(Error::Underflow("tilt leaves no representable mass on the grid".into()));
    }
    let mass: Vec<f64> = logs.iter().zip(&omega0.mass).map(|(l, m)| m * (l - top).exp()).collect();
    Grid1D::new(omega0.z_min, omega0.z_max, mass)
}

/// Draw from `ρ = ω0 * N(0, 1/(ασ²))`.
pub fn sample_rho<R: Rng + ?Sized>(omega0: &Grid1D, alpha: f64, sigma2: f64, rng: &mut R) -> Result<f64> {
    let prec = alpha * sigma2;
    if !(prec > 0.0) {
        return Err(Error::usage("alpha·sigma2 must be positive"));
    }
    let z = omega0.sample(rng);
    let xi: f64 = StandardNormal.sample(rng);
    Ok(z + xi / prec.sqrt())
}

/// `Σ h(z)·ω(z)` over the grid.
pub fn apply_h(omega: &Grid1D, h: &[f64]) -> Result<f64> {
    if h.len() != omega.n_cells() {
        return Err(Error::usage("h has wrong length"));
    }
    if h.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::usage("h must take values in [0, 1]"));
    }
    Ok(h.iter().zip(&omega.mass).map(|(a, b)| a * b).sum())
}

/// Largest `|ω_{y,α}(h) − ω_{ỹ,α}(h)| / |y − ỹ|` over the pairs, where
/// `ω_{y,α}` is `ω0` tilted with `tau = ασ²`. Pairs with `y = ỹ` contribute 0.
pub fn lipschitz_check_1d(
    omega0: &Grid1D,
    alpha: f64,
    sigma2: f64,
    h: &[f64],
    y_pairs: &[(f64, f64)],
) -> Result<f64> {
    let g = |y: f64| -> Result<f64> {
        let p = Tilt1DParams { y, tau: alpha * sigma2, sigma2, alpha };
        apply_h(&tilt_1d(omega0, &p)?, h)
    };
    let mut worst = 0.0f64;
    for &(y, yt) in y_pairs {
        if y == yt {
            continue;
        }
        worst = worst.max((g(y)? - g(yt)?).abs() / (y - yt).abs());
    }
    Ok(worst)
}

/// Mean variance of `ω_t` over simulated 1-D localization paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceCurve {
    pub times: Vec<f64>,
    pub mean_variance: Vec<f64>,
    pub se: Vec<f64>,
    /// Mean of `ω_t`, averaged over paths.
    pub mean_center: Vec<f64>,
    /// `ω_t((0, ∞))`, averaged over paths.
    pub mean_right_mass: Vec<f64>,
}

impl VarianceCurve {
    /// Largest increase of the mean variance between consecutive times,
    /// in units of the combined standard error (negative when decreasing).
    pub fn worst_increase_in_se(&self) -> f64 {
        self.mean_variance
            .windows(2)
            .zip(self.se.windows(2))
            .map(|(v, s)| {
                let se = (s[0] * s[0] + s[1] * s[1]).sqrt();
                if se > 0.0 {
                    (v[1] - v[0]) / se
                } else if v[1] > v[0] * (1.0 + 1e-12) {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One path of the 1-D process `dc = σ dW + σ² b(ω_t) dt` with
/// `ω_t ∝ ω0·exp(c z − (tσ²/2) z²)`, integrated by Euler steps on the
/// exponent so that masses stay positive. Returns `ω_t` after each step.
pub fn simulate_1d_path<R: Rng + ?Sized>(
    omega0: &Grid1D,
    sigma2: f64,
    alpha: f64,
    n_steps: usize,
    rng: &mut R,
) -> Result<Vec<Grid1D>> {
    if !(sigma2 > 0.0 && alpha > 0.0) || n_steps == 0 {
        return Err(Error::usage("sigma2, alpha and n_steps must be positive"));
    }
    let h = alpha / n_steps as f64;
    let sigma = sigma2.sqrt();
    let mut c = 0.0;
    let mut t = 0.0;
    let mut omega = omega0.clone();
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let b = omega.mean();
        let xi: f64 = StandardNormal.sample(rng);
        c += sigma * h.sqrt() * xi + sigma2 * h * b;
        t += h;
        let tau = t * sigma2;
        omega = tilt_log(omega0, |z| c * z - 0.5 * tau * z * z).map_err(|_| {
            Error::Step("1-D localization step lost all mass; reduce h".into())
        })?;
        if !c.is_finite() {
            return Err(Error::Step("1-D localization diverged; reduce h".into()));
        }
        out.push(omega.clone());
    }
    Ok(out)
}

/// Simulates `n_paths` paths of the 1-D process over duration `alpha` and
/// reports the mean of `Var(ω_t)` at `t = 0` and after each step.
pub fn variance_supermartingale_check<R: Rng + ?Sized>(
    omega0: &Grid1D,
    sigma2: f64,
    alpha: f64,
    n_paths: usize,
    n_steps: usize,
    rng: &mut R,
) -> Result<VarianceCurve> {
    if n_paths < 2 {
        return Err(Error::usage("need at least two paths"));
    }
    let h = alpha / n_steps.max(1) as f64;
    let mut var = vec![Vec::with_capacity(n_paths); n_steps + 1];
    let mut centers = vec![Vec::with_capacity(n_paths); n_steps + 1];
    let mut right = vec![Vec::with_capacity(n_paths); n_steps + 1];
    let right_mass = |w: &Grid1D| -> f64 { w.centers().zip(w.mass()).filter(|(z, _)| *z > 0.0).map(|(_, m)| m).sum() };
    for _ in 0..n_paths {
        var[0].push(omega0.variance());
        centers[0].push(omega0.mean());
        right[0].push(right_mass(omega0));
        for (k, w) in simulate_1d_path(omega0, sigma2, alpha, n_steps, rng)?.iter().enumerate() {
            var[k + 1].push(w.variance());
            centers[k + 1].push(w.mean());
            right[k + 1].push(right_mass(w));
        }
    }
    let mut curve = VarianceCurve {
        times: Vec::new(),
        mean_variance: Vec::new(),
        se: Vec::new(),
        mean_center: Vec::new(),
        mean_right_mass: Vec::new(),
    };
    for (k, (v, c)) in var.iter().zip(&centers).enumerate() {
        let (m, s2) = mean_var(v);
        curve.times.push(k as f64 * h);
        curve.mean_variance.push(m);
        curve.se.push((s2 / v.len() as f64).sqrt());
        curve.mean_center.push(mean_var(c).0);
        curve.mean_right_mass.push(mean_var(&right[k]).0);
    }
    Ok(curve)
}
