//! One-dimensional logconcave densities and numeric checks of the classical
//! bounds for isotropic logconcave laws on the line.

use crate::error::{Error, Result};
use crate::localization::Grid1D;
use crate::quadrature::integrate;
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_sf};
use serde::Serialize;
use std::f64::consts::{E, LN_2, PI, SQRT_2};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Tolerance for comparisons against closed-form bounds.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Tolerance for grid and quadrature comparisons.
pub const GRID_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Density1D {
    /// Centered Gaussian with standard deviation `sigma`.
    Gaussian { sigma: f64 },
    Uniform { a: f64, b: f64 },
    /// Centered Laplace, density `exp(−|x|/scale) / (2 scale)`.
    Laplace { scale: f64 },
    /// Centered logistic with scale `scale`.
    Logistic { scale: f64 },
    /// Piecewise-constant density on the grid cells.
    Grid(Grid1D),
    /// `inner` translated by `shift`.
    Translated { inner: Box<Density1D>, shift: f64 },
}

impl Density1D {
    pub fn name(&self) -> String {
        match self {
            Density1D::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            Density1D::Uniform { a, b } => format!("uniform({a},{b})"),
            Density1D::Laplace { scale } => format!("laplace(scale={scale})"),
            Density1D::Logistic { scale } => format!("logistic(scale={scale})"),
            Density1D::Grid(g) => format!("grid({} cells)", g.n_cells()),
            Density1D::Translated { inner, shift } => format!("{}+{shift}", inner.name()),
        }
    }

    pub fn validate_params(&self) -> Result<()> {
        let ok = match self {
            Density1D::Gaussian { sigma } => *sigma > 0.0 && sigma.is_finite(),
            Density1D::Uniform { a, b } => a < b && a.is_finite() && b.is_finite(),
            Density1D::Laplace { scale } | Density1D::Logistic { scale } => *scale > 0.0 && scale.is_finite(),
            Density1D::Grid(_) => true,
            Density1D::Translated { inner, shift } => return inner.validate_params().and(
                if shift.is_finite() { Ok(()) } else { Err(Error::usage("shift must be finite")) },
            ),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::usage(format!("invalid density parameters: {}", self.name())))
        }
    }

    /// Closed support, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density1D::Uniform { a, b } => (*a, *b),
            Density1D::Grid(g) => (g.z_min(), g.z_max()),
            Density1D::Translated { inner, shift } => {
                let (a, b) = inner.support();
                (a + shift, b + shift)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Density1D::Gaussian { sigma } => std_normal_pdf(x / sigma) / sigma,
            Density1D::Uniform { a, b } => {
                if x >= *a && x <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Density1D::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            Density1D::Logistic { scale } => {
                let e = (-x.abs() / scale).exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Density1D::Grid(g) => {
                if x < g.z_min() || x > g.z_max() {
                    return 0.0;
                }
                let i = (((x - g.z_min()) / g.spacing()) as usize).min(g.n_cells() - 1);
                g.mass()[i] / g.spacing()
            }
            Density1D::Translated { inner, shift } => inner.pdf(x - shift),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Density1D::Gaussian { sigma } => std_normal_cdf(x / sigma),
            Density1D::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Density1D::Laplace { scale } => {
                if x < 0.0 {
                    0.5 * (x / scale).exp()
                } else {
                    1.0 - 0.5 * (-x / scale).exp()
                }
            }
            Density1D::Logistic { scale } => 1.0 / (1.0 + (-x / scale).exp()),
            Density1D::Grid(g) => {
                if x <= g.z_min() {
                    return 0.0;
                }
                if x >= g.z_max() {
                    return 1.0;
                }
                let pos = (x - g.z_min()) / g.spacing();
                let i = (pos as usize).min(g.n_cells() - 1);
                let below: f64 = g.mass()[..i].iter().sum();
                (below + g.mass()[i] * (pos - i as f64)).clamp(0.0, 1.0)
            }
            Density1D::Translated { inner, shift } => inner.cdf(x - shift),
        }
    }

    /// `P(X > x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            Density1D::Gaussian { sigma } => std_normal_sf(x / sigma),
            Density1D::Laplace { scale } if x >= 0.0 => 0.5 * (-x / scale).exp(),
            Density1D::Logistic { scale } => 1.0 / (1.0 + (x / scale).exp()),
            Density1D::Translated { inner, shift } => inner.sf(x - shift),
            _ => 1.0 - self.cdf(x),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Density1D::Uniform { a, b } => 0.5 * (a + b),
            Density1D::Grid(g) => g.mean(),
            Density1D::Translated { inner, shift } => inner.mean() + shift,
            _ => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Density1D::Gaussian { sigma } => sigma * sigma,
            Density1D::Uniform { a, b } => (b - a) * (b - a) / 12.0,
            Density1D::Laplace { scale } => 2.0 * scale * scale,
            Density1D::Logistic { scale } => scale * scale * PI * PI / 3.0,
            // piecewise-constant density: cell-center variance plus h²/12
            Density1D::Grid(g) => g.variance() + g.spacing() * g.spacing() / 12.0,
            Density1D::Translated { inner, .. } => inner.variance(),
        }
    }

    /// Quantile by bisection on the CDF, bracketed with the tail bound
    /// `P(|X − mean| ≥ t·sd) ≤ e^{1−t}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::usage("quantile level must lie in (0, 1)"));
        }
        let (s_lo, s_hi) = self.support();
        let mu = self.mean();
        let sd = self.variance().sqrt();
        let t = 1.0 - p.min(1.0 - p).ln() + 1.0;
        let mut lo = (mu - t * sd).max(s_lo);
        let mut hi = (mu + t * sd).min(s_hi);
        while self.cdf(lo) > p {
            lo = mu - 2.0 * (mu - lo);
        }
        while self.cdf(hi) < p {
            hi = mu + 2.0 * (hi - mu);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) || (self.cdf(hi) - self.cdf(lo)) < 1e-12 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Central interval carrying all but `2·tail` of the mass.
    fn effective_range(&self, tail: f64) -> (f64, f64) {
        let (a, b) = self.support();
        let lo = if a.is_finite() { a } else { self.quantile(tail).unwrap_or(-40.0) };
        let hi = if b.is_finite() { b } else { self.upper_quantile(tail) };
        (lo, hi)
    }

    /// Point with `sf = tail`, for tails too small to express as `1 − p`.
    fn upper_quantile(&self, tail: f64) -> f64 {
        let mu = self.mean();
        let sd = self.variance().sqrt();
        let mut lo = mu;
        let mut hi = mu + sd;
        while self.sf(hi) > tail {
            lo = hi;
            hi = mu + 2.0 * (hi - mu);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.sf(mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Discretises the density onto `n_cells` cells with exact cell masses.
    pub fn to_grid(&self, n_cells: usize) -> Result<Density1D> {
        let (lo, hi) = self.effective_range(1e-13);
        let h = (hi - lo) / n_cells as f64;
        let mass = (0..n_cells)
            .map(|i| (self.cdf(lo + (i + 1) as f64 * h) - self.cdf(lo + i as f64 * h)).max(0.0))
            .collect();
        Ok(Density1D::Grid(Grid1D::new(lo, hi, mass)?))
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        self.mean().abs() <= tol && (self.variance() - 1.0).abs() <= tol
    }
}

/// Standardizes `d` and discretizes it onto `n_cells` cells.
pub fn to_unit_grid(d: &Density1D, n_cells: usize) -> Result<Grid1D> {
    match standardize(d)?.to_grid(n_cells)? {
        Density1D::Grid(g) => Ok(g),
        _ => unreachable!("to_grid returns a grid"),
    }
}

/// Affine rescaling to mean 0 and variance 1.
pub fn standardize(d: &Density1D) -> Result<Density1D> {
    d.validate_params()?;
    let var = d.variance();
    if !(var > 0.0 && var.is_finite()) {
        return Err(Error::Degenerate("density has degenerate variance".into()));
    }
    let sd = var.sqrt();
    Ok(match d {
        Density1D::Gaussian { .. } => Density1D::Gaussian { sigma: 1.0 },
        Density1D::Uniform { .. } => Density1D::Uniform { a: -SQRT_3, b: SQRT_3 },
        Density1D::Laplace { .. } => Density1D::Laplace { scale: 1.0 / SQRT_2 },
        Density1D::Logistic { .. } => Density1D::Logistic { scale: SQRT_3 / PI },
        Density1D::Grid(g) => {
            let mu = d.mean();
            Density1D::Grid(Grid1D::new((g.z_min() - mu) / sd, (g.z_max() - mu) / sd, g.mass().to_vec())?)
        }
        Density1D::Translated { inner, .. } => return standardize(inner),
    })
}

/// The four standardized parametric densities.
pub fn library() -> Vec<Density1D> {
    vec![
        Density1D::Gaussian { sigma: 1.0 },
        Density1D::Uniform { a: -SQRT_3, b: SQRT_3 },
        Density1D::Laplace { scale: 1.0 / SQRT_2 },
        Density1D::Logistic { scale: SQRT_3 / PI },
    ]
}

/// Outcome of one check: the observed value, the bound it is compared
/// with, and where the worst case occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub value: f64,
    pub bound: f64,
    /// Distance to the bound in the passing direction (negative on failure).
    pub margin: f64,
    pub witness: Option<f64>,
    pub passed: bool,
}

impl CheckResult {
    fn upper(check: &'static str, value: f64, bound: f64, tol: f64, witness: Option<f64>) -> Self {
        CheckResult { check, value, bound, margin: bound - value, witness, passed: value <= bound + tol }
    }

    fn lower(check: &'static str, value: f64, bound: f64, tol: f64, witness: Option<f64>) -> Self {
        CheckResult { check, value, bound, margin: value - bound, witness, passed: value >= bound - tol }
    }

    /// Pass/fail at a relaxed tolerance.
    pub fn passes_within(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

fn require_isotropic(d: &Density1D) -> Result<()> {
    if !d.is_isotropic(1e-6) {
        return Err(Error::Precondition(format!("{} is not isotropic", d.name())));
    }
    Ok(())
}

fn eval_points(d: &Density1D, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    if let Density1D::Grid(g) = d {
        pts.extend(g.centers().filter(|z| *z >= lo && *z <= hi));
    }
    if lo <= 0.0 && hi >= 0.0 {
        pts.push(0.0);
    }
    pts
}

/// Largest density value; bounded by 1 for isotropic logconcave laws.
pub fn check_max_density(d: &Density1D) -> Result<CheckResult> {
    require_isotropic(d)?;
    let (lo, hi) = d.effective_range(1e-12);
    let (arg, max) = eval_points(d, lo, hi, 200_000)
        .into_iter()
        .map(|x| (x, d.pdf(x)))
        .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    Ok(CheckResult::upper("max_density", max, 1.0, CLOSED_FORM_TOL, Some(arg)))
}

/// Density at the mean; at least 1/8 for isotropic logconcave laws.
pub fn check_density_at_zero(d: &Density1D) -> Result<CheckResult> {
    require_isotropic(d)?;
    Ok(CheckResult::lower("density_at_zero", d.pdf(0.0), 0.125, CLOSED_FORM_TOL, Some(0.0)))
}

/// `P(|X| ≥ t) ≤ e^{1−t}` at every `t` in the grid; reports the worst `t`.
pub fn check_tail(d: &Density1D, t_grid: &[f64]) -> Result<CheckResult> {
    require_isotropic(d)?;
    if t_grid.is_empty() {
        return Err(Error::usage("t_grid must be nonempty"));
    }
    let mut worst: Option<CheckResult> = None;
    for &t in t_grid {
        if !(t >= 0.0) {
            return Err(Error::usage("tail thresholds must be nonnegative"));
        }
        let p = (d.cdf(-t) + d.sf(t)).min(1.0);
        let r = CheckResult::upper("tail", p, (1.0 - t).exp(), CLOSED_FORM_TOL, Some(t));
        if worst.as_ref().is_none_or(|w| r.margin < w.margin) {
            worst = Some(r);
        }
    }
    Ok(worst.expect("nonempty grid"))
}

/// Density and derivative checks at the `δ` and `1 − δ` quantiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileCheck {
    pub a: f64,
    pub b: f64,
    /// Smallest density over `[a, b]` against `δ/(8e)`.
    pub density: CheckResult,
    /// Largest `|p′|` at the two quantiles against `2/δ`.
    pub derivative: CheckResult,
}

fn derivative(d: &Density1D, x: f64) -> f64 {
    let step = match d {
        Density1D::Grid(g) => g.spacing(),
        _ => 1e-5 * (1.0 + x.abs()),
    };
    (d.pdf(x + step) - d.pdf(x - step)) / (2.0 * step)
}

pub fn check_quantile_density(d: &Density1D, delta: f64) -> Result<QuantileCheck> {
    require_isotropic(d)?;
    if !(delta > 0.0 && delta <= 1.0 / E) {
        return Err(Error::usage("delta must lie in (0, 1/e]"));
    }
    let a = d.quantile(delta)?;
    let b = d.quantile(1.0 - delta)?;
    let (arg, min) = eval_points(d, a, b, 20_000)
        .into_iter()
        .map(|x| (x, d.pdf(x)))
        .fold((a, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    let density = CheckResult::lower("quantile_density", min, delta / (8.0 * E), CLOSED_FORM_TOL, Some(arg));
    let (da, db) = (derivative(d, a).abs(), derivative(d, b).abs());
    let (w, dmax) = if da >= db { (a, da) } else { (b, db) };
    let derivative =
        CheckResult::upper("quantile_derivative", dmax, 2.0 / delta, GRID_TOL, Some(w));
    Ok(QuantileCheck { a, b, density, derivative })
}

/// `inf_c p(c) / min(F(c), 1 − F(c))` over half-line cuts on a fine grid.
pub fn cheeger_1d(d: &Density1D) -> Result<CheckResult> {
    require_isotropic(d)?;
    let (lo, hi) = d.effective_range(1e-8);
    let inset = 1e-9 * (hi - lo);
    let (arg, inf) = eval_points(d, lo + inset, hi - inset, 200_000)
        .into_iter()
        .filter_map(|c| {
            let f = d.cdf(c).min(d.sf(c));
            (f > 0.0).then(|| (c, d.pdf(c) / f))
        })
        .fold((0.0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    Ok(CheckResult::lower("cheeger", inf, LN_2 / 2.0, GRID_TOL, Some(arg)))
}

/// Result of the interval-overlap check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapCheck {
    pub tv: f64,
    pub tv_limit: f64,
    pub a: f64,
    pub b: f64,
    pub min_ratio: f64,
    pub passed: bool,
}

/// Breakpoints where either density may be non-smooth.
fn kinks(d: &Density1D) -> Vec<f64> {
    match d {
        Density1D::Uniform { a, b } => vec![*a, *b],
        Density1D::Laplace { .. } => vec![0.0],
        Density1D::Grid(g) => (0..=g.n_cells()).map(|i| g.z_min() + i as f64 * g.spacing()).collect(),
        Density1D::Translated { inner, shift } => kinks(inner).into_iter().map(|x| x + shift).collect(),
        _ => vec![],
    }
}

/// `½∫|p − q|` by adaptive quadrature split at kinks.
pub fn tv_distance(p: &Density1D, q: &Density1D) -> f64 {
    let (pl, ph) = p.effective_range(1e-16);
    let (ql, qh) = q.effective_range(1e-16);
    let mut pts = vec![pl.min(ql), ph.max(qh)];
    pts.extend(kinks(p));
    pts.extend(kinks(q));
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let lo = pts[0];
    let hi = *pts.last().expect("nonempty");
    let pieces = 64;
    let mut grid: Vec<f64> = (0..=pieces).map(|i| lo + (hi - lo) * i as f64 / pieces as f64).collect();
    grid.extend(pts.iter().filter(|x| **x > lo && **x < hi));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    0.5 * grid
        .windows(2)
        .map(|w| integrate(|x| (p.pdf(x) - q.pdf(x)).abs(), w[0], w[1], 1e-15))
        .sum::<f64>()
}

/// For `p` isotropic and `p̃` within TV `δ²/10⁵` of it, checks
/// `p̃/p > 0.9` between the `δ` and `1 − δ` quantiles of `p`.
pub fn interval_overlap_check(p: &Density1D, p_tilde: &Density1D, delta: f64) -> Result<OverlapCheck> {
    require_isotropic(p)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::usage("delta must lie in (0, 1/2)"));
    }
    let tv_limit = delta * delta / 1e5;
    let tv = tv_distance(p, p_tilde);
    if !(tv < tv_limit) {
        return Err(Error::Precondition(format!("TV {tv:.3e} is not below {tv_limit:.3e}")));
    }
    let a = p.quantile(delta)?;
    let b = p.quantile(1.0 - delta)?;
    let min_ratio = eval_points(p, a, b, 20_000)
        .into_iter()
        .map(|z| p_tilde.pdf(z) / p.pdf(z))
        .fold(f64::INFINITY, f64::min);
    Ok(OverlapCheck { tv, tv_limit, a, b, min_ratio, passed: min_ratio > 0.9 })
}

/// Normalisation and logconcavity of a density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub total_mass: f64,
    /// Largest second difference of the log density on the grid.
    pub max_log_second_difference: f64,
}

pub fn validate(d: &Density1D) -> Result<Validation> {
    d.validate_params()?;
    let (lo, hi) = d.effective_range(1e-17);
    let mut pts = vec![lo, hi];
    pts.extend(kinks(d).into_iter().filter(|x| *x > lo && *x < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let tails = if d.support().0.is_finite() { 0.0 } else { d.cdf(lo) + d.sf(hi) };
    let total_mass = tails
        + match d {
            Density1D::Grid(g) => g.mass().iter().sum(),
            Density1D::Translated { inner, .. } if matches!(**inner, Density1D::Grid(_)) => {
                validate(inner)?.total_mass
            }
            _ => pts.windows(2).map(|w| integrate(|x| d.pdf(x), w[0], w[1], 1e-14)).sum::<f64>(),
        };
    let max_log_second_difference = match d {
        Density1D::Translated { inner, .. } => validate(inner)?.max_log_second_difference,
        Density1D::Grid(g) => {
            let logs: Vec<f64> = g.mass().iter().filter(|m| **m > 0.0).map(|m| m.ln()).collect();
            logs.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max)
        }
        _ => {
            let n = 20_000;
            let h = (hi - lo) / n as f64;
            (1..n)
                .map(|i| lo + i as f64 * h)
                .filter(|&x| d.pdf(x - h) > 0.0 && d.pdf(x + h) > 0.0)
                .map(|x| d.pdf(x - h).ln() - 2.0 * d.pdf(x).ln() + d.pdf(x + h).ln())
                .fold(f64::NEG_INFINITY, f64::max)
        }
    };
    let v = Validation { total_mass, max_log_second_difference };
    if (total_mass - 1.0).abs() > 1e-10 {
        return Err(Error::Degenerate(format!("{} integrates to {total_mass}", d.name())));
    }
    if max_log_second_difference > 1e-9 {
        return Err(Error::Degenerate(format!("{} is not logconcave", d.name())));
    }
    Ok(v)
}

/// One row of the check table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub density: String,
    pub check: &'static str,
    pub delta: Option<f64>,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

fn row(density: &str, delta: Option<f64>, r: &CheckResult) -> CheckRow {
    CheckRow {
        density: density.to_string(),
        check: r.check,
        delta,
        value: r.value,
        bound: r.bound,
        margin: r.margin,
        passed: r.passed,
    }
}

/// Runs every check on every density (after standardizing).
pub fn run_suite(densities: &[Density1D], deltas: &[f64], t_grid: &[f64]) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for d in densities {
        let d = standardize(d)?;
        let name = d.name();
        rows.push(row(&name, None, &check_max_density(&d)?));
        rows.push(row(&name, None, &check_density_at_zero(&d)?));
        rows.push(row(&name, None, &check_tail(&d, t_grid)?));
        for &delta in deltas {
            let q = check_quantile_density(&d, delta)?;
            rows.push(row(&name, Some(delta), &q.density));
            rows.push(row(&name, Some(delta), &q.derivative));
        }
        rows.push(row(&name, None, &cheeger_1d(&d)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardize_examples() {
        assert_eq!(
            standardize(&Density1D::Uniform { a: 0.0, b: 2.0 * SQRT_3 }).unwrap(),
            Density1D::Uniform { a: -SQRT_3, b: SQRT_3 }
        );
        assert_eq!(standardize(&Density1D::Gaussian { sigma: 3.0 }).unwrap(), Density1D::Gaussian { sigma: 1.0 });
        let l = standardize(&Density1D::Laplace { scale: 5.0 }).unwrap();
        assert!((l.variance() - 1.0).abs() < 1e-12);
        assert!(standardize(&Density1D::Gaussian { sigma: 0.0 }).is_err());
    }

    #[test]
    fn closed_form_values() {
        let lib = library();
        let m = check_max_density(&lib[0]).unwrap();
        assert!((m.value - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-9);
        assert!((check_max_density(&lib[1]).unwrap().value - 1.0 / (2.0 * SQRT_3)).abs() < 1e-12);
        assert!((check_max_density(&lib[2]).unwrap().value - 1.0 / SQRT_2).abs() < 1e-12);
        let t = check_tail(&lib[2], &[3.0]).unwrap();
        assert!((t.value - (-3.0 * SQRT_2).exp()).abs() < 1e-12);
        let t = check_tail(&lib[0], &[3.0]).unwrap();
        assert!((t.value - 0.0027).abs() < 1e-4);
        let q = check_quantile_density(&lib[0], 0.1).unwrap();
        assert!((q.b - 1.2816).abs() < 1e-4 && (q.density.value - 0.17550).abs() < 1e-4);
        let c = cheeger_1d(&lib[1]).unwrap();
        assert!((c.value - 1.0 / SQRT_3).abs() < 1e-4);
        let c = cheeger_1d(&lib[2]).unwrap();
        assert!((c.value - SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn quantile_delta_range() {
        assert!(matches!(check_quantile_density(&library()[0], 0.5), Err(Error::Usage(_))));
    }

    #[test]
    fn library_validates() {
        for d in library() {
            validate(&d).unwrap();
        }
    }

    #[test]
    fn overlap_of_shifted_gaussians() {
        let p = library()[0].clone();
        let far = Density1D::Translated { inner: Box::new(p.clone()), shift: 1e-4 };
        assert!(matches!(interval_overlap_check(&p, &far, 0.1), Err(Error::Precondition(_))));
        let near = Density1D::Translated { inner: Box::new(p.clone()), shift: 1e-7 };
        let r = interval_overlap_check(&p, &near, 0.1).unwrap();
        assert!((r.tv - 1e-7 / (2.0 * PI).sqrt()).abs() < 1e-9);
        assert!(r.passed && r.min_ratio > 0.9);
    }

    #[test]
    fn grid_round_trip_passes_with_relaxed_tolerance() {
        for d in library() {
            let g = Density1D::Grid(to_unit_grid(&d, 4096).unwrap());
            let g = standardize(&g).unwrap();
            assert!(check_max_density(&g).unwrap().passes_within(1e-3));
            assert!(check_density_at_zero(&g).unwrap().passes_within(1e-3));
            assert!(check_tail(&g, &[0.5, 1.0, 2.0, 4.0]).unwrap().passes_within(1e-3));
            let q = check_quantile_density(&g, 0.1).unwrap();
            assert!(q.density.passes_within(1e-3));
            assert!(cheeger_1d(&g).unwrap().passes_within(1e-3), "{}", d.name());
        }
    }

    #[test]
    fn overlap_of_identical_densities() {
        let g = library()[0].clone();
        let r = interval_overlap_check(&g, &g, 0.1).unwrap();
        assert!(r.tv == 0.0 && r.min_ratio == 1.0 && r.passed);
    }
}
