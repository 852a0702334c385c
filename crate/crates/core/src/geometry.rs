//! Convex bodies with analytic chord oracles and the geometric estimators
//! built on them.
//!
//! A [`ConvexBody`] is one of a few closed-form shapes (ball, box, simplex,
//! H-polytope, ellipsoid), optionally intersected with extra halfspace cuts.
//! Bodies are closed sets: a point exactly on the boundary is a member.
//! Chords are computed per constraint in closed form (halfspace clipping for
//! the polyhedral kinds and a quadratic solve for balls and ellipsoids).

use crate::error::{Error, Result};
use crate::stats::Estimate;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

/// Threshold on λ(u, 2r) that defines `K_r`.
pub const K_R_THRESHOLD: f64 = 63.0 / 64.0;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// A halfspace `{x : normal · x ≤ offset}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.iter().all(|a| *a == 0.0) {
            return Err(Error::usage("halfspace normal must be nonzero"));
        }
        Ok(Halfspace { normal, offset })
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        dot(&self.normal, x) <= self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x ≥ 0, Σ x ≤ scale}`
    Simplex { scale: f64 },
    /// Rows `normals[i] · x ≤ offsets[i]`.
    HPolytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    /// `{x : (x − c)ᵀ shape⁻¹ (x − c) ≤ 1}` for a positive-definite shape.
    Ellipsoid { center: Vec<f64>, shape: DMatrix<f64> },
}

impl BodyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Box { .. } => "box",
            BodyKind::Simplex { .. } => "simplex",
            BodyKind::HPolytope { .. } => "hpolytope",
            BodyKind::Ellipsoid { .. } => "ellipsoid",
        }
    }
}

/// A compact, full-dimensional convex set with membership and chord oracles.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
    cuts: Vec<Halfspace>,
    r_inscribed_hint: Option<f64>,
    r_circum_hint: Option<f64>,
    interior: Vec<f64>,
    bbox_lower: Vec<f64>,
    bbox_upper: Vec<f64>,
    /// Inverse shape and Cholesky factor for ellipsoids.
    precision: Option<DMatrix<f64>>,
    shape_factor: Option<DMatrix<f64>>,
    /// Chebyshev radius for H-polytopes.
    cheb_radius: Option<f64>,
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::usage("dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::usage("ball radius must be positive"));
        }
        let bbox_lower = center.iter().map(|c| c - radius).collect();
        let bbox_upper = center.iter().map(|c| c + radius).collect();
        Ok(Self::assemble(
            center.len(),
            center.clone(),
            bbox_lower,
            bbox_upper,
            BodyKind::Ball { center, radius },
        ))
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(vec![0.0; dim], 1.0)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::usage("box bounds must be nonempty and of equal length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::usage("box requires finite lower < upper on every axis"));
        }
        let center = lower.iter().zip(&upper).map(|(l, u)| 0.5 * (l + u)).collect();
        Ok(Self::assemble(
            lower.len(),
            center,
            lower.clone(),
            upper.clone(),
            BodyKind::Box { lower, upper },
        ))
    }

    /// The cube `[−half_width, half_width]^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::boxed(vec![-half_width; dim], vec![half_width; dim])
    }

    /// The cube `[−√3, √3]^dim`, whose uniform measure is isotropic.
    pub fn isotropic_cube(dim: usize) -> Result<Self> {
        Self::cube(dim, 3f64.sqrt())
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("dimension must be positive"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::usage("simplex scale must be positive"));
        }
        let center = vec![scale / (dim as f64 + 1.0); dim];
        Ok(Self::assemble(dim, center, vec![0.0; dim], vec![scale; dim], BodyKind::Simplex { scale }))
    }

    pub fn hpolytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Result<Self> {
        if normals.is_empty() || normals.len() != offsets.len() {
            return Err(Error::usage("hpolytope needs as many offsets as rows"));
        }
        let dim = normals[0].len();
        if dim == 0 || normals.iter().any(|r| r.len() != dim) {
            return Err(Error::usage("hpolytope rows must share a positive dimension"));
        }
        if normals.iter().any(|r| r.iter().all(|a| *a == 0.0)) {
            return Err(Error::usage("hpolytope row with zero normal"));
        }
        let (center, radius) = chebyshev_center(&normals, &offsets)?;
        let mut lower = vec![0.0; dim];
        let mut upper = vec![0.0; dim];
        for j in 0..dim {
            lower[j] = lp_extreme(&normals, &offsets, j, OptimizationDirection::Minimize)?;
            upper[j] = lp_extreme(&normals, &offsets, j, OptimizationDirection::Maximize)?;
        }
        let mut body = Self::assemble(dim, center, lower, upper, BodyKind::HPolytope { normals, offsets });
        body.cheb_radius = Some(radius);
        Ok(body)
    }

    pub fn ellipsoid(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let dim = center.len();
        if dim == 0 || shape.nrows() != dim || shape.ncols() != dim {
            return Err(Error::usage("ellipsoid shape must be dim × dim"));
        }
        if (&shape - shape.transpose()).abs().max() > 1e-12 * shape.abs().max() {
            return Err(Error::usage("ellipsoid shape must be symmetric"));
        }
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::usage("ellipsoid shape must be positive definite"))?;
        let precision = chol.inverse();
        let factor = chol.l();
        let bbox_lower = (0..dim).map(|i| center[i] - shape[(i, i)].sqrt()).collect();
        let bbox_upper = (0..dim).map(|i| center[i] + shape[(i, i)].sqrt()).collect();
        let mut body =
            Self::assemble(dim, center.clone(), bbox_lower, bbox_upper, BodyKind::Ellipsoid { center, shape });
        body.precision = Some(precision);
        body.shape_factor = Some(factor);
        Ok(body)
    }

    fn assemble(dim: usize, interior: Vec<f64>, bbox_lower: Vec<f64>, bbox_upper: Vec<f64>, kind: BodyKind) -> Self {
        ConvexBody {
            dim,
            kind,
            cuts: Vec::new(),
            r_inscribed_hint: None,
            r_circum_hint: None,
            interior,
            bbox_lower,
            bbox_upper,
            precision: None,
            shape_factor: None,
            cheb_radius: None,
        }
    }

    /// Attaches inscribed/circumscribed radius hints.
    pub fn with_hints(mut self, r_inscribed: Option<f64>, r_circum: Option<f64>) -> Result<Self> {
        for r in [r_inscribed, r_circum].into_iter().flatten() {
            if !(r > 0.0) {
                return Err(Error::usage("radius hints must be positive"));
            }
        }
        if let (Some(r), Some(big)) = (r_inscribed, r_circum) {
            if r > big {
                return Err(Error::usage("inscribed radius hint exceeds circumscribed hint"));
            }
        }
        self.r_inscribed_hint = r_inscribed;
        self.r_circum_hint = r_circum;
        Ok(self)
    }

    /// Intersects the body with `{x : normal · x ≤ offset}`.
    ///
    /// Fails with a range error when the intersection is numerically empty.
    pub fn cut(&self, normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.len() != self.dim {
            return Err(Error::usage("cut normal has wrong dimension"));
        }
        let h = Halfspace::new(normal, offset)?;
        let mut body = self.clone();
        body.cuts.push(h);
        body.r_inscribed_hint = None;
        if !body.strictly_inside(&body.interior) {
            body.interior = body.find_interior()?;
        }
        Ok(body)
    }

    fn strictly_inside(&self, x: &[f64]) -> bool {
        self.contains(x) && self.cuts.iter().all(|h| dot(&h.normal, x) < h.offset)
    }

    /// Mean of bounding-box points that land in the body; convexity keeps the
    /// mean inside.
    fn find_interior(&self) -> Result<Vec<f64>> {
        let mut rng = crate::rng::stream(0, 0, "interior-search");
        let mut acc = vec![0.0; self.dim];
        let mut hits = 0usize;
        for _ in 0..200_000 {
            let x: Vec<f64> = (0..self.dim)
                .map(|i| rng.random_range(self.bbox_lower[i]..=self.bbox_upper[i]))
                .collect();
            if self.contains(&x) {
                hits += 1;
                acc.iter_mut().zip(&x).for_each(|(a, v)| *a += v);
                if hits >= 64 {
                    break;
                }
            }
        }
        if hits == 0 {
            return Err(Error::Range("body is numerically empty".into()));
        }
        acc.iter_mut().for_each(|a| *a /= hits as f64);
        Ok(acc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn cuts(&self) -> &[Halfspace] {
        &self.cuts
    }

    /// A point strictly inside the body (the kind's center when uncut).
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox_lower, &self.bbox_upper)
    }

    /// Circumscribed radius hint, or half the bounding-box diagonal.
    pub fn circum_radius(&self) -> f64 {
        self.r_circum_hint.unwrap_or_else(|| {
            0.5 * self
                .bbox_lower
                .iter()
                .zip(&self.bbox_upper)
                .map(|(l, u)| (u - l) * (u - l))
                .sum::<f64>()
                .sqrt()
        })
    }

    /// Radius of a ball known to fit inside the body, if one is known.
    pub fn inscribed_radius(&self) -> Option<f64> {
        if let Some(r) = self.r_inscribed_hint {
            return Some(r);
        }
        if !self.cuts.is_empty() {
            return None;
        }
        Some(match &self.kind {
            BodyKind::Ball { radius, .. } => *radius,
            BodyKind::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (u - l)).fold(f64::INFINITY, f64::min)
            }
            BodyKind::Simplex { scale } => {
                let n = self.dim as f64;
                scale / (n + n.sqrt())
            }
            BodyKind::HPolytope { .. } => self.cheb_radius?,
            BodyKind::Ellipsoid { shape, .. } => {
                SymmetricEigen::new(shape.clone()).eigenvalues.min().sqrt()
            }
        })
    }

    /// Whether the body is an uncut axis-aligned box.
    pub fn as_box(&self) -> Option<(&[f64], &[f64])> {
        match (&self.kind, self.cuts.is_empty()) {
            (BodyKind::Box { lower, upper }, true) => Some((lower, upper)),
            _ => None,
        }
    }

    /// Membership with a dimension check.
    pub fn membership(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::usage(format!(
                "point has dimension {}, body has {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.contains(x))
    }

    /// Membership without the dimension check (closed set).
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        let base = match &self.kind {
            BodyKind::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() <= radius * radius
            }
            BodyKind::Box { lower, upper } => {
                x.iter().zip(lower).zip(upper).all(|((v, l), u)| *l <= *v && *v <= *u)
            }
            BodyKind::Simplex { scale } => x.iter().all(|v| *v >= 0.0) && x.iter().sum::<f64>() <= *scale,
            BodyKind::HPolytope { normals, offsets } => {
                normals.iter().zip(offsets).all(|(a, b)| dot(a, x) <= *b)
            }
            BodyKind::Ellipsoid { center, .. } => {
                let p = self.precision.as_ref().expect("ellipsoid precision");
                quad_form(p, x, center) <= 1.0
            }
        };
        base && self.cuts.iter().all(|h| h.contains(x))
    }

    /// The chord `{u + tθ} ∩ K` through `u ∈ K` along `theta`.
    ///
    /// `theta` is normalised; the returned parameters refer to the unit
    /// direction stored in the chord.
    pub fn chord(&self, u: &[f64], theta: &[f64]) -> Result<Chord> {
        if u.len() != self.dim || theta.len() != self.dim {
            return Err(Error::usage("chord arguments have wrong dimension"));
        }
        let norm = dot(theta, theta).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::usage("chord direction must be nonzero"));
        }
        if !self.contains(u) {
            return Err(Error::domain("chord base point lies outside the body"));
        }
        let direction: Vec<f64> = theta.iter().map(|t| t / norm).collect();
        let (t_minus, t_plus) = self.chord_params(u, &direction);
        Ok(Chord { base: u.to_vec(), direction, t_minus, t_plus })
    }

    /// Chord parameters for a base point in the body and a unit direction.
    /// No validation; this is the sampler hot path.
    pub fn chord_params(&self, u: &[f64], theta: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                let mut p = 0.0;
                let mut w2 = 0.0;
                for i in 0..self.dim {
                    let w = u[i] - center[i];
                    p += theta[i] * w;
                    w2 += w * w;
                }
                let (a, b) = quadratic_interval(1.0, p, w2 - radius * radius);
                lo = a;
                hi = b;
            }
            BodyKind::Box { lower, upper } => {
                for i in 0..self.dim {
                    let d = theta[i];
                    if d > 0.0 {
                        hi = hi.min((upper[i] - u[i]) / d);
                        lo = lo.max((lower[i] - u[i]) / d);
                    } else if d < 0.0 {
                        hi = hi.min((lower[i] - u[i]) / d);
                        lo = lo.max((upper[i] - u[i]) / d);
                    }
                }
            }
            BodyKind::Simplex { scale } => {
                let mut ds = 0.0;
                let mut us = 0.0;
                for i in 0..self.dim {
                    clip(-theta[i], u[i], &mut lo, &mut hi);
                    ds += theta[i];
                    us += u[i];
                }
                clip(ds, scale - us, &mut lo, &mut hi);
            }
            BodyKind::HPolytope { normals, offsets } => {
                for (a, b) in normals.iter().zip(offsets) {
                    clip(dot(a, theta), b - dot(a, u), &mut lo, &mut hi);
                }
            }
            BodyKind::Ellipsoid { center, .. } => {
                let p = self.precision.as_ref().expect("ellipsoid precision");
                let n = self.dim;
                let (mut qa, mut qb, mut qc) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    let mut pt = 0.0;
                    let mut pw = 0.0;
                    for j in 0..n {
                        pt += p[(i, j)] * theta[j];
                        pw += p[(i, j)] * (u[j] - center[j]);
                    }
                    qa += theta[i] * pt;
                    qb += theta[i] * pw;
                    qc += (u[i] - center[i]) * pw;
                }
                let (a, b) = quadratic_interval(qa, qb, qc - 1.0);
                lo = a;
                hi = b;
            }
        }
        for h in &self.cuts {
            clip(dot(&h.normal, theta), h.offset - dot(&h.normal, u), &mut lo, &mut hi);
        }
        (lo.min(0.0), hi.max(0.0))
    }

    /// Exact uniform sample from the body.
    ///
    /// Balls, ellipsoids, boxes and simplices are sampled directly; cuts and
    /// H-polytopes use rejection from the base kind or the bounding box,
    /// failing with an efficiency error after `max_tries` proposals.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, max_tries: usize) -> Result<Vec<f64>> {
        for _ in 0..max_tries.max(1) {
            let x = self.sample_base(rng);
            if self.contains(&x) {
                return Ok(x);
            }
        }
        Err(Error::Efficiency(format!(
            "uniform rejection sampler exceeded {max_tries} proposals"
        )))
    }

    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            BodyKind::Ball { center, radius } => uniform_in_ball(rng, center, *radius),
            BodyKind::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| l + (u - l) * rng.random::<f64>()).collect()
            }
            BodyKind::Simplex { scale } => {
                let e: Vec<f64> = (0..=self.dim).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = e.iter().sum();
                e[..self.dim].iter().map(|v| scale * v / total).collect()
            }
            BodyKind::Ellipsoid { center, .. } => {
                let l = self.shape_factor.as_ref().expect("ellipsoid factor");
                let z = DVector::from_vec(uniform_in_ball(rng, &vec![0.0; self.dim], 1.0));
                let y = l * z;
                center.iter().zip(y.iter()).map(|(c, v)| c + v).collect()
            }
            BodyKind::HPolytope { .. } => (0..self.dim)
                .map(|i| self.bbox_lower[i] + (self.bbox_upper[i] - self.bbox_lower[i]) * rng.random::<f64>())
                .collect(),
        }
    }
}

/// Interval `{t : a t² + 2 b t + c ≤ 0}` for `a > 0`, `c ≤ 0`.
fn quadratic_interval(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - a * c).max(0.0);
    let s = disc.sqrt();
    // Numerically stable pair of roots.
    let q = -(b + b.signum() * s);
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let r1 = q / a;
    let r2 = c / q;
    (r1.min(r2), r1.max(r2))
}

/// Intersects `[lo, hi]` with `{t : d t ≤ s}`.
#[inline]
fn clip(d: f64, s: f64, lo: &mut f64, hi: &mut f64) {
    if d > 0.0 {
        *hi = hi.min(s / d);
    } else if d < 0.0 {
        *lo = lo.max(s / d);
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad_form(p: &DMatrix<f64>, x: &[f64], c: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        let di = x[i] - c[i];
        let mut row = 0.0;
        for j in 0..n {
            row += p[(i, j)] * (x[j] - c[j]);
        }
        acc += di * row;
    }
    acc
}

fn chebyshev_center(normals: &[Vec<f64>], offsets: &[f64]) -> Result<(Vec<f64>, f64)> {
    let dim = normals[0].len();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..dim)
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let rho = problem.add_var(1.0, (0.0, f64::INFINITY));
    for (a, b) in normals.iter().zip(offsets) {
        let norm = dot(a, a).sqrt();
        let mut terms: Vec<_> = xs.iter().zip(a).map(|(v, c)| (*v, *c)).collect();
        terms.push((rho, norm));
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, *b);
    }
    let solution = problem
        .solve()
        .map_err(|e| Error::usage(format!("hpolytope is empty or unbounded: {e}")))?;
    let radius = *solution.var_value(rho);
    if !(radius > 1e-12) {
        return Err(Error::usage("hpolytope is not full-dimensional"));
    }
    Ok((xs.iter().map(|v| *solution.var_value(*v)).collect(), radius))
}

fn lp_extreme(normals: &[Vec<f64>], offsets: &[f64], axis: usize, dir: OptimizationDirection) -> Result<f64> {
    let dim = normals[0].len();
    let mut problem = Problem::new(dir);
    let xs: Vec<_> = (0..dim)
        .map(|j| problem.add_var(if j == axis { 1.0 } else { 0.0 }, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for (a, b) in normals.iter().zip(offsets) {
        let terms: Vec<_> = xs.iter().zip(a).map(|(v, c)| (*v, *c)).collect();
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, *b);
    }
    let solution = problem
        .solve()
        .map_err(|e| Error::usage(format!("hpolytope is not bounded: {e}")))?;
    Ok(*solution.var_value(xs[axis]))
}

/// The segment `{base + t·direction : t ∈ [t_minus, t_plus]}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chord {
    pub base: Vec<f64>,
    pub direction: Vec<f64>,
    pub t_minus: f64,
    pub t_plus: f64,
}

impl Chord {
    pub fn length(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + t * d).collect()
    }
}

/// Writes a uniform direction on the unit sphere into `out`.
pub fn fill_uniform_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *v = z;
            norm2 += z * z;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// A direction uniform on the unit sphere `S^{n−1}`.
pub fn uniform_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_uniform_direction(rng, &mut out);
    out
}

/// A point uniform in the ball `B(center, radius)`.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let n = center.len();
    let mut dir = uniform_direction(rng, n);
    let rad = radius * rng.random::<f64>().powf(1.0 / n as f64);
    dir.iter_mut().zip(center).for_each(|(d, c)| *d = c + rad * *d);
    dir
}

/// Upper bound e^{−n cos²φ / 2} on the fraction of the sphere in a cap of
/// angular radius φ.
pub fn cap_bound(n: usize, cos_phi: f64) -> f64 {
    (-(n as f64) * cos_phi * cos_phi / 2.0).exp()
}

/// Monte Carlo fraction of directions θ with `θ₁ ≥ cos_phi`.
pub fn cap_fraction<R: Rng + ?Sized>(n: usize, cos_phi: f64, n_samples: usize, rng: &mut R) -> Result<Estimate> {
    if n_samples == 0 {
        return Err(Error::usage("cap_fraction needs at least one sample"));
    }
    if n == 0 {
        return Err(Error::usage("dimension must be positive"));
    }
    if !(cos_phi > 0.0 && cos_phi < 1.0) {
        return Err(Error::usage("cap_fraction requires 0 < cos_phi < 1"));
    }
    let mut theta = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        fill_uniform_direction(rng, &mut theta);
        if theta[0] >= cos_phi {
            hits += 1;
        }
    }
    Ok(Estimate::from_proportion(hits, n_samples))
}

/// Monte Carlo estimate of λ(u, t) = vol(K ∩ B(u, t)) / vol(B(0, t)).
pub fn lambda_fraction<R: Rng + ?Sized>(
    body: &ConvexBody,
    u: &[f64],
    t: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if !(t > 0.0) {
        return Err(Error::usage("ball radius t must be positive"));
    }
    if u.len() != body.dim() {
        return Err(Error::usage("point has wrong dimension"));
    }
    if n_samples == 0 {
        return Err(Error::usage("lambda_fraction needs at least one sample"));
    }
    let hits = (0..n_samples)
        .filter(|_| body.contains(&uniform_in_ball(rng, u, t)))
        .count();
    Ok(Estimate::from_proportion(hits, n_samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KrClass {
    In,
    Out,
    Undecided,
}

/// Classifies `u` against `K_r = {x ∈ K : λ(x, 2r) ≥ 63/64}` using a 99%
/// two-sided band around the Monte Carlo estimate of λ(u, 2r).
pub fn in_k_r<R: Rng + ?Sized>(
    body: &ConvexBody,
    u: &[f64],
    r: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<KrClass> {
    if !(r > 0.0) {
        return Err(Error::usage("r must be positive"));
    }
    if !body.membership(u)? {
        return Err(Error::domain("K_r test point lies outside the body"));
    }
    let est = lambda_fraction(body, u, 2.0 * r, n_samples, rng)?;
    let band = Z_99 * est.se;
    Ok(if est.value - band >= K_R_THRESHOLD {
        KrClass::In
    } else if est.value + band < K_R_THRESHOLD {
        KrClass::Out
    } else {
        KrClass::Undecided
    })
}

/// The affine map `x ↦ linear · x + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    shift: DVector<f64>,
}

impl AffineMap {
    /// Builds the map, rejecting numerically singular linear parts.
    pub fn new(linear: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        if !linear.is_square() || linear.nrows() != shift.len() {
            return Err(Error::usage("affine map shapes do not agree"));
        }
        let sv = linear.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if !(hi > 0.0) || lo / hi < 1e-12 {
            return Err(Error::Degenerate("affine map is not invertible".into()));
        }
        Ok(AffineMap { linear, shift })
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let y = &self.linear * DVector::from_column_slice(x) + &self.shift;
        y.iter().copied().collect()
    }
}

/// The map `x ↦ Σ^{−1/2}(x − m)` from the empirical mean and covariance,
/// which brings the samples into isotropic position.
pub fn isotropic_rescale(samples: &[Vec<f64>]) -> Result<AffineMap> {
    let n = samples.first().map(|s| s.len()).unwrap_or(0);
    if n == 0 || samples.len() < n + 1 {
        return Err(Error::Degenerate(format!(
            "need at least n + 1 = {} samples",
            n + 1
        )));
    }
    let mean = crate::stats::mean_vector(samples);
    let cov = crate::stats::covariance(samples);
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    if !(max > 0.0) || eig.eigenvalues.min() <= 1e-12 * max {
        return Err(Error::Degenerate("empirical covariance is singular".into()));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let linear = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let shift = -(&linear * DVector::from_vec(mean));
    AffineMap::new(linear, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::{PI, SQRT_2};

    fn square() -> ConvexBody {
        ConvexBody::cube(2, 1.0).unwrap()
    }

    #[test]
    fn membership_is_closed() {
        let b = ConvexBody::unit_ball(3).unwrap();
        assert!(b.membership(&[0.0, 0.0, 0.0]).unwrap());
        assert!(square().membership(&[1.0, 1.0]).unwrap());
        assert!(!square().membership(&[1.0001, 0.0]).unwrap());
        assert!(matches!(square().membership(&[0.0]), Err(Error::Usage(_))));
    }

    #[test]
    fn chord_closed_forms() {
        let b = ConvexBody::unit_ball(2).unwrap();
        let c = b.chord(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((c.t_minus + 1.0).abs() < 1e-15 && (c.t_plus - 1.0).abs() < 1e-15);
        let c = square().chord(&[0.0, 0.0], &[1.0 / SQRT_2, 1.0 / SQRT_2]).unwrap();
        assert!((c.t_minus + SQRT_2).abs() < 1e-12 && (c.t_plus - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn chord_errors() {
        assert!(matches!(square().chord(&[0.0, 0.0], &[0.0, 0.0]), Err(Error::Usage(_))));
        assert!(matches!(square().chord(&[2.0, 0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn hpolytope_center_and_box() {
        // triangle x ≥ 0, y ≥ 0, x + y ≤ 1
        let p = ConvexBody::hpolytope(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let (lo, hi) = p.bounding_box();
        assert!(lo.iter().all(|v| v.abs() < 1e-9) && hi.iter().all(|v| (v - 1.0).abs() < 1e-9));
        let r = p.inscribed_radius().unwrap();
        assert!((r - 1.0 / (2.0 + SQRT_2)).abs() < 1e-9);
        assert!(p.membership(p.interior_point()).unwrap());
        assert!(ConvexBody::hpolytope(vec![vec![0.0, 0.0]], vec![1.0]).is_err());
    }

    #[test]
    fn ellipsoid_chord_and_membership() {
        let e = ConvexBody::ellipsoid(vec![1.0, 0.0], DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0])))
            .unwrap();
        assert!(e.contains(&[3.0, 0.0]) && !e.contains(&[3.01, 0.0]));
        let c = e.chord(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((c.t_minus + 2.0).abs() < 1e-12 && (c.t_plus - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cut_moves_interior_point() {
        let half = square().cut(vec![1.0, 0.0], 0.0).unwrap();
        assert!(half.interior_point()[0] < 0.0);
        let c = half.chord(&[-0.5, 0.0], &[1.0, 0.0]).unwrap();
        assert!((c.t_plus - 0.5).abs() < 1e-15 && (c.t_minus + 0.5).abs() < 1e-15);
        assert!(matches!(square().cut(vec![1.0, 0.0], -5.0), Err(Error::Range(_))));
    }

    #[test]
    fn direction_in_one_dimension_is_a_sign() {
        let mut rng = stream(3, 0, "dir");
        for _ in 0..10 {
            let d = uniform_direction(&mut rng, 1);
            assert!((d[0].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_fraction_limits_and_errors() {
        let mut rng = stream(3, 0, "cap");
        assert!(cap_fraction(3, 0.5, 0, &mut rng).is_err());
        assert!(cap_fraction(3, 1.0, 10, &mut rng).is_err());
        let near_one = cap_fraction(5, 0.999_999, 20_000, &mut rng).unwrap();
        assert!(near_one.value < 1e-3);
        // n = 2: arc fraction arccos(0.5)/π = 1/3
        let est = cap_fraction(2, 0.5, 200_000, &mut rng).unwrap();
        assert!((est.value - (0.5f64).acos() / PI).abs() < 4.0 * est.se);
    }

    #[test]
    fn lambda_at_face_and_corner() {
        let mut rng = stream(4, 0, "lambda");
        let inside = lambda_fraction(&square(), &[0.0, 0.0], 0.5, 10_000, &mut rng).unwrap();
        assert_eq!(inside.value, 1.0);
        let face = lambda_fraction(&square(), &[1.0, 0.0], 0.1, 40_000, &mut rng).unwrap();
        assert!((face.value - 0.5).abs() < 0.01);
        let corner = lambda_fraction(&square(), &[1.0, 1.0], 0.1, 40_000, &mut rng).unwrap();
        assert!((corner.value - 0.25).abs() < 0.01);
    }

    #[test]
    fn k_r_classification() {
        let mut rng = stream(5, 0, "kr");
        assert_eq!(in_k_r(&square(), &[0.0, 0.0], 0.25, 4_000, &mut rng).unwrap(), KrClass::In);
        assert_eq!(in_k_r(&square(), &[1.0, 1.0], 0.05, 4_000, &mut rng).unwrap(), KrClass::Out);
        assert!(matches!(in_k_r(&square(), &[1.5, 0.0], 0.05, 10, &mut rng), Err(Error::Domain(_))));
        assert_eq!(K_R_THRESHOLD, 0.984375);
    }

    #[test]
    fn affine_map_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(AffineMap::new(m, DVector::zeros(2)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn isotropic_rescale_of_stretched_box() {
        let a = 2.0 * 3f64.sqrt();
        let body = ConvexBody::boxed(vec![-a, -a / 2.0], vec![a, a / 2.0]).unwrap();
        let mut rng = stream(6, 0, "iso");
        let samples: Vec<_> = (0..100_000).map(|_| body.sample_uniform(&mut rng, 10).unwrap()).collect();
        let map = isotropic_rescale(&samples).unwrap();
        let l = map.linear();
        assert!((l[(0, 0)] - 0.5).abs() < 0.01 && (l[(1, 1)] - 1.0).abs() < 0.02);
        assert!(l[(0, 1)].abs() < 0.01);
        let mapped: Vec<_> = samples.iter().map(|x| map.apply(x)).collect();
        let eig = SymmetricEigen::new(crate::stats::covariance(&mapped)).eigenvalues;
        assert!(eig.iter().all(|v| (0.97..=1.03).contains(v)));
        assert!(isotropic_rescale(&samples[..2]).is_err());
    }
}
