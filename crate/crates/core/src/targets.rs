//! Target densities on a convex body and their exact one-dimensional
//! restriction to a chord.
//!
//! Densities are unnormalised: the uniform target has density 1 on `K`, and
//! the truncated Gaussian `ν_{β,m}` has density `exp(−(m/2)|x − β|²)` on `K`.
//! Every quantity the samplers use is a ratio, so the missing normaliser
//! never matters.

use crate::error::{Error, Result};
use crate::geometry::{Chord, ConvexBody};
use crate::special::{std_normal_interval_mass, truncated_std_normal_inverse};
use rand::Rng;
use rand_distr::Distribution;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum TargetKind {
    Uniform,
    /// Gaussian with mean parameter `beta` and variance `1/m`, restricted to
    /// the body. `beta` need not lie in the body.
    TruncatedGaussian { beta: Vec<f64>, m: f64 },
}

#[derive(Debug, Clone)]
pub struct Target {
    body: Arc<ConvexBody>,
    kind: TargetKind,
}

impl Target {
    pub fn uniform(body: Arc<ConvexBody>) -> Self {
        Target { body, kind: TargetKind::Uniform }
    }

    pub fn truncated_gaussian(body: Arc<ConvexBody>, beta: Vec<f64>, m: f64) -> Result<Self> {
        if beta.len() != body.dim() {
            return Err(Error::usage("beta has wrong dimension"));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::usage("precision m must be positive"));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::usage("beta must be finite"));
        }
        Ok(Target { body, kind: TargetKind::TruncatedGaussian { beta, m } })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn body_arc(&self) -> &Arc<ConvexBody> {
        &self.body
    }

    pub fn kind(&self) -> &TargetKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `ln ν(x)` up to an additive constant; `−∞` outside the body.
    pub fn log_density_unnormalized(&self, x: &[f64]) -> f64 {
        if !self.body.contains(x) {
            return f64::NEG_INFINITY;
        }
        self.log_density_inside(x)
    }

    /// Log density assuming `x` is in the body.
    #[inline]
    pub fn log_density_inside(&self, x: &[f64]) -> f64 {
        match &self.kind {
            TargetKind::Uniform => 0.0,
            TargetKind::TruncatedGaussian { beta, m } => {
                let d2: f64 = x.iter().zip(beta).map(|(a, b)| (a - b) * (a - b)).sum();
                -0.5 * m * d2
            }
        }
    }

    /// The conditional law of the chord parameter `t` of the next point.
    pub fn restrict_to_chord(&self, chord: &Chord) -> Result<ChordLaw> {
        let length = chord.length();
        if !(length >= 1e-12 * self.body.circum_radius()) {
            return Err(Error::DegenerateChord { length });
        }
        Ok(self.chord_law(&chord.base, &chord.direction, chord.t_minus, chord.t_plus))
    }

    /// Chord law without the degeneracy check.
    #[inline]
    pub fn chord_law(&self, base: &[f64], direction: &[f64], a: f64, b: f64) -> ChordLaw {
        match &self.kind {
            TargetKind::Uniform => ChordLaw::UniformSegment { a, b },
            TargetKind::TruncatedGaussian { beta, m } => {
                let center = beta
                    .iter()
                    .zip(base)
                    .zip(direction)
                    .map(|((bv, u), th)| (bv - u) * th)
                    .sum();
                ChordLaw::TruncGauss1D { center, std: 1.0 / m.sqrt(), a, b }
            }
        }
    }

    /// `−(m/2)·dist²(β, line)` for the line through `base` along the unit
    /// `direction`. Adding it to `ln ChordLaw::mass` gives the line integral
    /// of the unnormalised density.
    #[inline]
    pub fn line_offset_log_factor(&self, base: &[f64], direction: &[f64]) -> f64 {
        match &self.kind {
            TargetKind::Uniform => 0.0,
            TargetKind::TruncatedGaussian { beta, m } => {
                let mut proj = 0.0;
                let mut d2 = 0.0;
                for i in 0..base.len() {
                    let w = beta[i] - base[i];
                    proj += w * direction[i];
                    d2 += w * w;
                }
                -0.5 * m * (d2 - proj * proj).max(0.0)
            }
        }
    }
}

impl Target {
    /// Exact draw from the normalised target.
    ///
    /// Uniform targets use the body's uniform sampler. Truncated Gaussians on
    /// an uncut box factor into independent one-dimensional truncated
    /// normals. Other bodies alternate two exact rejection samplers (a
    /// Gaussian proposal kept when it lands in the body, and a uniform
    /// proposal kept with probability `ν(x)/sup ν`); every accepted draw has
    /// the target law whichever sampler produced it.
    pub fn sample_exact<R: Rng + ?Sized>(&self, rng: &mut R, max_tries: usize) -> Result<Vec<f64>> {
        match &self.kind {
            TargetKind::Uniform => self.body.sample_uniform(rng, max_tries),
            TargetKind::TruncatedGaussian { beta, m } => {
                let s = 1.0 / m.sqrt();
                if let Some((lower, upper)) = self.body.as_box() {
                    return Ok((0..beta.len())
                        .map(|i| {
                            ChordLaw::TruncGauss1D { center: beta[i], std: s, a: lower[i], b: upper[i] }.sample(rng)
                        })
                        .collect());
                }
                for _ in 0..max_tries.max(1) {
                    let x: Vec<f64> = beta
                        .iter()
                        .map(|b| {
                            let z: f64 = rand_distr::StandardNormal.sample(rng);
                            b + s * z
                        })
                        .collect();
                    if self.body.contains(&x) {
                        return Ok(x);
                    }
                    if let Ok(y) = self.body.sample_uniform(rng, 1) {
                        if rng.random::<f64>().ln() <= self.log_density_inside(&y) {
                            return Ok(y);
                        }
                    }
                }
                Err(Error::Efficiency(format!(
                    "truncated Gaussian rejection exceeded {max_tries} proposals"
                )))
            }
        }
    }
}

/// Law of the chord parameter `t ∈ [a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChordLaw {
    UniformSegment { a: f64, b: f64 },
    /// Density ∝ `exp(−(t − center)² / (2 std²))` on `[a, b]`.
    TruncGauss1D { center: f64, std: f64, a: f64, b: f64 },
}

impl ChordLaw {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ChordLaw::UniformSegment { a, b } => (a, b),
            ChordLaw::TruncGauss1D { a, b, .. } => (a, b),
        }
    }

    /// Exact draw of `t`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.inverse_cdf(u)
    }

    /// Quantile function; maps `u ∈ [0, 1)` into `[a, b]`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            ChordLaw::UniformSegment { a, b } => (a + u * (b - a)).clamp(a, b),
            ChordLaw::TruncGauss1D { center, std, a, b } => {
                let lo = (a - center) / std;
                let hi = (b - center) / std;
                (center + std * truncated_std_normal_inverse(lo, hi, u)).clamp(a, b)
            }
        }
    }

    /// `P(t ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ChordLaw::UniformSegment { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            ChordLaw::TruncGauss1D { center, std, a, b } => {
                if x <= a {
                    return 0.0;
                }
                if x >= b {
                    return 1.0;
                }
                let lo = (a - center) / std;
                let hi = (b - center) / std;
                let z = (x - center) / std;
                (std_normal_interval_mass(lo, z) / std_normal_interval_mass(lo, hi)).clamp(0.0, 1.0)
            }
        }
    }

    /// Unnormalised mass along the chord, in the same normalisation as the
    /// target's unnormalised density evaluated on the line through the chord
    /// at the point closest to `beta`: `b − a` for uniform,
    /// `s√(2π)(Φ((b−c)/s) − Φ((a−c)/s))` for the Gaussian case.
    pub fn mass(&self) -> f64 {
        match *self {
            ChordLaw::UniformSegment { a, b } => b - a,
            ChordLaw::TruncGauss1D { center, std, a, b } => {
                std * (2.0 * PI).sqrt() * std_normal_interval_mass((a - center) / std, (b - center) / std)
            }
        }
    }

    /// `ln` of the unnormalised 1-D density at `t` relative to the mass
    /// normalisation of [`ChordLaw::mass`].
    pub fn log_density(&self, t: f64) -> f64 {
        let (a, b) = self.bounds();
        if t < a || t > b {
            return f64::NEG_INFINITY;
        }
        match *self {
            ChordLaw::UniformSegment { .. } => 0.0,
            ChordLaw::TruncGauss1D { center, std, .. } => -0.5 * ((t - center) / std).powi(2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn disc() -> Arc<ConvexBody> {
        Arc::new(ConvexBody::unit_ball(2).unwrap())
    }

    #[test]
    fn log_density_values() {
        let sq = Arc::new(ConvexBody::cube(2, 1.0).unwrap());
        assert_eq!(Target::uniform(sq.clone()).log_density_unnormalized(&[0.0, 0.0]), 0.0);
        assert_eq!(Target::uniform(sq).log_density_unnormalized(&[2.0, 0.0]), f64::NEG_INFINITY);
        let g = Target::truncated_gaussian(disc(), vec![0.2, 0.1], 3.0).unwrap();
        assert_eq!(g.log_density_unnormalized(&[0.2, 0.1]), 0.0);
        let g = Target::truncated_gaussian(disc(), vec![0.0, 0.0], 4.0).unwrap();
        assert!((g.log_density_unnormalized(&[0.5, 0.0]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_targets() {
        assert!(Target::truncated_gaussian(disc(), vec![0.0], 1.0).is_err());
        assert!(Target::truncated_gaussian(disc(), vec![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn restriction_projects_beta() {
        let t = Target::uniform(disc());
        let chord = t.body().chord(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(t.restrict_to_chord(&chord).unwrap(), ChordLaw::UniformSegment { a: -1.0, b: 1.0 });

        let g = Target::truncated_gaussian(disc(), vec![0.0, 0.0], 1.0).unwrap();
        let chord = g.body().chord(&[0.5, 0.0], &[1.0, 0.0]).unwrap();
        match g.restrict_to_chord(&chord).unwrap() {
            ChordLaw::TruncGauss1D { center, std, a, b } => {
                assert!((center + 0.5).abs() < 1e-15);
                assert_eq!(std, 1.0);
                assert!((a + 1.5).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }

        let u = [0.1, -0.3];
        let g = Target::truncated_gaussian(disc(), u.to_vec(), 2.0).unwrap();
        let chord = g.body().chord(&u, &[0.6, 0.8]).unwrap();
        match g.restrict_to_chord(&chord).unwrap() {
            ChordLaw::TruncGauss1D { center, .. } => assert_eq!(center, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_chord_is_an_error() {
        let sq = Arc::new(ConvexBody::cube(2, 1.0).unwrap());
        let t = Target::uniform(sq.clone());
        let chord = sq.chord(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(t.restrict_to_chord(&chord).is_ok());
        let corner = sq.chord(&[1.0, 1.0], &[1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()]).unwrap();
        assert!(matches!(t.restrict_to_chord(&corner), Err(Error::DegenerateChord { .. })));
    }

    #[test]
    fn chord_mass_values() {
        assert_eq!(ChordLaw::UniformSegment { a: -1.0, b: 1.0 }.mass(), 2.0);
        let full = ChordLaw::TruncGauss1D { center: 0.0, std: 1.0, a: -60.0, b: 60.0 }.mass();
        assert!((full - (2.0 * PI).sqrt()).abs() < 1e-14);
        let half = ChordLaw::TruncGauss1D { center: 0.0, std: 1.0, a: 0.0, b: 60.0 }.mass();
        assert!((half - (2.0 * PI).sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn samples_stay_on_chord_even_in_far_tails() {
        let mut rng = stream(11, 0, "tails");
        let law = ChordLaw::TruncGauss1D { center: 0.0, std: 0.01, a: 0.37, b: 0.5 };
        for _ in 0..1000 {
            let t = law.sample(&mut rng);
            assert!(t > 0.37 && t <= 0.5);
        }
        let law = ChordLaw::TruncGauss1D { center: 10.0, std: 0.25, a: -1.0, b: 0.5 };
        let mut max_seen = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let t = law.sample(&mut rng);
            assert!((-1.0..0.5).contains(&t) || t == 0.5);
            max_seen = max_seen.max(t);
        }
        assert!(max_seen > 0.49);
    }

    #[test]
    fn cdf_and_inverse_agree() {
        let law = ChordLaw::TruncGauss1D { center: 0.3, std: 0.7, a: -1.0, b: 2.0 };
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            let got = law.cdf(law.inverse_cdf(u));
            assert!((got - u).abs() < 1e-12, "{u} {got}");
        }
    }
}
