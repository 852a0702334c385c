//! Comparisons against independent closed forms and brute-force numerics.

use hitrun::chains::transition_density;
use hitrun::diagnostics::{estimate_f_u, MarginalRef};
use hitrun::logconcave1d::{check_density_at_zero, check_max_density, library};
use hitrun::rng::stream;
use hitrun::special::truncated_std_normal_inverse;
use hitrun::stats::ks_statistic;
use hitrun::{ConvexBody, Target};
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::PI;
use std::sync::Arc;

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn chord_mass_matches_line_integral() {
    let body = Arc::new(ConvexBody::cube(3, 1.0).unwrap());
    let target = Target::truncated_gaussian(body.clone(), vec![0.4, -0.2, 0.9], 3.0).unwrap();
    let u = [0.1, 0.2, -0.3];
    let s = 1.0 / 3f64.sqrt();
    for theta in [[s, s, s], [1.0, 0.0, 0.0], [0.6, 0.0, -0.8]] {
        let chord = body.chord(&u, &theta).unwrap();
        let law = target.restrict_to_chord(&chord).unwrap();
        let mass = law.mass() * target.line_offset_log_factor(&u, &theta).exp();
        let brute = simpson(
            |t| {
                // endpoints can round just outside the box
                let x: Vec<f64> = u.iter().zip(&theta).map(|(a, d)| (a + t * d).clamp(-1.0, 1.0)).collect();
                target.log_density_unnormalized(&x).exp()
            },
            chord.t_minus,
            chord.t_plus,
            20_000,
        );
        assert!((mass - brute).abs() < 1e-9 * brute, "{mass} {brute}");
    }
}

#[test]
fn disc_transition_density_matches_chord_formula() {
    let target = Target::uniform(Arc::new(ConvexBody::unit_ball(2).unwrap()));
    let u = [0.3f64, -0.2];
    for x in [[0.5f64, 0.5], [-0.9, 0.1], [0.31, -0.2]] {
        let d = [x[0] - u[0], x[1] - u[1]];
        let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let th = [d[0] / r, d[1] / r];
        // |u + tθ|² = 1: t² + 2(u·θ)t + |u|² − 1 = 0
        let b = u[0] * th[0] + u[1] * th[1];
        let c = u[0] * u[0] + u[1] * u[1] - 1.0;
        let length = 2.0 * (b * b - c).sqrt();
        let expected = 1.0 / (PI * length * r);
        let got = transition_density(&u, &x, &target).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected, "{got} {expected}");
    }
}

#[test]
fn ball_coordinate_marginals_match_closed_forms() {
    let disc = MarginalRef::BallCoordinate { center: 0.0, radius: 1.0, dim: 2 };
    let ball = MarginalRef::BallCoordinate { center: 0.0, radius: 1.0, dim: 3 };
    for s in [-0.95, -0.5, 0.0, 0.2, 0.8] {
        let f2 = 0.5 + (s * (1.0f64 - s * s).sqrt() + f64::asin(s)) / PI;
        let f3 = (1.0 + s) * (1.0 + s) * (2.0 - s) / 4.0;
        assert!((disc.cdf(s) - f2).abs() < 1e-12);
        assert!((ball.cdf(s) - f3).abs() < 1e-12);
    }
}

#[test]
fn truncated_inverse_matches_statrs_in_the_bulk() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    for (lo, hi) in [(-1.0, 2.0), (0.5, 3.0), (-4.0, -0.5)] {
        let (pl, ph) = (normal.cdf(lo), normal.cdf(hi));
        for u in [0.05, 0.3, 0.5, 0.9] {
            let expected = normal.inverse_cdf(pl + u * (ph - pl));
            let got = truncated_std_normal_inverse(lo, hi, u);
            assert!((got - expected).abs() < 1e-8, "{lo} {hi} {u}: {got} {expected}");
        }
    }
}

#[test]
fn exact_samples_follow_the_marginals() {
    let body = Arc::new(ConvexBody::cube(3, 1.0).unwrap());
    let target = Target::truncated_gaussian(body, vec![0.5, -2.0, 0.0], 2.0).unwrap();
    let refs = MarginalRef::for_target(&target).unwrap();
    let mut rng = stream(9, 0, "exact");
    let draws: Vec<Vec<f64>> = (0..20_000).map(|_| target.sample_exact(&mut rng, 1_000_000).unwrap()).collect();
    for (i, r) in refs.iter().enumerate() {
        let xs: Vec<f64> = draws.iter().map(|x| x[i]).collect();
        let d = ks_statistic(&xs, |x| r.cdf(x));
        // 1% critical value 1.63/√N
        assert!(d < 1.63 / (xs.len() as f64).sqrt(), "axis {i}: {d}");
    }
}

#[test]
fn f_u_on_the_disc_centre_is_one_eighth() {
    let target = Target::uniform(Arc::new(ConvexBody::unit_ball(2).unwrap()));
    let mut rng = stream(4, 0, "f_u");
    let f = estimate_f_u(&target, &[0.0, 0.0], 200_000, &mut rng).unwrap();
    assert!((f.value - 0.125).abs() < 0.005, "{f:?}");
}

#[test]
fn isotropic_density_values() {
    let expected_max = [1.0 / (2.0 * PI).sqrt(), 1.0 / (2.0 * 3f64.sqrt()), 1.0 / 2f64.sqrt(), PI / (4.0 * 3f64.sqrt())];
    for (d, want) in library().iter().zip(expected_max) {
        let max = check_max_density(d).unwrap();
        let zero = check_density_at_zero(d).unwrap();
        assert!((max.value - want).abs() < 1e-9, "{} {}", d.name(), max.value);
        assert!((zero.value - want).abs() < 1e-9, "{} {}", d.name(), zero.value);
    }
}
