use hitrun::chains::{run_chain, transition_density, ChainConfig};
use hitrun::diagnostics::ls_bound;
use hitrun::geometry::{cap_bound, lambda_fraction, uniform_direction};
use hitrun::localization::{tilt_1d, Grid1D, Tilt1DParams};
use hitrun::logconcave1d::{standardize, Density1D};
use hitrun::rng::stream;
use hitrun::{ConvexBody, Target};
use proptest::prelude::*;
use std::sync::Arc;

fn body_strategy() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (2usize..6, 0.2f64..3.0).prop_map(|(n, r)| ConvexBody::ball(vec![0.1; n], r).unwrap()),
        (2usize..6, 0.2f64..3.0).prop_map(|(n, h)| ConvexBody::cube(n, h).unwrap()),
        (2usize..6, 0.5f64..3.0).prop_map(|(n, s)| ConvexBody::simplex(n, s).unwrap()),
    ]
}

fn inside(body: &ConvexBody, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 0, "inside");
    body.sample_uniform(&mut rng, 1_000_000).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_endpoints_lie_on_the_boundary(body in body_strategy(), seed in 0u64..1000) {
        let u = inside(&body, seed);
        let mut rng = stream(seed, 1, "dir");
        let theta = uniform_direction(&mut rng, body.dim());
        let chord = body.chord(&u, &theta).unwrap();
        prop_assert!(chord.t_minus <= 0.0 && chord.t_plus >= 0.0);
        let scale = body.circum_radius();
        for (t, outward) in [(chord.t_minus, -1.0), (chord.t_plus, 1.0)] {
            let just_in = chord.point(t - outward * 1e-9 * scale);
            let just_out = chord.point(t + outward * 1e-6 * scale);
            prop_assert!(body.contains(&just_in));
            prop_assert!(!body.contains(&just_out));
        }
    }

    #[test]
    fn chord_flips_with_direction(body in body_strategy(), seed in 0u64..1000) {
        let u = inside(&body, seed);
        let mut rng = stream(seed, 2, "dir");
        let theta = uniform_direction(&mut rng, body.dim());
        let neg: Vec<f64> = theta.iter().map(|v| -v).collect();
        let (a, b) = body.chord_params(&u, &theta);
        let (c, d) = body.chord_params(&u, &neg);
        let tol = 1e-12 * (1.0 + body.circum_radius());
        prop_assert!((a + d).abs() <= tol && (b + c).abs() <= tol);
    }

    #[test]
    fn transition_density_is_reversible(body in body_strategy(), seed in 0u64..1000, m in 0.5f64..8.0) {
        let u = inside(&body, seed);
        let x = inside(&body, seed + 10_000);
        let body = Arc::new(body);
        let beta = vec![0.2; body.dim()];
        for target in [Target::uniform(body.clone()), Target::truncated_gaussian(body.clone(), beta, m).unwrap()] {
            let forward = target.log_density_unnormalized(&u) + transition_density(&u, &x, &target).unwrap().ln();
            let backward = target.log_density_unnormalized(&x) + transition_density(&x, &u, &target).unwrap().ln();
            prop_assert!((forward - backward).abs() <= 1e-9 * (1.0 + forward.abs()));
        }
    }

    #[test]
    fn lambda_is_monotone_under_common_draws(body in body_strategy(), seed in 0u64..1000, t in 0.01f64..1.0) {
        let u = inside(&body, seed);
        let small = lambda_fraction(&body, &u, t, 500, &mut stream(seed, 3, "lambda")).unwrap();
        let large = lambda_fraction(&body, &u, 2.0 * t, 500, &mut stream(seed, 3, "lambda")).unwrap();
        prop_assert!(small.value >= large.value);
    }

    #[test]
    fn cap_bound_decreases_in_both_arguments(n in 1usize..200, c in 0.0f64..1.0) {
        let b = cap_bound(n, c);
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(cap_bound(n + 1, c) <= b);
        prop_assert!(cap_bound(n, (c + 0.01).min(1.0)) <= b);
    }

    #[test]
    fn ls_bound_decreases_with_steps_and_conductance(
        m in 1.0f64..10.0, s in 0.0f64..0.5, phi in 0.01f64..1.0, n in 0u64..10_000,
    ) {
        let b = ls_bound(m, s, phi, n);
        prop_assert!(b >= m * s);
        prop_assert!(ls_bound(m, s, phi, n + 1) <= b);
        prop_assert!(ls_bound(m, s, (phi * 1.1).min(1.0), n) <= b);
    }

    #[test]
    fn standardize_is_idempotent(which in 0usize..4, scale in 0.1f64..5.0) {
        let d = match which {
            0 => Density1D::Gaussian { sigma: scale },
            1 => Density1D::Uniform { a: -scale, b: 2.0 * scale },
            2 => Density1D::Laplace { scale },
            _ => Density1D::Logistic { scale },
        };
        let once = standardize(&d).unwrap();
        let twice = standardize(&once).unwrap();
        prop_assert!(once.is_isotropic(1e-12));
        for x in [-1.5, -0.3, 0.0, 0.7, 2.0] {
            prop_assert!((once.pdf(x) - twice.pdf(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn grid_is_normalized_and_tilts_stay_normalized(
        weights in proptest::collection::vec(0.0f64..1.0, 64..200), y in -2.0f64..2.0, tau in 0.0f64..50.0,
    ) {
        prop_assume!(weights.iter().sum::<f64>() > 0.1);
        let g = Grid1D::new(-2.0, 2.0, weights.clone()).unwrap();
        prop_assert!((g.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let total: f64 = weights.iter().sum();
        for (m, w) in g.mass().iter().zip(&weights) {
            prop_assert!((m - w / total).abs() < 1e-12);
        }
        let t = tilt_1d(&g, &Tilt1DParams { y, tau, sigma2: 1.0, alpha: 100.0 }).unwrap();
        prop_assert!((t.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let same = tilt_1d(&g, &Tilt1DParams { y, tau: 0.0, sigma2: 1.0, alpha: 100.0 }).unwrap();
        prop_assert!(same.tv(&g).unwrap() < 1e-12);
    }

    #[test]
    fn chains_stay_inside_and_are_seed_deterministic(body in body_strategy(), seed in 0u64..1000, lazy: bool) {
        let body = Arc::new(body);
        let target = Target::uniform(body.clone());
        let init = body.interior_point().to_vec();
        let delta = 0.1 * body.circum_radius();
        for config in [ChainConfig::hit_and_run().lazy(lazy), ChainConfig::ball_walk(delta).lazy(lazy)] {
            let a = run_chain(&config, &target, &init, 200, 1, stream(seed, 0, "prop")).unwrap();
            let b = run_chain(&config, &target, &init, 200, 1, stream(seed, 0, "prop")).unwrap();
            prop_assert_eq!(&a.rows, &b.rows);
            prop_assert!(a.rows.iter().all(|r| body.contains(&r.x)));
        }
    }
}
