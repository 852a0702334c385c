//! Gaussian tail functions, tail-stable truncated normal inversion, and
//! unit-ball volumes.

use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this point the upper tail is evaluated by its continued fraction
/// instead of `erfc`, which underflows near 38.
const CF_SWITCH: f64 = 30.0;

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

pub fn std_normal_log_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Standard normal CDF Φ(z).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail Q(z) = 1 − Φ(z), accurate in relative terms for large z.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// ln Q(z). Finite for every finite z.
pub fn std_normal_log_sf(z: f64) -> f64 {
    if z < CF_SWITCH {
        std_normal_sf(z).ln()
    } else {
        std_normal_log_pdf(z) - mills_cf(z).ln()
    }
}

/// Continued fraction for φ(z)/Q(z): z + 1/(z + 2/(z + 3/(z + ...))).
fn mills_cf(z: f64) -> f64 {
    let mut acc = z;
    for k in (1..=60).rev() {
        acc = z + k as f64 / acc;
    }
    acc
}

/// Standard normal quantile Φ⁻¹(p) for p ∈ (0, 1).
pub fn std_normal_inv_cdf(p: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Solves ln Q(z) = `log_q` for z ≥ 0 (requires `log_q` ≤ ln ½).
fn inv_log_sf(log_q: f64) -> f64 {
    let mut z = if log_q > -700.0 {
        SQRT_2 * erfc_inv(2.0 * log_q.exp())
    } else {
        // Leading-order asymptotics of the Gaussian tail.
        let a = -2.0 * log_q;
        (a - (2.0 * PI * a).ln()).sqrt()
    };
    for _ in 0..4 {
        let g = std_normal_log_sf(z) - log_q;
        // d/dz ln Q(z) = −φ(z)/Q(z)
        let slope = -(std_normal_log_pdf(z) - std_normal_log_sf(z)).exp();
        let step = g / slope;
        z -= step;
        if step.abs() <= 1e-15 * (1.0 + z.abs()) {
            break;
        }
    }
    z
}

/// Maps `u ∈ [0, 1)` to a draw from the standard normal truncated to
/// `[lo, hi]`, by inverse CDF.
///
/// Intervals on one side of the origin are inverted through the upper tail in
/// log space, so bounds many standard deviations out (tested to 37) still
/// produce interior draws rather than endpoint atoms.
pub fn truncated_std_normal_inverse(lo: f64, hi: f64, u: f64) -> f64 {
    debug_assert!(lo < hi);
    let z = if lo >= 0.0 {
        upper_tail_inverse(lo, hi, u)
    } else if hi <= 0.0 {
        -upper_tail_inverse(-hi, -lo, 1.0 - u)
    } else {
        let pl = std_normal_cdf(lo);
        let ph = std_normal_cdf(hi);
        let goal = u * std_normal_interval_mass(lo, hi);
        let mut z = std_normal_inv_cdf(pl + u * (ph - pl)).clamp(lo, hi);
        // erfc_inv is good to about 1e-10; polish against the interval mass
        for _ in 0..2 {
            let pdf = std_normal_pdf(z);
            if pdf <= 0.0 {
                break;
            }
            z -= (std_normal_interval_mass(lo, z) - goal) / pdf;
        }
        z
    };
    z.clamp(lo, hi)
}

fn upper_tail_inverse(lo: f64, hi: f64, u: f64) -> f64 {
    let lq_lo = std_normal_log_sf(lo);
    let lq_hi = if hi.is_finite() {
        std_normal_log_sf(hi)
    } else {
        f64::NEG_INFINITY
    };
    // q = Q(lo) − u (Q(lo) − Q(hi)) = Q(lo) (1 − u (1 − Q(hi)/Q(lo)))
    let frac = -(lq_hi - lq_lo).exp_m1();
    let log_q = lq_lo + (-u * frac).ln_1p();
    if log_q == f64::NEG_INFINITY {
        return hi;
    }
    inv_log_sf(log_q)
}

/// Φ(hi) − Φ(lo) without cancellation in either tail.
pub fn std_normal_interval_mass(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        std_normal_sf(lo) - std_normal_sf(hi)
    } else if hi <= 0.0 {
        std_normal_sf(-hi) - std_normal_sf(-lo)
    } else {
        1.0 - std_normal_sf(hi) - std_normal_sf(-lo)
    }
}

/// Volume of the unit ball in Rⁿ, π^{n/2} / Γ(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    (half * PI.ln() - ln_gamma(half + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sf_matches_erfc_region_and_continues_smoothly() {
        for &z in &[0.0, 1.0, 5.0, 20.0, 29.0] {
            let direct = std_normal_sf(z).ln();
            assert!((std_normal_log_sf(z) - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
        let below = std_normal_sf(29.999).ln();
        let above = std_normal_log_sf(30.001);
        assert!(above < below && below - above < 0.07);
        // Mills ratio asymptotics: ln Q(z) ≈ ln φ(z) − ln z − 1/z²
        let z: f64 = 50.0;
        let approx = std_normal_log_pdf(z) - z.ln() - 1.0 / (z * z);
        assert!((std_normal_log_sf(z) - approx).abs() < 1e-5);
    }

    #[test]
    fn truncated_inverse_covers_far_tails() {
        for &lo in &[6.5, 20.0, 37.0] {
            let hi = lo + 1.0;
            for &u in &[0.0, 1e-12, 0.3, 0.999_999] {
                let z = truncated_std_normal_inverse(lo, hi, u);
                assert!(z >= lo && z <= hi, "lo={lo} u={u} z={z}");
                let z2 = -truncated_std_normal_inverse(-hi, -lo, 1.0 - u);
                assert!((z - z2).abs() < 1e-9 * z.abs());
            }
            // median of the far tail sits about ln 2 / lo above the bound
            let med = truncated_std_normal_inverse(lo, hi, 0.5);
            let expected = lo + std::f64::consts::LN_2 / lo;
            assert!(med > lo && (med - expected).abs() < 0.5 / (lo * lo), "{med} {expected}");
        }
    }

    #[test]
    fn truncated_inverse_is_monotone_in_u() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let u = i as f64 / 1000.0;
            let z = truncated_std_normal_inverse(-0.3, 8.0, u);
            assert!(z >= prev);
            prev = z;
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-12);
    }
}
