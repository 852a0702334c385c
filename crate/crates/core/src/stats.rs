//! Monte Carlo summaries and goodness-of-fit statistics shared by the
//! estimators and test harnesses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub n_samples: usize,
}

impl Estimate {
    /// Mean of Bernoulli trials.
    pub fn from_proportion(successes: usize, n: usize) -> Self {
        let p = if n == 0 { 0.0 } else { successes as f64 / n as f64 };
        let se = if n == 0 { f64::INFINITY } else { (p * (1.0 - p) / n as f64).sqrt() };
        Estimate { value: p, se, n_samples: n }
    }

    /// Sample mean and its naive (independent-draws) standard error.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let (m, v) = mean_var(values);
        Estimate { value: m, se: (v / n as f64).sqrt(), n_samples: n }
    }
}

/// Mean and unbiased variance.
pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let v = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Standard error of the mean of a correlated series by non-overlapping
/// batch means.
pub fn batch_means_se(series: &[f64], n_batches: usize) -> f64 {
    let n_batches = n_batches.max(2).min(series.len().max(2));
    let size = series.len() / n_batches;
    if size == 0 {
        return f64::INFINITY;
    }
    let means: Vec<f64> = (0..n_batches)
        .map(|b| series[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let (_, v) = mean_var(&means);
    (v / n_batches as f64).sqrt()
}

pub fn mean_vector(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points[0].len();
    let mut m = vec![0.0; n];
    for p in points {
        for (mi, pi) in m.iter_mut().zip(p) {
            *mi += pi;
        }
    }
    let k = points.len() as f64;
    m.iter_mut().for_each(|v| *v /= k);
    m
}

/// Empirical covariance (denominator N − 1).
pub fn covariance(points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = points[0].len();
    let m = mean_vector(points);
    let mut cov = DMatrix::<f64>::zeros(n, n);
    let mut centered = vec![0.0; n];
    for p in points {
        for i in 0..n {
            centered[i] = p[i] - m[i];
        }
        for i in 0..n {
            for j in 0..=i {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    let denom = (points.len() as f64 - 1.0).max(1.0);
    for i in 0..n {
        for j in 0..=i {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Largest eigenvalue of a sample covariance together with a standard error.
///
/// The error is the batch-means SE of the squared projections onto the top
/// eigenvector, which accounts for autocorrelation when the points come from
/// a Markov chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopEigen {
    pub value: f64,
    pub se: f64,
}

pub fn top_covariance_eigen(points: &[Vec<f64>], n_batches: usize) -> TopEigen {
    let cov = covariance(points);
    let eig = SymmetricEigen::new(cov);
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    let m = mean_vector(points);
    let squared: Vec<f64> = points
        .iter()
        .map(|p| {
            let proj: f64 = p.iter().zip(&m).zip(v.iter()).map(|((x, mi), vi)| (x - mi) * vi).sum();
            proj * proj
        })
        .collect();
    TopEigen { value, se: batch_means_se(&squared, n_batches) }
}

/// One-sample Kolmogorov–Smirnov statistic against an analytic CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Pearson chi-square goodness-of-fit; returns (statistic, p-value).
pub fn chi_square_test(observed: &[usize], expected_probs: &[f64]) -> (f64, f64) {
    let total: usize = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected_probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("dof > 0").cdf(stat);
    (stat, p)
}

/// Result of the sliced energy-distance permutation test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyTest {
    pub statistic: f64,
    pub p_value: f64,
    pub n_permutations: usize,
}

/// Two-sample energy-distance test on random one-dimensional projections.
///
/// The statistic is the average over `n_directions` fixed random directions of
/// the one-dimensional energy distance
/// `2 E|X − Y| − E|X − X'| − E|Y − Y'|` of the projected samples; averaged over
/// uniformly random directions this is proportional to the multivariate energy
/// distance. The p-value comes from a permutation test with the directions
/// held fixed, so the test is exact for the sliced statistic. Each
/// permutation costs O(N) per direction because the pooled projections are
/// sorted once.
pub fn energy_test<R: Rng + ?Sized>(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    n_directions: usize,
    n_permutations: usize,
    rng: &mut R,
) -> EnergyTest {
    let dim = x[0].len();
    let nx = x.len();
    let pooled: Vec<&Vec<f64>> = x.iter().chain(y.iter()).collect();
    let total = pooled.len();
    // For each direction, pooled projections sorted, with the pooled index.
    let orders: Vec<(Vec<f64>, Vec<usize>)> = (0..n_directions)
        .map(|_| {
            let theta = crate::geometry::uniform_direction(rng, dim);
            let mut proj: Vec<(f64, usize)> = pooled
                .iter()
                .enumerate()
                .map(|(k, p)| (p.iter().zip(&theta).map(|(a, b)| a * b).sum(), k))
                .collect();
            proj.sort_by(|a, b| a.0.total_cmp(&b.0));
            (proj.iter().map(|p| p.0).collect(), proj.iter().map(|p| p.1).collect())
        })
        .collect();
    let pooled_sums: Vec<f64> = orders.iter().map(|(v, _)| within_sum(v.iter().copied())).collect();

    let statistic_for = |in_x: &[bool]| -> f64 {
        let ny = total - nx;
        let mut acc = 0.0;
        for ((values, idx), &all) in orders.iter().zip(&pooled_sums) {
            let sx = within_sum(values.iter().zip(idx).filter(|(_, &k)| in_x[k]).map(|(v, _)| *v));
            let sy = within_sum(values.iter().zip(idx).filter(|(_, &k)| !in_x[k]).map(|(v, _)| *v));
            let cross = all - sx - sy;
            acc += 2.0 * cross / (nx * ny) as f64
                - 2.0 * sx / (nx * nx) as f64
                - 2.0 * sy / (ny * ny) as f64;
        }
        acc / orders.len() as f64
    };

    let mut labels: Vec<bool> = (0..total).map(|k| k < nx).collect();
    let observed = statistic_for(&labels);
    let mut exceed = 0usize;
    for _ in 0..n_permutations {
        labels.shuffle(rng);
        if statistic_for(&labels) >= observed {
            exceed += 1;
        }
    }
    EnergyTest {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (1 + n_permutations) as f64,
        n_permutations,
    }
}

/// Σ_{i<j} |v_i − v_j| for values supplied in ascending order.
fn within_sum(sorted: impl Iterator<Item = f64>) -> f64 {
    // Σ_k v_(k) (2k − m − 1) with 1-based k; computed as a running sum.
    let mut count = 0.0;
    let mut prefix = 0.0;
    let mut acc = 0.0;
    for v in sorted {
        acc += v * count - prefix;
        prefix += v;
        count += 1.0;
    }
    acc
}

/// Empirical quantile by order statistic (`level` in (0, 1)).
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let k = ((level * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn within_sum_matches_brute_force() {
        let v = [0.5, -1.0, 2.0, 3.5, 0.0];
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        let mut brute = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                brute += (v[i] - v[j]).abs();
            }
        }
        assert!((within_sum(s.into_iter()) - brute).abs() < 1e-12);
    }

    #[test]
    fn energy_test_accepts_same_law_and_rejects_shift() {
        let mut rng = stream(1, 0, "energy");
        let draw = |rng: &mut crate::rng::StreamRng, shift: f64| -> Vec<Vec<f64>> {
            (0..800)
                .map(|_| (0..3).map(|_| StandardNormal.sample(rng)).map(|z: f64| z + shift).collect())
                .collect()
        };
        let a = draw(&mut rng, 0.0);
        let b = draw(&mut rng, 0.0);
        let c = draw(&mut rng, 0.3);
        let same = energy_test(&a, &b, 16, 199, &mut rng);
        let shifted = energy_test(&a, &c, 16, 199, &mut rng);
        assert!(same.p_value > 0.01, "{same:?}");
        assert!(shifted.p_value <= 0.01, "{shifted:?}");
    }

    #[test]
    fn ks_two_sample_of_identical_is_zero() {
        let a = [0.1, 0.5, 0.2, 0.9];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert!((ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
