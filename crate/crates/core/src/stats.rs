//! Statistical primitives for the verification suite: one-sample KS test,
//! chi-square uniformity test, multivariate energy-distance permutation test,
//! and moment estimation with standard errors.
//!
//! KS p-values are asymptotic, which is adequate at the sample sizes (>= 100)
//! used by the suite. Permutation tests are seed-deterministic: permutation
//! `i` draws from its own derived stream, so p-values reproduce bit-exactly
//! and do not depend on the parallel schedule.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

use crate::rng::{derive_stream, STREAM_AUX};

#[derive(Debug, Error)]
pub enum StatError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate sample: all values equal")]
    DegenerateSample,
    #[error("dimension mismatch between samples ({a} vs {b})")]
    DimensionMismatch { a: usize, b: usize },
    #[error("expected count per cell must be >= {needed}, got {got:.2}")]
    LowExpectedCount { needed: f64, got: f64 },
    #[error("sample contains a non-finite value")]
    NonFinite,
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub method: &'static str,
}

/// Standard normal CDF.
pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Survival function of the Kolmogorov distribution at `lambda`, i.e. the
/// asymptotic p-value for `sqrt(n) * D = lambda`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 1e-8 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form, fast for small arguments
        let y = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda)).exp();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda
            * (y + y.powi(9) + y.powi(25) + y.powi(49));
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// One-sample KS test of `sample` against a reference CDF.
pub fn ks_1d(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult, StatError> {
    let n = sample.len();
    if n < 8 {
        return Err(StatError::TooFewSamples { needed: 8, got: n });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(StatError::NonFinite);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[n - 1] {
        return Err(StatError::DegenerateSample);
    }
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(TestResult {
        statistic: d,
        p_value: kolmogorov_sf(nf.sqrt() * d),
        n_a: n,
        n_b: 0,
        method: "ks-1d-asymptotic",
    })
}

/// Pearson chi-square test of uniformity over the given cell counts.
pub fn chi_square_uniform(counts: &[u64]) -> Result<TestResult, StatError> {
    let m = counts.len();
    if m < 2 {
        return Err(StatError::TooFewSamples { needed: 2, got: m });
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / m as f64;
    if expected < 5.0 {
        return Err(StatError::LowExpectedCount {
            needed: 5.0,
            got: expected,
        });
    }
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = (m - 1) as f64;
    let p_value = if statistic == 0.0 {
        1.0
    } else {
        1.0 - ChiSquared::new(df).unwrap().cdf(statistic)
    };
    Ok(TestResult {
        statistic,
        p_value,
        n_a: total as usize,
        n_b: 0,
        method: "chi-square-uniform",
    })
}

/// Energy statistic `2 E|A-B| - E|A-A'| - E|B-B'|` from a pooled distance
/// matrix, for the points whose labels split the pool into `A` (true) and
/// `B`. V-statistic convention (within-sample means over all ordered pairs),
/// so two copies of the same sample give exactly zero.
fn energy_statistic(dist: &[f64], total: usize, in_a: &[bool], na: usize, nb: usize) -> f64 {
    let mut sum_ab = 0.0;
    let mut sum_aa = 0.0;
    let mut sum_bb = 0.0;
    for i in 0..total {
        let row = i * total;
        for j in (i + 1)..total {
            let d = dist[row + j];
            match (in_a[i], in_a[j]) {
                (true, true) => sum_aa += d,
                (false, false) => sum_bb += d,
                _ => sum_ab += d,
            }
        }
    }
    let (na, nb) = (na as f64, nb as f64);
    2.0 * sum_ab / (na * nb) - 2.0 * sum_aa / (na * na) - 2.0 * sum_bb / (nb * nb)
}

/// Two-sample energy-distance test with permutation calibration.
///
/// Deterministic for a given `seed`; permutations are processed in parallel
/// with per-permutation derived streams so the p-value is schedule
/// independent.
pub fn energy_distance_perm(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    permutations: usize,
    seed: u64,
) -> Result<TestResult, StatError> {
    let (na, nb) = (a.len(), b.len());
    if na < 50 || nb < 50 {
        return Err(StatError::TooFewSamples {
            needed: 50,
            got: na.min(nb),
        });
    }
    let dim = a[0].len();
    if b[0].len() != dim || a.iter().any(|v| v.len() != dim) || b.iter().any(|v| v.len() != dim) {
        return Err(StatError::DimensionMismatch {
            a: dim,
            b: b[0].len(),
        });
    }
    let total = na + nb;
    let pool: Vec<&[f64]> = a.iter().chain(b.iter()).map(|v| v.as_slice()).collect();
    if pool.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
        return Err(StatError::NonFinite);
    }
    let mut dist = vec![0.0f64; total * total];
    for i in 0..total {
        for j in (i + 1)..total {
            let d = crate::geom::distance(pool[i], pool[j]);
            dist[i * total + j] = d;
            dist[j * total + i] = d;
        }
    }
    let mut labels = vec![false; total];
    for l in labels.iter_mut().take(na) {
        *l = true;
    }
    let observed = energy_statistic(&dist, total, &labels, na, nb);

    let exceed: usize = (0..permutations)
        .into_par_iter()
        .map(|p| {
            let mut rng = derive_stream(seed, STREAM_AUX, p as u64);
            let mut idx: Vec<usize> = (0..total).collect();
            idx.shuffle(&mut rng);
            let mut in_a = vec![false; total];
            for &i in idx.iter().take(na) {
                in_a[i] = true;
            }
            usize::from(energy_statistic(&dist, total, &in_a, na, nb) >= observed)
        })
        .sum();

    Ok(TestResult {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (permutations + 1) as f64,
        n_a: na,
        n_b: nb,
        method: "energy-distance-permutation",
    })
}

/// Sample mean and unbiased covariance with standard errors.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MeanCov {
    pub mean: Vec<f64>,
    /// Row-major `dim x dim` unbiased covariance.
    pub cov: Vec<f64>,
    /// Standard error of each mean coordinate.
    pub se_mean: Vec<f64>,
    pub n: usize,
    pub dim: usize,
}

impl MeanCov {
    /// Approximate standard error of covariance entry `(i, j)` under
    /// near-Gaussian sampling.
    pub fn se_cov(&self, i: usize, j: usize) -> f64 {
        let d = self.dim;
        ((self.cov[i * d + i] * self.cov[j * d + j] + self.cov[i * d + j].powi(2))
            / (self.n as f64 - 1.0))
            .sqrt()
    }
}

pub fn mean_cov(sample: &[Vec<f64>]) -> Result<MeanCov, StatError> {
    let n = sample.len();
    if n < 2 {
        return Err(StatError::TooFewSamples { needed: 2, got: n });
    }
    let dim = sample[0].len();
    let nf = n as f64;
    let mut mean = vec![0.0; dim];
    for v in sample {
        if v.len() != dim {
            return Err(StatError::DimensionMismatch { a: dim, b: v.len() });
        }
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= nf;
    }
    let mut cov = vec![0.0; dim * dim];
    for v in sample {
        for i in 0..dim {
            let di = v[i] - mean[i];
            for j in i..dim {
                cov[i * dim + j] += di * (v[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let c = cov[i * dim + j] / (nf - 1.0);
            cov[i * dim + j] = c;
            cov[j * dim + i] = c;
        }
    }
    let se_mean = (0..dim).map(|i| (cov[i * dim + i] / nf).sqrt()).collect();
    Ok(MeanCov {
        mean,
        cov,
        se_mean,
        n,
        dim,
    })
}

/// Mean and standard error of a scalar sample.
pub fn mean_se(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    if sample.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Spectral norm of a symmetric matrix by cyclic Jacobi sweeps.
pub fn sym_op_norm(matrix: &[f64], n: usize) -> f64 {
    debug_assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    for _ in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal_sample(n: usize, dim: usize, seed: u64, shift: f64) -> Vec<Vec<f64>> {
        let mut rng = derive_stream(seed, STREAM_AUX, 999);
        (0..n)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.sample::<f64, _>(StandardNormal) + shift)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn ks_null_calibration() {
        // inverse-CDF draws from the reference: p should rarely dip below 0.01
        let mut low = 0;
        for rep in 0..100u64 {
            let mut rng = derive_stream(rep, STREAM_AUX, 5);
            let sample: Vec<f64> = (0..1000)
                .map(|_| {
                    let u: f64 = rng.gen_range(0.0..1.0);
                    // inverse CDF of Exp(1)
                    -(1.0 - u).ln()
                })
                .collect();
            let res = ks_1d(&sample, |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x).exp() }).unwrap();
            if res.p_value <= 0.01 {
                low += 1;
            }
        }
        assert!(low <= 5, "{low} of 100 null repeats fell below p = 0.01");
    }

    #[test]
    fn ks_detects_gross_shift() {
        let sample: Vec<f64> = normal_sample(500, 1, 3, 5.0)
            .into_iter()
            .map(|v| v[0])
            .collect();
        let res = ks_1d(&sample, standard_normal_cdf).unwrap();
        assert!(res.p_value < 1e-6);
    }

    #[test]
    fn ks_zero_statistic_on_matching_step_function() {
        // sample = exact quantile midpoints of its own empirical CDF
        let n = 64;
        let sample: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let res = ks_1d(&sample, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(res.statistic <= 0.5 / n as f64 + 1e-12);
        let constant = vec![1.0; 32];
        assert!(matches!(
            ks_1d(&constant, standard_normal_cdf),
            Err(StatError::DegenerateSample)
        ));
    }

    #[test]
    fn chi_square_exact_cases() {
        let res = chi_square_uniform(&[200, 200, 200, 200, 200, 200]).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);

        let res = chi_square_uniform(&[240, 240, 240, 240, 240, 0]).unwrap();
        assert!(res.p_value < 1e-10);

        assert!(matches!(
            chi_square_uniform(&[1, 2, 1]),
            Err(StatError::LowExpectedCount { .. })
        ));
    }

    #[test]
    fn chi_square_null_p_values_are_uniformish() {
        // multinomial-uniform simulation, then KS on the p-values
        let cells = 6usize;
        let draws = 600usize;
        let mut p_values = Vec::new();
        for rep in 0..200u64 {
            let mut rng = derive_stream(rep, STREAM_AUX, 77);
            let mut counts = vec![0u64; cells];
            for _ in 0..draws {
                counts[rng.gen_range(0..cells)] += 1;
            }
            p_values.push(chi_square_uniform(&counts).unwrap().p_value);
        }
        let res = ks_1d(&p_values, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(res.p_value > 0.01, "p-value KS gave {}", res.p_value);
    }

    #[test]
    fn energy_statistic_zero_for_identical_samples() {
        let a = normal_sample(60, 2, 11, 0.0);
        let res = energy_distance_perm(&a, &a, 100, 1).unwrap();
        assert!(res.statistic.abs() < 1e-10);
        assert!(res.p_value > 0.5);
    }

    #[test]
    fn energy_null_and_power() {
        let mut low = 0;
        for rep in 0..20u64 {
            let a = normal_sample(80, 2, 100 + rep, 0.0);
            let b = normal_sample(80, 2, 200 + rep, 0.0);
            let res = energy_distance_perm(&a, &b, 300, rep).unwrap();
            if res.p_value <= 0.05 {
                low += 1;
            }
        }
        assert!(low <= 2, "null rejected {low} times out of 20");

        let a = normal_sample(500, 2, 7, 0.0);
        let b = normal_sample(500, 2, 8, 1.0);
        let res = energy_distance_perm(&a, &b, 300, 3).unwrap();
        assert!(res.p_value < 0.01);
    }

    #[test]
    fn energy_perm_is_seed_deterministic_and_order_invariant() {
        let a = normal_sample(60, 2, 21, 0.0);
        let b = normal_sample(60, 2, 22, 0.3);
        let r1 = energy_distance_perm(&a, &b, 200, 9).unwrap();
        let r2 = energy_distance_perm(&a, &b, 200, 9).unwrap();
        assert_eq!(r1.p_value, r2.p_value);
        assert_eq!(r1.statistic, r2.statistic);
        let mut a_shuffled = a.clone();
        a_shuffled.reverse();
        let r3 = energy_distance_perm(&a_shuffled, &b, 200, 9).unwrap();
        assert!((r3.statistic - r1.statistic).abs() < 1e-12);
    }

    #[test]
    fn mean_cov_cases() {
        let constant = vec![vec![2.0, -1.0]; 10];
        let mc = mean_cov(&constant).unwrap();
        assert!(mc.cov.iter().all(|c| c.abs() < 1e-15));

        let sample = normal_sample(5000, 2, 31, 0.0);
        let mc = mean_cov(&sample).unwrap();
        let mut diff = mc.cov.clone();
        diff[0] -= 1.0;
        diff[3] -= 1.0;
        assert!(sym_op_norm(&diff, 2) < 0.1);

        // affine transform audit: y = A x + b
        let a_mat = [1.5, 0.5, -0.25, 2.0];
        let b_vec = [1.0, -2.0];
        let transformed: Vec<Vec<f64>> = sample
            .iter()
            .map(|v| {
                vec![
                    a_mat[0] * v[0] + a_mat[1] * v[1] + b_vec[0],
                    a_mat[2] * v[0] + a_mat[3] * v[1] + b_vec[1],
                ]
            })
            .collect();
        let mt = mean_cov(&transformed).unwrap();
        let expect_mean = [
            a_mat[0] * mc.mean[0] + a_mat[1] * mc.mean[1] + b_vec[0],
            a_mat[2] * mc.mean[0] + a_mat[3] * mc.mean[1] + b_vec[1],
        ];
        assert!((mt.mean[0] - expect_mean[0]).abs() < 1e-12);
        assert!((mt.mean[1] - expect_mean[1]).abs() < 1e-12);
        // cov' = A cov A^T
        let c = &mc.cov;
        let mut expect_cov = [0.0; 4];
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        s += a_mat[i * 2 + k] * c[k * 2 + l] * a_mat[j * 2 + l];
                    }
                }
                expect_cov[i * 2 + j] = s;
            }
        }
        for i in 0..4 {
            assert!((mt.cov[i] - expect_cov[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn op_norm_matches_hand_computed_eigenvalues() {
        // symmetric 2x2 [[2, 1], [1, 2]]: eigenvalues 1 and 3
        assert!((sym_op_norm(&[2.0, 1.0, 1.0, 2.0], 2) - 3.0).abs() < 1e-10);
        // diagonal
        assert!((sym_op_norm(&[0.5, 0.0, 0.0, -4.0], 2) - 4.0).abs() < 1e-12);
        // 3x3 with known spectrum: diag(1,2,3) conjugated stays {1,2,3}
        let m = [
            2.0, -1.0, 0.0, //
            -1.0, 2.0, -1.0, //
            0.0, -1.0, 2.0,
        ];
        let expected = 2.0 + 2.0f64.sqrt();
        assert!((sym_op_norm(&m, 3) - expected).abs() < 1e-9);
    }

    #[test]
    fn kolmogorov_sf_brackets() {
        assert!((kolmogorov_sf(0.5) - 0.9639).abs() < 5e-4);
        assert!((kolmogorov_sf(1.0) - 0.27).abs() < 5e-3);
        assert!(kolmogorov_sf(3.0) < 1e-7);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }
}
