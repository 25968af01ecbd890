//! Monte Carlo check of the linear risk in the Gaussian sequence model
//! `y_n = x_n + σ ξ_n`.
//!
//! Trials are split into fixed-size chunks. Chunk `k` draws from a ChaCha8
//! generator seeded with the configured seed and switched to stream `k`, and
//! standard normals come from the ziggurat sampler of `rand_distr`. Chunk
//! statistics are merged in a fixed pairwise tree, so the result does not
//! depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::risk::{linear_minimax_risk, weights_for};
use crate::semiaxes::SemiAxisModel;

/// Trials per random stream.
pub const CHUNK_TRIALS: u64 = 8192;

/// Extra coordinates simulated beyond the support of the weights by default.
pub const GUARD_COORDINATES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub sigma: f64,
    pub trials: u64,
    pub seed: u64,
    /// Number of leading coordinates simulated.
    pub n_trunc: usize,
}

impl SimConfig {
    /// Config whose truncation is the support of the Pinsker weights plus
    /// [`GUARD_COORDINATES`].
    pub fn with_default_truncation(model: &SemiAxisModel, sigma: f64, trials: u64, seed: u64) -> Result<Self> {
        let sol = linear_minimax_risk(model, sigma)?;
        Ok(SimConfig { sigma, trials, seed, n_trunc: sol.support + GUARD_COORDINATES })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.n_trunc == 0 {
            return Err(Error::InvalidConfig("n_trunc must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
    pub trials: u64,
    /// Closed-form MSE at the same truth, including `tail_bias`.
    pub analytic: f64,
    /// `Σ x_n²` over coordinates beyond the truncation; added, not simulated.
    pub tail_bias: f64,
}

/// The ellipsoid point `μ_* e_{n*}`, as `(index, value)` pairs with 1-based
/// indices. It saturates the bias of every diagonal filter that is
/// non-increasing along the axes.
pub fn worst_case_vector(model: &SemiAxisModel, sigma: f64) -> Result<Vec<(usize, f64)>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::DomainError(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(vec![(1, model.max_semi_axis())])
}

/// Dense copy of a sparse vector, `len` coordinates long.
pub fn densify(entries: &[(usize, f64)], len: usize) -> Vec<f64> {
    let mut x = vec![0.0; len];
    for &(i, v) in entries {
        if i >= 1 && i <= len {
            x[i - 1] = v;
        }
    }
    x
}

/// `σ² Σ c_n² + Σ (1 − c_n)² x_n²`.
pub fn analytic_mse(weights: &[f64], sigma: f64, x: &[f64]) -> Result<f64> {
    if weights.len() != x.len() {
        return Err(Error::DimensionMismatch { left: weights.len(), right: x.len() });
    }
    let mut var = KahanSum::new();
    let mut bias = KahanSum::new();
    for (c, xn) in weights.iter().zip(x) {
        var.add(c * c);
        bias.add((1.0 - c).powi(2) * xn * xn);
    }
    Ok(sigma * sigma * var.value() + bias.value())
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        Moments { n, mean: a.mean + delta * b.n / n, m2: a.m2 + b.m2 + delta * delta * a.n * b.n / n }
    }
}

fn merge_tree(parts: &[Moments]) -> Moments {
    match parts.len() {
        0 => Moments { n: 0.0, mean: 0.0, m2: 0.0 },
        1 => parts[0],
        n => Moments::merge(merge_tree(&parts[..n / 2]), merge_tree(&parts[n / 2..])),
    }
}

/// Simulated MSE of the Pinsker filter at truth `x` (coordinates past
/// `x.len()` are zero). Deterministic given the config.
pub fn empirical_mse(model: &SemiAxisModel, x: &[f64], config: &SimConfig) -> Result<MseEstimate> {
    config.validate()?;
    let sol = linear_minimax_risk(model, config.sigma)?;
    if config.n_trunc < sol.support {
        return Err(Error::InvalidConfig(format!(
            "n_trunc = {} is below the support {} of the weights",
            config.n_trunc, sol.support
        )));
    }
    let n = config.n_trunc;
    let weights = weights_for(model, sol.critical_radius, n);
    let mut truth = x.to_vec();
    truth.resize(n.max(x.len()), 0.0);
    let tail_bias = truth[n..].iter().fold(0.0, |acc, v| acc + v * v);
    truth.truncate(n);
    let analytic = analytic_mse(&weights, config.sigma, &truth)? + tail_bias;

    // error in coordinate n is (c_n − 1) x_n + c_n σ ξ_n
    let offsets: Vec<f64> = weights.iter().zip(&truth).map(|(c, xn)| (c - 1.0) * xn).collect();
    let scales: Vec<f64> = weights.iter().map(|c| c * config.sigma).collect();
    let chunks = config.trials.div_ceil(CHUNK_TRIALS);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k);
            let count = CHUNK_TRIALS.min(config.trials - k * CHUNK_TRIALS);
            let mut m = Moments { n: 0.0, mean: 0.0, m2: 0.0 };
            for _ in 0..count {
                let mut loss = 0.0;
                for (o, s) in offsets.iter().zip(&scales) {
                    let xi: f64 = StandardNormal.sample(&mut rng);
                    let e = o + s * xi;
                    loss += e * e;
                }
                m.n += 1.0;
                let delta = loss - m.mean;
                m.mean += delta / m.n;
                m.m2 += delta * (loss - m.mean);
            }
            m
        })
        .collect();
    let total = merge_tree(&parts);
    let std_error = if total.n > 1.0 { (total.m2 / (total.n - 1.0)).sqrt() / total.n.sqrt() } else { 0.0 };
    Ok(MseEstimate { mean: total.mean + tail_bias, std_error, trials: config.trials, analytic, tail_bias })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn worst_case_examples() {
        let m = SemiAxisModel::explicit(vec![1.0, 0.5]).unwrap();
        assert_eq!(worst_case_vector(&m, 0.3).unwrap(), vec![(1, 1.0)]);
        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let sol = linear_minimax_risk(&p, 0.05).unwrap();
        let x = worst_case_vector(&p, 0.05).unwrap();
        // inside the ellipsoid, on its boundary
        let norm: f64 = x.iter().map(|(i, v)| (v / p.semi_axis(*i)).powi(2)).sum();
        assert_relative_eq!(norm, 1.0);
        // bias equals ε_σ²
        let bias: f64 = x.iter().map(|(i, v)| (1.0 - sol.weight(p.semi_axis(*i))).powi(2) * v * v).sum();
        assert_relative_eq!(bias, sol.critical_radius.powi(2), max_relative = 1e-12);
    }

    #[test]
    fn analytic_examples() {
        let x = [0.3, -0.2, 0.5];
        assert_relative_eq!(analytic_mse(&[0.0; 3], 1.7, &x).unwrap(), 0.09 + 0.04 + 0.25, max_relative = 1e-15);
        assert_relative_eq!(analytic_mse(&[1.0; 3], 0.5, &x).unwrap(), 0.75, max_relative = 1e-15);
        assert_eq!(analytic_mse(&[1.0; 2], 0.5, &x), Err(Error::DimensionMismatch { left: 2, right: 3 }));

        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let sigma = 0.02;
        let sol = linear_minimax_risk(&p, sigma).unwrap();
        let n = sol.support + 8;
        let w = weights_for(&p, sol.critical_radius, n);
        let x = densify(&worst_case_vector(&p, sigma).unwrap(), n);
        assert_relative_eq!(analytic_mse(&w, sigma, &x).unwrap(), sol.linear_risk, max_relative = 1e-10);
        // extra coordinates past the support change nothing for this truth
        let w2 = weights_for(&p, sol.critical_radius, n + 50);
        let x2 = densify(&worst_case_vector(&p, sigma).unwrap(), n + 50);
        assert_eq!(analytic_mse(&w2, sigma, &x2).unwrap(), analytic_mse(&w, sigma, &x).unwrap());
    }

    #[test]
    fn single_axis_simulation_matches_risk() {
        let m = SemiAxisModel::explicit(vec![1.0]).unwrap();
        let cfg = SimConfig { sigma: 1.0, trials: 200_000, seed: 7, n_trunc: 1 };
        let x = densify(&worst_case_vector(&m, 1.0).unwrap(), 1);
        let est = empirical_mse(&m, &x, &cfg).unwrap();
        assert_relative_eq!(est.analytic, 0.5, max_relative = 1e-12);
        assert!((est.mean - 0.5).abs() <= 4.0 * est.std_error, "{est:?}");
        let again = empirical_mse(&m, &x, &cfg).unwrap();
        assert_eq!(est.mean.to_bits(), again.mean.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let m = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let cfg = SimConfig::with_default_truncation(&m, 0.1, 50_000, 11).unwrap();
        let x = densify(&worst_case_vector(&m, 0.1).unwrap(), cfg.n_trunc);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| empirical_mse(&m, &x, &cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| empirical_mse(&m, &x, &cfg).unwrap());
        assert_eq!(one.mean.to_bits(), many.mean.to_bits());
        assert_eq!(one.std_error.to_bits(), many.std_error.to_bits());
    }

    #[test]
    fn small_noise_leaves_only_bias() {
        let m = SemiAxisModel::explicit(vec![1.0, 0.5]).unwrap();
        let cfg = SimConfig { sigma: 1e-9, trials: 1000, seed: 1, n_trunc: 2 };
        let x = [0.6, 0.2];
        let est = empirical_mse(&m, &x, &cfg).unwrap();
        assert!(est.std_error < 1e-15);
        assert!((est.mean - est.analytic).abs() < 1e-15);
    }

    #[test]
    fn std_error_scales_with_trials() {
        let m = SemiAxisModel::explicit(vec![1.0]).unwrap();
        let x = [1.0];
        let base = SimConfig { sigma: 1.0, trials: 40_000, seed: 3, n_trunc: 1 };
        let a = empirical_mse(&m, &x, &base).unwrap();
        let b = empirical_mse(&m, &x, &SimConfig { trials: 160_000, ..base }).unwrap();
        let ratio = b.std_error / a.std_error;
        assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn tail_bias_is_added() {
        let m = SemiAxisModel::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        let cfg = SimConfig { sigma: 1.0, trials: 100, seed: 5, n_trunc: 2 };
        let sol = linear_minimax_risk(&m, 1.0).unwrap();
        assert!(sol.support <= 2);
        let est = empirical_mse(&m, &[0.0, 0.0, 0.2], &cfg).unwrap();
        assert_relative_eq!(est.tail_bias, 0.04, max_relative = 1e-15);
    }

    #[test]
    fn config_validation() {
        let m = SemiAxisModel::explicit(vec![1.0, 1.0]).unwrap();
        let bad = SimConfig { sigma: 1.0, trials: 0, seed: 0, n_trunc: 2 };
        assert!(matches!(empirical_mse(&m, &[], &bad), Err(Error::InvalidConfig(_))));
        let short = SimConfig { sigma: 1.0, trials: 10, seed: 0, n_trunc: 1 };
        assert!(matches!(empirical_mse(&m, &[], &short), Err(Error::InvalidConfig(_))));
    }
}
