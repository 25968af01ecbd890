//! Metric-entropy bounds for ellipsoids in natural-log units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::integral_on_axes;
use crate::semiaxes::SemiAxisModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBounds {
    pub epsilon: f64,
    pub lower: f64,
    pub upper: f64,
    /// `I_1(ε)`.
    pub estimate: f64,
    /// Scale of the error term, `min{M, sqrt(M ln M ln(1/ε))}`, without its
    /// unknown absolute constant.
    pub error_magnitude: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("epsilon must be positive and finite, got {eps}")))
    }
}

/// `I_1(ε) = Σ ln_+(μ_n/ε)`, a lower bound on the entropy at every `ε`.
pub fn entropy_lower_bound(model: &SemiAxisModel, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(integral_on_axes(&model.truncate_at(eps)?, 1.0, eps))
}

/// `(I_1(ε), I_1(ε/2) + 2 ln 2 · M(ε/2))`.
pub fn mityagin_bounds(model: &SemiAxisModel, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let half = 0.5 * eps;
    let axes = model.truncate_at(half)?;
    let lower = integral_on_axes(&axes, 1.0, eps);
    let upper = integral_on_axes(&axes, 1.0, half) + 2.0 * std::f64::consts::LN_2 * axes.len() as f64;
    Ok((lower, upper))
}

/// `min{M, sqrt(M ln M ln(1/ε))}`; the logarithms are clamped at zero so the
/// value vanishes for at most one active axis.
pub fn error_magnitude(count: usize, eps: f64) -> f64 {
    let m = count as f64;
    if count <= 1 {
        return 0.0;
    }
    let log_inv = (1.0 / eps).ln().max(0.0);
    m.min((m * m.ln() * log_inv).sqrt())
}

pub fn entropy_estimate(model: &SemiAxisModel, eps: f64) -> Result<EntropyBounds> {
    check_eps(eps)?;
    let (lower, upper) = mityagin_bounds(model, eps)?;
    let count = model.counting_function(eps)?;
    Ok(EntropyBounds { epsilon: eps, lower, upper, estimate: lower, error_magnitude: error_magnitude(count, eps) })
}

/// Exact entropy of a segment of half-length `mu_star`: `ln ⌈μ_*/ε⌉`.
pub fn exact_entropy_single_axis(mu_star: f64, eps: f64) -> f64 {
    (mu_star / eps).ceil().max(1.0).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lower_bound_examples() {
        let one = SemiAxisModel::explicit(vec![1.0]).unwrap();
        assert_relative_eq!(entropy_lower_bound(&one, 0.5).unwrap(), 2f64.ln());
        let fd = SemiAxisModel::finite_dim(3, 1.0).unwrap();
        assert_relative_eq!(entropy_lower_bound(&fd, 0.1).unwrap(), 3.0 * 10f64.ln(), max_relative = 1e-15);
        let two = SemiAxisModel::explicit(vec![1.0, 0.5]).unwrap();
        assert_relative_eq!(entropy_lower_bound(&two, 0.6).unwrap(), (1.0f64 / 0.6).ln(), max_relative = 1e-15);
    }

    #[test]
    fn mityagin_examples() {
        let one = SemiAxisModel::explicit(vec![1.0]).unwrap();
        let (lo, hi) = mityagin_bounds(&one, 0.4).unwrap();
        assert_relative_eq!(lo, 2.5f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(hi, 5f64.ln() + 2.0 * 2f64.ln(), max_relative = 1e-15);
        assert_eq!(mityagin_bounds(&one, 2.5).unwrap(), (0.0, 0.0));
        let fd = SemiAxisModel::finite_dim(2, 1.0).unwrap();
        let (lo, hi) = mityagin_bounds(&fd, 0.2).unwrap();
        assert_relative_eq!(lo, 2.0 * 5f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(hi, 2.0 * 10f64.ln() + 4.0 * 2f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn estimate_examples() {
        let one = SemiAxisModel::explicit(vec![1.0]).unwrap();
        let b = entropy_estimate(&one, 0.5).unwrap();
        assert_relative_eq!(b.estimate, 2f64.ln());
        assert_eq!(b.error_magnitude, 0.0);

        let d = 4;
        let fd = SemiAxisModel::finite_dim(d, 1.0).unwrap();
        let b = entropy_estimate(&fd, 1e-9).unwrap();
        assert_relative_eq!(b.estimate, d as f64 * 1e9f64.ln(), max_relative = 1e-14);
        assert!(b.error_magnitude <= d as f64);

        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let b = entropy_estimate(&p, 0.01).unwrap();
        // ln(100^100 / 100!)
        let oracle: f64 = (1..=100).map(|n| (100.0 / n as f64).ln()).sum();
        assert_relative_eq!(b.estimate, oracle, max_relative = 1e-13);
        assert!((b.estimate - 100.0).abs() <= b.error_magnitude);
    }

    #[test]
    fn single_axis_examples() {
        assert_relative_eq!(exact_entropy_single_axis(1.0, 0.4), 3f64.ln());
        assert_eq!(exact_entropy_single_axis(1.0, 1.0), 0.0);
        assert_relative_eq!(exact_entropy_single_axis(2.0, 0.5), 4f64.ln());
        assert_eq!(exact_entropy_single_axis(1.0, 3.0), 0.0);
    }

    #[test]
    fn error_magnitude_guards() {
        assert_eq!(error_magnitude(0, 0.1), 0.0);
        assert_eq!(error_magnitude(1, 0.1), 0.0);
        assert_eq!(error_magnitude(5, 2.0), 0.0);
        assert_relative_eq!(error_magnitude(10, 0.1), (10.0 * 10f64.ln() * 10f64.ln()).sqrt().min(10.0));
    }

    #[test]
    fn single_axis_inside_sandwich() {
        let one = SemiAxisModel::explicit(vec![1.0]).unwrap();
        for i in 1..100 {
            let eps = i as f64 / 100.0;
            let (lo, hi) = mityagin_bounds(&one, eps).unwrap();
            let h = exact_entropy_single_axis(1.0, eps);
            assert!(lo <= h && h <= hi, "{eps}: {lo} {h} {hi}");
        }
    }
}
