//! Linear minimax risk in the Gaussian sequence model `y_n = x_n + σ ξ_n`
//! over an ellipsoid: critical radius, Pinsker weights, the variational
//! oracle and the bracket on the nonlinear minimax risk.

mod lambert;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

pub use lambert::{lambert_w, lambert_w_exp};

use crate::error::{Error, Result};
use crate::integrals::integral_on_axes;
use crate::numeric::{minimize_unimodal, KahanSum};
use crate::semiaxes::{lower_truncation, SemiAxisModel};

/// Default tolerance on `σ²Ψ(ε) − 1`.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BRACKET_DECADES: usize = 320;
const MAX_BISECTIONS: usize = 200;

/// Result of the linear minimax problem at one noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinskerSolution {
    pub sigma: f64,
    /// `ε_σ`.
    pub critical_radius: f64,
    /// `R_L`.
    pub linear_risk: f64,
    /// `σ²Ψ(ε_σ) − 1`.
    pub psi_residual: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub b_sigma: f64,
    /// True when `b_σ > 1`, where the lower end of the bracket is trivially 0.
    pub vacuous: bool,
    pub solver_iterations: usize,
    /// Number of strictly positive weights.
    pub support: usize,
}

impl PinskerSolution {
    /// Pinsker weight `(1 − ε_σ/μ)_+` of an axis of length `mu`.
    pub fn weight(&self, mu: f64) -> f64 {
        pinsker_weight(mu, self.critical_radius)
    }
}

#[inline]
fn pinsker_weight(mu: f64, eps: f64) -> f64 {
    if mu > eps {
        1.0 - eps / mu
    } else {
        0.0
    }
}

/// `Ψ(ε) = 2 I_3(ε) − I_2(ε)/ε` over a list of axes. Each axis contributes
/// `2(ε^{−2} − μ^{−2})/2 − (ε^{−1} − μ^{−1})/ε = (1/(εμ))(1 − ε/μ)`, which is
/// summed directly to avoid cancelling two `O(ε^{−2})` terms.
pub fn psi_on_axes(axes: &[f64], eps: f64) -> f64 {
    let mut acc = KahanSum::new();
    for &mu in axes {
        if mu > eps {
            acc.add((1.0 - eps / mu) / (eps * mu));
        }
    }
    acc.value()
}

/// `Ψ(ε)` for `0 < ε < μ_*`.
pub fn psi(model: &SemiAxisModel, eps: f64) -> Result<f64> {
    let mu_star = model.max_semi_axis();
    if !(eps > 0.0 && eps < mu_star) {
        return Err(Error::DomainError(format!("psi needs 0 < eps < mu_* = {mu_star}, got {eps}")));
    }
    Ok(psi_on_axes(&model.truncate_at(eps)?, eps))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("sigma must be positive and finite, got {sigma}")))
    }
}

/// Critical radius together with the axes it was solved on.
struct Root {
    eps: f64,
    residual: f64,
    iterations: usize,
    /// Every axis above `eps`, non-increasing.
    axes: Vec<f64>,
}

fn solve_root(model: &SemiAxisModel, sigma: f64, tol: f64) -> Result<Root> {
    check_sigma(sigma)?;
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let s2 = sigma * sigma;
    let mu_star = model.max_semi_axis();
    // g is strictly decreasing, g(μ_*) = −1 and g → ∞ at 0
    let mut lo = mu_star;
    let previous;
    let mut axes;
    let mut decades = 0;
    loop {
        let (next, found) = lower_truncation(model, lo, 10.0)?;
        axes = found;
        decades += 1;
        let g = s2 * psi_on_axes(&axes, next) - 1.0;
        if g > 0.0 {
            previous = lo;
            lo = next;
            break;
        }
        if g == 0.0 {
            return Ok(Root { eps: next, residual: 0.0, iterations: 0, axes: trim(axes, next) });
        }
        lo = next;
        if decades >= MAX_BRACKET_DECADES || lo == 0.0 {
            return Err(Error::BracketFailure(format!("sigma^2 * Psi stays below 1 down to eps = {lo:e}")));
        }
    }
    let g = |e: f64| s2 * psi_on_axes(&axes, e) - 1.0;
    let mut hi = previous.min(mu_star);
    let (mut best, mut best_g) = (lo, g(lo));
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let mid = (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp();
        if !(mid > lo && mid < hi) {
            break;
        }
        iterations += 1;
        let gm = g(mid);
        if gm.abs() < best_g.abs() {
            best = mid;
            best_g = gm;
        }
        if gm.abs() <= tol {
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Root { eps: best, residual: best_g, iterations, axes: trim(axes, best) })
}

fn trim(mut axes: Vec<f64>, eps: f64) -> Vec<f64> {
    let n = axes.partition_point(|v| *v > eps);
    axes.truncate(n);
    axes
}

/// Critical radius `ε_σ`, the root of `σ²Ψ(ε) = 1`.
pub fn critical_radius(model: &SemiAxisModel, sigma: f64, tol: f64) -> Result<f64> {
    solve_root(model, sigma, tol).map(|r| r.eps)
}

/// Exact linear minimax risk with the default tolerance.
pub fn linear_minimax_risk(model: &SemiAxisModel, sigma: f64) -> Result<PinskerSolution> {
    linear_minimax_risk_with_tol(model, sigma, DEFAULT_TOL)
}

/// `R_L = σ² ε_σ I_2(ε_σ)` and the derived bracket.
pub fn linear_minimax_risk_with_tol(model: &SemiAxisModel, sigma: f64, tol: f64) -> Result<PinskerSolution> {
    let root = solve_root(model, sigma, tol)?;
    let eps = root.eps;
    let linear_risk = sigma * sigma * (eps * integral_on_axes(&root.axes, 2.0, eps));
    let mu_star = model.max_semi_axis();
    let b = b_sigma(mu_star, sigma, eps, linear_risk);
    Ok(PinskerSolution {
        sigma,
        critical_radius: eps,
        linear_risk,
        psi_residual: root.residual,
        bracket_low: linear_risk * (1.0 - b).max(0.0),
        bracket_high: linear_risk,
        b_sigma: b,
        vacuous: b > 1.0,
        solver_iterations: root.iterations,
        support: root.axes.len(),
    })
}

/// `Φ(ε) = σ² Σ (1 − ε/μ_n)_+² + ε²` over the axes above `ε`.
pub fn variational_objective(axes: &[f64], sigma: f64, eps: f64) -> f64 {
    let mut acc = KahanSum::new();
    for &mu in axes {
        let c = pinsker_weight(mu, eps);
        acc.add(c * c);
    }
    sigma * sigma * acc.value() + eps * eps
}

/// `inf_ε Φ(ε)`, computed independently of the critical-radius equation by a
/// log-grid scan and golden-section refinement.
pub fn linear_risk_variational(model: &SemiAxisModel, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let mu_star = model.max_semi_axis();
    // axes truncated at the smallest ε probed so far
    let cache: RefCell<(f64, Vec<f64>)> = RefCell::new((f64::INFINITY, Vec::new()));
    let phi = |eps: f64| -> Result<f64> {
        let mut c = cache.borrow_mut();
        if eps < c.0 {
            *c = (eps, model.truncate_at(eps)?);
        }
        Ok(variational_objective(&c.1, sigma, eps))
    };
    minimize_unimodal(phi, mu_star, mu_star * 1e-300).map(|(_, v)| v)
}

/// `c_n = (1 − ε_σ/μ_n)_+` for `n = 1..=n_max` (shorter for finite models).
pub fn pinsker_weights(model: &SemiAxisModel, sigma: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::DomainError("n_max must be >= 1".into()));
    }
    let eps = critical_radius(model, sigma, DEFAULT_TOL)?;
    Ok(weights_for(model, eps, n_max))
}

pub(crate) fn weights_for(model: &SemiAxisModel, eps: f64, n_max: usize) -> Vec<f64> {
    let mut w: Vec<f64> = model.leading_axes(n_max).into_iter().map(|mu| pinsker_weight(mu, eps)).collect();
    w.resize(n_max, 0.0);
    w
}

/// `b_σ = (4√2 σ/ε_σ) sqrt(W(((1+√3) μ_*² ε_σ/(√2 σ R_L))²))`.
pub fn b_sigma(mu_star: f64, sigma: f64, eps_sigma: f64, linear_risk: f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    let ln_arg =
        (1.0 + 3f64.sqrt()).ln() + 2.0 * mu_star.ln() + eps_sigma.ln() - sqrt2.ln() - sigma.ln() - linear_risk.ln();
    let w = lambert_w_exp(2.0 * ln_arg);
    4.0 * sqrt2 * sigma / eps_sigma * w.sqrt()
}

/// Bounds on the nonlinear minimax risk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBracket {
    pub low: f64,
    pub high: f64,
    pub b_sigma: f64,
    pub vacuous: bool,
}

/// `(R_L max(0, 1 − b_σ), R_L, b_σ)`.
pub fn nonlinear_risk_bracket(model: &SemiAxisModel, sigma: f64) -> Result<RiskBracket> {
    let s = linear_minimax_risk(model, sigma)?;
    Ok(RiskBracket { low: s.bracket_low, high: s.bracket_high, b_sigma: s.b_sigma, vacuous: s.vacuous })
}
