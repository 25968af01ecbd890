//! Type-τ integrals `I_τ(ε) = ∫_ε^∞ M(u) u^{−τ} du`.
//!
//! Because `M` is a step function, `I_τ` has an exact axis-by-axis sum:
//! `Σ ln_+(μ_n/ε)` for `τ = 1` and `Σ_{μ_n > ε} (ε^{1−τ} − μ_n^{1−τ})/(τ − 1)`
//! otherwise. Quadrature is kept as an independent cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, KahanSum, DEFAULT_SUBDIVISION_BUDGET};
use crate::semiaxes::SemiAxisModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactSum,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub tau: f64,
    pub epsilon: f64,
    pub method: Method,
    /// Zero for exact sums.
    pub abs_error_estimate: f64,
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau >= 1.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau))
    }
}

/// Contribution of one axis `μ > ε` to `I_τ(ε)`.
#[inline]
pub fn axis_term(mu: f64, tau: f64, eps: f64) -> f64 {
    if mu <= eps {
        return 0.0;
    }
    let log_ratio = (mu / eps).ln();
    if tau == 1.0 {
        log_ratio
    } else {
        // ε^{1−τ}(1 − (μ/ε)^{1−τ})/(τ − 1), written to avoid cancellation for μ ≈ ε
        let s = 1.0 - tau;
        eps.powf(s) * -(s * log_ratio).exp_m1() / (tau - 1.0)
    }
}

/// `I_τ(ε)` over an arbitrary list of axes; entries `≤ ε` contribute nothing.
pub fn integral_on_axes(axes: &[f64], tau: f64, eps: f64) -> f64 {
    let mut acc = KahanSum::new();
    for &mu in axes {
        acc.add(axis_term(mu, tau, eps));
    }
    acc.value()
}

/// Exact `I_τ(ε)` by the jump sum.
pub fn integral_exact(model: &SemiAxisModel, tau: f64, eps: f64) -> Result<IntegralResult> {
    check_tau(tau)?;
    let axes = model.truncate_at(eps)?;
    Ok(IntegralResult {
        value: integral_on_axes(&axes, tau, eps),
        tau,
        epsilon: eps,
        method: Method::ExactSum,
        abs_error_estimate: 0.0,
    })
}

/// Distinct axis values above `eps`, ascending, preceded by `eps`, and the
/// number of axes active on each panel between consecutive knots.
fn panels(axes_desc: &[f64], eps: f64) -> (Vec<f64>, Vec<usize>) {
    let mut knots = vec![eps];
    let mut counts = Vec::new();
    // walk from the smallest axis upward
    let mut i = axes_desc.len();
    while i > 0 {
        let v = axes_desc[i - 1];
        if v > eps {
            counts.push(i);
            knots.push(v);
        }
        while i > 0 && axes_desc[i - 1] == v {
            i -= 1;
        }
    }
    (knots, counts)
}

/// `I_τ(ε)` by adaptive Simpson quadrature of `M(u) u^{−τ}` over `[ε, μ_*]`,
/// with a forced panel boundary at every distinct axis value. Integration is
/// carried out in `t = ln u`.
pub fn integral_quadrature(model: &SemiAxisModel, tau: f64, eps: f64, tol: f64) -> Result<IntegralResult> {
    integral_quadrature_with_budget(model, tau, eps, tol, DEFAULT_SUBDIVISION_BUDGET)
}

pub fn integral_quadrature_with_budget(
    model: &SemiAxisModel,
    tau: f64,
    eps: f64,
    tol: f64,
    budget: usize,
) -> Result<IntegralResult> {
    check_tau(tau)?;
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance must be positive, got {tol}")));
    }
    let axes = model.truncate_at(eps)?;
    let (knots, counts) = panels(&axes, eps);
    let log_knots: Vec<f64> = knots.iter().map(|v| v.ln()).collect();
    let s = 1.0 - tau;
    let out = numeric::panel_quadrature(&log_knots, |j, t| counts[j] as f64 * (s * t).exp(), tol, budget)?;
    Ok(IntegralResult {
        value: out.value,
        tau,
        epsilon: eps,
        method: Method::Quadrature,
        abs_error_estimate: out.abs_error,
    })
}

/// Default absolute tolerance of the outer integral in [`transfer_residual`],
/// relative to `max(1, I_{τ1}(ε))`.
pub const TRANSFER_REL_TOL: f64 = 1e-11;

/// `I_{τ1}(ε) − [I_{τ2}(ε) ε^{τ2−τ1} + (τ2−τ1) ∫_ε^{μ_*} I_{τ2}(u) u^{τ2−τ1−1} du]`.
pub fn transfer_residual(model: &SemiAxisModel, tau1: f64, tau2: f64, eps: f64) -> Result<f64> {
    check_tau(tau1)?;
    check_tau(tau2)?;
    let axes = model.truncate_at(eps)?;
    let i1 = integral_on_axes(&axes, tau1, eps);
    transfer_residual_on_axes(&axes, tau1, tau2, eps, TRANSFER_REL_TOL * i1.max(1.0))
}

/// As [`transfer_residual`] for non-increasing `axes` holding every axis
/// above `eps`, with an explicit absolute tolerance for the outer integral.
pub fn transfer_residual_on_axes(axes: &[f64], tau1: f64, tau2: f64, eps: f64, tol: f64) -> Result<f64> {
    if tau1 == tau2 {
        return Ok(0.0);
    }
    let i1 = integral_on_axes(axes, tau1, eps);
    let i2 = integral_on_axes(axes, tau2, eps);
    let a = tau2 - tau1;
    let (knots, counts) = panels(axes, eps);
    // On the panel with `counts[j]` active axes, I_{τ2}(u) = (C u^{1−τ2} − S)/(τ2 − 1)
    // (or C ln(1/u) + Σ ln μ for τ2 = 1), with S the power sum over the active axes.
    let mut power_sums = Vec::with_capacity(counts.len());
    let mut acc = KahanSum::new();
    let mut taken = 0;
    for &c in counts.iter().rev() {
        for &mu in &axes[taken..c] {
            acc.add(if tau2 == 1.0 { mu.ln() } else { mu.powf(1.0 - tau2) });
        }
        taken = c;
        power_sums.push(acc.value());
    }
    power_sums.reverse();
    let log_knots: Vec<f64> = knots.iter().map(|v| v.ln()).collect();
    let outer = numeric::panel_quadrature(
        &log_knots,
        |j, t| {
            let c = counts[j] as f64;
            let inner = if tau2 == 1.0 {
                power_sums[j] - c * t
            } else {
                (c * ((1.0 - tau2) * t).exp() - power_sums[j]) / (tau2 - 1.0)
            };
            // du/u = dt absorbs one power of u
            inner.max(0.0) * (a * t).exp()
        },
        tol / a.abs(),
        DEFAULT_SUBDIVISION_BUDGET,
    )?;
    Ok(i1 - (i2 * eps.powf(a) + a * outer.value))
}
