//! Sobolev ellipsoids on boxes: Dirichlet spectrum by lattice enumeration,
//! Weyl laws, Riesz means, the `χ_r` constants and the entropy/risk
//! predictions for Sobolev balls.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::Order;
use crate::error::{Error, Result};
use crate::semiaxes::SemiAxisModel;

/// Default cap on the number of enumerated eigenvalues.
pub const DEFAULT_EIGEN_CAP: usize = 10_000_000;

/// The box `Π (0, L_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lengths: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidModel("box needs at least one side length".into()));
        }
        if let Some(bad) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidModel(format!("box side lengths must be positive and finite, got {bad}")));
        }
        Ok(BoxDomain { lengths })
    }

    /// Unit cube `(0, 1)^d`.
    pub fn unit(d: usize) -> Result<Self> {
        Self::new(vec![1.0; d])
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Surface measure of the boundary: `2 Σ_i vol/L_i`. For `d = 1` this is
    /// the number of boundary points, 2.
    pub fn boundary_measure(&self) -> f64 {
        let vol = self.volume();
        2.0 * self.lengths.iter().map(|l| vol / l).sum::<f64>()
    }

    /// `λ_1 = Σ (π/L_i)²`.
    pub fn first_eigenvalue(&self) -> f64 {
        self.weights().iter().sum()
    }

    fn weights(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| (PI / l).powi(2)).collect()
    }
}

/// `μ = (1 + λ^k)^{-1/2}`.
pub fn axis_from_eigenvalue(lambda: f64, k: u32) -> f64 {
    1.0 / (1.0 + lambda.powi(k as i32)).sqrt()
}

/// Eigenvalue cutoff `(ε^{-2} − 1)^{1/k}` below which the axis is at least `ε`.
pub fn eigenvalue_cutoff(eps: f64, k: u32) -> f64 {
    (eps.powi(-2) - 1.0).max(0.0).powf(1.0 / k as f64)
}

/// All Dirichlet eigenvalues `≤ s_max`, ascending with multiplicity, with the
/// default cap.
pub fn dirichlet_eigenvalues(domain: &BoxDomain, s_max: f64) -> Result<Vec<f64>> {
    dirichlet_eigenvalues_capped(domain, s_max, DEFAULT_EIGEN_CAP)
}

pub fn dirichlet_eigenvalues_capped(domain: &BoxDomain, s_max: f64, cap: usize) -> Result<Vec<f64>> {
    if s_max.is_nan() {
        return Err(Error::DomainError("spectral cutoff is NaN".into()));
    }
    let w = domain.weights();
    let mut rest = vec![0.0; w.len() + 1];
    for i in (0..w.len()).rev() {
        rest[i] = rest[i + 1] + w[i];
    }
    if s_max < rest[0] {
        return Ok(Vec::new());
    }
    let total = AtomicUsize::new(0);
    let mut eig = if w.len() == 1 {
        let mut out = Vec::new();
        if !enumerate(&w, &rest, 0, 0.0, s_max, &mut out, &total, cap) {
            return Err(Error::BudgetExceeded { cap });
        }
        out
    } else {
        let n1_max = ((s_max - rest[1]) / w[0]).sqrt().floor() as usize + 1;
        let stripes: Vec<Option<Vec<f64>>> = (1..=n1_max)
            .into_par_iter()
            .map(|n1| {
                let acc = w[0] * (n1 * n1) as f64;
                let mut out = Vec::new();
                if acc + rest[1] > s_max {
                    return Some(out);
                }
                enumerate(&w, &rest, 1, acc, s_max, &mut out, &total, cap).then_some(out)
            })
            .collect();
        let mut eig = Vec::new();
        for s in stripes {
            eig.extend(s.ok_or(Error::BudgetExceeded { cap })?);
        }
        eig
    };
    if eig.len() > cap {
        return Err(Error::BudgetExceeded { cap });
    }
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Appends `acc + Σ_{j ≥ dim} w_j n_j²` for all lattice points with value
/// `≤ s`. Returns false once the shared total exceeds `cap`.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    w: &[f64],
    rest: &[f64],
    dim: usize,
    acc: f64,
    s: f64,
    out: &mut Vec<f64>,
    total: &AtomicUsize,
    cap: usize,
) -> bool {
    if dim + 1 == w.len() {
        let room = s - acc;
        if room < w[dim] {
            return true;
        }
        let mut n = (room / w[dim]).sqrt().floor() as usize;
        while acc + w[dim] * ((n + 1) * (n + 1)) as f64 <= s {
            n += 1;
        }
        while n > 0 && acc + w[dim] * (n * n) as f64 > s {
            n -= 1;
        }
        if total.fetch_add(n, Ordering::Relaxed) + n > cap {
            return false;
        }
        out.extend((1..=n).map(|j| acc + w[dim] * (j * j) as f64));
        return true;
    }
    let mut n = 1usize;
    loop {
        let a = acc + w[dim] * (n * n) as f64;
        if a + rest[dim + 1] > s {
            return true;
        }
        if !enumerate(w, rest, dim + 1, a, s, out, total, cap) {
            return false;
        }
        n += 1;
    }
}

/// Number of Dirichlet eigenvalues `≤ s`.
pub fn eigenvalue_count(domain: &BoxDomain, s: f64, cap: usize) -> Result<usize> {
    dirichlet_eigenvalues_capped(domain, s, cap).map(|e| e.len())
}

/// At least the `n` smallest eigenvalues, ascending.
pub(crate) fn smallest_eigenvalues(domain: &BoxDomain, n: usize) -> Vec<f64> {
    let d = domain.dim() as f64;
    let lead = d * chi_r(domain.volume(), domain.dim());
    let lambda1 = domain.first_eigenvalue();
    let mut s = lambda1 + 1.2 * (n as f64 / lead).powf(2.0 / d);
    loop {
        let eig = dirichlet_eigenvalues_capped(domain, s, usize::MAX).expect("uncapped enumeration");
        if eig.len() >= n {
            return eig;
        }
        s *= 2.0;
    }
}

/// Semi-axes `≥ eps`, non-increasing.
pub(crate) fn axes_at_least(domain: &BoxDomain, k: u32, eps: f64, cap: usize) -> Result<Vec<f64>> {
    if eps >= 1.0 {
        return Ok(Vec::new());
    }
    // slight widening so that rounding in the cutoff cannot drop a boundary eigenvalue
    let s = eigenvalue_cutoff(eps, k) * (1.0 + 1e-9);
    let eig = dirichlet_eigenvalues_capped(domain, s, cap)?;
    let axes: Vec<f64> = eig.into_iter().map(|l| axis_from_eigenvalue(l, k)).filter(|m| *m >= eps).collect();
    if axes.len() > cap {
        return Err(Error::BudgetExceeded { cap });
    }
    Ok(axes)
}

/// Explicit model holding every Sobolev semi-axis `≥ eps_min`.
pub fn sobolev_semi_axes(domain: &BoxDomain, k: u32, eps_min: f64) -> Result<SemiAxisModel> {
    sobolev_semi_axes_capped(domain, k, eps_min, DEFAULT_EIGEN_CAP)
}

pub fn sobolev_semi_axes_capped(domain: &BoxDomain, k: u32, eps_min: f64, cap: usize) -> Result<SemiAxisModel> {
    if !(eps_min > 0.0 && eps_min < 1.0) {
        return Err(Error::DomainError(format!("eps_min must lie in (0, 1), got {eps_min}")));
    }
    if k == 0 {
        return Err(Error::InvalidModel("sobolev order k must be >= 1".into()));
    }
    let axes = axes_at_least(domain, k, eps_min, cap)?;
    if axes.is_empty() {
        return Err(Error::DomainError(format!("no semi-axis reaches {eps_min}")));
    }
    SemiAxisModel::explicit(axes)
}

/// Volume of the unit ball in `R^r`: `ω_0 = 1`, `ω_1 = 2`, `ω_r = 2π ω_{r−2} / r`.
pub fn unit_ball_volume(r: usize) -> f64 {
    let mut w = if r.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut j = if r.is_multiple_of(2) { 2 } else { 3 };
    while j <= r {
        w *= 2.0 * PI / j as f64;
        j += 2;
    }
    w
}

/// `χ_r(S) = ω_r H^r(S) / (r (2π)^r)`.
///
/// # Panics
/// Panics if `r == 0`.
pub fn chi_r(measure: f64, r: usize) -> f64 {
    assert!(r >= 1, "chi_r needs r >= 1");
    unit_ball_volume(r) * measure / (r as f64 * (2.0 * PI).powi(r as i32))
}

fn chi_d(domain: &BoxDomain) -> f64 {
    chi_r(domain.volume(), domain.dim())
}

/// `χ_{d−1}(∂Ω)`; `None` for `d = 1`, where every second-order coefficient
/// carries a vanishing factor `d − 1`.
fn chi_dm1(domain: &BoxDomain) -> Option<f64> {
    let d = domain.dim();
    (d >= 2).then(|| chi_r(domain.boundary_measure(), d - 1))
}

/// Weyl law for the eigenvalue count at `s`.
pub fn weyl_counting(domain: &BoxDomain, s: f64, order: Order) -> f64 {
    let d = domain.dim() as f64;
    let lead = d * chi_d(domain) * s.powf(d / 2.0);
    match (order, chi_dm1(domain)) {
        (Order::TwoTerm, Some(chi)) => lead - (d - 1.0) / 4.0 * chi * s.powf((d - 1.0) / 2.0),
        _ => lead,
    }
}

/// `Σ (1 − h²λ_n)_+` over the exact spectrum.
pub fn riesz_mean(domain: &BoxDomain, h: f64) -> Result<f64> {
    riesz_mean_capped(domain, h, DEFAULT_EIGEN_CAP)
}

pub fn riesz_mean_capped(domain: &BoxDomain, h: f64, cap: usize) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::DomainError(format!("h must be positive, got {h}")));
    }
    let h2 = h * h;
    let eig = dirichlet_eigenvalues_capped(domain, 1.0 / h2, cap)?;
    Ok(crate::numeric::compensated_sum(eig.iter().map(|l| (1.0 - h2 * l).max(0.0))))
}

/// Asymptotic expansion of the Riesz mean.
pub fn riesz_mean_prediction(domain: &BoxDomain, h: f64, order: Order) -> f64 {
    let d = domain.dim() as f64;
    let lead = 2.0 * d * chi_d(domain) / (d + 2.0) * h.powf(-d);
    match (order, chi_dm1(domain)) {
        (Order::TwoTerm, Some(chi)) => lead - (d - 1.0) * chi / (2.0 * (d + 1.0)) * h.powf(-(d - 1.0)),
        _ => lead,
    }
}

/// An entropy prediction together with whether the requested order is
/// covered by a proven expansion (two-term needs `d ≥ 3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEntropyPrediction {
    pub value: f64,
    pub proven: bool,
}

pub fn sobolev_entropy_prediction(
    domain: &BoxDomain,
    k: u32,
    eps: f64,
    order: Order,
) -> Result<SobolevEntropyPrediction> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError(format!("eps must lie in (0, 1), got {eps}")));
    }
    let d = domain.dim() as f64;
    let kf = k as f64;
    let lead = kf * chi_d(domain) * eps.powf(-d / kf);
    Ok(match (order, chi_dm1(domain)) {
        (Order::TwoTerm, Some(chi)) => SobolevEntropyPrediction {
            value: lead - kf / 4.0 * chi * eps.powf(-(d - 1.0) / kf),
            proven: domain.dim() >= 3,
        },
        (Order::TwoTerm, None) => SobolevEntropyPrediction { value: lead, proven: false },
        (Order::Leading, _) => SobolevEntropyPrediction { value: lead, proven: true },
    })
}

/// Constants of the Sobolev risk expansion `K1 (κσ²)^{2k/(d+2k)} + K2 (κσ²)^{(2k+1)/(d+2k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub kappa: f64,
    pub k1: f64,
    pub k2: f64,
    pub chi_d: f64,
    pub chi_dm1: Option<f64>,
    /// Sobolev Pinsker constant, only for the unit interval.
    pub pinsker: Option<f64>,
}

pub fn spectral_constants(domain: &BoxDomain, k: u32) -> SpectralConstants {
    let d = domain.dim() as f64;
    let kf = k as f64;
    let chi = chi_d(domain);
    let chi_b = chi_dm1(domain);
    let kappa = kf * d * d * chi / ((d + kf) * (d + 2.0 * kf));
    let k1 = (d + 2.0 * kf) / d;
    let k2 = match chi_b {
        Some(cb) => {
            -kf * (d - 1.0) * (d + kf) * (d + 2.0 * kf) * cb
                / (2.0 * d * d * (d + kf - 1.0) * (d + 2.0 * kf - 1.0) * chi)
        }
        None => 0.0,
    };
    let pinsker = (domain.dim() == 1 && domain.lengths[0] == 1.0).then(|| pinsker_constant(k));
    SpectralConstants { kappa, k1, k2, chi_d: chi, chi_dm1: chi_b, pinsker }
}

/// Risk prediction for the Sobolev ball and the constants used.
pub fn sobolev_risk_prediction(
    domain: &BoxDomain,
    k: u32,
    sigma: f64,
    order: Order,
) -> Result<(f64, SpectralConstants)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::DomainError(format!("sigma must be positive, got {sigma}")));
    }
    let c = spectral_constants(domain, k);
    let d = domain.dim() as f64;
    let kf = k as f64;
    let x = c.kappa * sigma * sigma;
    let mut value = c.k1 * x.powf(2.0 * kf / (d + 2.0 * kf));
    if order == Order::TwoTerm {
        value += c.k2 * x.powf((2.0 * kf + 1.0) / (d + 2.0 * kf));
    }
    Ok((value, c))
}

/// `P_k = (2k+1)^{1/(2k+1)} (k/(π(k+1)))^{2k/(2k+1)}`.
pub fn pinsker_constant(k: u32) -> f64 {
    let k = k as f64;
    (2.0 * k + 1.0).powf(1.0 / (2.0 * k + 1.0)) * (k / (PI * (k + 1.0))).powf(2.0 * k / (2.0 * k + 1.0))
}
