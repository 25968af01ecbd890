//! Closed-form asymptotic predictions for the standard decay families, and
//! sweeps that compare them against exact desk-scale computation.
//!
//! Families, with their counting-function behaviour:
//! - finite: `M(ε) → d`
//! - exponential: `M(ε) ∼ c ln(1/ε)`
//! - `n ln n`: `M(ε) ∼ c ln(1/ε)/ln ln(1/ε)`
//! - polynomial: `M(ε) ∼ c ε^{−α}`
//! - polynomial-log: `M(ε) ∼ c ε^{−α} ln(1/ε)^β`
//! - double exponential: `M(ε) ∼ c0 exp(c ε^{−α})`

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::integral_on_axes;
use crate::numeric::{self, minimize_unimodal, KahanSum, DEFAULT_SUBDIVISION_BUDGET};
use crate::risk::{critical_radius, linear_minimax_risk, DEFAULT_TOL};
use crate::semiaxes::{lower_truncation, ElasticityIndex, ModelKind, SemiAxisModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayFamily {
    FiniteDim {
        d: usize,
    },
    Exponential {
        c: f64,
    },
    ExpNLogN {
        c: f64,
    },
    Polynomial {
        c: f64,
        alpha: f64,
    },
    PolyLog {
        c: f64,
        alpha: f64,
        beta: f64,
    },
    DoubleExp {
        c0: f64,
        c: f64,
        alpha: f64,
    },
    /// Union of two polynomial families, `M(ε) ≈ c1 ε^{−α1} + c2 ε^{−α2}`.
    PolynomialPair {
        c1: f64,
        alpha1: f64,
        c2: f64,
        alpha2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Entropy,
    LinearRisk,
    CriticalRadius,
    NonlinearRisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    #[default]
    Leading,
    TwoTerm,
}

impl DecayFamily {
    /// Family of an analytic model; scaling is folded into `c` where the
    /// family is closed under it.
    pub fn from_model(model: &SemiAxisModel) -> Result<Self> {
        Ok(match model.kind() {
            ModelKind::FiniteDim { d, .. } => DecayFamily::FiniteDim { d: *d },
            ModelKind::Exponential { c } => DecayFamily::Exponential { c: *c },
            ModelKind::ExpNLogN { c } => DecayFamily::ExpNLogN { c: *c },
            ModelKind::Polynomial { c, alpha } => DecayFamily::Polynomial { c: *c, alpha: *alpha },
            ModelKind::PolyLog { c, alpha, beta } => DecayFamily::PolyLog { c: *c, alpha: *alpha, beta: *beta },
            ModelKind::DoubleExp { c0, c, alpha } => DecayFamily::DoubleExp { c0: *c0, c: *c, alpha: *alpha },
            ModelKind::Scaled { inner, lambda } => match DecayFamily::from_model(inner)? {
                DecayFamily::Polynomial { c, alpha } => DecayFamily::Polynomial { c: c * lambda.powf(alpha), alpha },
                DecayFamily::FiniteDim { d } => DecayFamily::FiniteDim { d },
                other => {
                    return Err(Error::UnsupportedFamily(format!("scaled {other:?} has no closed-form family")));
                }
            },
            other => return Err(Error::UnsupportedFamily(format!("{other:?} is not an analytic decay family"))),
        })
    }

    /// A model realizing the family. The pair family is materialized as an
    /// explicit list holding every axis `≥ floor`; all others ignore `floor`.
    pub fn to_model(&self, floor: f64) -> Result<SemiAxisModel> {
        match *self {
            DecayFamily::FiniteDim { d } => SemiAxisModel::finite_dim(d, 1.0),
            DecayFamily::Exponential { c } => SemiAxisModel::exponential(c),
            DecayFamily::ExpNLogN { c } => SemiAxisModel::exp_n_log_n(c),
            DecayFamily::Polynomial { c, alpha } => SemiAxisModel::polynomial(c, alpha),
            DecayFamily::PolyLog { c, alpha, beta } => SemiAxisModel::poly_log(c, alpha, beta),
            DecayFamily::DoubleExp { c0, c, alpha } => SemiAxisModel::double_exp(c0, c, alpha),
            DecayFamily::PolynomialPair { c1, alpha1, c2, alpha2 } => {
                merged_polynomial_model(c1, alpha1, c2, alpha2, floor)
            }
        }
    }

    /// Regularity index: 0 for the finite and exponential-type families, `α`
    /// for the polynomial ones, `∞` for double-exponential decay.
    pub fn elasticity_index(&self) -> ElasticityIndex {
        match *self {
            DecayFamily::FiniteDim { .. } | DecayFamily::Exponential { .. } | DecayFamily::ExpNLogN { .. } => {
                ElasticityIndex::Finite(0.0)
            }
            DecayFamily::Polynomial { alpha, .. } | DecayFamily::PolyLog { alpha, .. } => {
                ElasticityIndex::Finite(alpha)
            }
            DecayFamily::PolynomialPair { alpha1, .. } => ElasticityIndex::Finite(alpha1),
            DecayFamily::DoubleExp { .. } => ElasticityIndex::Infinite,
        }
    }
}

/// Explicit model holding every axis `≥ floor` of the two polynomial
/// families `(c1/n)^{1/α1}` and `(c2/n)^{1/α2}`.
pub fn merged_polynomial_model(c1: f64, alpha1: f64, c2: f64, alpha2: f64, floor: f64) -> Result<SemiAxisModel> {
    let mut axes = SemiAxisModel::polynomial(c1, alpha1)?.truncate_at(floor)?;
    if c2 > 0.0 {
        axes.extend(SemiAxisModel::polynomial(c2, alpha2)?.truncate_at(floor)?);
    }
    SemiAxisModel::explicit(axes)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::DomainError(msg()))
    }
}

fn positive_param(x: f64, name: &str) -> Result<()> {
    require(x > 0.0 && x.is_finite(), || format!("{name} must be positive and finite, got {x}"))
}

/// Leading term of the metric entropy at `ε`.
pub fn predict_entropy(family: &DecayFamily, eps: f64) -> Result<f64> {
    positive_param(eps, "epsilon")?;
    let l = (1.0 / eps).ln();
    Ok(match *family {
        DecayFamily::FiniteDim { d } => {
            require(eps < 1.0, || format!("finite-dimensional entropy needs eps < 1, got {eps}"))?;
            d as f64 * l
        }
        DecayFamily::Exponential { c } => {
            require(eps < 1.0, || format!("exponential-family entropy needs eps < 1, got {eps}"))?;
            0.5 * c * l * l
        }
        DecayFamily::ExpNLogN { c } => {
            require(eps < (-1.0f64).exp(), || format!("n ln n family needs eps < 1/e, got {eps}"))?;
            c * l * l / (2.0 * l.ln())
        }
        DecayFamily::Polynomial { c, alpha } => c * eps.powf(-alpha) / alpha,
        DecayFamily::PolyLog { c, alpha, beta } => {
            require(eps < 1.0, || format!("polynomial-log entropy needs eps < 1, got {eps}"))?;
            c / alpha * eps.powf(-alpha) * l.powf(beta)
        }
        DecayFamily::DoubleExp { c0, c, alpha } => c0 / (c * alpha) * eps.powf(alpha) * (c * eps.powf(-alpha)).exp(),
        DecayFamily::PolynomialPair { c1, alpha1, .. } => c1 * eps.powf(-alpha1) / alpha1,
    })
}

/// `Σ c_i ε^{−α_i}/α_i` for `α_1 > … > α_N > 0` with `α_1 < 2 α_N`.
pub fn predict_entropy_multi_term(coeffs: &[(f64, f64)], eps: f64) -> Result<f64> {
    positive_param(eps, "epsilon")?;
    if coeffs.is_empty() {
        return Err(Error::InvalidExponents("no terms given".into()));
    }
    if coeffs.iter().any(|(c, a)| !(*a > 0.0) || !(*c >= 0.0)) {
        return Err(Error::InvalidExponents("exponents must be positive and coefficients non-negative".into()));
    }
    if coeffs.windows(2).any(|w| w[0].1 <= w[1].1) {
        return Err(Error::InvalidExponents("exponents must be strictly decreasing".into()));
    }
    let (first, last) = (coeffs[0].1, coeffs[coeffs.len() - 1].1);
    if first >= 2.0 * last {
        return Err(Error::InvalidExponents(format!("need alpha_1 < 2 alpha_N, got {first} and {last}")));
    }
    Ok(coeffs.iter().map(|(c, a)| c * eps.powf(-a) / a).sum())
}

/// Leading term of the (linear and nonlinear) minimax risk at noise level `σ`.
pub fn predict_linear_risk(family: &DecayFamily, sigma: f64) -> Result<f64> {
    positive_param(sigma, "sigma")?;
    let s2 = sigma * sigma;
    let l = (1.0 / sigma).ln();
    Ok(match *family {
        DecayFamily::FiniteDim { d } => d as f64 * s2,
        DecayFamily::Exponential { c } => {
            require(sigma < 1.0, || format!("exponential-family risk needs sigma < 1, got {sigma}"))?;
            c * s2 * l
        }
        DecayFamily::ExpNLogN { c } => {
            require(sigma < (-1.0f64).exp(), || format!("n ln n family needs sigma < 1/e, got {sigma}"))?;
            c * s2 * l / l.ln()
        }
        DecayFamily::Polynomial { c, alpha } | DecayFamily::PolynomialPair { c1: c, alpha1: alpha, .. } => {
            polynomial_risk(c, alpha, s2)
        }
        DecayFamily::PolyLog { c, alpha, beta } => {
            require(sigma < 1.0, || format!("polynomial-log risk needs sigma < 1, got {sigma}"))?;
            let log_term = (2.0 / (alpha + 2.0) * l).powf(beta);
            (alpha + 2.0) / alpha
                * (c * alpha * s2 * log_term / ((alpha + 1.0) * (alpha + 2.0))).powf(2.0 / (alpha + 2.0))
        }
        DecayFamily::DoubleExp { c, alpha, .. } => {
            require(sigma < 1.0, || format!("double-exponential risk needs sigma < 1, got {sigma}"))?;
            (c / (2.0 * l)).powf(2.0 / alpha)
        }
    })
}

fn polynomial_risk(c: f64, alpha: f64, s2: f64) -> f64 {
    ((alpha + 2.0) / alpha).powf(alpha / (alpha + 2.0)) * (c * s2 / (alpha + 1.0)).powf(2.0 / (alpha + 2.0))
}

/// Leading term of the critical radius, polynomial family only:
/// `(c α σ²/((α+1)(α+2)))^{1/(α+2)}`.
pub fn predict_critical_radius(family: &DecayFamily, sigma: f64) -> Result<f64> {
    positive_param(sigma, "sigma")?;
    match *family {
        DecayFamily::Polynomial { c, alpha } => {
            Ok((c * alpha * sigma * sigma / ((alpha + 1.0) * (alpha + 2.0))).powf(1.0 / (alpha + 2.0)))
        }
        other => Err(Error::UnsupportedFamily(format!(
            "critical-radius asymptotics are only available for the polynomial family, not {other:?}"
        ))),
    }
}

/// Two-term risk expansion for `M(ε) = c1 ε^{−α1} + c2 ε^{−α2} + o(ε^{−α2})`,
/// `α1 > α2 > 0`:
/// `L(σ) + (2 c2 (α1+1)/(c1 (α2+1)(α2+2))) ((α1+2)/α1)^{α2/(α1+2)} (c1σ²/(α1+1))^{(α1−α2+2)/(α1+2)}`
/// with `L` the one-term polynomial prediction.
pub fn predict_risk_two_term(c1: f64, alpha1: f64, c2: f64, alpha2: f64, sigma: f64) -> Result<f64> {
    positive_param(sigma, "sigma")?;
    if !(alpha1 > alpha2 && alpha2 > 0.0) {
        return Err(Error::InvalidExponents(format!("need alpha1 > alpha2 > 0, got {alpha1} and {alpha2}")));
    }
    if !(c1 > 0.0 && c2 >= 0.0) {
        return Err(Error::InvalidExponents(format!("need c1 > 0 and c2 >= 0, got {c1} and {c2}")));
    }
    let s2 = sigma * sigma;
    let second = 2.0 * c2 * (alpha1 + 1.0) / (c1 * (alpha2 + 1.0) * (alpha2 + 2.0))
        * ((alpha1 + 2.0) / alpha1).powf(alpha2 / (alpha1 + 2.0))
        * (c1 * s2 / (alpha1 + 1.0)).powf((alpha1 - alpha2 + 2.0) / (alpha1 + 2.0));
    Ok(polynomial_risk(c1, alpha1, s2) + second)
}

/// A prediction of one quantity for one family at a given order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub quantity: Quantity,
    pub family: DecayFamily,
    pub order: Order,
}

impl Prediction {
    pub fn new(quantity: Quantity, family: DecayFamily, order: Order) -> Result<Self> {
        if order == Order::TwoTerm {
            let DecayFamily::PolynomialPair { alpha1, alpha2, .. } = family else {
                return Err(Error::UnsupportedFamily("two-term predictions need a polynomial pair".into()));
            };
            if !(alpha1 > alpha2 && alpha1 < 2.0 * alpha2) {
                return Err(Error::InvalidExponents(format!(
                    "two-term predictions need alpha2 < alpha1 < 2 alpha2, got {alpha1} and {alpha2}"
                )));
            }
            if quantity == Quantity::CriticalRadius {
                return Err(Error::UnsupportedFamily("no two-term critical-radius expansion".into()));
            }
        }
        Ok(Prediction { quantity, family, order })
    }

    /// The prediction at `ε` (entropy) or `σ` (risk quantities).
    pub fn evaluate(&self, param: f64) -> Result<f64> {
        match (self.quantity, self.order, self.family) {
            (Quantity::Entropy, Order::TwoTerm, DecayFamily::PolynomialPair { c1, alpha1, c2, alpha2 }) => {
                predict_entropy_multi_term(&[(c1, alpha1), (c2, alpha2)], param)
            }
            (Quantity::Entropy, _, f) => predict_entropy(&f, param),
            (
                Quantity::LinearRisk | Quantity::NonlinearRisk,
                Order::TwoTerm,
                DecayFamily::PolynomialPair { c1, alpha1, c2, alpha2 },
            ) => predict_risk_two_term(c1, alpha1, c2, alpha2, param),
            (Quantity::LinearRisk | Quantity::NonlinearRisk, _, f) => predict_linear_risk(&f, param),
            (Quantity::CriticalRadius, _, DecayFamily::PolynomialPair { c1, alpha1, .. }) => {
                predict_critical_radius(&DecayFamily::Polynomial { c: c1, alpha: alpha1 }, param)
            }
            (Quantity::CriticalRadius, _, f) => predict_critical_radius(&f, param),
        }
    }
}

/// `inf_ε {σ² V_b(ε) + ε²}` with the variance proxy chosen by the regularity
/// index `b`: `M(ε)` for `b = 0`, `2b/((b+1)(b+2)) I_1(ε)` for finite positive
/// `b`, and `∫_ε^∞ 2 I_1(u)/u du` for `b = ∞`. `I_1` stands in for the entropy.
pub fn predict_bias_variance(model: &SemiAxisModel, index: Option<ElasticityIndex>, sigma: f64) -> Result<f64> {
    positive_param(sigma, "sigma")?;
    let index = index.ok_or(Error::UnknownIndex)?;
    let s2 = sigma * sigma;
    let mu_star = model.max_semi_axis();
    match index {
        ElasticityIndex::Finite(0.0) => step_bias_variance(model, s2),
        ElasticityIndex::Finite(b) => {
            let weight = 2.0 * b / ((b + 1.0) * (b + 2.0));
            minimize_lazily(model, mu_star, |axes, eps| Ok(s2 * weight * integral_on_axes(axes, 1.0, eps) + eps * eps))
        }
        ElasticityIndex::Infinite => {
            minimize_lazily(model, mu_star, |axes, eps| Ok(s2 * log_entropy_integral(axes, eps)? + eps * eps))
        }
    }
}

/// Minimizes `f(axes, ε)` over `ε ∈ (0, μ_*]`, truncating the model lazily.
fn minimize_lazily<F>(model: &SemiAxisModel, mu_star: f64, f: F) -> Result<f64>
where
    F: Fn(&[f64], f64) -> Result<f64>,
{
    let cache = std::cell::RefCell::new((f64::INFINITY, Vec::new()));
    let objective = |eps: f64| -> Result<f64> {
        let mut c = cache.borrow_mut();
        if eps < c.0 {
            *c = (eps, model.truncate_at(eps)?);
        }
        f(&c.1, eps)
    };
    minimize_unimodal(objective, mu_star, mu_star * 1e-300).map(|(_, v)| v)
}

/// `∫_ε^{μ_*} 2 I_1(u)/u du` by panel quadrature in `ln u`. On each panel
/// between consecutive distinct axes `I_1(u) = Σ_active ln μ − C ln u`.
pub fn log_entropy_integral(axes_desc: &[f64], eps: f64) -> Result<f64> {
    let active: Vec<f64> = axes_desc.iter().copied().filter(|m| *m > eps).collect();
    if active.is_empty() {
        return Ok(0.0);
    }
    // knots ascending in ln u; panel j has counts[j] active axes
    let mut knots = vec![eps.ln()];
    let mut counts = Vec::new();
    let mut log_sums = Vec::new();
    let mut i = active.len();
    let mut total = KahanSum::new();
    for m in &active {
        total.add(m.ln());
    }
    let mut running = total.value();
    while i > 0 {
        let v = active[i - 1];
        counts.push(i);
        log_sums.push(running);
        knots.push(v.ln());
        while i > 0 && active[i - 1] == v {
            running -= active[i - 1].ln();
            i -= 1;
        }
    }
    let span_scale: f64 = counts[0] as f64 * (knots[knots.len() - 1] - knots[0]).powi(2);
    let tol = 1e-12 * span_scale.max(1e-300);
    let out = numeric::panel_quadrature(
        &knots,
        |j, t| 2.0 * (log_sums[j] - counts[j] as f64 * t).max(0.0),
        tol,
        DEFAULT_SUBDIVISION_BUDGET,
    )?;
    Ok(out.value)
}

/// Exact infimum of `σ² M(ε) + ε²` over `ε > 0`. On each interval where `M`
/// is constant the infimum is approached at the lower end.
fn step_bias_variance(model: &SemiAxisModel, s2: f64) -> Result<f64> {
    let mu_star = model.max_semi_axis();
    let support = model.support_len();
    let mut best = mu_star * mu_star;
    let mut floor = mu_star;
    loop {
        let (next, axes) = lower_truncation(model, floor, 10.0)?;
        floor = next;
        let complete = support.is_some_and(|n| axes.len() == n);
        let mut j = 0;
        while j < axes.len() {
            let v = axes[j];
            while j < axes.len() && axes[j] == v {
                j += 1;
            }
            if j < axes.len() {
                best = best.min(s2 * j as f64 + axes[j] * axes[j]);
            } else if complete {
                // finite support: ε can go to 0
                best = best.min(s2 * j as f64);
            }
        }
        if complete || s2 * axes.len() as f64 >= best || floor < mu_star * 1e-300 {
            return Ok(best);
        }
    }
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub exact: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub quantity: Quantity,
    pub family: DecayFamily,
    pub order: Order,
    pub model: SemiAxisModel,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// `|ratio − 1|` of the last row is strictly below that of the first.
    pub fn last_closer_than_first(&self) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => (b.ratio - 1.0).abs() < (a.ratio - 1.0).abs(),
            _ => false,
        }
    }

    /// `|ratio − 1|` decreases strictly over the last `k` rows.
    pub fn tail_monotone(&self, k: usize) -> bool {
        let n = self.rows.len();
        if n < k.max(2) {
            return false;
        }
        self.rows[n - k..].windows(2).all(|w| (w[1].ratio - 1.0).abs() < (w[0].ratio - 1.0).abs())
    }
}

/// Exact value of `quantity` at `param` for `model`.
pub fn exact_value(model: &SemiAxisModel, quantity: Quantity, param: f64) -> Result<f64> {
    match quantity {
        Quantity::Entropy => Ok(integral_on_axes(&model.truncate_at(param)?, 1.0, param)),
        Quantity::LinearRisk => linear_minimax_risk(model, param).map(|s| s.linear_risk),
        Quantity::CriticalRadius => critical_radius(model, param, DEFAULT_TOL),
        Quantity::NonlinearRisk => Err(Error::UnsupportedFamily(
            "the nonlinear minimax risk has no exact algorithm; sweep the linear risk instead".into(),
        )),
    }
}

/// Exact vs predicted values over `grid`, evaluated in parallel. Rows keep
/// the order of `grid`.
pub fn convergence_sweep(model: &SemiAxisModel, prediction: &Prediction, grid: &[f64]) -> Result<SweepReport> {
    let rows = grid
        .par_iter()
        .map(|&p| {
            let exact = exact_value(model, prediction.quantity, p)?;
            let predicted = prediction.evaluate(p)?;
            Ok(SweepRow { param: p, exact, predicted, ratio: exact / predicted })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        quantity: prediction.quantity,
        family: prediction.family,
        order: prediction.order,
        model: model.clone(),
        rows,
    })
}

/// `n` points from `start` to `stop`, geometrically spaced.
pub fn log_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), stop.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entropy_examples() {
        assert_relative_eq!(predict_entropy(&DecayFamily::FiniteDim { d: 3 }, 0.01).unwrap(), 3.0 * 100f64.ln());
        assert_relative_eq!(
            predict_entropy(&DecayFamily::Polynomial { c: 1.0, alpha: 2.0 }, 0.1).unwrap(),
            50.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            predict_entropy(&DecayFamily::Exponential { c: 2.0 }, (-1.0f64).exp()).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        assert!(matches!(predict_entropy(&DecayFamily::ExpNLogN { c: 1.0 }, 0.5), Err(Error::DomainError(_))));
        assert!(matches!(predict_entropy(&DecayFamily::Exponential { c: 1.0 }, 1.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn risk_examples() {
        let p = predict_linear_risk(&DecayFamily::Polynomial { c: 1.0, alpha: 1.0 }, 1e-3).unwrap();
        assert_relative_eq!(p, 3f64.powf(1.0 / 3.0) * 5e-7f64.powf(2.0 / 3.0), max_relative = 1e-13);
        assert_relative_eq!(
            predict_linear_risk(&DecayFamily::FiniteDim { d: 5 }, 0.1).unwrap(),
            0.05,
            max_relative = 1e-14
        );
        let de = DecayFamily::DoubleExp { c0: 1.0, c: 1.0, alpha: 2.0 };
        assert_relative_eq!(predict_linear_risk(&de, (-1.0f64).exp()).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn polynomial_risk_forms_agree() {
        // ((α+2)/α)^{α/(α+2)} (cσ²/(α+1))^{2/(α+2)} = ((α+2)/α)(cασ²/((α+1)(α+2)))^{2/(α+2)}
        for &(c, a, s) in &[(1.0f64, 1.0f64, 1e-3f64), (2.5, 0.4, 0.2), (0.3, 3.0, 1e-5)] {
            let other = (a + 2.0) / a * (c * a * s * s / ((a + 1.0) * (a + 2.0))).powf(2.0 / (a + 2.0));
            assert_relative_eq!(
                predict_linear_risk(&DecayFamily::Polynomial { c, alpha: a }, s).unwrap(),
                other,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn critical_radius_examples() {
        let f = DecayFamily::Polynomial { c: 1.0, alpha: 1.0 };
        let r = predict_critical_radius(&f, 1e-3).unwrap();
        assert_relative_eq!(r, (1e-6f64 / 6.0).powf(1.0 / 3.0), max_relative = 1e-14);
        assert!((r - 5.5032e-3).abs() < 1e-6);
        let f2 = DecayFamily::Polynomial { c: 2.0, alpha: 1.0 };
        assert_relative_eq!(
            predict_critical_radius(&f2, 1e-3).unwrap() / r,
            2f64.powf(1.0 / 3.0),
            max_relative = 1e-14
        );
        assert!(matches!(
            predict_critical_radius(&DecayFamily::Exponential { c: 1.0 }, 0.1),
            Err(Error::UnsupportedFamily(_))
        ));
        let exact = critical_radius(&SemiAxisModel::polynomial(1.0, 1.0).unwrap(), 1e-4, 1e-12).unwrap();
        let ratio = exact / predict_critical_radius(&f, 1e-4).unwrap();
        assert!((0.97..=1.03).contains(&ratio), "{ratio}");
    }

    #[test]
    fn two_term_examples() {
        let one = predict_linear_risk(&DecayFamily::Polynomial { c: 1.0, alpha: 2.0 }, 1e-3).unwrap();
        assert_eq!(predict_risk_two_term(1.0, 2.0, 0.0, 1.5, 1e-3).unwrap(), one);
        assert!(matches!(predict_risk_two_term(1.0, 1.0, 0.5, 1.5, 1e-3), Err(Error::InvalidExponents(_))));
        // homogeneity of the correction: σ^{2(α1−α2+2)/(α1+2)}
        let corr = |s: f64| {
            predict_risk_two_term(1.0, 2.0, 0.5, 1.5, s).unwrap()
                - predict_risk_two_term(1.0, 2.0, 0.0, 1.5, s).unwrap()
        };
        assert_relative_eq!(corr(2e-3) / corr(1e-3), 2f64.powf(2.0 * 2.5 / 4.0), max_relative = 1e-9);
    }

    #[test]
    fn multi_term_examples() {
        assert_relative_eq!(predict_entropy_multi_term(&[(1.0, 2.0)], 0.1).unwrap(), 50.0, max_relative = 1e-14);
        let v = predict_entropy_multi_term(&[(1.0, 1.5), (0.5, 1.0)], 0.01).unwrap();
        assert_relative_eq!(v, 1000.0 / 1.5 + 50.0, max_relative = 1e-13);
        assert!(matches!(predict_entropy_multi_term(&[(1.0, 2.5), (1.0, 1.0)], 0.01), Err(Error::InvalidExponents(_))));
    }

    #[test]
    fn bias_variance_finite_dim() {
        let fd = SemiAxisModel::finite_dim(3, 1.0).unwrap();
        let v = predict_bias_variance(&fd, fd.elasticity_index(), 0.1).unwrap();
        assert_relative_eq!(v, 0.03, max_relative = 1e-14);
        assert_eq!(predict_bias_variance(&fd, None, 0.1), Err(Error::UnknownIndex));
    }

    #[test]
    fn bias_variance_step_matches_brute_force() {
        let m = SemiAxisModel::explicit(vec![1.0, 0.7, 0.7, 0.2, 0.05]).unwrap();
        let s2: f64 = 0.04;
        // candidates: above μ_*, just above each lower distinct value, and ε → 0
        let brute = [1.0, s2 * 1.0 + 0.49, s2 * 3.0 + 0.04, s2 * 4.0 + 0.0025, s2 * 5.0]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let v = predict_bias_variance(&m, Some(ElasticityIndex::Finite(0.0)), 0.2).unwrap();
        assert_relative_eq!(v, brute, max_relative = 1e-14);
    }

    #[test]
    fn bias_variance_polynomial_matches_pinsker_rate() {
        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let f = DecayFamily::Polynomial { c: 1.0, alpha: 1.0 };
        let r =
            |s: f64| predict_bias_variance(&p, p.elasticity_index(), s).unwrap() / predict_linear_risk(&f, s).unwrap();
        let (a, b) = (r(1e-2), r(1e-4));
        assert!((b - 1.0).abs() < (a - 1.0).abs(), "{a} {b}");
        assert!((b - 1.0).abs() < 0.02);
    }

    #[test]
    fn log_entropy_integral_matches_closed_form() {
        let axes = vec![1.0, 0.5, 0.5, 0.3, 0.01];
        for eps in [0.02, 0.2, 0.45, 0.9] {
            let closed: f64 = axes.iter().map(|m: &f64| (m / eps).ln().max(0.0).powi(2)).sum();
            assert_relative_eq!(log_entropy_integral(&axes, eps).unwrap(), closed, max_relative = 1e-10);
        }
    }

    #[test]
    fn bias_variance_double_exponential() {
        let m = SemiAxisModel::double_exp(1.0, 1.0, 1.0).unwrap();
        let idx = m.elasticity_index();
        assert_eq!(idx, Some(ElasticityIndex::Infinite));
        let vals: Vec<f64> = [0.1, 0.03, 0.01].iter().map(|s| predict_bias_variance(&m, idx, *s).unwrap()).collect();
        assert!(vals.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(vals[0] > vals[1] && vals[1] > vals[2]);
    }

    #[test]
    fn family_from_model() {
        let m = SemiAxisModel::polynomial(1.0, 2.0).unwrap().scaled(0.5).unwrap();
        assert_eq!(DecayFamily::from_model(&m).unwrap(), DecayFamily::Polynomial { c: 0.25, alpha: 2.0 });
        assert!(DecayFamily::from_model(&SemiAxisModel::explicit(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn sweeps_report_rows_in_grid_order() {
        let m = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let pred =
            Prediction::new(Quantity::Entropy, DecayFamily::Polynomial { c: 1.0, alpha: 1.0 }, Order::Leading).unwrap();
        let grid = log_grid(1e-1, 1e-4, 4);
        let rep = convergence_sweep(&m, &pred, &grid).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.rows.iter().zip(&grid).all(|(r, g)| r.param == *g));
        assert!(rep.last_closer_than_first() && rep.tail_monotone(3));

        let fd = SemiAxisModel::finite_dim(4, 1.0).unwrap();
        let pred = Prediction::new(Quantity::LinearRisk, DecayFamily::FiniteDim { d: 4 }, Order::Leading).unwrap();
        let rep = convergence_sweep(&fd, &pred, &[0.1, 0.01, 0.001]).unwrap();
        // R_L = dσ²/(1 + dσ²) for d equal unit axes
        for row in &rep.rows {
            let d_s2 = 4.0 * row.param * row.param;
            assert_relative_eq!(row.ratio, 1.0 / (1.0 + d_s2), max_relative = 1e-10);
        }
    }

    #[test]
    fn exponential_entropy_trend() {
        let m = SemiAxisModel::exponential(2.0).unwrap();
        let pred = Prediction::new(Quantity::Entropy, DecayFamily::Exponential { c: 2.0 }, Order::Leading).unwrap();
        let rep = convergence_sweep(&m, &pred, &[1e-2, 1e-6]).unwrap();
        assert!(rep.last_closer_than_first());
    }

    #[test]
    fn prediction_validation() {
        assert!(
            Prediction::new(Quantity::Entropy, DecayFamily::Polynomial { c: 1.0, alpha: 1.0 }, Order::TwoTerm).is_err()
        );
        let pair = DecayFamily::PolynomialPair { c1: 1.0, alpha1: 2.0, c2: 0.5, alpha2: 1.5 };
        assert!(Prediction::new(Quantity::LinearRisk, pair, Order::TwoTerm).is_ok());
        assert!(Prediction::new(Quantity::CriticalRadius, pair, Order::TwoTerm).is_err());
        let bad = DecayFamily::PolynomialPair { c1: 1.0, alpha1: 3.5, c2: 0.5, alpha2: 1.5 };
        assert!(Prediction::new(Quantity::Entropy, bad, Order::TwoTerm).is_err());
    }
}
