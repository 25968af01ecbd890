//! Semi-axis sequences and their counting function.
//!
//! A [`SemiAxisModel`] describes a non-increasing sequence `μ_1 ≥ μ_2 ≥ … ≥ 0`
//! either explicitly, through one of the analytic decay families, or through
//! the Dirichlet spectrum of a box (see [`crate::sobolev`]). The counting
//! function `M(ε) = |{n : μ_n ≥ ε}|` includes ties.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sobolev::{self, BoxDomain};

/// Largest number of semi-axes any single count or truncation may produce.
pub const DEFAULT_AXIS_CAP: usize = 100_000_000;

/// Index `b ∈ [0, ∞]` of the regularity condition on the counting function.
/// Stored as metadata only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElasticityIndex {
    Finite(f64),
    Infinite,
}

impl ElasticityIndex {
    pub fn is_zero(&self) -> bool {
        matches!(self, ElasticityIndex::Finite(b) if *b == 0.0)
    }
}

impl fmt::Display for ElasticityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElasticityIndex::Finite(b) => write!(f, "{b}"),
            ElasticityIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ElasticityIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ElasticityIndex::Finite(b) => s.serialize_f64(*b),
            ElasticityIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ElasticityIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(b) if b >= 0.0 && b.is_finite() => Ok(ElasticityIndex::Finite(b)),
            Repr::Num(b) => Err(serde::de::Error::custom(format!("elasticity index must be in [0, inf], got {b}"))),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(ElasticityIndex::Infinite),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("unrecognized elasticity index {t:?}"))),
        }
    }
}

/// The concrete description of a semi-axis sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// Finite list, kept sorted non-increasing.
    Explicit { values: Vec<f64> },
    /// `d` equal axes of length `value`.
    FiniteDim { d: usize, value: f64 },
    /// `ln μ_n = −n/c`.
    Exponential { c: f64 },
    /// `ln μ_n = −n ln(n)/c` for `n ≥ 2`, `μ_1 = μ_2`.
    ExpNLogN { c: f64 },
    /// `μ_n = (c/n)^{1/α}`.
    Polynomial { c: f64, alpha: f64 },
    /// `μ_n = (c (ln n)^β / (α^β n))^{1/α}`, frozen below the index where the
    /// formula stops decreasing.
    PolyLog { c: f64, alpha: f64, beta: f64 },
    /// `exp(c μ_n^{−α}) = n/c0`, frozen below `⌈c0·e⌉ + 1`.
    DoubleExp { c0: f64, c: f64, alpha: f64 },
    /// Sobolev ellipsoid of order `k` on the box `Π (0, L_i)`.
    SobolevBox { lengths: Vec<f64>, k: u32 },
    /// Every axis of `inner` multiplied by `lambda`.
    Scaled { inner: Box<SemiAxisModel>, lambda: f64 },
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    #[serde(flatten)]
    kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    elasticity_index: Option<ElasticityIndex>,
}

/// A validated semi-axis sequence. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct SemiAxisModel {
    kind: ModelKind,
    elasticity_index: Option<ElasticityIndex>,
}

impl TryFrom<ModelRepr> for SemiAxisModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        SemiAxisModel::new(r.kind).map(|m| m.with_elasticity_index(r.elasticity_index))
    }
}

impl From<SemiAxisModel> for ModelRepr {
    fn from(m: SemiAxisModel) -> Self {
        ModelRepr { kind: m.kind, elasticity_index: m.elasticity_index }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl SemiAxisModel {
    /// Validates `kind` and builds the model. Explicit values are sorted
    /// non-increasing.
    pub fn new(kind: ModelKind) -> Result<Self> {
        let kind = match kind {
            ModelKind::Explicit { mut values } => {
                if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "explicit semi-axes must be finite and non-negative, got {bad}"
                    )));
                }
                if !values.iter().any(|v| *v > 0.0) {
                    return Err(Error::InvalidModel("at least one semi-axis must be positive".into()));
                }
                values.sort_by(|a, b| b.total_cmp(a));
                ModelKind::Explicit { values }
            }
            ModelKind::FiniteDim { d, value } => {
                if d == 0 {
                    return Err(Error::InvalidModel("finite_dim needs d >= 1".into()));
                }
                positive("value", value)?;
                ModelKind::FiniteDim { d, value }
            }
            ModelKind::Exponential { c } => {
                positive("c", c)?;
                ModelKind::Exponential { c }
            }
            ModelKind::ExpNLogN { c } => {
                positive("c", c)?;
                ModelKind::ExpNLogN { c }
            }
            ModelKind::Polynomial { c, alpha } => {
                positive("c", c)?;
                positive("alpha", alpha)?;
                ModelKind::Polynomial { c, alpha }
            }
            ModelKind::PolyLog { c, alpha, beta } => {
                positive("c", c)?;
                positive("alpha", alpha)?;
                if !beta.is_finite() {
                    return Err(Error::InvalidModel(format!("beta must be finite, got {beta}")));
                }
                ModelKind::PolyLog { c, alpha, beta }
            }
            ModelKind::DoubleExp { c0, c, alpha } => {
                positive("c0", c0)?;
                positive("c", c)?;
                positive("alpha", alpha)?;
                ModelKind::DoubleExp { c0, c, alpha }
            }
            ModelKind::SobolevBox { lengths, k } => {
                BoxDomain::new(lengths.clone())?;
                if k == 0 {
                    return Err(Error::InvalidModel("sobolev order k must be >= 1".into()));
                }
                ModelKind::SobolevBox { lengths, k }
            }
            ModelKind::Scaled { inner, lambda } => {
                positive("lambda", lambda)?;
                ModelKind::Scaled { inner, lambda }
            }
        };
        Ok(SemiAxisModel { kind, elasticity_index: None })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        Self::new(ModelKind::Explicit { values })
    }

    pub fn finite_dim(d: usize, value: f64) -> Result<Self> {
        Self::new(ModelKind::FiniteDim { d, value })
    }

    pub fn exponential(c: f64) -> Result<Self> {
        Self::new(ModelKind::Exponential { c })
    }

    pub fn exp_n_log_n(c: f64) -> Result<Self> {
        Self::new(ModelKind::ExpNLogN { c })
    }

    pub fn polynomial(c: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Polynomial { c, alpha })
    }

    pub fn poly_log(c: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(ModelKind::PolyLog { c, alpha, beta })
    }

    pub fn double_exp(c0: f64, c: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::DoubleExp { c0, c, alpha })
    }

    pub fn sobolev_box(lengths: Vec<f64>, k: u32) -> Result<Self> {
        Self::new(ModelKind::SobolevBox { lengths, k })
    }

    pub fn scaled(self, lambda: f64) -> Result<Self> {
        Self::new(ModelKind::Scaled { inner: Box::new(self), lambda })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn with_elasticity_index(mut self, b: Option<ElasticityIndex>) -> Self {
        self.elasticity_index = b;
        self
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// The stored elasticity index, or the index of the family when none was
    /// given: 0 for finite, exponential and `n ln n` decay, `α` for the
    /// polynomial families, `∞` for double-exponential decay.
    pub fn elasticity_index(&self) -> Option<ElasticityIndex> {
        if self.elasticity_index.is_some() {
            return self.elasticity_index;
        }
        match &self.kind {
            ModelKind::FiniteDim { .. } | ModelKind::Exponential { .. } | ModelKind::ExpNLogN { .. } => {
                Some(ElasticityIndex::Finite(0.0))
            }
            ModelKind::Explicit { .. } => Some(ElasticityIndex::Finite(0.0)),
            ModelKind::Polynomial { alpha, .. } | ModelKind::PolyLog { alpha, .. } => {
                Some(ElasticityIndex::Finite(*alpha))
            }
            ModelKind::DoubleExp { .. } => Some(ElasticityIndex::Infinite),
            ModelKind::SobolevBox { lengths, k } => Some(ElasticityIndex::Finite(lengths.len() as f64 / *k as f64)),
            ModelKind::Scaled { inner, .. } => inner.elasticity_index(),
        }
    }

    /// Number of positive axes for finite models, `None` for infinite ones.
    pub fn support_len(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Explicit { values } => Some(values.iter().filter(|v| **v > 0.0).count()),
            ModelKind::FiniteDim { d, .. } => Some(*d),
            ModelKind::Scaled { inner, .. } => inner.support_len(),
            _ => None,
        }
    }

    /// True when axes come from a lattice enumeration and single-axis access
    /// is expensive.
    fn is_lattice_backed(&self) -> bool {
        match &self.kind {
            ModelKind::SobolevBox { .. } => true,
            ModelKind::Scaled { inner, .. } => inner.is_lattice_backed(),
            _ => false,
        }
    }

    /// `μ_n` for `n ≥ 1`; zero beyond the support of finite models.
    ///
    /// # Panics
    /// Panics if `n == 0`.
    pub fn semi_axis(&self, n: usize) -> f64 {
        assert!(n >= 1, "semi-axes are indexed from 1");
        match &self.kind {
            ModelKind::Explicit { values } => values.get(n - 1).copied().unwrap_or(0.0),
            ModelKind::FiniteDim { d, value } => {
                if n <= *d {
                    *value
                } else {
                    0.0
                }
            }
            ModelKind::Exponential { c } => (-(n as f64) / c).exp(),
            ModelKind::ExpNLogN { c } => {
                let m = n.max(2) as f64;
                (-m * m.ln() / c).exp()
            }
            ModelKind::Polynomial { c, alpha } => (c / n as f64).powf(1.0 / alpha),
            ModelKind::PolyLog { c, alpha, beta } => {
                let m = n.max(poly_log_floor(*beta)) as f64;
                (c * m.ln().powf(*beta) / (alpha.powf(*beta) * m)).powf(1.0 / alpha)
            }
            ModelKind::DoubleExp { c0, c, alpha } => {
                let m = n.max(double_exp_floor(*c0)) as f64;
                (c / (m / c0).ln()).powf(1.0 / alpha)
            }
            ModelKind::SobolevBox { lengths, k } => sobolev_nth_axis(lengths, *k, n),
            ModelKind::Scaled { inner, lambda } => lambda * inner.semi_axis(n),
        }
    }

    /// `μ_* = max_n μ_n`.
    pub fn max_semi_axis(&self) -> f64 {
        match &self.kind {
            ModelKind::Explicit { values } => values[0],
            ModelKind::FiniteDim { value, .. } => *value,
            ModelKind::SobolevBox { lengths, k } => {
                let lambda1 = BoxDomain::new(lengths.clone()).expect("validated").first_eigenvalue();
                sobolev::axis_from_eigenvalue(lambda1, *k)
            }
            ModelKind::Scaled { inner, lambda } => lambda * inner.max_semi_axis(),
            _ => self.semi_axis(1),
        }
    }

    /// Number of semi-axes `≥ eps`, with the default cap.
    pub fn counting_function(&self, eps: f64) -> Result<usize> {
        self.counting_function_capped(eps, DEFAULT_AXIS_CAP)
    }

    /// Number of semi-axes `≥ eps`; fails with [`Error::OverflowBudget`] when
    /// the count exceeds `cap`.
    pub fn counting_function_capped(&self, eps: f64, cap: usize) -> Result<usize> {
        check_threshold(eps)?;
        let overflow = Error::OverflowBudget { epsilon: eps, cap };
        let count = match &self.kind {
            ModelKind::Explicit { values } => values.partition_point(|v| *v >= eps),
            ModelKind::FiniteDim { d, value } => {
                if *value >= eps {
                    *d
                } else {
                    0
                }
            }
            _ if self.is_lattice_backed() => return Ok(self.truncate_at_capped(eps, cap)?.len()),
            _ => count_monotone(|n| self.semi_axis(n) >= eps, self.count_hint(eps), cap).ok_or(overflow.clone())?,
        };
        if count > cap {
            return Err(overflow);
        }
        Ok(count)
    }

    /// Closed-form (possibly approximate) inversion of the axis formula.
    fn count_hint(&self, eps: f64) -> f64 {
        let log_inv = (1.0 / eps).ln();
        match &self.kind {
            ModelKind::Explicit { values } => values.len() as f64,
            ModelKind::FiniteDim { d, .. } => *d as f64,
            ModelKind::Exponential { c } => c * log_inv,
            ModelKind::ExpNLogN { c } => {
                let x = c * log_inv;
                if x > std::f64::consts::E {
                    x / x.ln()
                } else {
                    1.0
                }
            }
            ModelKind::Polynomial { c, alpha } => c * eps.powf(-alpha),
            ModelKind::PolyLog { c, alpha, beta } => {
                if log_inv > 1.0 {
                    c * eps.powf(-alpha) * log_inv.powf(*beta)
                } else {
                    1.0
                }
            }
            ModelKind::DoubleExp { c0, c, alpha } => c0 * (c * eps.powf(-alpha)).exp(),
            ModelKind::SobolevBox { .. } => 1.0,
            ModelKind::Scaled { inner, lambda } => inner.count_hint(eps / lambda),
        }
    }

    /// All semi-axes `≥ eps_min`, sorted non-increasing, with the default cap.
    pub fn truncate_at(&self, eps_min: f64) -> Result<Vec<f64>> {
        self.truncate_at_capped(eps_min, DEFAULT_AXIS_CAP)
    }

    pub fn truncate_at_capped(&self, eps_min: f64, cap: usize) -> Result<Vec<f64>> {
        check_threshold(eps_min)?;
        match &self.kind {
            ModelKind::Explicit { values } => {
                let n = self.counting_function_capped(eps_min, cap)?;
                Ok(values[..n].to_vec())
            }
            ModelKind::SobolevBox { lengths, k } => {
                let domain = BoxDomain::new(lengths.clone())?;
                sobolev::axes_at_least(&domain, *k, eps_min, cap).map_err(|e| match e {
                    Error::BudgetExceeded { cap } => Error::OverflowBudget { epsilon: eps_min, cap },
                    other => other,
                })
            }
            ModelKind::Scaled { inner, lambda } if inner.is_lattice_backed() => {
                // widen slightly so rounding in the division cannot drop an axis
                let widened = eps_min / lambda * (1.0 - 4.0 * f64::EPSILON);
                let mut axes: Vec<f64> =
                    inner.truncate_at_capped(widened, cap)?.into_iter().map(|v| lambda * v).collect();
                axes.retain(|v| *v >= eps_min);
                Ok(axes)
            }
            _ => {
                let n = self.counting_function_capped(eps_min, cap)?;
                Ok((1..=n).map(|i| self.semi_axis(i)).collect())
            }
        }
    }

    /// The first `n` semi-axes (fewer for finite models, whose zero tail is
    /// dropped).
    pub fn leading_axes(&self, n: usize) -> Vec<f64> {
        match &self.kind {
            ModelKind::Explicit { values } => values.iter().take(n).copied().filter(|v| *v > 0.0).collect(),
            ModelKind::FiniteDim { d, value } => vec![*value; n.min(*d)],
            ModelKind::SobolevBox { lengths, k } => {
                if n == 0 {
                    return Vec::new();
                }
                let domain = BoxDomain::new(lengths.clone()).expect("validated");
                let mut eig = sobolev::smallest_eigenvalues(&domain, n);
                eig.truncate(n);
                eig.into_iter().map(|l| sobolev::axis_from_eigenvalue(l, *k)).collect()
            }
            ModelKind::Scaled { inner, lambda } => inner.leading_axes(n).into_iter().map(|v| lambda * v).collect(),
            _ => (1..=n).map(|i| self.semi_axis(i)).collect(),
        }
    }
}

/// Truncates at `lo / factor`, shrinking the factor (down to about 1.001)
/// while the count would overflow the axis cap. Families whose count grows
/// faster than any power of `1/ε` need the smaller steps.
pub(crate) fn lower_truncation(model: &SemiAxisModel, lo: f64, factor: f64) -> Result<(f64, Vec<f64>)> {
    let mut f = factor;
    loop {
        let next = lo / f;
        match model.truncate_at(next) {
            Ok(axes) => return Ok((next, axes)),
            Err(Error::OverflowBudget { .. }) if f > 1.001 => f = f.sqrt(),
            Err(e) => return Err(e),
        }
    }
}

fn check_threshold(eps: f64) -> Result<()> {
    if eps > 0.0 && !eps.is_nan() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("threshold must be positive, got {eps}")))
    }
}

/// First index from which `(ln n)^β / n` is non-increasing.
pub(crate) fn poly_log_floor(beta: f64) -> usize {
    if beta <= 0.0 {
        2
    } else {
        (beta.exp().ceil() as usize).max(2)
    }
}

pub(crate) fn double_exp_floor(c0: f64) -> usize {
    (c0 * std::f64::consts::E).ceil() as usize + 1
}

fn sobolev_nth_axis(lengths: &[f64], k: u32, n: usize) -> f64 {
    let domain = BoxDomain::new(lengths.to_vec()).expect("validated");
    let eig = sobolev::smallest_eigenvalues(&domain, n);
    sobolev::axis_from_eigenvalue(eig[n - 1], k)
}

/// Largest `n ≤ cap` with `pred(n)` for a predicate that holds on an initial
/// segment of the positive integers (`pred(0)` is taken as true). Starts from
/// `hint` and gallops. `None` when `pred(cap + 1)` still holds.
fn count_monotone(pred: impl Fn(usize) -> bool, hint: f64, cap: usize) -> Option<usize> {
    let limit = cap.saturating_add(1);
    let h = if hint.is_nan() || hint < 1.0 {
        0
    } else if hint >= limit as f64 {
        limit
    } else {
        hint.floor() as usize
    };
    let (mut lo, mut hi);
    if h == 0 || pred(h) {
        lo = h;
        let mut step = 1usize;
        loop {
            let cand = lo.saturating_add(step);
            if cand > cap {
                if pred(limit) {
                    return None;
                }
                hi = limit;
                break;
            }
            if !pred(cand) {
                hi = cand;
                break;
            }
            lo = cand;
            step = step.saturating_mul(2);
        }
    } else {
        hi = h;
        let mut step = 1usize;
        loop {
            if hi <= step {
                lo = 0;
                break;
            }
            let cand = hi - step;
            if pred(cand) {
                lo = cand;
                break;
            }
            hi = cand;
            step = step.saturating_mul(2);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn semi_axis_examples() {
        assert_eq!(SemiAxisModel::finite_dim(4, 1.0).unwrap().semi_axis(3), 1.0);
        assert!((SemiAxisModel::polynomial(1.0, 1.0).unwrap().semi_axis(5) - 0.2).abs() < 1e-15);
        assert_eq!(SemiAxisModel::explicit(vec![1.0, 0.5, 0.25]).unwrap().semi_axis(7), 0.0);
    }

    #[test]
    fn counting_examples() {
        let m = SemiAxisModel::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(m.counting_function(0.5).unwrap(), 2);
        // 1/n >= 0.3 for n = 1, 2, 3
        let brute = (1..100).filter(|n| 1.0 / *n as f64 >= 0.3).count();
        assert_eq!(brute, 3);
        assert_eq!(SemiAxisModel::polynomial(1.0, 1.0).unwrap().counting_function(0.3).unwrap(), brute);
        assert_eq!(SemiAxisModel::finite_dim(4, 1.0).unwrap().counting_function(0.9).unwrap(), 4);
    }

    #[test]
    fn tie_is_counted() {
        let m = SemiAxisModel::explicit(vec![0.5, 0.5, 0.1]).unwrap();
        assert_eq!(m.counting_function(0.5).unwrap(), 2);
        assert_eq!(m.counting_function(0.5 * (1.0 + 1e-12)).unwrap(), 0);
        // exact tie on an analytic family: 1/4 is representable
        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        assert_eq!(p.counting_function(0.25).unwrap(), 4);
    }

    #[test]
    fn max_semi_axis_examples() {
        assert_eq!(SemiAxisModel::explicit(vec![1.0, 0.5]).unwrap().max_semi_axis(), 1.0);
        assert_eq!(SemiAxisModel::polynomial(2.0, 1.0).unwrap().max_semi_axis(), 2.0);
        let s = SemiAxisModel::explicit(vec![1.0]).unwrap().scaled(0.3).unwrap();
        assert!((s.max_semi_axis() - 0.3).abs() < 1e-16);
    }

    #[test]
    fn truncation_examples() {
        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let t = p.truncate_at(0.3).unwrap();
        let brute: Vec<f64> = (1..=3).map(|n| 1.0 / n as f64).collect();
        assert_eq!(t.len(), 3);
        for (a, b) in t.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-15);
        }
        let e = SemiAxisModel::explicit(vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(e.truncate_at(0.4).unwrap(), vec![1.0, 0.5]);
        assert!(SemiAxisModel::finite_dim(2, 1.0).unwrap().truncate_at(2.0).unwrap().is_empty());
    }

    #[test]
    fn overflow_budget() {
        let p = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
        let err = p.counting_function_capped(1e-6, 1000).unwrap_err();
        assert!(matches!(err, Error::OverflowBudget { cap: 1000, .. }));
        let d = SemiAxisModel::double_exp(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(d.counting_function(0.01), Err(Error::OverflowBudget { .. })));
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(SemiAxisModel::explicit(vec![1.0, f64::NAN]).is_err());
        assert!(SemiAxisModel::explicit(vec![1.0, -0.1]).is_err());
        assert!(SemiAxisModel::explicit(vec![0.0, 0.0]).is_err());
        assert!(SemiAxisModel::polynomial(0.0, 1.0).is_err());
        assert!(SemiAxisModel::finite_dim(0, 1.0).is_err());
        assert!(SemiAxisModel::from_json(r#"{"kind":"polynomial","c":-1,"alpha":1}"#).is_err());
    }

    #[test]
    fn json_shapes() {
        let m = SemiAxisModel::from_json(r#"{"kind": "polynomial", "c": 1.0, "alpha": 1.0}"#).unwrap();
        assert_eq!(m, SemiAxisModel::polynomial(1.0, 1.0).unwrap());
        let e = SemiAxisModel::from_json(r#"{"kind": "explicit", "values": [0.25, 1, 0.5]}"#).unwrap();
        assert_eq!(e.semi_axis(1), 1.0);
        let s = SemiAxisModel::from_json(
            r#"{"kind":"scaled","lambda":2,"inner":{"kind":"double_exp","c0":1,"c":1,"alpha":2},"elasticity_index":"inf"}"#,
        )
        .unwrap();
        assert_eq!(s.elasticity_index(), Some(ElasticityIndex::Infinite));
        let back = SemiAxisModel::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let b = SemiAxisModel::from_json(r#"{"kind":"exp_n_log_n","c":2,"elasticity_index":0}"#).unwrap();
        assert_eq!(b.elasticity_index(), Some(ElasticityIndex::Finite(0.0)));
    }

    #[test]
    fn low_index_conventions_keep_monotonicity() {
        let e = SemiAxisModel::exp_n_log_n(2.0).unwrap();
        assert_eq!(e.semi_axis(1), e.semi_axis(2));
        let p = SemiAxisModel::poly_log(1.0, 1.0, 3.0).unwrap();
        for n in 1..200 {
            assert!(p.semi_axis(n) >= p.semi_axis(n + 1));
        }
        let d = SemiAxisModel::double_exp(2.0, 1.0, 1.0).unwrap();
        for n in 1..200 {
            assert!(d.semi_axis(n) >= d.semi_axis(n + 1));
        }
        // defining relation of the double exponential family past the clamp
        let n = 500usize;
        let mu = d.semi_axis(n);
        assert!(((1.0 / mu).exp() - n as f64 / 2.0).abs() / (n as f64) < 1e-12);
    }

    #[test]
    fn counting_agrees_with_linear_scan() {
        let models = vec![
            SemiAxisModel::exponential(3.0).unwrap(),
            SemiAxisModel::exp_n_log_n(5.0).unwrap(),
            SemiAxisModel::polynomial(2.0, 0.7).unwrap(),
            SemiAxisModel::poly_log(1.5, 1.2, -0.8).unwrap(),
            SemiAxisModel::poly_log(1.5, 1.2, 2.0).unwrap(),
            SemiAxisModel::double_exp(1.0, 1.0, 1.0).unwrap(),
            SemiAxisModel::polynomial(1.0, 2.0).unwrap().scaled(0.37).unwrap(),
        ];
        for m in &models {
            for eps in [0.9, 0.31, 0.1, 0.043, 0.012] {
                if matches!(m.kind(), ModelKind::DoubleExp { .. }) && eps < 0.1 {
                    continue;
                }
                let scan = (1..200_000).take_while(|n| m.semi_axis(*n) >= eps).count();
                assert_eq!(m.counting_function(eps).unwrap(), scan, "{m:?} at {eps}");
            }
        }
    }

    #[test]
    fn count_monotone_handles_bad_hints() {
        let pred = |n: usize| n <= 37;
        for hint in [0.0, 1.0, 36.0, 37.0, 38.0, 1e6, f64::INFINITY, f64::NAN] {
            assert_eq!(count_monotone(pred, hint, 1000), Some(37));
        }
        assert_eq!(count_monotone(|_| true, 5.0, 1000), None);
    }

    fn any_model() -> impl Strategy<Value = SemiAxisModel> {
        prop_oneof![
            prop::collection::vec(0.0f64..2.0, 1..40)
                .prop_filter("positive", |v| v.iter().any(|x| *x > 0.0))
                .prop_map(|v| SemiAxisModel::explicit(v).unwrap()),
            (1usize..10, 0.1f64..3.0).prop_map(|(d, v)| SemiAxisModel::finite_dim(d, v).unwrap()),
            (0.5f64..5.0).prop_map(|c| SemiAxisModel::exponential(c).unwrap()),
            (0.5f64..5.0).prop_map(|c| SemiAxisModel::exp_n_log_n(c).unwrap()),
            (0.2f64..3.0, 0.5f64..3.0).prop_map(|(c, a)| SemiAxisModel::polynomial(c, a).unwrap()),
            (0.2f64..3.0, 0.5f64..3.0, -2.0f64..2.0).prop_map(|(c, a, b)| SemiAxisModel::poly_log(c, a, b).unwrap()),
            (0.5f64..3.0, 0.5f64..2.0, 1.0f64..3.0).prop_map(|(c0, c, a)| SemiAxisModel::double_exp(c0, c, a).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn counting_is_monotone(m in any_model(), a in 0.02f64..2.0, b in 0.02f64..2.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (m_lo, m_hi) = (m.counting_function(lo), m.counting_function(hi));
            if let (Ok(m_lo), Ok(m_hi)) = (m_lo, m_hi) {
                prop_assert!(m_lo >= m_hi);
            }
        }

        #[test]
        fn counting_matches_truncation(m in any_model(), eps in 0.02f64..2.0) {
            if let Ok(n) = m.counting_function(eps) {
                let t = m.truncate_at(eps).unwrap();
                prop_assert_eq!(t.len(), n);
                prop_assert!(t.windows(2).all(|w| w[0] >= w[1]));
                prop_assert!(t.iter().all(|v| *v >= eps));
            }
        }

        #[test]
        fn scale_equivariance(m in any_model(), eps in 0.02f64..2.0, lambda in 0.1f64..10.0) {
            if let Ok(n) = m.counting_function(eps) {
                let s = m.clone().scaled(lambda).unwrap();
                // keep λ·ε exact so that ties map to ties
                let lambda = (lambda * 1024.0).round() / 1024.0;
                let s = if lambda > 0.0 { m.clone().scaled(lambda).unwrap() } else { s };
                let scaled = s.counting_function(lambda * eps);
                if let Ok(k) = scaled {
                    // rounding of λ·μ_n can only promote a boundary axis
                    prop_assert!(k == n || (k == n + 1 && (m.semi_axis(n + 1) - eps).abs() <= 4.0 * f64::EPSILON * eps));
                }
            }
        }

        #[test]
        fn left_continuity_at_explicit_jumps(vals in prop::collection::vec(0.01f64..2.0, 1..30), pick in 0usize..30) {
            let m = SemiAxisModel::explicit(vals).unwrap();
            let sorted = m.truncate_at(1e-9).unwrap();
            let v = sorted[pick % sorted.len()];
            let below: Vec<f64> = sorted.iter().copied().filter(|x| *x < v).collect();
            let gap = below.first().map(|x| (v - x) / v).unwrap_or(0.5);
            let delta = 0.5 * gap;
            let mult = sorted.iter().filter(|x| **x >= v * (1.0 - delta) && **x < v).count();
            prop_assert_eq!(
                m.counting_function(v).unwrap(),
                m.counting_function(v * (1.0 - delta)).unwrap() - mult
            );
        }
    }
}
