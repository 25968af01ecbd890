//! Self-check suites behind the `verify` command. Each check evaluates one
//! acceptance criterion against a closed form or an independent computation
//! and reports what it measured.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    convergence_sweep, log_grid, merged_polynomial_model, predict_linear_risk, predict_risk_two_term, DecayFamily,
    Order, Prediction, Quantity,
};
use crate::entropy::{exact_entropy_single_axis, mityagin_bounds};
use crate::error::{Error, Result};
use crate::integrals::{integral_exact, integral_on_axes, integral_quadrature, transfer_residual};
use crate::risk::{lambert_w, linear_minimax_risk, linear_risk_variational, pinsker_weights};
use crate::semiaxes::{ElasticityIndex, SemiAxisModel};
use crate::sim::{densify, empirical_mse, worst_case_vector, SimConfig};
use crate::sobolev::{
    eigenvalue_count, pinsker_constant, sobolev_semi_axes_capped, weyl_counting, BoxDomain, DEFAULT_EIGEN_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Asymptotics,
    Sobolev,
    MonteCarlo,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Core, Suite::Asymptotics, Suite::Sobolev, Suite::MonteCarlo];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Asymptotics => "asymptotics",
            Suite::Sobolev => "sobolev",
            Suite::MonteCarlo => "montecarlo",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            Error::InvalidConfig(format!("unknown suite {s:?}; expected core, asymptotics, sobolev or montecarlo"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    /// Criterion number, with a letter suffix for split criteria.
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub measured: Vec<Measurement>,
}

impl CheckResult {
    fn new(id: &str, description: &str) -> Self {
        CheckResult { id: id.into(), description: description.into(), passed: true, measured: Vec::new() }
    }

    fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measured.push(Measurement { name: name.into(), value });
    }

    /// Records `value` and folds `ok` into the verdict.
    fn expect(&mut self, name: impl Into<String>, value: f64, ok: bool) {
        self.measure(name, value);
        self.passed &= ok;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Lattice cap for the Sobolev suite.
    pub eigen_cap: usize,
    pub mc_trials: u64,
    pub seed: u64,
    /// Points per sweep in the asymptotics suite.
    pub grid_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { eigen_cap: DEFAULT_EIGEN_CAP, mc_trials: 1_000_000, seed: 20_240_601, grid_points: 8 }
    }
}

/// Runs one suite. Numerical failures inside a check (budgets, brackets)
/// are returned as errors rather than as failed checks.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    if opts.grid_points < 2 {
        return Err(Error::InvalidConfig("grid_points must be >= 2".into()));
    }
    let checks = match suite {
        Suite::Core => vec![
            single_axis()?,
            integral_oracle(opts.seed)?,
            transfer(opts.seed)?,
            entropy_checks()?,
            risk_identities()?,
            variational()?,
            lambert(),
        ],
        Suite::Asymptotics => {
            let mut v = vec![pinsker_ratio()?];
            v.extend(bracket_shrinkage()?);
            v.push(two_term()?);
            v.push(slow_families(opts.grid_points)?);
            v
        }
        Suite::Sobolev => vec![weyl(opts.eigen_cap)?, sobolev_pinsker(opts.eigen_cap)?],
        Suite::MonteCarlo => vec![monte_carlo(opts.mc_trials, opts.seed)?],
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { suite, passed, checks })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn single_axis() -> Result<CheckResult> {
    let mut c = CheckResult::new("1", "single-axis critical radius and linear risk equal sigma^2/(1+sigma^2)");
    let m = SemiAxisModel::explicit(vec![1.0])?;
    for s in [1.0, 0.1, 0.01] {
        let sol = linear_minimax_risk(&m, s)?;
        let want = s * s / (1.0 + s * s);
        let e = rel(sol.critical_radius, want).max(rel(sol.linear_risk, want));
        c.expect(format!("rel_err@sigma={s}"), e, e <= 1e-10);
    }
    Ok(c)
}

fn random_model(rng: &mut ChaCha8Rng) -> Result<SemiAxisModel> {
    match rng.random_range(0..6) {
        0 => {
            let n = rng.random_range(1..60);
            SemiAxisModel::explicit((0..n).map(|_| rng.random_range(0.01..3.0)).collect())
        }
        1 => SemiAxisModel::polynomial(rng.random_range(0.5..2.0), rng.random_range(1.0..3.0)),
        2 => SemiAxisModel::exponential(rng.random_range(0.3..4.0)),
        3 => SemiAxisModel::exp_n_log_n(rng.random_range(0.5..5.0)),
        4 => {
            SemiAxisModel::poly_log(rng.random_range(0.5..2.0), rng.random_range(1.0..3.0), rng.random_range(-1.0..1.0))
        }
        _ => SemiAxisModel::finite_dim(rng.random_range(1..20), rng.random_range(0.1..2.0)),
    }
}

/// Up to three decades below `μ_*`, fewer for fast-growing counts so that
/// at most about `1e5` axes are involved.
fn random_eps(rng: &mut ChaCha8Rng, model: &SemiAxisModel) -> f64 {
    let depth = match model.elasticity_index() {
        Some(ElasticityIndex::Finite(b)) if b > 0.0 => (5.0 / b).min(3.0),
        _ => 3.0,
    };
    model.max_semi_axis() * 10f64.powf(-rng.random_range(0.01..depth))
}

fn integral_oracle(seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("2", "exact sum and quadrature agree to 1e-8 relative on 200 random points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = random_model(&mut rng)?;
        let tau = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
        let eps = random_eps(&mut rng, &m);
        let exact = integral_exact(&m, tau, eps)?.value;
        let quad = integral_quadrature(&m, tau, eps, 1e-11 * exact.abs().max(1e-300))?.value;
        let e = if exact == 0.0 { quad.abs() } else { rel(quad, exact) };
        worst = worst.max(e);
    }
    c.expect("max_rel_err", worst, worst <= 1e-8);
    Ok(c)
}

fn transfer(seed: u64) -> Result<CheckResult> {
    let mut c = CheckResult::new("3", "transfer identity residual within 1e-6 relative on 50 points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = random_model(&mut rng)?;
        let tau1 = rng.random_range(1.0..3.0);
        let tau2 = rng.random_range(1.0..4.0);
        let eps = random_eps(&mut rng, &m);
        let i1 = integral_on_axes(&m.truncate_at(eps)?, tau1, eps);
        if i1 == 0.0 {
            continue;
        }
        worst = worst.max((transfer_residual(&m, tau1, tau2, eps)? / i1).abs());
    }
    c.expect("max_rel_residual", worst, worst <= 1e-6);
    Ok(c)
}

fn entropy_checks() -> Result<CheckResult> {
    let mut c = CheckResult::new(
        "5",
        "polynomial entropy leading term, sandwich ordering, single-axis entropy inside the sandwich",
    );
    let p = SemiAxisModel::polynomial(1.0, 1.0)?;
    let eps = 1e-4;
    let ratio = integral_exact(&p, 1.0, eps)?.value * 1.0 / (1.0 * eps.powf(-1.0));
    c.expect("I1_ratio@1e-4", ratio, (0.98..=1.02).contains(&ratio));

    let suite = [
        SemiAxisModel::polynomial(1.0, 1.0)?,
        SemiAxisModel::polynomial(2.0, 0.5)?,
        SemiAxisModel::exponential(1.0)?,
        SemiAxisModel::exp_n_log_n(2.0)?,
        SemiAxisModel::finite_dim(5, 1.0)?,
    ];
    let mut ordered = 0.0;
    for m in &suite {
        for e in log_grid(m.max_semi_axis() * 0.9, m.max_semi_axis() * 1e-3, 20) {
            let (lo, hi) = mityagin_bounds(m, e)?;
            if lo > hi {
                ordered += 1.0;
            }
        }
    }
    c.expect("sandwich_violations", ordered, ordered == 0.0);

    let single = SemiAxisModel::explicit(vec![1.0])?;
    let mut outside = 0.0;
    for e in log_grid(0.999, 1e-6, 100) {
        let h = exact_entropy_single_axis(1.0, e);
        let (lo, hi) = mityagin_bounds(&single, e)?;
        if h < lo || h > hi {
            outside += 1.0;
        }
    }
    c.expect("single_axis_outside", outside, outside == 0.0);
    Ok(c)
}

fn risk_suite() -> Result<Vec<SemiAxisModel>> {
    Ok(vec![
        SemiAxisModel::explicit(vec![2.0, 1.0, 1.0, 0.3, 0.05])?,
        SemiAxisModel::finite_dim(7, 0.8)?,
        SemiAxisModel::exponential(1.5)?,
        SemiAxisModel::exp_n_log_n(3.0)?,
        SemiAxisModel::polynomial(1.0, 1.0)?,
        SemiAxisModel::polynomial(0.5, 2.5)?,
        SemiAxisModel::poly_log(1.0, 1.5, 0.5)?,
        SemiAxisModel::double_exp(1.0, 1.0, 1.0)?,
        SemiAxisModel::sobolev_box(vec![1.0, 2.0], 1)?,
    ])
}

const RISK_SIGMAS: [f64; 3] = [0.3, 0.03, 0.003];

fn risk_identities() -> Result<CheckResult> {
    let mut c = CheckResult::new("6", "first-order and variational identities at the solved critical radius");
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for m in risk_suite()? {
        for s in RISK_SIGMAS {
            let sol = linear_minimax_risk(&m, s)?;
            let w = pinsker_weights(&m, s, sol.support.max(1))?;
            let lin: f64 = s * s * w.iter().sum::<f64>();
            let quad: f64 = s * s * w.iter().map(|x| x * x).sum::<f64>() + sol.critical_radius.powi(2);
            w1 = w1.max(rel(lin, sol.linear_risk));
            w2 = w2.max(rel(quad, sol.linear_risk));
        }
    }
    c.expect("max_rel_err_first", w1, w1 <= 1e-8);
    c.expect("max_rel_err_second", w2, w2 <= 1e-8);
    Ok(c)
}

fn variational() -> Result<CheckResult> {
    let mut c = CheckResult::new("7", "critical-radius risk equals the variational minimum");
    let mut worst: f64 = 0.0;
    for m in risk_suite()? {
        for s in RISK_SIGMAS {
            let r = linear_minimax_risk(&m, s)?.linear_risk;
            worst = worst.max(rel(linear_risk_variational(&m, s)?, r));
        }
    }
    c.expect("max_rel_err", worst, worst <= 1e-8);
    Ok(c)
}

fn lambert() -> CheckResult {
    let mut c = CheckResult::new("10", "Lambert W residual on [1e-8, 1e8] and exact values at 0 and e");
    let worst = log_grid(1e-8, 1e8, 50)
        .into_iter()
        .map(|x| {
            let w = lambert_w(x);
            ((w * w.exp() - x) / x).abs()
        })
        .fold(0.0, f64::max);
    c.expect("max_rel_residual", worst, worst <= 1e-12);
    let at_e = (lambert_w(std::f64::consts::E) - 1.0).abs();
    c.expect("abs_err_at_e", at_e, at_e <= 1e-14);
    let at_0 = lambert_w(0.0).abs();
    c.expect("abs_err_at_0", at_0, at_0 <= 1e-14);
    c
}

fn pinsker_ratio() -> Result<CheckResult> {
    let mut c = CheckResult::new("4", "linear risk of 1/n over the Pinsker rate 3^(1/3) (sigma^2/2)^(2/3)");
    let m = SemiAxisModel::polynomial(1.0, 1.0)?;
    let ratio = |s: f64| -> Result<f64> {
        Ok(linear_minimax_risk(&m, s)?.linear_risk / (3f64.cbrt() * (s * s / 2.0).powf(2.0 / 3.0)))
    };
    let (r2, r3, r4) = (ratio(1e-2)?, ratio(1e-3)?, ratio(1e-4)?);
    c.measure("ratio@1e-2", r2);
    c.expect("ratio@1e-3", r3, (0.95..=1.05).contains(&r3));
    c.expect("ratio@1e-4", r4, (r4 - 1.0).abs() < (r2 - 1.0).abs());
    Ok(c)
}

fn bracket_shrinkage() -> Result<[CheckResult; 2]> {
    let m = SemiAxisModel::polynomial(1.0, 1.0)?;
    let mut dec = CheckResult::new("11a", "b_sigma strictly decreasing for 1/n over sigma = 1e-1..1e-4");
    let mut tight = CheckResult::new("11b", "bracket non-vacuous (b_sigma < 1) at sigma = 1e-4 for 1/n");
    let mut prev = f64::INFINITY;
    for s in [1e-1, 1e-2, 1e-3, 1e-4] {
        let b = linear_minimax_risk(&m, s)?.b_sigma;
        dec.expect(format!("b_sigma@{s}"), b, b < prev);
        prev = b;
    }
    tight.expect("b_sigma@1e-4", prev, prev < 1.0);
    Ok([dec, tight])
}

fn two_term() -> Result<CheckResult> {
    let mut c =
        CheckResult::new("13", "two-term risk beats one-term for M(eps) ~ eps^-2 + 0.5 eps^-1.5 at sigma = 1e-3");
    let s = 1e-3;
    let one = predict_linear_risk(&DecayFamily::Polynomial { c: 1.0, alpha: 2.0 }, s)?;
    let two = predict_risk_two_term(1.0, 2.0, 0.5, 1.5, s)?;
    // the critical radius sits well above one tenth of the leading prediction
    let floor = 0.1 * (s * s / 6.0).powf(0.25);
    let exact = linear_minimax_risk(&merged_polynomial_model(1.0, 2.0, 0.5, 1.5, floor)?, s)?.linear_risk;
    let (e1, e2) = (rel(one, exact), rel(two, exact));
    c.measure("one_term_rel_err", e1);
    c.expect("two_term_rel_err", e2, e2 < e1);
    Ok(c)
}

/// Model, family, quantity and grid endpoints of one trend check.
pub type SlowSweep = (SemiAxisModel, DecayFamily, Quantity, f64, f64);

/// Families whose predictions converge at a logarithmic rate, with the grids
/// used for the trend check.
pub fn slow_family_sweeps() -> Result<Vec<SlowSweep>> {
    let exp = DecayFamily::Exponential { c: 2.0 };
    let enl = DecayFamily::ExpNLogN { c: 10.0 };
    let dexp = DecayFamily::DoubleExp { c0: 1.0, c: 1.0, alpha: 1.0 };
    let mut out = Vec::new();
    for (fam, ent, risk) in
        [(exp, (1e-2, 1e-12), (1e-1, 1e-8)), (enl, (1e-2, 1e-128), (1e-1, 1e-64)), (dexp, (0.2, 0.07), (1e-1, 1e-3))]
    {
        let model = fam.to_model(0.0)?;
        out.push((model.clone(), fam, Quantity::Entropy, ent.0, ent.1));
        out.push((model, fam, Quantity::LinearRisk, risk.0, risk.1));
    }
    Ok(out)
}

fn slow_families(points: usize) -> Result<CheckResult> {
    let mut c =
        CheckResult::new("14", "slow families: ratio at the smallest parameter closer to 1 than at the largest");
    for (model, fam, q, start, stop) in slow_family_sweeps()? {
        let report =
            convergence_sweep(&model, &Prediction::new(q, fam, Order::Leading)?, &log_grid(start, stop, points))?;
        let tag = format!("{}/{}", family_label(&fam), if q == Quantity::Entropy { "entropy" } else { "linear_risk" });
        let first = report.rows.first().map_or(f64::NAN, |r| r.ratio);
        c.measure(format!("{tag}/ratio_first"), first);
        let last = report.rows.last().map_or(f64::NAN, |r| r.ratio);
        c.expect(format!("{tag}/ratio_last"), last, report.last_closer_than_first());
    }
    Ok(c)
}

fn family_label(f: &DecayFamily) -> &'static str {
    match f {
        DecayFamily::FiniteDim { .. } => "finite_dim",
        DecayFamily::Exponential { .. } => "exponential",
        DecayFamily::ExpNLogN { .. } => "exp_n_log_n",
        DecayFamily::Polynomial { .. } => "polynomial",
        DecayFamily::PolyLog { .. } => "poly_log",
        DecayFamily::DoubleExp { .. } => "double_exp",
        DecayFamily::PolynomialPair { .. } => "polynomial_pair",
    }
}

fn weyl(cap: usize) -> Result<CheckResult> {
    let mut c = CheckResult::new("8", "unit-square lattice count at s = 1e5 against the one- and two-term Weyl law");
    let dom = BoxDomain::unit(2)?;
    let s = 1e5;
    let n = eigenvalue_count(&dom, s, cap)? as f64;
    let one = weyl_counting(&dom, s, Order::Leading);
    let two = weyl_counting(&dom, s, Order::TwoTerm);
    c.measure("count", n);
    c.expect("rel_err_one_term", rel(n, one), rel(n, one) <= 0.03);
    c.expect("abs_err_two_term", (n - two).abs(), (n - two).abs() < (n - one).abs());
    Ok(c)
}

fn sobolev_pinsker(cap: usize) -> Result<CheckResult> {
    let mut c = CheckResult::new("9", "Sobolev k=1 on (0,1): linear risk over P_1 sigma^(4/3) at sigma = 1e-3");
    let s = 1e-3;
    let floor = 1e-4;
    let m = sobolev_semi_axes_capped(&BoxDomain::unit(1)?, 1, floor, cap)?;
    let sol = linear_minimax_risk(&m, s)?;
    if sol.critical_radius <= floor {
        return Err(Error::DomainError(format!(
            "critical radius {} fell below the truncation {floor}",
            sol.critical_radius
        )));
    }
    let ratio = sol.linear_risk / (pinsker_constant(1) * s.powf(4.0 / 3.0));
    c.expect("ratio", ratio, (0.95..=1.05).contains(&ratio));
    Ok(c)
}

fn monte_carlo(trials: u64, seed: u64) -> Result<CheckResult> {
    let mut c =
        CheckResult::new("12", "simulated MSE of the single-axis filter at sigma = 1 within 3 standard errors of 0.5");
    let m = SemiAxisModel::explicit(vec![1.0])?;
    let cfg = SimConfig::with_default_truncation(&m, 1.0, trials, seed)?;
    let x = densify(&worst_case_vector(&m, 1.0)?, cfg.n_trunc);
    let a = empirical_mse(&m, &x, &cfg)?;
    let b = empirical_mse(&m, &x, &cfg)?;
    c.measure("mean", a.mean);
    c.measure("std_error", a.std_error);
    let z = (a.mean - 0.5).abs() / a.std_error;
    c.expect("z_score", z, z <= 3.0);
    let same = a.mean.to_bits() == b.mean.to_bits() && a.std_error.to_bits() == b.std_error.to_bits();
    c.expect("rerun_identical", if same { 1.0 } else { 0.0 }, same);
    Ok(c)
}
