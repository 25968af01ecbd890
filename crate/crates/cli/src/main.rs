//! `ellipsoid-lab` command-line tool.
//!
//! Exit status: 0 on success, 1 for invalid input (arguments, config, model),
//! 2 for numerical failures and failed verification suites. Errors are
//! reported on stderr as `{"error":{"code":..,"message":..}}`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use ellipsoid_lab::asymptotics::{convergence_sweep, DecayFamily, Order, Prediction, Quantity};
use ellipsoid_lab::entropy::entropy_estimate;
use ellipsoid_lab::integrals::{integral_exact, integral_quadrature};
use ellipsoid_lab::risk::{linear_minimax_risk, linear_minimax_risk_with_tol, DEFAULT_TOL};
use ellipsoid_lab::sim::{densify, empirical_mse, worst_case_vector, SimConfig, GUARD_COORDINATES};
use ellipsoid_lab::sobolev::{
    axis_from_eigenvalue, dirichlet_eigenvalues_capped, sobolev_risk_prediction, sobolev_semi_axes_capped, BoxDomain,
    DEFAULT_EIGEN_CAP,
};
use ellipsoid_lab::verify::{run_suite, Suite, VerifyOptions};
use ellipsoid_lab::{Error, IntegralResult, SemiAxisModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use args::{required, Cli, Command, Format, MethodArg, OrderArg, QuantityArg, SuiteArg};
use report::Report;

pub const THREADS_ENV: &str = "ELLIPSOID_LAB_THREADS";

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    fn new(code: &str, message: String, exit: u8) -> Self {
        CliError { code: code.into(), message, exit }
    }

    pub fn invalid(message: String) -> Self {
        Self::new("INVALID_ARGUMENT", message, 1)
    }

    pub fn config(message: String) -> Self {
        Self::new("CONFIG", message, 1)
    }

    pub fn io(message: String) -> Self {
        Self::new("IO", message, 1)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = if e.is_numerical() { 2 } else { 1 };
        CliError::new(e.code(), e.to_string(), exit)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::new("USAGE", e.render().to_string().trim().to_string(), 1)),
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", json!({ "error": { "code": e.code, "message": e.message } }));
    ExitCode::from(e.exit)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot start {n} worker threads: {e}")))
}

fn load_config(path: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::config("config file must hold a JSON object".into())),
        Err(e) => Err(CliError::config(format!("config file is not valid JSON: {e}"))),
    }
}

/// Inline JSON (starting with `{`) or a path to a JSON file.
fn json_source(source: &str, what: &str) -> Result<String, CliError> {
    if source.trim_start().starts_with('{') {
        return Ok(source.to_string());
    }
    std::fs::read_to_string(source).map_err(|e| CliError::io(format!("cannot read {what} file {source}: {e}")))
}

fn load_model(source: Option<String>) -> Result<SemiAxisModel, CliError> {
    let text = json_source(&required(source, "model")?, "model")?;
    if let Err(e) = serde_json::from_str::<Value>(&text) {
        return Err(CliError::new("MODEL_PARSE", format!("model is not valid JSON: {e}"), 1));
    }
    SemiAxisModel::from_json(&text).map_err(|e| match e {
        Error::InvalidModel(m) => CliError::new("MODEL_PARSE", m, 1),
        other => other.into(),
    })
}

fn load_family(source: String) -> Result<DecayFamily, CliError> {
    let text = json_source(&source, "family")?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("FAMILY_PARSE", format!("family is not a valid decay family: {e}"), 1))
}

/// Either a single parameter or a grid, never both.
fn single_or_grid(single: Option<f64>, grid: &args::GridArgs, name: &str) -> Result<Vec<f64>, CliError> {
    match (single, grid.is_set()) {
        (Some(v), false) => Ok(vec![v]),
        (None, true) => grid.values(),
        (Some(_), true) => Err(CliError::invalid(format!("give either --{name} or a grid, not both"))),
        (None, false) => {
            Err(CliError::invalid(format!("missing --{name} or grid options (--start, --stop, --points)")))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(cli.config.as_deref())?;
    let output = match (&cli.output, config.get("output")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(Value::String(p))) => Some(p.into()),
        (None, Some(_)) => return Err(CliError::config("output must be a string".into())),
        (None, None) => None,
    };
    let format = match (cli.format, config.get("format")) {
        (Some(f), _) => Some(f),
        (None, Some(v)) => Some(
            serde_json::from_value::<Format>(v.clone()).map_err(|e| CliError::config(format!("bad format: {e}")))?,
        ),
        (None, None) => None,
    };
    let format = report::resolve_format(output.as_deref(), format)?;
    let (bytes, verdict) = match cli.command {
        Command::Integrals(a) => (integrals(args::merge(a, &config)?, format)?, Ok(())),
        Command::Entropy(a) => (entropy(args::merge(a, &config)?, format)?, Ok(())),
        Command::Risk(a) => (risk(args::merge(a, &config)?, format)?, Ok(())),
        Command::RiskSweep(a) => (risk_sweep(args::merge(a, &config)?, format)?, Ok(())),
        Command::Asymptotics(a) => (asymptotics(args::merge(a, &config)?, format)?, Ok(())),
        Command::Sobolev(a) => (sobolev(args::merge(a, &config)?, format)?, Ok(())),
        Command::Simulate(a) => (simulate(args::merge(a, &config)?, format)?, Ok(())),
        Command::Verify(a) => verify(args::merge(a, &config)?, format)?,
    };
    report::emit(&bytes, output.as_deref())?;
    verdict
}

fn integrals(a: args::IntegralsArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let model = load_model(a.model)?;
    let tau = required(a.tau, "tau")?;
    let single = a.eps.is_some();
    let grid = single_or_grid(a.eps, &a.grid, "eps")?;
    let method = a.method.unwrap_or_default();
    let tol = a.tol.unwrap_or(1e-12);
    let rows: Vec<IntegralResult> = grid
        .par_iter()
        .map(|&eps| match method {
            MethodArg::Exact => integral_exact(&model, tau, eps),
            MethodArg::Quadrature => integral_quadrature(&model, tau, eps, tol),
        })
        .collect::<Result<_, _>>()?;
    if single {
        report::single(rows[0]).render(format)
    } else {
        report::rows(rows).render(format)
    }
}

fn entropy(a: args::EntropyArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let model = load_model(a.model)?;
    let single = a.eps.is_some();
    let grid = single_or_grid(a.eps, &a.grid, "eps")?;
    let rows: Vec<_> = grid.par_iter().map(|&eps| entropy_estimate(&model, eps)).collect::<Result<_, _>>()?;
    if single {
        report::single(rows[0]).render(format)
    } else {
        report::rows(rows).render(format)
    }
}

fn risk(a: args::RiskArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let model = load_model(a.model)?;
    let sigma = required(a.sigma, "sigma")?;
    let sol = linear_minimax_risk_with_tol(&model, sigma, a.tol.unwrap_or(DEFAULT_TOL))?;
    report::single(sol).render(format)
}

/// One row of a risk sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub sigma: f64,
    pub critical_radius: f64,
    pub linear_risk: f64,
    pub bracket_low: f64,
    pub bracket_high: f64,
    pub b_sigma: f64,
    pub vacuous: bool,
}

fn risk_sweep(a: args::RiskSweepArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let model = load_model(a.model)?;
    let grid = a.grid.values()?;
    let rows: Vec<RiskRow> = grid
        .par_iter()
        .map(|&sigma| {
            linear_minimax_risk(&model, sigma).map(|s| RiskRow {
                sigma,
                critical_radius: s.critical_radius,
                linear_risk: s.linear_risk,
                bracket_low: s.bracket_low,
                bracket_high: s.bracket_high,
                b_sigma: s.b_sigma,
                vacuous: s.vacuous,
            })
        })
        .collect::<Result<_, _>>()?;
    report::rows(rows).render(format)
}

fn asymptotics(a: args::AsymptoticsArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let (family, model) = match (a.family, a.model) {
        (Some(f), None) => {
            let family = load_family(f)?;
            let model = family.to_model(a.floor.unwrap_or(1e-6))?;
            (family, model)
        }
        (None, Some(m)) => {
            let model = load_model(Some(m))?;
            (DecayFamily::from_model(&model)?, model)
        }
        (Some(_), Some(_)) => return Err(CliError::invalid("give either --family or --model, not both".into())),
        (None, None) => return Err(CliError::invalid("missing --family or --model".into())),
    };
    let quantity = match required(a.quantity, "quantity")? {
        QuantityArg::Entropy => Quantity::Entropy,
        QuantityArg::LinearRisk => Quantity::LinearRisk,
        QuantityArg::CriticalRadius => Quantity::CriticalRadius,
        QuantityArg::NonlinearRisk => Quantity::NonlinearRisk,
    };
    let order = match a.order {
        Some(OrderArg::TwoTerm) => Order::TwoTerm,
        _ => Order::Leading,
    };
    let prediction = Prediction::new(quantity, family, order)?;
    let sweep = convergence_sweep(&model, &prediction, &a.grid.values()?)?;
    let rows = sweep.rows.clone();
    Report { json: sweep, rows }.render(format)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub semi_axis: f64,
}

/// Exact and predicted linear risk of a Sobolev ellipsoid on a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevRiskRow {
    pub sigma: f64,
    pub k: u32,
    pub critical_radius: f64,
    pub linear_risk: f64,
    pub predicted_leading: f64,
    pub predicted_two_term: f64,
    pub kappa: f64,
    pub k1: f64,
    pub k2: f64,
    pub pinsker: Option<f64>,
}

fn sobolev(a: args::SobolevArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let domain = BoxDomain::new(required(a.lengths, "lengths")?)?;
    let k = required(a.k, "k")?;
    if k == 0 {
        return Err(CliError::invalid("--k must be at least 1".into()));
    }
    let cap = a.cap.unwrap_or(DEFAULT_EIGEN_CAP);
    match (a.s_max, a.sigma) {
        (Some(s_max), None) => {
            let rows: Vec<SpectrumRow> = dirichlet_eigenvalues_capped(&domain, s_max, cap)?
                .into_iter()
                .enumerate()
                .map(|(i, ev)| SpectrumRow { index: i + 1, eigenvalue: ev, semi_axis: axis_from_eigenvalue(ev, k) })
                .collect();
            report::rows(rows).render(format)
        }
        (None, Some(sigma)) => {
            let (leading, consts) = sobolev_risk_prediction(&domain, k, sigma, Order::Leading)?;
            let (two, _) = sobolev_risk_prediction(&domain, k, sigma, Order::TwoTerm)?;
            // ε_σ² ≤ R_L, so the square root of a risk bound is a safe start
            let mut floor = 0.5 * leading.sqrt().min(1.0);
            let sol = loop {
                let model = sobolev_semi_axes_capped(&domain, k, floor, cap)?;
                let sol = linear_minimax_risk(&model, sigma)?;
                if sol.critical_radius > floor {
                    break sol;
                }
                floor *= 0.5;
            };
            let row = SobolevRiskRow {
                sigma,
                k,
                critical_radius: sol.critical_radius,
                linear_risk: sol.linear_risk,
                predicted_leading: leading,
                predicted_two_term: two,
                kappa: consts.kappa,
                k1: consts.k1,
                k2: consts.k2,
                pinsker: consts.pinsker,
            };
            report::single(row).render(format)
        }
        (Some(_), Some(_)) => Err(CliError::invalid("give either --s-max or --sigma, not both".into())),
        (None, None) => Err(CliError::invalid("missing --s-max (spectrum) or --sigma (risk)".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub sigma: f64,
    pub seed: u64,
    pub n_trunc: usize,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub tail_bias: f64,
}

fn simulate(a: args::SimulateArgs, format: Format) -> Result<Vec<u8>, CliError> {
    let model = load_model(a.model)?;
    let sigma = required(a.sigma, "sigma")?;
    let trials = a.trials.unwrap_or(100_000);
    let seed = a.seed.unwrap_or(0);
    let n_trunc = match a.n_trunc {
        Some(n) => n,
        None => linear_minimax_risk(&model, sigma)?.support + GUARD_COORDINATES,
    };
    let cfg = SimConfig { sigma, trials, seed, n_trunc };
    let x = densify(&worst_case_vector(&model, sigma)?, n_trunc);
    let est = empirical_mse(&model, &x, &cfg)?;
    report::single(SimulationRow {
        sigma,
        seed,
        n_trunc,
        trials,
        mean: est.mean,
        std_error: est.std_error,
        analytic: est.analytic,
        tail_bias: est.tail_bias,
    })
    .render(format)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub suite: String,
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub measurement: String,
    pub value: f64,
}

fn verify(a: args::VerifyArgs, format: Format) -> Result<(Vec<u8>, Result<(), CliError>), CliError> {
    let suite = match required(a.suite, "suite")? {
        SuiteArg::Core => Suite::Core,
        SuiteArg::Asymptotics => Suite::Asymptotics,
        SuiteArg::Sobolev => Suite::Sobolev,
        SuiteArg::Montecarlo => Suite::MonteCarlo,
    };
    let d = VerifyOptions::default();
    let opts = VerifyOptions {
        eigen_cap: a.eigen_cap.unwrap_or(d.eigen_cap),
        mc_trials: a.trials.unwrap_or(d.mc_trials),
        seed: a.seed.unwrap_or(d.seed),
        grid_points: a.points.unwrap_or(d.grid_points),
    };
    if opts.mc_trials == 0 {
        return Err(CliError::invalid("--trials must be at least 1".into()));
    }
    if opts.grid_points < 2 {
        return Err(CliError::invalid("--points must be at least 2".into()));
    }
    let report = run_suite(suite, &opts).map_err(|e| {
        // any error inside a suite means the suite could not be completed
        let mut c = CliError::from(e);
        c.exit = 2;
        c
    })?;
    let rows: Vec<CheckRow> = report
        .checks
        .iter()
        .flat_map(|c| {
            c.measured.iter().map(move |m| CheckRow {
                suite: suite.name().into(),
                id: c.id.clone(),
                description: c.description.clone(),
                passed: c.passed,
                measurement: m.name.clone(),
                value: m.value,
            })
        })
        .collect();
    let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.clone()).collect();
    let verdict = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new("VERIFY_FAILED", format!("suite {suite} failed criteria {}", failed.join(", ")), 2))
    };
    Ok((Report { json: report, rows }.render(format)?, verdict))
}
