//! Every report type re-parses from its JSON form to an equal value.

use ellipsoid_lab::asymptotics::{convergence_sweep, log_grid, DecayFamily, Order, Prediction, Quantity};
use ellipsoid_lab::entropy::entropy_estimate;
use ellipsoid_lab::integrals::integral_quadrature;
use ellipsoid_lab::risk::{linear_minimax_risk, nonlinear_risk_bracket};
use ellipsoid_lab::sim::{empirical_mse, SimConfig};
use ellipsoid_lab::verify::{run_suite, Suite, SuiteReport, VerifyOptions};
use ellipsoid_lab::{
    ElasticityIndex, EntropyBounds, IntegralResult, MseEstimate, PinskerSolution, SemiAxisModel, SweepReport,
};
use proptest::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, v, "{text}");
}

fn models() -> Vec<SemiAxisModel> {
    vec![
        SemiAxisModel::explicit(vec![0.1 + 0.2, 1.0 / 3.0, 1e-300]).unwrap(),
        SemiAxisModel::finite_dim(3, 0.7).unwrap(),
        SemiAxisModel::exponential(1.1).unwrap(),
        SemiAxisModel::exp_n_log_n(0.9).unwrap(),
        SemiAxisModel::polynomial(std::f64::consts::PI, 1.7).unwrap(),
        SemiAxisModel::poly_log(1.0, 2.0, -0.5).unwrap(),
        SemiAxisModel::double_exp(1.0, 2.0, 0.5).unwrap(),
        SemiAxisModel::sobolev_box(vec![1.0, 0.5], 2).unwrap(),
        SemiAxisModel::polynomial(1.0, 1.0).unwrap().scaled(0.25).unwrap(),
        SemiAxisModel::exponential(1.0).unwrap().with_elasticity_index(Some(ElasticityIndex::Infinite)),
    ]
}

#[test]
fn models_round_trip() {
    for m in models() {
        round_trip(&m);
        assert_eq!(SemiAxisModel::from_json(&m.to_json()).unwrap(), m);
    }
}

#[test]
fn reports_round_trip() {
    let m = SemiAxisModel::polynomial(1.0, 1.0).unwrap();
    let p: PinskerSolution = linear_minimax_risk(&m, 0.037).unwrap();
    round_trip(&p);
    round_trip(&nonlinear_risk_bracket(&m, 0.037).unwrap());
    let i: IntegralResult = integral_quadrature(&m, 1.5, 0.013, 1e-12).unwrap();
    round_trip(&i);
    let e: EntropyBounds = entropy_estimate(&m, 0.013).unwrap();
    round_trip(&e);
    let cfg = SimConfig { sigma: 0.2, trials: 1000, seed: 1, n_trunc: 20 };
    let x = vec![0.3, 0.1];
    let s: MseEstimate = empirical_mse(&m, &x, &cfg).unwrap();
    round_trip(&s);
    round_trip(&cfg);
    let fam = DecayFamily::Polynomial { c: 1.0, alpha: 1.0 };
    let sweep: SweepReport = convergence_sweep(
        &m,
        &Prediction::new(Quantity::LinearRisk, fam, Order::Leading).unwrap(),
        &log_grid(1e-3, 1e-1, 4),
    )
    .unwrap();
    round_trip(&sweep);
    let r: SuiteReport = run_suite(Suite::Sobolev, &VerifyOptions::default()).unwrap();
    round_trip(&r);
}

proptest! {
    #[test]
    fn explicit_models_round_trip(values in prop::collection::vec(1e-200f64..1e200, 1..30)) {
        let m = SemiAxisModel::explicit(values).unwrap();
        prop_assert_eq!(SemiAxisModel::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn risk_reports_round_trip(sigma in 1e-4f64..1.0, alpha in 0.5f64..3.0) {
        let m = SemiAxisModel::polynomial(1.0, alpha).unwrap();
        let p = linear_minimax_risk(&m, sigma).unwrap();
        let back: PinskerSolution = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(back, p);
    }
}
