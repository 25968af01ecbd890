//! Quantitative compactness of ℓ² ellipsoids.
//!
//! Given the semi-axes `μ_1 ≥ μ_2 ≥ … ≥ 0` of an ellipsoid, this crate computes
//! the counting function `M(ε)`, type-τ integrals, metric-entropy bounds, the
//! exact linear minimax risk in the Gaussian sequence model with its critical
//! radius and Pinsker weights, and the Lambert-W bracket on the nonlinear
//! risk. It also provides closed-form asymptotic predictions for the standard
//! decay families and for Sobolev ellipsoids on boxes, and a Monte Carlo
//! check of the linear risk.
//!
//! ```
//! use ellipsoid_lab::{risk, SemiAxisModel};
//!
//! let model = SemiAxisModel::explicit(vec![1.0]).unwrap();
//! let sol = risk::linear_minimax_risk(&model, 1.0).unwrap();
//! assert!((sol.linear_risk - 0.5).abs() < 1e-12);
//! ```

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod entropy;
pub mod error;
pub mod integrals;
pub mod numeric;
pub mod risk;
pub mod semiaxes;
pub mod sim;
pub mod sobolev;
pub mod verify;

pub use asymptotics::{DecayFamily, Order, Prediction, Quantity, SweepReport, SweepRow};
pub use entropy::EntropyBounds;
pub use error::{Error, Result};
pub use integrals::{IntegralResult, Method};
pub use risk::PinskerSolution;
pub use semiaxes::{ElasticityIndex, ModelKind, SemiAxisModel};
pub use sim::{MseEstimate, SimConfig};
pub use sobolev::{BoxDomain, SpectralConstants};
