//! Tail probabilities of sums of dependent log-elliptical risks.
//!
//! For `X = (λ₁ Z₁^{β₁γ}, …, λ_d Z_d^{β_dγ})` with `Z = exp(R·A·U)` this crate
//! evaluates the first-order approximation `P(ΣXⱼ > u) ≈ Σ P(Xⱼ > u)`, the
//! second-order correction for radial laws in the Gumbel max-domain of
//! attraction, and unbiased rare-event Monte Carlo estimates to check both.
//!
//! Everything numerical is generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix the scalar to `f64`, which is what the tables and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]
pub mod asymptotics;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod radial;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type CorrelationMatrix = numerics::CorrelationMatrix<f64>;
pub type RadialLaw = radial::RadialLaw<f64>;
pub type ScalingBundle = radial::ScalingBundle<f64>;
pub type ModelParams = model::ModelParams<f64>;
pub type ModelSpec = model::ModelSpec<f64>;
pub type SampleBatch = model::SampleBatch<f64>;
pub type TailApproximation = asymptotics::TailApproximation<f64>;
pub type McEstimate = montecarlo::McEstimate<f64>;
pub type DiagnosticsRow = diagnostics::DiagnosticsRow<f64>;

pub use asymptotics::Variant;
pub use montecarlo::{Estimator, McOptions};
pub use radial::RadialKind;
