//! Finite-threshold quality measures and assembled table rows.

use rayon::prelude::*;

use crate::asymptotics::{approximate, Variant};
use crate::error::{domain, Error, Result};
use crate::model::ModelSpec;
use crate::montecarlo::{mc_table, McOptions};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow<T> {
    pub u: T,
    pub asympt1: T,
    pub asympt2: T,
    /// NaN when no Monte Carlo run was requested.
    pub mc: T,
    pub mc_stderr: T,
    /// `mc / asympt1`.
    pub ratio1: T,
    /// `mc / asympt2`.
    pub ratio2: T,
    pub epsilon: T,
    pub exp_epsilon: T,
    pub rho_hat: T,
}

/// `1 − ln(u/e*ⱼ(u))/ln u`, the correlation at which `e*ⱼ(u) = u^ρ̂`.
pub fn rho_hat<T: Real>(spec: &ModelSpec<T>, j: usize, u: T) -> Result<T> {
    if !(u > T::one() && u > spec.lambda(j)) {
        return Err(domain(format!(
            "rho_hat needs u > max(1, lambda_{j}) = {}, got {u}",
            spec.lambda(j).max(T::one())
        )));
    }
    let e = spec.scaling().e_star(j, u)?;
    Ok(T::one() - (u / e).ln() / u.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonMeasure<T> {
    pub epsilon: T,
    pub exp_epsilon: T,
}

/// Solves `ρ + c√(1−ρ²)√(1/θ² − 1) = (βⱼ/βᵢ)·ln(ε e*ᵢ(u))/ln u` for ε, with
/// `ρ = σᵢⱼ` and `θ = ln u / ln(u + e(u))`.
pub fn epsilon_measure<T: Real>(spec: &ModelSpec<T>, i: usize, j: usize, u: T, c: T) -> Result<EpsilonMeasure<T>> {
    if !(u > T::one()) {
        return Err(domain(format!("epsilon measure needs u > 1, got {u}")));
    }
    let rho = spec.sigma().get(i, j);
    if !(rho.abs() < T::one()) {
        return Err(domain(format!("epsilon measure needs |sigma_{i}{j}| < 1, got {rho}")));
    }
    let bundle = spec.scaling();
    let ln_u = u.ln();
    let theta = ln_u / (u + bundle.e(u)?).ln();
    let spread = ((T::one() - rho * rho) * (T::one() / (theta * theta) - T::one())).sqrt();
    let log_eps = bundle.beta(i) / bundle.beta(j) * ln_u * (rho + c * spread) - bundle.e_star(i, u)?.ln();
    let epsilon = log_eps.exp();
    Ok(EpsilonMeasure {
        epsilon,
        exp_epsilon: epsilon.exp(),
    })
}

/// Out-of-domain diagnostics become NaN so the rest of the row survives.
fn or_nan<T: Real>(r: Result<T>) -> Result<T> {
    match r {
        Err(Error::Domain(_)) => Ok(T::nan()),
        other => other,
    }
}

/// One row per threshold. The second-order column uses the density form;
/// ε uses the pair `(i, j) = (1, 0)` and NaN for d = 1.
pub fn build_table<T: Real>(
    spec: &ModelSpec<T>,
    u_list: &[T],
    mc: Option<&McOptions>,
    c: T,
) -> Result<Vec<DiagnosticsRow<T>>> {
    if u_list.is_empty() {
        return Err(Error::EmptyInput("u_list"));
    }
    let mut rows = u_list
        .par_iter()
        .map(|&u| {
            let a = approximate(spec, u, Variant::DensityForm)?;
            let eps = if spec.dim() > 1 {
                or_nan(epsilon_measure(spec, 1, 0, u, c).map(|e| e.epsilon))?
            } else {
                T::nan()
            };
            Ok(DiagnosticsRow {
                u,
                asympt1: a.first_order,
                asympt2: a.second_order,
                mc: T::nan(),
                mc_stderr: T::nan(),
                ratio1: T::nan(),
                ratio2: T::nan(),
                epsilon: eps,
                exp_epsilon: eps.exp(),
                rho_hat: or_nan(rho_hat(spec, 0, u))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(opts) = mc {
        for (row, est) in rows.iter_mut().zip(mc_table(spec, u_list, opts)?) {
            row.mc = est.value;
            row.mc_stderr = est.stderr;
            row.ratio1 = est.value / row.asympt1;
            row.ratio2 = est.value / row.asympt2;
        }
    }
    Ok(rows)
}
