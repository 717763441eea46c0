//! First- and second-order tail approximations of `P(X₁ + … + X_d > u)`.
//!
//! The second-order term is a sum over ordered margin pairs `(j, i)`:
//!
//! ```text
//! (λᵢ/(βⱼγ)) · exp(cⱼ(1−σᵢⱼ²)βᵢ²/(2βⱼ²)) · (u/λⱼ)^{βᵢσᵢⱼ/βⱼ} · qⱼ(u)
//! ```
//!
//! where `qⱼ(u)` is `P(Xⱼ > u)/e*ⱼ(u)` in the limit form and the density of
//! `Xⱼ` at `u` in the density form. Every pair term is assembled in log space
//! and exponentiated once.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::ModelSpec;
use crate::numerics::ln_gamma;
use crate::radial::{RadialLaw, ScalingBundle};
use crate::real::{ln_sum_exp, Real};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `qⱼ = P(Xⱼ > u)/e*ⱼ(u)`.
    #[serde(alias = "limit")]
    LimitForm,
    /// `qⱼ = fⱼ(u)`.
    #[default]
    #[serde(alias = "density")]
    DensityForm,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::LimitForm => "limit_form",
            Variant::DensityForm => "density_form",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "limit" | "limit_form" => Ok(Variant::LimitForm),
            "density" | "density_form" => Ok(Variant::DensityForm),
            other => Err(Error::InvalidParams(format!(
                "unknown variant '{other}' (expected limit or density)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailApproximation<T> {
    pub u: T,
    pub first_order: T,
    pub log_first_order: T,
    /// Row-major `d × d`; entry `j·d + i` is the `(j, i)` pair term, zero on
    /// the diagonal.
    pub pair_terms: Vec<T>,
    /// Natural logs of `pair_terms` (`-∞` on the diagonal).
    pub log_pair_terms: Vec<T>,
    pub correction: T,
    pub log_correction: T,
    /// `first_order + correction`.
    pub second_order: T,
    pub log_second_order: T,
    pub variant: Variant,
}

impl<T: Real> TailApproximation<T> {
    pub fn dim(&self) -> usize {
        (self.pair_terms.len() as f64).sqrt().round() as usize
    }

    pub fn pair_term(&self, j: usize, i: usize) -> T {
        self.pair_terms[j * self.dim() + i]
    }
}

fn log_first_order<T: Real>(spec: &ModelSpec<T>, u: T) -> Result<T> {
    if !(u > T::zero()) {
        return Err(domain(format!("first-order approximation needs u > 0, got {u}")));
    }
    let logs = (0..spec.dim())
        .map(|j| spec.log_marginal_tail(j, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(ln_sum_exp(&logs))
}

/// `Σⱼ P(Xⱼ > u)`.
pub fn first_order<T: Real>(spec: &ModelSpec<T>, u: T) -> Result<T> {
    log_first_order(spec, u).map(T::exp)
}

/// ln qⱼ(u) for the chosen variant.
fn log_q<T: Real>(spec: &ModelSpec<T>, j: usize, u: T, variant: Variant) -> Result<T> {
    match variant {
        Variant::DensityForm => spec.log_marginal_pdf(j, u),
        Variant::LimitForm => Ok(spec.log_marginal_tail(j, u)? - spec.scaling().e_star(j, u)?.ln()),
    }
}

/// ln of the `(j, i)` pair term without its `qⱼ` factor.
fn log_pair_weight<T: Real>(bundle: &ScalingBundle<T>, sigma_ij: T, c_j: T, j: usize, i: usize, u: T) -> T {
    let (bi, bj) = (bundle.beta(i), bundle.beta(j));
    let half = T::lit(0.5);
    bundle.lambda(i).ln() - bundle.scale(j).ln()
        + c_j * (T::one() - sigma_ij * sigma_ij) * bi * bi / (bj * bj) * half
        + bi * sigma_ij / bj * (u / bundle.lambda(j)).ln()
}

/// Both approximations with every pair term retained.
pub fn approximate<T: Real>(spec: &ModelSpec<T>, u: T, variant: Variant) -> Result<TailApproximation<T>> {
    let d = spec.dim();
    let log_first = log_first_order(spec, u)?;
    let mut log_pairs = vec![T::neg_infinity(); d * d];
    if d > 1 {
        let bundle = spec.scaling();
        for j in 0..d {
            let c_j = bundle.c_limit(j)?;
            let lq = log_q(spec, j, u, variant)?;
            for i in (0..d).filter(|&i| i != j) {
                log_pairs[j * d + i] = log_pair_weight(bundle, spec.sigma().get(i, j), c_j, j, i, u) + lq;
            }
        }
    }
    let log_correction = ln_sum_exp(&log_pairs);
    let first_order = log_first.exp();
    let correction = log_correction.exp();
    Ok(TailApproximation {
        u,
        first_order,
        log_first_order: log_first,
        pair_terms: log_pairs.iter().map(|l| l.exp()).collect(),
        log_pair_terms: log_pairs,
        correction,
        log_correction,
        second_order: first_order + correction,
        log_second_order: ln_sum_exp(&[log_first, log_correction]),
        variant,
    })
}

/// The second-order correction alone.
pub fn second_order_correction<T: Real>(spec: &ModelSpec<T>, u: T, variant: Variant) -> Result<T> {
    approximate(spec, u, variant).map(|a| a.correction)
}

/// ln of the closed-form log-normal correction (`-∞` for d = 1).
pub fn log_lognormal_correction<T: Real>(spec: &ModelSpec<T>, u: T) -> Result<T> {
    if !spec.is_lognormal() {
        return Err(Error::WrongRadialLaw {
            required: format!("chi({})", spec.dim()),
            actual: spec.radial().to_string(),
        });
    }
    if !(u > T::zero()) {
        return Err(domain(format!("log-normal correction needs u > 0, got {u}")));
    }
    let d = spec.dim();
    let two = T::lit(2.0);
    let mut logs = Vec::with_capacity(d * d);
    for j in 0..d {
        let sj = spec.scaling().scale(j);
        let lj = (u / spec.lambda(j)).ln();
        for i in (0..d).filter(|&i| i != j) {
            let s = spec.sigma().get(i, j);
            let si = spec.scaling().scale(i);
            logs.push(
                spec.lambda(i).ln() - two * sj.ln()
                    + si * si * (T::one() - s * s) / two
                    + spec.beta(i) * s / spec.beta(j) * lj
                    - lj * lj / (two * sj * sj)
                    - u.ln()
                    - T::lit(HALF_LN_2PI),
            );
        }
    }
    Ok(ln_sum_exp(&logs))
}

/// Closed-form correction for log-normal margins.
pub fn lognormal_correction<T: Real>(spec: &ModelSpec<T>, u: T) -> Result<T> {
    log_lognormal_correction(spec, u).map(T::exp)
}

/// ln of `d(d−1)·exp((1−ρ²)/2)·u^{ρ−1}·exp(−(ln u)²/2)/√(2π)` (`-∞` for d = 1).
pub fn log_equicorrelated_correction<T: Real>(d: usize, rho: T, u: T) -> Result<T> {
    if d == 0 {
        return Err(domain("equicorrelated correction needs d >= 1"));
    }
    if !(rho.abs() < T::one()) {
        return Err(domain(format!("equicorrelated correction needs |rho| < 1, got {rho}")));
    }
    if !(u > T::one()) {
        return Err(domain(format!("equicorrelated correction needs u > 1, got {u}")));
    }
    if d == 1 {
        return Ok(T::neg_infinity());
    }
    let lu = u.ln();
    let half = T::lit(0.5);
    Ok(T::lit((d * (d - 1)) as f64).ln() + (T::one() - rho * rho) * half
        - (T::one() - rho) * lu
        - lu * lu * half
        - T::lit(HALF_LN_2PI))
}

/// Correction for standard margins and equal correlations `ρ`.
pub fn equicorrelated_correction<T: Real>(d: usize, rho: T, u: T) -> Result<T> {
    log_equicorrelated_correction(d, rho, u).map(T::exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularLemmaCheck<T> {
    pub integral: T,
    pub asymptotic: T,
    /// `integral / asymptotic`.
    pub ratio: T,
    pub log_integral: T,
    pub log_asymptotic: T,
}

/// Compares `∫₀¹ P(λ e^{Rθβγ} > u) h(θ) dθ` (adaptive quadrature) with
/// `2^{(d−3)/2} Γ(d/2)/√π · (e*(u)/(u ln u))^{(d−1)/2} · P(λ e^{Rβγ} > u)`.
pub fn verify_angular_lemma<T: Real>(
    law: RadialLaw<T>,
    lambda: T,
    beta: T,
    gamma: T,
    d: usize,
    u: T,
) -> Result<AngularLemmaCheck<T>> {
    if d < 2 {
        return Err(domain(format!("angular lemma needs d >= 2, got {d}")));
    }
    let bundle = ScalingBundle::single(law, d, lambda, beta, gamma)?;
    let log_integral = bundle.log_margin_tail_quadrature(0, u)?;
    let e_star = bundle.e_star(0, u)?;
    let two = T::lit(2.0);
    let dm = T::lit(d as f64);
    let log_asymptotic = (dm - T::lit(3.0)) / two * two.ln() + ln_gamma(dm / two)? - T::PI().sqrt().ln()
        + (dm - T::one()) / two * (e_star / (u * u.ln())).ln()
        + law.log_tail((u / lambda).ln() / bundle.scale(0));
    Ok(AngularLemmaCheck {
        integral: log_integral.exp(),
        asymptotic: log_asymptotic.exp(),
        ratio: (log_integral - log_asymptotic).exp(),
        log_integral,
        log_asymptotic,
    })
}
