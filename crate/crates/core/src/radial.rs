//! Radial laws in the Gumbel max-domain of attraction and the scaling
//! functions they induce on the log-elliptical margins.
//!
//! A radial law `R` comes with its Gumbel scaling function `b`, so that
//! `P(R > r + x b(r)) / P(R > r) → e^{-x}`. For `exp(R)` the scaling is
//! `e(u) = u·b(ln u)`, and for the margin `Xⱼ = λⱼ exp(βⱼγ R Θⱼ)` it is
//!
//! ```text
//! e*ⱼ(u) = βⱼγ · u · e(v) / v,   v = (u/λⱼ)^{1/(βⱼγ)}
//!        = βⱼγ · u · b(ln(u/λⱼ) / (βⱼγ)).
//! ```
//!
//! The probes at the bottom of the module evaluate the asymptotic conditions
//! at finite thresholds and return the raw numbers; callers decide what to
//! assert.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{
    integrate, ln_incomplete_gamma, log_std_normal_cdf, log_std_normal_pdf, log_std_normal_tail, sphere_angle_density,
    CorrelationMatrix, QuadratureOptions,
};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialKind {
    /// `R = √χ²_k`; with `k = d` the risk vector is multivariate log-normal.
    #[serde(alias = "chi")]
    ChiOfDim,
    /// `P(R > r) = exp(-(r/scale)^τ)`.
    #[serde(alias = "weibull")]
    WeibullTail,
    /// `ln R ~ N(0, σ²)`.
    #[serde(alias = "lognormal")]
    LognormalLogRadius,
}

impl RadialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RadialKind::ChiOfDim => "chi_of_dim",
            RadialKind::WeibullTail => "weibull_tail",
            RadialKind::LognormalLogRadius => "lognormal_log_radius",
        }
    }
}

impl fmt::Display for RadialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RadialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chi_of_dim" | "chi" => Ok(RadialKind::ChiOfDim),
            "weibull_tail" | "weibull" => Ok(RadialKind::WeibullTail),
            "lognormal_log_radius" | "lognormal" => Ok(RadialKind::LognormalLogRadius),
            other => Err(Error::InvalidParams(format!("unknown radial kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialLaw<T> {
    ChiOfDim { dim: u32 },
    WeibullTail { tau: T, scale: T },
    LognormalLogRadius { sigma: T },
}

/// Builds a radial law from its kind and positional parameters:
/// `ChiOfDim: [d]`, `WeibullTail: [τ, scale = 1]`, `LognormalLogRadius: [σ = 1]`.
pub fn make_radial<T: Real>(kind: RadialKind, params: &[T]) -> Result<RadialLaw<T>> {
    let bad = |msg: String| Err(Error::InvalidParams(msg));
    match kind {
        RadialKind::ChiOfDim => {
            let [d] = params else {
                return bad(format!("chi_of_dim takes one parameter (d), got {}", params.len()));
            };
            let df = d.to_f64_lossy();
            if !(df >= 1.0) || df.fract() != 0.0 || df > u32::MAX as f64 {
                return bad(format!("chi_of_dim needs an integer d >= 1, got {d}"));
            }
            Ok(RadialLaw::ChiOfDim { dim: df as u32 })
        }
        RadialKind::WeibullTail => {
            let (tau, scale) = match params {
                [tau] => (*tau, T::one()),
                [tau, scale] => (*tau, *scale),
                _ => {
                    return bad(format!(
                        "weibull_tail takes [tau] or [tau, scale], got {} values",
                        params.len()
                    ))
                }
            };
            if !(tau > T::zero() && tau.is_finite()) {
                return bad(format!("weibull_tail needs tau > 0, got {tau}"));
            }
            if !(scale > T::zero() && scale.is_finite()) {
                return bad(format!("weibull_tail needs scale > 0, got {scale}"));
            }
            Ok(RadialLaw::WeibullTail { tau, scale })
        }
        RadialKind::LognormalLogRadius => {
            let sigma = match params {
                [] => T::one(),
                [s] => *s,
                _ => {
                    return bad(format!(
                        "lognormal_log_radius takes [sigma], got {} values",
                        params.len()
                    ))
                }
            };
            if !(sigma > T::zero() && sigma.is_finite()) {
                return bad(format!("lognormal_log_radius needs sigma > 0, got {sigma}"));
            }
            Ok(RadialLaw::LognormalLogRadius { sigma })
        }
    }
}

impl<T: Real> RadialLaw<T> {
    pub fn chi(dim: u32) -> Self {
        assert!(dim >= 1, "chi law needs dim >= 1");
        RadialLaw::ChiOfDim { dim }
    }

    pub fn kind(&self) -> RadialKind {
        match self {
            RadialLaw::ChiOfDim { .. } => RadialKind::ChiOfDim,
            RadialLaw::WeibullTail { .. } => RadialKind::WeibullTail,
            RadialLaw::LognormalLogRadius { .. } => RadialKind::LognormalLogRadius,
        }
    }

    pub fn params(&self) -> Vec<T> {
        match *self {
            RadialLaw::ChiOfDim { dim } => vec![T::lit(dim as f64)],
            RadialLaw::WeibullTail { tau, scale } => vec![tau, scale],
            RadialLaw::LognormalLogRadius { sigma } => vec![sigma],
        }
    }

    /// True when this is the chi law of exactly `dim` degrees of freedom,
    /// i.e. the radial law of a `dim`-variate standard normal vector.
    pub fn is_gaussian_radius(&self, dim: usize) -> bool {
        matches!(*self, RadialLaw::ChiOfDim { dim: k } if k as usize == dim)
    }

    /// ln P(R > r).
    pub fn log_tail(&self, r: T) -> T {
        if r <= T::zero() {
            return T::zero();
        }
        let two = T::lit(2.0);
        match *self {
            RadialLaw::ChiOfDim { dim: 1 } => two.ln() + log_std_normal_tail(r),
            RadialLaw::ChiOfDim { dim: 2 } => -r * r / two,
            RadialLaw::ChiOfDim { dim } => {
                let (_, lq) = ln_incomplete_gamma(T::lit(dim as f64) / two, r * r / two).expect("positive shape");
                lq
            }
            RadialLaw::WeibullTail { tau, scale } => -(r / scale).powf(tau),
            RadialLaw::LognormalLogRadius { sigma } => log_std_normal_tail(r.ln() / sigma),
        }
    }

    pub fn tail(&self, r: T) -> T {
        self.log_tail(r).exp()
    }

    /// ln P(R ≤ r).
    pub fn log_cdf(&self, r: T) -> T {
        if r <= T::zero() {
            return T::neg_infinity();
        }
        let two = T::lit(2.0);
        match *self {
            RadialLaw::ChiOfDim { dim: 1 } => (-two * crate::numerics::std_normal_tail(r)).ln_1p(),
            RadialLaw::ChiOfDim { dim: 2 } => (-(-r * r / two).exp_m1()).ln(),
            RadialLaw::ChiOfDim { dim } => {
                let (lp, _) = ln_incomplete_gamma(T::lit(dim as f64) / two, r * r / two).expect("positive shape");
                lp
            }
            RadialLaw::WeibullTail { tau, scale } => (-(-(r / scale).powf(tau)).exp_m1()).ln(),
            RadialLaw::LognormalLogRadius { sigma } => log_std_normal_cdf(r.ln() / sigma),
        }
    }

    /// ln f(r) for r > 0; `-inf` otherwise.
    pub fn log_density(&self, r: T) -> T {
        if r <= T::zero() {
            return T::neg_infinity();
        }
        let two = T::lit(2.0);
        match *self {
            RadialLaw::ChiOfDim { dim } => {
                let k = T::lit(dim as f64);
                (k - T::one()) * r.ln() - r * r / two - (k / two - T::one()) * two.ln() - (k / two).lgamma()
            }
            RadialLaw::WeibullTail { tau, scale } => {
                let z = r / scale;
                tau.ln() - scale.ln() + (tau - T::one()) * z.ln() - z.powf(tau)
            }
            RadialLaw::LognormalLogRadius { sigma } => log_std_normal_pdf(r.ln() / sigma) - r.ln() - sigma.ln(),
        }
    }

    pub fn density(&self, r: T) -> T {
        self.log_density(r).exp()
    }

    /// Gumbel scaling function: the reciprocal hazard rate `P(R > r)/f(r)`,
    /// in closed form where one exists.
    pub fn b(&self, r: T) -> T {
        match *self {
            RadialLaw::ChiOfDim { dim: 2 } => r.recip(),
            RadialLaw::WeibullTail { tau, scale } => scale.powf(tau) * r.powf(T::one() - tau) / tau,
            _ => (self.log_tail(r) - self.log_density(r)).exp(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match *self {
            RadialLaw::ChiOfDim { dim } => (0..dim)
                .map(|_| {
                    let z = T::std_normal(rng);
                    z * z
                })
                .sum::<T>()
                .sqrt(),
            RadialLaw::WeibullTail { tau, scale } => scale * (-T::unit_open(rng).ln()).powf(tau.recip()),
            RadialLaw::LognormalLogRadius { sigma } => (sigma * T::std_normal(rng)).exp(),
        }
    }
}

impl<T: Real> fmt::Display for RadialLaw<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialLaw::ChiOfDim { dim } => write!(f, "chi_of_dim({dim})"),
            RadialLaw::WeibullTail { tau, scale } => write!(f, "weibull_tail(tau={tau}, scale={scale})"),
            RadialLaw::LognormalLogRadius { sigma } => write!(f, "lognormal_log_radius(sigma={sigma})"),
        }
    }
}

/// `e(u) = u·b(ln u)`, the Gumbel scaling of `exp(R)`.
pub fn e_of<T: Real>(u: T, law: &RadialLaw<T>) -> Result<T> {
    if !(u > T::one()) {
        return Err(domain(format!("e(u) needs u > 1, got {u}")));
    }
    Ok(u * law.b(u.ln()))
}

/// Radial law together with the margin parameters; everything needed to
/// evaluate the margin tails and their scaling functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingBundle<T> {
    law: RadialLaw<T>,
    dim: usize,
    lambda: Vec<T>,
    beta: Vec<T>,
    gamma: T,
}

impl<T: Real> ScalingBundle<T> {
    pub fn new(law: RadialLaw<T>, lambda: Vec<T>, beta: Vec<T>, gamma: T) -> Result<Self> {
        let dim = lambda.len();
        if dim == 0 {
            return Err(Error::InvalidParams("at least one margin required".into()));
        }
        if beta.len() != dim {
            return Err(Error::InvalidParams(format!(
                "lambda has {dim} entries but beta has {}",
                beta.len()
            )));
        }
        if lambda.iter().chain(&beta).any(|&x| !(x > T::zero() && x.is_finite())) {
            return Err(Error::InvalidParams(
                "lambda and beta must be positive and finite".into(),
            ));
        }
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self {
            law,
            dim,
            lambda,
            beta,
            gamma,
        })
    }

    /// A single margin `λ exp(βγ R Θ)` of a `dim`-dimensional vector.
    pub fn single(law: RadialLaw<T>, dim: usize, lambda: T, beta: T, gamma: T) -> Result<Self> {
        let mut b = Self::new(law, vec![lambda], vec![beta], gamma)?;
        b.dim = dim;
        Ok(b)
    }

    pub fn law(&self) -> &RadialLaw<T> {
        &self.law
    }
    /// Dimension of the underlying sphere (the model dimension).
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn margins(&self) -> usize {
        self.lambda.len()
    }
    pub fn lambda(&self, j: usize) -> T {
        self.lambda[j]
    }
    pub fn beta(&self, j: usize) -> T {
        self.beta[j]
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    /// Log-scale `βⱼγ` of margin `j`.
    pub fn scale(&self, j: usize) -> T {
        self.beta[j] * self.gamma
    }

    pub fn b(&self, r: T) -> T {
        self.law.b(r)
    }

    pub fn e(&self, u: T) -> Result<T> {
        e_of(u, &self.law)
    }

    pub fn e_star(&self, j: usize, u: T) -> Result<T> {
        e_star(j, u, self)
    }

    pub fn c_limit(&self, j: usize) -> Result<T> {
        c_limit(j, self)
    }

    /// ln P(Xⱼ > u): closed form for Gaussian radius, angular quadrature
    /// otherwise.
    pub fn log_margin_tail(&self, j: usize, u: T) -> Result<T> {
        if !(u > T::zero()) {
            return Err(domain(format!("margin tail needs u > 0, got {u}")));
        }
        if self.law.is_gaussian_radius(self.dim) {
            Ok(log_std_normal_tail((u / self.lambda[j]).ln() / self.scale(j)))
        } else {
            self.log_margin_tail_quadrature(j, u)
        }
    }

    pub fn margin_tail(&self, j: usize, u: T) -> Result<T> {
        self.log_margin_tail(j, u).map(T::exp)
    }

    /// ln P(Xⱼ > u) as the angular integral ∫₀¹ P(λⱼ e^{Rθβⱼγ} > u) h(θ) dθ,
    /// with θ = sin φ to remove the endpoint singularity of h.
    pub fn log_margin_tail_quadrature(&self, j: usize, u: T) -> Result<T> {
        if !(u > T::zero()) {
            return Err(domain(format!("margin tail needs u > 0, got {u}")));
        }
        let t = (u / self.lambda[j]).ln() / self.scale(j);
        self.log_coordinate_tail(t)
    }

    /// ln P(R·Θ > t) for one coordinate Θ of the uniform direction.
    fn log_coordinate_tail(&self, t: T) -> Result<T> {
        let half = T::lit(0.5);
        if t == T::zero() {
            return Ok(half.ln());
        }
        if t < T::zero() {
            let upper = self.log_coordinate_tail(-t)?;
            return Ok((-upper.exp()).ln_1p());
        }
        if self.dim == 1 {
            return Ok(half.ln() + self.law.log_tail(t));
        }
        let d = self.dim as u32;
        let base = self.law.log_tail(t);
        if base == T::neg_infinity() {
            return Ok(base);
        }
        let law = self.law;
        let integrand = |phi: T| {
            let s = phi.sin();
            if s <= T::zero() {
                return T::zero();
            }
            let w = sphere_angle_density(phi, d).unwrap_or(T::zero());
            (law.log_tail(t / s) - base).exp() * w
        };
        let r = integrate(integrand, T::zero(), T::FRAC_PI_2(), QuadratureOptions::default())?;
        Ok(base + r.value.ln())
    }
}

/// `e*ⱼ(u)`, evaluated as `βⱼγ·u·b(ln(u/λⱼ)/(βⱼγ))` (algebraically identical
/// to `βⱼγ u e(v)/v` without forming `v`, which overflows for small `βⱼγ`).
pub fn e_star<T: Real>(j: usize, u: T, bundle: &ScalingBundle<T>) -> Result<T> {
    let s = bundle.scale(j);
    let log_v = (u / bundle.lambda(j)).ln() / s;
    if !(log_v > T::zero()) {
        return Err(domain(format!(
            "e*_{j}(u) needs (u/lambda)^(1/(beta*gamma)) > 1, got u={u}, lambda={}",
            bundle.lambda(j)
        )));
    }
    Ok(s * u * bundle.b(log_v))
}

/// `cⱼ = lim ln(u)·e*ⱼ(u)/u`.
///
/// Exact `(βⱼγ)²` for chi radii (whose scaling behaves like 1/r). Otherwise
/// the probe value at `u = 1e12`, accepted when it moved by less than 1e-3
/// relative since `u = 1e8`; a probe still falling like a power of `ln u` is
/// reported as the limit 0, a growing one as [`Error::NoFiniteLimit`].
pub fn c_limit<T: Real>(j: usize, bundle: &ScalingBundle<T>) -> Result<T> {
    if let RadialLaw::ChiOfDim { .. } = bundle.law() {
        let s = bundle.scale(j);
        return Ok(s * s);
    }
    let probe = |u: T| -> Result<T> { Ok(u.ln() * e_star(j, u, bundle)? / u) };
    let (lo_u, hi_u) = (T::lit(1e8), T::lit(1e12));
    let (lo, hi) = (probe(lo_u)?, probe(hi_u)?);
    let no_limit = || Error::NoFiniteLimit {
        margin: j,
        at_1e8: lo.to_f64_lossy(),
        at_1e12: hi.to_f64_lossy(),
    };
    if !lo.is_finite() || !hi.is_finite() || lo <= T::zero() {
        return Err(no_limit());
    }
    if (hi / lo - T::one()).abs() < T::lit(1e-3) {
        return Ok(hi);
    }
    let slope = (hi / lo).ln() / (hi_u.ln() / lo_u.ln()).ln();
    if slope < T::zero() {
        Ok(T::zero())
    } else {
        Err(no_limit())
    }
}

/// One point of the max-domain-of-attraction probe.
#[derive(Debug, Clone, PartialEq)]
pub struct MdaProbe<T> {
    pub u: T,
    pub x: T,
    /// `P(R > r + x b(r)) / P(R > r)` at `r = ln u`.
    pub radial_ratio: T,
    /// `P(Xⱼ > u + x e*ⱼ(u)) / P(Xⱼ > u)` per margin.
    pub margin_ratios: Vec<T>,
    /// The limit `e^{-x}`.
    pub target: T,
}

impl<T: Real> MdaProbe<T> {
    /// Largest relative deviation from `e^{-x}` among the margins.
    pub fn margin_deviation(&self) -> T {
        self.margin_ratios
            .iter()
            .map(|&r| (r / self.target - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn radial_deviation(&self) -> T {
        (self.radial_ratio / self.target - T::one()).abs()
    }
}

pub fn probe_mda_limit<T: Real>(bundle: &ScalingBundle<T>, u_grid: &[T], x_grid: &[T]) -> Result<Vec<MdaProbe<T>>> {
    let law = bundle.law();
    let mut out = Vec::with_capacity(u_grid.len() * x_grid.len());
    for &u in u_grid {
        let r = u.ln();
        for &x in x_grid {
            let radial_ratio = (law.log_tail(r + x * law.b(r)) - law.log_tail(r)).exp();
            let mut margin_ratios = Vec::with_capacity(bundle.margins());
            for j in 0..bundle.margins() {
                let base = bundle.log_margin_tail(j, u)?;
                let shifted = u + x * bundle.e_star(j, u)?;
                let top = if shifted > T::zero() {
                    bundle.log_margin_tail(j, shifted)?
                } else {
                    T::zero()
                };
                margin_ratios.push((top - base).exp());
            }
            out.push(MdaProbe {
                u,
                x,
                radial_ratio,
                margin_ratios,
                target: (-x).exp(),
            });
        }
    }
    Ok(out)
}

/// Left minus right side of the asymptotic-independence condition for the
/// ordered pair `(i, j)`; negative means it holds at this `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionMargin<T> {
    pub i: usize,
    pub j: usize,
    pub margin: T,
}

/// Evaluates `σᵢⱼ + c√((1-σᵢⱼ²)/ln u) − (βⱼ/βᵢ)·ln(ε e*ᵢ(u))/ln u` for every
/// ordered pair `i ≠ j`.
pub fn probe_condition_rho<T: Real>(
    bundle: &ScalingBundle<T>,
    sigma: &CorrelationMatrix<T>,
    u: T,
    c: T,
    epsilon: T,
) -> Result<Vec<ConditionMargin<T>>> {
    if !(u > T::one()) {
        return Err(domain(format!("condition probe needs u > 1, got {u}")));
    }
    let d = bundle.margins();
    let ln_u = u.ln();
    let mut out = Vec::with_capacity(d * d.saturating_sub(1));
    for i in 0..d {
        let e_i = bundle.e_star(i, u)?;
        for j in (0..d).filter(|&j| j != i) {
            let s = sigma.get(i, j);
            let lhs = s + c * ((T::one() - s * s) / ln_u).sqrt();
            let rhs = bundle.beta(j) / bundle.beta(i) * (epsilon * e_i).ln() / ln_u;
            out.push(ConditionMargin {
                i,
                j,
                margin: lhs - rhs,
            });
        }
    }
    Ok(out)
}

/// `e(factor·u)/e(u)` on a grid, the ingredient of the O-regular variation
/// condition.
pub fn probe_o_regular<T: Real>(law: &RadialLaw<T>, u_grid: &[T], factor: T) -> Result<Vec<T>> {
    u_grid
        .iter()
        .map(|&u| Ok(e_of(factor * u, law)? / e_of(u, law)?))
        .collect()
}
