//! Monte Carlo estimates of `P(X₁ + … + X_d > u)`.
//!
//! Three unbiased estimators share one execution scheme: the `n` draws are
//! cut into chunks of [`CHUNK_SIZE`], chunk `c` owns the generator
//! [`chunk_rng`]`(seed, c)`, and per-chunk statistics are merged in chunk
//! order. The result therefore depends on `(seed, n, estimator)` only, never
//! on the number of worker threads.
//!
//! * `Crude` counts exceedances.
//! * `ConditionalMax` averages `Σⱼ P(Xⱼ > max(Mⱼ, u − Sⱼ) | X₋ⱼ)`, with `Mⱼ`
//!   and `Sⱼ` the maximum and sum of the other coordinates. Needs log-normal
//!   margins.
//! * `ConditionalRadial` draws only the direction `θ = L·U` and integrates
//!   the radius exactly: `r ↦ ln Σₖ λₖ e^{βₖγθₖ r}` is convex, so the
//!   exceedance set in `r` is the complement of an interval whose endpoints
//!   are found by Newton's method. Works for every radial law and keeps a
//!   small relative error arbitrarily deep in the tail.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::first_order;
use crate::error::{Error, Result};
use crate::model::{chunk_rng, ModelSpec, CHUNK_SIZE};
use crate::numerics::log_std_normal_tail;
use crate::real::{ln_add_exp, ln_sum_exp, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Crude,
    #[serde(alias = "conditional-max")]
    ConditionalMax,
    #[default]
    #[serde(alias = "conditional", alias = "conditional-radial")]
    ConditionalRadial,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Crude => "crude",
            Estimator::ConditionalMax => "conditional_max",
            Estimator::ConditionalRadial => "conditional_radial",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    /// `conditional` names the radial estimator.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "crude" => Ok(Estimator::Crude),
            "conditional" | "conditional_radial" | "radial" => Ok(Estimator::ConditionalRadial),
            "conditional_max" | "max" => Ok(Estimator::ConditionalMax),
            other => Err(Error::InvalidParams(format!(
                "unknown estimator '{other}' (expected crude, conditional or conditional-max)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McOptions {
    pub n: u64,
    pub seed: u64,
    pub estimator: Estimator,
    /// Size of a dedicated thread pool; `None` uses rayon's global pool.
    pub workers: Option<usize>,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            n: 1_000_000,
            seed: 0x7a11_5eed,
            estimator: Estimator::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate<T> {
    pub value: T,
    pub stderr: T,
    /// ln `value`, finite even where `value` underflows `T`.
    pub log_value: T,
    pub n: u64,
    pub estimator: Estimator,
    pub seed: u64,
    /// Wall time in seconds.
    pub elapsed: f64,
    /// Exceedance count of the crude estimator.
    pub hits: Option<u64>,
}

impl<T: Real> McEstimate<T> {
    pub fn relative_stderr(&self) -> T {
        self.stderr / self.value
    }

    fn exact(value: T, n: u64, estimator: Estimator, seed: u64, start: Instant) -> Self {
        Self {
            value,
            stderr: T::zero(),
            log_value: value.ln(),
            n,
            estimator,
            seed,
            elapsed: start.elapsed().as_secs_f64(),
            hits: None,
        }
    }
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Runs `chunk(len, rng)` for every chunk and returns the results in chunk
/// order.
fn run_chunks<A, F>(n: u64, seed: u64, workers: Option<usize>, chunk: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> A + Sync,
{
    let size = CHUNK_SIZE as u64;
    let chunks = n.div_ceil(size);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = (n - c * size).min(size) as usize;
                chunk(len, &mut chunk_rng(seed, c))
            })
            .collect::<Vec<A>>()
    };
    match workers {
        None => Ok(work()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("sample size n must be at least 1".into()));
    }
    Ok(())
}

/// Builds the estimate from moments of draws normalised by `exp(log_scale)`.
fn finish<T: Real>(m: Moments, log_scale: T, estimator: Estimator, seed: u64, start: Instant) -> McEstimate<T> {
    let log_value = T::lit(m.mean.ln()) + log_scale;
    let log_stderr = T::lit(m.stderr().ln()) + log_scale;
    McEstimate {
        value: log_value.exp(),
        stderr: log_stderr.exp(),
        log_value,
        n: m.n,
        estimator,
        seed,
        elapsed: start.elapsed().as_secs_f64(),
        hits: None,
    }
}

/// Exceedance frequency over `n` draws; `stderr = √(p̂(1−p̂)/n)`.
pub fn crude_mc<T: Real>(
    spec: &ModelSpec<T>,
    u: T,
    n: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<McEstimate<T>> {
    check_n(n)?;
    let start = Instant::now();
    if !(u > T::zero()) {
        return Ok(McEstimate::exact(T::one(), n, Estimator::Crude, seed, start));
    }
    let d = spec.dim();
    let log_u = u.ln();
    let hits: u64 = run_chunks(n, seed, workers, |len, rng| {
        let (mut z, mut y, mut x) = (vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d]);
        let mut count = 0u64;
        for _ in 0..len {
            spec.draw_log(rng, &mut z, &mut y, &mut x);
            if ln_sum_exp(&x) > log_u {
                count += 1;
            }
        }
        count
    })?
    .into_iter()
    .sum();
    let p = hits as f64 / n as f64;
    let stderr = (p * (1.0 - p) / n as f64).sqrt();
    Ok(McEstimate {
        value: T::lit(p),
        stderr: T::lit(stderr),
        log_value: T::lit(p.ln()),
        n,
        estimator: Estimator::Crude,
        seed,
        elapsed: start.elapsed().as_secs_f64(),
        hits: Some(hits),
    })
}

/// Gaussian conditional law of each standardised log-margin given the
/// others: `Yⱼ | Y₋ⱼ ~ N(Σₖ wⱼₖ yₖ, sⱼ²)`.
struct Conditionals<T> {
    weights: Vec<T>,
    sd: Vec<T>,
}

impl<T: Real> Conditionals<T> {
    fn new(spec: &ModelSpec<T>) -> Self {
        let d = spec.dim();
        let chol = spec.cholesky();
        // columns of the precision matrix P = Σ⁻¹
        let mut precision = vec![T::zero(); d * d];
        for k in 0..d {
            let mut e = vec![T::zero(); d];
            e[k] = T::one();
            for (i, v) in chol.solve(&e).into_iter().enumerate() {
                precision[i * d + k] = v;
            }
        }
        let mut weights = vec![T::zero(); d * d];
        let mut sd = vec![T::zero(); d];
        for j in 0..d {
            let pjj = precision[j * d + j];
            sd[j] = (T::one() / pjj).sqrt();
            for k in (0..d).filter(|&k| k != j) {
                weights[j * d + k] = -precision[j * d + k] / pjj;
            }
        }
        Self { weights, sd }
    }
}

/// The conditional "largest claim" estimator.
pub fn conditional_max_mc<T: Real>(
    spec: &ModelSpec<T>,
    u: T,
    n: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<McEstimate<T>> {
    check_n(n)?;
    if !spec.is_lognormal() {
        return Err(Error::WrongRadialLaw {
            required: format!("chi({}) (log-normal margins)", spec.dim()),
            actual: spec.radial().to_string(),
        });
    }
    let start = Instant::now();
    if !(u > T::zero()) {
        return Ok(McEstimate::exact(T::one(), n, Estimator::ConditionalMax, seed, start));
    }
    let d = spec.dim();
    if d == 1 {
        let p = spec.marginal_tail(0, u)?;
        return Ok(McEstimate::exact(p, n, Estimator::ConditionalMax, seed, start));
    }
    let log_scale = first_order(spec, u)?.ln();
    let cond = Conditionals::new(spec);
    let scale: Vec<T> = (0..d).map(|j| spec.scaling().scale(j)).collect();
    let log_lambda: Vec<T> = (0..d).map(|j| spec.lambda(j).ln()).collect();
    let moments = run_chunks(n, seed, workers, |len, rng| {
        let (mut z, mut y, mut x) = (vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d]);
        let mut m = Moments::default();
        let mut terms = vec![T::zero(); d];
        for _ in 0..len {
            for zi in z.iter_mut() {
                *zi = T::std_normal(rng);
            }
            spec.cholesky().mul_vec_into(&z, &mut y);
            for k in 0..d {
                x[k] = (log_lambda[k] + scale[k] * y[k]).exp();
            }
            for j in 0..d {
                let (mut max, mut sum, mut mu) = (T::zero(), T::zero(), T::zero());
                for k in (0..d).filter(|&k| k != j) {
                    max = max.max(x[k]);
                    sum = sum + x[k];
                    mu = mu + cond.weights[j * d + k] * y[k];
                }
                let t = max.max(u - sum);
                let threshold = ((t.ln() - log_lambda[j]) / scale[j] - mu) / cond.sd[j];
                terms[j] = log_std_normal_tail(threshold) - log_scale;
            }
            m.push(ln_sum_exp(&terms).exp().to_f64_lossy());
        }
        m
    })?
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    Ok(finish(moments, log_scale, Estimator::ConditionalMax, seed, start))
}

/// `g(r) = ln Σₖ exp(aₖ + cₖ r)` and `g'(r)`.
#[inline]
fn log_sum_line<T: Real>(a: &[T], c: &[T], r: T) -> (T, T) {
    let mut top = T::neg_infinity();
    for (&ak, &ck) in a.iter().zip(c) {
        top = top.max(ak + ck * r);
    }
    let (mut s, mut ds) = (T::zero(), T::zero());
    for (&ak, &ck) in a.iter().zip(c) {
        let w = (ak + ck * r - top).exp();
        s = s + w;
        ds = ds + w * ck;
    }
    (top + s.ln(), ds / s)
}

const NEWTON_MAX_STEPS: usize = 200;

/// Newton iteration for `g(r) = level` from `r0` with `g(r0) ≥ level`.
/// Convexity keeps every iterate inside `{g ≥ level}` and moves it
/// monotonically towards the nearest root in the descent direction. Returns
/// `None` when the iterate reaches a point with `g' ≥ 0` while descending
/// from the left (no root on that branch).
fn newton_root<T: Real>(a: &[T], c: &[T], level: T, r0: T, from_left: bool) -> Option<T> {
    let tol = T::lit(64.0) * T::epsilon();
    let mut r = r0;
    for _ in 0..NEWTON_MAX_STEPS {
        let (g, dg) = log_sum_line(a, c, r);
        let excess = g - level;
        if excess <= tol * (T::one() + level.abs()) {
            return Some(r);
        }
        if from_left && dg >= T::zero() {
            return None;
        }
        let step = excess / dg;
        let next = r - step;
        if (next - r).abs() <= tol * (T::one() + r.abs()) {
            return Some(next);
        }
        r = next;
    }
    Some(r)
}

/// ln P(Σₖ exp(aₖ + cₖ R) > eˡᵉᵛᵉˡ) for the radius law of `spec`.
fn log_radial_exceedance<T: Real>(spec: &ModelSpec<T>, a: &[T], c: &[T], level: T) -> T {
    let law = spec.radial();
    let max_slope = c.iter().copied().fold(T::neg_infinity(), T::max);
    let (g0, dg0) = log_sum_line(a, c, T::zero());
    if g0 <= level {
        // sublevel set is [0, r₂]
        if max_slope <= T::zero() {
            return T::neg_infinity();
        }
        let start = a
            .iter()
            .zip(c)
            .filter(|(_, &ck)| ck > T::zero())
            .map(|(&ak, &ck)| (level - ak) / ck)
            .fold(T::infinity(), T::min);
        let r2 = newton_root(a, c, level, start, false).unwrap_or(start);
        return law.log_tail(r2);
    }
    if dg0 >= T::zero() {
        return T::zero();
    }
    let Some(r1) = newton_root(a, c, level, T::zero(), true) else {
        return T::zero();
    };
    let below = law.log_cdf(r1);
    if max_slope <= T::zero() {
        return below;
    }
    let mut step = T::one();
    let mut start = r1 + step;
    while log_sum_line(a, c, start).0 <= level {
        step = step + step;
        start = r1 + step;
    }
    let r2 = newton_root(a, c, level, start, false).unwrap_or(start);
    ln_add_exp(below, law.log_tail(r2))
}

/// Conditions on the direction and integrates the radius exactly.
pub fn conditional_radial_mc<T: Real>(
    spec: &ModelSpec<T>,
    u: T,
    n: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<McEstimate<T>> {
    check_n(n)?;
    let start = Instant::now();
    if !(u > T::zero()) {
        return Ok(McEstimate::exact(
            T::one(),
            n,
            Estimator::ConditionalRadial,
            seed,
            start,
        ));
    }
    let d = spec.dim();
    if d == 1 {
        let p = spec.marginal_tail(0, u)?;
        return Ok(McEstimate::exact(p, n, Estimator::ConditionalRadial, seed, start));
    }
    let log_scale = first_order(spec, u)?.ln();
    let level = u.ln();
    let a: Vec<T> = (0..d).map(|j| spec.lambda(j).ln()).collect();
    let scale: Vec<T> = (0..d).map(|j| spec.scaling().scale(j)).collect();
    let moments = run_chunks(n, seed, workers, |len, rng| {
        let (mut z, mut theta, mut c) = (vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d]);
        let mut m = Moments::default();
        for _ in 0..len {
            spec.draw_direction(rng, &mut z, &mut theta);
            for k in 0..d {
                c[k] = scale[k] * theta[k];
            }
            let lp = log_radial_exceedance(spec, &a, &c, level);
            m.push((lp - log_scale).exp().to_f64_lossy());
        }
        m
    })?
    .into_iter()
    .fold(Moments::default(), Moments::merge);
    Ok(finish(moments, log_scale, Estimator::ConditionalRadial, seed, start))
}

/// Dispatches on `opts.estimator`.
pub fn estimate<T: Real>(spec: &ModelSpec<T>, u: T, opts: &McOptions) -> Result<McEstimate<T>> {
    match opts.estimator {
        Estimator::Crude => crude_mc(spec, u, opts.n, opts.seed, opts.workers),
        Estimator::ConditionalMax => conditional_max_mc(spec, u, opts.n, opts.seed, opts.workers),
        Estimator::ConditionalRadial => conditional_radial_mc(spec, u, opts.n, opts.seed, opts.workers),
    }
}

/// One estimate per threshold; threshold `k` uses seed `opts.seed ^ k`.
pub fn mc_table<T: Real>(spec: &ModelSpec<T>, u_list: &[T], opts: &McOptions) -> Result<Vec<McEstimate<T>>> {
    if u_list.is_empty() {
        return Err(Error::EmptyInput("u_list"));
    }
    u_list
        .iter()
        .enumerate()
        .map(|(k, &u)| {
            let o = McOptions {
                seed: opts.seed ^ k as u64,
                ..*opts
            };
            estimate(spec, u, &o)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::radial::{make_radial, RadialKind};

    fn spec(rho: f64) -> ModelSpec<f64> {
        ModelSpec::new(ModelParams::equicorrelated_lognormal(2, rho)).unwrap()
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.13).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (Moments::default(), Moments::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert_eq!(merged.n, whole.n);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn radial_exceedance_closed_cases() {
        let s = spec(0.0);
        // one coordinate: P(R c > ln u) = P(R > ln u / c)
        let a = [0.0, f64::NEG_INFINITY];
        let c = [0.5, 0.0];
        let lp = log_radial_exceedance(&s, &a, &c, 3.0_f64);
        assert!((lp - s.radial().log_tail(6.0)).abs() < 1e-12);
        // sum already exceeds u at r = 0 and only grows
        let lp = log_radial_exceedance(&s, &[1.0, 1.0], &[0.2, 0.1], 0.5);
        assert_eq!(lp, 0.0);
        // decreasing sum: exceedance iff R < r₁
        let lp = log_radial_exceedance(&s, &[1.0, f64::NEG_INFINITY], &[-1.0, 0.0], 0.25);
        assert!((lp - s.radial().log_cdf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn radial_exceedance_two_sided() {
        let s = spec(0.0);
        // e^{r} + 3e^{-2r} > 3: roots solve x + 3x⁻² = 3 with x = e^r
        let a = [0.0, 3f64.ln()];
        let c = [1.0, -2.0];
        let level = 3f64.ln();
        let lp = log_radial_exceedance(&s, &a, &c, level);
        let f = |x: f64| x + 3.0 * x.powi(-2) - 3.0;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            0.5 * (lo + hi)
        };
        let min = 6f64.powf(1.0 / 3.0);
        let (r1, r2) = (bisect(1.0, min).ln(), bisect(min, 3.0).ln());
        let law = s.radial();
        let want = (law.log_cdf(r1).exp() + law.tail(r2)).ln();
        assert!((lp - want).abs() < 1e-10, "{lp} vs {want}");
        // level below the minimum 6^{1/3} + 3·6^{-2/3}: always exceeds
        let lp = log_radial_exceedance(&s, &a, &c, 2.5f64.ln());
        assert_eq!(lp, 0.0);
    }

    #[test]
    fn zero_threshold_and_empty_inputs() {
        let s = spec(0.3);
        for est in [
            Estimator::Crude,
            Estimator::ConditionalMax,
            Estimator::ConditionalRadial,
        ] {
            let o = McOptions {
                n: 10,
                estimator: est,
                ..Default::default()
            };
            let e = estimate(&s, 0.0, &o).unwrap();
            assert_eq!((e.value, e.stderr), (1.0, 0.0));
            let bad = McOptions { n: 0, ..o };
            assert!(estimate(&s, 10.0, &bad).is_err());
        }
        assert!(matches!(
            mc_table(&s, &[], &McOptions::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn one_dimension_is_exact() {
        let s = ModelSpec::new(ModelParams::equicorrelated_lognormal(1, 0.0)).unwrap();
        let e = conditional_max_mc(&s, 10.0, 100, 1, None).unwrap();
        assert_eq!(e.value, s.marginal_tail(0, 10.0).unwrap());
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn crude_counts_hits() {
        let e = crude_mc(&spec(0.0), 10.0, 100_000, 9, None).unwrap();
        let hits = e.hits.unwrap();
        assert_eq!(e.value * e.n as f64, hits as f64);
        assert!(e.stderr > 0.0);
    }

    #[test]
    fn conditional_max_rejects_other_radii() {
        let p = ModelParams {
            radial: make_radial(RadialKind::WeibullTail, &[2.0]).unwrap(),
            ..ModelParams::equicorrelated_lognormal(2, 0.0)
        };
        let s = ModelSpec::new(p).unwrap();
        assert!(matches!(
            conditional_max_mc(&s, 10.0, 10, 1, None),
            Err(Error::WrongRadialLaw { .. })
        ));
        assert!(conditional_radial_mc(&s, 10.0, 1000, 1, None).unwrap().value > 0.0);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let s = spec(0.9);
        for est in [
            Estimator::Crude,
            Estimator::ConditionalMax,
            Estimator::ConditionalRadial,
        ] {
            let run = |w| {
                let o = McOptions {
                    n: 100_000,
                    seed: 17,
                    estimator: est,
                    workers: Some(w),
                };
                let e = estimate(&s, 50.0, &o).unwrap();
                (e.value.to_bits(), e.stderr.to_bits())
            };
            assert_eq!(run(1), run(2));
            assert_eq!(run(1), run(8));
        }
    }

    #[test]
    fn mc_table_derives_seeds() {
        let s = spec(0.5);
        let o = McOptions {
            n: 50_000,
            seed: 40,
            ..Default::default()
        };
        let t = mc_table(&s, &[10.0, 20.0], &o).unwrap();
        let single = estimate(&s, 20.0, &McOptions { seed: 41, ..o }).unwrap();
        assert_eq!(t[1].value, single.value);
        assert_eq!(t[0].seed, 40);
        assert_eq!(t[1].seed, 41);
    }

    #[test]
    fn estimator_names() {
        assert_eq!(
            "conditional".parse::<Estimator>().unwrap(),
            Estimator::ConditionalRadial
        );
        assert_eq!(
            "conditional-max".parse::<Estimator>().unwrap(),
            Estimator::ConditionalMax
        );
        assert_eq!("crude".parse::<Estimator>().unwrap(), Estimator::Crude);
        assert!("lucky".parse::<Estimator>().is_err());
    }

    #[test]
    fn f32_instantiation() {
        let s = ModelSpec::<f32>::new(ModelParams::equicorrelated_lognormal(2, 0.0f32)).unwrap();
        let e = conditional_radial_mc(&s, 10.0f32, 20_000, 3, None).unwrap();
        assert!((e.value - 0.0337).abs() < 5e-4, "{}", e.value);
    }
}
