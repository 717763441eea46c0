//! The log-elliptical risk vector
//! `X = (λ₁ Z₁^{β₁γ}, …, λ_d Z_d^{β_dγ})`, `Z = exp(R·L·U)`,
//! with `L` the lower Cholesky factor of the correlation matrix and `U`
//! uniform on the unit sphere.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::numerics::{log_lognormal_pdf, CorrelationMatrix, LowerTriangular, MatrixIssue};
use crate::radial::{probe_mda_limit, RadialLaw, ScalingBundle};
use crate::real::Real;

/// Draws per independently seeded generator stream.
pub const CHUNK_SIZE: usize = 1 << 14;

/// Generator for chunk `chunk` of a run seeded with `seed`: one ChaCha key
/// per seed, one counter stream per chunk.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZeroDimension,
    LengthMismatch {
        field: &'static str,
        expected: usize,
        actual: usize,
    },
    NonPositive {
        field: &'static str,
        index: Option<usize>,
    },
    Matrix(MatrixIssue),
    RadialMda(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension: d must be at least 1"),
            Violation::LengthMismatch {
                field,
                expected,
                actual,
            } => {
                write!(f, "length: {field} has {actual} entries, expected {expected}")
            }
            Violation::NonPositive { field, index: Some(i) } => {
                write!(f, "positivity: {field}[{i}] must be positive and finite")
            }
            Violation::NonPositive { field, index: None } => {
                write!(f, "positivity: {field} must be positive and finite")
            }
            Violation::Matrix(issue) => match issue {
                MatrixIssue::WrongLength { expected, actual } => {
                    write!(f, "sigma shape: {actual} entries, expected {expected}")
                }
                MatrixIssue::NonFinite { row, col } => write!(f, "sigma finite: entry ({row},{col})"),
                MatrixIssue::NonUnitDiagonal { index } => {
                    write!(f, "unit diagonal: sigma[{index}][{index}] must equal 1")
                }
                MatrixIssue::NotSymmetric { row, col } => {
                    write!(f, "symmetric: sigma[{row}][{col}] != sigma[{col}][{row}]")
                }
                MatrixIssue::OutOfRange { row, col } => {
                    write!(f, "correlation range: sigma[{row}][{col}] outside [-1, 1]")
                }
                MatrixIssue::NotPositiveDefinite => write!(f, "positive definite: sigma is singular or indefinite"),
            },
            Violation::RadialMda(msg) => write!(f, "radial MDA: {msg}"),
        }
    }
}

/// Unvalidated model parameters, in the caller's margin order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    pub dim: usize,
    pub lambda: Vec<T>,
    pub beta: Vec<T>,
    pub gamma: T,
    /// Row-major `dim × dim` correlation matrix.
    pub sigma: Vec<T>,
    pub radial: RadialLaw<T>,
}

impl<T: Real> ModelParams<T> {
    /// Standard log-normal margins (λ = β = γ = 1) with equal correlations.
    pub fn equicorrelated_lognormal(dim: usize, rho: T) -> Self {
        let sigma = (0..dim * dim)
            .map(|k| if k / dim == k % dim { T::one() } else { rho })
            .collect();
        Self {
            dim,
            lambda: vec![T::one(); dim],
            beta: vec![T::one(); dim],
            gamma: T::one(),
            sigma,
            radial: RadialLaw::chi(dim.max(1) as u32),
        }
    }
}

/// Every violated invariant of `params`; empty means valid.
pub fn validate<T: Real>(params: &ModelParams<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let d = params.dim;
    if d == 0 {
        out.push(Violation::ZeroDimension);
        return out;
    }
    for (field, v) in [("lambda", &params.lambda), ("beta", &params.beta)] {
        if v.len() != d {
            out.push(Violation::LengthMismatch {
                field,
                expected: d,
                actual: v.len(),
            });
        }
        for (i, &x) in v.iter().enumerate() {
            if !(x > T::zero() && x.is_finite()) {
                out.push(Violation::NonPositive { field, index: Some(i) });
            }
        }
    }
    if !(params.gamma > T::zero() && params.gamma.is_finite()) {
        out.push(Violation::NonPositive {
            field: "gamma",
            index: None,
        });
    }
    out.extend(
        CorrelationMatrix::issues(d, &params.sigma)
            .into_iter()
            .map(Violation::Matrix),
    );
    out
}

/// Validated model with margins ordered so that `β₁ ≥ … ≥ β_d` and, among
/// the margins sharing the largest β, λ₁ is the largest.
#[derive(Debug, Clone)]
pub struct ModelSpec<T> {
    sigma: CorrelationMatrix<T>,
    chol: LowerTriangular<T>,
    bundle: ScalingBundle<T>,
    original_index: Vec<usize>,
}

impl<T: Real> ModelSpec<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        let violations = validate(&params);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        let d = params.dim;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            params.beta[b]
                .partial_cmp(&params.beta[a])
                .unwrap()
                .then(params.lambda[b].partial_cmp(&params.lambda[a]).unwrap())
        });
        let raw = CorrelationMatrix::new(d, params.sigma).expect("validated");
        let sigma = raw.permuted(&order);
        let chol = sigma.cholesky();
        let lambda = order.iter().map(|&i| params.lambda[i]).collect();
        let beta = order.iter().map(|&i| params.beta[i]).collect();
        let bundle = ScalingBundle::new(params.radial, lambda, beta, params.gamma)?;
        Ok(Self {
            sigma,
            chol,
            bundle,
            original_index: order,
        })
    }

    /// Like [`ModelSpec::new`], and additionally requires the radial Gumbel
    /// ratio `P(R > r + x b(r))/P(R > r)` to move towards `e^{-x}` between
    /// `r = ln 1e4` and `r = ln 1e8` for `x = ±1, ±2`.
    pub fn new_strict(params: ModelParams<T>) -> Result<Self> {
        let spec = Self::new(params)?;
        let xs = [-2.0, -1.0, 1.0, 2.0].map(T::lit);
        let law = spec.radial();
        let single = ScalingBundle::single(*law, spec.dim(), T::one(), T::one(), T::one())?;
        let rows = probe_mda_limit(&single, &[T::lit(1e4), T::lit(1e8)], &xs)?;
        let (lo, hi) = rows.split_at(xs.len());
        let stalled: Vec<String> = lo
            .iter()
            .zip(hi)
            .filter(|(a, z)| !(z.radial_deviation() < a.radial_deviation()))
            .map(|(a, _)| a.x.to_string())
            .collect();
        if !stalled.is_empty() {
            return Err(Error::InvalidModel(vec![Violation::RadialMda(format!(
                "{law}: Gumbel ratio not converging for x in [{}]",
                stalled.join(", ")
            ))]));
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.bundle.margins()
    }
    pub fn lambda(&self, j: usize) -> T {
        self.bundle.lambda(j)
    }
    pub fn beta(&self, j: usize) -> T {
        self.bundle.beta(j)
    }
    pub fn gamma(&self) -> T {
        self.bundle.gamma()
    }
    pub fn sigma(&self) -> &CorrelationMatrix<T> {
        &self.sigma
    }
    pub fn cholesky(&self) -> &LowerTriangular<T> {
        &self.chol
    }
    pub fn radial(&self) -> &RadialLaw<T> {
        self.bundle.law()
    }
    pub fn scaling(&self) -> &ScalingBundle<T> {
        &self.bundle
    }

    /// Caller's index of the margin stored at position `j`.
    pub fn original_index(&self, j: usize) -> usize {
        self.original_index[j]
    }

    /// Position of the caller's margin `original`.
    pub fn position_of(&self, original: usize) -> usize {
        self.original_index
            .iter()
            .position(|&i| i == original)
            .expect("original index in range")
    }

    /// Parameters in normalised order; `ModelSpec::new` on them is a no-op
    /// reordering.
    pub fn params(&self) -> ModelParams<T> {
        let d = self.dim();
        ModelParams {
            dim: d,
            lambda: (0..d).map(|j| self.lambda(j)).collect(),
            beta: (0..d).map(|j| self.beta(j)).collect(),
            gamma: self.gamma(),
            sigma: self.sigma.entries().to_vec(),
            radial: *self.radial(),
        }
    }

    /// True when `ln X` is multivariate normal (chi radius of the model
    /// dimension).
    pub fn is_lognormal(&self) -> bool {
        self.radial().is_gaussian_radius(self.dim())
    }

    pub fn marginal_tail(&self, j: usize, u: T) -> Result<T> {
        self.log_marginal_tail(j, u).map(T::exp)
    }

    /// ln P(Xⱼ > u).
    pub fn log_marginal_tail(&self, j: usize, u: T) -> Result<T> {
        self.bundle.log_margin_tail(j, u)
    }

    /// ln P(Xⱼ > u) through the angular integral, whatever the radial law.
    pub fn log_marginal_tail_quadrature(&self, j: usize, u: T) -> Result<T> {
        self.bundle.log_margin_tail_quadrature(j, u)
    }

    pub fn marginal_pdf(&self, j: usize, u: T) -> Result<T> {
        self.log_marginal_pdf(j, u).map(T::exp)
    }

    /// ln of the density of Xⱼ at u: exact for log-normal margins, otherwise
    /// a central difference of the tail with relative step 1e-5.
    pub fn log_marginal_pdf(&self, j: usize, u: T) -> Result<T> {
        if !(u > T::zero()) {
            return Err(domain(format!("marginal density needs u > 0, got {u}")));
        }
        if self.is_lognormal() {
            return log_lognormal_pdf(u, self.lambda(j).ln(), self.bundle.scale(j));
        }
        let h = T::lit(1e-5) * u;
        let mid = self.log_marginal_tail(j, u)?;
        let lo = self.log_marginal_tail(j, u - h)?;
        let hi = self.log_marginal_tail(j, u + h)?;
        let diff = ((lo - mid).exp() - (hi - mid).exp()) / (T::lit(2.0) * h);
        Ok(mid + diff.ln())
    }

    /// Writes θ = L·U for a fresh uniform direction U; `z` is scratch of
    /// length d. Returns |Z| for the normal vector Z that produced U, which
    /// is a χ_d draw independent of U.
    #[inline]
    pub fn draw_direction<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut [T], theta: &mut [T]) -> T {
        for zi in z.iter_mut() {
            *zi = T::std_normal(rng);
        }
        let norm = z.iter().map(|&x| x * x).sum::<T>().sqrt();
        for zi in z.iter_mut() {
            *zi = *zi / norm;
        }
        self.chol.mul_vec_into(z, theta);
        norm
    }

    /// Writes one draw of `(ln X₁, …, ln X_d)` into `out`; `z` and `y` are
    /// scratch of length d.
    #[inline]
    pub fn draw_log<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut [T], y: &mut [T], out: &mut [T]) {
        let radius = self.draw_direction(rng, z, y);
        let r = if self.is_lognormal() {
            radius
        } else {
            self.radial().sample(rng)
        };
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.lambda(j).ln() + self.bundle.scale(j) * r * y[j];
        }
    }
}

/// `n` draws of the risk vector, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T> {
    pub n: usize,
    pub dim: usize,
    pub values: Vec<T>,
    pub seed: u64,
    /// Threshold the batch was drawn for; `None` because Σ does not depend
    /// on u here.
    pub u: Option<T>,
}

impl<T: Real> SampleBatch<T> {
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = T> + '_ {
        self.values.iter().skip(j).step_by(self.dim).copied()
    }
}

/// Draws `n` risk vectors; identical for identical `(spec, n, seed)` on any
/// number of threads.
pub fn sample<T: Real>(spec: &ModelSpec<T>, n: usize, seed: u64) -> Result<SampleBatch<T>> {
    if n == 0 {
        return Err(Error::InvalidParams("sample size must be at least 1".into()));
    }
    let d = spec.dim();
    let mut values = vec![T::zero(); n * d];
    values
        .par_chunks_mut(CHUNK_SIZE * d)
        .enumerate()
        .for_each(|(c, block)| {
            let mut rng = chunk_rng(seed, c as u64);
            let mut z = vec![T::zero(); d];
            let mut y = vec![T::zero(); d];
            for row in block.chunks_mut(d) {
                spec.draw_log(&mut rng, &mut z, &mut y, row);
                for v in row.iter_mut() {
                    *v = v.exp();
                }
            }
        });
    Ok(SampleBatch {
        n,
        dim: d,
        values,
        seed,
        u: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{make_radial, RadialKind};
    use approx::assert_relative_eq;

    fn lognormal(rho: f64) -> ModelSpec<f64> {
        ModelSpec::new(ModelParams::equicorrelated_lognormal(2, rho)).unwrap()
    }

    #[test]
    fn validate_accepts_bivariate_setup() {
        let p = ModelParams::equicorrelated_lognormal(2, 0.9);
        assert!(validate(&p).is_empty());
    }

    #[test]
    fn validate_reports_unit_diagonal() {
        let mut p = ModelParams::equicorrelated_lognormal(2, 0.0);
        p.sigma = vec![1.0, 0.0, 0.0, 0.5];
        let v = validate(&p);
        assert_eq!(v, vec![Violation::Matrix(MatrixIssue::NonUnitDiagonal { index: 1 })]);
        assert!(v[0].to_string().contains("unit diagonal"));
    }

    #[test]
    fn validate_collects_everything() {
        let p = ModelParams {
            dim: 2,
            lambda: vec![1.0, -1.0],
            beta: vec![1.0],
            gamma: 0.0,
            sigma: vec![1.0, 2.0, 2.0, 1.0],
            radial: RadialLaw::chi(2),
        };
        let v = validate(&p);
        assert!(v.contains(&Violation::NonPositive {
            field: "lambda",
            index: Some(1)
        }));
        assert!(v.contains(&Violation::LengthMismatch {
            field: "beta",
            expected: 2,
            actual: 1
        }));
        assert!(v.contains(&Violation::NonPositive {
            field: "gamma",
            index: None
        }));
        assert!(v.contains(&Violation::Matrix(MatrixIssue::OutOfRange { row: 0, col: 1 })));
        assert!(matches!(ModelSpec::new(p), Err(Error::InvalidModel(_))));

        let mut z = ModelParams::equicorrelated_lognormal(1, 0.0);
        z.dim = 0;
        assert_eq!(validate(&z), vec![Violation::ZeroDimension]);
    }

    #[test]
    fn constructor_sorts_margins() {
        let p = ModelParams {
            dim: 3,
            lambda: vec![5.0, 2.0, 3.0],
            beta: vec![1.0, 2.0, 2.0],
            gamma: 1.0,
            sigma: vec![1.0, 0.1, 0.2, 0.1, 1.0, 0.3, 0.2, 0.3, 1.0],
            radial: RadialLaw::chi(3),
        };
        let s = ModelSpec::new(p).unwrap();
        // β descending, ties broken by larger λ first
        assert_eq!((s.beta(0), s.lambda(0)), (2.0, 3.0));
        assert_eq!((s.beta(1), s.lambda(1)), (2.0, 2.0));
        assert_eq!((s.beta(2), s.lambda(2)), (1.0, 5.0));
        assert_eq!(s.original_index(0), 2);
        assert_eq!(s.position_of(0), 2);
        // σ follows the margins
        assert_eq!(s.sigma().get(0, 1), 0.3);
        assert_eq!(s.sigma().get(0, 2), 0.2);
        assert_eq!(s.sigma().get(1, 2), 0.1);
    }

    #[test]
    fn two_margin_sort() {
        let p = ModelParams {
            dim: 2,
            lambda: vec![1.0, 4.0],
            beta: vec![1.0, 2.0],
            gamma: 1.0,
            sigma: vec![1.0, 0.5, 0.5, 1.0],
            radial: RadialLaw::chi(2),
        };
        let s = ModelSpec::new(p).unwrap();
        assert_eq!((s.beta(0), s.beta(1)), (2.0, 1.0));
        assert_eq!((s.lambda(0), s.lambda(1)), (4.0, 1.0));
    }

    #[test]
    fn marginal_tail_examples() {
        let s = lognormal(0.9);
        assert_relative_eq!(
            s.marginal_tail(0, 10.0).unwrap(),
            0.010_651_099_341_700_127,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            s.marginal_tail(1, 1000.0).unwrap(),
            2.461_912_018_815_500_3e-12,
            max_relative = 1e-11
        );
        let p = ModelParams {
            lambda: vec![2.5, 0.3],
            ..ModelParams::equicorrelated_lognormal(2, 0.0)
        };
        let s = ModelSpec::new(p).unwrap();
        assert_relative_eq!(s.marginal_tail(0, 2.5).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.marginal_tail(1, 0.3).unwrap(), 0.5, max_relative = 1e-15);
        assert!(s.marginal_tail(0, 0.0).is_err());
    }

    #[test]
    fn marginal_pdf_examples() {
        let s = lognormal(0.0);
        assert_relative_eq!(
            s.marginal_pdf(0, 10.0).unwrap(),
            2.815_901_890_152_681e-3,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            s.marginal_pdf(0, 1.0).unwrap(),
            0.398_942_280_401_432_7,
            max_relative = 1e-14
        );
        assert!(s.marginal_pdf(0, 1e-30).unwrap() < 1e-300);
        assert!(s.marginal_pdf(0, -1.0).is_err());
    }

    #[test]
    fn numerical_pdf_matches_closed_form() {
        // force the generic path with a chi radius of the wrong dimension,
        // then compare against its own tail derivative at a coarser step
        let p = ModelParams {
            radial: RadialLaw::chi(3),
            ..ModelParams::equicorrelated_lognormal(2, 0.2)
        };
        let s = ModelSpec::new(p).unwrap();
        assert!(!s.is_lognormal());
        for &u in &[0.5, 3.0, 40.0] {
            let pdf = s.marginal_pdf(0, u).unwrap();
            let h = 1e-3 * u;
            let fd = (s.marginal_tail(0, u - h).unwrap() - s.marginal_tail(0, u + h).unwrap()) / (2.0 * h);
            assert_relative_eq!(pdf, fd, max_relative = 1e-5);
        }
        // and the gaussian case through the same route
        let g = lognormal(0.2);
        let u = 7.0;
        let h = 1e-5 * u;
        let fd = (g.marginal_tail(0, u - h).unwrap() - g.marginal_tail(0, u + h).unwrap()) / (2.0 * h);
        assert_relative_eq!(g.marginal_pdf(0, u).unwrap(), fd, max_relative = 1e-8);
    }

    #[test]
    fn strict_mode() {
        assert!(ModelSpec::new_strict(ModelParams::equicorrelated_lognormal(2, 0.5)).is_ok());
        let w = ModelParams {
            radial: make_radial(RadialKind::WeibullTail, &[2.0]).unwrap(),
            ..ModelParams::equicorrelated_lognormal(2, 0.5)
        };
        assert!(ModelSpec::new_strict(w).is_ok());
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>();
        let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>();
        let vb = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn sample_log_correlations() {
        for rho in [0.0, 0.9] {
            let s = lognormal(rho);
            let batch = sample(&s, 1_000_000, 11).unwrap();
            let l1: Vec<f64> = batch.column(0).map(f64::ln).collect();
            let l2: Vec<f64> = batch.column(1).map(f64::ln).collect();
            assert!((corr(&l1, &l2) - rho).abs() < 0.005, "rho={rho}");
            assert!(batch.values.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn sample_log_means() {
        let p = ModelParams {
            lambda: vec![2.0, 0.5, 1.0],
            beta: vec![1.5, 1.0, 0.5],
            gamma: 0.8,
            ..ModelParams::equicorrelated_lognormal(3, 0.3)
        };
        let s = ModelSpec::new(p).unwrap();
        let batch = sample(&s, 1_000_000, 5).unwrap();
        for j in 0..3 {
            let mean = batch.column(j).map(f64::ln).sum::<f64>() / batch.n as f64;
            let tol = 0.005 * s.beta(j) * s.gamma();
            assert!((mean - s.lambda(j).ln()).abs() < tol, "margin {j}: {mean}");
        }
    }

    #[test]
    fn sample_is_reproducible() {
        let s = lognormal(0.5);
        let a = sample(&s, 40_000, 3).unwrap();
        let b = sample(&s, 40_000, 3).unwrap();
        assert_eq!(a, b);
        let c = sample(&s, 40_000, 4).unwrap();
        assert_ne!(a.values, c.values);
        assert!(sample(&s, 0, 3).is_err());
    }
}
