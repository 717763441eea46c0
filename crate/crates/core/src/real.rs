//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, OpenClosed01, StandardNormal};

/// Floating point scalar (`f32` or `f64`) with the special functions the
/// tail computations need.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Argument beyond which the normal log-tail switches from `erfc` to the
    /// asymptotic Mills-ratio series (before `erfc` loses precision to
    /// subnormals).
    const NORMAL_TAIL_SERIES_FROM: f64;

    /// Complementary error function.
    fn comp_erf(self) -> Self;
    /// Euler Gamma function.
    fn tgamma(self) -> Self;
    /// Natural logarithm of |Γ(self)|.
    fn lgamma(self) -> Self;

    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// Uniform draw on (0, 1].
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const NORMAL_TAIL_SERIES_FROM: f64 = 20.0;

    #[inline]
    fn comp_erf(self) -> Self {
        libm::erfc(self)
    }
    #[inline]
    fn tgamma(self) -> Self {
        libm::tgamma(self)
    }
    #[inline]
    fn lgamma(self) -> Self {
        libm::lgamma(self)
    }
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    #[inline]
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
        OpenClosed01.sample(rng)
    }
}

impl Real for f32 {
    const NORMAL_TAIL_SERIES_FROM: f64 = 9.0;

    #[inline]
    fn comp_erf(self) -> Self {
        libm::erfcf(self)
    }
    #[inline]
    fn tgamma(self) -> Self {
        libm::tgammaf(self)
    }
    #[inline]
    fn lgamma(self) -> Self {
        libm::lgammaf(self)
    }
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    #[inline]
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
        OpenClosed01.sample(rng)
    }
}

/// `ln(exp(a) + exp(b))` without overflow or underflow.
#[inline]
pub fn ln_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp over a slice; `-inf` for an empty slice.
pub fn ln_sum_exp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || !max.is_finite() {
        return max;
    }
    let s: T = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}
