//! Normal tails, Gamma functions and the sphere-coordinate density.

use crate::error::{domain, Result};
use crate::real::Real;

/// `ln(2π)/2`.
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Φ̄(x) = P(N(0,1) > x).
///
/// Underflows only where the true value leaves the `T` range; use
/// [`log_std_normal_tail`] for deeper tails.
pub fn std_normal_tail<T: Real>(x: T) -> T {
    if x < T::lit(T::NORMAL_TAIL_SERIES_FROM) {
        T::lit(0.5) * (x / T::SQRT_2()).comp_erf()
    } else {
        log_std_normal_tail(x).exp()
    }
}

/// ln Φ̄(x), finite for every finite `x`.
pub fn log_std_normal_tail<T: Real>(x: T) -> T {
    let switch = T::lit(T::NORMAL_TAIL_SERIES_FROM);
    if x >= switch {
        return log_mills_tail(x);
    }
    if x < T::zero() {
        // 1 - Φ̄(-x), accurate when Φ̄(-x) is tiny
        let upper = T::lit(0.5) * (-x / T::SQRT_2()).comp_erf();
        return (-upper).ln_1p();
    }
    (T::lit(0.5) * (x / T::SQRT_2()).comp_erf()).ln()
}

/// ln Φ(x) = ln P(N(0,1) ≤ x).
pub fn log_std_normal_cdf<T: Real>(x: T) -> T {
    log_std_normal_tail(-x)
}

/// Asymptotic expansion Φ̄(x) = φ(x)/x · Σ (-1)^k (2k-1)!! / x^{2k}, summed
/// until the terms stop shrinking.
fn log_mills_tail<T: Real>(x: T) -> T {
    let inv_x2 = (x * x).recip();
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..200 {
        let next = -term * T::lit((2 * k - 1) as f64) * inv_x2;
        if next.abs() >= term.abs() || next.abs() < T::epsilon() * sum.abs() {
            if next.abs() < term.abs() {
                sum = sum + next;
            }
            break;
        }
        term = next;
        sum = sum + term;
    }
    -x * x / T::lit(2.0) - x.ln() - T::lit(HALF_LN_2PI) + sum.ln()
}

/// Standard normal density φ(x).
pub fn std_normal_pdf<T: Real>(x: T) -> T {
    log_std_normal_pdf(x).exp()
}

pub fn log_std_normal_pdf<T: Real>(x: T) -> T {
    -x * x / T::lit(2.0) - T::lit(HALF_LN_2PI)
}

/// Density of a log-normal law with log-mean `mu` and log-scale `sigma` at `u`.
pub fn lognormal_pdf<T: Real>(u: T, mu: T, sigma: T) -> Result<T> {
    log_lognormal_pdf(u, mu, sigma).map(T::exp)
}

pub fn log_lognormal_pdf<T: Real>(u: T, mu: T, sigma: T) -> Result<T> {
    if !(u > T::zero()) {
        return Err(domain(format!("log-normal density needs u > 0, got {u}")));
    }
    if !(sigma > T::zero()) {
        return Err(domain(format!("log-normal density needs sigma > 0, got {sigma}")));
    }
    let z = (u.ln() - mu) / sigma;
    Ok(log_std_normal_pdf(z) - u.ln() - sigma.ln())
}

/// Euler Gamma function on `s > 0`.
pub fn gamma_function<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(domain(format!("Gamma function needs s > 0, got {s}")));
    }
    Ok(s.tgamma())
}

/// ln Γ(s) on `s > 0`.
pub fn ln_gamma<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(domain(format!("ln Gamma needs s > 0, got {s}")));
    }
    Ok(s.lgamma())
}

/// ln of the normalising constant Γ(d/2) / (√π Γ((d-1)/2)) of the
/// sphere-coordinate density.
fn ln_sphere_const<T: Real>(d: u32) -> T {
    let d = T::lit(d as f64);
    let two = T::lit(2.0);
    (d / two).lgamma() - T::PI().sqrt().ln() - ((d - T::one()) / two).lgamma()
}

/// Density h of one coordinate of a point drawn uniformly on the unit sphere
/// of R^d, on (-1, 1).
pub fn sphere_marginal_density<T: Real>(x: T, d: u32) -> Result<T> {
    if d < 2 {
        return Err(domain(format!("sphere coordinate density needs d >= 2, got {d}")));
    }
    if !(x.abs() < T::one()) {
        return Err(domain(format!("sphere coordinate density needs |x| < 1, got {x}")));
    }
    let expo = T::lit((d as f64 - 3.0) / 2.0);
    Ok((ln_sphere_const::<T>(d) + expo * (T::one() - x * x).ln()).exp())
}

/// The same density after the substitution x = sin t, including the Jacobian:
/// h(sin t) cos t = C_d cos^{d-2} t on (-π/2, π/2). Smooth for every d ≥ 2.
pub fn sphere_angle_density<T: Real>(t: T, d: u32) -> Result<T> {
    if d < 2 {
        return Err(domain(format!("sphere coordinate density needs d >= 2, got {d}")));
    }
    if !(t.abs() < T::FRAC_PI_2()) {
        return Err(domain(format!("angle must lie in (-pi/2, pi/2), got {t}")));
    }
    let c = ln_sphere_const::<T>(d).exp();
    Ok(c * t.cos().powi(d as i32 - 2))
}

/// Regularised incomplete Gamma functions in log form: `(ln P(a,x), ln Q(a,x))`.
pub fn ln_incomplete_gamma<T: Real>(a: T, x: T) -> Result<(T, T)> {
    if !(a > T::zero()) {
        return Err(domain(format!("incomplete Gamma needs a > 0, got {a}")));
    }
    if x <= T::zero() {
        return Ok((T::neg_infinity(), T::zero()));
    }
    if x == T::infinity() {
        return Ok((T::zero(), T::neg_infinity()));
    }
    let ln_prefix = a * x.ln() - x - a.lgamma();
    if x < a + T::one() {
        // series for P
        let mut ap = a;
        let mut del = a.recip();
        let mut sum = del;
        for _ in 0..10_000 {
            ap = ap + T::one();
            del = del * x / ap;
            sum = sum + del;
            if del.abs() < sum.abs() * T::epsilon() {
                break;
            }
        }
        let ln_p = ln_prefix + sum.ln();
        let ln_q = (-ln_p.exp()).ln_1p();
        Ok((ln_p, ln_q))
    } else {
        // modified Lentz continued fraction for Q
        let tiny = T::min_positive_value() / T::epsilon();
        let mut b = x + T::one() - a;
        let mut c = tiny.recip();
        let mut d = b.recip();
        let mut h = d;
        for i in 1..10_000 {
            let i = T::lit(i as f64);
            let an = -i * (i - a);
            b = b + T::lit(2.0);
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = d.recip();
            let del = d * c;
            h = h * del;
            if (del - T::one()).abs() < T::epsilon() {
                break;
            }
        }
        let ln_q = ln_prefix + h.ln();
        let ln_p = (-ln_q.exp()).ln_1p();
        Ok((ln_p, ln_q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_tail_reference_values() {
        assert_eq!(std_normal_tail(0.0_f64), 0.5);
        // frozen from a 40-digit erfc evaluation
        assert_relative_eq!(
            std_normal_tail(10f64.ln()),
            0.010_651_099_341_700_127,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            std_normal_tail(100f64.ln()),
            2.060_643_395_971_720_1e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            std_normal_tail(1000f64.ln()),
            2.461_912_018_815_500_3e-12,
            max_relative = 1e-11
        );
    }

    #[test]
    fn normal_tail_deep() {
        let t38 = std_normal_tail(38.0_f64);
        assert!(t38 > 0.0);
        assert_relative_eq!(t38, 2.885_428_360_068_784e-316, max_relative = 1e-10);
        assert_relative_eq!(
            log_std_normal_tail(40.0_f64),
            -804.608_442_013_753_8,
            max_relative = 1e-14
        );
        // the two branches meet smoothly at the switch point
        let s = f64::NORMAL_TAIL_SERIES_FROM;
        let below = (0.5 * libm::erfc((s - 1e-9) / std::f64::consts::SQRT_2)).ln();
        assert_relative_eq!(log_std_normal_tail(s), below, max_relative = 1e-10);
    }

    #[test]
    fn normal_tail_negative_argument() {
        assert_relative_eq!(
            log_std_normal_tail(-40.0_f64),
            -std_normal_tail(40.0_f64),
            max_relative = 1e-12
        );
        assert_relative_eq!(std_normal_tail(-3.0_f64), 1.0 - std_normal_tail(3.0), epsilon = 1e-15);
    }

    #[test]
    fn normal_tail_f32() {
        assert!((std_normal_tail(1.0_f32) - 0.158_655_25).abs() < 1e-6);
        let lt = log_std_normal_tail(12.0_f32) as f64;
        assert!((lt - log_std_normal_tail(12.0_f64)).abs() < 1e-4);
    }

    #[test]
    fn lognormal_density() {
        assert_relative_eq!(
            lognormal_pdf(1.0_f64, 0.0, 1.0).unwrap(),
            0.398_942_280_401_432_7,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            lognormal_pdf(10.0_f64, 0.0, 1.0).unwrap(),
            2.815_901_890_152_681e-3,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            lognormal_pdf(std::f64::consts::E, 1.0, 1.0).unwrap(),
            0.146_762_663_173_739_9,
            max_relative = 1e-13
        );
        assert!(lognormal_pdf(0.0_f64, 0.0, 1.0).is_err());
        assert!(lognormal_pdf(-1.0_f64, 0.0, 1.0).is_err());
    }

    #[test]
    fn lognormal_density_matches_cdf_derivative() {
        // central difference of the log-normal CDF Φ(ln u)
        let u = 10.0_f64;
        let h = 1e-5;
        let cdf = |x: f64| 1.0 - std_normal_tail(x.ln());
        let fd = (cdf(u + h) - cdf(u - h)) / (2.0 * h);
        assert_relative_eq!(lognormal_pdf(u, 0.0, 1.0).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma_function(1.0_f64).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            gamma_function(0.5_f64).unwrap(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(gamma_function(5.0_f64).unwrap(), 24.0, max_relative = 1e-14);
        assert!(gamma_function(0.0_f64).is_err());
        assert!(gamma_function(-1.5_f64).is_err());
    }

    #[test]
    fn gamma_accuracy_on_grid() {
        // factorials and half-integers up to 50
        let mut fact = 1.0_f64;
        for n in 1..50u32 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let g = gamma_function(n as f64).unwrap();
            assert!((g / fact - 1.0).abs() < 1e-12, "Gamma({n})");
        }
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let mut half = std::f64::consts::PI.sqrt();
        for n in 0..49u32 {
            let s = n as f64 + 0.5;
            let g = gamma_function(s).unwrap();
            assert!((g / half - 1.0).abs() < 1e-12, "Gamma({s})");
            half *= s;
        }
        // small arguments via Γ(s) = Γ(s+1)/s
        for &s in &[1e-6f64, 1e-3, 0.1, 0.25, 0.75] {
            let lhs = gamma_function(s).unwrap();
            let rhs = gamma_function(s + 1.0).unwrap() / s;
            assert!((lhs / rhs - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn sphere_density_values() {
        assert_relative_eq!(sphere_marginal_density(0.3_f64, 3).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(
            sphere_marginal_density(0.0_f64, 2).unwrap(),
            std::f64::consts::FRAC_1_PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            sphere_marginal_density(0.0_f64, 4).unwrap(),
            std::f64::consts::FRAC_2_PI,
            max_relative = 1e-14
        );
        assert!(sphere_marginal_density(1.0_f64, 3).is_err());
        assert!(sphere_marginal_density(-1.2_f64, 3).is_err());
        assert!(sphere_marginal_density(0.0_f64, 1).is_err());
    }

    #[test]
    fn incomplete_gamma_against_closed_forms() {
        // a = 1: Q = exp(-x)
        for &x in &[0.1, 1.0, 2.5, 10.0, 700.0, 1e6] {
            let (lp, lq) = ln_incomplete_gamma(1.0_f64, x).unwrap();
            assert_relative_eq!(lq, -x, max_relative = 1e-13, epsilon = 1e-15);
            assert_relative_eq!(lp.exp(), -(-x).exp_m1(), max_relative = 1e-12);
        }
        // a = 1/2: Q = erfc(√x)
        for &x in &[0.01, 0.3, 1.0, 4.0, 30.0] {
            let (_, lq) = ln_incomplete_gamma(0.5_f64, x).unwrap();
            assert_relative_eq!(lq.exp(), libm::erfc(x.sqrt()), max_relative = 1e-12);
        }
        // a = 3/2: Q = erfc(√x) + 2√(x/π) e^{-x}
        for &x in &[0.2, 1.0, 3.0, 12.0] {
            let (_, lq) = ln_incomplete_gamma(1.5_f64, x).unwrap();
            let exact = libm::erfc(x.sqrt()) + 2.0 * (x / std::f64::consts::PI).sqrt() * (-x).exp();
            assert_relative_eq!(lq.exp(), exact, max_relative = 1e-12);
        }
    }
}
