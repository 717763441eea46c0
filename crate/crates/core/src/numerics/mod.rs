//! Special functions, quadrature and small dense linear algebra.

mod linalg;
mod quadrature;
mod special;

pub use linalg::{cholesky_factor, CorrelationMatrix, LowerTriangular, MatrixIssue};
pub use quadrature::{integrate, QuadratureOptions, QuadratureResult};
pub use special::{
    gamma_function, ln_gamma, ln_incomplete_gamma, log_lognormal_pdf, log_std_normal_cdf, log_std_normal_pdf,
    log_std_normal_tail, lognormal_pdf, sphere_angle_density, sphere_marginal_density, std_normal_pdf, std_normal_tail,
};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sphere_density_normalised() {
        use std::f64::consts::FRAC_PI_2;
        for d in 2..=10 {
            let r = integrate(
                |t: f64| sphere_angle_density(t, d).unwrap(),
                -FRAC_PI_2,
                FRAC_PI_2,
                QuadratureOptions::default(),
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "d={d}: {}", r.value);
        }
    }

    #[test]
    fn angle_density_matches_substitution() {
        for d in 2..=6 {
            let t = 0.4_f64;
            let direct = sphere_marginal_density(t.sin(), d).unwrap() * t.cos();
            let sub = sphere_angle_density(t, d).unwrap();
            assert!((direct / sub - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn mills_ratio_bound() {
        for k in 0..=300 {
            let x = 10.0 + k as f64 * 0.5;
            let scaled = (log_std_normal_tail(x) + x * x / 2.0).exp() * x * (2.0 * std::f64::consts::PI).sqrt();
            assert!((scaled - 1.0).abs() <= 1.0 / (x * x), "x={x}");
        }
    }

    proptest! {
        #[test]
        fn normal_tail_symmetry(x in -8.0f64..8.0) {
            prop_assert!((std_normal_tail(x) + std_normal_tail(-x) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn log_tail_consistent(x in -30.0f64..30.0) {
            let t = std_normal_tail(x);
            prop_assert!((t.ln() - log_std_normal_tail(x)).abs() <= 1e-12 * log_std_normal_tail(x).abs().max(1.0));
        }
    }
}
