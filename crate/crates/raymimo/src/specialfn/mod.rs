//! Special functions and quadrature primitives.
//!
//! Everything here is pure and re-entrant; there is no shared mutable state.

mod bessel;
mod dd;
mod quad;

pub use bessel::{bessel_i0_complex, bessel_i0_real, bessel_j0};
pub use quad::{integrate_1d, integrate_1d_panels, QuadratureSpec};

use crate::util::wrap_angle;

/// Normalized Dirichlet-kernel cross magnitude
/// `(1/n) |sin(n tau / 2) / sin(tau / 2)|`, continuously extended at
/// `tau = 2 pi k` where it equals 1.
///
/// This is the modulus of the normalized inner product of two uniform-array
/// steering vectors whose phase lags differ by `tau` per element.
pub fn dirichlet_cross(tau: f64, n: usize) -> f64 {
    assert!(n >= 1, "dirichlet_cross needs n >= 1");
    let nf = n as f64;
    // The kernel has period 2 pi in tau; reduce first so the small-angle
    // fallback also covers tau near nonzero multiples of 2 pi.
    let u = wrap_angle(tau);
    let s = (0.5 * u).sin();
    let v = if s.abs() < 1e-8 {
        // sin(n u / 2) / (n sin(u / 2)) = 1 - (n^2 - 1) u^2 / 24 + O(u^4)
        1.0 - (nf * nf - 1.0) * u * u / 24.0
    } else {
        ((0.5 * nf * u).sin() / (nf * s)).abs()
    };
    v.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn dirichlet_coherent_limit() {
        assert_eq!(dirichlet_cross(0.0, 64), 1.0);
        assert!((dirichlet_cross(1e-12, 64) - 1.0).abs() < 1e-12);
        // continuity at the 2 pi alias
        assert!((dirichlet_cross(TAU, 64) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_first_null() {
        assert!(dirichlet_cross(TAU / 64.0, 64) < 1e-12);
    }

    #[test]
    fn dirichlet_null_at_pi_for_n4() {
        // |sin(2 pi) / (4 sin(pi/2))| = 0
        assert!(dirichlet_cross(PI, 4) < 1e-12);
    }

    #[test]
    fn dirichlet_taylor_matches_ratio_across_threshold() {
        // Values just above and below the series switch agree.
        for &n in &[3usize, 64, 4096] {
            let nf = n as f64;
            let u1 = 1.9e-8; // sin(u/2) just below 1e-8
            let u2 = 2.1e-8;
            let a = dirichlet_cross(u1, n);
            let b = dirichlet_cross(u2, n);
            let exact = |u: f64| ((0.5 * nf * u).sin() / (nf * (0.5 * u).sin())).abs();
            assert!((a - exact(u1)).abs() < 1e-12);
            assert!((b - exact(u2)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn dirichlet_in_unit_interval_and_periodic(tau in -50.0f64..50.0, n in 1usize..2000) {
            let v = dirichlet_cross(tau, n);
            prop_assert!((0.0..=1.0).contains(&v));
            let w = dirichlet_cross(tau + TAU, n);
            prop_assert!((v - w).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn quadrature_is_linear(a1 in 0.2f64..3.0, b1 in 0.2f64..3.0,
                                w1 in 1.0f64..9.0, w2 in 1.0f64..9.0) {
            let spec = QuadratureSpec::default();
            let f = move |x: f64| Complex64::new((w1 * x).sin(), (w1 * x).cos());
            let g = move |x: f64| Complex64::new((w2 * x).cos() * x, 0.5 * x);
            let lhs = integrate_1d(move |x| a1 * f(x) + b1 * g(x), 0.0, 2.0, &spec).unwrap();
            let rhs = a1 * integrate_1d(f, 0.0, 2.0, &spec).unwrap()
                + b1 * integrate_1d(g, 0.0, 2.0, &spec).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-8);
        }
    }
}

