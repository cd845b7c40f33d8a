//! Bessel functions J0 (real argument) and I0 (complex argument).
//!
//! Both use the ascending power series inside `SERIES_RADIUS` and the Hankel
//! compound asymptotic expansion outside. The series is accumulated in
//! double-double arithmetic: on the imaginary axis the terms grow to ~e^25
//! before cancelling down to an O(1) result, which would strip ~11 digits in
//! plain f64. The two branches agree to better than 1e-10 on the switchover
//! circle (covered in tests).

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use super::dd::{Cdd, Dd};
use crate::error::{Error, Result};

/// Switchover radius between the power series and the asymptotic expansion.
pub(crate) const SERIES_RADIUS: f64 = 25.0;

/// Real part beyond which e^z overflows f64 comfortably.
const OVERFLOW_RE: f64 = 700.0;

/// Zero-order Bessel function of the first kind, real argument.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 needs finite x, got {x}")));
    }
    let ax = x.abs();
    if ax <= SERIES_RADIUS {
        Ok(j0_series(ax))
    } else {
        Ok(j0_hankel(Complex64::new(ax, 0.0)).re)
    }
}

/// Zero-order modified Bessel function of the first kind, complex argument.
///
/// Returns an explicit overflow error once `e^{|Re z|}` leaves the f64 range
/// rather than silently saturating to infinity.
pub fn bessel_i0_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_i0_complex needs finite z, got {z}"
        )));
    }
    if z.re.abs() > OVERFLOW_RE {
        return Err(Error::Overflow(format!(
            "bessel_i0_complex: |Re z| = {} exceeds representable e^x range",
            z.re.abs()
        )));
    }
    // I0 is even; normalize to Re z >= 0.
    let z = if z.re < 0.0 { -z } else { z };
    if z.norm() <= SERIES_RADIUS {
        Ok(i0_series(z))
    } else {
        // I0(z) = J0(-jz) = J0(jz); rotate so the Hankel expansion sees
        // an argument in the right half-plane.
        let w = if z.im >= 0.0 {
            Complex64::new(z.im, -z.re)
        } else {
            Complex64::new(-z.im, z.re)
        };
        Ok(j0_hankel(w))
    }
}

/// I0 restricted to the real axis (von Mises normalization constant).
pub fn bessel_i0_real(x: f64) -> Result<f64> {
    Ok(bessel_i0_complex(Complex64::new(x, 0.0))?.re)
}

/// Ascending series for J0(x) = sum (-1)^k (x^2/4)^k / (k!)^2, |x| small.
fn j0_series(x: f64) -> f64 {
    let q = Dd::from_f64(x).mul(Dd::from_f64(x)).scale(-0.25);
    let mut term = Dd::from_f64(1.0);
    let mut sum = term;
    for k in 1..200u32 {
        term = term.mul(q).div_f64((k as f64) * (k as f64));
        sum = sum.add(term);
        if term.hi.abs() < 1e-40 {
            break;
        }
    }
    sum.value()
}

/// Ascending series for I0(z) = sum (z^2/4)^k / (k!)^2, |z| <= SERIES_RADIUS.
fn i0_series(z: Complex64) -> Complex64 {
    let zdd = Cdd::from_f64(z.re, z.im);
    let q = zdd.mul(zdd).scale(0.25);
    let mut term = Cdd::from_f64(1.0, 0.0);
    let mut sum = term;
    for k in 1..200u32 {
        term = term.mul(q).div_f64((k as f64) * (k as f64));
        sum = sum.add(term);
        if term.norm_value() < 1e-40 {
            break;
        }
    }
    Complex64::new(sum.re.value(), sum.im.value())
}

/// Hankel compound asymptotic expansion of J0(w) for Re(w) >= 0, |w| large:
///
///   J0(w) = sqrt(2/(pi w)) * [ e^{+j(w - pi/4)} S(-j) + e^{-j(w - pi/4)} S(+j) ] / 2,
///   S(s)  = sum_k [(2k-1)!!]^2 / k! * (s / (8w))^k.
///
/// Keeping both exponentials matters near the imaginary axis, where they are
/// comparable in size (this is exactly the I0(jx) = J0(x) regime).
pub(crate) fn j0_hankel(w: Complex64) -> Complex64 {
    debug_assert!(w.re >= 0.0);
    let inv8w = 0.125 / w;
    let series = |sigma: Complex64| -> Complex64 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        let mut prev = f64::INFINITY;
        for k in 1..60u32 {
            let kk = k as f64;
            term *= sigma * inv8w * ((2.0 * kk - 1.0) * (2.0 * kk - 1.0) / kk);
            let mag = term.norm();
            if mag >= prev {
                // asymptotic series started diverging; stop at the smallest term
                break;
            }
            sum += term;
            prev = mag;
            if mag < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    };
    let chi = w - Complex64::new(FRAC_PI_4, 0.0);
    let i = Complex64::i();
    let e_plus = (i * chi).exp();
    let e_minus = (-i * chi).exp();
    let pref = (Complex64::new(2.0 / PI, 0.0) / w).sqrt();
    0.5 * pref * (e_plus * series(-i) + e_minus * series(i))
}
