//! Angular distribution models for ray arrival angles.
//!
//! Each model lives on the circle `(-pi, pi]`. Non-clustered variants expose a
//! density; the clustered composite (random cluster centers with per-subray
//! offsets) only samples, because its per-drop density is conditional on the
//! cluster draw and the marginal would misstate it.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::specialfn::{bessel_i0_complex, bessel_i0_real, integrate_1d_panels, QuadratureSpec};
use crate::util::wrap_angle;

/// Wrap terms kept when summing a wrapped density over the integer lattice.
/// Error below 1e-12 for standard deviations up to 120 degrees.
const WRAP_TERMS: i32 = 10;

/// A named law for ray angles.
#[derive(Clone, Debug, PartialEq)]
pub enum AngularModel {
    /// Uniform on `[lo, hi]`, width at most one full turn.
    Uniform { lo: f64, hi: f64 },
    /// Von Mises with location `mu` and concentration `kappa >= 0`.
    VonMises { mu: f64, kappa: f64 },
    /// Gaussian wrapped onto the circle.
    WrappedGaussian { mean: f64, sigma: f64 },
    /// Laplacian (double exponential) wrapped onto the circle; `scale` is the
    /// diversity parameter b (standard deviation = sqrt(2) b before wrapping).
    Laplacian { mean: f64, scale: f64 },
    /// Composite: `clusters` random central angles, each dressed with
    /// `subrays` random offsets. Sampling-only.
    Clustered {
        central: Box<AngularModel>,
        offset: Box<AngularModel>,
        clusters: usize,
        subrays: usize,
    },
}

impl AngularModel {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || hi - lo > TAU + 1e-12 {
            return Err(Error::Config(format!(
                "uniform support needs lo < hi and width <= 2 pi, got [{lo}, {hi}]"
            )));
        }
        Ok(AngularModel::Uniform { lo, hi })
    }

    pub fn von_mises(mu: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::Config(format!("kappa must be >= 0, got {kappa}")));
        }
        Ok(AngularModel::VonMises { mu, kappa })
    }

    pub fn wrapped_gaussian(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(AngularModel::WrappedGaussian { mean, sigma })
    }

    pub fn laplacian(mean: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Config(format!("scale must be > 0, got {scale}")));
        }
        Ok(AngularModel::Laplacian { mean, scale })
    }

    pub fn clustered(
        central: AngularModel,
        offset: AngularModel,
        clusters: usize,
        subrays: usize,
    ) -> Result<Self> {
        if clusters < 1 || subrays < 1 {
            return Err(Error::Config(
                "clustered model needs clusters >= 1 and subrays >= 1".into(),
            ));
        }
        if central.is_clustered() || offset.is_clustered() {
            return Err(Error::Config(
                "clustered model cannot nest clustered components".into(),
            ));
        }
        Ok(AngularModel::Clustered {
            central: Box::new(central),
            offset: Box::new(offset),
            clusters,
            subrays,
        })
    }

    pub fn is_clustered(&self) -> bool {
        matches!(self, AngularModel::Clustered { .. })
    }

    /// Angles drawn per call to `sample(..., 1)`: `clusters * subrays` for the
    /// clustered composite, 1 otherwise.
    pub fn group_size(&self) -> usize {
        match self {
            AngularModel::Clustered {
                clusters, subrays, ..
            } => clusters * subrays,
            _ => 1,
        }
    }

    /// Probability density at `x` (wrapped into the principal interval first).
    ///
    /// The clustered composite has no unconditional density and returns an
    /// unsupported-variant error.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self {
            AngularModel::Clustered { .. } => Err(Error::UnsupportedVariant(
                "pdf of a clustered model is conditional on the cluster draw".into(),
            )),
            _ => Ok(self.pdf_unchecked(x)),
        }
    }

    fn pdf_unchecked(&self, x: f64) -> f64 {
        match self {
            AngularModel::Uniform { lo, hi } => {
                // wrap into [lo, lo + 2 pi)
                let y = lo + (x - lo).rem_euclid(TAU);
                if y <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            AngularModel::VonMises { mu, kappa } => {
                let i0 = bessel_i0_real(*kappa).expect("kappa within range");
                ((kappa * (x - mu).cos()).exp()) / (TAU * i0)
            }
            AngularModel::WrappedGaussian { mean, sigma } => {
                let mut s = 0.0;
                for k in -WRAP_TERMS..=WRAP_TERMS {
                    let u = (x - mean + TAU * k as f64) / sigma;
                    s += (-0.5 * u * u).exp();
                }
                s / (sigma * (TAU).sqrt())
            }
            AngularModel::Laplacian { mean, scale } => {
                let mut s = 0.0;
                for k in -WRAP_TERMS..=WRAP_TERMS {
                    let u = (x - mean + TAU * k as f64).abs() / scale;
                    s += (-u).exp();
                }
                s / (2.0 * scale)
            }
            AngularModel::Clustered { .. } => unreachable!(),
        }
    }

    /// Density at the two endfire directions `(f(+pi/2), f(-pi/2))`.
    pub fn endfire_density(&self) -> Result<(f64, f64)> {
        Ok((self.pdf(FRAC_PI_2)?, self.pdf(-FRAC_PI_2)?))
    }

    /// Integration support of the density.
    fn support(&self) -> (f64, f64) {
        match self {
            AngularModel::Uniform { lo, hi } => (*lo, *hi),
            _ => (-PI, PI),
        }
    }

    /// Interior points where the density is not smooth (quadrature panels are
    /// split there).
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            AngularModel::Laplacian { mean, .. } => vec![wrap_angle(*mean)],
            _ => Vec::new(),
        }
    }

    /// Draw `count` samples (for the clustered composite: `count` draw-groups,
    /// i.e. `count * clusters * subrays` angles).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        match self {
            AngularModel::Clustered {
                central,
                offset,
                clusters,
                subrays,
            } => {
                let mut out = Vec::with_capacity(count * clusters * subrays);
                for _ in 0..count {
                    for _ in 0..*clusters {
                        let c = central.sample_one(rng);
                        for _ in 0..*subrays {
                            out.push(wrap_angle(c + offset.sample_one(rng)));
                        }
                    }
                }
                out
            }
            _ => (0..count).map(|_| self.sample_one(rng)).collect(),
        }
    }

    /// One draw of the marginal law of a single ray. For the clustered
    /// composite this is central + offset.
    pub fn sample_marginal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            AngularModel::Clustered {
                central, offset, ..
            } => wrap_angle(central.sample_one(rng) + offset.sample_one(rng)),
            _ => self.sample_one(rng),
        }
    }

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            AngularModel::Uniform { lo, hi } => {
                let u: f64 = rng.random();
                lo + (hi - lo) * u
            }
            AngularModel::VonMises { mu, kappa } => sample_von_mises(rng, *mu, *kappa),
            AngularModel::WrappedGaussian { mean, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                wrap_angle(mean + sigma * z)
            }
            AngularModel::Laplacian { mean, scale } => {
                let u: f64 = rng.random::<f64>() - 0.5;
                let mag = -(1.0 - 2.0 * u.abs()).ln() * scale;
                wrap_angle(mean + if u >= 0.0 { mag } else { -mag })
            }
            AngularModel::Clustered { .. } => unreachable!("handled by sample()"),
        }
    }
}

/// Best-Fisher rejection sampler for the von Mises law.
fn sample_von_mises<R: Rng + ?Sized>(rng: &mut R, mu: f64, kappa: f64) -> f64 {
    if kappa < 1e-12 {
        let u: f64 = rng.random();
        return wrap_angle(mu + TAU * (u - 0.5));
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.random();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random();
            let theta = if u3 >= 0.5 { f.acos() } else { -f.acos() };
            return wrap_angle(mu + theta);
        }
    }
}

fn charfn_quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 5e-14,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
    }
}

/// Panel count bounding the phase change of `exp(-j q 2 pi d sin x)` per panel.
fn osc_panels(q: u32, d: f64, width: f64) -> usize {
    let p = (1.5 * q as f64 * d * width).ceil() as usize;
    p.max(q as usize).max(8)
}

/// Integrate `g` over `[lo, hi]` split at the given interior breakpoints.
fn integrate_segments<F: Fn(f64) -> Complex64 + Copy>(
    g: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    q: u32,
    d: f64,
) -> Result<Complex64> {
    let mut cuts: Vec<f64> = vec![lo];
    for &b in breaks {
        if b > lo + 1e-12 && b < hi - 1e-12 {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let spec = charfn_quad_spec();
    let mut total = Complex64::default();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        total += integrate_1d_panels(g, a, b, osc_panels(q, d, b - a), &spec)?;
    }
    Ok(total)
}

/// Characteristic value `E[exp(-j q 2 pi d sin(phi))]` by quadrature over the
/// angle density (direct route).
pub fn charfn_oracle(model: &AngularModel, q: u32, d: f64) -> Result<Complex64> {
    if model.is_clustered() {
        return Err(Error::UnsupportedVariant(
            "clustered models have no closed density; estimate by Monte Carlo".into(),
        ));
    }
    if !(d > 0.0) {
        return Err(Error::Domain(format!("spacing d must be positive, got {d}")));
    }
    if q == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let l = TAU * d;
    let m = model.clone();
    let qq = q as f64;
    let g = move |phi: f64| Complex64::from_polar(m.pdf_unchecked(phi), -qq * l * phi.sin());
    let (lo, hi) = model.support();
    integrate_segments(&g, lo, hi, &model.breakpoints(), q, d)
}

/// Same expectation via the transformed-lag density: folding the two branches
/// of `x = 2 pi d sin(phi)` gives
/// `E = Integral_{-pi/2}^{pi/2} exp(-j q 2 pi d sin t) [f(t) + f(pi - t)] dt`.
///
/// An independent evaluation path used to cross-check `charfn_oracle`.
pub fn charfn_oracle_transformed(model: &AngularModel, q: u32, d: f64) -> Result<Complex64> {
    if model.is_clustered() {
        return Err(Error::UnsupportedVariant(
            "clustered models have no closed density; estimate by Monte Carlo".into(),
        ));
    }
    if !(d > 0.0) {
        return Err(Error::Domain(format!("spacing d must be positive, got {d}")));
    }
    if q == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let l = TAU * d;
    let m = model.clone();
    let qq = q as f64;
    let g = move |t: f64| {
        let fold = m.pdf_unchecked(t) + m.pdf_unchecked(wrap_angle(PI - t));
        Complex64::from_polar(fold, -qq * l * t.sin())
    };
    // map density breakpoints through both branches of the fold
    let mut breaks: Vec<f64> = Vec::new();
    let mut push = |t: f64| {
        if t.abs() < FRAC_PI_2 {
            breaks.push(t);
        }
    };
    for b in model.breakpoints() {
        push(wrap_angle(b));
        push(wrap_angle(PI - b));
    }
    if let AngularModel::Uniform { lo, hi } = model {
        for e in [*lo, *hi] {
            push(wrap_angle(e));
            push(wrap_angle(PI - e));
        }
    }
    integrate_segments(&g, -FRAC_PI_2, FRAC_PI_2, &breaks, q, d)
}

/// Both oracle routes, checked against each other within `1e-7`.
pub fn charfn_oracle_checked(model: &AngularModel, q: u32, d: f64) -> Result<Complex64> {
    let direct = charfn_oracle(model, q, d)?;
    let transformed = charfn_oracle_transformed(model, q, d)?;
    let diff = (direct - transformed).norm();
    if diff > 1e-7 {
        return Err(Error::Accuracy {
            estimate: direct,
            achieved: diff,
            requested: 1e-7,
        });
    }
    Ok(direct)
}

/// Exact von Mises characteristic value
/// `I0(sqrt(kappa^2 cos^2 mu + (kappa sin mu - j 2 pi d q)^2)) / I0(kappa)`.
pub fn charfn_exact_vm(mu: f64, kappa: f64, q: u32, d: f64) -> Result<Complex64> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be >= 0, got {kappa}")));
    }
    let a = kappa * mu.cos();
    let b = Complex64::new(kappa * mu.sin(), -TAU * d * q as f64);
    let z = (Complex64::new(a * a, 0.0) + b * b).sqrt();
    let num = bessel_i0_complex(z)?;
    let den = bessel_i0_real(kappa)?;
    Ok(num / den)
}
