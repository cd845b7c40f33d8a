//! Array geometries, steering vectors, and ray-based channel synthesis.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::TAU;

use crate::angular::AngularModel;
use crate::error::{Error, Result};
use crate::util::NeumaierSumC;

/// Uniform linear or planar array; spacings in wavelengths.
#[derive(Clone, Debug, PartialEq)]
pub enum ArrayGeometry {
    Ula { n: usize, d: f64 },
    Upa { nx: usize, ny: usize, dx: f64, dy: f64 },
}

impl ArrayGeometry {
    pub fn ula(n: usize, d: f64) -> Result<Self> {
        if n < 1 || !(d > 0.0) {
            return Err(Error::Config(format!("ULA needs n >= 1, d > 0 (n={n}, d={d})")));
        }
        Ok(ArrayGeometry::Ula { n, d })
    }

    pub fn upa(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0) {
            return Err(Error::Config(format!(
                "UPA needs nx, ny >= 1 and dx, dy > 0 (nx={nx}, ny={ny}, dx={dx}, dy={dy})"
            )));
        }
        Ok(ArrayGeometry::Upa { nx, ny, dx, dy })
    }

    /// Total element count.
    pub fn n(&self) -> usize {
        match self {
            ArrayGeometry::Ula { n, .. } => *n,
            ArrayGeometry::Upa { nx, ny, .. } => nx * ny,
        }
    }

    pub fn is_upa(&self) -> bool {
        matches!(self, ArrayGeometry::Upa { .. })
    }
}

/// ULA steering vector: element k carries phase `2 pi k d sin(phi)`,
/// broadside at `phi = 0`.
pub fn steering_ula(n: usize, d: f64, phi: f64) -> Vec<Complex64> {
    let step = TAU * d * phi.sin();
    (0..n)
        .map(|k| Complex64::from_polar(1.0, step * k as f64))
        .collect()
}

/// UPA steering vector as the Kronecker product `a_x (x) a_y` with per-axis
/// phase steps `2 pi dx sin(theta) cos(phi)` and `2 pi dy sin(theta) sin(phi)`;
/// `theta` is measured from the zenith.
pub fn steering_upa(
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    theta: f64,
    phi: f64,
) -> Vec<Complex64> {
    let sx = TAU * dx * theta.sin() * phi.cos();
    let sy = TAU * dy * theta.sin() * phi.sin();
    let ax: Vec<Complex64> = (0..nx)
        .map(|k| Complex64::from_polar(1.0, sx * k as f64))
        .collect();
    let ay: Vec<Complex64> = (0..ny)
        .map(|k| Complex64::from_polar(1.0, sy * k as f64))
        .collect();
    let mut out = Vec::with_capacity(nx * ny);
    for x in &ax {
        for y in &ay {
            out.push(x * y);
        }
    }
    out
}

fn steering(geom: &ArrayGeometry, azimuth: f64, zenith: f64) -> Vec<Complex64> {
    match geom {
        ArrayGeometry::Ula { n, d } => steering_ula(*n, *d, azimuth),
        ArrayGeometry::Upa { nx, ny, dx, dy } => {
            steering_upa(*nx, *ny, *dx, *dy, zenith, azimuth)
        }
    }
}

/// How the complex ray gains are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientModel {
    /// `sqrt(beta_r) * exp(j Phi)` with uniform phase: deterministic per-ray power.
    RandomPhase,
    /// `sqrt(beta_r) * u`, `u ~ CN(0, 1)`: exponentially distributed per-ray power.
    ComplexGaussian,
}

/// Per-user ray ensemble: ray count, per-ray powers, gain model, angle models.
#[derive(Clone, Debug)]
pub struct RayChannelSpec {
    pub ray_powers: Vec<f64>,
    pub coefficient_model: CoefficientModel,
    pub azimuth: AngularModel,
    /// Zenith-angle model; present iff the geometry is planar.
    pub elevation: Option<AngularModel>,
}

impl RayChannelSpec {
    pub fn new(
        ray_powers: Vec<f64>,
        coefficient_model: CoefficientModel,
        azimuth: AngularModel,
        elevation: Option<AngularModel>,
    ) -> Result<Self> {
        if ray_powers.is_empty() {
            return Err(Error::Config("at least one ray is required".into()));
        }
        if ray_powers.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::Config("ray powers must be finite and >= 0".into()));
        }
        let p = ray_powers.len();
        if azimuth.group_size() > 1 && azimuth.group_size() != p {
            return Err(Error::Config(format!(
                "clustered azimuth model yields {} angles per draw but the spec has {p} rays",
                azimuth.group_size()
            )));
        }
        if let Some(el) = &elevation {
            if el.group_size() > 1 && el.group_size() != p {
                return Err(Error::Config(format!(
                    "clustered elevation model yields {} angles per draw but the spec has {p} rays",
                    el.group_size()
                )));
            }
        }
        Ok(RayChannelSpec {
            ray_powers,
            coefficient_model,
            azimuth,
            elevation,
        })
    }

    pub fn rays(&self) -> usize {
        self.ray_powers.len()
    }

    /// Total link gain (sum of ray powers).
    pub fn beta(&self) -> f64 {
        self.ray_powers.iter().sum()
    }

    /// Spec with every ray power scaled by `c` (link-gain reassignment).
    pub fn scaled(&self, c: f64) -> RayChannelSpec {
        let mut s = self.clone();
        for b in &mut s.ray_powers {
            *b *= c;
        }
        s
    }
}

/// `count` equal powers summing to `total`.
pub fn equal_powers(count: usize, total: f64) -> Vec<f64> {
    vec![total / count as f64; count]
}

/// `count` powers decaying exponentially so the last is `first / ratio`,
/// scaled to sum to `total`.
pub fn exp_decay_powers(count: usize, total: f64, ratio: f64) -> Vec<f64> {
    if count == 1 {
        return vec![total];
    }
    let w: Vec<f64> = (0..count)
        .map(|k| ratio.powf(-(k as f64) / (count as f64 - 1.0)))
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x * total / s).collect()
}

/// One synthesized user channel: the vector, plus the rays that built it.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub geometry: ArrayGeometry,
    pub azimuths: Vec<f64>,
    /// Zenith angles; empty for a ULA.
    pub zeniths: Vec<f64>,
    pub gains: Vec<Complex64>,
    pub h: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn rays(&self) -> usize {
        self.gains.len()
    }

    /// Rebuild `h` from the stored rays (reconstruction invariant).
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut acc = vec![NeumaierSumC::default(); n];
        for r in 0..self.rays() {
            let zen = self.zeniths.get(r).copied().unwrap_or(0.0);
            let a = steering(&self.geometry, self.azimuths[r], zen);
            for (k, ak) in a.iter().enumerate() {
                acc[k].add(self.gains[r] * ak);
            }
        }
        acc.into_iter().map(|s| s.value()).collect()
    }
}

/// Draw one channel realization: fresh ray angles and gains, then the
/// superposition of steering vectors.
pub fn generate_channel<R: Rng + ?Sized>(
    spec: &RayChannelSpec,
    geom: &ArrayGeometry,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if geom.is_upa() != spec.elevation.is_some() {
        return Err(Error::Config(
            "elevation model must be present exactly when the geometry is planar".into(),
        ));
    }
    let p = spec.rays();

    let azimuths = sample_angles(&spec.azimuth, p, rng)?;
    let zeniths = match &spec.elevation {
        Some(el) => sample_angles(el, p, rng)?,
        None => Vec::new(),
    };

    let gains: Vec<Complex64> = spec
        .ray_powers
        .iter()
        .map(|&beta| {
            let amp = beta.sqrt();
            match spec.coefficient_model {
                CoefficientModel::RandomPhase => {
                    let phase: f64 = rng.random::<f64>() * TAU;
                    Complex64::from_polar(amp, phase)
                }
                CoefficientModel::ComplexGaussian => {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    amp * Complex64::new(re, im) / 2f64.sqrt()
                }
            }
        })
        .collect();

    let n = geom.n();
    let mut acc = vec![NeumaierSumC::default(); n];
    for r in 0..p {
        let zen = zeniths.get(r).copied().unwrap_or(0.0);
        let a = steering(geom, azimuths[r], zen);
        for (k, ak) in a.iter().enumerate() {
            acc[k].add(gains[r] * ak);
        }
    }
    Ok(ChannelRealization {
        geometry: geom.clone(),
        azimuths,
        zeniths,
        gains,
        h: acc.into_iter().map(|s| s.value()).collect(),
    })
}

fn sample_angles<R: Rng + ?Sized>(
    model: &AngularModel,
    p: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let angles = if model.group_size() > 1 {
        model.sample(rng, 1)
    } else {
        model.sample(rng, p)
    };
    if angles.len() != p {
        return Err(Error::Config(format!(
            "angle model produced {} angles for {p} rays",
            angles.len()
        )));
    }
    Ok(angles)
}

/// Exact complex inner product `u^H v`, conjugate-linear in the first
/// argument, accumulated with compensation (Dirichlet nulls cancel almost
/// completely at large N).
pub fn cross_inner(u: &ChannelRealization, v: &ChannelRealization) -> Result<Complex64> {
    if u.n() != v.n() {
        return Err(Error::Dimension {
            left: u.n(),
            right: v.n(),
        });
    }
    let mut s = NeumaierSumC::default();
    for (a, b) in u.h.iter().zip(v.h.iter()) {
        s.add(a.conj() * b);
    }
    Ok(s.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::specialfn::dirichlet_cross;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    #[test]
    fn ula_broadside_all_ones() {
        let a = steering_ula(2, 0.5, 0.0);
        assert_eq!(a, vec![Complex64::new(1.0, 0.0); 2]);
    }

    #[test]
    fn ula_endfire_alternates() {
        let a = steering_ula(2, 0.5, FRAC_PI_2);
        assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((a[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ula_30_degrees_quarter_turns() {
        // sin(pi/6) = 1/2 gives a phase step of pi/2 per element
        let a = steering_ula(4, 0.5, FRAC_PI_6);
        for (k, v) in a.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, PI * k as f64 / 2.0);
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn upa_zenith_zero_all_ones() {
        let a = steering_upa(3, 4, 0.5, 0.5, 0.0, 1.1);
        for v in a {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn upa_single_row_reduces_to_ula() {
        let theta = 0.7;
        let phi = 0.4;
        let upa = steering_upa(2, 1, 0.5, 0.5, theta, phi);
        // effective ULA angle has sin(phi_eff) = sin(theta) cos(phi)
        let eff = (theta.sin() * phi.cos()).asin();
        let ula = steering_ula(2, 0.5, eff);
        for (a, b) in upa.iter().zip(ula.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_is_unit_modulus() {
        for v in steering_upa(4, 5, 0.7, 0.3, 1.1, -2.0)
            .iter()
            .chain(steering_ula(16, 0.5, 1.3).iter())
        {
            assert!((v.norm() - 1.0).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn upa_factorizes_into_dirichlet_product(
            th1 in -1.5f64..1.5, ph1 in -3.1f64..3.1,
            th2 in -1.5f64..1.5, ph2 in -3.1f64..3.1,
        ) {
            let (nx, ny, dx, dy) = (5usize, 3usize, 0.5, 0.4);
            let a = steering_upa(nx, ny, dx, dy, th1, ph1);
            let b = steering_upa(nx, ny, dx, dy, th2, ph2);
            let mut inner = Complex64::default();
            for (x, y) in a.iter().zip(b.iter()) {
                inner += x.conj() * y;
            }
            let n = (nx * ny) as f64;
            let tau_x = TAU * dx * (th2.sin() * ph2.cos() - th1.sin() * ph1.cos());
            let tau_y = TAU * dy * (th2.sin() * ph2.sin() - th1.sin() * ph1.sin());
            let expect = dirichlet_cross(tau_x, nx) * dirichlet_cross(tau_y, ny);
            prop_assert!((inner.norm() / n - expect).abs() < 1e-12);
        }
    }

    fn unit_ray_spec(p: usize, model: CoefficientModel) -> RayChannelSpec {
        RayChannelSpec::new(
            equal_powers(p, 1.0),
            model,
            AngularModel::uniform(0.0, TAU).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_unit_ray_has_unit_elements() {
        let geom = ArrayGeometry::ula(8, 0.5).unwrap();
        let spec = unit_ray_spec(1, CoefficientModel::RandomPhase);
        let mut rng = RngStream::new(3, 0).rng();
        let ch = generate_channel(&spec, &geom, &mut rng).unwrap();
        for v in &ch.h {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_invariant() {
        let geoms = [
            ArrayGeometry::ula(32, 0.5).unwrap(),
            ArrayGeometry::upa(4, 8, 0.5, 0.5).unwrap(),
        ];
        for geom in geoms {
            let elevation = geom
                .is_upa()
                .then(|| AngularModel::uniform(-FRAC_PI_2, FRAC_PI_2).unwrap());
            let spec = RayChannelSpec::new(
                exp_decay_powers(6, 2.0, 10.0),
                CoefficientModel::ComplexGaussian,
                AngularModel::von_mises(0.3, 2.0).unwrap(),
                elevation,
            )
            .unwrap();
            let mut rng = RngStream::new(5, 1).rng();
            let ch = generate_channel(&spec, &geom, &mut rng).unwrap();
            let rebuilt = ch.reconstruct();
            for (a, b) in ch.h.iter().zip(rebuilt.iter()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mean_channel_power_is_beta_times_n() {
        // E[h^H h] = N beta over realizations
        let geom = ArrayGeometry::ula(16, 0.5).unwrap();
        let spec = unit_ray_spec(4, CoefficientModel::ComplexGaussian);
        let mut rng = RngStream::new(6, 0).rng();
        let drops = 10_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..drops {
            let ch = generate_channel(&spec, &geom, &mut rng).unwrap();
            let p: f64 = ch.h.iter().map(|v| v.norm_sqr()).sum::<f64>() / geom.n() as f64;
            acc += p;
            acc2 += p * p;
        }
        let mean = acc / drops as f64;
        let var = (acc2 / drops as f64 - mean * mean).max(0.0);
        let three_se = 3.0 * (var / drops as f64).sqrt();
        assert!(
            (mean - 1.0).abs() < three_se,
            "mean {mean}, 3se {three_se}"
        );
    }

    #[test]
    fn random_phase_power_concentrates_as_n_grows() {
        // With random-phase gains, h^H h / N -> beta; sample variance at the
        // larger array must be far below the smaller one.
        let spec = unit_ray_spec(8, CoefficientModel::RandomPhase);
        let drops = 3000;
        let mut vars = Vec::new();
        for (i, n) in [64usize, 1024].into_iter().enumerate() {
            let geom = ArrayGeometry::ula(n, 0.5).unwrap();
            let mut rng = RngStream::new(7, i as u64).rng();
            let xs: Vec<f64> = (0..drops)
                .map(|_| {
                    let ch = generate_channel(&spec, &geom, &mut rng).unwrap();
                    ch.h.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64
                })
                .collect();
            let mean: f64 = xs.iter().sum::<f64>() / drops as f64;
            let var: f64 =
                xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (drops - 1) as f64;
            vars.push(var);
        }
        assert!(vars[1] < vars[0] / 4.0, "vars {vars:?}");
    }

    #[test]
    fn cross_inner_self_single_ray() {
        let geom = ArrayGeometry::ula(32, 0.5).unwrap();
        let spec = unit_ray_spec(1, CoefficientModel::RandomPhase);
        let mut rng = RngStream::new(8, 0).rng();
        let ch = generate_channel(&spec, &geom, &mut rng).unwrap();
        let v = cross_inner(&ch, &ch).unwrap();
        assert!((v.re - 32.0).abs() < 1e-10 && v.im.abs() < 1e-10);
    }

    #[test]
    fn cross_inner_hits_dirichlet_null() {
        // ULA n = 4, d = 0.5: sine gap of 1/2 puts the lag on the first null.
        let n = 4;
        let d = 0.5;
        let phi1 = 0.0f64;
        let phi2 = 0.5f64.asin();
        let geom = ArrayGeometry::ula(n, d).unwrap();
        let mk = |phi: f64| ChannelRealization {
            geometry: geom.clone(),
            azimuths: vec![phi],
            zeniths: vec![],
            gains: vec![Complex64::new(1.0, 0.0)],
            h: steering_ula(n, d, phi),
        };
        let v = cross_inner(&mk(phi1), &mk(phi2)).unwrap();
        assert!(v.norm() < 1e-12, "|v| = {}", v.norm());
    }

    proptest! {
        #[test]
        fn cross_inner_matches_dirichlet_kernel(phi1 in -3.1f64..3.1, phi2 in -3.1f64..3.1) {
            let (n, d) = (16usize, 0.5);
            let geom = ArrayGeometry::ula(n, d).unwrap();
            let mk = |phi: f64| ChannelRealization {
                geometry: geom.clone(),
                azimuths: vec![phi],
                zeniths: vec![],
                gains: vec![Complex64::new(1.0, 0.0)],
                h: steering_ula(n, d, phi),
            };
            let v = cross_inner(&mk(phi1), &mk(phi2)).unwrap();
            let tau = TAU * d * (phi2.sin() - phi1.sin());
            prop_assert!((v.norm() / n as f64 - dirichlet_cross(tau, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_inner_dimension_error() {
        let spec = unit_ray_spec(1, CoefficientModel::RandomPhase);
        let mut rng = RngStream::new(9, 0).rng();
        let a = generate_channel(&spec, &ArrayGeometry::ula(8, 0.5).unwrap(), &mut rng).unwrap();
        let b = generate_channel(&spec, &ArrayGeometry::ula(16, 0.5).unwrap(), &mut rng).unwrap();
        assert!(matches!(
            cross_inner(&a, &b),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn incompatible_spec_and_geometry() {
        let spec = unit_ray_spec(2, CoefficientModel::RandomPhase);
        let geom = ArrayGeometry::upa(2, 2, 0.5, 0.5).unwrap();
        let mut rng = RngStream::new(10, 0).rng();
        assert!(matches!(
            generate_channel(&spec, &geom, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn exp_decay_endpoints() {
        let p = exp_decay_powers(10, 5.0, 10.0);
        assert!((p.iter().sum::<f64>() - 5.0).abs() < 1e-12);
        assert!((p[0] / p[9] - 10.0).abs() < 1e-9);
    }
}
