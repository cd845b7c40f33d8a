//! Semi-analytic interference predictors.
//!
//! The central object is the per-ray-pair mean interference kernel
//! `mu = (1/N) E|a(x)^H a(y)|^2` for two independently drawn ray directions.
//! For a linear array it reduces to a triangular-weighted lag series over the
//! squared characteristic values of the angle law; for a planar array it is a
//! double sum over axis lags. Both grow logarithmically in N whenever the
//! angle density puts mass on the endfire directions.

use num_complex::Complex64;
use rand::Rng;
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::io::Write;

use crate::angular::{charfn_exact_vm, charfn_oracle, AngularModel};
use crate::error::{Error, Result};
use crate::specialfn::{bessel_j0, dirichlet_cross, integrate_1d_panels, QuadratureSpec};
use crate::util::NeumaierSum;

/// How the lag-series terms `|E[e^{-jq phase}]|^2` are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuMethod {
    /// Closed forms: Bessel J0 for the full-circle uniform law, the complex-I0
    /// expression for von Mises.
    ExactSeries,
    /// Characteristic values by adaptive quadrature over the density.
    QuadratureSeries,
    /// The two-term endfire expansion in every lag term (diagnostic; accurate
    /// only for large lags).
    Asymptotic,
}

impl MuMethod {
    pub fn label(&self) -> &'static str {
        match self {
            MuMethod::ExactSeries => "exact-series",
            MuMethod::QuadratureSeries => "quadrature-series",
            MuMethod::Asymptotic => "asymptotic",
        }
    }
}

/// Closed-form characteristic value `E[e^{-j q 2 pi d sin phi}]` where one is
/// known: full-circle uniform (J0) and von Mises.
pub fn charfn_exact(model: &AngularModel, q: u32, d: f64) -> Result<Complex64> {
    match model {
        AngularModel::Uniform { lo, hi } if (hi - lo - TAU).abs() < 1e-12 => {
            Ok(Complex64::new(bessel_j0(TAU * d * q as f64)?, 0.0))
        }
        AngularModel::VonMises { mu, kappa } => charfn_exact_vm(*mu, *kappa, q, d),
        _ => Err(Error::UnsupportedVariant(format!(
            "no closed-form characteristic value for {model:?}; use quadrature or Monte Carlo"
        ))),
    }
}

/// Two-term endfire expansion of the characteristic value,
/// `(1/sqrt(d q)) [ f(-pi/2) e^{+j(2 pi d q - pi/4)} + f(pi/2) e^{-j(2 pi d q - pi/4)} ]`.
///
/// Exact up to `O(q^{-3/2})` for densities that are smooth away from the
/// endfire directions; identically zero when both endfire densities vanish.
pub fn charfn_asymptotic(model: &AngularModel, d: f64, q: u32) -> Result<Complex64> {
    if q == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let (f_plus, f_minus) = model.endfire_density()?;
    let x = TAU * d * q as f64 - FRAC_PI_4;
    let scale = 1.0 / (d * q as f64).sqrt();
    Ok(scale
        * (f_minus * Complex64::from_polar(1.0, x) + f_plus * Complex64::from_polar(1.0, -x)))
}

/// Slope of the logarithmic growth of the linear-array kernel in ln N:
/// `2 (f(pi/2)^2 + f(-pi/2)^2) / d`.
pub fn m_slope(model: &AngularModel, d: f64) -> Result<f64> {
    let (f_plus, f_minus) = model.endfire_density()?;
    Ok(2.0 * (f_plus * f_plus + f_minus * f_minus) / d)
}

/// Mean-interference factorization `beta_i * beta_bar * mu / alpha`.
pub fn expected_eta(beta_i: f64, beta_bar: f64, alpha: f64, mu: f64) -> f64 {
    beta_i * beta_bar * mu / alpha
}

fn charfn_sq(model: &AngularModel, d: f64, q: u32, method: MuMethod) -> Result<f64> {
    let v = match method {
        MuMethod::ExactSeries => charfn_exact(model, q, d)?,
        MuMethod::QuadratureSeries => charfn_oracle(model, q, d)?,
        MuMethod::Asymptotic => charfn_asymptotic(model, d, q)?,
    };
    Ok(v.norm_sqr())
}

/// Linear-array kernel for a single array size.
pub fn mu_ula(model: &AngularModel, d: f64, n: usize, method: MuMethod) -> Result<f64> {
    Ok(mu_ula_sweep(model, d, &[n], method)?[0])
}

/// Linear-array kernel over a sweep of sizes, sharing the lag terms:
/// `mu(N) = 1 + 2 sum_{q=1}^{N-1} (1 - q/N) |E[e^{-jq phase}]|^2`.
pub fn mu_ula_sweep(
    model: &AngularModel,
    d: f64,
    sizes: &[usize],
    method: MuMethod,
) -> Result<Vec<f64>> {
    if sizes.iter().any(|&n| n < 1) {
        return Err(Error::Config("array sizes must be >= 1".into()));
    }
    let max_n = sizes.iter().copied().max().unwrap_or(1);
    let mut s1 = vec![0.0f64; max_n]; // prefix of c_q
    let mut s2 = vec![0.0f64; max_n]; // prefix of q * c_q
    let mut acc1 = NeumaierSum::default();
    let mut acc2 = NeumaierSum::default();
    for q in 1..max_n {
        let c = charfn_sq(model, d, q as u32, method)?;
        acc1.add(c);
        acc2.add(q as f64 * c);
        s1[q] = acc1.value();
        s2[q] = acc2.value();
    }
    Ok(sizes
        .iter()
        .map(|&n| 1.0 + 2.0 * (s1[n - 1] - s2[n - 1] / n as f64))
        .collect())
}

/// Monte Carlo estimate of the linear-array kernel from sampled ray-direction
/// pairs; returns (estimate, standard error). Works for every model including
/// the clustered composite (sampling its single-ray marginal).
pub fn mu_ula_monte_carlo<R: Rng + ?Sized>(
    model: &AngularModel,
    d: f64,
    n: usize,
    pairs: usize,
    rng: &mut R,
) -> (f64, f64) {
    let nf = n as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..pairs {
        let a = model.sample_marginal(rng);
        let b = model.sample_marginal(rng);
        let tau = TAU * d * (b.sin() - a.sin());
        let k = dirichlet_cross(tau, n);
        let val = nf * k * k;
        sum += val;
        sum_sq += val * val;
    }
    let mean = sum / pairs as f64;
    let var = ((sum_sq / pairs as f64) - mean * mean).max(0.0);
    (mean, (var / pairs as f64).sqrt())
}

fn m_vw_quad_specs() -> (QuadratureSpec, QuadratureSpec) {
    let inner = QuadratureSpec {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 20_000,
    };
    let outer = QuadratureSpec {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_subdivisions: 20_000,
    };
    (inner, outer)
}

/// Axis-lag characteristic value of the planar array:
/// `M_{v,w} = E[e^{-j 2 pi nu sin(theta) cos(phi - Delta)}]` with
/// `nu = sqrt(v^2 dx^2 + w^2 dy^2)` and `Delta = atan2(w dy, v dx)`,
/// evaluated as a nested adaptive quadrature over the two angle densities.
pub fn m_vw(
    az: &AngularModel,
    el: &AngularModel,
    v: i64,
    w: i64,
    dx: f64,
    dy: f64,
) -> Result<Complex64> {
    if az.is_clustered() || el.is_clustered() {
        return Err(Error::UnsupportedVariant(
            "clustered models have no closed density; estimate by Monte Carlo".into(),
        ));
    }
    if v == 0 && w == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let nu = (v as f64 * dx).hypot(w as f64 * dy);
    let delta = (w as f64 * dy).atan2(v as f64 * dx);
    m_vw_by_nu(az, el, nu, delta)
}

fn m_vw_by_nu(az: &AngularModel, el: &AngularModel, nu: f64, delta: f64) -> Result<Complex64> {
    let (inner_spec, outer_spec) = m_vw_quad_specs();
    let (az_lo, az_hi) = az_support(az);
    let az_breaks = az_breakpoints(az);
    let (el_lo, el_hi) = az_support(el);
    let el_breaks = az_breakpoints(el);

    // Inner integrals can fail inside the outer closure; poison and re-check.
    let poison = std::cell::RefCell::new(None::<Error>);
    let integrand = |theta: f64| -> Complex64 {
        let amp = TAU * nu * theta.sin();
        let panels = ((amp.abs() / PI).ceil() as usize + 8).max(8);
        let inner = integrate_segments_c(
            |phi: f64| {
                Complex64::from_polar(az_pdf(az, phi), -amp * (phi - delta).cos())
            },
            az_lo,
            az_hi,
            &az_breaks,
            panels,
            &inner_spec,
        );
        match inner {
            Ok(val) => az_pdf(el, theta) * val,
            Err(e) => {
                *poison.borrow_mut() = Some(e);
                Complex64::default()
            }
        }
    };
    let outer_panels = ((4.0 * nu).ceil() as usize).max(8);
    let result = integrate_segments_c(
        integrand,
        el_lo,
        el_hi,
        &el_breaks,
        outer_panels,
        &outer_spec,
    )?;
    if let Some(e) = poison.into_inner() {
        return Err(e);
    }
    Ok(result)
}

fn az_pdf(m: &AngularModel, x: f64) -> f64 {
    m.pdf(x).expect("non-clustered model")
}

fn az_support(m: &AngularModel) -> (f64, f64) {
    match m {
        AngularModel::Uniform { lo, hi } => (*lo, *hi),
        _ => (-PI, PI),
    }
}

fn az_breakpoints(m: &AngularModel) -> Vec<f64> {
    match m {
        AngularModel::Laplacian { mean, .. } => vec![crate::util::wrap_angle(*mean)],
        _ => Vec::new(),
    }
}

fn integrate_segments_c<F: Fn(f64) -> Complex64 + Copy>(
    g: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    panels: usize,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let mut cuts = vec![lo];
    for &b in breaks {
        if b > lo + 1e-12 && b < hi - 1e-12 {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut total = Complex64::default();
    for wpair in cuts.windows(2) {
        let frac = (wpair[1] - wpair[0]) / (hi - lo);
        let p = ((panels as f64 * frac).ceil() as usize).max(8);
        total += integrate_1d_panels(g, wpair[0], wpair[1], p, spec)?;
    }
    Ok(total)
}

/// Planar-array kernel by the axis-lag double sum with quadrature
/// characteristic values:
/// `mu = sum_{v,w} (1 - |v|/Nx)(1 - |w|/Ny) |M_{v,w}|^2`.
///
/// `M` values are cached by `(nu, Delta)` quantized at 1e-12, and the
/// conjugate symmetry `M_{-v,-w} = conj(M_{v,w})` halves the work.
pub fn mu_upa(
    az: &AngularModel,
    el: &AngularModel,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
) -> Result<f64> {
    if nx < 1 || ny < 1 {
        return Err(Error::Config("nx, ny must be >= 1".into()));
    }
    let mut cache: HashMap<(i64, i64), Complex64> = HashMap::new();
    let quant = |x: f64| (x / 1e-12).round() as i64;
    let mut sum = NeumaierSum::default();
    sum.add(1.0); // (0, 0) term
    for v in 0..=(nx as i64 - 1) {
        for w in -(ny as i64 - 1)..=(ny as i64 - 1) {
            if v == 0 && w <= 0 {
                continue; // (0,0) done; (0,-w) mirrored from (0,w)
            }
            let nu = (v as f64 * dx).hypot(w as f64 * dy);
            let delta = (w as f64 * dy).atan2(v as f64 * dx);
            let key = (quant(nu), quant(delta));
            let m = match cache.get(&key) {
                Some(&m) => m,
                None => {
                    let m = m_vw_by_nu(az, el, nu, delta)?;
                    cache.insert(key, m);
                    m
                }
            };
            let wgt = (1.0 - v.unsigned_abs() as f64 / nx as f64)
                * (1.0 - w.unsigned_abs() as f64 / ny as f64);
            // this (v, w) plus its conjugate mirror (-v, -w)
            sum.add(2.0 * wgt * m.norm_sqr());
        }
    }
    Ok(sum.value())
}

/// Closed-form planar kernel for azimuth uniform on the full circle and
/// elevation uniform over a half turn: the collapsed double sum
/// `sum_{m,n} (1 - |m|/Ny)(1 - |n|/Nx) J0^4(pi sqrt(m^2 dy^2 + n^2 dx^2))`.
pub fn mu_upa_uniform_closed(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<f64> {
    // J0^4 table over the lag quadrant
    let mut table = vec![vec![0.0f64; nx]; ny];
    for (m, row) in table.iter_mut().enumerate() {
        for (n, cell) in row.iter_mut().enumerate() {
            let a = PI * (m as f64 * dy).hypot(n as f64 * dx);
            let j = bessel_j0(a)?;
            *cell = j * j * j * j;
        }
    }
    let mut sum = NeumaierSum::default();
    for m in 0..ny {
        let wm = 1.0 - m as f64 / ny as f64;
        let mult_m = if m == 0 { 1.0 } else { 2.0 };
        for n in 0..nx {
            let wn = 1.0 - n as f64 / nx as f64;
            let mult_n = if n == 0 { 1.0 } else { 2.0 };
            sum.add(mult_m * mult_n * wm * wn * table[m][n]);
        }
    }
    Ok(sum.value())
}

/// Monte Carlo estimate of the planar kernel from sampled direction pairs;
/// returns (estimate, standard error).
pub fn mu_upa_monte_carlo<R: Rng + ?Sized>(
    az: &AngularModel,
    el: &AngularModel,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    pairs: usize,
    rng: &mut R,
) -> (f64, f64) {
    let n = (nx * ny) as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..pairs {
        let (p1, t1) = (az.sample_marginal(rng), el.sample_marginal(rng));
        let (p2, t2) = (az.sample_marginal(rng), el.sample_marginal(rng));
        let tau_x = TAU * dx * (t2.sin() * p2.cos() - t1.sin() * p1.cos());
        let tau_y = TAU * dy * (t2.sin() * p2.sin() - t1.sin() * p1.sin());
        let k = dirichlet_cross(tau_x, nx) * dirichlet_cross(tau_y, ny);
        let val = n * k * k;
        sum += val;
        sum_sq += val * val;
    }
    let mean = sum / pairs as f64;
    let var = ((sum_sq / pairs as f64) - mean * mean).max(0.0);
    (mean, (var / pairs as f64).sqrt())
}

/// One kernel-vs-size series; the unit of CSV emission (`N,mu,method`).
#[derive(Clone, Debug, Default)]
pub struct MuSeries {
    pub rows: Vec<MuRow>,
}

#[derive(Clone, Debug)]
pub struct MuRow {
    pub n: usize,
    pub mu: f64,
    pub method: String,
}

impl MuSeries {
    pub fn push(&mut self, n: usize, mu: f64, method: &str) {
        self.rows.push(MuRow {
            n,
            mu,
            method: method.to_string(),
        });
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "N,mu,method")?;
        for r in &self.rows {
            writeln!(w, "{},{},{}", r.n, r.mu, r.method)?;
        }
        Ok(())
    }
}

/// Least-squares fit of kernel values against ln N.
#[derive(Clone, Copy, Debug)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_lo: usize,
    pub n_hi: usize,
}

impl SlopeFit {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"slope\": {}, \"intercept\": {}, \"r_squared\": {}, \"n_lo\": {}, \"n_hi\": {}}}",
            self.slope, self.intercept, self.r_squared, self.n_lo, self.n_hi
        )
    }
}

/// Fit `mu ~ slope * ln N + intercept` over rows with `n_lo <= N <= n_hi`.
/// Natural logarithm: the growth originates in a harmonic lag sum.
pub fn fit_log_slope(rows: &[(usize, f64)], n_lo: usize, n_hi: usize) -> Result<SlopeFit> {
    if n_lo >= n_hi {
        return Err(Error::Config(format!(
            "fit range needs n_lo < n_hi, got [{n_lo}, {n_hi}]"
        )));
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, _)| *n >= n_lo && *n <= n_hi)
        .map(|&(n, mu)| ((n as f64).ln(), mu))
        .collect();
    if pts.len() < 5 {
        return Err(Error::Config(format!(
            "fit needs at least 5 rows in [{n_lo}, {n_hi}], got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let ybar = sy / m;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - ybar) * (p.1 - ybar)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        n_lo,
        n_hi,
    })
}

/// Polar-coordinate upper envelope for the uniform planar kernel's growth:
/// `(pi/2) (ln rho_max - ln rho_min)` with `rho_min = min(dx, dy)` and
/// `rho_max = sqrt(2) max((Nx-1) dx, (Ny-1) dy)`. The kernel stays below this
/// plus an additive constant.
pub fn upa_polar_envelope(nx: usize, ny: usize, dx: f64, dy: f64) -> f64 {
    let rho_min = dx.min(dy);
    let rho_max = 2f64.sqrt() * ((nx as f64 - 1.0) * dx).max((ny as f64 - 1.0) * dy);
    if rho_max <= rho_min {
        return 0.0;
    }
    0.5 * PI * (rho_max / rho_min).ln()
}
