//! Experiment execution: sweeps, CSV emission, and the run manifest.
//!
//! Stream addressing: drop d of curve c at sweep index i uses stream id
//! `(c << 40) | (i << 24) | d`, so outputs are byte-identical across reruns
//! and thread counts.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::angular::AngularModel;
use crate::array::{
    equal_powers, exp_decay_powers, generate_channel, ArrayGeometry, ChannelRealization,
    RayChannelSpec,
};
use crate::asymptotics::{
    fit_log_slope, mu_ula_monte_carlo, mu_ula_sweep, mu_upa, mu_upa_monte_carlo,
    mu_upa_uniform_closed, upa_polar_envelope, MuMethod, MuSeries,
};
use crate::error::{Error, Result};
use crate::metrics::{ensemble_rows, eta_i, rayleigh_baseline, DropConfig, MetricSeries};
use crate::rng::RngStream;
use crate::scheduler::{
    eta_bound_ula, gamma_quad_sum, greedy_schedule, GeometryKind, ProtectionPolicy,
};

use super::config::{ChannelProto, Experiment, GeometryProto, PowerScheme, RawConfig};

/// Monte Carlo direction pairs for kernel estimates.
const KERNEL_MC_PAIRS: usize = 200_000;

/// Quantile grid size for the CDF experiment.
const CDF_QUANTILES: usize = 200;

/// Run summary written next to the CSVs as `manifest.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub config: RawConfig,
}

struct Emitter {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Emitter {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), body)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn write_metrics(&mut self, name: &str, series: &MetricSeries) -> Result<()> {
        let mut buf = Vec::new();
        series.write_csv(&mut buf)?;
        self.write(name, &buf)
    }

    fn write_mu(&mut self, name: &str, series: &MuSeries) -> Result<()> {
        let mut buf = Vec::new();
        series.write_csv(&mut buf)?;
        self.write(name, &buf)
    }
}

fn geometry_for(proto: GeometryProto, n: usize) -> Result<ArrayGeometry> {
    match proto {
        GeometryProto::Ula { d } => ArrayGeometry::ula(n, d),
        GeometryProto::Upa { dx, dy } => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(Error::Config(format!(
                    "planar sweep size {n} is not a perfect square"
                )));
            }
            ArrayGeometry::upa(side, side, dx, dy)
        }
    }
}

/// Unit-gain channel spec from the resolved channel prototype. Deterministic
/// power decay is applied per cluster when the azimuth model is clustered,
/// per ray otherwise; subrays within a cluster share their cluster's power.
fn channel_spec(ch: &ChannelProto) -> Result<RayChannelSpec> {
    let powers = match ch.powers {
        PowerScheme::Equal => equal_powers(ch.rays, 1.0),
        PowerScheme::ExpDecay => match &ch.azimuth {
            AngularModel::Clustered {
                clusters, subrays, ..
            } => {
                let cluster_powers = exp_decay_powers(*clusters, 1.0, ch.decay_ratio);
                let mut powers = Vec::with_capacity(ch.rays);
                for cp in cluster_powers {
                    for _ in 0..*subrays {
                        powers.push(cp / *subrays as f64);
                    }
                }
                powers
            }
            _ => exp_decay_powers(ch.rays, 1.0, ch.decay_ratio),
        },
    };
    RayChannelSpec::new(
        powers,
        ch.coefficients,
        ch.azimuth.clone(),
        ch.elevation.clone(),
    )
}

fn link_gains(k: usize, scheme: PowerScheme, ratio: f64) -> Vec<f64> {
    match scheme {
        PowerScheme::Equal => vec![1.0; k],
        // gains decay first-to-last by `ratio`, normalized to mean 1
        PowerScheme::ExpDecay => exp_decay_powers(k, k as f64, ratio),
    }
}

fn stream(seed: u64, curve: u64, n_idx: usize) -> RngStream {
    RngStream::new(seed, (curve << 40) | ((n_idx as u64) << 24))
}

fn drop_config(exp: &Experiment, curve: u64, n_idx: usize, n: usize) -> Result<DropConfig> {
    let geometry = geometry_for(exp.geometry, n)?;
    let k = exp.users.k_for(n);
    DropConfig::new(
        geometry,
        channel_spec(&exp.channel)?,
        link_gains(k, exp.channel.link_gains, exp.channel.decay_ratio),
        exp.drops,
        stream(exp.seed, curve, n_idx),
    )
}

/// Execute a resolved experiment, writing CSVs and a manifest into `out_dir`.
pub fn run_experiment(exp: &Experiment, out_dir: &Path) -> Result<Manifest> {
    let start = Instant::now();
    let mut em = Emitter::new(out_dir)?;
    match exp.name.as_str() {
        "fig1" | "fig6" => run_ch_fp(exp, &mut em)?,
        "fig2" => run_cdf(exp, &mut em)?,
        "fig3" => run_mu_ula_curves(exp, &mut em)?,
        "fig4" => run_mu_ula_growth(exp, &mut em)?,
        "fig5" => run_eta_ula(exp, &mut em)?,
        "fig7" => run_mu_upa_curves(exp, &mut em)?,
        "fig8" => run_mu_upa_growth(exp, &mut em)?,
        "fig9" => run_eta_zeta_upa(exp, &mut em)?,
        "fig10" => run_scheduling(exp, &mut em)?,
        "custom" => run_custom(exp, &mut em)?,
        other => return Err(Error::Config(format!("unknown experiment '{other}'"))),
    }
    let manifest = Manifest {
        experiment: exp.name.clone(),
        seed: exp.seed,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        outputs: em.outputs.clone(),
        config: exp.raw.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Io(format!("manifest serialization: {e}")))?;
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}

fn run_ch_fp(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let mut s_series = MetricSeries::default();
    let mut i_series = MetricSeries::default();
    for (i, &n) in exp.sweep_n.iter().enumerate() {
        let cfg = drop_config(exp, 0, i, n)?;
        let rows = ensemble_rows(&cfg)?;
        s_series.push(rows.ch);
        i_series.push(rows.fp);
    }
    em.write_metrics("ch_S.csv", &s_series)?;
    em.write_metrics("fp_I.csv", &i_series)
}

fn run_cdf(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    use crate::array::CoefficientModel;
    for (curve, (model, label)) in [
        (CoefficientModel::RandomPhase, "random_phase"),
        (CoefficientModel::ComplexGaussian, "complex_gaussian"),
    ]
    .into_iter()
    .enumerate()
    {
        let mut buf = Vec::new();
        writeln!(buf, "metric,N,p,value")?;
        for (i, &n) in exp.sweep_n.iter().enumerate() {
            let mut cfg = drop_config(exp, curve as u64, i, n)?;
            cfg.channel.coefficient_model = model;
            let mut xs = crate::metrics::ch_samples(&cfg)?;
            xs.sort_by(f64::total_cmp);
            for j in 0..CDF_QUANTILES {
                let p = (j as f64 + 0.5) / CDF_QUANTILES as f64;
                let idx = ((p * xs.len() as f64) as usize).min(xs.len() - 1);
                writeln!(buf, "cdf_S,{n},{p},{}", xs[idx])?;
            }
        }
        em.write(&format!("cdf_S_{label}.csv"), &buf)?;
    }
    Ok(())
}

fn mu_series_exact(model: &AngularModel, d: f64, sizes: &[usize]) -> Result<MuSeries> {
    let mus = mu_ula_sweep(model, d, sizes, MuMethod::ExactSeries)?;
    let mut out = MuSeries::default();
    for (&n, &mu) in sizes.iter().zip(mus.iter()) {
        out.push(n, mu, MuMethod::ExactSeries.label());
    }
    Ok(out)
}

fn ula_spacing(exp: &Experiment) -> f64 {
    match exp.geometry {
        GeometryProto::Ula { d } => d,
        GeometryProto::Upa { dx, .. } => dx,
    }
}

fn run_mu_ula_curves(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let d = ula_spacing(exp);
    let uniform = AngularModel::uniform(0.0, std::f64::consts::TAU)?;
    let vm = AngularModel::von_mises(0.0, 4.23)?;
    em.write_mu("mu_ula_uniform.csv", &mu_series_exact(&uniform, d, &exp.sweep_n)?)?;
    em.write_mu("mu_ula_von_mises.csv", &mu_series_exact(&vm, d, &exp.sweep_n)?)?;

    let mut mc = MuSeries::default();
    for (i, &n) in exp.sweep_n.iter().enumerate() {
        let mut rng = stream(exp.seed, 2, i).rng();
        let (mu, _se) =
            mu_ula_monte_carlo(&exp.channel.azimuth, d, n, KERNEL_MC_PAIRS, &mut rng);
        mc.push(n, mu, "monte-carlo");
    }
    em.write_mu("mu_ula_clustered_mc.csv", &mc)
}

fn run_mu_ula_growth(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let d = ula_spacing(exp);
    let curves: Vec<(String, AngularModel)> = vec![
        ("uniform".into(), AngularModel::uniform(0.0, std::f64::consts::TAU)?),
        ("vm_k4.23_m0".into(), AngularModel::von_mises(0.0, 4.23)?),
        ("vm_k4.23_m0.52".into(), AngularModel::von_mises(0.52, 4.23)?),
        ("vm_k1.49_m0".into(), AngularModel::von_mises(0.0, 1.49)?),
        ("vm_k1.49_m0.52".into(), AngularModel::von_mises(0.52, 1.49)?),
    ];
    let n_lo = 1000.min(*exp.sweep_n.last().unwrap_or(&1000));
    let n_hi = *exp.sweep_n.last().unwrap_or(&100_000);
    for (label, model) in curves {
        let series = mu_series_exact(&model, d, &exp.sweep_n)?;
        em.write_mu(&format!("mu_ula_{label}.csv"), &series)?;
        let rows: Vec<(usize, f64)> = series.rows.iter().map(|r| (r.n, r.mu)).collect();
        if let Ok(fit) = fit_log_slope(&rows, n_lo, n_hi) {
            em.write(&format!("slope_{label}.json"), fit.to_json().as_bytes())?;
        }
    }
    Ok(())
}

fn run_eta_ula(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let d = ula_spacing(exp);
    let uniform = AngularModel::uniform(0.0, std::f64::consts::TAU)?;
    let vm = AngularModel::von_mises(0.0, 4.23)?;

    // Monte Carlo curves: uniform, von Mises, clustered with decaying powers.
    let mc_curves: Vec<(&str, AngularModel, PowerScheme, PowerScheme)> = vec![
        ("eta_uniform.csv", uniform.clone(), PowerScheme::Equal, PowerScheme::Equal),
        ("eta_von_mises.csv", vm.clone(), PowerScheme::Equal, PowerScheme::Equal),
        (
            "eta_clustered_unequal.csv",
            exp.channel.azimuth.clone(),
            PowerScheme::ExpDecay,
            PowerScheme::ExpDecay,
        ),
    ];
    for (curve, (name, azimuth, powers, gains)) in mc_curves.into_iter().enumerate() {
        let mut series = MetricSeries::default();
        for (i, &n) in exp.sweep_n.iter().enumerate() {
            let mut channel = exp.channel.clone();
            channel.azimuth = azimuth.clone();
            channel.powers = powers;
            channel.link_gains = gains;
            if azimuth.group_size() <= 1 {
                channel.rays = exp.channel.rays;
            }
            let k = exp.users.k_for(n);
            let cfg = DropConfig::new(
                geometry_for(exp.geometry, n)?,
                channel_spec(&channel)?,
                link_gains(k, channel.link_gains, channel.decay_ratio),
                exp.drops,
                stream(exp.seed, curve as u64, i),
            )?;
            series.push(ensemble_rows(&cfg)?.eta);
        }
        em.write_metrics(name, &series)?;
    }

    // Analytic mean-interference curves from the kernel series:
    // E[eta] = (K - 1)/N * mu(N) at unit gains.
    for (name, model) in [
        ("eta_uniform_analytic.csv", &uniform),
        ("eta_von_mises_analytic.csv", &vm),
    ] {
        let mus = mu_ula_sweep(model, d, &exp.sweep_n, MuMethod::ExactSeries)?;
        let mut series = MetricSeries::default();
        for (&n, &mu) in exp.sweep_n.iter().zip(mus.iter()) {
            let k = exp.users.k_for(n);
            series.push(crate::metrics::MetricRow {
                metric: "eta_analytic".into(),
                n,
                k,
                mean: (k as f64 - 1.0) / n as f64 * mu,
                stderr: 0.0,
                samples: 1,
            });
        }
        em.write_metrics(name, &series)?;
    }

    // Statistical baseline converging to 1/alpha (sweep extended so the
    // limit is visible).
    let mut base = MetricSeries::default();
    let rayleigh_sweep: Vec<usize> = exp
        .sweep_n
        .iter()
        .copied()
        .chain([1024, 2048])
        .filter(|&n| n >= *exp.sweep_n.first().unwrap())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for (i, &n) in rayleigh_sweep.iter().enumerate() {
        let k = exp.users.k_for(n);
        base.push(rayleigh_baseline(n, k, exp.drops, stream(exp.seed, 8, i)));
    }
    em.write_metrics("eta_rayleigh.csv", &base)
}

fn upa_sides(exp: &Experiment) -> Vec<usize> {
    exp.sweep_n
        .iter()
        .map(|&n| (n as f64).sqrt().round() as usize)
        .collect()
}

fn narrow_channel() -> Result<ChannelProto> {
    Ok(ChannelProto {
        coefficients: crate::array::CoefficientModel::RandomPhase,
        rays: 48,
        powers: PowerScheme::ExpDecay,
        link_gains: PowerScheme::ExpDecay,
        decay_ratio: 10.0,
        azimuth: super::registry::upa_narrow_azimuth().to_model()?,
        elevation: Some(super::registry::upa_narrow_elevation().to_model()?),
    })
}

fn run_mu_upa_curves(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let (dx, dy) = match exp.geometry {
        GeometryProto::Upa { dx, dy } => (dx, dy),
        GeometryProto::Ula { d } => (d, d),
    };
    let sides = upa_sides(exp);

    let mut closed = MuSeries::default();
    for &s in &sides {
        closed.push(s * s, mu_upa_uniform_closed(s, s, dx, dy)?, "exact-series");
    }
    em.write_mu("mu_upa_uniform_closed.csv", &closed)?;

    let az_u = AngularModel::uniform(0.0, std::f64::consts::TAU)?;
    let el_u = AngularModel::uniform(-FRAC_PI_2, FRAC_PI_2)?;
    let mut quad = MuSeries::default();
    for &s in sides.iter().filter(|&&s| s <= 8) {
        quad.push(s * s, mu_upa(&az_u, &el_u, s, s, dx, dy)?, "quadrature-series");
    }
    em.write_mu("mu_upa_uniform_quadrature.csv", &quad)?;

    let wide = (exp.channel.azimuth.clone(), exp.channel.elevation.clone());
    let narrow = narrow_channel()?;
    for (curve, (name, az, el)) in [
        ("mu_upa_wide_mc.csv", wide.0, wide.1),
        ("mu_upa_narrow_mc.csv", narrow.azimuth.clone(), narrow.elevation.clone()),
    ]
    .into_iter()
    .enumerate()
    {
        let el = el.ok_or_else(|| Error::Config("planar kernel needs elevation".into()))?;
        let mut mc = MuSeries::default();
        for (i, &s) in sides.iter().enumerate() {
            let mut rng = stream(exp.seed, 4 + curve as u64, i).rng();
            let (mu, _se) =
                mu_upa_monte_carlo(&az, &el, s, s, dx, dy, KERNEL_MC_PAIRS, &mut rng);
            mc.push(s * s, mu, "monte-carlo");
        }
        em.write_mu(name, &mc)?;
    }
    Ok(())
}

fn run_mu_upa_growth(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let (dx, dy) = match exp.geometry {
        GeometryProto::Upa { dx, dy } => (dx, dy),
        GeometryProto::Ula { d } => (d, d),
    };
    let sides = upa_sides(exp);
    let mut series = MuSeries::default();
    let mut envelope = MuSeries::default();
    for &s in &sides {
        let n = s * s;
        series.push(n, mu_upa_uniform_closed(s, s, dx, dy)?, "exact-series");
        envelope.push(n, upa_polar_envelope(s, s, dx, dy), "polar-envelope");
    }
    em.write_mu("mu_upa_uniform_closed.csv", &series)?;
    em.write_mu("mu_upa_polar_envelope.csv", &envelope)?;
    let rows: Vec<(usize, f64)> = series.rows.iter().map(|r| (r.n, r.mu)).collect();
    let n_max = *exp.sweep_n.last().unwrap_or(&10_000);
    for (label, lo, hi) in [
        ("decade_lo", 100, 1000),
        ("decade_hi", 1000, n_max.max(2000)),
    ] {
        if let Ok(fit) = fit_log_slope(&rows, lo, hi) {
            em.write(&format!("slope_upa_{label}.json"), fit.to_json().as_bytes())?;
        }
    }
    Ok(())
}

fn run_eta_zeta_upa(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let narrow = narrow_channel()?;
    let scenarios: Vec<(&str, ChannelProto)> =
        vec![("wide", exp.channel.clone()), ("narrow", narrow)];
    for (si, (label, channel)) in scenarios.into_iter().enumerate() {
        for (ai, alpha) in [2.0f64, 4.0].into_iter().enumerate() {
            let mut eta_series = MetricSeries::default();
            let mut zeta_series = MetricSeries::default();
            for (i, &n) in exp.sweep_n.iter().enumerate() {
                let k = DropConfig::users_for_alpha(n, alpha);
                let cfg = DropConfig::new(
                    geometry_for(exp.geometry, n)?,
                    channel_spec(&channel)?,
                    link_gains(k, channel.link_gains, channel.decay_ratio),
                    exp.drops,
                    stream(exp.seed, (si * 2 + ai) as u64, i),
                )?;
                let rows = ensemble_rows(&cfg)?;
                eta_series.push(rows.eta);
                if let Some(z) = rows.zeta {
                    zeta_series.push(z);
                }
            }
            em.write_metrics(&format!("eta_{label}_alpha{alpha}.csv"), &eta_series)?;
            em.write_metrics(&format!("zeta_{label}_alpha{alpha}.csv"), &zeta_series)?;
        }
    }
    Ok(())
}

/// Per-drop interference traces with and without protection. The scheduled
/// file's bound column carries the closed-form cap for the admitted set; the
/// unprotected file has no cap and records NaN there.
fn run_scheduling(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let d = ula_spacing(exp);
    let sched = exp
        .scheduler
        .ok_or_else(|| Error::Config("scheduling experiment needs a scheduler section".into()))?;
    let policy = ProtectionPolicy::new(sched.epsilon, GeometryKind::Ula);
    let spec = channel_spec(&exp.channel)?;

    let mut sched_buf = Vec::new();
    let mut unsched_buf = Vec::new();
    writeln!(sched_buf, "drop,N,selected_count,eta,bound")?;
    writeln!(unsched_buf, "drop,N,selected_count,eta,bound")?;
    for (i, &n) in exp.sweep_n.iter().enumerate() {
        let k = exp.users.k_for(n);
        let pool_size = ((k as f64) * sched.pool_factor).ceil() as usize;
        let geom = geometry_for(exp.geometry, n)?;
        for drop in 0..exp.drops {
            let mut rng = stream(exp.seed, 0, i)
                .with_stream(stream(exp.seed, 0, i).stream_id + drop as u64)
                .rng();
            let pool: Vec<ChannelRealization> = (0..pool_size)
                .map(|_| generate_channel(&spec, &geom, &mut rng))
                .collect::<Result<_>>()?;

            // unprotected: the first K arrivals are served together
            let target = &pool[0];
            let others = &pool[1..k.min(pool.len())];
            let eta_unsched = eta_i(target, others)?;
            writeln!(unsched_buf, "{drop},{n},{},{eta_unsched},NaN", k.min(pool.len()))?;

            // protected: greedy admission under the separation policy
            let s = greedy_schedule(&pool, &policy, k);
            let target = &pool[s.selected[0]];
            let others: Vec<ChannelRealization> = s.selected[1..]
                .iter()
                .map(|&j| pool[j].clone())
                .collect();
            let eta_sched = eta_i(target, &others)?;
            let bound = if sched.epsilon > 0.0 {
                eta_bound_ula(gamma_quad_sum(target, &others), n, d, sched.epsilon)
            } else {
                f64::INFINITY
            };
            writeln!(
                sched_buf,
                "{drop},{n},{},{eta_sched},{bound}",
                s.selected.len()
            )?;
        }
    }
    em.write("sched_eta.csv", &sched_buf)?;
    em.write("unsched_eta.csv", &unsched_buf)
}

fn run_custom(exp: &Experiment, em: &mut Emitter) -> Result<()> {
    let mut s_series = MetricSeries::default();
    let mut i_series = MetricSeries::default();
    let mut eta_series = MetricSeries::default();
    let mut zeta_series = MetricSeries::default();
    for (i, &n) in exp.sweep_n.iter().enumerate() {
        let cfg = drop_config(exp, 0, i, n)?;
        let rows = ensemble_rows(&cfg)?;
        s_series.push(rows.ch);
        i_series.push(rows.fp);
        eta_series.push(rows.eta);
        if let Some(z) = rows.zeta {
            zeta_series.push(z);
        }
    }
    em.write_metrics("ch_S.csv", &s_series)?;
    em.write_metrics("fp_I.csv", &i_series)?;
    em.write_metrics("eta.csv", &eta_series)?;
    if !zeta_series.rows.is_empty() {
        em.write_metrics("zeta.csv", &zeta_series)?;
    }
    if exp.scheduler.is_some() {
        run_scheduling(exp, em)?;
    }
    Ok(())
}
