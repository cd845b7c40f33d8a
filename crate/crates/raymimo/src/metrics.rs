//! Monte Carlo estimators of the system metrics: desired-channel power,
//! cross-user interference, total normalized interference, and the
//! desired-to-interference power ratio, plus the i.i.d. Rayleigh baseline.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::io::Write;

use crate::array::{cross_inner, generate_channel, ArrayGeometry, ChannelRealization, RayChannelSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Mergeable (sum, sum of squares, count) triple.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: usize,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    pub fn merge(mut self, other: Accumulator) -> Accumulator {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// One row of a metric sweep.
#[derive(Clone, Debug)]
pub struct MetricRow {
    pub metric: String,
    pub n: usize,
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Rows of `(metric, N, K, mean, stderr, samples)`; the unit of CSV emission.
#[derive(Clone, Debug, Default)]
pub struct MetricSeries {
    pub rows: Vec<MetricRow>,
}

impl MetricSeries {
    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "metric,N,K,mean,stderr,samples")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.metric, r.n, r.k, r.mean, r.stderr, r.samples
            )?;
        }
        Ok(())
    }
}

/// Normalized desired-channel power `h^H h / N`.
pub fn ch_statistic(h: &ChannelRealization) -> f64 {
    h.h.iter().map(|v| v.norm_sqr()).sum::<f64>() / h.n() as f64
}

/// Normalized cross-user magnitude `|h_i^H h_j| / N`.
pub fn fp_statistic(hi: &ChannelRealization, hj: &ChannelRealization) -> Result<f64> {
    Ok(cross_inner(hi, hj)?.norm() / hi.n() as f64)
}

/// Total normalized interference to the target user:
/// sum over interferers of `|h_i^H h_j / N|^2`.
pub fn eta_i(target: &ChannelRealization, interferers: &[ChannelRealization]) -> Result<f64> {
    let n = target.n() as f64;
    let mut s = 0.0;
    for j in interferers {
        let v = cross_inner(target, j)?;
        s += (v.norm() / n).powi(2);
    }
    Ok(s)
}

/// A multi-user drop ensemble: geometry, a unit-gain channel spec scaled by
/// per-user link gains, drop count, and the stream addressing its randomness.
#[derive(Clone, Debug)]
pub struct DropConfig {
    pub geometry: ArrayGeometry,
    /// Channel spec for a unit-gain user; user j uses `channel.scaled(link_gains[j])`.
    pub channel: RayChannelSpec,
    pub link_gains: Vec<f64>,
    pub drops: usize,
    pub stream: RngStream,
}

impl DropConfig {
    pub fn new(
        geometry: ArrayGeometry,
        channel: RayChannelSpec,
        link_gains: Vec<f64>,
        drops: usize,
        stream: RngStream,
    ) -> Result<Self> {
        if link_gains.is_empty() {
            return Err(Error::Config("at least one user is required".into()));
        }
        if drops < 1 {
            return Err(Error::Config("drops must be >= 1".into()));
        }
        Ok(DropConfig {
            geometry,
            channel,
            link_gains,
            drops,
            stream,
        })
    }

    /// User count `K = round(N / alpha)`.
    pub fn users_for_alpha(n: usize, alpha: f64) -> usize {
        ((n as f64 / alpha).round() as usize).max(1)
    }

    pub fn k(&self) -> usize {
        self.link_gains.len()
    }
}

/// Per-drop raw samples needed by the estimators.
struct DropSample {
    /// desired-channel power statistic `h_0^H h_0 / N`
    ch: f64,
    /// sum over interferers of `|h_0^H h_j|/N` (for the mean-interference curve)
    fp_sum: f64,
    /// total normalized interference
    eta: f64,
}

/// Run all drops in parallel; drop d uses stream `base.stream_id + d`, so the
/// result is deterministic for any thread count.
fn run_drops(cfg: &DropConfig) -> Result<Vec<DropSample>> {
    let k = cfg.k();
    (0..cfg.drops)
        .into_par_iter()
        .map(|d| {
            let mut rng = cfg
                .stream
                .with_stream(cfg.stream.stream_id.wrapping_add(d as u64))
                .rng();
            // The desired user is randomly allocated one of the K distinct
            // link gains; the interferers take the rest in order.
            let pick = rng.random_range(0..k);
            let mut channels = Vec::with_capacity(k);
            let desired_spec = cfg.channel.scaled(cfg.link_gains[pick]);
            channels.push(generate_channel(&desired_spec, &cfg.geometry, &mut rng)?);
            for (j, &g) in cfg.link_gains.iter().enumerate() {
                if j == pick {
                    continue;
                }
                let spec = cfg.channel.scaled(g);
                channels.push(generate_channel(&spec, &cfg.geometry, &mut rng)?);
            }
            let target = &channels[0];
            let n = target.n() as f64;
            let mut fp_sum = 0.0;
            let mut eta = 0.0;
            for j in &channels[1..] {
                let v = cross_inner(target, j)?.norm() / n;
                fp_sum += v;
                eta += v * v;
            }
            Ok(DropSample {
                ch: ch_statistic(target),
                fp_sum,
                eta,
            })
        })
        .collect()
}

/// All metric rows derivable from one set of drops.
#[derive(Clone, Debug)]
pub struct EnsembleRows {
    pub ch: MetricRow,
    pub fp: MetricRow,
    pub eta: MetricRow,
    /// Absent when fewer than 30 drops were run (no valid standard error).
    pub zeta: Option<MetricRow>,
}

/// Run the ensemble once and derive every per-size metric row from it.
pub fn ensemble_rows(cfg: &DropConfig) -> Result<EnsembleRows> {
    let samples = run_drops(cfg)?;
    let k = cfg.k();
    let n = cfg.geometry.n();
    let mut ch = Accumulator::default();
    let mut fp = Accumulator::default();
    let mut eta = Accumulator::default();
    for s in &samples {
        ch.push(s.ch);
        eta.push(s.eta);
        if k > 1 {
            fp.push(s.fp_sum / (k - 1) as f64);
        }
    }
    let row = |metric: &str, acc: &Accumulator| MetricRow {
        metric: metric.into(),
        n,
        k,
        mean: if acc.count > 0 { acc.mean() } else { 0.0 },
        stderr: if acc.count > 0 { acc.stderr() } else { 0.0 },
        samples: acc.count.max(1),
    };
    let zeta = if cfg.drops >= 30 {
        Some(zeta_from_samples(&samples, n, k)?)
    } else {
        None
    };
    Ok(EnsembleRows {
        ch: row("ch_S", &ch),
        fp: row("fp_I", &fp),
        eta: row("eta", &eta),
        zeta,
    })
}

/// Channel-hardening and cross-interference curves for one geometry:
/// mean of `S = h^H h / N` and mean of `I = |h_i^H h_j| / N` (averaged over
/// interferers), each with standard errors.
pub fn ch_fp_point(cfg: &DropConfig) -> Result<(MetricRow, MetricRow)> {
    let rows = ensemble_rows(cfg)?;
    Ok((rows.ch, rows.fp))
}

/// Monte Carlo mean of the total normalized interference.
pub fn eta_point(cfg: &DropConfig) -> Result<MetricRow> {
    Ok(ensemble_rows(cfg)?.eta)
}

/// Per-drop samples of the desired-channel power statistic (for CDF and
/// variance studies).
pub fn ch_samples(cfg: &DropConfig) -> Result<Vec<f64>> {
    Ok(run_drops(cfg)?.into_iter().map(|s| s.ch).collect())
}

fn zeta_from_samples(samples: &[DropSample], n: usize, k: usize) -> Result<MetricRow> {
    let num_sum: f64 = samples.iter().map(|s| s.ch * s.ch).sum();
    let den_sum: f64 = samples.iter().map(|s| s.eta).sum();
    if den_sum <= 0.0 {
        return Err(Error::DegenerateEnsemble(
            "zeta_lsp: zero interference-power estimate".into(),
        ));
    }
    let zeta = num_sum / den_sum;
    // leave-one-drop-out jackknife
    let mut jack = Vec::with_capacity(samples.len());
    for s in samples {
        let den = den_sum - s.eta;
        if den > 0.0 {
            jack.push((num_sum - s.ch * s.ch) / den);
        }
    }
    let m = jack.len() as f64;
    let jbar: f64 = jack.iter().sum::<f64>() / m;
    let var = jack.iter().map(|z| (z - jbar) * (z - jbar)).sum::<f64>() * (m - 1.0) / m;
    Ok(MetricRow {
        metric: "zeta_lsp".into(),
        n,
        k,
        mean: zeta,
        stderr: var.sqrt(),
        samples: samples.len(),
    })
}

/// Ratio of the mean desired channel power to the mean total interference
/// power, `E[|h^H h / N|^2] / E[eta]`, estimated as a ratio of means with a
/// jackknife standard error.
pub fn zeta_lsp(cfg: &DropConfig) -> Result<MetricRow> {
    if cfg.drops < 30 {
        return Err(Error::Config(
            "zeta_lsp needs at least 30 drops for a valid standard error".into(),
        ));
    }
    let samples = run_drops(cfg)?;
    zeta_from_samples(&samples, cfg.geometry.n(), cfg.k())
}

/// Mean total normalized interference for i.i.d. CN(0,1) channels (unit
/// gains): the statistical-baseline curve. The exact mean is `(K-1)/N`.
pub fn rayleigh_baseline(n: usize, k: usize, drops: usize, stream: RngStream) -> MetricRow {
    let acc = (0..drops)
        .into_par_iter()
        .map(|d| {
            let mut rng = stream.with_stream(stream.stream_id.wrapping_add(d as u64)).rng();
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
                (0..n)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex64::new(re, im) / 2f64.sqrt()
                    })
                    .collect()
            };
            let hi = draw(&mut rng);
            let mut eta = 0.0;
            for _ in 1..k {
                let hj = draw(&mut rng);
                let mut inner = Complex64::default();
                for (a, b) in hi.iter().zip(hj.iter()) {
                    inner += a.conj() * b;
                }
                eta += (inner.norm() / n as f64).powi(2);
            }
            let mut a = Accumulator::default();
            a.push(eta);
            a
        })
        .reduce(Accumulator::default, Accumulator::merge);
    MetricRow {
        metric: "eta_rayleigh".into(),
        n,
        k,
        mean: acc.mean(),
        stderr: acc.stderr(),
        samples: acc.count,
    }
}
