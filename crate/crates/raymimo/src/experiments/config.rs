//! Experiment configuration: TOML schema, merge with preset defaults,
//! validation, and resolution into runnable form.
//!
//! All angles in config files are degrees; conversion to radians happens here.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::angular::AngularModel;
use crate::array::CoefficientModel;
use crate::error::{Error, Result};

use super::registry::figure_defaults;

/// On-disk configuration. Every section is optional; preset experiments fill
/// the gaps, `custom` must provide them.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<RawGeometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub users: Option<RawUsers>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<RawChannel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheduler: Option<RawScheduler>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drops: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGeometry {
    /// "ula" or "upa"
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dy: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUsers {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    /// "random-phase" or "complex-gaussian"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<String>,
    pub rays: usize,
    /// "equal" or "exp-decay" (deterministic cluster-power decay)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers: Option<String>,
    /// "equal" or "exp-decay" (deterministic user link-gain decay)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_gains: Option<String>,
    /// first/last ratio for the exp-decay schemes
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_ratio: Option<f64>,
    pub azimuth: RawAngular,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elevation: Option<RawAngular>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAngular {
    /// "uniform" | "von-mises" | "wrapped-gaussian" | "laplacian" | "clustered"
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_deg: Option<f64>,
    /// Laplacian spread as a standard deviation (scale = std / sqrt(2))
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_deg: Option<f64>,
    /// Laplacian spread as the scale parameter directly
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subrays: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub central: Option<Box<RawAngular>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<Box<RawAngular>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScheduler {
    pub epsilon: f64,
    /// pool size = ceil(pool_factor * K); default 1.0
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_factor: Option<f64>,
}

impl RawAngular {
    pub fn uniform(lo_deg: f64, hi_deg: f64) -> Self {
        RawAngular {
            kind: "uniform".into(),
            lo_deg: Some(lo_deg),
            hi_deg: Some(hi_deg),
            ..blank()
        }
    }

    pub fn von_mises(mean_deg: f64, kappa: f64) -> Self {
        RawAngular {
            kind: "von-mises".into(),
            mean_deg: Some(mean_deg),
            kappa: Some(kappa),
            ..blank()
        }
    }

    pub fn wrapped_gaussian(mean_deg: f64, sigma_deg: f64) -> Self {
        RawAngular {
            kind: "wrapped-gaussian".into(),
            mean_deg: Some(mean_deg),
            sigma_deg: Some(sigma_deg),
            ..blank()
        }
    }

    pub fn laplacian_std(mean_deg: f64, std_deg: f64) -> Self {
        RawAngular {
            kind: "laplacian".into(),
            mean_deg: Some(mean_deg),
            std_deg: Some(std_deg),
            ..blank()
        }
    }

    pub fn laplacian_scale(mean_deg: f64, scale_deg: f64) -> Self {
        RawAngular {
            kind: "laplacian".into(),
            mean_deg: Some(mean_deg),
            scale_deg: Some(scale_deg),
            ..blank()
        }
    }

    pub fn clustered(clusters: usize, subrays: usize, central: RawAngular, offset: RawAngular) -> Self {
        RawAngular {
            kind: "clustered".into(),
            clusters: Some(clusters),
            subrays: Some(subrays),
            central: Some(Box::new(central)),
            offset: Some(Box::new(offset)),
            ..blank()
        }
    }

    /// Degrees-to-radians conversion and model construction.
    pub fn to_model(&self) -> Result<AngularModel> {
        let rad = |x: f64| x.to_radians();
        match self.kind.as_str() {
            "uniform" => AngularModel::uniform(
                rad(self.lo_deg.unwrap_or(0.0)),
                rad(self.hi_deg.unwrap_or(360.0)),
            ),
            "von-mises" => AngularModel::von_mises(
                rad(self.mean_deg.unwrap_or(0.0)),
                self.kappa
                    .ok_or_else(|| Error::Config("von-mises needs kappa".into()))?,
            ),
            "wrapped-gaussian" => AngularModel::wrapped_gaussian(
                rad(self.mean_deg.unwrap_or(0.0)),
                rad(self
                    .sigma_deg
                    .ok_or_else(|| Error::Config("wrapped-gaussian needs sigma_deg".into()))?),
            ),
            "laplacian" => {
                let scale = match (self.std_deg, self.scale_deg) {
                    (Some(s), None) => rad(s) * FRAC_1_SQRT_2,
                    (None, Some(b)) => rad(b),
                    _ => {
                        return Err(Error::Config(
                            "laplacian needs exactly one of std_deg / scale_deg".into(),
                        ))
                    }
                };
                AngularModel::laplacian(rad(self.mean_deg.unwrap_or(0.0)), scale)
            }
            "clustered" => {
                let central = self
                    .central
                    .as_ref()
                    .ok_or_else(|| Error::Config("clustered needs central".into()))?
                    .to_model()?;
                let offset = self
                    .offset
                    .as_ref()
                    .ok_or_else(|| Error::Config("clustered needs offset".into()))?
                    .to_model()?;
                AngularModel::clustered(
                    central,
                    offset,
                    self.clusters
                        .ok_or_else(|| Error::Config("clustered needs clusters".into()))?,
                    self.subrays
                        .ok_or_else(|| Error::Config("clustered needs subrays".into()))?,
                )
            }
            other => Err(Error::Config(format!("unknown angular kind '{other}'"))),
        }
    }
}

fn blank() -> RawAngular {
    RawAngular {
        kind: String::new(),
        lo_deg: None,
        hi_deg: None,
        mean_deg: None,
        kappa: None,
        sigma_deg: None,
        std_deg: None,
        scale_deg: None,
        clusters: None,
        subrays: None,
        central: None,
        offset: None,
    }
}

/// A validation finding; errors block execution, warnings do not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

fn err(field: &str, message: impl Into<String>) -> Finding {
    Finding {
        severity: Severity::Error,
        field: field.into(),
        message: message.into(),
    }
}

fn warn(field: &str, message: impl Into<String>) -> Finding {
    Finding {
        severity: Severity::Warning,
        field: field.into(),
        message: message.into(),
    }
}

/// Merge a user config over the preset defaults of its named experiment.
/// `sweep.n`, `sweep.drops` and `seed` merge field-by-field; other sections
/// replace the preset wholesale when present.
pub fn merge_defaults(user: &RawConfig) -> Result<RawConfig> {
    let base = match figure_defaults(&user.experiment) {
        Some(base) => base,
        None if user.experiment == "custom" => RawConfig {
            experiment: "custom".into(),
            ..Default::default()
        },
        None => {
            return Err(Error::Config(format!(
                "unknown experiment '{}'; `list` shows the registered names",
                user.experiment
            )))
        }
    };
    let mut merged = base;
    merged.experiment = user.experiment.clone();
    if user.seed.is_some() {
        merged.seed = user.seed;
    }
    if user.out_dir.is_some() {
        merged.out_dir = user.out_dir.clone();
    }
    if let Some(sweep) = &user.sweep {
        let m = merged.sweep.get_or_insert_with(Default::default);
        if sweep.n.is_some() {
            m.n = sweep.n.clone();
        }
        if sweep.drops.is_some() {
            m.drops = sweep.drops;
        }
    }
    if user.geometry.is_some() {
        merged.geometry = user.geometry.clone();
    }
    if user.users.is_some() {
        merged.users = user.users.clone();
    }
    if user.channel.is_some() {
        merged.channel = user.channel.clone();
    }
    if user.scheduler.is_some() {
        merged.scheduler = user.scheduler.clone();
    }
    Ok(merged)
}

/// Pure validation of a merged config: field-level findings, no execution.
pub fn validate_config(cfg: &RawConfig) -> Vec<Finding> {
    let mut out = Vec::new();

    if figure_defaults(&cfg.experiment).is_none() && cfg.experiment != "custom" {
        out.push(err(
            "experiment",
            format!("'{}' is not a registered experiment", cfg.experiment),
        ));
        return out;
    }

    let is_upa = cfg
        .geometry
        .as_ref()
        .map(|g| g.kind == "upa")
        .unwrap_or(false);

    match &cfg.geometry {
        None => out.push(err("geometry", "missing geometry section")),
        Some(g) => match g.kind.as_str() {
            "ula" => {
                if !(g.d.unwrap_or(0.5) > 0.0) {
                    out.push(err("geometry.d", "spacing must be positive"));
                }
            }
            "upa" => {
                if !(g.dx.unwrap_or(0.5) > 0.0) || !(g.dy.unwrap_or(0.5) > 0.0) {
                    out.push(err("geometry.dx/dy", "spacings must be positive"));
                }
            }
            other => out.push(err("geometry.kind", format!("unknown kind '{other}'"))),
        },
    }

    match &cfg.sweep {
        None => out.push(err("sweep", "missing sweep section")),
        Some(s) => {
            match &s.n {
                None => out.push(err("sweep.n", "missing array-size list")),
                Some(n) => {
                    if n.is_empty() {
                        out.push(err("sweep.n", "array-size list is empty"));
                    }
                    if n.windows(2).any(|w| w[0] >= w[1]) {
                        out.push(err("sweep.n", "array sizes must be strictly increasing"));
                    }
                    if n.iter().any(|&x| x > 100_000) {
                        out.push(warn("sweep.n", "sizes above 1e5 exceed desk scale"));
                    }
                    if is_upa {
                        for &x in n {
                            let r = (x as f64).sqrt().round() as usize;
                            if r * r != x {
                                out.push(err(
                                    "sweep.n",
                                    format!("planar sweep sizes must be perfect squares, got {x}"),
                                ));
                            }
                        }
                    }
                }
            }
            if let Some(d) = s.drops {
                if d < 1 {
                    out.push(err("sweep.drops", "drops must be >= 1"));
                }
                if d > 10_000 {
                    out.push(warn("sweep.drops", "drop counts above 1e4 exceed desk scale"));
                }
            }
        }
    }

    match &cfg.users {
        None => out.push(err("users", "missing users section")),
        Some(u) => match (u.k, u.alpha) {
            (Some(_), Some(_)) => {
                out.push(err("users", "set exactly one of k / alpha, not both"))
            }
            (None, None) => out.push(err("users", "set one of k / alpha")),
            (Some(k), None) => {
                if k < 1 {
                    out.push(err("users.k", "k must be >= 1"));
                }
            }
            (None, Some(a)) => {
                if !(a > 0.0) {
                    out.push(err("users.alpha", "alpha must be positive"));
                }
            }
        },
    }

    match &cfg.channel {
        None => out.push(err("channel", "missing channel section")),
        Some(c) => {
            if c.rays < 1 {
                out.push(err("channel.rays", "rays must be >= 1"));
            }
            if let Some(m) = &c.coefficients {
                if m != "random-phase" && m != "complex-gaussian" {
                    out.push(err("channel.coefficients", format!("unknown model '{m}'")));
                }
            }
            for (name, v) in [("powers", &c.powers), ("link_gains", &c.link_gains)] {
                if let Some(v) = v {
                    if v != "equal" && v != "exp-decay" {
                        out.push(err(
                            &format!("channel.{name}"),
                            format!("unknown scheme '{v}'"),
                        ));
                    }
                }
            }
            if let Some(r) = c.decay_ratio {
                if !(r > 0.0) {
                    out.push(err("channel.decay_ratio", "ratio must be positive"));
                }
            }
            match c.azimuth.to_model() {
                Err(e) => out.push(err("channel.azimuth", e.to_string())),
                Ok(m) => {
                    if m.group_size() > 1 && m.group_size() != c.rays {
                        out.push(err(
                            "channel.azimuth",
                            format!(
                                "clustered model yields {} angles but rays = {}",
                                m.group_size(),
                                c.rays
                            ),
                        ));
                    }
                }
            }
            match (&c.elevation, is_upa) {
                (None, true) => out.push(err(
                    "channel.elevation",
                    "planar geometry requires an elevation model",
                )),
                (Some(_), false) => out.push(err(
                    "channel.elevation",
                    "linear geometry must not set an elevation model",
                )),
                (Some(e), true) => {
                    if let Err(e) = e.to_model() {
                        out.push(err("channel.elevation", e.to_string()));
                    }
                }
                (None, false) => {}
            }
        }
    }

    if let Some(s) = &cfg.scheduler {
        if s.epsilon < 0.0 {
            out.push(err("scheduler.epsilon", "protection level must be >= 0"));
        }
        if s.epsilon >= 2.0 {
            out.push(err(
                "scheduler.epsilon",
                "protection level must be below the sine-domain diameter 2",
            ));
        }
        if let Some(pf) = s.pool_factor {
            if !(pf >= 1.0) {
                out.push(err("scheduler.pool_factor", "pool factor must be >= 1"));
            }
        }
    }

    out
}

/// Fully resolved experiment, angles in radians, ready to run.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub name: String,
    pub seed: u64,
    pub out_dir: Option<String>,
    pub sweep_n: Vec<usize>,
    pub drops: usize,
    pub geometry: GeometryProto,
    pub users: UserSpec,
    pub channel: ChannelProto,
    pub scheduler: Option<SchedulerProto>,
    /// Echo of the merged raw config for the manifest.
    pub raw: RawConfig,
}

#[derive(Clone, Copy, Debug)]
pub enum GeometryProto {
    Ula { d: f64 },
    /// Square planar array: nx = ny = sqrt(N) per sweep point.
    Upa { dx: f64, dy: f64 },
}

#[derive(Clone, Copy, Debug)]
pub enum UserSpec {
    Fixed(usize),
    Alpha(f64),
}

impl UserSpec {
    pub fn k_for(&self, n: usize) -> usize {
        match self {
            UserSpec::Fixed(k) => *k,
            UserSpec::Alpha(a) => ((n as f64 / a).round() as usize).max(1),
        }
    }

    pub fn alpha_for(&self, n: usize) -> f64 {
        match self {
            UserSpec::Fixed(k) => n as f64 / *k as f64,
            UserSpec::Alpha(a) => *a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerScheme {
    Equal,
    ExpDecay,
}

#[derive(Clone, Debug)]
pub struct ChannelProto {
    pub coefficients: CoefficientModel,
    pub rays: usize,
    pub powers: PowerScheme,
    pub link_gains: PowerScheme,
    pub decay_ratio: f64,
    pub azimuth: AngularModel,
    pub elevation: Option<AngularModel>,
}

#[derive(Clone, Copy, Debug)]
pub struct SchedulerProto {
    pub epsilon: f64,
    pub pool_factor: f64,
}

/// Merge, validate, and resolve a raw config.
pub fn resolve(user: &RawConfig) -> Result<Experiment> {
    let merged = merge_defaults(user)?;
    let findings = validate_config(&merged);
    if let Some(e) = findings.iter().find(|f| f.severity == Severity::Error) {
        return Err(Error::Config(e.to_string()));
    }

    let geometry = match merged.geometry.as_ref().expect("validated") {
        g if g.kind == "ula" => GeometryProto::Ula {
            d: g.d.unwrap_or(0.5),
        },
        g => GeometryProto::Upa {
            dx: g.dx.unwrap_or(0.5),
            dy: g.dy.unwrap_or(0.5),
        },
    };
    let users = match merged.users.as_ref().expect("validated") {
        u if u.k.is_some() => UserSpec::Fixed(u.k.unwrap()),
        u => UserSpec::Alpha(u.alpha.unwrap()),
    };
    let ch = merged.channel.as_ref().expect("validated");
    let channel = ChannelProto {
        coefficients: match ch.coefficients.as_deref() {
            Some("complex-gaussian") => CoefficientModel::ComplexGaussian,
            _ => CoefficientModel::RandomPhase,
        },
        rays: ch.rays,
        powers: match ch.powers.as_deref() {
            Some("exp-decay") => PowerScheme::ExpDecay,
            _ => PowerScheme::Equal,
        },
        link_gains: match ch.link_gains.as_deref() {
            Some("exp-decay") => PowerScheme::ExpDecay,
            _ => PowerScheme::Equal,
        },
        decay_ratio: ch.decay_ratio.unwrap_or(10.0),
        azimuth: ch.azimuth.to_model()?,
        elevation: ch.elevation.as_ref().map(|e| e.to_model()).transpose()?,
    };
    let sweep = merged.sweep.as_ref().expect("validated");
    Ok(Experiment {
        name: merged.experiment.clone(),
        seed: merged.seed.unwrap_or(1),
        out_dir: merged.out_dir.clone(),
        sweep_n: sweep.n.clone().expect("validated"),
        drops: sweep.drops.unwrap_or(200),
        geometry,
        users,
        channel,
        scheduler: merged.scheduler.as_ref().map(|s| SchedulerProto {
            epsilon: s.epsilon,
            pool_factor: s.pool_factor.unwrap_or(1.0),
        }),
        raw: merged,
    })
}

/// Parse a TOML string into a raw config.
pub fn parse_toml(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| Error::Config(format!("config parse failure: {e}")))
}
