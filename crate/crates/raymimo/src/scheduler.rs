//! Separation-protected user admission and the interference bounds it buys.
//!
//! Users are admitted together only when every cross ray pair keeps a minimum
//! separation in the sine domain. Separation is measured on the Dirichlet
//! kernel's period: a pair passes when `|sin(tau/2)| > sin(pi d epsilon)`
//! where `tau` is the per-element phase lag of the pair. This is exactly the
//! quantity the closed-form interference bounds divide by, so the bounds hold
//! as strict inequalities for every admitted set (covered in tests).

use crate::array::{ArrayGeometry, ChannelRealization};
use std::f64::consts::PI;

/// Which admission rule applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    Ula,
    Upa,
}

/// Sine-domain protection level for co-scheduling.
#[derive(Clone, Copy, Debug)]
pub struct ProtectionPolicy {
    /// Minimum sine-domain separation; `0 <= epsilon < 2`.
    pub epsilon: f64,
    pub geometry_kind: GeometryKind,
}

impl ProtectionPolicy {
    pub fn new(epsilon: f64, geometry_kind: GeometryKind) -> Self {
        assert!(
            (0.0..2.0).contains(&epsilon),
            "protection level must satisfy 0 <= epsilon < 2, got {epsilon}"
        );
        ProtectionPolicy {
            epsilon,
            geometry_kind,
        }
    }
}

/// Per-ray sine-domain coordinates entering the per-element phase lags.
fn ula_sines(c: &ChannelRealization) -> Vec<f64> {
    c.azimuths.iter().map(|p| p.sin()).collect()
}

fn upa_sines(c: &ChannelRealization) -> (Vec<f64>, Vec<f64>) {
    let x = c
        .azimuths
        .iter()
        .zip(c.zeniths.iter())
        .map(|(p, t)| t.sin() * p.cos())
        .collect();
    let y = c
        .azimuths
        .iter()
        .zip(c.zeniths.iter())
        .map(|(p, t)| t.sin() * p.sin())
        .collect();
    (x, y)
}

/// True when the pair's kernel denominator stays above the protected floor:
/// `|sin(pi d (s_a - s_b))| > sin(pi d epsilon)` for every coordinate pair.
fn sines_separated(a: &[f64], b: &[f64], d: f64, epsilon: f64) -> bool {
    let floor = (PI * d * epsilon).sin();
    for &sa in a {
        for &sb in b {
            if (PI * d * (sa - sb)).sin().abs() <= floor {
                return false;
            }
        }
    }
    true
}

/// Within-one-user separation over all distinct ray pairs.
fn self_separated(s: &[f64], d: f64, epsilon: f64) -> bool {
    let floor = (PI * d * epsilon).sin();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            if (PI * d * (s[i] - s[j])).sin().abs() <= floor {
                return false;
            }
        }
    }
    true
}

/// Whether two users may be scheduled together under the policy.
///
/// ULA: every cross-user ray pair must be separated (the bound's derivation
/// uses only cross-user lags). UPA: cross-user pairs on both axis projections,
/// plus each user's own ray pairs on both axes, matching the lags that appear
/// in the planar bound.
pub fn admissible(
    u: &ChannelRealization,
    v: &ChannelRealization,
    policy: &ProtectionPolicy,
) -> bool {
    if policy.epsilon == 0.0 {
        return true;
    }
    match policy.geometry_kind {
        GeometryKind::Ula => {
            let d = match u.geometry {
                ArrayGeometry::Ula { d, .. } => d,
                _ => panic!("ULA policy applied to a planar realization"),
            };
            sines_separated(&ula_sines(u), &ula_sines(v), d, policy.epsilon)
        }
        GeometryKind::Upa => {
            let (dx, dy) = match u.geometry {
                ArrayGeometry::Upa { dx, dy, .. } => (dx, dy),
                _ => panic!("UPA policy applied to a linear realization"),
            };
            let (ux, uy) = upa_sines(u);
            let (vx, vy) = upa_sines(v);
            sines_separated(&ux, &vx, dx, policy.epsilon)
                && sines_separated(&uy, &vy, dy, policy.epsilon)
                && self_separated(&ux, dx, policy.epsilon)
                && self_separated(&uy, dy, policy.epsilon)
                && self_separated(&vx, dx, policy.epsilon)
                && self_separated(&vy, dy, policy.epsilon)
        }
    }
}

/// Outcome of a greedy admission pass.
#[derive(Clone, Debug)]
pub struct Schedule {
    /// Indices into the pool, in admission order.
    pub selected: Vec<usize>,
    /// False when the pool could not fill `target_k` slots; a partial
    /// schedule is a result, not an error.
    pub complete: bool,
}

/// Prefix-greedy admission in pool order: a candidate joins when admissible
/// against every already-selected user. Deterministic given the pool order.
pub fn greedy_schedule(
    pool: &[ChannelRealization],
    policy: &ProtectionPolicy,
    target_k: usize,
) -> Schedule {
    let mut selected: Vec<usize> = Vec::with_capacity(target_k);
    for (i, cand) in pool.iter().enumerate() {
        if selected.len() >= target_k {
            break;
        }
        if selected
            .iter()
            .all(|&j| admissible(&pool[j], cand, policy))
        {
            selected.push(i);
        }
    }
    let complete = selected.len() >= target_k;
    Schedule { selected, complete }
}

/// Linear-array interference bound for a protected set:
/// `eta_i <= gamma_quad_sum / (N^2 sin^2(pi d epsilon))`.
pub fn eta_bound_ula(gamma_quad_sum: f64, n: usize, d: f64, epsilon: f64) -> f64 {
    assert!(epsilon > 0.0, "bound requires epsilon > 0");
    let s = (PI * d * epsilon).sin();
    assert!(s != 0.0, "bound requires sin(pi d epsilon) != 0");
    gamma_quad_sum / ((n * n) as f64 * s * s)
}

/// Planar-array bound: fourth power of the protected sine floor.
pub fn eta_bound_upa(gamma_quad_sum: f64, n: usize, d: f64, epsilon: f64) -> f64 {
    assert!(epsilon > 0.0, "bound requires epsilon > 0");
    let s = (PI * d * epsilon).sin();
    assert!(s != 0.0, "bound requires sin(pi d epsilon) != 0");
    gamma_quad_sum / ((n * n) as f64 * s.powi(4))
}

/// The gain quadruple sum entering both bounds, with absolute values:
/// `sum_j (sum_r |g_ir|)^2 (sum_s |g_js|)^2`.
pub fn gamma_quad_sum(target: &ChannelRealization, interferers: &[ChannelRealization]) -> f64 {
    let ti: f64 = target.gains.iter().map(|g| g.norm()).sum();
    interferers
        .iter()
        .map(|j| {
            let tj: f64 = j.gains.iter().map(|g| g.norm()).sum();
            ti * ti * tj * tj
        })
        .sum()
}
